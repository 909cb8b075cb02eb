//! JSON description of a finite filtered chain complex:
//!
//! ```json
//! {"degrees": {"1": ["a"], "2": ["b"]},
//!  "differential": {"2:b": [[2, "a"]]},
//!  "filtration": {"a": 0, "b": 1}}
//! ```
//!
//! Filtration keys are either a bare generator name or `n:name` when a name
//! is used in several degrees.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chain::{ChainComplex, Combination, FiltrationFn, Key};
use crate::error::{Error, Result};
use crate::spectral::{make_filtered, FilteredComplex};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilteredComplexFile {
    pub degrees: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub differential: BTreeMap<String, Vec<(i64, String)>>,
    pub filtration: BTreeMap<String, i32>,
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::Malformed(msg.into())
}

fn parse_degree(s: &str) -> Result<i32> {
    s.trim().parse().map_err(|_| malformed(format!("degree `{s}` is not an integer")))
}

impl FilteredComplexFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| malformed(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Validates the description (names, targets, `d∘d = 0`, filtration
    /// compatibility) and builds the filtered complex.
    pub fn build(&self, origin: &str) -> Result<FilteredComplex> {
        let mut basis: BTreeMap<i32, Vec<Key>> = BTreeMap::new();
        for (deg, names) in &self.degrees {
            let n = parse_degree(deg)?;
            let mut seen = HashSet::new();
            for name in names {
                if !seen.insert(name) {
                    return Err(malformed(format!("generator `{name}` repeated in degree {n}")));
                }
            }
            if basis.insert(n, names.iter().map(|s| Key::atom(s)).collect()).is_some() {
                return Err(malformed(format!("degree {n} listed twice")));
            }
        }
        let has = |n: i32, name: &str| basis.get(&n).is_some_and(|b| b.contains(&Key::atom(name)));

        let mut diff: HashMap<(i32, Key), Combination> = HashMap::new();
        for (src, terms) in &self.differential {
            let (deg, name) = src
                .split_once(':')
                .ok_or_else(|| malformed(format!("differential key `{src}` is not of the form n:name")))?;
            let n = parse_degree(deg)?;
            if !has(n, name) {
                return Err(malformed(format!("differential of unknown generator `{name}` in degree {n}")));
            }
            let mut c = Combination::zero(n - 1);
            for (k, target) in terms {
                if !has(n - 1, target) {
                    return Err(malformed(format!("d({name}) names `{target}`, not a generator of degree {}", n - 1)));
                }
                c.add_term((*k).into(), Key::atom(target));
            }
            diff.insert((n, Key::atom(name)), c);
        }

        let mut flin: HashMap<(i32, Key), i32> = HashMap::new();
        for (n, keys) in &basis {
            for k in keys {
                let name = k.to_string();
                let p = self
                    .filtration
                    .get(&format!("{n}:{name}"))
                    .or_else(|| self.filtration.get(&name))
                    .ok_or_else(|| malformed(format!("no filtration index for `{name}` in degree {n}")))?;
                flin.insert((*n, k.clone()), *p);
            }
        }

        let diff = Arc::new(diff);
        let d = diff.clone();
        let table = basis.clone();
        let complex = ChainComplex::builder(origin.to_string(), move |n, g| {
            d.get(&(n, g.clone())).cloned().unwrap_or_else(|| Combination::zero(n - 1))
        })
        .basis(move |n| table.get(&n).cloned().unwrap_or_default())
        .build();

        for (n, keys) in &basis {
            for k in keys {
                if !complex.d(&complex.differential(*n, k)).is_zero() {
                    return Err(malformed(format!("d∘d is not zero on `{k}` in degree {n}")));
                }
            }
        }
        let flin = Arc::new(flin);
        let f: FiltrationFn = Arc::new(move |n, k| *flin.get(&(n, k.clone())).unwrap_or(&i32::MAX));
        let lo = basis.keys().next().copied().unwrap_or(0);
        let hi = basis.keys().last().copied().unwrap_or(0);
        filtration_check(&complex, &f, lo, hi)?;
        make_filtered(&complex, f, origin)
    }
}

/// Filtration compatibility on every generator, in all listed degrees.
fn filtration_check(c: &ChainComplex, flin: &FiltrationFn, lo: i32, hi: i32) -> Result<()> {
    for n in lo..=hi {
        for g in c.basis(n)? {
            let p = flin(n, &g);
            if let Some(m) = c.differential(n, &g).max_over(|k| flin(n - 1, k)) {
                if m > p {
                    return Err(malformed(format!("d raises the filtration of `{g}` from {p} to {m}")));
                }
            }
        }
    }
    Ok(())
}

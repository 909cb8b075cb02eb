use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::Zero;

use super::SimplicialSet;
use crate::chain::{ChainComplex, Combination, Key, Morphism};
use crate::effective::Reduction;

/// Chains of the circle: `*` in degree 0, `S1` in degree 1, zero differential.
pub fn circle_complex() -> ChainComplex {
    ChainComplex::builder("CIRCLE", |n, _| Combination::zero(n - 1))
        .basis(|n| match n {
            0 => vec![Key::atom("*")],
            1 => vec![Key::atom("S1")],
            _ => Vec::new(),
        })
        .build()
}

/// Element `g·[w]` of the free `Z[Z]`-resolution given by the bar words.
type Cell = (i64, Vec<i64>);
type Chain = BTreeMap<Cell, BigInt>;

fn add(c: &mut Chain, cell: Cell, k: BigInt) {
    if k.is_zero() {
        return;
    }
    let e = c.entry(cell.clone()).or_insert_with(BigInt::zero);
    *e += k;
    if e.is_zero() {
        c.remove(&cell);
    }
}

/// Equivariant bar differential; cells with a zero entry are degenerate.
fn bar_d(g: i64, w: &[i64]) -> Chain {
    let mut out = Chain::new();
    let n = w.len();
    if n == 0 {
        return out;
    }
    let mut push = |cell: Cell, k: i64| {
        if cell.1.iter().all(|&a| a != 0) {
            add(&mut out, cell, BigInt::from(k));
        }
    };
    push((g + w[0], w[1..].to_vec()), 1);
    for i in 1..n {
        let mut v = w.to_vec();
        v[i - 1] += v[i];
        v.remove(i);
        push((g, v), if i % 2 == 0 { 1 } else { -1 });
    }
    push((g, w[..n - 1].to_vec()), if n.is_multiple_of(2) { 1 } else { -1 });
    out
}

/// `G ∘ F` on a cell: comparison through the two-term resolution of `Z`.
fn comparison(g: i64, w: &[i64]) -> Chain {
    let mut out = Chain::new();
    match w.len() {
        0 => add(&mut out, (g, Vec::new()), BigInt::from(1)),
        1 => {
            let a = w[0];
            if a > 0 {
                for k in 0..a {
                    add(&mut out, (g + k, vec![1]), BigInt::from(1));
                }
            } else {
                for k in a..0 {
                    add(&mut out, (g + k, vec![1]), BigInt::from(-1));
                }
            }
        }
        _ => {}
    }
    out
}

/// Equivariant contracting homotopy, memoized on words (`H(g[w]) = g·H([w])`).
struct Homotopy {
    memo: Mutex<HashMap<Vec<i64>, Chain>>,
}

impl Homotopy {
    fn on_word(&self, w: &[i64]) -> Chain {
        if let Some(c) = self.memo.lock().unwrap().get(w) {
            return c.clone();
        }
        let mut y = Chain::new();
        if !w.is_empty() {
            add(&mut y, (0, w.to_vec()), BigInt::from(1));
            for (cell, k) in comparison(0, w) {
                add(&mut y, cell, -k);
            }
            for ((g, v), k) in bar_d(0, w) {
                for ((g2, u), k2) in self.on_word(&v) {
                    add(&mut y, (g + g2, u), -(&k * &k2));
                }
            }
        }
        // s(g[v]) = [g|v], zero when g is the unit.
        let mut out = Chain::new();
        for ((g, v), k) in y {
            if g != 0 {
                let mut u = vec![g];
                u.extend(v);
                add(&mut out, (0, u), k);
            }
        }
        self.memo.lock().unwrap().insert(w.to_vec(), out.clone());
        out
    }
}

/// Reduction of `C(K(Z,1))` onto the circle complex, from the comparison of
/// the bar resolution of `Z` with its two-term resolution.
pub fn circle_reduction(kz1: &SimplicialSet) -> Reduction {
    let top = kz1.chains();
    let bottom = circle_complex();
    let word = |k: &Key| match k {
        Key::Bar(w) => w.clone(),
        other => panic!("{other} is not a bar word"),
    };
    let f = Morphism::new(&top, &bottom, 0, move |n, k| {
        let w = word(k);
        match w.len() {
            0 => Combination::generator(n, Key::atom("*")),
            1 => Combination::term(n, BigInt::from(w[0]), Key::atom("S1")),
            _ => Combination::zero(n),
        }
    });
    let g = Morphism::new(&bottom, &top, 0, |n, k| match k {
        Key::Atom(s) if s == "S1" => Combination::generator(n, Key::Bar(vec![1])),
        _ => Combination::generator(n, Key::Bar(Vec::new())),
    });
    let homotopy = Arc::new(Homotopy { memo: Mutex::new(HashMap::new()) });
    let h = Morphism::new(&top, &top, 1, move |n, k| {
        let mut out = Combination::zero(n + 1);
        for ((_, u), c) in homotopy.on_word(&word(k)) {
            out.add_term(c, Key::Bar(u));
        }
        out
    });
    Reduction::new(&top, &bottom, f, g, h)
}

#[cfg(test)]
mod tests {
    use super::super::k_z_1;
    use super::*;
    use crate::chain::homology;
    use crate::effective::{validate_reduction, SampleSpec};

    #[test]
    fn homotopy_on_one_simplices() {
        let (kz1, _) = k_z_1();
        let r = circle_reduction(&kz1);
        let h = r.h.on(1, &Key::Bar(vec![3]));
        assert_eq!(h, Combination::from_terms(2, [(-1, Key::Bar(vec![1, 1])), (-1, Key::Bar(vec![2, 1]))]));
        assert!(r.h.on(1, &Key::Bar(vec![1])).is_zero());
    }

    #[test]
    fn circle_reduction_is_valid() {
        let (kz1, _) = k_z_1();
        let r = circle_reduction(&kz1);
        let report = validate_reduction(&r, &SampleSpec::new(5, 200, 11));
        assert!(report.is_valid(), "{report}");
        let h: Vec<usize> = (0..3).map(|n| homology(&r.bottom, n).unwrap().invariant_factors().len()).collect();
        assert_eq!(h, [1, 1, 0]);
    }
}

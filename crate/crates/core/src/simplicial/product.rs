use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, RngCore};

use super::{AbSimplex, SimplicialGroup, SimplicialModel, SimplicialSet};
use crate::chain::{FiltrationFn, Key};

/// Twisting operator `τ` from a base simplicial set into a simplicial group.
/// `τ(η_J x)` is the unit when `0 ∈ J`, otherwise `η_{J-1} τ(x)`.
#[derive(Clone)]
pub struct Twisting {
    group: Arc<dyn SimplicialGroup>,
    fiber: SimplicialSet,
    on_core: Arc<dyn Fn(&Key) -> AbSimplex + Send + Sync>,
}

impl Twisting {
    pub fn new(
        group: Arc<dyn SimplicialGroup>,
        fiber: SimplicialSet,
        on_core: impl Fn(&Key) -> AbSimplex + Send + Sync + 'static,
    ) -> Self {
        Twisting { group, fiber, on_core: Arc::new(on_core) }
    }

    pub fn fiber(&self) -> &SimplicialSet {
        &self.fiber
    }

    /// `τ(b)` for a base simplex of dimension `dim >= 1`.
    pub fn apply(&self, dim: usize, b: &AbSimplex) -> AbSimplex {
        if b.dgop.contains(&0) {
            return self.group.unit(dim - 1);
        }
        let inner = (self.on_core)(&b.core);
        let mut dgop: Vec<u32> = b.dgop.iter().map(|j| j - 1).collect();
        dgop.extend_from_slice(&inner.dgop);
        AbSimplex::new(dgop, inner.core)
    }
}

/// Pulls common degeneracies out of a pair of simplices of the same
/// dimension, giving `η_J (x, y)` with `(x, y)` non-degenerate.
pub(crate) fn extract_common(base: &AbSimplex, fiber: &AbSimplex) -> AbSimplex {
    let mut a: Vec<u32> = base.dgop.clone();
    let mut b: Vec<u32> = fiber.dgop.clone();
    let mut outer = Vec::new();
    loop {
        let sa: BTreeSet<u32> = a.iter().copied().collect();
        let Some(&m) = b.iter().filter(|j| sa.contains(j)).max() else {
            break;
        };
        outer.push(m);
        let strip = |v: &mut Vec<u32>| {
            *v = v.iter().filter(|&&j| j != m).map(|&j| if j > m { j - 1 } else { j }).collect();
        };
        strip(&mut a);
        strip(&mut b);
    }
    let key =
        Key::crpr(AbSimplex { dgop: a, core: base.core.clone() }, AbSimplex { dgop: b, core: fiber.core.clone() });
    AbSimplex { dgop: outer, core: key }
}

fn disjoint(a: &[u32], b: &[u32]) -> bool {
    a.iter().all(|j| !b.contains(j))
}

struct Product {
    base: SimplicialSet,
    fiber: SimplicialSet,
    twisting: Option<Twisting>,
}

impl Product {
    fn parts(core: &Key) -> (&AbSimplex, &AbSimplex) {
        core.as_crpr().unwrap_or_else(|| panic!("{core} is not a product simplex"))
    }
}

impl SimplicialModel for Product {
    fn origin(&self) -> String {
        match &self.twisting {
            None => format!("CRTS-PRDC {} {}", self.base.origin(), self.fiber.origin()),
            Some(_) => format!("FIBRATION-TOTAL {} {}", self.base.origin(), self.fiber.origin()),
        }
    }

    fn core_dim(&self, core: &Key) -> usize {
        let (b, _) = Self::parts(core);
        self.base.core_dim(&b.core) + b.dgop.len()
    }

    fn face_core(&self, i: usize, dim: usize, core: &Key) -> AbSimplex {
        let (b, f) = Self::parts(core);
        let fb = self.base.face(i, dim, b);
        let mut ff = self.fiber.face(i, dim, f);
        if i == 0 {
            if let Some(t) = &self.twisting {
                ff = t.group.mul(dim - 1, &t.apply(dim, b), &ff);
            }
        }
        extract_common(&fb, &ff)
    }

    fn basis(&self, dim: usize) -> Option<Vec<Key>> {
        let mut out = Vec::new();
        for p in 0..=dim {
            let xs = self.base.model().basis(p)?;
            if xs.is_empty() {
                continue;
            }
            for q in (dim - p)..=dim {
                let ys = self.fiber.model().basis(q)?;
                if ys.is_empty() {
                    continue;
                }
                for j in subsets(dim, dim - p) {
                    let rest: Vec<u32> = (0..dim as u32).filter(|i| !j.contains(i)).collect();
                    for k in subsets_of(&rest, dim - q) {
                        for x in &xs {
                            for y in &ys {
                                out.push(Key::crpr(
                                    AbSimplex { dgop: j.clone(), core: x.clone() },
                                    AbSimplex { dgop: k.clone(), core: y.clone() },
                                ));
                            }
                        }
                    }
                }
            }
        }
        out.sort();
        Some(out)
    }

    fn sample(&self, rng: &mut dyn RngCore, dim: usize) -> Option<Key> {
        for _ in 0..32 {
            let p = rng.gen_range(0..=dim);
            let q = rng.gen_range(dim - p..=dim);
            let (Some(x), Some(y)) = (self.base.sample(rng, p), self.fiber.sample(rng, q)) else {
                continue;
            };
            let positions = sample_indices(rng, dim, 2 * dim - p - q).into_vec();
            let mut j: Vec<u32> = positions[..dim - p].iter().map(|&i| i as u32).collect();
            let mut k: Vec<u32> = positions[dim - p..].iter().map(|&i| i as u32).collect();
            j.sort_by(|a, b| b.cmp(a));
            k.sort_by(|a, b| b.cmp(a));
            return Some(Key::crpr(AbSimplex { dgop: j, core: x }, AbSimplex { dgop: k, core: y }));
        }
        None
    }

    fn contains(&self, dim: usize, core: &Key) -> bool {
        let Some((b, f)) = core.as_crpr() else {
            return false;
        };
        let ok = |s: &AbSimplex, set: &SimplicialSet| {
            let decreasing = s.dgop.windows(2).all(|w| w[0] > w[1]);
            let in_range = s.dgop.iter().all(|&j| (j as usize) < dim);
            decreasing && in_range && s.dgop.len() <= dim && set.model().contains(dim - s.dgop.len(), &s.core)
        };
        ok(b, &self.base) && ok(f, &self.fiber) && disjoint(&b.dgop, &f.dgop)
    }
}

/// Decreasing `k`-subsets of `{0, …, n-1}`.
fn subsets(n: usize, k: usize) -> Vec<Vec<u32>> {
    let all: Vec<u32> = (0..n as u32).collect();
    subsets_of(&all, k)
}

fn subsets_of(items: &[u32], k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let n = items.len();
    if k > n {
        return out;
    }
    for mask in 0u64..(1u64 << n) {
        if mask.count_ones() as usize == k {
            let mut s: Vec<u32> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| items[i]).collect();
            s.reverse();
            out.push(s);
        }
    }
    out
}

/// Cartesian product `a × b`.
pub fn cartesian_product(a: &SimplicialSet, b: &SimplicialSet) -> SimplicialSet {
    SimplicialSet::new(Arc::new(Product { base: a.clone(), fiber: b.clone(), twisting: None }))
}

/// Twisted cartesian product `base ×_τ fiber`; `∂_0` is twisted by `τ`.
pub fn fibration_total(base: &SimplicialSet, twisting: &Twisting) -> SimplicialSet {
    SimplicialSet::new(Arc::new(Product {
        base: base.clone(),
        fiber: twisting.fiber.clone(),
        twisting: Some(twisting.clone()),
    }))
}

/// Serre filtration on a product: the dimension of the base core.
pub fn serre_filtration_total() -> FiltrationFn {
    Arc::new(|n, g| match g.as_crpr() {
        Some((b, _)) => n - b.dgop.len() as i32,
        None => n,
    })
}

/// Serre filtration on a tensor product: the degree of the left factor.
pub fn serre_filtration_tensor() -> FiltrationFn {
    Arc::new(|n, g| g.as_tensor().map_or(n, |t| t.left_degree))
}

#[cfg(test)]
mod tests {
    use super::super::{k_z2_1, k_z_1, sphere};
    use super::*;
    use crate::chain::{check_dd, homology};
    use num_bigint::BigInt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn hopf_total(k: i64) -> SimplicialSet {
        let s2 = sphere(2).unwrap();
        let (kz1, g) = k_z_1();
        let t = Twisting::new(g, kz1, move |_| AbSimplex::non_degenerate(Key::Bar(vec![k])));
        fibration_total(&s2, &t)
    }

    #[test]
    fn common_degeneracies() {
        let a = AbSimplex { dgop: vec![2, 0], core: Key::atom("x") };
        let b = AbSimplex { dgop: vec![2, 1], core: Key::atom("y") };
        let e = extract_common(&a, &b);
        assert_eq!(e.dgop, vec![2]);
        let (x, y) = e.core.as_crpr().unwrap();
        assert_eq!(x.dgop, vec![0]);
        assert_eq!(y.dgop, vec![1]);
    }

    #[test]
    fn twisted_differential_of_sphere_cell() {
        let tot = hopf_total(1);
        let c = tot.chains();
        let g = Key::crpr(
            AbSimplex::non_degenerate(Key::atom("S2")),
            AbSimplex { dgop: vec![1, 0], core: Key::Bar(vec![]) },
        );
        let d = c.differential(2, &g);
        let target =
            Key::crpr(AbSimplex { dgop: vec![0], core: Key::atom("*") }, AbSimplex::non_degenerate(Key::Bar(vec![1])));
        assert_eq!(d.len(), 1);
        assert_eq!(d.coefficient(&target), BigInt::from(1));
        assert!(c.basis(2).is_err());
    }

    #[test]
    fn dd_vanishes_on_sampled_generators() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in [1, 2] {
            let c = hopf_total(k).chains();
            for n in 1..6 {
                let gens = c.check_generators(n, 40, &mut rng);
                assert!(!gens.is_empty());
                assert_eq!(check_dd(&c, n, &gens), None);
            }
        }
    }

    #[test]
    fn effective_product_homology() {
        let s2 = sphere(2).unwrap();
        let (kz2, g) = k_z2_1();
        let t = Twisting::new(g, kz2.clone(), |_| AbSimplex::non_degenerate(Key::Int(1)));
        let tot = fibration_total(&s2, &t).chains();
        for n in 0..5 {
            let gens = tot.basis(n).unwrap();
            assert_eq!(check_dd(&tot, n, &gens), None);
        }
        let flat = cartesian_product(&s2, &kz2).chains();
        let h: Vec<String> = (0..4)
            .map(|n| {
                homology(&flat, n)
                    .unwrap()
                    .invariant_factors()
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        assert_eq!(h, ["Z", "Z/2Z", "Z", "Z/2Z,Z/2Z"]);
    }
}

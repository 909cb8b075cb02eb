//! Simplicial sets, their normalized chain complexes, and the constructions
//! behind twisted cartesian products.

mod circle;
mod ez;
mod models;
mod product;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::RngCore;

use crate::chain::{ChainComplex, Combination, Key};
use crate::error::{Error, Result};

pub use circle::{circle_complex, circle_reduction};
pub use ez::ez_reduction;
pub use models::{k_z2_1, k_z_1, sphere, BarGroup};
pub use product::{cartesian_product, fibration_total, serre_filtration_tensor, serre_filtration_total, Twisting};

/// A degeneracy operator applied to a non-degenerate core:
/// `η_{j1} η_{j2} … η_{jk} core` with `j1 > j2 > … > jk` (outermost first).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbSimplex {
    pub dgop: Vec<u32>,
    pub core: Key,
}

impl AbSimplex {
    pub fn new(dgop: Vec<u32>, core: Key) -> Self {
        AbSimplex { dgop: normalize_dgop(dgop), core }
    }

    pub fn non_degenerate(core: Key) -> Self {
        AbSimplex { dgop: Vec::new(), core }
    }

    pub fn is_degenerate(&self) -> bool {
        !self.dgop.is_empty()
    }

    /// `η_i self`
    pub fn degenerate(&self, i: u32) -> AbSimplex {
        let mut ops = Vec::with_capacity(self.dgop.len() + 1);
        ops.push(i);
        ops.extend_from_slice(&self.dgop);
        AbSimplex { dgop: normalize_dgop(ops), core: self.core.clone() }
    }

    /// Degeneracy list in the hyphenated style, `-` when empty.
    pub fn dgop_label(&self) -> String {
        if self.dgop.is_empty() {
            "-".to_string()
        } else {
            self.dgop.iter().map(u32::to_string).collect::<Vec<_>>().join("-")
        }
    }
}

impl fmt::Display for AbSimplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<AbSm {} {}>", self.dgop_label(), self.core)
    }
}

/// Rewrites an arbitrary word of degeneracies (outermost first) into the
/// strictly decreasing normal form using `η_a η_b = η_{b+1} η_a` for `a <= b`.
pub fn normalize_dgop(mut ops: Vec<u32>) -> Vec<u32> {
    loop {
        let Some(i) = (0..ops.len().saturating_sub(1)).find(|&i| ops[i] <= ops[i + 1]) else {
            return ops;
        };
        let (a, b) = (ops[i], ops[i + 1]);
        ops[i] = b + 1;
        ops[i + 1] = a;
    }
}

/// Pushes the face `∂_i` through a normalized degeneracy word. Returns the
/// surviving degeneracies and the face index left to apply to the core, if any.
pub fn face_through_dgop(i: usize, dgop: &[u32]) -> (Vec<u32>, Option<usize>) {
    let mut out = Vec::with_capacity(dgop.len());
    let mut face = Some(i);
    for &j in dgop {
        let ju = j as usize;
        match face {
            None => out.push(j),
            Some(f) if f < ju => out.push(j - 1),
            Some(f) if f == ju || f == ju + 1 => face = None,
            Some(f) => {
                out.push(j);
                face = Some(f - 1);
            }
        }
    }
    (out, face)
}

/// Index sets of the `(p, q)`-shuffles of `{0, …, p+q-1}`, as `(mu, nu)`
/// with `|mu| = p`, and the permutation sign.
pub fn shuffles(p: usize, q: usize) -> Vec<(Vec<u32>, Vec<u32>, i32)> {
    let n = p + q;
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n) {
        if mask.count_ones() as usize != p {
            continue;
        }
        let mu: Vec<u32> = (0..n as u32).filter(|&i| mask & (1 << i) != 0).collect();
        let nu: Vec<u32> = (0..n as u32).filter(|&i| mask & (1 << i) == 0).collect();
        let inversions: u32 = mu.iter().enumerate().map(|(k, &m)| m - k as u32).sum();
        out.push((mu, nu, if inversions.is_multiple_of(2) { 1 } else { -1 }));
    }
    out
}

/// Behaviour of one simplicial set on its non-degenerate cores.
pub trait SimplicialModel: Send + Sync {
    fn kind(&self) -> &'static str {
        "Simplicial-Set"
    }
    fn origin(&self) -> String;
    fn core_dim(&self, core: &Key) -> usize;
    /// `∂_i` of a non-degenerate core of dimension `dim`.
    fn face_core(&self, i: usize, dim: usize, core: &Key) -> AbSimplex;
    /// Non-degenerate cores in dimension `dim`; `None` when locally effective.
    fn basis(&self, dim: usize) -> Option<Vec<Key>>;
    fn sample(&self, rng: &mut dyn RngCore, dim: usize) -> Option<Key>;
    fn contains(&self, dim: usize, core: &Key) -> bool;
}

/// A simplicial group structure, used for the fibre of a twisted product.
pub trait SimplicialGroup: SimplicialModel {
    fn mul(&self, dim: usize, a: &AbSimplex, b: &AbSimplex) -> AbSimplex;
    fn unit(&self, dim: usize) -> AbSimplex;
}

/// Shared handle on a simplicial model.
#[derive(Clone)]
pub struct SimplicialSet {
    id: u64,
    model: Arc<dyn SimplicialModel>,
}

impl fmt::Debug for SimplicialSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[K{} {}]", self.id, self.model.kind())
    }
}

static NEXT_SET: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(1);

impl SimplicialSet {
    pub fn new(model: Arc<dyn SimplicialModel>) -> Self {
        SimplicialSet { id: NEXT_SET.fetch_add(1, std::sync::atomic::Ordering::Relaxed), model }
    }

    pub fn model(&self) -> &Arc<dyn SimplicialModel> {
        &self.model
    }

    pub fn origin(&self) -> String {
        self.model.origin()
    }

    pub fn is_effective(&self) -> bool {
        self.model.basis(0).is_some()
    }

    pub fn basis(&self, dim: usize) -> Result<Vec<Key>> {
        self.model.basis(dim).ok_or_else(|| Error::LocallyEffective(format!("{self:?}")))
    }

    pub fn sample(&self, rng: &mut dyn RngCore, dim: usize) -> Option<Key> {
        self.model.sample(rng, dim)
    }

    pub fn core_dim(&self, core: &Key) -> usize {
        self.model.core_dim(core)
    }

    /// `∂_i` of an abstract simplex of dimension `dim`.
    pub fn face(&self, i: usize, dim: usize, s: &AbSimplex) -> AbSimplex {
        face_with(self.model.as_ref(), i, dim, s)
    }

    /// The last face applied `times` times (front face).
    pub fn front(&self, dim: usize, times: usize, s: &AbSimplex) -> AbSimplex {
        let mut cur = s.clone();
        for k in 0..times {
            cur = self.face(dim - k, dim - k, &cur);
        }
        cur
    }

    /// The zeroth face applied `times` times (back face).
    pub fn back(&self, dim: usize, times: usize, s: &AbSimplex) -> AbSimplex {
        let mut cur = s.clone();
        for k in 0..times {
            cur = self.face(0, dim - k, &cur);
        }
        cur
    }

    /// Normalized chain complex: non-degenerate simplices as generators,
    /// alternating sum of faces with degenerate faces dropped.
    pub fn chains(&self) -> ChainComplex {
        chains_of(self)
    }
}

pub(crate) fn face_with(model: &dyn SimplicialModel, i: usize, dim: usize, s: &AbSimplex) -> AbSimplex {
    debug_assert!(i <= dim);
    let (mut prefix, rest) = face_through_dgop(i, &s.dgop);
    match rest {
        None => AbSimplex { dgop: normalize_dgop(prefix), core: s.core.clone() },
        Some(fi) => {
            let core_dim = dim - s.dgop.len();
            let r = model.face_core(fi, core_dim, &s.core);
            prefix.extend_from_slice(&r.dgop);
            AbSimplex { dgop: normalize_dgop(prefix), core: r.core }
        }
    }
}

/// Normalized chain complex of a simplicial set.
pub fn chains_of(x: &SimplicialSet) -> ChainComplex {
    let set = x.clone();
    let diff = move |n: i32, g: &Key| {
        let mut out = Combination::zero(n - 1);
        if n <= 0 {
            return out;
        }
        let dim = n as usize;
        let s = AbSimplex::non_degenerate(g.clone());
        for i in 0..=dim {
            let f = set.face(i, dim, &s);
            if !f.is_degenerate() {
                let k = if i % 2 == 0 { 1 } else { -1 };
                out.add_term(BigInt::from(k), f.core);
            }
        }
        out
    };
    let mut b = ChainComplex::builder(format!("CHAINS {}", x.origin()), diff);
    if x.is_effective() {
        let m = x.model.clone();
        b = b.basis(move |n| if n < 0 { Vec::new() } else { m.basis(n as usize).unwrap_or_default() });
    }
    let m = x.model.clone();
    b = b.sampler(move |rng, n| if n < 0 { None } else { m.sample(rng, n as usize) });
    let m = x.model.clone();
    b = b.member(move |n, k| n >= 0 && m.contains(n as usize, k));
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dgop_normal_form() {
        assert_eq!(normalize_dgop(vec![0, 0]), vec![1, 0]);
        assert_eq!(normalize_dgop(vec![1, 3]), vec![4, 1]);
        assert_eq!(normalize_dgop(vec![2, 1, 0]), vec![2, 1, 0]);
    }

    #[test]
    fn faces_through_degeneracies() {
        // ∂0 η1 η0 x = η0 x
        assert_eq!(face_through_dgop(0, &[1, 0]), (vec![0], None));
        // ∂2 η0 x = η0 ∂1 x
        assert_eq!(face_through_dgop(2, &[0]), (vec![0], Some(1)));
        // ∂0 η1 x = η0 ∂0 x
        assert_eq!(face_through_dgop(0, &[1]), (vec![0], Some(0)));
    }

    #[test]
    fn shuffle_counts_and_signs() {
        let s = shuffles(2, 1);
        assert_eq!(s.len(), 3);
        let total: i32 = s.iter().map(|x| x.2).sum();
        assert_eq!(total, 1);
        assert_eq!(shuffles(0, 2), vec![(vec![], vec![0, 1], 1)]);
    }
}

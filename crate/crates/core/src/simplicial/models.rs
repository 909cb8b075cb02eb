use std::sync::Arc;

use rand::{Rng, RngCore};

use super::{AbSimplex, SimplicialGroup, SimplicialModel, SimplicialSet};
use crate::chain::Key;
use crate::error::{Error, Result};

pub(crate) fn base_point() -> Key {
    Key::atom("*")
}

/// Fully degenerate base point in dimension `dim`.
pub(crate) fn degenerate_point(dim: usize) -> AbSimplex {
    AbSimplex { dgop: (0..dim as u32).rev().collect(), core: base_point() }
}

struct Sphere {
    n: usize,
    top: Key,
}

impl SimplicialModel for Sphere {
    fn origin(&self) -> String {
        format!("SPHERE {}", self.n)
    }

    fn core_dim(&self, core: &Key) -> usize {
        if *core == self.top {
            self.n
        } else {
            0
        }
    }

    fn face_core(&self, _i: usize, dim: usize, _core: &Key) -> AbSimplex {
        degenerate_point(dim - 1)
    }

    fn basis(&self, dim: usize) -> Option<Vec<Key>> {
        Some(if dim == 0 {
            vec![base_point()]
        } else if dim == self.n {
            vec![self.top.clone()]
        } else {
            Vec::new()
        })
    }

    fn sample(&self, _rng: &mut dyn RngCore, dim: usize) -> Option<Key> {
        self.basis(dim).and_then(|b| b.into_iter().next())
    }

    fn contains(&self, dim: usize, core: &Key) -> bool {
        (dim == 0 && *core == base_point()) || (dim == self.n && *core == self.top)
    }
}

/// Standard simplicial sphere: a base point and one non-degenerate `n`-simplex.
pub fn sphere(n: usize) -> Result<SimplicialSet> {
    if n < 1 {
        return Err(Error::InvalidArgument(format!("sphere dimension must be >= 1, got {n}")));
    }
    Ok(SimplicialSet::new(Arc::new(Sphere { n, top: Key::Atom(format!("S{n}")) })))
}

/// Bar model of `K(Z, 1)` (`modulus = None`) or `K(Z/m, 1)`. An `n`-simplex
/// is an `n`-tuple `[a1|…|an]`; zero entries are degeneracies.
#[derive(Clone, Debug)]
pub struct BarGroup {
    modulus: Option<i64>,
    /// Entry range used when sampling `K(Z, 1)` simplices.
    sample_bound: i64,
}

impl BarGroup {
    pub fn integers() -> Self {
        BarGroup { modulus: None, sample_bound: 5 }
    }

    pub fn z2() -> Self {
        BarGroup { modulus: Some(2), sample_bound: 1 }
    }

    fn reduce(&self, a: i64) -> i64 {
        match self.modulus {
            Some(m) => a.rem_euclid(m),
            None => a,
        }
    }

    fn core_word(&self, core: &Key) -> Vec<i64> {
        match core {
            Key::Bar(w) => w.clone(),
            Key::Int(n) => vec![1; *n as usize],
            other => panic!("{other} is not a bar simplex"),
        }
    }

    fn core_key(&self, word: Vec<i64>) -> Key {
        match self.modulus {
            Some(2) => Key::Int(word.len() as i64),
            _ => Key::Bar(word),
        }
    }

    /// Full word of an abstract simplex, degeneracies inserted as zeros.
    pub fn expand(&self, s: &AbSimplex) -> Vec<i64> {
        let mut w = self.core_word(&s.core);
        for &j in s.dgop.iter().rev() {
            w.insert(j as usize, 0);
        }
        w
    }

    /// Abstract simplex of a word: zero positions become degeneracies.
    pub fn normalize(&self, word: &[i64]) -> AbSimplex {
        let word: Vec<i64> = word.iter().map(|&a| self.reduce(a)).collect();
        let dgop: Vec<u32> = (0..word.len()).rev().filter(|&i| word[i] == 0).map(|i| i as u32).collect();
        let core: Vec<i64> = word.into_iter().filter(|&a| a != 0).collect();
        AbSimplex { dgop, core: self.core_key(core) }
    }

    pub fn word_face(&self, i: usize, word: &[i64]) -> Vec<i64> {
        let n = word.len();
        if i == 0 {
            word[1..].to_vec()
        } else if i == n {
            word[..n - 1].to_vec()
        } else {
            let mut w = word.to_vec();
            let merged = w[i - 1] + w[i];
            w[i - 1] = merged;
            w.remove(i);
            w
        }
    }
}

impl SimplicialModel for BarGroup {
    fn kind(&self) -> &'static str {
        "Abelian-Simplicial-Group"
    }

    fn origin(&self) -> String {
        match self.modulus {
            None => "K-Z 1".to_string(),
            Some(m) => format!("K-Z{m} 1"),
        }
    }

    fn core_dim(&self, core: &Key) -> usize {
        self.core_word(core).len()
    }

    fn face_core(&self, i: usize, _dim: usize, core: &Key) -> AbSimplex {
        self.normalize(&self.word_face(i, &self.core_word(core)))
    }

    fn basis(&self, dim: usize) -> Option<Vec<Key>> {
        match self.modulus {
            Some(2) => Some(vec![Key::Int(dim as i64)]),
            _ => None,
        }
    }

    fn sample(&self, rng: &mut dyn RngCore, dim: usize) -> Option<Key> {
        match self.modulus {
            Some(2) => Some(Key::Int(dim as i64)),
            _ => {
                let b = self.sample_bound;
                let word = (0..dim)
                    .map(|_| loop {
                        let a = rng.gen_range(-b..=b);
                        if a != 0 {
                            break a;
                        }
                    })
                    .collect();
                Some(Key::Bar(word))
            }
        }
    }

    fn contains(&self, dim: usize, core: &Key) -> bool {
        match (self.modulus, core) {
            (Some(2), Key::Int(n)) => *n as usize == dim,
            (None, Key::Bar(w)) => w.len() == dim && w.iter().all(|&a| a != 0),
            _ => false,
        }
    }
}

impl SimplicialGroup for BarGroup {
    fn mul(&self, _dim: usize, a: &AbSimplex, b: &AbSimplex) -> AbSimplex {
        let (x, y) = (self.expand(a), self.expand(b));
        debug_assert_eq!(x.len(), y.len());
        let w: Vec<i64> = x.iter().zip(&y).map(|(p, q)| p + q).collect();
        self.normalize(&w)
    }

    fn unit(&self, dim: usize) -> AbSimplex {
        self.normalize(&vec![0; dim])
    }
}

/// `K(Z, 1)`, locally effective.
pub fn k_z_1() -> (SimplicialSet, Arc<BarGroup>) {
    let g = Arc::new(BarGroup::integers());
    (SimplicialSet::new(g.clone()), g)
}

/// `K(Z/2, 1)`, one non-degenerate simplex per dimension.
pub fn k_z2_1() -> (SimplicialSet, Arc<BarGroup>) {
    let g = Arc::new(BarGroup::z2());
    (SimplicialSet::new(g.clone()), g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn bar(w: &[i64]) -> AbSimplex {
        AbSimplex::non_degenerate(Key::Bar(w.to_vec()))
    }

    #[test]
    fn kz1_faces_of_3_5_m5() {
        let (kz1, _) = k_z_1();
        let s = bar(&[3, 5, -5]);
        let faces: Vec<String> = (0..4).map(|i| kz1.face(i, 3, &s).to_string()).collect();
        assert_eq!(faces, ["<AbSm - (5 -5)>", "<AbSm - (8 -5)>", "<AbSm 1 (3)>", "<AbSm - (3 5)>"]);
    }

    #[test]
    fn kz1_is_locally_effective() {
        let (kz1, _) = k_z_1();
        let err = kz1.basis(3).unwrap_err();
        assert!(err.to_string().contains("locally-effective"));
        assert!(kz1.chains().basis(3).is_err());
    }

    #[test]
    fn kz1_degenerate_merge_and_product() {
        let (kz1, g) = k_z_1();
        let f = kz1.face(1, 2, &bar(&[1, -1]));
        assert_eq!(f, AbSimplex { dgop: vec![0], core: Key::Bar(vec![]) });
        assert_eq!(g.mul(1, &bar(&[2]), &bar(&[3])), bar(&[5]));
        assert_eq!(g.unit(2).dgop, vec![1, 0]);
    }

    #[test]
    fn kz2_structure() {
        let (kz2, _) = k_z2_1();
        for n in 0..4 {
            assert_eq!(kz2.basis(n).unwrap().len(), 1);
        }
        let two = AbSimplex::non_degenerate(Key::Int(2));
        assert_eq!(kz2.face(1, 2, &two), AbSimplex { dgop: vec![0], core: Key::Int(0) });
        assert_eq!(kz2.face(0, 2, &two), AbSimplex::non_degenerate(Key::Int(1)));
        assert_eq!(kz2.face(2, 2, &two), AbSimplex::non_degenerate(Key::Int(1)));
        let c = kz2.chains();
        assert_eq!(c.differential(2, &Key::Int(2)).coefficient(&Key::Int(1)), BigInt::from(2));
    }

    #[test]
    fn sphere_structure() {
        assert!(sphere(0).is_err());
        let s2 = sphere(2).unwrap();
        let sizes: Vec<usize> = (0..3).map(|n| s2.basis(n).unwrap().len()).collect();
        assert_eq!(sizes, [1, 0, 1]);
        let top = AbSimplex::non_degenerate(Key::atom("S2"));
        for i in 0..3 {
            assert_eq!(s2.face(i, 2, &top), degenerate_point(1));
        }
        assert!(s2.chains().differential(2, &Key::atom("S2")).is_zero());
        let s1 = sphere(1).unwrap();
        let d = s1.chains().differential(1, &Key::atom("S1"));
        assert!(d.is_zero());
        assert_eq!(d.degree(), 0);
    }
}

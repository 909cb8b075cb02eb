//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use spectra::lattice::{kernel_basis, subquotient};
use spectra::{ChainComplex, Combination, Component, FilteredComplex, FiltrationFn, IntMatrix};

/// Laplace expansion.
pub fn det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (0..n)
        .flat_map(|last| {
            subsets(last, k - 1).into_iter().map(move |mut s| {
                s.push(last);
                s
            })
        })
        .collect()
}

/// `d_k / d_{k-1}` where `d_k` is the gcd of all `k × k` minors.
pub fn determinant_divisors(m: &[Vec<i64>], rows: usize, cols: usize) -> Vec<i64> {
    let mut out = Vec::new();
    let mut prev = 1;
    for k in 1..=rows.min(cols) {
        let mut g = 0i64;
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let minor: Vec<Vec<i64>> = rs.iter().map(|&i| cs.iter().map(|&j| m[i][j]).collect()).collect();
                g = g.gcd(&det(&minor));
            }
        }
        if g == 0 {
            out.extend(std::iter::repeat_n(0, rows.min(cols) - out.len()));
            break;
        }
        out.push(g / prev);
        prev = g;
    }
    out
}

/// `Z^k / L` enumerated inside `(Z/N)^k`, where `N·Z^k ⊆ L`.
pub struct Cosets {
    k: usize,
    n: i64,
    sub: HashSet<Vec<i64>>,
}

impl Cosets {
    pub fn new(k: usize, n: i64, gens: &[Vec<i64>]) -> Self {
        let mut sub = HashSet::from([vec![0; k]]);
        let mut frontier = vec![vec![0; k]];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y: Vec<i64> = x.iter().zip(g).map(|(a, b)| (a + b).rem_euclid(n)).collect();
                if sub.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        Cosets { k, n, sub }
    }

    pub fn order(&self) -> i64 {
        self.n.pow(self.k as u32) / self.sub.len() as i64
    }

    /// Number of cosets `g` with `e·g = 0`.
    pub fn killed_by(&self, e: i64) -> i64 {
        let total = self.n.pow(self.k as u32);
        let mut count = 0;
        for idx in 0..total {
            let mut t = idx;
            let ex: Vec<i64> = (0..self.k)
                .map(|_| {
                    let a = t % self.n;
                    t /= self.n;
                    (a * e).rem_euclid(self.n)
                })
                .collect();
            if self.sub.contains(&ex) {
                count += 1;
            }
        }
        count / self.sub.len() as i64
    }
}

/// `#{g : e·g = 0}` for a finite group given by its components.
pub fn killed_by(components: &[Component], e: i64) -> i64 {
    components
        .iter()
        .map(|c| match c {
            Component::Torsion(m) => i64::try_from(m).unwrap().gcd(&e),
            Component::Free => panic!("not a finite group"),
        })
        .product()
}

pub fn order(components: &[Component]) -> i64 {
    components
        .iter()
        .map(|c| match c {
            Component::Torsion(m) => i64::try_from(m).unwrap(),
            Component::Free => 0,
        })
        .product()
}

pub fn unit(len: usize, i: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); len];
    v[i] = BigInt::one();
    v
}

/// Divisors of the live generators of `E^r_{p,q}`.
pub fn live_divisors(fc: &FilteredComplex, r: i32, p: i32, q: i32) -> Vec<BigInt> {
    let g = fc.page_group(r, p, q).unwrap();
    g.presentation.live_generators().into_iter().map(|i| g.divisors()[i].clone()).collect()
}

/// Matrix of `d^r_{p,q}` on live coordinates (one column per source generator).
pub fn page_matrix(fc: &FilteredComplex, r: i32, p: i32, q: i32) -> (usize, Vec<Vec<BigInt>>) {
    let src = live_divisors(fc, r, p, q).len();
    let tgt = live_divisors(fc, r, p - r, q + r - 1).len();
    let cols = (0..src).map(|i| fc.page_differential(r, p, q, &unit(src, i)).unwrap()).collect();
    (tgt, cols)
}

/// Relations `d_i e_i` of `⊕ Z/d_i` (free summands contribute none).
fn relations(divisors: &[BigInt]) -> Vec<Vec<BigInt>> {
    let k = divisors.len();
    (0..k)
        .filter(|&i| !divisors[i].is_zero())
        .map(|i| unit(k, i).into_iter().map(|x| x * &divisors[i]).collect())
        .collect()
}

/// `ker(d_out) / im(d_in)` inside `⊕ Z/d_i`, computed on lifts to `Z^k`.
pub fn page_homology(fc: &FilteredComplex, r: i32, p: i32, q: i32) -> Vec<Component> {
    let divisors = live_divisors(fc, r, p, q);
    let k = divisors.len();
    let rel = relations(&divisors);

    let (tgt, mut cols) = page_matrix(fc, r, p, q);
    cols.extend(relations(&live_divisors(fc, r, p - r, q + r - 1)));
    // x with d_out(x) among the target relations: kernel of [A | R'], first k rows.
    let kernel: Vec<Vec<BigInt>> = if k == 0 {
        Vec::new()
    } else if tgt == 0 {
        (0..k).map(|i| unit(k, i)).collect()
    } else {
        kernel_basis(&IntMatrix::from_columns(tgt, &cols)).into_iter().map(|v| v[..k].to_vec()).collect()
    };

    let (_, mut image) = page_matrix(fc, r, p + r, q - r + 1);
    image.extend(rel);
    subquotient(k, &kernel, &image).unwrap().invariant_factors()
}

/// The graded piece `F_p / F_{p-1}` as a complex of its own.
pub fn graded_piece(c: &ChainComplex, flin: FiltrationFn, p: i32) -> ChainComplex {
    let (c1, f1, f2) = (c.clone(), flin.clone(), flin);
    let src = c.clone();
    ChainComplex::builder(format!("gr_{p}"), move |n, g| {
        let mut out = Combination::zero(n - 1);
        for (k, x) in c1.differential(n, g).terms() {
            if f1(n - 1, k) == p {
                out.add_term(x.clone(), k.clone());
            }
        }
        out
    })
    .basis(move |n| src.basis(n).unwrap().into_iter().filter(|g| f2(n, g) == p).collect())
    .build()
}

use num_bigint::BigInt;

use super::{cartesian_product, shuffles, AbSimplex, SimplicialSet};
use crate::chain::{tensor_complex, Combination, Key, Morphism};
use crate::effective::Reduction;

/// Applies degeneracies (outermost first) on top of a simplex.
fn degenerate(ops: &[u32], s: &AbSimplex) -> AbSimplex {
    let mut all = ops.to_vec();
    all.extend_from_slice(&s.dgop);
    AbSimplex::new(all, s.core.clone())
}

fn face_times(x: &SimplicialSet, i: usize, times: usize, dim: usize, s: &AbSimplex) -> AbSimplex {
    let mut cur = s.clone();
    for k in 0..times {
        cur = x.face(i, dim - k, &cur);
    }
    cur
}

/// Eilenberg-Zilber reduction `C(X × Y) ⇒ C(X) ⊗ C(Y)`: Alexander-Whitney,
/// Eilenberg-Mac Lane shuffle and the Shih homotopy.
pub fn ez_reduction(x: &SimplicialSet, y: &SimplicialSet) -> Reduction {
    let product = cartesian_product(x, y);
    let top = product.chains();
    let bottom = tensor_complex(&x.chains(), &y.chains());

    let (xa, ya) = (x.clone(), y.clone());
    let f = Morphism::new(&top, &bottom, 0, move |n, g| {
        let (a, b) = g.as_crpr().expect("product generator");
        let dim = n as usize;
        let mut out = Combination::zero(n);
        for i in 0..=dim {
            let fa = xa.front(dim, dim - i, a);
            if fa.is_degenerate() {
                continue;
            }
            let bb = ya.back(dim, i, b);
            if bb.is_degenerate() {
                continue;
            }
            out.add_term(BigInt::from(1), Key::tensor(i as i32, fa.core, bb.core));
        }
        out
    });

    let g = Morphism::new(&bottom, &top, 0, move |n, g| {
        let t = g.as_tensor().expect("tensor generator");
        let p = t.left_degree as usize;
        let q = n as usize - p;
        let mut out = Combination::zero(n);
        for (mu, nu, sign) in shuffles(p, q) {
            let mut dx = nu.clone();
            dx.reverse();
            let mut dy = mu.clone();
            dy.reverse();
            let a = AbSimplex { dgop: dx, core: t.left.clone() };
            let b = AbSimplex { dgop: dy, core: t.right.clone() };
            out.add_term(BigInt::from(sign), Key::crpr(a, b));
        }
        out
    });

    let (xh, yh) = (x.clone(), y.clone());
    let h = Morphism::new(&top, &top, 1, move |n, g| {
        let (a, b) = g.as_crpr().expect("product generator");
        let dim = n as usize;
        let mut out = Combination::zero(n + 1);
        for q in 0..dim {
            for p in 0..(dim - q) {
                let m = dim - p - q;
                let fa = xh.front(dim, q, a);
                let bf = face_times(&yh, m, p, dim, b);
                for (alpha, beta, sign) in shuffles(p + 1, q) {
                    let mut ops_a: Vec<u32> = beta.iter().rev().map(|&j| j + m as u32).collect();
                    ops_a.push(m as u32 - 1);
                    let ops_b: Vec<u32> = alpha.iter().rev().map(|&j| j + m as u32).collect();
                    let na = degenerate(&ops_a, &fa);
                    let nb = degenerate(&ops_b, &bf);
                    if na.dgop.iter().any(|j| nb.dgop.contains(j)) {
                        continue;
                    }
                    let s = if m.is_multiple_of(2) { sign } else { -sign };
                    out.add_term(BigInt::from(s), Key::crpr(na, nb));
                }
            }
        }
        out
    });

    Reduction::new(&top, &bottom, f, g, h)
}

#[cfg(test)]
mod tests {
    use super::super::{k_z2_1, k_z_1, sphere};
    use super::*;
    use crate::effective::{validate_reduction, SampleSpec};

    #[test]
    fn ez_on_sphere_times_kz2_is_a_reduction() {
        let (kz2, _) = k_z2_1();
        let r = ez_reduction(&sphere(2).unwrap(), &kz2);
        let report = validate_reduction(&r, &SampleSpec::new(5, 0, 1));
        assert!(report.is_valid(), "{report}");
    }

    #[test]
    fn ez_on_two_bar_groups_sampled() {
        let (kz1, _) = k_z_1();
        let (kz2, _) = k_z2_1();
        let r = ez_reduction(&kz2, &kz1);
        let report = validate_reduction(&r, &SampleSpec::new(4, 60, 3));
        assert!(report.is_valid(), "{report}");
    }
}

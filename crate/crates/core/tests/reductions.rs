//! Reduction identities, `d∘d = 0` and homotopy orders for every reduction
//! the scenarios are built from.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spectra::chain::{check_dd, tensor_complex};
use spectra::effective::{validate_reduction, ReductionReport};
use spectra::scenario::{build_scenario, twisted_circle_bundle_equivalence};
use spectra::simplicial::{
    cartesian_product, circle_reduction, ez_reduction, fibration_total, k_z2_1, k_z_1, sphere, AbSimplex, Twisting,
};
use spectra::{ChainComplex, Key, SampleSpec};

fn assert_valid(report: &ReductionReport, min_top: usize) {
    assert!(report.is_valid(), "{report}");
    assert!(report.checked_top >= min_top, "{report}");
}

fn assert_dd(c: &ChainComplex, max_degree: i32, samples: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 0..=max_degree {
        let gens = c.check_generators(n, samples, &mut rng);
        assert!(!gens.is_empty() || n > 0, "no generators in degree {n}");
        assert_eq!(check_dd(c, n, &gens), None, "degree {n} of {c:?}");
    }
}

#[test]
fn ez_exhaustive_on_sphere_times_kz2() {
    let (kz2, _) = k_z2_1();
    let r = ez_reduction(&sphere(2).unwrap(), &kz2);
    assert_valid(&validate_reduction(&r, &SampleSpec::new(6, 0, 0)), 100);
}

#[test]
fn ez_sampled_on_sphere_times_kz1() {
    let (kz1, _) = k_z_1();
    let r = ez_reduction(&sphere(2).unwrap(), &kz1);
    assert_valid(&validate_reduction(&r, &SampleSpec::new(5, 200, 1)), 200);
}

#[test]
fn circle_reduction_sampled() {
    let (kz1, _) = k_z_1();
    let r = circle_reduction(&kz1);
    assert_valid(&validate_reduction(&r, &SampleSpec::new(5, 200, 2)), 200);
}

#[test]
fn hopf_composite_reduction() {
    let (_, e) = twisted_circle_bundle_equivalence(1).unwrap();
    assert!(e.left.is_identity());
    assert_valid(&validate_reduction(&e.right, &SampleSpec::new(5, 200, 3)), 200);
}

#[test]
fn p3r_composite_reduction() {
    let (_, e) = twisted_circle_bundle_equivalence(2).unwrap();
    assert_valid(&validate_reduction(&e.right, &SampleSpec::new(5, 200, 4)), 200);
}

#[test]
fn differentials_square_to_zero() {
    let s2 = sphere(2).unwrap();
    let (kz1, group) = k_z_1();
    let (kz2, group2) = k_z2_1();
    assert_dd(&kz1.chains(), 6, 200);
    assert_dd(&kz2.chains(), 6, 0);
    assert_dd(&cartesian_product(&s2, &kz1).chains(), 5, 200);
    let tau = Twisting::new(group, kz1.clone(), |_| AbSimplex::non_degenerate(Key::Bar(vec![3])));
    assert_dd(&fibration_total(&s2, &tau).chains(), 5, 200);
    let tau2 = Twisting::new(group2, kz2.clone(), |_| AbSimplex::non_degenerate(Key::Int(1)));
    assert_dd(&fibration_total(&s2, &tau2).chains(), 6, 0);
    assert_dd(&tensor_complex(&s2.chains(), &kz2.chains()), 6, 0);
    let (_, e) = twisted_circle_bundle_equivalence(1).unwrap();
    assert_dd(e.rbcc(), 6, 0);
}

#[test]
fn measured_homotopy_order_is_zero() {
    for name in ["hopf", "p3r"] {
        let fc = build_scenario(name).unwrap();
        let order = fc.effective_homology().unwrap().check(&SampleSpec::new(4, 60, 5)).unwrap();
        assert_eq!((order.measured, order.declared), (0, 0), "{name}");
    }
}

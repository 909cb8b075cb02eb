//! The built-in filtered complexes: the Hopf fibration, the real projective
//! space `P³ℝ`, and the twisted product `S² ×_τ K(Z/2, 1)`.

use crate::chain::{ChainComplex, Key, Morphism};
use crate::effective::{
    bpl_perturb, compose_reductions, tensor_reductions, Equivalence, FilteredEquivalence, Reduction, SampleSpec,
};
use crate::error::{Error, Result};
use crate::simplicial::{
    circle_reduction, ez_reduction, fibration_total, k_z2_1, k_z_1, serre_filtration_tensor, serre_filtration_total,
    sphere, AbSimplex, Twisting,
};
use crate::spectral::{make_filtered, FilteredComplex};

pub struct ScenarioDescriptor {
    pub name: &'static str,
    pub description: &'static str,
    /// True when the filtered complex is effective and needs no equivalence.
    pub effective: bool,
    pub build: fn() -> Result<FilteredComplex>,
}

pub fn registry() -> &'static [ScenarioDescriptor] {
    &[
        ScenarioDescriptor {
            name: "hopf",
            description: "S2 x_t K(Z,1) with t(s2) = [1], a model of S3 (Hopf fibration)",
            effective: false,
            build: hopf,
        },
        ScenarioDescriptor {
            name: "p3r",
            description: "S2 x_t K(Z,1) with t(s2) = [2], a model of the real projective space P3",
            effective: false,
            build: p3r,
        },
        ScenarioDescriptor {
            name: "s2-kz2",
            description: "S2 x_t K(Z/2,1) with t(s2) = 1, effective",
            effective: true,
            build: s2_kz2,
        },
    ]
}

pub fn find_scenario(name: &str) -> Result<&'static ScenarioDescriptor> {
    registry().iter().find(|s| s.name == name).ok_or_else(|| Error::UnknownScenario(name.to_string()))
}

pub fn build_scenario(name: &str) -> Result<FilteredComplex> {
    (find_scenario(name)?.build)()
}

fn hopf() -> Result<FilteredComplex> {
    twisted_circle_bundle("hopf", 1)
}

fn p3r() -> Result<FilteredComplex> {
    twisted_circle_bundle("p3r", 2)
}

/// `d_b - d_a` as a perturbation of `a` (same generators).
fn difference(a: &ChainComplex, b: &ChainComplex) -> Morphism {
    let (a1, b1) = (a.clone(), b.clone());
    Morphism::new(a, a, -1, move |n, g| b1.differential(n, g).sub(&a1.differential(n, g)))
}

/// Effective homology of the Serre-filtered `S² ×_τ K(Z,1)`, `τ(s2) = [k]`:
/// the Eilenberg-Zilber reduction perturbed by the twist, followed by the
/// circle reduction of the fibre perturbed by the induced tensor twist.
pub fn twisted_circle_bundle_equivalence(k: i64) -> Result<(ChainComplex, Equivalence)> {
    let spec = SampleSpec::new(4, 30, 0x5eed);
    let s2 = sphere(2)?;
    let (kz1, group) = k_z_1();
    let tau = Twisting::new(group, kz1.clone(), move |_| AbSimplex::non_degenerate(Key::Bar(vec![k])));
    let total = fibration_total(&s2, &tau).chains();

    let ez = ez_reduction(&s2, &kz1);
    let twist = difference(&ez.top, &total);
    let twisted_ez = bpl_perturb(&ez, &twist, &spec)?.with_top(&total, &spec)?;

    let fibre = tensor_reductions(&Reduction::identity(&s2.chains()), &circle_reduction(&kz1));
    let tensor_twist = difference(&fibre.top, &twisted_ez.bottom);
    let twisted_fibre = bpl_perturb(&fibre, &tensor_twist, &spec)?.with_top(&twisted_ez.bottom, &spec)?;

    let right = compose_reductions(&twisted_ez, &twisted_fibre)?;
    Ok((total, Equivalence::from_reduction(right)))
}

fn twisted_circle_bundle(name: &str, k: i64) -> Result<FilteredComplex> {
    let (total, equivalence) = twisted_circle_bundle_equivalence(k)?;
    let filtered = FilteredEquivalence {
        equivalence,
        top_flin: serre_filtration_total(),
        left_flin: serre_filtration_total(),
        right_flin: serre_filtration_tensor(),
        declared_order: 0,
    };
    make_filtered(&total, serre_filtration_total(), name)?.with_bounds(serre_bounds).with_effective_homology(filtered)
}

/// Base dimensions of `S²` are 0 and 2.
fn serre_bounds(n: i32) -> Option<(i32, i32)> {
    match n {
        n if n < 0 => None,
        0 | 1 => Some((0, 0)),
        _ => Some((0, 2)),
    }
}

fn s2_kz2() -> Result<FilteredComplex> {
    let s2 = sphere(2)?;
    let (kz2, group) = k_z2_1();
    let tau = Twisting::new(group, kz2, |_| AbSimplex::non_degenerate(Key::Int(1)));
    let total = fibration_total(&s2, &tau).chains();
    make_filtered(&total, serre_filtration_total(), "s2-kz2")
}

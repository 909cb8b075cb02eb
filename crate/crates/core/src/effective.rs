//! Reductions, strong chain equivalences and the perturbation lemmas that
//! build effective homology for locally effective complexes.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chain::{
    add_perturbation, homology, tensor_complex, tensor_morphism, ChainComplex, Combination, FiltrationFn, Key, Morphism,
};
use crate::error::{Error, Result};
use crate::lattice::GroupPresentation;

/// Iteration cap of the perturbation series, per generator.
pub const SERIES_CAP: usize = 64;

/// `(f, g, h)` from a big complex `top` onto a small complex `bottom` with
/// `fg = id`, `gf + dh + hd = id`, `fh = 0`, `hg = 0`, `hh = 0`.
#[derive(Clone)]
pub struct Reduction {
    pub top: ChainComplex,
    pub bottom: ChainComplex,
    pub f: Morphism,
    pub g: Morphism,
    pub h: Morphism,
    identity: bool,
}

impl fmt::Debug for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[Reduction {:?} => {:?}]", self.top, self.bottom)
    }
}

impl Reduction {
    pub fn new(top: &ChainComplex, bottom: &ChainComplex, f: Morphism, g: Morphism, h: Morphism) -> Self {
        Reduction { top: top.clone(), bottom: bottom.clone(), f, g, h, identity: false }
    }

    /// `f = g = id`, `h = 0`.
    pub fn identity(c: &ChainComplex) -> Self {
        Reduction {
            top: c.clone(),
            bottom: c.clone(),
            f: Morphism::identity(c),
            g: Morphism::identity(c),
            h: Morphism::zero(c, c, 1),
            identity: true,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    /// Same maps over a different top complex with the same generators and
    /// differential (checked on sampled generators).
    pub fn with_top(&self, top: &ChainComplex, spec: &SampleSpec) -> Result<Reduction> {
        let mut rng = spec.rng();
        for n in spec.degrees() {
            for g in self.top.check_generators(n, spec.samples, &mut rng) {
                if self.top.differential(n, &g) != top.differential(n, &g) {
                    return Err(Error::MiddleMismatch(format!("{:?}", self.top), format!("{top:?}")));
                }
            }
        }
        Ok(Reduction {
            top: top.clone(),
            bottom: self.bottom.clone(),
            f: self.f.retarget(top, &self.bottom),
            g: self.g.retarget(&self.bottom, top),
            h: self.h.retarget(top, top),
            identity: self.identity,
        })
    }
}

/// Which generators the identity checks are evaluated on.
#[derive(Clone, Debug)]
pub struct SampleSpec {
    pub max_degree: i32,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec { max_degree: 6, samples: 200, seed: 0x5eed }
    }
}

impl SampleSpec {
    pub fn new(max_degree: i32, samples: usize, seed: u64) -> Self {
        SampleSpec { max_degree, samples, seed }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        0..=self.max_degree
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Identity {
    FG,
    Homotopy,
    FH,
    HG,
    HH,
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Identity::FG => "f∘g = id",
            Identity::Homotopy => "g∘f + d∘h + h∘d = id",
            Identity::FH => "f∘h = 0",
            Identity::HG => "h∘g = 0",
            Identity::HH => "h∘h = 0",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct Violation {
    pub identity: Identity,
    pub degree: i32,
    pub generator: Key,
    /// Value of `lhs - rhs` on the generator.
    pub defect: Combination,
}

#[derive(Clone, Debug, Default)]
pub struct ReductionReport {
    pub checked_top: usize,
    pub checked_bottom: usize,
    pub violations: Vec<Violation>,
}

impl ReductionReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ReductionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "checked {} top and {} bottom generators: {}",
            self.checked_top,
            self.checked_bottom,
            if self.is_valid() { "valid" } else { "INVALID" }
        )?;
        for v in &self.violations {
            writeln!(f, "  {} fails in degree {} on {}", v.identity, v.degree, v.generator)?;
        }
        Ok(())
    }
}

/// Evaluates the five reduction identities, exhaustively on effective
/// complexes and on `spec.samples` random generators otherwise.
pub fn validate_reduction(r: &Reduction, spec: &SampleSpec) -> ReductionReport {
    let mut rng = spec.rng();
    let mut report = ReductionReport::default();
    for n in spec.degrees() {
        for y in r.bottom.check_generators(n, spec.samples, &mut rng) {
            report.checked_bottom += 1;
            let gy = r.g.on(n, &y);
            let fg = r.f.apply(&gy).sub(&Combination::generator(n, y.clone()));
            if !fg.is_zero() {
                report.violations.push(Violation {
                    identity: Identity::FG,
                    degree: n,
                    generator: y.clone(),
                    defect: fg,
                });
            }
            let hg = r.h.apply(&gy);
            if !hg.is_zero() {
                report.violations.push(Violation { identity: Identity::HG, degree: n, generator: y, defect: hg });
            }
        }
        for x in r.top.check_generators(n, spec.samples, &mut rng) {
            report.checked_top += 1;
            let hx = r.h.on(n, &x);
            let mut lhs = r.g.apply(&r.f.on(n, &x));
            lhs.add_scaled(&BigInt::one(), &r.top.d(&hx));
            lhs.add_scaled(&BigInt::one(), &r.h.apply(&r.top.differential(n, &x)));
            let htpy = lhs.sub(&Combination::generator(n, x.clone()));
            if !htpy.is_zero() {
                report.violations.push(Violation {
                    identity: Identity::Homotopy,
                    degree: n,
                    generator: x.clone(),
                    defect: htpy,
                });
            }
            let fh = r.f.apply(&hx);
            if !fh.is_zero() {
                report.violations.push(Violation {
                    identity: Identity::FH,
                    degree: n,
                    generator: x.clone(),
                    defect: fh,
                });
            }
            let hh = r.h.apply(&hx);
            if !hh.is_zero() {
                report.violations.push(Violation { identity: Identity::HH, degree: n, generator: x, defect: hh });
            }
        }
    }
    report
}

/// `Σ_i (-1)^i (h δ)^i c`, or an error when the series has not terminated
/// after [`SERIES_CAP`] terms.
pub fn perturbation_series(h: &Morphism, delta: &Morphism, c: &Combination) -> Result<Combination> {
    let mut sum = c.clone();
    let mut term = c.clone();
    for _ in 0..SERIES_CAP {
        term = h.apply(&delta.apply(&term)).neg();
        if term.is_zero() {
            return Ok(sum);
        }
        sum.add_scaled(&BigInt::one(), &term);
    }
    Err(Error::NotNilpotent(SERIES_CAP))
}

fn series_map(
    source: &ChainComplex,
    target: &ChainComplex,
    degree: i32,
    inner: Morphism,
    h: &Morphism,
    delta: &Morphism,
) -> Morphism {
    let (h, delta) = (h.clone(), delta.clone());
    Morphism::new(source, target, degree, move |n, g| {
        perturbation_series(&h, &delta, &inner.on(n, g)).unwrap_or_else(|e| panic!("{e} at {g}"))
    })
}

/// Basic perturbation lemma: perturbs the top differential by `delta` and
/// returns the induced reduction onto a bottom complex with differential
/// `d + f δ φ g`, where `φ = Σ (-1)^i (hδ)^i`.
pub fn bpl_perturb(r: &Reduction, delta: &Morphism, spec: &SampleSpec) -> Result<Reduction> {
    let mut rng = spec.rng();
    for n in spec.degrees() {
        for x in r.top.check_generators(n, spec.samples.min(50), &mut rng) {
            let c = Combination::generator(n, x);
            perturbation_series(&r.h, delta, &c)?;
        }
    }
    let top = add_perturbation(&r.top, &delta.retarget(&r.top, &r.top));
    let phi_g = series_map(&r.bottom, &top, 0, r.g.clone(), &r.h, delta);
    let phi_h = series_map(&top, &top, 1, r.h.clone(), &r.h, delta);
    let delta_bottom = r.f.compose(delta).compose(&phi_g);
    let bottom = add_perturbation(&r.bottom, &delta_bottom.retarget(&r.bottom, &r.bottom));
    let f = {
        let (f, dl, ph) = (r.f.clone(), delta.clone(), phi_h.clone());
        Morphism::new(&top, &bottom, 0, move |n, g| {
            let mut out = f.on(n, g);
            out.add_scaled(&-BigInt::one(), &f.apply(&dl.apply(&ph.on(n, g))));
            out
        })
    };
    Ok(Reduction { g: phi_g.retarget(&bottom, &top), h: phi_h, f, top, bottom, identity: false })
}

/// Easy perturbation lemma: a bottom perturbation `δ̂` becomes `g δ̂ f` on top;
/// `f`, `g`, `h` are unchanged.
pub fn epl_perturb(r: &Reduction, delta: &Morphism) -> Reduction {
    let top_delta = r.g.compose(delta).compose(&r.f);
    let top = add_perturbation(&r.top, &top_delta.retarget(&r.top, &r.top));
    let bottom = add_perturbation(&r.bottom, &delta.retarget(&r.bottom, &r.bottom));
    Reduction {
        f: r.f.retarget(&top, &bottom),
        g: r.g.retarget(&bottom, &top),
        h: r.h.retarget(&top, &top),
        top,
        bottom,
        identity: false,
    }
}

/// `ρ₁ ⊗ ρ₂` with `h = h₁⊗id + g₁f₁⊗h₂`.
pub fn tensor_reductions(r1: &Reduction, r2: &Reduction) -> Reduction {
    let top = tensor_complex(&r1.top, &r2.top);
    let bottom = tensor_complex(&r1.bottom, &r2.bottom);
    let f = tensor_morphism(&r1.f, &r2.f, &top, &bottom);
    let g = tensor_morphism(&r1.g, &r2.g, &bottom, &top);
    let id2 = Morphism::identity(&r2.top);
    let gf1 = r1.g.compose(&r1.f);
    let h = tensor_morphism(&r1.h, &id2, &top, &top).add(&tensor_morphism(&gf1, &r2.h, &top, &top));
    Reduction { top, bottom, f, g, h, identity: r1.identity && r2.identity }
}

/// `ρ₂ ∘ ρ₁`: `f = f₂f₁`, `g = g₁g₂`, `h = h₁ + g₁h₂f₁`.
pub fn compose_reductions(r1: &Reduction, r2: &Reduction) -> Result<Reduction> {
    if !r1.bottom.same(&r2.top) {
        return Err(Error::MiddleMismatch(format!("{:?}", r1.bottom), format!("{:?}", r2.top)));
    }
    if r2.identity {
        return Ok(r1.clone());
    }
    if r1.identity {
        return Ok(r2.clone());
    }
    let f = r2.f.compose(&r1.f);
    let g = r1.g.compose(&r2.g);
    let h = r1.h.add(&r1.g.compose(&r2.h).compose(&r1.f));
    Ok(Reduction { top: r1.top.clone(), bottom: r2.bottom.clone(), f, g, h, identity: false })
}

/// Two reductions sharing their top complex: `left: D ⇒ C`, `right: D ⇒ E`.
#[derive(Clone, Debug)]
pub struct Equivalence {
    pub left: Reduction,
    pub right: Reduction,
}

impl Equivalence {
    pub fn new(left: Reduction, right: Reduction) -> Result<Self> {
        if !left.top.same(&right.top) {
            return Err(Error::MiddleMismatch(format!("{:?}", left.top), format!("{:?}", right.top)));
        }
        Ok(Equivalence { left, right })
    }

    /// `C ⇐ C ⇒ E` from a single reduction on `C`.
    pub fn from_reduction(r: Reduction) -> Self {
        Equivalence { left: Reduction::identity(&r.top), right: r }
    }

    pub fn identity(c: &ChainComplex) -> Self {
        Equivalence { left: Reduction::identity(c), right: Reduction::identity(c) }
    }

    /// Left bottom complex.
    pub fn lbcc(&self) -> &ChainComplex {
        &self.left.bottom
    }

    /// Right bottom complex.
    pub fn rbcc(&self) -> &ChainComplex {
        &self.right.bottom
    }

    /// Carries a combination of the right bottom complex to the left one.
    pub fn to_left(&self, c: &Combination) -> Combination {
        self.left.f.apply(&self.right.g.apply(c))
    }

    /// Carries a combination of the left bottom complex to the right one.
    pub fn to_right(&self, c: &Combination) -> Combination {
        self.right.f.apply(&self.left.g.apply(c))
    }
}

/// Composes `X ⇔ Y` with `Y ⇔ Z`. The general case needs a pullback top
/// complex; supported here when one of the two inner reductions is an
/// identity, which covers every pipeline in this crate.
pub fn compose_equivalences(e1: &Equivalence, e2: &Equivalence) -> Result<Equivalence> {
    if !e1.rbcc().same(e2.lbcc()) {
        return Err(Error::MiddleMismatch(format!("{:?}", e1.rbcc()), format!("{:?}", e2.lbcc())));
    }
    if e2.left.identity {
        let right = compose_reductions(&e1.right, &e2.right)?;
        return Equivalence::new(e1.left.clone(), right);
    }
    if e1.right.identity {
        let left = compose_reductions(&e2.left, &e1.left)?;
        return Equivalence::new(left, e2.right.clone());
    }
    Err(Error::InvalidArgument("composing equivalences needs an identity reduction on the middle complex".to_string()))
}

/// A space complex with an equivalence to an effective complex.
#[derive(Clone, Debug)]
pub struct EffectiveHomology {
    pub space: ChainComplex,
    pub equivalence: Equivalence,
}

impl EffectiveHomology {
    pub fn new(space: &ChainComplex, equivalence: Equivalence) -> Result<Self> {
        if !equivalence.lbcc().same(space) {
            return Err(Error::MiddleMismatch(format!("{space:?}"), format!("{:?}", equivalence.lbcc())));
        }
        if !equivalence.rbcc().is_effective() {
            return Err(Error::NeedsEffectiveHomology(format!("{:?}", equivalence.rbcc())));
        }
        Ok(EffectiveHomology { space: space.clone(), equivalence })
    }

    pub fn effective(&self) -> &ChainComplex {
        self.equivalence.rbcc()
    }

    /// `H_n` of the space, computed on the effective complex.
    pub fn homology(&self, n: i32) -> Result<GroupPresentation> {
        homology(self.effective(), n)
    }
}

/// Largest filtration shift `flin(h(g)) - flin(g)` over the given generators
/// (0 when every image is empty).
pub fn homotopy_order(h: &Morphism, flin: &FiltrationFn, gens: &[(i32, Key)]) -> i32 {
    let mut order = 0;
    for (n, g) in gens {
        let image = h.on(*n, g);
        if let Some(m) = image.max_over(|k| flin(n + h.degree(), k)) {
            order = order.max(m - flin(*n, g));
        }
    }
    order
}

/// An equivalence whose complexes carry filtrations, with the declared bound
/// `t` on the filtration shift of both homotopies.
#[derive(Clone)]
pub struct FilteredEquivalence {
    pub equivalence: Equivalence,
    /// Filtration on the shared top complex.
    pub top_flin: FiltrationFn,
    /// Filtration on the left bottom complex.
    pub left_flin: FiltrationFn,
    /// Filtration on the right bottom complex.
    pub right_flin: FiltrationFn,
    pub declared_order: i32,
}

impl fmt::Debug for FilteredEquivalence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[FilteredEquivalence t={} {:?}]", self.declared_order, self.equivalence.right)
    }
}

/// Measured and declared homotopy order of a filtered equivalence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrderReport {
    pub measured: i32,
    pub declared: i32,
}

/// Map filtration check: largest filtration increase of `m` on the sample.
fn map_shift(m: &Morphism, src: &FiltrationFn, tgt: &FiltrationFn, gens: &[(i32, Key)]) -> i32 {
    let mut shift = i32::MIN;
    for (n, g) in gens {
        if let Some(x) = m.on(*n, g).max_over(|k| tgt(*n, k)) {
            shift = shift.max(x - src(*n, g));
        }
    }
    shift
}

impl FilteredEquivalence {
    /// Measures the homotopy orders on sampled generators and checks that the
    /// four maps preserve filtrations there.
    pub fn check(&self, spec: &SampleSpec) -> Result<OrderReport> {
        let mut rng = spec.rng();
        let e = &self.equivalence;
        let sample = |c: &ChainComplex, rng: &mut ChaCha8Rng| -> Vec<(i32, Key)> {
            spec.degrees()
                .flat_map(|n| c.check_generators(n, spec.samples, rng).into_iter().map(move |g| (n, g)))
                .collect()
        };
        let top = sample(&e.left.top, &mut rng);
        let left = sample(&e.left.bottom, &mut rng);
        let right = sample(&e.right.bottom, &mut rng);
        let checks = [
            ("left f", map_shift(&e.left.f, &self.top_flin, &self.left_flin, &top)),
            ("right f", map_shift(&e.right.f, &self.top_flin, &self.right_flin, &top)),
            ("left g", map_shift(&e.left.g, &self.left_flin, &self.top_flin, &left)),
            ("right g", map_shift(&e.right.g, &self.right_flin, &self.top_flin, &right)),
        ];
        for (name, shift) in checks {
            if shift > 0 {
                return Err(Error::InvalidFiltration(format!("{name} raises the filtration by {shift}")));
            }
        }
        let measured =
            homotopy_order(&e.left.h, &self.top_flin, &top).max(homotopy_order(&e.right.h, &self.top_flin, &top));
        Ok(OrderReport { measured, declared: self.declared_order })
    }
}

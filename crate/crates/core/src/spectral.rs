//! Filtered complexes and their spectral sequences: page groups in
//! basis-divisors form, page differentials and convergence levels.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::chain::{ChainComplex, Combination, FiltrationFn, Key};
use crate::effective::{FilteredEquivalence, SampleSpec};
use crate::error::{Error, Result};
use crate::lattice::{kernel_basis, solve_in_lattice, subquotient, Component, GroupPresentation, IntMatrix, IntVector};

/// Declared filtration bounds `(s(n), t(n))` per degree; `None` for an empty degree.
pub type BoundsFn = Arc<dyn Fn(i32) -> Option<(i32, i32)> + Send + Sync>;

struct DegreeData {
    basis: Vec<Key>,
    flin: Vec<i32>,
    /// Matrix of `d_n` from `basis(n)` to `basis(n-1)`.
    dmat: IntMatrix,
}

/// Internal description of one page, kept for differentials and convergence.
struct Page {
    group: GroupPresentation,
    /// Positions in `basis(n)` of the ambient generators (those of `F_p C_n`).
    ambient: Vec<usize>,
    /// `Z^r_p` in ambient coordinates.
    cycles: Vec<IntVector>,
    /// Ambient positions of the generators of `F_{p-1} C_n`.
    lower: Vec<usize>,
}

/// The effective side of a locally effective filtered complex.
#[derive(Clone)]
struct Transfer {
    equivalence: FilteredEquivalence,
    effective: FilteredComplex,
}

struct Inner {
    complex: ChainComplex,
    flin: FiltrationFn,
    origin: String,
    bounds: Option<BoundsFn>,
    transfer: Option<Transfer>,
    degrees: Mutex<HashMap<i32, Arc<DegreeData>>>,
    pages: Mutex<HashMap<(i32, i32, i32), Arc<Page>>>,
}

/// A chain complex with a filtration index on its generators.
#[derive(Clone)]
pub struct FilteredComplex {
    inner: Arc<Inner>,
}

impl fmt::Debug for FilteredComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[Filtered {} {:?}]", self.inner.origin, self.inner.complex)
    }
}

/// One `E^r_{p,q}`.
#[derive(Clone, Debug)]
pub struct PageGroup {
    pub r: i32,
    pub p: i32,
    pub q: i32,
    pub presentation: GroupPresentation,
    /// Ambient basis of the presentation: the generators of `F_p C_{p+q}`
    /// on the complex where the page is computed.
    pub basis: Vec<Key>,
    /// Numerator generators as combinations on the filtered complex itself
    /// (carried through the equivalence when the page was transferred).
    pub generators: Vec<Combination>,
    /// False when the page was transferred at `r <= t`, outside the range
    /// where pages of equivalent filtered complexes are known to agree.
    pub guaranteed: bool,
}

impl PageGroup {
    pub fn degree(&self) -> i32 {
        self.p + self.q
    }

    pub fn components(&self) -> Vec<Component> {
        self.presentation.invariant_factors()
    }

    pub fn divisors(&self) -> &[BigInt] {
        &self.presentation.divisors
    }

    pub fn is_trivial(&self) -> bool {
        self.presentation.is_trivial()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceReport {
    pub degree: i32,
    pub level: i32,
}

#[derive(Clone, Debug)]
pub struct EInfinityReport {
    pub degree: i32,
    /// `(p, E^∞_{p,n-p}, F_pH_n / F_{p-1}H_n)` per filtration index.
    pub pieces: Vec<(i32, Vec<Component>, Vec<Component>)>,
    pub agrees: bool,
}

fn unit(len: usize, i: usize) -> IntVector {
    let mut v = vec![BigInt::zero(); len];
    v[i] = BigInt::from(1);
    v
}

/// Submatrix with the given rows and columns.
fn restrict(m: &IntMatrix, rows: &[usize], cols: &[usize]) -> IntMatrix {
    let mut out = IntMatrix::zeros(rows.len(), cols.len());
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            out.set(i, j, m.get(r, c).clone());
        }
    }
    out
}

/// Checks `flin(dg) <= flin(g)` on sampled generators.
pub fn make_filtered(c: &ChainComplex, flin: FiltrationFn, origin: &str) -> Result<FilteredComplex> {
    make_filtered_with(c, flin, origin, &SampleSpec::new(5, 100, 0x5eed))
}

pub fn make_filtered_with(
    c: &ChainComplex,
    flin: FiltrationFn,
    origin: &str,
    spec: &SampleSpec,
) -> Result<FilteredComplex> {
    let mut rng = spec.rng();
    for n in spec.degrees() {
        for g in c.check_generators(n, spec.samples, &mut rng) {
            let p = flin(n, &g);
            if let Some(m) = c.differential(n, &g).max_over(|k| flin(n - 1, k)) {
                if m > p {
                    return Err(Error::InvalidFiltration(format!(
                        "d raises the filtration of {g} (degree {n}) from {p} to {m}"
                    )));
                }
            }
        }
    }
    Ok(FilteredComplex {
        inner: Arc::new(Inner {
            complex: c.clone(),
            flin,
            origin: origin.to_string(),
            bounds: None,
            transfer: None,
            degrees: Mutex::new(HashMap::new()),
            pages: Mutex::new(HashMap::new()),
        }),
    })
}

impl FilteredComplex {
    fn rebuild(&self, bounds: Option<BoundsFn>, transfer: Option<Transfer>) -> FilteredComplex {
        FilteredComplex {
            inner: Arc::new(Inner {
                complex: self.inner.complex.clone(),
                flin: self.inner.flin.clone(),
                origin: self.inner.origin.clone(),
                bounds,
                transfer,
                degrees: Mutex::new(HashMap::new()),
                pages: Mutex::new(HashMap::new()),
            }),
        }
    }

    /// Declares the filtration bounds `(s(n), t(n))`.
    pub fn with_bounds(&self, bounds: impl Fn(i32) -> Option<(i32, i32)> + Send + Sync + 'static) -> FilteredComplex {
        self.rebuild(Some(Arc::new(bounds)), self.inner.transfer.clone())
    }

    /// Attaches an effective homology whose left bottom complex is this
    /// complex; pages are then computed on the right bottom complex.
    pub fn with_effective_homology(&self, equivalence: FilteredEquivalence) -> Result<FilteredComplex> {
        let e = &equivalence.equivalence;
        if !e.lbcc().same(&self.inner.complex) {
            return Err(Error::MiddleMismatch(format!("{:?}", self.inner.complex), format!("{:?}", e.lbcc())));
        }
        if !e.rbcc().is_effective() {
            return Err(Error::NeedsEffectiveHomology(format!("{:?}", e.rbcc())));
        }
        let effective =
            make_filtered(e.rbcc(), equivalence.right_flin.clone(), &format!("{} (effective)", self.inner.origin))?;
        Ok(self.rebuild(self.inner.bounds.clone(), Some(Transfer { equivalence, effective })))
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.inner.complex
    }

    pub fn origin(&self) -> &str {
        &self.inner.origin
    }

    pub fn flin(&self, n: i32, g: &Key) -> i32 {
        (self.inner.flin)(n, g)
    }

    pub fn flin_fn(&self) -> FiltrationFn {
        self.inner.flin.clone()
    }

    pub fn is_effective(&self) -> bool {
        self.inner.complex.is_effective()
    }

    /// Declared homotopy order of the attached equivalence, if any.
    pub fn homotopy_order(&self) -> Option<i32> {
        self.inner.transfer.as_ref().map(|t| t.equivalence.declared_order)
    }

    pub fn effective_homology(&self) -> Option<&FilteredEquivalence> {
        self.inner.transfer.as_ref().map(|t| &t.equivalence)
    }

    /// The filtered complex on which pages are computed.
    pub fn engine(&self) -> Result<&FilteredComplex> {
        if self.is_effective() {
            return Ok(self);
        }
        match &self.inner.transfer {
            Some(t) => Ok(&t.effective),
            None => Err(Error::NeedsEffectiveHomology(format!("{:?}", self.inner.complex))),
        }
    }

    /// `(s(n), t(n))`: declared, or scanned from the basis; `None` when the
    /// degree is empty.
    pub fn bounds(&self, n: i32) -> Result<Option<(i32, i32)>> {
        if let Some(b) = &self.inner.bounds {
            return Ok(b(n));
        }
        if self.is_effective() {
            let d = self.degree(n)?;
            return Ok(d.flin.iter().min().map(|&lo| (lo, *d.flin.iter().max().unwrap())));
        }
        match &self.inner.transfer {
            Some(t) => t.effective.bounds(n),
            None => Err(Error::Unbounded { origin: self.inner.origin.clone(), degree: n }),
        }
    }

    fn degree(&self, n: i32) -> Result<Arc<DegreeData>> {
        if let Some(d) = self.inner.degrees.lock().unwrap().get(&n) {
            return Ok(d.clone());
        }
        let c = &self.inner.complex;
        let basis = c.basis(n)?;
        let flin = basis.iter().map(|g| self.flin(n, g)).collect();
        let dmat = c.differential_matrix(n)?;
        let d = Arc::new(DegreeData { basis, flin, dmat });
        self.inner.degrees.lock().unwrap().insert(n, d.clone());
        Ok(d)
    }

    fn positions(&self, n: i32, pred: impl Fn(i32) -> bool) -> Result<Vec<usize>> {
        let d = self.degree(n)?;
        Ok((0..d.basis.len()).filter(|&i| pred(d.flin[i])).collect())
    }

    /// Generators of `F_p C_n`, in basis order.
    pub fn fltrd_basis(&self, n: i32, p: i32) -> Result<Vec<Key>> {
        let d = self.degree(n)?;
        Ok(self.positions(n, |f| f <= p)?.into_iter().map(|i| d.basis[i].clone()).collect())
    }

    /// Matrix of `d_n` on `F_p C_n → F_p C_{n-1}`.
    pub fn fltr_dffr_matrix(&self, n: i32, p: i32) -> Result<IntMatrix> {
        let d = self.degree(n)?;
        let rows = self.positions(n - 1, |f| f <= p)?;
        let cols = self.positions(n, |f| f <= p)?;
        Ok(restrict(&d.dmat, &rows, &cols))
    }

    /// `{x ∈ F_top C_n : d x ∈ F_{low} C_{n-1}}` in coordinates over `F_top C_n`.
    fn relative_cycles(&self, n: i32, top: i32, low: i32) -> Result<(Vec<usize>, Vec<IntVector>)> {
        let d = self.degree(n)?;
        let cols = self.positions(n, |f| f <= top)?;
        let rows = self.positions(n - 1, |f| f > low)?;
        Ok((cols.clone(), kernel_basis(&restrict(&d.dmat, &rows, &cols))))
    }

    fn page(&self, r: i32, p: i32, q: i32) -> Result<Arc<Page>> {
        if r < 1 {
            return Err(Error::InvalidArgument(format!("page index r must be >= 1, got {r}")));
        }
        if let Some(pg) = self.inner.pages.lock().unwrap().get(&(r, p, q)) {
            return Ok(pg.clone());
        }
        let n = p + q;
        let (ambient, cycles) = self.relative_cycles(n, p, p - r)?;
        let dn = self.degree(n)?;
        let lower: Vec<usize> = (0..ambient.len()).filter(|&i| dn.flin[ambient[i]] < p).collect();
        let k = ambient.len();
        let lower_units: Vec<IntVector> = lower.iter().map(|&i| unit(k, i)).collect();
        let mut numerator = cycles.clone();
        numerator.extend(lower_units.iter().cloned());

        let (src, boundary_sources) = self.relative_cycles(n + 1, p + r - 1, p)?;
        let dn1 = self.degree(n + 1)?;
        let mut denominator = lower_units;
        let where_in_ambient: HashMap<usize, usize> = ambient.iter().enumerate().map(|(j, &i)| (i, j)).collect();
        for y in &boundary_sources {
            let mut full = vec![BigInt::zero(); dn1.basis.len()];
            for (j, &i) in src.iter().enumerate() {
                full[i] = y[j].clone();
            }
            let image = dn1.dmat.mul_vec(&full);
            let mut v = vec![BigInt::zero(); k];
            for (i, x) in image.into_iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let j = where_in_ambient
                    .get(&i)
                    .ok_or_else(|| Error::InvalidFiltration(format!("d leaves F_{p} in degree {}", n + 1)))?;
                v[*j] = x;
            }
            denominator.push(v);
        }
        let group = subquotient(k, &numerator, &denominator)?;
        let page = Arc::new(Page { group, ambient, cycles, lower });
        self.inner.pages.lock().unwrap().insert((r, p, q), page.clone());
        Ok(page)
    }

    fn combination(&self, n: i32, ambient: &[usize], v: &[BigInt]) -> Result<Combination> {
        let d = self.degree(n)?;
        let keys: Vec<Key> = ambient.iter().map(|&i| d.basis[i].clone()).collect();
        Ok(Combination::from_vector(n, &keys, v))
    }

    /// `E^r_{p,q}` in basis-divisors form. Locally effective complexes are
    /// computed on their effective homology.
    pub fn page_group(&self, r: i32, p: i32, q: i32) -> Result<PageGroup> {
        let engine = self.engine()?;
        let page = engine.page(r, p, q)?;
        let n = p + q;
        let d = engine.degree(n)?;
        let basis: Vec<Key> = page.ambient.iter().map(|&i| d.basis[i].clone()).collect();
        let mut generators = Vec::with_capacity(page.group.numerator.len());
        for v in &page.group.numerator {
            let c = engine.combination(n, &page.ambient, v)?;
            generators.push(match &self.inner.transfer {
                Some(t) if !self.is_effective() => t.equivalence.equivalence.to_left(&c),
                _ => c,
            });
        }
        let guaranteed = self.homotopy_order().is_none_or(|t| r > t);
        Ok(PageGroup { r, p, q, presentation: page.group.clone(), basis, generators, guaranteed })
    }

    /// Raw basis-divisors description (same data as [`page_group`](Self::page_group)).
    pub fn page_basis_divisors(&self, r: i32, p: i32, q: i32) -> Result<PageGroup> {
        self.page_group(r, p, q)
    }

    /// Page computed through the attached effective homology, flagged when
    /// `r` does not exceed the declared homotopy order.
    pub fn transfer_page(&self, r: i32, p: i32, q: i32) -> Result<PageGroup> {
        if self.is_effective() {
            return self.page_group(r, p, q);
        }
        if self.inner.transfer.is_none() {
            return Err(Error::NeedsEffectiveHomology(format!("{:?}", self.inner.complex)));
        }
        self.page_group(r, p, q)
    }

    /// `d^r_{p,q}` on coordinates over the live generators of `E^r_{p,q}`,
    /// returning coordinates over the live generators of `E^r_{p-r,q+r-1}`.
    pub fn page_differential(&self, r: i32, p: i32, q: i32, coords: &[BigInt]) -> Result<IntVector> {
        let engine = self.engine()?;
        let page = engine.page(r, p, q)?;
        let x = page.group.lift(coords)?;
        let k = page.ambient.len();
        let n = p + q;
        // Split x = z + w with z ∈ Z^r_p and w ∈ F_{p-1}.
        let mut cols = page.cycles.clone();
        cols.extend(page.lower.iter().map(|&i| unit(k, i)));
        let mut z = vec![BigInt::zero(); k];
        if !cols.is_empty() {
            let m = IntMatrix::from_columns(k, &cols);
            let c = solve_in_lattice(&m, &x)?.ok_or_else(|| {
                Error::Internal(format!("class representative outside the numerator of E^{r}_{{{p},{q}}}"))
            })?;
            for (ci, zc) in c.iter().zip(&page.cycles) {
                for (zi, v) in z.iter_mut().zip(zc) {
                    *zi += ci * v;
                }
            }
        }
        let dn = engine.degree(n)?;
        let mut full = vec![BigInt::zero(); dn.basis.len()];
        for (j, &i) in page.ambient.iter().enumerate() {
            full[i] = z[j].clone();
        }
        let image = dn.dmat.mul_vec(&full);
        let target = engine.page(r, p - r, q + r - 1)?;
        let mut v = vec![BigInt::zero(); target.ambient.len()];
        let where_in: HashMap<usize, usize> = target.ambient.iter().enumerate().map(|(j, &i)| (i, j)).collect();
        for (i, x) in image.into_iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let j = where_in.get(&i).ok_or_else(|| Error::Internal(format!("d^{r} image leaves F_{}", p - r)))?;
            v[*j] = x;
        }
        target.group.coordinates(&v)?.ok_or_else(|| {
            Error::Internal(format!("d^{r} image outside the numerator of E^{r}_{{{},{}}}", p - r, q + r - 1))
        })
    }

    fn required_bounds(&self, n: i32) -> Result<Option<(i32, i32)>> {
        self.engine()?.bounds(n)
    }

    /// A page index past which `E^r_{p,q}`, `p + q = n`, no longer changes.
    pub fn stable_page(&self, n: i32) -> Result<i32> {
        let b: Vec<Option<(i32, i32)>> = (n - 1..=n + 1).map(|m| self.required_bounds(m)).collect::<Result<_>>()?;
        let width = b.iter().flatten().map(|(s, t)| t - s).max().unwrap_or(0);
        let cross = |hi: Option<(i32, i32)>, lo: Option<(i32, i32)>| match (hi, lo) {
            (Some((_, t)), Some((s, _))) => t - s,
            _ => 0,
        };
        Ok(width.max(cross(b[1], b[0])).max(cross(b[2], b[1])) + 2)
    }

    /// Smallest `r >= 1` such that every page from `E^r` on has the same
    /// invariant factors as `E^∞` at all `(p, q)` with `p + q = n`.
    pub fn convergence_level(&self, n: i32) -> Result<ConvergenceReport> {
        let engine = self.engine()?;
        let Some((s, t)) = engine.bounds(n)? else {
            return Ok(ConvergenceReport { degree: n, level: 1 });
        };
        let r_inf = self.stable_page(n)?;
        let groups = |r: i32| -> Result<Vec<Vec<Component>>> {
            (s..=t).map(|p| Ok(engine.page(r, p, n - p)?.group.invariant_factors())).collect()
        };
        let limit = groups(r_inf)?;
        let mut level = r_inf;
        for r in (1..r_inf).rev() {
            if groups(r)? != limit {
                break;
            }
            level = r;
        }
        Ok(ConvergenceReport { degree: n, level })
    }

    /// Compares `E^∞_{p,n-p}` with `F_pH_n / F_{p-1}H_n` computed directly
    /// from cycles and boundaries, for every `p`.
    pub fn e_infinity_check(&self, n: i32) -> Result<EInfinityReport> {
        let engine = self.engine()?;
        let dn = engine.degree(n)?;
        let dn1 = engine.degree(n + 1)?;
        let rank = dn.basis.len();
        let boundaries: Vec<IntVector> = (0..dn1.dmat.cols()).map(|j| dn1.dmat.column(j)).collect();
        let mut pieces = Vec::new();
        let mut agrees = true;
        if let Some((s, t)) = engine.bounds(n)? {
            let r_inf = self.stable_page(n)?;
            let filtered_cycles = |p: i32| -> Result<Vec<IntVector>> {
                let (cols, ker) = engine.relative_cycles(n, p, i32::MIN)?;
                Ok(ker
                    .into_iter()
                    .map(|v| {
                        let mut full = vec![BigInt::zero(); rank];
                        for (j, &i) in cols.iter().enumerate() {
                            full[i] = v[j].clone();
                        }
                        full
                    })
                    .collect())
            };
            for p in s..=t {
                let mut num = filtered_cycles(p)?;
                num.extend(boundaries.iter().cloned());
                let mut den = filtered_cycles(p - 1)?;
                den.extend(boundaries.iter().cloned());
                let gr = subquotient(rank, &num, &den)?.invariant_factors();
                let einf = engine.page(r_inf, p, n - p)?.group.invariant_factors();
                agrees &= gr == einf;
                pieces.push((p, einf, gr));
            }
        }
        Ok(EInfinityReport { degree: n, pieces, agrees })
    }
}

//! Free chain complexes over the integers, their combinations and morphisms.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::RngCore;

use crate::error::{Error, Result};
use crate::lattice::{kernel_basis, subquotient, GroupPresentation, IntMatrix, IntVector};
use crate::simplicial::AbSimplex;

/// Canonical token naming a generator inside one complex and degree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Key {
    Atom(String),
    Int(i64),
    /// Bar word `[a1|...|an]`.
    Bar(Vec<i64>),
    /// Cartesian product simplex.
    Crpr(Box<(AbSimplex, AbSimplex)>),
    Tensor(Box<TensorKey>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TensorKey {
    pub left_degree: i32,
    pub left: Key,
    pub right: Key,
}

impl Key {
    pub fn atom(name: &str) -> Key {
        Key::Atom(name.to_string())
    }

    pub fn tensor(left_degree: i32, left: Key, right: Key) -> Key {
        Key::Tensor(Box::new(TensorKey { left_degree, left, right }))
    }

    pub fn crpr(base: AbSimplex, fiber: AbSimplex) -> Key {
        Key::Crpr(Box::new((base, fiber)))
    }

    pub fn as_tensor(&self) -> Option<&TensorKey> {
        match self {
            Key::Tensor(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_crpr(&self) -> Option<(&AbSimplex, &AbSimplex)> {
        match self {
            Key::Crpr(b) => Some((&b.0, &b.1)),
            _ => None,
        }
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Key::Atom(s) => write!(f, "{s}"),
            Key::Int(n) => write!(f, "{n}"),
            Key::Bar(w) if w.is_empty() => write!(f, "NIL"),
            Key::Bar(w) => {
                let parts: Vec<String> = w.iter().map(i64::to_string).collect();
                write!(f, "({})", parts.join(" "))
            }
            Key::Crpr(b) => {
                write!(f, "<CrPr {} {} {} {}>", b.0.dgop_label(), b.0.core, b.1.dgop_label(), b.1.core)
            }
            Key::Tensor(t) => write!(f, "<TnPr {} {}>", t.left, t.right),
        }
    }
}

/// A generator together with its degree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    pub degree: i32,
    pub key: Key,
}

/// Finite integer combination of generators of one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Combination {
    degree: i32,
    terms: BTreeMap<Key, BigInt>,
}

impl Combination {
    pub fn zero(degree: i32) -> Self {
        Combination { degree, terms: BTreeMap::new() }
    }

    pub fn generator(degree: i32, key: Key) -> Self {
        Self::term(degree, BigInt::one(), key)
    }

    pub fn term(degree: i32, coef: BigInt, key: Key) -> Self {
        let mut c = Self::zero(degree);
        c.add_term(coef, key);
        c
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Key)>>(degree: i32, terms: I) -> Self {
        let mut c = Self::zero(degree);
        for (k, g) in terms {
            c.add_term(BigInt::from(k), g);
        }
        c
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing generator order.
    pub fn terms(&self) -> impl Iterator<Item = (&Key, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &Key) -> BigInt {
        self.terms.get(key).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add_term(&mut self, coef: BigInt, key: Key) {
        if coef.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(coef);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coef;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += k * other`; degrees must agree unless `other` is empty.
    pub fn add_scaled(&mut self, k: &BigInt, other: &Combination) {
        if other.is_zero() || k.is_zero() {
            return;
        }
        debug_assert_eq!(self.degree, other.degree, "adding combinations of different degrees");
        for (g, c) in &other.terms {
            self.add_term(c * k, g.clone());
        }
    }

    pub fn scaled(&self, k: &BigInt) -> Combination {
        let mut c = Combination::zero(self.degree);
        c.add_scaled(k, self);
        c
    }

    pub fn neg(&self) -> Combination {
        self.scaled(&-BigInt::one())
    }

    pub fn checked_add(&self, other: &Combination) -> Result<Combination> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        let mut c = self.clone();
        c.add_scaled(&BigInt::one(), other);
        Ok(c)
    }

    pub fn sub(&self, other: &Combination) -> Combination {
        let mut c = self.clone();
        c.add_scaled(&-BigInt::one(), other);
        c
    }

    /// Largest value of `weight` over the generators present.
    pub fn max_over<F: Fn(&Key) -> i32>(&self, weight: F) -> Option<i32> {
        self.terms.keys().map(weight).max()
    }

    /// Coordinates over an ordered basis; `None` if a generator is missing.
    pub fn to_vector(&self, index: &HashMap<Key, usize>, len: usize) -> Option<IntVector> {
        let mut v = vec![BigInt::zero(); len];
        for (g, c) in &self.terms {
            v[*index.get(g)?] = c.clone();
        }
        Some(v)
    }

    pub fn from_vector(degree: i32, basis: &[Key], v: &[BigInt]) -> Combination {
        let mut c = Combination::zero(degree);
        for (g, x) in basis.iter().zip(v) {
            c.add_term(x.clone(), g.clone());
        }
        c
    }
}

/// Sum of two combinations of the same degree.
pub fn cmbn_add(a: &Combination, b: &Combination) -> Result<Combination> {
    a.checked_add(b)
}

impl fmt::Display for Combination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = format!("{{CMBN {}}}", self.degree);
        writeln!(f, "{}{}", "-".repeat(62 - head.len().min(62)), head)?;
        for (g, c) in &self.terms {
            writeln!(f, "<{c} * {g}>")?;
        }
        write!(f, "{}", "-".repeat(62))
    }
}

pub type EvalFn = Arc<dyn Fn(i32, &Key) -> Combination + Send + Sync>;
pub type BasisFn = Arc<dyn Fn(i32) -> Vec<Key> + Send + Sync>;
pub type SampleFn = Arc<dyn Fn(&mut dyn RngCore, i32) -> Option<Key> + Send + Sync>;
pub type MemberFn = Arc<dyn Fn(i32, &Key) -> bool + Send + Sync>;
/// Filtration index of a generator in a given degree.
pub type FiltrationFn = Arc<dyn Fn(i32, &Key) -> i32 + Send + Sync>;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_id() -> u64 {
    NEXT_ID.fetch_add(1, Ordering::Relaxed)
}

type Memo = Mutex<HashMap<(i32, Key), Combination>>;

fn memo_eval(memo: &Memo, degree: i32, key: &Key, eval: impl FnOnce() -> Combination) -> Combination {
    if let Some(c) = memo.lock().unwrap().get(&(degree, key.clone())) {
        return c.clone();
    }
    let c = eval();
    memo.lock().unwrap().insert((degree, key.clone()), c.clone());
    c
}

struct ComplexInner {
    id: u64,
    origin: String,
    basis: Option<BasisFn>,
    differential: EvalFn,
    sampler: Option<SampleFn>,
    member: Option<MemberFn>,
    memo: Memo,
}

/// A free chain complex: a differential rule plus, for effective complexes,
/// a finite basis in every degree.
#[derive(Clone)]
pub struct ChainComplex {
    inner: Arc<ComplexInner>,
}

impl fmt::Debug for ChainComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[K{} {}]", self.inner.id, self.inner.origin)
    }
}

pub struct ComplexBuilder {
    origin: String,
    basis: Option<BasisFn>,
    differential: EvalFn,
    sampler: Option<SampleFn>,
    member: Option<MemberFn>,
}

impl ComplexBuilder {
    pub fn basis(mut self, f: impl Fn(i32) -> Vec<Key> + Send + Sync + 'static) -> Self {
        self.basis = Some(Arc::new(f));
        self
    }

    pub fn basis_fn(mut self, f: Option<BasisFn>) -> Self {
        self.basis = f;
        self
    }

    pub fn sampler(mut self, f: impl Fn(&mut dyn RngCore, i32) -> Option<Key> + Send + Sync + 'static) -> Self {
        self.sampler = Some(Arc::new(f));
        self
    }

    pub fn sampler_fn(mut self, f: Option<SampleFn>) -> Self {
        self.sampler = f;
        self
    }

    pub fn member(mut self, f: impl Fn(i32, &Key) -> bool + Send + Sync + 'static) -> Self {
        self.member = Some(Arc::new(f));
        self
    }

    pub fn member_fn(mut self, f: Option<MemberFn>) -> Self {
        self.member = f;
        self
    }

    pub fn build(self) -> ChainComplex {
        ChainComplex {
            inner: Arc::new(ComplexInner {
                id: fresh_id(),
                origin: self.origin,
                basis: self.basis,
                differential: self.differential,
                sampler: self.sampler,
                member: self.member,
                memo: Mutex::new(HashMap::new()),
            }),
        }
    }
}

impl ChainComplex {
    pub fn builder(
        origin: impl Into<String>,
        differential: impl Fn(i32, &Key) -> Combination + Send + Sync + 'static,
    ) -> ComplexBuilder {
        ComplexBuilder {
            origin: origin.into(),
            basis: None,
            differential: Arc::new(differential),
            sampler: None,
            member: None,
        }
    }

    /// Complex with no generators at all.
    pub fn zero() -> ChainComplex {
        ChainComplex::builder("ZERO", |n, _| Combination::zero(n - 1)).basis(|_| Vec::new()).build()
    }

    pub fn id(&self) -> u64 {
        self.inner.id
    }

    pub fn origin(&self) -> &str {
        &self.inner.origin
    }

    pub fn same(&self, other: &ChainComplex) -> bool {
        self.inner.id == other.inner.id
    }

    pub fn is_effective(&self) -> bool {
        self.inner.basis.is_some()
    }

    pub(crate) fn basis_fn(&self) -> Option<BasisFn> {
        self.inner.basis.clone()
    }

    pub(crate) fn sampler_fn(&self) -> Option<SampleFn> {
        self.inner.sampler.clone()
    }

    pub(crate) fn member_fn(&self) -> Option<MemberFn> {
        self.inner.member.clone()
    }

    pub fn basis(&self, n: i32) -> Result<Vec<Key>> {
        match &self.inner.basis {
            Some(b) => Ok(b(n)),
            None => Err(Error::LocallyEffective(format!("{self:?}"))),
        }
    }

    /// Membership test for a generator, when one is available.
    pub fn contains(&self, n: i32, key: &Key) -> bool {
        if let Some(m) = &self.inner.member {
            return m(n, key);
        }
        match &self.inner.basis {
            Some(b) => b(n).contains(key),
            None => true,
        }
    }

    pub fn differential(&self, n: i32, key: &Key) -> Combination {
        memo_eval(&self.inner.memo, n, key, || (self.inner.differential)(n, key))
    }

    pub fn d(&self, c: &Combination) -> Combination {
        let mut out = Combination::zero(c.degree() - 1);
        for (g, k) in c.terms() {
            out.add_scaled(k, &self.differential(c.degree(), g));
        }
        out
    }

    pub fn sample(&self, rng: &mut dyn RngCore, n: i32) -> Option<Key> {
        self.inner.sampler.as_ref().and_then(|s| s(rng, n))
    }

    /// Generators to check in degree `n`: the whole basis when effective,
    /// otherwise up to `samples` random ones.
    pub fn check_generators(&self, n: i32, samples: usize, rng: &mut dyn RngCore) -> Vec<Key> {
        if let Ok(b) = self.basis(n) {
            return b;
        }
        let mut out: Vec<Key> = (0..samples).filter_map(|_| self.sample(rng, n)).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Matrix of `d_n` from the basis of `C_n` to the basis of `C_{n-1}`.
    pub fn differential_matrix(&self, n: i32) -> Result<IntMatrix> {
        let src = self.basis(n)?;
        let tgt = self.basis(n - 1)?;
        Ok(matrix_on(&src, &tgt, n - 1, |g| self.differential(n, g)))
    }
}

pub(crate) fn index_of(basis: &[Key]) -> HashMap<Key, usize> {
    basis.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect()
}

/// Matrix whose column `j` holds the coordinates of `image(src[j])` in `tgt`.
pub(crate) fn matrix_on(src: &[Key], tgt: &[Key], _degree: i32, image: impl Fn(&Key) -> Combination) -> IntMatrix {
    let index = index_of(tgt);
    let mut m = IntMatrix::zeros(tgt.len(), src.len());
    for (j, g) in src.iter().enumerate() {
        for (h, c) in image(g).terms() {
            let i = *index.get(h).unwrap_or_else(|| panic!("image generator {h} outside the target basis"));
            m.set(i, j, c.clone());
        }
    }
    m
}

struct MorphInner {
    source: ChainComplex,
    target: ChainComplex,
    degree: i32,
    rule: EvalFn,
    memo: Option<Memo>,
}

/// Linear map between chain complexes given by its value on generators.
#[derive(Clone)]
pub struct Morphism {
    inner: Arc<MorphInner>,
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[Morphism (degree {}): {:?} -> {:?}]", self.inner.degree, self.inner.source, self.inner.target)
    }
}

impl Morphism {
    pub fn new(
        source: &ChainComplex,
        target: &ChainComplex,
        degree: i32,
        rule: impl Fn(i32, &Key) -> Combination + Send + Sync + 'static,
    ) -> Morphism {
        Morphism {
            inner: Arc::new(MorphInner {
                source: source.clone(),
                target: target.clone(),
                degree,
                rule: Arc::new(rule),
                memo: Some(Mutex::new(HashMap::new())),
            }),
        }
    }

    pub fn identity(c: &ChainComplex) -> Morphism {
        Morphism::new(c, c, 0, |n, g| Combination::generator(n, g.clone()))
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex, degree: i32) -> Morphism {
        Morphism::new(source, target, degree, move |n, _| Combination::zero(n + degree))
    }

    /// The differential of `c` as a degree -1 endomorphism.
    pub fn differential_of(c: &ChainComplex) -> Morphism {
        let cc = c.clone();
        Morphism::new(c, c, -1, move |n, g| cc.differential(n, g))
    }

    pub fn source(&self) -> &ChainComplex {
        &self.inner.source
    }

    pub fn target(&self) -> &ChainComplex {
        &self.inner.target
    }

    pub fn degree(&self) -> i32 {
        self.inner.degree
    }

    /// Same rule, new endpoints (used when a perturbation changes a differential).
    pub fn retarget(&self, source: &ChainComplex, target: &ChainComplex) -> Morphism {
        let m = self.clone();
        Morphism::new(source, target, self.degree(), move |n, g| m.on(n, g))
    }

    pub fn on(&self, n: i32, key: &Key) -> Combination {
        match &self.inner.memo {
            Some(memo) => memo_eval(memo, n, key, || (self.inner.rule)(n, key)),
            None => (self.inner.rule)(n, key),
        }
    }

    pub fn apply(&self, c: &Combination) -> Combination {
        let mut out = Combination::zero(c.degree() + self.degree());
        for (g, k) in c.terms() {
            out.add_scaled(k, &self.on(c.degree(), g));
        }
        out
    }

    /// Like [`Morphism::apply`], rejecting generators foreign to the source.
    pub fn try_apply(&self, c: &Combination) -> Result<Combination> {
        for (g, _) in c.terms() {
            if !self.source().contains(c.degree(), g) {
                return Err(Error::ForeignGenerator(g.to_string(), format!("{:?}", self.source())));
            }
        }
        Ok(self.apply(c))
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Morphism) -> Morphism {
        let (a, b) = (self.clone(), other.clone());
        Morphism::new(other.source(), self.target(), self.degree() + other.degree(), move |n, g| a.apply(&b.on(n, g)))
    }

    pub fn add(&self, other: &Morphism) -> Morphism {
        assert_eq!(self.degree(), other.degree(), "adding morphisms of different degrees");
        let (a, b) = (self.clone(), other.clone());
        Morphism::new(self.source(), self.target(), self.degree(), move |n, g| {
            let mut c = a.on(n, g);
            c.add_scaled(&BigInt::one(), &b.on(n, g));
            c
        })
    }

    pub fn sub(&self, other: &Morphism) -> Morphism {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Morphism {
        let a = self.clone();
        Morphism::new(self.source(), self.target(), self.degree(), move |n, g| a.on(n, g).neg())
    }
}

/// Complex with differential `d + delta`.
pub fn add_perturbation(c: &ChainComplex, delta: &Morphism) -> ChainComplex {
    let (cc, dd) = (c.clone(), delta.clone());
    ChainComplex::builder(format!("ADD {c:?} {delta:?}"), move |n, g| {
        let mut x = cc.differential(n, g);
        x.add_scaled(&BigInt::one(), &dd.on(n, g));
        x
    })
    .basis_fn(c.basis_fn())
    .sampler_fn(c.sampler_fn())
    .member_fn(c.member_fn())
    .build()
}

fn koszul(deg: i32) -> BigInt {
    if deg.rem_euclid(2) == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// `(-1)^deg`
pub fn sign(deg: i32) -> BigInt {
    koszul(deg)
}

/// Tensor product of two complexes, generators `a ⊗ b` in degree `|a| + |b|`
/// with `d(a⊗b) = da⊗b + (-1)^|a| a⊗db`. Both factors are assumed to vanish
/// in negative degrees.
pub fn tensor_complex(a: &ChainComplex, b: &ChainComplex) -> ChainComplex {
    let (a1, b1) = (a.clone(), b.clone());
    let diff = move |n: i32, g: &Key| {
        let t = g.as_tensor().expect("tensor generator");
        let p = t.left_degree;
        let mut out = Combination::zero(n - 1);
        for (x, k) in a1.differential(p, &t.left).terms() {
            out.add_term(k.clone(), Key::tensor(p - 1, x.clone(), t.right.clone()));
        }
        let s = koszul(p);
        for (y, k) in b1.differential(n - p, &t.right).terms() {
            out.add_term(&s * k, Key::tensor(p, t.left.clone(), y.clone()));
        }
        out
    };
    let mut builder = ChainComplex::builder(format!("TNSR-PRDC {a:?} {b:?}"), diff);
    if let (Some(ba), Some(bb)) = (a.basis_fn(), b.basis_fn()) {
        builder = builder.basis(move |n| {
            let mut out = Vec::new();
            for p in 0..=n.max(-1) {
                let left = ba(p);
                if left.is_empty() {
                    continue;
                }
                let right = bb(n - p);
                for x in &left {
                    for y in &right {
                        out.push(Key::tensor(p, x.clone(), y.clone()));
                    }
                }
            }
            out.sort();
            out
        });
    }
    let (sa, sb) = (generator_source(a), generator_source(b));
    builder = builder.sampler(move |rng, n| {
        if n < 0 {
            return None;
        }
        for _ in 0..16 {
            let p = (rng.next_u32() % (n as u32 + 1)) as i32;
            if let (Some(x), Some(y)) = (sa(rng, p), sb(rng, n - p)) {
                return Some(Key::tensor(p, x, y));
            }
        }
        None
    });
    let (ma, mb) = (a.clone(), b.clone());
    builder = builder.member(move |n, g| match g.as_tensor() {
        Some(t) => ma.contains(t.left_degree, &t.left) && mb.contains(n - t.left_degree, &t.right),
        None => false,
    });
    builder.build()
}

/// Random generator source: the sampler when present, otherwise a uniform
/// pick from the basis.
pub(crate) fn generator_source(c: &ChainComplex) -> SampleFn {
    if let Some(s) = c.sampler_fn() {
        return s;
    }
    let basis = c.basis_fn();
    Arc::new(move |rng: &mut dyn RngCore, n: i32| {
        let b = basis.as_ref()?(n);
        if b.is_empty() {
            None
        } else {
            Some(b[rng.next_u32() as usize % b.len()].clone())
        }
    })
}

/// `f ⊗ g` with the Koszul sign `(-1)^(|g| |a|)` on `a ⊗ b`.
pub fn tensor_morphism(f: &Morphism, g: &Morphism, source: &ChainComplex, target: &ChainComplex) -> Morphism {
    let (f1, g1) = (f.clone(), g.clone());
    let gdeg = g.degree();
    let fdeg = f.degree();
    Morphism::new(source, target, fdeg + gdeg, move |n, key| {
        let t = key.as_tensor().expect("tensor generator");
        let p = t.left_degree;
        let left = f1.on(p, &t.left);
        let mut out = Combination::zero(n + fdeg + gdeg);
        if left.is_zero() {
            return out;
        }
        let right = g1.on(n - p, &t.right);
        let s = koszul(gdeg * p);
        for (x, kx) in left.terms() {
            for (y, ky) in right.terms() {
                out.add_term(&s * kx * ky, Key::tensor(p + fdeg, x.clone(), y.clone()));
            }
        }
        out
    })
}

/// `H_n = Ker d_n / Im d_{n+1}` of an effective complex.
pub fn homology(c: &ChainComplex, n: i32) -> Result<GroupPresentation> {
    if !c.is_effective() {
        return Err(Error::NeedsEffectiveHomology(format!("{c:?}")));
    }
    let rank = c.basis(n)?.len();
    let cycles = kernel_basis(&c.differential_matrix(n)?);
    let dn1 = c.differential_matrix(n + 1)?;
    let boundaries: Vec<IntVector> = (0..dn1.cols()).map(|j| dn1.column(j)).collect();
    subquotient(rank, &cycles, &boundaries)
}

/// Checks `d∘d = 0` on the given generators, returning the first witness.
pub fn check_dd(c: &ChainComplex, n: i32, gens: &[Key]) -> Option<Key> {
    gens.iter().find(|g| !c.d(&c.differential(n, g)).is_zero()).cloned()
}

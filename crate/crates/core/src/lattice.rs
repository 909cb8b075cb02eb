//! Exact integer linear algebra: Smith normal form, kernels, lattice
//! membership and presentations of subquotients of free modules.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Coordinate vector over an ambient basis.
pub type IntVector = Vec<BigInt>;

/// Dense row-major matrix of arbitrary precision integers.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows * cols");
        IntMatrix { rows, cols, data: entries.iter().map(|&x| BigInt::from(x)).collect() }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[IntVector]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[IntVector]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols);
            for (j, x) in r.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn column(&self, j: usize) -> IntVector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> IntVector {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> IntVector {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = BigInt::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect()
    }

    /// Fraction-free (Bareiss) determinant of a square matrix.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += k * row[src]
    fn add_row(&mut self, target: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let s = &self.data[src * self.cols + j];
            if !s.is_zero() {
                let v = s * k;
                self.data[target * self.cols + j] += v;
            }
        }
    }

    /// col[target] += k * col[src]
    fn add_col(&mut self, target: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let s = &self.data[i * self.cols + src];
            if !s.is_zero() {
                let v = s * k;
                self.data[i * self.cols + target] += v;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = v;
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// `P * M * Q = S` with `P`, `Q` unimodular and `S` diagonal.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub s: IntMatrix,
    pub p: IntMatrix,
    pub q: IntMatrix,
    /// Inverse of `p`, tracked alongside it.
    pub p_inv: IntMatrix,
    pub rank: usize,
}

impl SmithDecomposition {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols)).map(|i| self.s.get(i, i).clone()).collect()
    }
}

struct SmithWork {
    s: IntMatrix,
    p: IntMatrix,
    p_inv: IntMatrix,
    q: IntMatrix,
}

impl SmithWork {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.s.swap_rows(a, b);
        self.p.swap_rows(a, b);
        self.p_inv.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.s.swap_cols(a, b);
        self.q.swap_cols(a, b);
    }

    fn add_row(&mut self, target: usize, src: usize, k: &BigInt) {
        self.s.add_row(target, src, k);
        self.p.add_row(target, src, k);
        self.p_inv.add_col(src, target, &-k);
    }

    fn add_col(&mut self, target: usize, src: usize, k: &BigInt) {
        self.s.add_col(target, src, k);
        self.q.add_col(target, src, k);
    }

    fn negate_row(&mut self, i: usize) {
        self.s.negate_row(i);
        self.p.negate_row(i);
        self.p_inv.negate_col(i);
    }

    /// Position of a nonzero entry of least absolute value in the trailing block.
    fn min_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.s.rows {
            for j in t..self.s.cols {
                let x = self.s.get(i, j);
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < self.s.get(bi, bj).abs()) {
                    best = Some((i, j));
                    if x.abs().is_one() {
                        return best;
                    }
                }
            }
        }
        best
    }

    fn move_to_pivot(&mut self, t: usize, (i, j): (usize, usize)) {
        self.swap_rows(t, i);
        self.swap_cols(t, j);
    }

    /// Clears row and column `t` outside the pivot; returns false if a
    /// smaller remainder was produced and the pivot must be re-chosen.
    fn clear_cross(&mut self, t: usize) -> bool {
        let pivot = self.s.get(t, t).clone();
        let mut clean = true;
        for i in t + 1..self.s.rows {
            let x = self.s.get(i, t).clone();
            if x.is_zero() {
                continue;
            }
            let q = x.div_floor(&pivot);
            self.add_row(i, t, &-q);
            if !self.s.get(i, t).is_zero() {
                clean = false;
            }
        }
        for j in t + 1..self.s.cols {
            let x = self.s.get(t, j).clone();
            if x.is_zero() {
                continue;
            }
            let q = x.div_floor(&pivot);
            self.add_col(j, t, &-q);
            if !self.s.get(t, j).is_zero() {
                clean = false;
            }
        }
        clean
    }
}

/// Smith normal form with minimal-absolute-value pivoting.
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let mut w = SmithWork {
        s: m.clone(),
        p: IntMatrix::identity(m.rows),
        p_inv: IntMatrix::identity(m.rows),
        q: IntMatrix::identity(m.cols),
    };
    let mut rank = 0;
    let limit = m.rows.min(m.cols);
    for t in 0..limit {
        let Some(pos) = w.min_entry(t) else { break };
        w.move_to_pivot(t, pos);
        loop {
            if !w.clear_cross(t) {
                let pos = w.min_entry(t).expect("nonzero remainder present");
                w.move_to_pivot(t, pos);
                continue;
            }
            // divisibility of the trailing block by the pivot
            let pivot = w.s.get(t, t).clone();
            let bad = (t + 1..w.s.rows).find(|&i| (t + 1..w.s.cols).any(|j| !w.s.get(i, j).is_multiple_of(&pivot)));
            match bad {
                Some(i) => w.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if w.s.get(t, t).is_negative() {
            w.negate_row(t);
        }
        rank += 1;
    }
    SmithDecomposition { s: w.s, p: w.p, q: w.q, p_inv: w.p_inv, rank }
}

/// A Z-basis of `{x : M x = 0}`.
pub fn kernel_basis(m: &IntMatrix) -> Vec<IntVector> {
    let snf = smith_normal_form(m);
    (snf.rank..m.cols).map(|j| snf.q.column(j)).collect()
}

/// Finds an integer `x` with `M x = b`, or `None` when `b` lies outside the
/// image lattice.
pub fn solve_in_lattice(m: &IntMatrix, b: &[BigInt]) -> Result<Option<IntVector>> {
    let snf = smith_normal_form(m);
    solve_with(&snf, m.cols, b)
}

fn solve_with(snf: &SmithDecomposition, cols: usize, b: &[BigInt]) -> Result<Option<IntVector>> {
    if b.len() != snf.p.cols {
        return Err(Error::DimensionMismatch { expected: snf.p.cols, found: b.len() });
    }
    let c = snf.p.mul_vec(b);
    let mut y = vec![BigInt::zero(); cols];
    for (i, ci) in c.iter().enumerate() {
        if i < snf.rank {
            let (quot, rem) = ci.div_rem(snf.s.get(i, i));
            if !rem.is_zero() {
                return Ok(None);
            }
            y[i] = quot;
        } else if !ci.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some(snf.q.mul_vec(&y)))
}

/// Reusable solver for many right-hand sides against one matrix.
pub struct LatticeSolver {
    snf: SmithDecomposition,
    cols: usize,
}

impl LatticeSolver {
    pub fn new(m: &IntMatrix) -> Self {
        LatticeSolver { snf: smith_normal_form(m), cols: m.cols }
    }

    pub fn solve(&self, b: &[BigInt]) -> Result<Option<IntVector>> {
        solve_with(&self.snf, self.cols, b)
    }
}

/// Hermite normal form of the lattice spanned by `vectors`: rows in echelon
/// form, positive pivots, entries above each pivot reduced into `[0, pivot)`.
/// Returns the nonzero rows together with their pivot columns.
pub fn hermite_rows(dim: usize, vectors: &[IntVector]) -> (Vec<IntVector>, Vec<usize>) {
    let mut rows: Vec<IntVector> = vectors.iter().filter(|v| v.iter().any(|x| !x.is_zero())).cloned().collect();
    for v in &rows {
        assert_eq!(v.len(), dim, "vector length differs from ambient rank");
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..dim {
        loop {
            let mut best: Option<usize> = None;
            for i in r..rows.len() {
                let x = &rows[i][col];
                if !x.is_zero() && best.is_none_or(|b| x.abs() < rows[b][col].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            rows.swap(r, b);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = rows[i][col].div_floor(&rows[r][col]);
                let (head, tail) = rows.split_at_mut(i);
                sub_multiple(&mut tail[0], &head[r], &q);
                if !rows[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < rows.len() && !rows[r][col].is_zero() {
            if rows[r][col].is_negative() {
                for x in rows[r].iter_mut() {
                    *x = -std::mem::take(x);
                }
            }
            for i in 0..r {
                let q = rows[i][col].div_floor(&rows[r][col]);
                if !q.is_zero() {
                    let (head, tail) = rows.split_at_mut(r);
                    sub_multiple(&mut head[i], &tail[0], &q);
                }
            }
            pivots.push(col);
            r += 1;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

fn sub_multiple(target: &mut [BigInt], src: &[BigInt], q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for (t, s) in target.iter_mut().zip(src) {
        if !s.is_zero() {
            *t -= s * q;
        }
    }
}

/// Reduces `v` modulo a lattice given in Hermite form.
pub fn reduce_modulo(v: &mut [BigInt], hermite: &[IntVector], pivots: &[usize]) {
    for (row, &col) in hermite.iter().zip(pivots) {
        let q = v[col].div_floor(&row[col]);
        sub_multiple(v, row, &q);
    }
}

/// Whether the lattice spanned by `a` equals the one spanned by `b`.
pub fn same_lattice(dim: usize, a: &[IntVector], b: &[IntVector]) -> bool {
    hermite_rows(dim, a) == hermite_rows(dim, b)
}

/// One cyclic summand of a finitely generated abelian group.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    /// `Z / m Z` with `m >= 2`.
    Torsion(BigInt),
    Free,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Free => write!(f, "Z"),
            Component::Torsion(m) => write!(f, "Z/{m}Z"),
        }
    }
}

/// A subquotient `N / D` of a free module in basis-divisors form: `D` is
/// spanned by `divisors[i] * numerator[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    pub ambient_rank: usize,
    pub numerator: Vec<IntVector>,
    pub divisors: Vec<BigInt>,
}

impl GroupPresentation {
    pub fn trivial(ambient_rank: usize) -> Self {
        GroupPresentation { ambient_rank, numerator: Vec::new(), divisors: Vec::new() }
    }

    /// Canonical components: torsion in divisibility order, then free ones.
    pub fn invariant_factors(&self) -> Vec<Component> {
        let mut torsion: Vec<BigInt> = Vec::new();
        let mut free = 0;
        for d in &self.divisors {
            if d.is_zero() {
                free += 1;
            } else if !d.is_one() {
                torsion.push(d.clone());
            }
        }
        torsion.sort();
        torsion.into_iter().map(Component::Torsion).chain(std::iter::repeat_n(Component::Free, free)).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.divisors.iter().all(One::is_one)
    }

    /// Indices of generators that survive in the quotient (divisor != 1).
    pub fn live_generators(&self) -> Vec<usize> {
        (0..self.divisors.len()).filter(|&i| !self.divisors[i].is_one()).collect()
    }

    /// Generators of the denominator lattice, `divisors[i] * numerator[i]`.
    pub fn denominator(&self) -> Vec<IntVector> {
        self.numerator
            .iter()
            .zip(&self.divisors)
            .filter(|(_, d)| !d.is_zero())
            .map(|(v, d)| v.iter().map(|x| x * d).collect())
            .collect()
    }

    /// Coordinates of a numerator element with respect to the generators,
    /// reduced to the live generators (torsion coordinates taken modulo the
    /// divisor). `None` when `v` is outside the numerator lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Result<Option<IntVector>> {
        if self.numerator.is_empty() {
            return Ok(if v.iter().all(Zero::is_zero) { Some(Vec::new()) } else { None });
        }
        let m = IntMatrix::from_columns(self.ambient_rank, &self.numerator);
        let Some(x) = solve_in_lattice(&m, v)? else { return Ok(None) };
        Ok(Some(
            self.live_generators()
                .into_iter()
                .map(|i| {
                    let d = &self.divisors[i];
                    if d.is_zero() {
                        x[i].clone()
                    } else {
                        x[i].mod_floor(d)
                    }
                })
                .collect(),
        ))
    }

    /// Chain-level representative of the class with the given coordinates on
    /// the live generators.
    pub fn lift(&self, coords: &[BigInt]) -> Result<IntVector> {
        let live = self.live_generators();
        if coords.len() != live.len() {
            return Err(Error::Arity { expected: live.len(), found: coords.len() });
        }
        let mut out = vec![BigInt::zero(); self.ambient_rank];
        for (c, &i) in coords.iter().zip(&live) {
            for (o, x) in out.iter_mut().zip(&self.numerator[i]) {
                *o += c * x;
            }
        }
        Ok(out)
    }
}

/// Presentation of `span(numerator) / span(denominator)` in basis-divisors
/// form. The denominator must lie inside the numerator.
pub fn subquotient(
    ambient_rank: usize,
    numerator: &[IntVector],
    denominator: &[IntVector],
) -> Result<GroupPresentation> {
    let (basis, _) = hermite_rows(ambient_rank, numerator);
    let k = basis.len();
    let den: Vec<&IntVector> = denominator.iter().filter(|v| v.iter().any(|x| !x.is_zero())).collect();
    if k == 0 {
        if !den.is_empty() {
            return Err(Error::NotContained);
        }
        return Ok(GroupPresentation::trivial(ambient_rank));
    }
    let b = IntMatrix::from_columns(ambient_rank, &basis);
    let solver = LatticeSolver::new(&b);
    let mut coords = Vec::with_capacity(den.len());
    for v in den {
        match solver.solve(v)? {
            Some(c) => coords.push(c),
            None => return Err(Error::NotContained),
        }
    }
    let dc = IntMatrix::from_columns(k, &coords);
    let snf = smith_normal_form(&dc);
    let adapted = b.mul(&snf.p_inv);
    let diag = snf.diagonal();
    let divisors: Vec<BigInt> = (0..k).map(|i| diag.get(i).cloned().unwrap_or_else(BigInt::zero)).collect();
    let mut gens: Vec<IntVector> = (0..k).map(|j| adapted.column(j)).collect();

    // Shorten surviving generators modulo the collapsed part of the denominator.
    let collapsed: Vec<IntVector> =
        gens.iter().zip(&divisors).filter(|(_, d)| d.is_one()).map(|(g, _)| g.clone()).collect();
    let (h, piv) = hermite_rows(ambient_rank, &collapsed);
    for (g, d) in gens.iter_mut().zip(&divisors) {
        if !d.is_one() {
            reduce_modulo(g, &h, &piv);
        }
        if g.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_negative) {
            for x in g.iter_mut() {
                *x = -std::mem::take(x);
            }
        }
    }
    Ok(GroupPresentation { ambient_rank, numerator: gens, divisors })
}

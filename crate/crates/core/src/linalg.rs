//! Exact linear algebra over `Q` and over the parameter field.
//!
//! [`Echelon`] keeps a sparse matrix in reduced row echelon form and accepts
//! rows one at a time, which is how the fitting code realizes its priority
//! order: a row that contradicts the rows already accepted is reported back
//! instead of being absorbed.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::param::ParamScalar;
use crate::Rational;

pub trait Field: Clone + PartialEq + core::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
}

impl Field for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
}

impl Field for ParamScalar {
    fn zero() -> Self {
        ParamScalar::zero()
    }
    fn one() -> Self {
        ParamScalar::one()
    }
    fn is_zero(&self) -> bool {
        ParamScalar::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        ParamScalar::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        ParamScalar::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        ParamScalar::mul(self, o)
    }
    fn neg(&self) -> Self {
        ParamScalar::neg(self)
    }
    fn inv(&self) -> Option<Self> {
        ParamScalar::inv(self)
    }
}

pub type SparseRow<F> = BTreeMap<usize, F>;

#[derive(Clone, Debug)]
struct PivotRow<F> {
    coeffs: SparseRow<F>,
    rhs: Vec<F>,
}

/// Outcome of [`Echelon::push`].
#[derive(Clone, Debug, PartialEq)]
pub enum Push<F> {
    /// The row was independent and now owns this pivot column.
    Pivot(usize),
    /// The row lies in the span of earlier rows; this is its reduced
    /// right-hand side (all zero means consistent).
    Dependent(Vec<F>),
}

/// Incremental reduced row echelon form with several right-hand sides.
#[derive(Clone, Debug)]
pub struct Echelon<F> {
    ncols: usize,
    nrhs: usize,
    pivots: BTreeMap<usize, PivotRow<F>>,
}

fn axpy<F: Field>(dst: &mut SparseRow<F>, k: &F, src: &SparseRow<F>) {
    for (&c, v) in src {
        let t = k.mul(v);
        match dst.get_mut(&c) {
            Some(d) => {
                *d = d.add(&t);
                if d.is_zero() {
                    dst.remove(&c);
                }
            }
            None => {
                if !t.is_zero() {
                    dst.insert(c, t);
                }
            }
        }
    }
}

impl<F: Field> Echelon<F> {
    pub fn new(ncols: usize, nrhs: usize) -> Self {
        Echelon { ncols, nrhs, pivots: BTreeMap::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    /// Reduces `row` against the pivots without inserting it.
    pub fn reduce(&self, mut coeffs: SparseRow<F>, mut rhs: Vec<F>) -> (SparseRow<F>, Vec<F>) {
        assert_eq!(rhs.len(), self.nrhs);
        coeffs.retain(|_, v| !v.is_zero());
        for (&c, p) in &self.pivots {
            if let Some(v) = coeffs.get(&c).cloned() {
                let k = v.neg();
                axpy(&mut coeffs, &k, &p.coeffs);
                for (r, pr) in rhs.iter_mut().zip(&p.rhs) {
                    *r = r.add(&k.mul(pr));
                }
            }
        }
        (coeffs, rhs)
    }

    pub fn push(&mut self, coeffs: SparseRow<F>, rhs: Vec<F>) -> Push<F> {
        let (coeffs, rhs) = self.reduce(coeffs, rhs);
        let Some((&col, lead)) = coeffs.iter().next() else {
            return Push::Dependent(rhs);
        };
        let inv = lead.inv().expect("nonzero lead");
        let coeffs: SparseRow<F> = coeffs.iter().map(|(&c, v)| (c, v.mul(&inv))).collect();
        let rhs: Vec<F> = rhs.iter().map(|v| v.mul(&inv)).collect();
        for p in self.pivots.values_mut() {
            if let Some(v) = p.coeffs.get(&col).cloned() {
                let k = v.neg();
                axpy(&mut p.coeffs, &k, &coeffs);
                for (r, nr) in p.rhs.iter_mut().zip(&rhs) {
                    *r = r.add(&k.mul(nr));
                }
            }
        }
        self.pivots.insert(col, PivotRow { coeffs, rhs });
        Push::Pivot(col)
    }

    /// Particular solution with every free variable set to zero, one vector
    /// per right-hand side.
    pub fn solution(&self) -> Vec<Vec<F>> {
        (0..self.nrhs)
            .map(|k| {
                let mut x = vec![F::zero(); self.ncols];
                for (&c, p) in &self.pivots {
                    x[c] = p.rhs[k].clone();
                }
                x
            })
            .collect()
    }

    /// Basis of the null space, one vector per free column (ascending).
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let mut out = Vec::new();
        for f in 0..self.ncols {
            if self.pivots.contains_key(&f) {
                continue;
            }
            let mut v = vec![F::zero(); self.ncols];
            v[f] = F::one();
            for (&c, p) in &self.pivots {
                if let Some(a) = p.coeffs.get(&f) {
                    v[c] = a.neg();
                }
            }
            out.push(v);
        }
        out
    }
}

fn support<F: Field>(v: &[F]) -> usize {
    v.iter().filter(|x| !x.is_zero()).count()
}

/// Greedy support reduction of `x` along null-space directions; a step is
/// taken only when it strictly shrinks the support.
pub fn sparsify<F: Field>(x: &[F], kernel: &[Vec<F>]) -> Vec<F> {
    let mut x = x.to_vec();
    loop {
        let mut best: Option<(usize, Vec<F>)> = None;
        let cur = support(&x);
        for k in kernel {
            for (j, kj) in k.iter().enumerate() {
                if kj.is_zero() || x[j].is_zero() {
                    continue;
                }
                let t = x[j].mul(&kj.inv().unwrap());
                let y: Vec<F> = x.iter().zip(k).map(|(a, b)| a.sub(&t.mul(b))).collect();
                let s = support(&y);
                if s < cur && best.as_ref().is_none_or(|(bs, _)| s < *bs) {
                    best = Some((s, y));
                }
            }
        }
        match best {
            Some((_, y)) => x = y,
            None => return x,
        }
    }
}

/// Status of one input row after [`solve_prioritized`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowStatus {
    Pivot,
    Redundant,
    Conflict,
}

#[derive(Clone, Debug)]
pub struct PrioritizedSolution {
    pub x: Vec<ParamScalar>,
    pub status: Vec<RowStatus>,
    pub rank: usize,
}

/// Accepts rows in the given order, skipping any row that contradicts the
/// rows accepted before it, and returns a sparse solution of the accepted
/// system.
///
/// When the matrix is rational the right-hand sides are split into
/// parameter atoms and solved column by column over `Q`, which lets each
/// atom's solution be sparsified independently.
pub fn solve_prioritized(rows: &[(SparseRow<ParamScalar>, ParamScalar)], ncols: usize) -> PrioritizedSolution {
    let rational: Option<Vec<SparseRow<Rational>>> = rows
        .iter()
        .map(|(r, _)| r.iter().map(|(&c, v)| v.as_rational().map(|q| (c, q))).collect())
        .collect();
    if let Some(rm) = rational {
        if let Some(sol) = solve_by_atoms(&rm, rows, ncols) {
            return sol;
        }
    }
    solve_generic(rows, ncols)
}

fn solve_by_atoms(
    m: &[SparseRow<Rational>],
    rows: &[(SparseRow<ParamScalar>, ParamScalar)],
    ncols: usize,
) -> Option<PrioritizedSolution> {
    let mut atoms: Vec<ParamScalar> = Vec::new();
    let mut index: BTreeMap<ParamScalar, usize> = BTreeMap::new();
    let mut split: Vec<Vec<(usize, Rational)>> = Vec::with_capacity(rows.len());
    for (_, b) in rows {
        let mut parts = Vec::new();
        for (atom, w) in b.atoms() {
            let k = *index.entry(atom.clone()).or_insert_with(|| {
                atoms.push(atom);
                atoms.len() - 1
            });
            parts.push((k, w));
        }
        split.push(parts);
    }
    let na = atoms.len();
    let mut ech: Echelon<Rational> = Echelon::new(ncols, na);
    let mut status = Vec::with_capacity(rows.len());
    for (row, parts) in m.iter().zip(&split) {
        let mut rhs = vec![<Rational as Zero>::zero(); na];
        for (k, w) in parts {
            rhs[*k] += w;
        }
        let (reduced, rrhs) = ech.reduce(row.clone(), rhs.clone());
        if !reduced.is_empty() {
            ech.push(row.clone(), rhs);
            status.push(RowStatus::Pivot);
            continue;
        }
        let beta = rrhs
            .iter()
            .zip(&atoms)
            .fold(ParamScalar::zero(), |acc, (w, a)| acc.add(&a.scale(w)));
        let all_zero = rrhs.iter().all(|w| Zero::is_zero(w));
        if !beta.is_zero() {
            status.push(RowStatus::Conflict);
        } else if all_zero {
            status.push(RowStatus::Redundant);
        } else {
            return None;
        }
    }
    let kernel = ech.kernel();
    let mut x = vec![ParamScalar::zero(); ncols];
    for (sol, atom) in ech.solution().into_iter().zip(&atoms) {
        let s = sparsify(&sol, &kernel);
        for (xi, si) in x.iter_mut().zip(&s) {
            if !Zero::is_zero(si) {
                *xi = xi.add(&atom.scale(si));
            }
        }
    }
    Some(PrioritizedSolution { x, status, rank: ech.rank() })
}

fn solve_generic(rows: &[(SparseRow<ParamScalar>, ParamScalar)], ncols: usize) -> PrioritizedSolution {
    let mut ech: Echelon<ParamScalar> = Echelon::new(ncols, 1);
    let mut status = Vec::with_capacity(rows.len());
    for (row, b) in rows {
        match ech.push(row.clone(), vec![b.clone()]) {
            Push::Pivot(_) => status.push(RowStatus::Pivot),
            Push::Dependent(r) if r[0].is_zero() => status.push(RowStatus::Redundant),
            Push::Dependent(_) => status.push(RowStatus::Conflict),
        }
    }
    let kernel = ech.kernel();
    let x = sparsify(&ech.solution().remove(0), &kernel);
    PrioritizedSolution { x, status, rank: ech.rank() }
}

/// Determinant by Gaussian elimination.
pub fn determinant<F: Field>(m: &[Vec<F>]) -> F {
    let n = m.len();
    let mut a: Vec<Vec<F>> = m.to_vec();
    let mut det = F::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return F::zero();
        };
        if p != c {
            a.swap(p, c);
            det = det.neg();
        }
        det = det.mul(&a[c][c]);
        let inv = a[c][c].inv().unwrap();
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let k = a[r][c].mul(&inv);
            for j in c..n {
                let t = k.mul(&a[c][j]);
                a[r][j] = a[r][j].sub(&t);
            }
        }
    }
    det
}

/// Rank of a dense matrix.
pub fn rank<F: Field>(m: &[Vec<F>]) -> usize {
    let ncols = m.first().map_or(0, |r| r.len());
    let mut e: Echelon<F> = Echelon::new(ncols, 0);
    for row in m {
        let sparse: SparseRow<F> = row.iter().cloned().enumerate().filter(|(_, v)| !v.is_zero()).collect();
        e.push(sparse, Vec::new());
    }
    e.rank()
}

/// Solves the square system `m x = b`; `None` if `m` is singular.
pub fn solve_square<F: Field>(m: &[Vec<F>], b: &[F]) -> Option<Vec<F>> {
    let n = m.len();
    let mut e: Echelon<F> = Echelon::new(n, 1);
    for (row, bi) in m.iter().zip(b) {
        let sparse: SparseRow<F> = row.iter().cloned().enumerate().filter(|(_, v)| !v.is_zero()).collect();
        e.push(sparse, vec![bi.clone()]);
    }
    (e.rank() == n).then(|| e.solution().remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn row(entries: &[(usize, i64)]) -> SparseRow<Rational> {
        entries.iter().map(|&(c, v)| (c, q(v))).collect()
    }

    #[test]
    fn echelon_solves_and_detects_conflict() {
        let mut e = Echelon::new(2, 1);
        assert_eq!(e.push(row(&[(0, 1), (1, 1)]), vec![q(3)]), Push::Pivot(0));
        assert_eq!(e.push(row(&[(0, 1), (1, -1)]), vec![q(1)]), Push::Pivot(1));
        assert_eq!(e.solution(), vec![vec![q(2), q(1)]]);
        assert_eq!(e.push(row(&[(0, 2), (1, 2)]), vec![q(6)]), Push::Dependent(vec![q(0)]));
        assert_eq!(e.push(row(&[(0, 2), (1, 2)]), vec![q(7)]), Push::Dependent(vec![q(1)]));
    }

    #[test]
    fn kernel_annihilates() {
        let mut e: Echelon<Rational> = Echelon::new(3, 0);
        e.push(row(&[(0, 1), (1, 2), (2, 3)]), Vec::new());
        let k = e.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(&v[0] + q(2) * &v[1] + q(3) * &v[2], q(0));
        }
    }

    #[test]
    fn sparsify_reduces_support() {
        // x = (1, 1) with kernel (1, 1): best is (0, 0).
        let s = sparsify(&[q(1), q(1)], &[vec![q(1), q(1)]]);
        assert_eq!(s, vec![q(0), q(0)]);
        let s = sparsify(&[q(1), q(2)], &[vec![q(1), q(1)]]);
        assert_eq!(support(&s), 1);
    }

    #[test]
    fn prioritized_skips_conflicting_row() {
        let o = ParamScalar::one;
        let rows = vec![
            (BTreeMap::from([(0, o())]), ParamScalar::zero()),
            (BTreeMap::from([(0, o())]), ParamScalar::param(0)),
            (BTreeMap::from([(1, o())]), ParamScalar::param(0)),
        ];
        let s = solve_prioritized(&rows, 2);
        assert_eq!(s.status, vec![RowStatus::Pivot, RowStatus::Conflict, RowStatus::Pivot]);
        assert_eq!(s.x, vec![ParamScalar::zero(), ParamScalar::param(0)]);
    }

    #[test]
    fn determinant_and_rank() {
        let m = vec![vec![q(0), q(1)], vec![q(-1), q(0)]];
        assert_eq!(determinant(&m), q(1));
        let skew3 = vec![vec![q(0), q(-3), q(2)], vec![q(3), q(0), q(-1)], vec![q(-2), q(1), q(0)]];
        assert_eq!(determinant(&skew3), q(0));
        assert_eq!(rank(&skew3), 2);
        assert_eq!(solve_square(&m, &[q(1), q(2)]), Some(vec![q(-2), q(1)]));
    }
}

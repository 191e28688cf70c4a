//! Multivariate polynomials in state variables with `ParamScalar` coefficients,
//! plus vectors and matrices of them and the calculus used by the decomposer.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, Zero};

use crate::param::{ParamEvalError, ParamScalar};
use crate::Rational;

/// Total degree supported by the kernel unless configured otherwise.
pub const DEFAULT_DEGREE_CAP: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("one-form is not closed")]
    NotClosed,
    #[error("degree {degree} exceeds the kernel cap {cap}")]
    DegreeCap { degree: u32, cap: u32 },
    #[error("parameter #{0} is unbound")]
    Unbound(usize),
    #[error("denominator vanishes at the binding")]
    VanishingDenominator,
    #[error("shape mismatch: {0}")]
    Shape(&'static str),
}

impl From<ParamEvalError> for KernelError {
    fn from(e: ParamEvalError) -> Self {
        match e {
            ParamEvalError::Unbound(i) => KernelError::Unbound(i),
            ParamEvalError::VanishingDenominator => KernelError::VanishingDenominator,
        }
    }
}

/// Exponent vector, one entry per ambient variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, o: &Self) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i)
    }

    pub(crate) fn with_exp(&self, i: usize, e: u32) -> Self {
        let mut m = self.clone();
        m.0[i] = e;
        m
    }

    /// All monomials in `nvars` variables with total degree in `lo..=hi`,
    /// ascending in graded lex order.
    pub fn all_up_to(nvars: usize, lo: u32, hi: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        for d in lo..=hi {
            let mut level = Vec::new();
            compositions(nvars, d, &mut vec![0; nvars], 0, &mut level);
            level.sort();
            out.extend(level);
        }
        out
    }
}

fn compositions(n: usize, left: u32, cur: &mut Vec<u32>, pos: usize, out: &mut Vec<Monomial>) {
    if n == 0 {
        if left == 0 {
            out.push(Monomial(Vec::new()));
        }
        return;
    }
    if pos == n - 1 {
        cur[pos] = left;
        out.push(Monomial(cur.clone()));
        cur[pos] = 0;
        return;
    }
    for e in 0..=left {
        cur[pos] = e;
        compositions(n, left - e, cur, pos + 1, out);
    }
    cur[pos] = 0;
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial; terms iterate ascending in graded lex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, ParamScalar>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: ParamScalar) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::term(Monomial::var(nvars, i), ParamScalar::one())
    }

    pub fn term(m: Monomial, c: ParamScalar) -> Self {
        let mut p = Polynomial::zero(m.nvars());
        p.add_term(m, c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, ParamScalar)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial arity");
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
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

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &ParamScalar)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    pub fn coeff(&self, m: &Monomial) -> ParamScalar {
        self.terms.get(m).cloned().unwrap_or_else(ParamScalar::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: ParamScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = v.add(&c);
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Each term as its own polynomial, ascending.
    pub fn split(&self) -> Vec<Polynomial> {
        self.terms.iter().map(|(m, c)| Polynomial::term(m.clone(), c.clone())).collect()
    }

    pub fn as_constant(&self) -> Option<ParamScalar> {
        match self.terms.len() {
            0 => Some(ParamScalar::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    /// Highest total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().next_back().map_or(0, |m| m.degree())
    }

    /// Lowest total degree among nonzero terms.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).min()
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(i)).max().unwrap_or(0)
    }

    /// Variables that occur with positive exponent.
    pub fn support(&self) -> BTreeSet<usize> {
        self.terms.keys().flat_map(|m| m.support()).collect()
    }

    /// Highest parameter index referenced plus one.
    pub fn param_width(&self) -> usize {
        self.terms.values().map(|c| c.width()).max().unwrap_or(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.nvars, o.nvars);
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        debug_assert_eq!(self.nvars, o.nvars);
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.neg());
        }
        r
    }

    pub fn neg(&self) -> Self {
        Polynomial { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }

    pub fn scale(&self, k: &ParamScalar) -> Self {
        if k.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), c.mul(k))).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.nvars, o.nvars);
        let mut r = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                r.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        r
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::constant(self.nvars, ParamScalar::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact partial derivative with respect to variable `i`.
    pub fn diff(&self, i: usize) -> Result<Self, KernelError> {
        if i >= self.nvars {
            return Err(KernelError::IndexOutOfRange { index: i, nvars: self.nvars });
        }
        let mut r = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exp(i);
            if e > 0 {
                r.add_term(m.with_exp(i, e - 1), c.scale(&Rational::from_integer(e.into())));
            }
        }
        Ok(r)
    }

    /// Value at `point` with parameters bound by index.
    pub fn evaluate(&self, point: &[Rational], params: &[Option<Rational>]) -> Result<Rational, KernelError> {
        if point.len() != self.nvars {
            return Err(KernelError::Shape("point length differs from variable count"));
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.evaluate(params)?;
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Substitute parameters by rational values, leaving a numeric polynomial.
    pub fn bind_params(&self, params: &[Option<Rational>]) -> Result<Self, KernelError> {
        let mut r = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            r.add_term(m.clone(), ParamScalar::from_rational(c.evaluate(params)?));
        }
        Ok(r)
    }

    /// Re-index into an ambient of `nvars` variables; `map[i]` is the new
    /// index of old variable `i`. Panics if a used variable has no image.
    pub fn remap(&self, nvars: usize, map: &[Option<usize>]) -> Self {
        let mut r = Self::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0; nvars];
            for (i, &x) in m.exponents().iter().enumerate() {
                if x > 0 {
                    let j = map[i].expect("variable has no image under remap");
                    e[j] += x;
                }
            }
            r.add_term(Monomial(e), c.clone());
        }
        r
    }

    /// Replace variable `i` by the polynomial `q` (same ambient).
    pub fn substitute(&self, i: usize, q: &Polynomial) -> Self {
        let mut r = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exp(i);
            let rest = Polynomial::term(m.with_exp(i, 0), c.clone());
            if e == 0 {
                r = r.add(&rest);
            } else {
                r = r.add(&rest.mul(&q.pow(e)));
            }
        }
        r
    }

    pub fn map_coeffs(&self, f: impl Fn(&ParamScalar) -> ParamScalar) -> Self {
        let mut r = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            r.add_term(m.clone(), f(c));
        }
        r
    }

    pub fn is_numeric(&self) -> bool {
        self.terms.values().all(|c| c.is_rational())
    }
}

/// Fixed-length vector of polynomials over a common ambient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyVector {
    nvars: usize,
    entries: Vec<Polynomial>,
}

impl PolyVector {
    pub fn zeros(nvars: usize, len: usize) -> Self {
        PolyVector { nvars, entries: vec![Polynomial::zero(nvars); len] }
    }

    pub fn new(nvars: usize, entries: Vec<Polynomial>) -> Self {
        assert!(entries.iter().all(|p| p.nvars() == nvars), "entry arity");
        PolyVector { nvars, entries }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> &Polynomial {
        &self.entries[i]
    }

    pub fn set(&mut self, i: usize, p: Polynomial) {
        assert_eq!(p.nvars(), self.nvars);
        self.entries[i] = p;
    }

    pub fn entries(&self) -> &[Polynomial] {
        &self.entries
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Polynomial> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.len(), o.len());
        PolyVector { nvars: self.nvars, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.len(), o.len());
        PolyVector { nvars: self.nvars, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn neg(&self) -> Self {
        PolyVector { nvars: self.nvars, entries: self.entries.iter().map(|a| a.neg()).collect() }
    }

    /// Number of (entry, monomial) pairs with nonzero coefficient.
    pub fn monomial_count(&self) -> usize {
        self.entries.iter().map(|p| p.len()).sum()
    }

    pub fn degree(&self) -> u32 {
        self.entries.iter().map(|p| p.degree()).max().unwrap_or(0)
    }

    pub fn dot(&self, o: &Self) -> Polynomial {
        assert_eq!(self.len(), o.len());
        self.entries
            .iter()
            .zip(&o.entries)
            .fold(Polynomial::zero(self.nvars), |acc, (a, b)| acc.add(&a.mul(b)))
    }

    pub fn remap(&self, nvars: usize, map: &[Option<usize>]) -> Self {
        PolyVector { nvars, entries: self.entries.iter().map(|p| p.remap(nvars, map)).collect() }
    }
}

/// Row-major matrix of polynomials over a common ambient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyMatrix {
    nvars: usize,
    rows: usize,
    cols: usize,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn zeros(nvars: usize, rows: usize, cols: usize) -> Self {
        PolyMatrix { nvars, rows, cols, entries: vec![Polynomial::zero(nvars); rows * cols] }
    }

    pub fn from_rows(nvars: usize, rows: Vec<Vec<Polynomial>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        let entries: Vec<Polynomial> = rows.into_iter().flatten().collect();
        assert!(entries.iter().all(|p| p.nvars() == nvars), "entry arity");
        PolyMatrix { nvars, rows: r, cols: c, entries }
    }

    /// Constant matrix from scalars.
    pub fn from_scalars(nvars: usize, rows: &[Vec<ParamScalar>]) -> Self {
        PolyMatrix::from_rows(
            nvars,
            rows.iter()
                .map(|row| row.iter().map(|c| Polynomial::constant(nvars, c.clone())).collect())
                .collect(),
        )
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        assert_eq!(p.nvars(), self.nvars);
        self.entries[i * self.cols + j] = p;
    }

    pub fn entries(&self) -> &[Polynomial] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }

    pub fn is_skew(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i..self.cols).all(|j| self.get(i, j).add(self.get(j, i)).is_zero()))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(|p| p.is_constant())
    }

    pub fn transpose(&self) -> Self {
        let mut t = PolyMatrix::zeros(self.nvars, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        PolyMatrix {
            nvars: self.nvars,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn mul_vec(&self, v: &PolyVector) -> Result<PolyVector, KernelError> {
        if v.len() != self.cols {
            return Err(KernelError::Shape("matrix columns differ from vector length"));
        }
        let entries = (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Polynomial::zero(self.nvars), |acc, j| acc.add(&self.get(i, j).mul(v.get(j))))
            })
            .collect();
        Ok(PolyVector { nvars: self.nvars, entries })
    }

    /// Lowest total degree among nonzero entries.
    pub fn min_entry_degree(&self) -> Option<u32> {
        self.entries.iter().filter_map(|p| p.min_degree()).min()
    }

    pub fn remap(&self, nvars: usize, map: &[Option<usize>]) -> Self {
        PolyMatrix {
            nvars,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|p| p.remap(nvars, map)).collect(),
        }
    }

    /// Entries as scalars if the matrix is constant.
    pub fn as_scalars(&self) -> Option<Vec<Vec<ParamScalar>>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).as_constant()).collect())
            .collect()
    }
}

/// Vector of partial derivatives.
pub fn gradient(h: &Polynomial) -> PolyVector {
    let n = h.nvars();
    PolyVector { nvars: n, entries: (0..n).map(|i| h.diff(i).expect("index in range")).collect() }
}

/// Symmetry of the Jacobian of `g`: whether `g` is a closed one-form.
pub fn is_closed(g: &PolyVector) -> bool {
    let n = g.len();
    if n > g.nvars() {
        return false;
    }
    (0..n).all(|i| {
        (i + 1..n).all(|j| g.get(i).diff(j).expect("in range") == g.get(j).diff(i).expect("in range"))
    })
}

/// Potential of a closed one-form vanishing at the origin.
///
/// Each term `c x^α` of `g_i` contributes `c/(|α|+1) x_i x^α`.
pub fn homotopy_integrate(g: &PolyVector) -> Result<Polynomial, KernelError> {
    if g.len() != g.nvars() {
        return Err(KernelError::Shape("one-form needs one component per variable"));
    }
    if !is_closed(g) {
        return Err(KernelError::NotClosed);
    }
    let n = g.nvars();
    let mut h = Polynomial::zero(n);
    for (i, gi) in g.iter().enumerate() {
        for (m, c) in gi.terms() {
            let k = Rational::new(One::one(), (m.degree() + 1).into());
            h.add_term(m.mul(&Monomial::var(n, i)), c.scale(&k));
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    fn q(a: i64, b: i64) -> ParamScalar {
        ParamScalar::ratio(a, b)
    }

    #[test]
    fn grlex_order() {
        let a = Monomial::new(vec![2, 0]);
        let b = Monomial::new(vec![1, 1]);
        let c = Monomial::new(vec![0, 3]);
        assert!(a > b);
        assert!(c > a);
        assert!(Monomial::new(vec![1, 0]) > Monomial::new(vec![0, 1]));
        let all = Monomial::all_up_to(2, 1, 2);
        assert_eq!(all.len(), 5);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn oscillator_hamiltonian_derivative() {
        let h = x(2, 0).mul(&x(2, 0)).add(&x(2, 1).mul(&x(2, 1))).scale(&q(1, 2));
        assert_eq!(h.diff(0).unwrap(), x(2, 0));
        assert!(matches!(h.diff(2), Err(KernelError::IndexOutOfRange { .. })));
        assert!(Polynomial::constant(2, q(3, 1)).diff(1).unwrap().is_zero());
    }

    #[test]
    fn rigid_body_kinetic_term() {
        let inv = ParamScalar::param(0).inv().unwrap();
        let h = x(3, 0).pow(2).scale(&inv.scale(&Rational::new(1.into(), 2.into())));
        assert_eq!(h.diff(0).unwrap(), x(3, 0).scale(&inv));
    }

    #[test]
    fn closedness() {
        assert!(is_closed(&PolyVector::new(2, vec![x(2, 0), x(2, 1)])));
        assert!(!is_closed(&PolyVector::new(2, vec![x(2, 1), x(2, 0).neg()])));
        assert!(is_closed(&PolyVector::new(2, vec![x(2, 1), x(2, 0)])));
    }

    #[test]
    fn homotopy_examples() {
        let g = PolyVector::new(2, vec![x(2, 0), x(2, 1)]);
        let h = homotopy_integrate(&g).unwrap();
        assert_eq!(h, x(2, 0).pow(2).add(&x(2, 1).pow(2)).scale(&q(1, 2)));
        let ones = PolyVector::new(3, vec![Polynomial::constant(3, q(1, 1)); 3]);
        assert_eq!(homotopy_integrate(&ones).unwrap(), x(3, 0).add(&x(3, 1)).add(&x(3, 2)));
        let rot = PolyVector::new(2, vec![x(2, 1), x(2, 0).neg()]);
        assert_eq!(homotopy_integrate(&rot), Err(KernelError::NotClosed));
    }

    #[test]
    fn evaluation() {
        let h = x(2, 0).pow(2).add(&x(2, 1).pow(2)).scale(&q(1, 2));
        let pt = [Rational::from_integer(3.into()), Rational::from_integer(4.into())];
        assert_eq!(h.evaluate(&pt, &[]).unwrap(), Rational::new(25.into(), 2.into()));
        let f = x(1, 0).scale(&ParamScalar::param(0).inv().unwrap());
        let one = [Rational::one()];
        assert_eq!(f.evaluate(&one, &[Some(Rational::from_integer(2.into()))]).unwrap(), Rational::new(1.into(), 2.into()));
        assert_eq!(f.evaluate(&one, &[Some(Rational::zero())]), Err(KernelError::VanishingDenominator));
    }

    #[test]
    fn gradient_of_product() {
        let g = gradient(&x(2, 0).mul(&x(2, 1)));
        assert_eq!(g, PolyVector::new(2, vec![x(2, 1), x(2, 0)]));
        assert!(gradient(&Polynomial::zero(3)).is_zero());
    }

    #[test]
    fn substitute_and_remap() {
        let p = x(2, 0).pow(2);
        let s = p.substitute(0, &x(2, 0).add(&x(2, 1)));
        assert_eq!(s, x(2, 0).pow(2).add(&x(2, 0).mul(&x(2, 1)).scale(&q(2, 1))).add(&x(2, 1).pow(2)));
        let r = x(2, 1).remap(3, &[Some(0), Some(2)]);
        assert_eq!(r, x(3, 2));
    }
}

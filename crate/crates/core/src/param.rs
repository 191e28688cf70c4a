//! Coefficient field: rational functions in named parameters.
//!
//! `ParamPoly` is a sparse polynomial in parameter symbols with rational
//! coefficients. `ParamScalar` is a reduced fraction of two of them, which
//! makes the coefficient domain a field. Values are kept canonical so that
//! structural equality coincides with equality as rational functions.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::Rational;

/// Exponent vector over parameter symbols. Trailing zeros are trimmed so that
/// monomials compare equal regardless of how many parameters exist.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ParamMonomial(Vec<u32>);

impl ParamMonomial {
    pub fn one() -> Self {
        ParamMonomial(Vec::new())
    }

    pub fn var(index: usize) -> Self {
        let mut e = vec![0; index + 1];
        e[index] = 1;
        ParamMonomial(e)
    }

    pub fn from_exponents(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        ParamMonomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exp(&self, index: usize) -> u32 {
        self.0.get(index).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        ParamMonomial::from_exponents((0..n).map(|i| self.exp(i) + other.exp(i)).collect())
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().enumerate().all(|(i, &e)| e <= other.exp(i))
    }

    /// `other / self`; caller guarantees divisibility.
    fn quotient_of(&self, other: &Self) -> Self {
        let n = other.0.len();
        ParamMonomial::from_exponents((0..n).map(|i| other.exp(i) - self.exp(i)).collect())
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let n = self.0.len().min(other.0.len());
        ParamMonomial::from_exponents((0..n).map(|i| self.exp(i).min(other.exp(i))).collect())
    }
}

impl Ord for ParamMonomial {
    // Graded lexicographic, parameter 0 most significant.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.0.len().max(other.0.len());
            for i in 0..n {
                match self.exp(i).cmp(&other.exp(i)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for ParamMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in parameter symbols over the rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ParamPoly {
    terms: BTreeMap<ParamMonomial, Rational>,
}

impl ParamPoly {
    pub fn zero() -> Self {
        ParamPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(ParamMonomial::one(), c);
        p
    }

    pub fn var(index: usize) -> Self {
        Self::monomial(ParamMonomial::var(index), Rational::one())
    }

    pub fn monomial(m: ParamMonomial, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ParamMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if this polynomial has no parameter dependence.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    fn add_term(&mut self, m: ParamMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Largest term under graded lex order.
    pub fn leading(&self) -> Option<(&ParamMonomial, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Highest parameter index referenced plus one.
    pub fn width(&self) -> usize {
        self.terms.keys().map(|m| m.0.len()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn mentions(&self, v: usize) -> bool {
        self.terms.keys().any(|m| m.exp(v) > 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), -c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        ParamPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        ParamPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn mul_monomial(&self, m: &ParamMonomial, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        ParamPoly { terms: self.terms.iter().map(|(a, c)| (a.mul(m), c * k)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut r = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                r.add_term(ma.mul(mb), ca * cb);
            }
        }
        r
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
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

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (lm_d, lc_d) = d.leading()?;
        let (lm_d, lc_d) = (lm_d.clone(), lc_d.clone());
        let mut rem = self.clone();
        let mut q = Self::zero();
        while let Some((lm, lc)) = rem.leading() {
            if !lm_d.divides(lm) {
                return None;
            }
            let m = lm_d.quotient_of(lm);
            let c = lc / &lc_d;
            rem = rem.sub(&d.mul_monomial(&m, &c));
            q.add_term(m, c);
        }
        Some(q)
    }

    /// Splits `self = factor * primitive` where `primitive` has coprime
    /// integer coefficients and a positive leading coefficient.
    pub fn primitive_part(&self) -> (Rational, ParamPoly) {
        if self.is_zero() {
            return (Rational::one(), Self::zero());
        }
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            let n = c.numer() * (&den_lcm / c.denom());
            num_gcd = num_gcd.gcd(&n);
        }
        let mut factor = Rational::new(num_gcd, den_lcm);
        if self.leading().unwrap().1.is_negative() {
            factor = -factor;
        }
        let inv = factor.recip();
        (factor, self.scale(&inv))
    }

    pub fn primitive(&self) -> ParamPoly {
        self.primitive_part().1
    }

    /// Coefficients as a univariate polynomial in parameter `v`.
    fn coeffs_in(&self, v: usize) -> Vec<ParamPoly> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![ParamPoly::zero(); d + 1];
        for (m, c) in &self.terms {
            let e = m.exp(v) as usize;
            let mut ex = m.0.clone();
            if v < ex.len() {
                ex[v] = 0;
            }
            out[e].add_term(ParamMonomial::from_exponents(ex), c.clone());
        }
        out
    }

    fn lead_coeff_in(&self, v: usize) -> ParamPoly {
        let d = self.degree_in(v);
        let mut out = ParamPoly::zero();
        for (m, c) in &self.terms {
            if m.exp(v) == d {
                let mut ex = m.0.clone();
                if v < ex.len() {
                    ex[v] = 0;
                }
                out.add_term(ParamMonomial::from_exponents(ex), c.clone());
            }
        }
        out
    }

    fn content_in(&self, v: usize) -> ParamPoly {
        let mut g = ParamPoly::zero();
        for c in self.coeffs_in(v) {
            if c.is_zero() {
                continue;
            }
            g = gcd(&g, &c);
            if g.is_constant() {
                break;
            }
        }
        g
    }

    fn monomial_content(&self) -> ParamMonomial {
        let mut it = self.terms.keys();
        let first = match it.next() {
            Some(m) => m.clone(),
            None => return ParamMonomial::one(),
        };
        it.fold(first, |g, m| g.gcd(m))
    }

    fn min_var(&self) -> Option<usize> {
        self.terms
            .keys()
            .filter_map(|m| m.0.iter().position(|&e| e > 0))
            .min()
    }

    /// Value at a full binding of the parameters.
    pub fn evaluate(&self, values: &[Option<Rational>]) -> Result<Rational, usize> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = values.get(i).and_then(|v| v.as_ref()).ok_or(i)?;
                t *= num_traits::pow(v.clone(), e as usize);
            }
            acc += t;
        }
        Ok(acc)
    }
}

/// Pseudo-remainder of `a` by `b` as polynomials in parameter `v`.
fn prem(a: &ParamPoly, b: &ParamPoly, v: usize) -> ParamPoly {
    let db = b.degree_in(v);
    let lb = b.lead_coeff_in(v);
    let mut r = a.clone();
    while !r.is_zero() && r.mentions_at_least(v, db) {
        let dr = r.degree_in(v);
        let lr = r.lead_coeff_in(v);
        let shift = ParamMonomial::from_exponents({
            let mut e = vec![0; v + 1];
            e[v] = dr - db;
            e
        });
        let sub = b.mul(&lr).mul_monomial(&shift, &Rational::one());
        r = r.mul(&lb).sub(&sub);
    }
    r
}

impl ParamPoly {
    fn mentions_at_least(&self, v: usize, d: u32) -> bool {
        self.degree_in(v) >= d
    }
}

/// Greatest common divisor over `Q[params]`, returned primitive with a
/// positive leading coefficient. `gcd(0, 0) = 0`.
pub fn gcd(a: &ParamPoly, b: &ParamPoly) -> ParamPoly {
    if a.is_zero() {
        return b.primitive();
    }
    if b.is_zero() {
        return a.primitive();
    }
    if a.is_constant() || b.is_constant() {
        return ParamPoly::one();
    }
    if a.is_monomial() || b.is_monomial() {
        let g = a.monomial_content().gcd(&b.monomial_content());
        return ParamPoly::monomial(g, Rational::one());
    }
    let pa = a.primitive();
    let pb = b.primitive();
    if pa == pb {
        return pa;
    }
    // a common divisor is free of any variable only one side mentions
    for w in 0..a.width().max(b.width()) {
        match (a.mentions(w), b.mentions(w)) {
            (true, false) => return gcd(&a.content_in(w), b),
            (false, true) => return gcd(a, &b.content_in(w)),
            _ => {}
        }
    }
    let v = match (a.min_var(), b.min_var()) {
        (Some(x), Some(y)) => x.min(y),
        _ => return ParamPoly::one(),
    };
    if !a.mentions(v) {
        return gcd(a, &b.content_in(v));
    }
    if !b.mentions(v) {
        return gcd(&a.content_in(v), b);
    }
    let ca = a.content_in(v);
    let cb = b.content_in(v);
    let mut p = a.div_exact(&ca).expect("content divides");
    let mut q = b.div_exact(&cb).expect("content divides");
    if p.degree_in(v) < q.degree_in(v) {
        core::mem::swap(&mut p, &mut q);
    }
    while !q.is_zero() {
        let r = prem(&p, &q, v);
        p = q;
        q = if r.is_zero() || !r.mentions(v) {
            if r.is_zero() {
                r
            } else {
                // Nonzero remainder free of v: primitive parts are coprime in v.
                p = ParamPoly::one();
                ParamPoly::zero()
            }
        } else {
            let c = r.content_in(v);
            r.div_exact(&c).expect("content divides").primitive()
        };
    }
    let g = if p.mentions(v) {
        let pc = p.content_in(v);
        p.div_exact(&pc).expect("content divides")
    } else {
        ParamPoly::one()
    };
    gcd(&ca, &cb).mul(&g).primitive()
}

/// Element of the fraction field `Q(params)` in lowest terms.
///
/// The denominator is primitive with integer coefficients and a positive
/// leading coefficient; all rational scaling lives in the numerator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamScalar {
    num: ParamPoly,
    den: ParamPoly,
}

impl Default for ParamScalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl ParamScalar {
    pub fn zero() -> Self {
        ParamScalar { num: ParamPoly::zero(), den: ParamPoly::one() }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        ParamScalar { num: ParamPoly::constant(r), den: ParamPoly::one() }
    }

    pub fn from_int(i: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(i)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::from_rational(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn param(index: usize) -> Self {
        ParamScalar { num: ParamPoly::var(index), den: ParamPoly::one() }
    }

    pub fn from_poly(p: ParamPoly) -> Self {
        ParamScalar { num: p, den: ParamPoly::one() }
    }

    /// Builds `num / den` in canonical form. Panics on a zero denominator.
    pub fn new(num: ParamPoly, den: ParamPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        if let Some(d) = den.as_constant() {
            return ParamScalar { num: num.scale(&d.recip()), den: ParamPoly::one() };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        let (factor, den) = den.primitive_part();
        ParamScalar { num: num.scale(&factor.recip()), den }
    }

    pub fn numer(&self) -> &ParamPoly {
        &self.num
    }

    pub fn denom(&self) -> &ParamPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_constant() && self.num.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.den.is_constant() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            if self.den.is_constant() {
                return ParamScalar { num: self.num.add(&o.num), den: self.den.clone() };
            }
            return Self::new(self.num.add(&o.num), self.den.clone());
        }
        let g = gcd(&self.den, &o.den);
        let a = self.den.div_exact(&g).expect("gcd divides");
        let b = o.den.div_exact(&g).expect("gcd divides");
        let num = self.num.mul(&b).add(&o.num.mul(&a));
        Self::new(num, a.mul(&o.den))
    }

    pub fn neg(&self) -> Self {
        ParamScalar { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.den.is_constant() && o.den.is_constant() {
            return ParamScalar { num: self.num.mul(&o.num), den: ParamPoly::one() };
        }
        if let Some(c) = o.as_rational() {
            return ParamScalar { num: self.num.scale(&c), den: self.den.clone() };
        }
        if let Some(c) = self.as_rational() {
            return ParamScalar { num: o.num.scale(&c), den: o.den.clone() };
        }
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        ParamScalar { num: self.num.scale(k), den: if k.is_zero() { ParamPoly::one() } else { self.den.clone() } }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Self::new(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        if let Some(c) = o.as_rational() {
            if c.is_zero() {
                return None;
            }
            return Some(self.scale(&c.recip()));
        }
        Some(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: u32) -> Self {
        ParamScalar { num: self.num.pow(e), den: self.den.pow(e) }
    }

    pub fn evaluate(&self, values: &[Option<Rational>]) -> Result<Rational, ParamEvalError> {
        let n = self.num.evaluate(values).map_err(ParamEvalError::Unbound)?;
        let d = self.den.evaluate(values).map_err(ParamEvalError::Unbound)?;
        if d.is_zero() {
            return Err(ParamEvalError::VanishingDenominator);
        }
        Ok(n / d)
    }

    /// Highest parameter index referenced plus one.
    pub fn width(&self) -> usize {
        self.num.width().max(self.den.width())
    }

    /// Writes `self` as a rational linear combination of canonical atoms
    /// `m / den`, where `m` runs over numerator monomials and common
    /// monomial factors with the denominator are cancelled. Atoms have a
    /// numerator with leading coefficient one.
    pub fn atoms(&self) -> Vec<(ParamScalar, Rational)> {
        let mut out = Vec::new();
        for (m, c) in self.num.terms() {
            let a = if self.den.is_constant() {
                ParamScalar { num: ParamPoly::monomial(m.clone(), Rational::one()), den: ParamPoly::one() }
            } else {
                ParamScalar::new(ParamPoly::monomial(m.clone(), Rational::one()), self.den.clone())
            };
            let lead = a.num.leading().map(|(_, c)| c.clone()).unwrap_or_else(Rational::one);
            let atom = ParamScalar { num: a.num.scale(&lead.recip()), den: a.den };
            out.push((atom, c * lead));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamEvalError {
    Unbound(usize),
    VanishingDenominator,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(i: usize) -> ParamPoly {
        ParamPoly::var(i)
    }

    fn c(n: i64) -> ParamPoly {
        ParamPoly::constant(Rational::from_integer(BigInt::from(n)))
    }

    #[test]
    fn gcd_of_products() {
        // (a + b)(a - 2c) and (a + b)(b + 1)
        let f = p(0).add(&p(1));
        let g1 = p(0).sub(&p(2).scale(&Rational::from_integer(2.into())));
        let g2 = p(1).add(&c(1));
        let g = gcd(&f.mul(&g1), &f.mul(&g2));
        assert_eq!(g, f.primitive());
    }

    #[test]
    fn gcd_coprime_is_one() {
        let a = p(0).mul(&p(0)).add(&c(1));
        let b = p(0).add(&p(1));
        assert_eq!(gcd(&a, &b), ParamPoly::one());
    }

    #[test]
    fn fraction_cancels() {
        let a = ParamScalar::param(0);
        let b = ParamScalar::param(1);
        let ab = a.div(&b).unwrap();
        let ba = b.div(&a).unwrap();
        assert!(ab.mul(&ba).is_one());
        // 1/a + 1/a = 2/a
        let inv = a.inv().unwrap();
        assert_eq!(inv.add(&inv), ParamScalar::from_int(2).div(&a).unwrap());
    }

    #[test]
    fn difference_of_reciprocals() {
        // 1/I3 - 1/I2 = (I2 - I3)/(I2 I3)
        let i2 = ParamScalar::param(1);
        let i3 = ParamScalar::param(2);
        let lhs = i3.inv().unwrap().sub(&i2.inv().unwrap());
        let rhs = ParamScalar::new(p(1).sub(&p(2)), p(1).mul(&p(2)));
        assert_eq!(lhs, rhs);
        let atoms = rhs.atoms();
        assert_eq!(atoms.len(), 2);
    }

    #[test]
    fn denominator_is_primitive() {
        let s = ParamScalar::new(c(1), p(0).scale(&Rational::from_integer(2.into())));
        assert_eq!(s.denom(), &p(0));
        assert_eq!(s.numer(), &ParamPoly::constant(Rational::new(1.into(), 2.into())));
        let s2 = ParamScalar::new(c(3), p(0).neg());
        assert_eq!(s2.denom(), &p(0));
    }

    #[test]
    fn evaluate_detects_vanishing_denominator() {
        let s = ParamScalar::param(0).inv().unwrap();
        let zero = Some(Rational::zero());
        assert_eq!(s.evaluate(&[zero]), Err(ParamEvalError::VanishingDenominator));
        assert_eq!(s.evaluate(&[]), Err(ParamEvalError::Unbound(0)));
    }
}

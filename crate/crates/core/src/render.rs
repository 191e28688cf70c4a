//! Canonical text form of polynomials, re-parseable by the `.ode` grammar.
//!
//! Terms print in descending graded lex order. A coefficient `n/d` prints
//! with integer-coefficient numerator and denominator, e.g. `c/(2*a)*x1^2`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use crate::param::{ParamMonomial, ParamPoly, ParamScalar};
use crate::poly::{Monomial, Polynomial};
use crate::Rational;

/// Names for the ambient variables and the parameters.
#[derive(Clone, Copy, Debug)]
pub struct Symbols<'a> {
    pub vars: &'a [String],
    pub params: &'a [String],
}

impl<'a> Symbols<'a> {
    pub fn new(vars: &'a [String], params: &'a [String]) -> Self {
        Symbols { vars, params }
    }
}

fn param_monomial(m: &ParamMonomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

fn state_monomial(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

/// Integer polynomial printed with descending terms; `(text, term count)`.
fn integer_poly(p: &ParamPoly, names: &[String]) -> (String, usize) {
    let mut out = String::new();
    for (k, (m, c)) in p.terms().rev().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = param_monomial(m, names);
        if mono.is_empty() {
            out.push_str(&mag.to_string());
        } else if mag.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{}*{}", mag, mono));
        }
    }
    (out, p.len())
}

/// Scales the numerator to integer coefficients: `(integer numerator, integer
/// denominator factor)`.
fn clear_denominators(p: &ParamPoly) -> (ParamPoly, BigInt) {
    let mut l = BigInt::one();
    for (_, c) in p.terms() {
        l = l.lcm(c.denom());
    }
    (p.scale(&Rational::from_integer(l.clone())), l)
}

/// Whether the printed form is a single factor that needs no parentheses
/// after `/`.
fn is_atom(p: &ParamPoly, int_factor: &BigInt) -> bool {
    if p.is_constant() {
        return true;
    }
    if !int_factor.is_one() || p.len() != 1 {
        return false;
    }
    let (m, c) = p.terms().next().unwrap();
    c.is_one() && m.exponents().iter().filter(|&&e| e > 0).count() == 1
}

/// Coefficient text with its leading minus pulled out into `negative`.
struct Coeff {
    negative: bool,
    text: String,
    is_unit: bool,
}

fn coefficient(c: &ParamScalar, params: &[String]) -> Coeff {
    let (num, l) = clear_denominators(c.numer());
    let den = c.denom();
    let mut num = num;
    let mut negative = false;
    if num.leading().is_some_and(|(_, v)| v.is_negative()) {
        negative = true;
        num = num.neg();
    }
    let (ntext, nterms) = integer_poly(&num, params);
    let den_is_one = den.is_constant() && l.is_one();
    if den_is_one {
        let is_unit = num.as_constant().is_some_and(|v| v.is_one());
        let text = if nterms > 1 { format!("({})", ntext) } else { ntext };
        return Coeff { negative, text, is_unit };
    }
    let ntext = if nterms > 1 { format!("({})", ntext) } else { ntext };
    let dtext = if den.is_constant() {
        l.to_string()
    } else {
        let (dt, dterms) = integer_poly(den, params);
        let full = if l.is_one() {
            dt
        } else if dterms > 1 {
            format!("{}*({})", l, dt)
        } else {
            format!("{}*{}", l, dt)
        };
        if is_atom(den, &l) {
            full
        } else {
            format!("({})", full)
        }
    };
    Coeff { negative, text: format!("{}/{}", ntext, dtext), is_unit: false }
}

/// Canonical rendering of a scalar.
pub fn scalar(c: &ParamScalar, params: &[String]) -> String {
    if c.is_zero() {
        return "0".to_string();
    }
    let k = coefficient(c, params);
    if k.negative {
        format!("-{}", k.text)
    } else {
        k.text
    }
}

/// Canonical rendering of a polynomial; `0` for the zero polynomial.
pub fn polynomial(p: &Polynomial, sym: Symbols<'_>) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().rev().enumerate() {
        let coef = coefficient(c, sym.params);
        if k == 0 {
            if coef.negative {
                out.push('-');
            }
        } else {
            out.push_str(if coef.negative { " - " } else { " + " });
        }
        let mono = state_monomial(m, sym.vars);
        if mono.is_empty() {
            out.push_str(&coef.text);
        } else if coef.is_unit {
            out.push_str(&mono);
        } else {
            out.push_str(&coef.text);
            out.push('*');
            out.push_str(&mono);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn oscillator_energy() {
        let vars = names(&["x1", "x2"]);
        let h = Polynomial::var(2, 0).pow(2).add(&Polynomial::var(2, 1).pow(2)).scale(&ParamScalar::ratio(1, 2));
        assert_eq!(polynomial(&h, Symbols::new(&vars, &[])), "1/2*x1^2 + 1/2*x2^2");
    }

    #[test]
    fn parametric_coefficients() {
        let vars = names(&["x1", "x2", "x3"]);
        let params = names(&["a", "c", "d"]);
        let a = ParamScalar::param(0);
        let c = ParamScalar::param(1);
        let d = ParamScalar::param(2);
        let sym = Symbols::new(&vars, &params);
        let t = Polynomial::var(3, 2).scale(&d.div(&a).unwrap());
        assert_eq!(polynomial(&t, sym), "d/a*x3");
        let h = Polynomial::var(3, 0).pow(2).scale(&c.div(&a.scale(&Rational::from_integer(2.into()))).unwrap());
        assert_eq!(polynomial(&h, sym), "c/(2*a)*x1^2");
        let neg = Polynomial::var(3, 1).scale(&d.div(&a).unwrap().neg()).add(&Polynomial::var(3, 0));
        assert_eq!(polynomial(&neg, sym), "x1 - d/a*x2");
    }

    #[test]
    fn multi_term_numerator() {
        let vars = names(&["M1", "M2", "M3"]);
        let params = names(&["I1", "I2", "I3"]);
        let i2 = ParamScalar::param(1);
        let i3 = ParamScalar::param(2);
        let a1 = i3.inv().unwrap().sub(&i2.inv().unwrap());
        let t = Polynomial::var(3, 1).mul(&Polynomial::var(3, 2)).scale(&a1);
        assert_eq!(polynomial(&t, Symbols::new(&vars, &params)), "(I2 - I3)/(I2*I3)*M2*M3");
        let k = ParamScalar::param(0).scale(&Rational::from_integer(2.into())).inv().unwrap();
        assert_eq!(scalar(&k, &params), "1/(2*I1)");
        assert_eq!(scalar(&ParamScalar::ratio(-3, 4), &params), "-3/4");
    }

    #[test]
    fn signs_and_units() {
        let vars = names(&["x1", "x2"]);
        let p = Polynomial::var(2, 0).neg().add(&Polynomial::constant(2, ParamScalar::from_int(-1)));
        assert_eq!(polynomial(&p, Symbols::new(&vars, &[])), "-x1 - 1");
        assert_eq!(polynomial(&Polynomial::zero(2), Symbols::new(&vars, &[])), "0");
    }
}

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Signed;

use super::fit::fit_columns;
use crate::linalg::determinant;
use crate::param::ParamScalar;
use crate::poly::{PolyVector, Polynomial};

/// Sign information for a fitted dissipation matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Positivity {
    Zero,
    /// Every principal minor is a non-negative number.
    NonNegative,
    /// Some principal minor is a negative number.
    Indefinite,
    /// Non-negative provided each listed minor is non-negative.
    Conditional { minors: Vec<ParamScalar> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DissipationFit {
    pub r: Option<Vec<Vec<ParamScalar>>>,
    pub positivity: Option<Positivity>,
    pub leftover: PolyVector,
}

/// All principal minors of `r`, by increasing subset in binary order.
fn principal_minors(r: &[Vec<ParamScalar>]) -> Vec<ParamScalar> {
    let n = r.len();
    (1u32..(1 << n))
        .map(|mask| {
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let sub: Vec<Vec<ParamScalar>> = idx.iter().map(|&i| idx.iter().map(|&j| r[i][j].clone()).collect()).collect();
            determinant(&sub)
        })
        .collect()
}

/// Positive semidefiniteness by principal minors. Minors depending on
/// parameters are returned as conditions rather than decided.
pub fn positivity(r: &[Vec<ParamScalar>]) -> Positivity {
    if r.iter().flatten().all(|v| v.is_zero()) {
        return Positivity::Zero;
    }
    let mut conditions: Vec<ParamScalar> = Vec::new();
    for minor in principal_minors(r) {
        match minor.as_rational() {
            Some(q) if q.is_negative() => return Positivity::Indefinite,
            Some(_) => {}
            None => {
                if !conditions.contains(&minor) {
                    conditions.push(minor);
                }
            }
        }
    }
    if conditions.is_empty() {
        Positivity::NonNegative
    } else {
        Positivity::Conditional { minors: conditions }
    }
}

/// `R grad H` for a constant `r`.
pub fn apply(r: &[Vec<ParamScalar>], grad_h: &PolyVector) -> PolyVector {
    let m = grad_h.nvars();
    PolyVector::new(
        m,
        r.iter()
            .map(|row| row.iter().zip(grad_h.iter()).fold(Polynomial::zero(m), |acc, (c, g)| acc.add(&g.scale(c))))
            .collect(),
    )
}

/// Fits a constant symmetric `R` with `-R grad H` matching part of
/// `residual`. `R` is kept only when it is nonzero, not indefinite, and
/// strictly reduces the number of leftover monomials.
pub fn fit_dissipation(residual: &PolyVector, grad_h: &PolyVector) -> DissipationFit {
    let none = DissipationFit { r: None, positivity: None, leftover: residual.clone() };
    let n = residual.len();
    if grad_h.len() != n || residual.is_zero() || grad_h.is_zero() {
        return none;
    }
    let m = residual.nvars();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let images: Vec<PolyVector> = pairs
        .iter()
        .map(|&(i, j)| {
            let mut v = PolyVector::zeros(m, n);
            v.set(i, grad_h.get(j).neg());
            if i != j {
                v.set(j, grad_h.get(i).neg());
            }
            v
        })
        .collect();
    let fit = fit_columns(&images, residual);
    let mut r = vec![vec![ParamScalar::zero(); n]; n];
    for (&(i, j), v) in pairs.iter().zip(&fit.x) {
        r[i][j] = v.clone();
        r[j][i] = v.clone();
    }
    let pos = positivity(&r);
    if matches!(pos, Positivity::Zero | Positivity::Indefinite) {
        return none;
    }
    let leftover = residual.add(&apply(&r, grad_h));
    if leftover.monomial_count() >= residual.monomial_count() {
        return none;
    }
    DissipationFit { r: Some(r), positivity: Some(pos), leftover }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::odedsl::parse;
    use crate::poly::gradient;

    fn field(src: &str) -> PolyVector {
        parse(src).unwrap().rhs
    }

    fn s(v: i64) -> ParamScalar {
        ParamScalar::from_int(v)
    }

    #[test]
    fn oscillator_damping() {
        let res = field("params a; vars x1, x2; dot x1 = 0; dot x2 = -a*x2;");
        let h = field("vars x1, x2; dot x1 = x1^2/2 + x2^2/2; dot x2 = 0;").get(0).clone();
        let fit = fit_dissipation(&res, &gradient(&h));
        let a = ParamScalar::param(0);
        assert_eq!(fit.r, Some(vec![vec![s(0), s(0)], vec![s(0), a.clone()]]));
        assert_eq!(fit.positivity, Some(Positivity::Conditional { minors: vec![a] }));
        assert!(fit.leftover.is_zero());
    }

    #[test]
    fn quadratic_residual_is_rejected() {
        let res = field("vars x1, x2; dot x1 = x2^2; dot x2 = 0;");
        let g = PolyVector::new(2, vec![Polynomial::var(2, 0), Polynomial::var(2, 1)]);
        let fit = fit_dissipation(&res, &g);
        assert_eq!(fit.r, None);
        assert_eq!(fit.leftover, res);
    }

    #[test]
    fn linear_hamiltonian_cannot_absorb_decay() {
        let res = field("params e1, e2; vars x1, x2; dot x1 = e1*x1; dot x2 = e2*x2;");
        let g = PolyVector::new(2, vec![Polynomial::constant(2, s(1)), Polynomial::constant(2, s(1))]);
        let fit = fit_dissipation(&res, &g);
        assert_eq!(fit.r, None);
        assert_eq!(fit.leftover, res);
    }

    #[test]
    fn partial_fit() {
        // -k x2 is absorbed, the cubic term stays
        let res = field("params k; vars x1, x2; dot x1 = 0; dot x2 = k*x2 - k*x1^2*x2;");
        let g = PolyVector::new(2, vec![Polynomial::var(2, 0), Polynomial::var(2, 1)]);
        let fit = fit_dissipation(&res, &g);
        let k = ParamScalar::param(0);
        assert_eq!(fit.r, Some(vec![vec![s(0), s(0)], vec![s(0), k.neg()]]));
        assert_eq!(fit.leftover, field("params k; vars x1, x2; dot x1 = 0; dot x2 = -k*x1^2*x2;"));
    }

    #[test]
    fn negative_damping_is_not_dissipation() {
        let res = field("vars x1, x2; dot x1 = 0; dot x2 = x2;");
        let g = PolyVector::new(2, vec![Polynomial::var(2, 0), Polynomial::var(2, 1)]);
        assert_eq!(fit_dissipation(&res, &g).r, None);
    }

    #[test]
    fn positivity_by_minors() {
        assert_eq!(positivity(&[vec![s(2), s(1)], vec![s(1), s(1)]]), Positivity::NonNegative);
        assert_eq!(positivity(&[vec![s(1), s(2)], vec![s(2), s(1)]]), Positivity::Indefinite);
        assert_eq!(positivity(&[vec![s(0), s(0)], vec![s(0), s(0)]]), Positivity::Zero);
        // zero diagonal with off-diagonal coupling fails the 2x2 minor
        assert_eq!(positivity(&[vec![s(0), s(1)], vec![s(1), s(0)]]), Positivity::Indefinite);
    }
}

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::DecomposeError;
use crate::catalog::{diagonal_quadratic, jacobi_check, Family, StructureCandidate, TemplateKind};
use crate::linalg::{self, solve_prioritized, Echelon, RowStatus, SparseRow};
use crate::param::ParamScalar;
use crate::poly::{gradient, homotopy_integrate, is_closed, Monomial, PolyMatrix, PolyVector, Polynomial, DEFAULT_DEGREE_CAP};

use super::lie::lie_preserves;

/// Diagnostics for one fit attempt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FitReport {
    pub candidate: String,
    pub degree: u32,
    /// Rank of the accepted linear system.
    pub image_rank: usize,
    pub matched: usize,
    pub residual: usize,
    /// Whether the matched field integrated back to the fitted Hamiltonian.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianFit {
    pub h: Polynomial,
    pub residual: PolyVector,
    pub rank: usize,
}

/// Result of the linear solve for fixed column images against a target.
pub(crate) struct LinearFit {
    pub x: Vec<ParamScalar>,
    pub rank: usize,
}

/// Solves `sum_c x_c images[c] = target` coefficientwise, taking the
/// equations where the target vanishes first and the rest afterwards, each
/// group by equation and then ascending monomial. Later equations that
/// contradict earlier ones are left unmatched.
pub(crate) fn fit_columns(images: &[PolyVector], target: &PolyVector) -> LinearFit {
    let mut rows: BTreeMap<(usize, Monomial), SparseRow<ParamScalar>> = BTreeMap::new();
    for (c, img) in images.iter().enumerate() {
        for (eq, p) in img.iter().enumerate() {
            for (m, v) in p.terms() {
                rows.entry((eq, m.clone())).or_default().insert(c, v.clone());
            }
        }
    }
    for (eq, p) in target.iter().enumerate() {
        for m in p.monomials() {
            rows.entry((eq, m.clone())).or_default();
        }
    }
    let mut ordered: Vec<(SparseRow<ParamScalar>, ParamScalar)> = Vec::with_capacity(rows.len());
    let mut targets = Vec::new();
    for ((eq, m), row) in rows {
        let b = target.get(eq).coeff(&m);
        if b.is_zero() {
            ordered.push((row, b));
        } else {
            targets.push((row, b));
        }
    }
    ordered.extend(targets);
    let sol = solve_prioritized(&ordered, images.len());
    debug_assert!(sol.status.iter().zip(&ordered).all(|(s, (_, b))| *s != RowStatus::Conflict || !b.is_zero()));
    LinearFit { x: sol.x, rank: sol.rank }
}

fn check_degree(max_deg: u32) -> Result<(), DecomposeError> {
    if max_deg == 0 || max_deg > DEFAULT_DEGREE_CAP {
        return Err(DecomposeError::DegreeCap { requested: max_deg, cap: DEFAULT_DEGREE_CAP });
    }
    Ok(())
}

/// Number of Hamiltonian monomials of degree `1..=max_deg` in `m` variables.
pub fn ansatz_size(m: usize, max_deg: u32) -> usize {
    // C(m + d, d) - 1
    let mut c: usize = 1;
    for k in 1..=max_deg as usize {
        c = c * (m + k) / k;
    }
    c - 1
}

/// Fits `H` with `J grad H` matching as much of `internal` as the
/// prioritized solve allows. `H` has no constant term.
pub fn fit_hamiltonian(internal: &PolyVector, j: &PolyMatrix, max_deg: u32) -> Result<HamiltonianFit, DecomposeError> {
    check_degree(max_deg)?;
    let m = j.rows();
    if !j.is_square() || internal.len() != m || internal.nvars() != m || j.nvars() != m {
        return Err(DecomposeError::Shape);
    }
    let cols = Monomial::all_up_to(m, 1, max_deg);
    let images: Vec<PolyVector> = cols
        .iter()
        .map(|mono| j.mul_vec(&gradient(&Polynomial::term(mono.clone(), ParamScalar::one()))))
        .collect::<Result<_, _>>()?;
    let fit = fit_columns(&images, internal);
    let h = Polynomial::from_terms(m, cols.into_iter().zip(fit.x).filter(|(_, c)| !c.is_zero()));
    let residual = internal.sub(&j.mul_vec(&gradient(&h))?);
    Ok(HamiltonianFit { h, residual, rank: fit.rank })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Exactness {
    Exact(Polynomial),
    Obstructed,
    Undetermined,
}

/// Constant invertible `j` as a matrix of scalars, with its inverse.
fn constant_inverse(j: &PolyMatrix) -> Option<Vec<Vec<ParamScalar>>> {
    let s = j.as_scalars()?;
    let n = s.len();
    let mut cols = Vec::with_capacity(n);
    for k in 0..n {
        let e: Vec<ParamScalar> = (0..n).map(|i| if i == k { ParamScalar::one() } else { ParamScalar::zero() }).collect();
        cols.push(linalg::solve_square(&s, &e)?);
    }
    Some((0..n).map(|i| (0..n).map(|k| cols[k][i].clone()).collect()).collect())
}

/// Decides whether `x` is Hamiltonian for `j`. A constant invertible `j`
/// goes through closedness and homotopy integration and requires `x` to
/// preserve `j`; any other structure is decided by a fit within `max_deg`.
pub fn exactness_check(j: &PolyMatrix, x: &PolyVector, max_deg: u32) -> Result<Exactness, DecomposeError> {
    let m = j.rows();
    if x.len() != m || x.nvars() != m {
        return Err(DecomposeError::Shape);
    }
    if let Some(inv) = constant_inverse(j) {
        if !lie_preserves(j, x)?.is_zero() {
            return Err(DecomposeError::Precondition);
        }
        let g = PolyMatrix::from_scalars(m, &inv).mul_vec(x)?;
        if !is_closed(&g) {
            return Ok(Exactness::Obstructed);
        }
        return Ok(Exactness::Exact(homotopy_integrate(&g)?));
    }
    let fit = fit_hamiltonian(x, j, max_deg)?;
    Ok(if fit.residual.is_zero() { Exactness::Exact(fit.h) } else { Exactness::Undetermined })
}

/// Fixed Hamiltonians tried by the template fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ansatz {
    /// `sum x_i`
    Linear,
    /// `1/2 sum c_i x_i^2` with weights read off the field.
    Weighted,
    /// `1/2 sum x_i^2`
    Quadratic,
}

impl Ansatz {
    pub const DEFAULT: [Ansatz; 3] = [Ansatz::Linear, Ansatz::Weighted, Ansatz::Quadratic];

    pub fn name(self) -> &'static str {
        match self {
            Ansatz::Linear => "linear",
            Ansatz::Weighted => "weighted",
            Ansatz::Quadratic => "quadratic",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Ansatz::DEFAULT.into_iter().find(|a| a.name() == s)
    }
}

/// Base monomial multiplying the unknown `theta_ij` in a template entry.
fn template_base(kind: TemplateKind, m: usize, i: usize, j: usize) -> Polynomial {
    match kind {
        TemplateKind::ConstantSkew => Polynomial::constant(m, ParamScalar::one()),
        TemplateKind::DiagonalQuadratic => Polynomial::var(m, i).mul(&Polynomial::var(m, j)),
    }
}

/// Weights `c` such that `1/2 sum c_i x_i^2` is compatible with the skew
/// pattern of `internal`: for each pair, `T_ji c_j + T_ij c_i = 0` where
/// `T_ij` is the coefficient of `base_ij * x_j` in equation `i`.
fn weighted_ansatz(kind: TemplateKind, internal: &PolyVector) -> Option<Polynomial> {
    let m = internal.len();
    let mut ech: Echelon<ParamScalar> = Echelon::new(m, 0);
    for i in 0..m {
        for j in i + 1..m {
            let t = |a: usize, b: usize| {
                let mono = template_base(kind, m, a, b).mul(&Polynomial::var(m, b));
                let key = mono.monomials().next().unwrap().clone();
                internal.get(a).coeff(&key)
            };
            let (tij, tji) = (t(i, j), t(j, i));
            let row: SparseRow<ParamScalar> = [(i, tij), (j, tji)].into_iter().filter(|(_, v)| !v.is_zero()).collect();
            if !row.is_empty() {
                ech.push(row, Vec::new());
            }
        }
    }
    let mut c = vec![ParamScalar::zero(); m];
    for k in ech.kernel() {
        for (ci, ki) in c.iter_mut().zip(&k) {
            *ci = ci.add(ki);
        }
    }
    if c.iter().any(|v| v.is_zero()) {
        return None;
    }
    let lead = c[0].clone();
    let half = ParamScalar::ratio(1, 2);
    Some(Polynomial::from_terms(
        m,
        c.iter().enumerate().map(|(i, ci)| (Monomial::var(m, i).mul(&Monomial::var(m, i)), ci.div(&lead).unwrap().mul(&half))),
    ))
}

pub fn ansatz_hamiltonian(a: Ansatz, kind: TemplateKind, internal: &PolyVector) -> Option<Polynomial> {
    let m = internal.len();
    match a {
        Ansatz::Linear => Some((0..m).fold(Polynomial::zero(m), |acc, i| acc.add(&Polynomial::var(m, i)))),
        Ansatz::Weighted => weighted_ansatz(kind, internal),
        Ansatz::Quadratic => {
            let half = ParamScalar::ratio(1, 2);
            Some(Polynomial::from_terms(m, (0..m).map(|i| (Monomial::var(m, i).mul(&Monomial::var(m, i)), half.clone()))))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TemplateFit {
    pub structure: StructureCandidate,
    pub h: Polynomial,
    pub residual: PolyVector,
    pub rank: usize,
}

/// Second stage of a template fit: with `h` fixed the field is linear in the
/// skew unknowns, which are solved for and instantiated.
pub fn fit_template(kind: TemplateKind, internal: &PolyVector, h: &Polynomial) -> Result<Option<TemplateFit>, DecomposeError> {
    let m = internal.len();
    if internal.nvars() != m || h.nvars() != m {
        return Err(DecomposeError::Shape);
    }
    let g = gradient(h);
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let images: Vec<PolyVector> = pairs
        .iter()
        .map(|&(i, j)| {
            let b = template_base(kind, m, i, j);
            let mut v = PolyVector::zeros(m, m);
            v.set(i, b.mul(g.get(j)));
            v.set(j, b.mul(g.get(i)).neg());
            v
        })
        .collect();
    let fit = fit_columns(&images, internal);
    let mut theta = vec![vec![ParamScalar::zero(); m]; m];
    for (&(i, j), t) in pairs.iter().zip(&fit.x) {
        theta[i][j] = t.clone();
        theta[j][i] = t.neg();
    }
    let (family, jm) = match kind {
        TemplateKind::ConstantSkew => (Family::ConstantSkew { matrix: theta.clone() }, PolyMatrix::from_scalars(m, &theta)),
        TemplateKind::DiagonalQuadratic => (Family::DiagonalQuadratic { a: theta.clone() }, diagonal_quadratic(&theta)),
    };
    if !jm.is_skew() {
        return Err(DecomposeError::NotSkew);
    }
    if !jacobi_check(&jm).map_err(|_| DecomposeError::NotSkew)? {
        return Ok(None);
    }
    let residual = internal.sub(&jm.mul_vec(&g)?);
    Ok(Some(TemplateFit { structure: StructureCandidate { family, j: jm }, h: h.clone(), residual, rank: fit.rank }))
}

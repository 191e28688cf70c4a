//! Candidate symplectic and Poisson structures, with symbolic skewness and
//! Jacobi checks.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg;
use crate::param::ParamScalar;
use crate::poly::{Polynomial, PolyMatrix};
use crate::Rational;

/// One `(i, j, sign)` pair of a perfect matching: `J[i][j] = sign`,
/// `J[j][i] = -sign`.
pub type Pair = (usize, usize, i8);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Darboux form given by a signed perfect matching of the variables.
    CanonicalSymplectic { pairing: Vec<Pair> },
    /// Constant skew matrix, typically instantiated from the template.
    ConstantSkew { matrix: Vec<Vec<ParamScalar>> },
    /// Named structure with entries affine in the variables (`so3`, `zero`,
    /// user presets).
    LinearPoisson { name: String },
    /// `J[i][j] = a[i][j] * x_i * x_j` with `a` skew.
    DiagonalQuadratic { a: Vec<Vec<ParamScalar>> },
}

impl Family {
    pub fn tag(&self) -> String {
        match self {
            Family::CanonicalSymplectic { .. } => "canonical_symplectic".into(),
            Family::ConstantSkew { .. } => "constant_skew".into(),
            Family::LinearPoisson { name } => format!("linear_poisson:{}", name),
            Family::DiagonalQuadratic { .. } => "diagonal_quadratic".into(),
        }
    }
}

/// Families whose entries are unknowns fitted downstream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TemplateKind {
    ConstantSkew,
    DiagonalQuadratic,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Candidate {
    Fixed(StructureCandidate),
    Template { kind: TemplateKind, dim: usize },
}

impl Candidate {
    pub fn label(&self) -> String {
        match self {
            Candidate::Fixed(s) => s.family.tag(),
            Candidate::Template { kind: TemplateKind::ConstantSkew, .. } => "template:constant_skew".into(),
            Candidate::Template { kind: TemplateKind::DiagonalQuadratic, .. } => "template:diagonal_quadratic".into(),
        }
    }
}

/// A concrete skew matrix with its family.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StructureCandidate {
    pub family: Family,
    pub j: PolyMatrix,
}

impl StructureCandidate {
    pub fn dim(&self) -> usize {
        self.j.rows()
    }
}

/// A named user structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preset {
    pub name: String,
    pub j: PolyMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatalogError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not skew-symmetric")]
    NotSkew,
    #[error("entries must be constant or linear in the variables")]
    NotAffine,
    #[error("entries must not involve parameters")]
    Parametric,
    #[error("structure `{0}` fails the Jacobi identity")]
    Jacobi(String),
}

impl Preset {
    /// Validates a user structure: square, skew, affine, numeric, Jacobi.
    pub fn new(name: String, j: PolyMatrix) -> Result<Self, CatalogError> {
        if !j.is_square() || j.nvars() != j.rows() {
            return Err(CatalogError::NotSquare);
        }
        if !j.is_skew() {
            return Err(CatalogError::NotSkew);
        }
        if j.entries().iter().any(|p| p.degree() > 1) {
            return Err(CatalogError::NotAffine);
        }
        if !j.entries().iter().all(|p| p.is_numeric()) {
            return Err(CatalogError::Parametric);
        }
        if !jacobi_check(&j)? {
            return Err(CatalogError::Jacobi(name));
        }
        Ok(Preset { name, j })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogConfig {
    pub symplectic: bool,
    pub so3: bool,
    pub zero: bool,
    pub constant_skew: bool,
    pub diagonal_quadratic: bool,
    /// Largest dimension for which alternative pairings are enumerated.
    pub matching_bound: usize,
    pub presets: Vec<Preset>,
}

impl Default for CatalogConfig {
    fn default() -> Self {
        CatalogConfig {
            symplectic: true,
            so3: true,
            zero: true,
            constant_skew: true,
            diagonal_quadratic: true,
            matching_bound: 6,
            presets: Vec::new(),
        }
    }
}

fn constant(n: usize, v: i64) -> Polynomial {
    Polynomial::constant(n, ParamScalar::from_int(v))
}

pub fn from_pairing(dim: usize, pairing: &[Pair]) -> PolyMatrix {
    let mut j = PolyMatrix::zeros(dim, dim, dim);
    for &(a, b, s) in pairing {
        j.set(a, b, constant(dim, s as i64));
        j.set(b, a, constant(dim, -(s as i64)));
    }
    j
}

/// `[[0, I], [-I, 0]]`.
pub fn canonical_pairing(dim: usize) -> Vec<Pair> {
    let h = dim / 2;
    (0..h).map(|i| (i, i + h, 1)).collect()
}

/// Rigid-body bracket `J = [[0, -x3, x2], [x3, 0, -x1], [-x2, x1, 0]]`.
pub fn so3() -> PolyMatrix {
    let x = |i| Polynomial::var(3, i);
    let z = || Polynomial::zero(3);
    PolyMatrix::from_rows(
        3,
        vec![
            vec![z(), x(2).neg(), x(1)],
            vec![x(2), z(), x(0).neg()],
            vec![x(1).neg(), x(0), z()],
        ],
    )
}

/// `J[i][j] = a[i][j] x_i x_j`.
pub fn diagonal_quadratic(a: &[Vec<ParamScalar>]) -> PolyMatrix {
    let n = a.len();
    let mut j = PolyMatrix::zeros(n, n, n);
    for (r, row) in a.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            if r != c && !v.is_zero() {
                j.set(r, c, Polynomial::var(n, r).mul(&Polynomial::var(n, c)).scale(v));
            }
        }
    }
    j
}

fn perfect_matchings(items: &[usize], out: &mut Vec<Vec<(usize, usize)>>, cur: &mut Vec<(usize, usize)>) {
    if items.is_empty() {
        out.push(cur.clone());
        return;
    }
    let first = items[0];
    for k in 1..items.len() {
        let rest: Vec<usize> = items[1..].iter().copied().filter(|&v| v != items[k]).collect();
        cur.push((first, items[k]));
        perfect_matchings(&rest, out, cur);
        cur.pop();
    }
}

/// Signed perfect matchings of `0..dim` other than the canonical one.
pub fn alternative_pairings(dim: usize) -> Vec<Vec<Pair>> {
    let mut matchings = Vec::new();
    perfect_matchings(&(0..dim).collect::<Vec<_>>(), &mut matchings, &mut Vec::new());
    let canon = canonical_pairing(dim);
    let mut out = Vec::new();
    for m in matchings {
        for signs in 0u32..(1 << m.len()) {
            let p: Vec<Pair> = m
                .iter()
                .enumerate()
                .map(|(k, &(a, b))| (a, b, if signs & (1 << k) == 0 { 1 } else { -1 }))
                .collect();
            if p != canon {
                out.push(p);
            }
        }
    }
    out
}

/// Candidate structures for a node of dimension `dim`, in preference order.
pub fn enumerate(dim: usize, cfg: &CatalogConfig) -> Vec<Candidate> {
    let mut out = Vec::new();
    if dim >= 2 && dim % 2 == 0 && cfg.symplectic {
        let p = canonical_pairing(dim);
        out.push(Candidate::Fixed(StructureCandidate {
            j: from_pairing(dim, &p),
            family: Family::CanonicalSymplectic { pairing: p },
        }));
        if dim <= cfg.matching_bound {
            for p in alternative_pairings(dim) {
                out.push(Candidate::Fixed(StructureCandidate {
                    j: from_pairing(dim, &p),
                    family: Family::CanonicalSymplectic { pairing: p },
                }));
            }
        }
    }
    if dim == 3 && cfg.so3 {
        out.push(Candidate::Fixed(StructureCandidate {
            j: so3(),
            family: Family::LinearPoisson { name: "so3".into() },
        }));
    }
    for preset in &cfg.presets {
        if preset.j.rows() == dim {
            out.push(Candidate::Fixed(StructureCandidate {
                j: preset.j.clone(),
                family: Family::LinearPoisson { name: preset.name.clone() },
            }));
        }
    }
    if cfg.zero || dim == 1 {
        out.push(Candidate::Fixed(zero_structure(dim)));
    }
    if dim >= 2 {
        if cfg.constant_skew {
            out.push(Candidate::Template { kind: TemplateKind::ConstantSkew, dim });
        }
        if cfg.diagonal_quadratic {
            out.push(Candidate::Template { kind: TemplateKind::DiagonalQuadratic, dim });
        }
    }
    out
}

pub fn zero_structure(dim: usize) -> StructureCandidate {
    StructureCandidate { family: Family::LinearPoisson { name: "zero".into() }, j: PolyMatrix::zeros(dim, dim, dim) }
}

/// Cyclic Jacobi sum for the triple `(i, j, k)`.
pub fn jacobi_sum(jm: &PolyMatrix, i: usize, j: usize, k: usize) -> Polynomial {
    let n = jm.rows();
    let mut acc = Polynomial::zero(jm.nvars());
    for l in 0..n {
        let d = |a: usize, b: usize| jm.get(a, b).diff(l).expect("variable in range");
        acc = acc
            .add(&jm.get(l, k).mul(&d(i, j)))
            .add(&jm.get(l, i).mul(&d(j, k)))
            .add(&jm.get(l, j).mul(&d(k, i)));
    }
    acc
}

/// Whether `jm` satisfies the Jacobi identity as a polynomial identity.
pub fn jacobi_check(jm: &PolyMatrix) -> Result<bool, CatalogError> {
    if !jm.is_square() || jm.nvars() < jm.rows() {
        return Err(CatalogError::NotSquare);
    }
    if !jm.is_skew() {
        return Err(CatalogError::NotSkew);
    }
    let n = jm.rows();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if !jacobi_sum(jm, i, j, k).is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegeneracyProfile {
    /// Largest rank seen over the probe points.
    pub rank: usize,
    /// Symbolic determinant when the dimension is at most four.
    pub determinant: Option<Polynomial>,
}

/// Retries after the first probe point.
pub const RANK_RETRIES: usize = 3;

/// Generic rank at random rational points and, for small matrices, the
/// determinant polynomial.
pub fn degeneracy_profile(jm: &PolyMatrix, seed: u64) -> DegeneracyProfile {
    let n = jm.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = jm.entries().iter().map(|p| p.param_width()).max().unwrap_or(0);
    let mut rank = 0;
    for _ in 0..=RANK_RETRIES {
        let point: Vec<Rational> = (0..jm.nvars()).map(|_| random_rational(&mut rng)).collect();
        let params: Vec<Option<Rational>> = (0..width).map(|_| Some(random_rational(&mut rng))).collect();
        let m: Option<Vec<Vec<Rational>>> = (0..n)
            .map(|i| (0..n).map(|j| jm.get(i, j).evaluate(&point, &params).ok()).collect())
            .collect();
        if let Some(m) = m {
            rank = rank.max(linalg::rank(&m));
        }
        if rank == n {
            break;
        }
    }
    let determinant = (n <= 4).then(|| poly_determinant(jm));
    DegeneracyProfile { rank, determinant }
}

pub fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num: i64 = rng.gen_range(-50..=50);
    let den: i64 = rng.gen_range(1..=17);
    Rational::new(num.into(), den.into())
}

/// Determinant by cofactor expansion along the first row.
pub fn poly_determinant(m: &PolyMatrix) -> Polynomial {
    let idx: Vec<usize> = (0..m.rows()).collect();
    det_rec(m, 0, &idx)
}

fn det_rec(m: &PolyMatrix, row: usize, cols: &[usize]) -> Polynomial {
    if cols.is_empty() {
        return Polynomial::constant(m.nvars(), ParamScalar::one());
    }
    let mut acc = Polynomial::zero(m.nvars());
    for (k, &c) in cols.iter().enumerate() {
        let e = m.get(row, c);
        if e.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let t = e.mul(&det_rec(m, row + 1, &rest));
        acc = if k % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
    }
    acc
}

//! Per-node recovery of `(J - R) grad H` plus ports.

mod dissipation;
mod fit;
mod lie;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

pub use dissipation::{apply as apply_dissipation, fit_dissipation, positivity, DissipationFit, Positivity};
pub use fit::{
    ansatz_hamiltonian, ansatz_size, exactness_check, fit_hamiltonian, fit_template, Ansatz, Exactness, FitReport,
    HamiltonianFit, TemplateFit,
};
pub use lie::lie_preserves;

use crate::catalog::{enumerate, zero_structure, Candidate, CatalogConfig, StructureCandidate};
use crate::depgraph::BlockTerms;
use crate::odedsl::OdeSystem;
use crate::param::ParamScalar;
use crate::poly::{gradient, KernelError, Monomial, PolyVector, Polynomial, DEFAULT_DEGREE_CAP};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecomposeError {
    #[error("shape mismatch")]
    Shape,
    #[error("ansatz degree {requested} outside 1..={cap}")]
    DegreeCap { requested: u32, cap: u32 },
    #[error("field does not preserve the structure")]
    Precondition,
    #[error("template instantiation is not skew-symmetric")]
    NotSkew,
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// One block's equations, with internal terms in block-local variables.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeField {
    /// System variable indices, ascending.
    pub block: Vec<usize>,
    /// Internal terms over the block variables only.
    pub internal: PolyVector,
    /// Internal terms kept out of the fit (they carry auxiliary inputs or
    /// were pinned), as `(local equation, term)` over the system ambient.
    pub unfit: Vec<(usize, Polynomial)>,
    /// Terms with foreign support, `(local equation, term)` over the system
    /// ambient.
    pub external: Vec<(usize, Polynomial)>,
}

impl NodeField {
    /// Builds the local field for `block` from its split terms. Internal
    /// terms whose `(equation, monomial)` is in `pins` skip the fit.
    pub fn new(sys: &OdeSystem, block: &[usize], terms: &BlockTerms, pins: &[(usize, Monomial)]) -> Self {
        let m = block.len();
        let local = |g: usize| block.binary_search(&g).ok();
        let map: Vec<Option<usize>> = (0..sys.ambient()).map(|g| if g < sys.dim() { local(g) } else { None }).collect();
        let mut internal = PolyVector::zeros(m, m);
        let mut unfit = Vec::new();
        for (eq, t) in &terms.internal {
            let le = local(*eq).expect("equation in block");
            let mono = t.monomials().next().expect("nonzero term");
            let pinned = pins.iter().any(|(pe, pm)| pe == eq && pm == mono);
            if !pinned && mono.support().all(|g| g < sys.dim()) {
                internal.set(le, internal.get(le).add(&t.remap(m, &map)));
            } else {
                unfit.push((le, t.clone()));
            }
        }
        let external = terms.external.iter().map(|(eq, t)| (local(*eq).expect("equation in block"), t.clone())).collect();
        NodeField { block: block.to_vec(), internal, unfit, external }
    }

    pub fn dim(&self) -> usize {
        self.block.len()
    }

    /// Lifts a block-local polynomial to the system ambient.
    pub fn lift(&self, p: &Polynomial, ambient: usize) -> Polynomial {
        let map: Vec<Option<usize>> = self.block.iter().map(|&g| Some(g)).collect();
        p.remap(ambient, &map)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PortKind {
    Dissipative,
    Generic,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InternalPort {
    /// Local equation index.
    pub equation: usize,
    /// Term over the system ambient.
    pub term: Polynomial,
    pub kind: PortKind,
}

/// External terms as `W u`: `u` lists distinct monomials over the system
/// ambient and `w[eq][k]` is the coefficient of `u[k]` in local equation
/// `eq`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coupling {
    pub u: Vec<Monomial>,
    pub w: Vec<Vec<ParamScalar>>,
}

impl Coupling {
    /// `(W u)_eq` over `ambient` variables.
    pub fn row(&self, eq: usize, ambient: usize) -> Polynomial {
        let mut p = Polynomial::zero(ambient);
        for (c, m) in self.w[eq].iter().zip(&self.u) {
            if !c.is_zero() {
                p.add_term(m.clone(), c.clone());
            }
        }
        p
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decoration {
    pub block: Vec<usize>,
    pub structure: StructureCandidate,
    /// Over the block variables.
    pub hamiltonian: Polynomial,
    pub dissipation: Option<(Vec<Vec<ParamScalar>>, Positivity)>,
    pub ports: Vec<InternalPort>,
    pub coupling: Coupling,
    pub reports: Vec<FitReport>,
}

impl Decoration {
    /// `(J - R) grad H` in block-local variables.
    pub fn conservative_part(&self) -> PolyVector {
        let g = gradient(&self.hamiltonian);
        let mut v = self.structure.j.mul_vec(&g).expect("shapes agree");
        if let Some((r, _)) = &self.dissipation {
            v = v.sub(&apply_dissipation(r, &g));
        }
        v
    }
}

/// Groups external terms by monomial into `W u`.
pub fn assemble_ports(nf: &NodeField) -> Coupling {
    let mut order: BTreeMap<Monomial, usize> = BTreeMap::new();
    let mut u: Vec<Monomial> = Vec::new();
    for (_, t) in &nf.external {
        for m in t.monomials() {
            order.entry(m.clone()).or_insert_with(|| {
                u.push(m.clone());
                u.len() - 1
            });
        }
    }
    let mut w = vec![vec![ParamScalar::zero(); u.len()]; nf.dim()];
    for (eq, t) in &nf.external {
        for (m, c) in t.terms() {
            let k = order[m];
            w[*eq][k] = w[*eq][k].add(c);
        }
    }
    Coupling { u, w }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecomposeConfig {
    /// Fixed ansatz degree; derived per candidate when absent.
    pub max_degree: Option<u32>,
    pub catalog: CatalogConfig,
    pub ansatz: Vec<Ansatz>,
    /// Largest Hamiltonian ansatz, in monomials, before the degree is
    /// lowered.
    pub work_budget: usize,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig {
            max_degree: None,
            catalog: CatalogConfig::default(),
            ansatz: Ansatz::DEFAULT.to_vec(),
            work_budget: 1500,
        }
    }
}

/// `deg(internal) + 1 - min entry degree of J`, clamped to the kernel range.
pub fn default_degree(internal: &PolyVector, j: &crate::poly::PolyMatrix) -> u32 {
    let lo = j.min_entry_degree().unwrap_or(0) as i64;
    let d = internal.degree() as i64 + 1 - lo;
    d.clamp(2, DEFAULT_DEGREE_CAP as i64) as u32
}

struct Attempt {
    structure: StructureCandidate,
    h: Polynomial,
    dissipation: DissipationFit,
}

impl Attempt {
    fn cost(&self) -> usize {
        self.dissipation.leftover.monomial_count()
    }
}

fn with_dissipation(structure: StructureCandidate, h: Polynomial, residual: PolyVector) -> Attempt {
    let dissipation = if h.is_zero() {
        DissipationFit { r: None, positivity: None, leftover: residual }
    } else {
        fit_dissipation(&residual, &gradient(&h))
    };
    Attempt { structure, h, dissipation }
}

fn report(label: alloc::string::String, degree: u32, rank: usize, total: usize, residual: &PolyVector, exact: bool) -> FitReport {
    let r = residual.monomial_count();
    FitReport { candidate: label, degree, image_rank: rank, matched: total - r, residual: r, exact }
}

/// Tries every catalog candidate on the node and keeps the one leaving the
/// fewest monomials as ports, earlier candidates winning ties.
pub fn decorate_node(nf: &NodeField, cfg: &DecomposeConfig, ambient: usize) -> Result<Decoration, DecomposeError> {
    let m = nf.dim();
    let total = nf.internal.monomial_count();
    let mut reports = Vec::new();
    let mut best: Option<Attempt> = None;
    if total > 0 {
        for cand in enumerate(m, &cfg.catalog) {
            let attempt = match cand {
                Candidate::Fixed(s) => {
                    let mut d = cfg.max_degree.unwrap_or_else(|| default_degree(&nf.internal, &s.j));
                    if cfg.max_degree.is_none() {
                        while d > 2 && ansatz_size(m, d) > cfg.work_budget {
                            d -= 1;
                        }
                    }
                    let fit = fit_hamiltonian(&nf.internal, &s.j, d)?;
                    let matched = nf.internal.sub(&fit.residual);
                    let exact = match exactness_check(&s.j, &matched, d) {
                        Ok(Exactness::Exact(h)) => h == fit.h || fit.h.is_zero() && h.is_zero(),
                        Ok(_) => false,
                        Err(DecomposeError::Precondition) => false,
                        Err(e) => return Err(e),
                    };
                    reports.push(report(s.family.tag(), d, fit.rank, total, &fit.residual, exact));
                    with_dissipation(s, fit.h, fit.residual)
                }
                Candidate::Template { kind, .. } => {
                    let mut pick: Option<Attempt> = None;
                    for &a in &cfg.ansatz {
                        let Some(h) = ansatz_hamiltonian(a, kind, &nf.internal) else { continue };
                        let Some(t) = fit_template(kind, &nf.internal, &h)? else { continue };
                        let label = alloc::format!("{}+{}", cand.label(), a.name());
                        reports.push(report(label, h.degree(), t.rank, total, &t.residual, true));
                        let att = with_dissipation(t.structure, t.h, t.residual);
                        if pick.as_ref().is_none_or(|p| att.cost() < p.cost()) {
                            pick = Some(att);
                        }
                    }
                    match pick {
                        Some(p) => p,
                        None => continue,
                    }
                }
            };
            if best.as_ref().is_none_or(|b| attempt.cost() < b.cost()) {
                best = Some(attempt);
            }
            if best.as_ref().is_some_and(|b| b.cost() == 0) {
                break;
            }
        }
    }
    let best = match best {
        Some(b) if !b.h.is_zero() => b,
        _ => with_dissipation(zero_structure(m), Polynomial::zero(m), nf.internal.clone()),
    };
    let dec = finish(nf, best, reports, ambient);
    assert_reconstruction(nf, &dec, ambient);
    Ok(dec)
}

fn finish(nf: &NodeField, best: Attempt, reports: Vec<FitReport>, ambient: usize) -> Decoration {
    let mut ports = Vec::new();
    let dissipation = match (best.dissipation.r, best.dissipation.positivity) {
        (Some(r), Some(p)) => {
            let rg = apply_dissipation(&r, &gradient(&best.h));
            for (eq, p) in rg.iter().enumerate() {
                if !p.is_zero() {
                    ports.push(InternalPort { equation: eq, term: nf.lift(&p.neg(), ambient), kind: PortKind::Dissipative });
                }
            }
            Some((r, p))
        }
        _ => None,
    };
    for (eq, p) in best.dissipation.leftover.iter().enumerate() {
        for t in p.split() {
            ports.push(InternalPort { equation: eq, term: nf.lift(&t, ambient), kind: PortKind::Generic });
        }
    }
    for (eq, t) in &nf.unfit {
        ports.push(InternalPort { equation: *eq, term: t.clone(), kind: PortKind::Generic });
    }
    ports.sort_by(|a, b| (a.equation, a.kind).cmp(&(b.equation, b.kind)));
    Decoration {
        block: nf.block.clone(),
        structure: best.structure,
        hamiltonian: best.h,
        dissipation,
        ports,
        coupling: assemble_ports(nf),
        reports,
    }
}

fn assert_reconstruction(nf: &NodeField, dec: &Decoration, ambient: usize) {
    let core = dec.conservative_part();
    for eq in 0..nf.dim() {
        let mut want = nf.lift(nf.internal.get(eq), ambient);
        for (e, t) in nf.unfit.iter().chain(&nf.external) {
            if *e == eq {
                want = want.add(t);
            }
        }
        let mut got = nf.lift(core.get(eq), ambient).add(&dec.coupling.row(eq, ambient));
        for p in dec.ports.iter().filter(|p| p.equation == eq && p.kind == PortKind::Generic) {
            got = got.add(&p.term);
        }
        assert_eq!(got, want, "reconstruction identity failed on local equation {}", eq);
    }
}

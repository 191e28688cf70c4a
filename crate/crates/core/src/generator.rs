//! Seeded synthetic port-Hamiltonian systems with known node structure.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{canonical_pairing, from_pairing, so3};
use crate::decomposer::apply_dissipation;
use crate::depgraph::Partition;
use crate::odedsl::OdeSystem;
use crate::param::ParamScalar;
use crate::poly::{gradient, Monomial, PolyMatrix, PolyVector, Polynomial};
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub enum Topology {
    Chain,
    Ring,
    /// Each node pair is coupled with this probability.
    Random(f64),
    Edges(Vec<(usize, usize)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthSpec {
    pub dims: Vec<usize>,
    pub topology: Topology,
    /// Degree of the foreign variable in each coupling term.
    pub coupling_degree: u32,
    pub dissipation: bool,
    pub so3: bool,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(dims: Vec<usize>, topology: Topology, seed: u64) -> Self {
        SynthSpec { dims, topology, coupling_degree: 1, dissipation: true, so3: true, seed }
    }
}

/// The decoration a node was synthesized from, over its local variables.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeTruth {
    pub j: PolyMatrix,
    pub h: Polynomial,
    pub r: Option<Vec<Vec<ParamScalar>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    pub partition: Partition,
    pub nodes: Vec<NodeTruth>,
    /// Coupled node pairs.
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeneratorError {
    #[error("no catalog family for a node of dimension {0}")]
    NoCatalogFamily(usize),
    #[error("edge ({0}, {1}) is not between two distinct nodes")]
    BadEdge(usize, usize),
    #[error("partitions are over different ground sets")]
    GroundSet,
}

fn small(rng: &mut ChaCha8Rng, lo: i64, hi: i64, dmax: i64) -> Rational {
    Rational::new(rng.gen_range(lo..=hi).into(), rng.gen_range(1..=dmax).into())
}

fn nonzero(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let q = small(rng, -3, 3, 3);
        if q != Rational::from_integer(0.into()) {
            return q;
        }
    }
}

/// `1/2 x^T (L^T L + D) x` with small rational `L` and positive diagonal `D`.
fn random_quadratic(rng: &mut ChaCha8Rng, m: usize) -> Polynomial {
    let l: Vec<Vec<Rational>> = (0..m).map(|_| (0..m).map(|_| small(rng, -3, 3, 4)).collect()).collect();
    let d: Vec<Rational> = (0..m).map(|_| small(rng, 1, 4, 3)).collect();
    let mut q = vec![vec![Rational::from_integer(0.into()); m]; m];
    for i in 0..m {
        for j in 0..m {
            for row in &l {
                q[i][j] += &row[i] * &row[j];
            }
        }
        q[i][i] += &d[i];
    }
    let mut h = Polynomial::zero(m);
    let half = Rational::new(1.into(), 2.into());
    for i in 0..m {
        for j in i..m {
            let c = if i == j { &q[i][i] * &half } else { q[i][j].clone() };
            h.add_term(Monomial::var(m, i).mul(&Monomial::var(m, j)), ParamScalar::from_rational(c));
        }
    }
    h
}

fn node_structure(m: usize, so3_enabled: bool) -> Result<PolyMatrix, GeneratorError> {
    match m {
        1 => Ok(PolyMatrix::zeros(1, 1, 1)),
        3 if so3_enabled => Ok(so3()),
        _ if m % 2 == 0 => Ok(from_pairing(m, &canonical_pairing(m))),
        _ => Err(GeneratorError::NoCatalogFamily(m)),
    }
}

fn edges(spec: &SynthSpec, rng: &mut ChaCha8Rng) -> Result<Vec<(usize, usize)>, GeneratorError> {
    let n = spec.dims.len();
    let out: Vec<(usize, usize)> = match &spec.topology {
        Topology::Chain => (1..n).map(|i| (i - 1, i)).collect(),
        Topology::Ring if n < 3 => (1..n).map(|i| (i - 1, i)).collect(),
        Topology::Ring => (1..n).map(|i| (i - 1, i)).chain([(n - 1, 0)]).collect(),
        Topology::Random(p) => {
            let p = p.clamp(0.0, 1.0);
            let mut e = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen_bool(p) {
                        e.push((i, j));
                    }
                }
            }
            e
        }
        Topology::Edges(e) => e.clone(),
    };
    for &(a, b) in &out {
        if a == b || a >= n || b >= n {
            return Err(GeneratorError::BadEdge(a, b));
        }
    }
    Ok(out)
}

/// Assembles the nodes and couplings into one numeric system over
/// `x1, x2, ...`. Each coupling adds `c y^k` to one node variable's equation
/// and `-c x^k` to the partner's, with `x`, `y` drawn from the two nodes.
pub fn synth(spec: &SynthSpec) -> Result<(OdeSystem, GroundTruth), GeneratorError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n: usize = spec.dims.iter().sum();
    let mut offsets = Vec::with_capacity(spec.dims.len());
    let mut rhs = vec![Polynomial::zero(n); n];
    let mut nodes = Vec::new();
    let mut start = 0;
    for &m in &spec.dims {
        if m == 0 {
            return Err(GeneratorError::NoCatalogFamily(0));
        }
        let j = node_structure(m, spec.so3)?;
        let h = random_quadratic(&mut rng, m);
        let g = gradient(&h);
        let mut f = j.mul_vec(&g).expect("square structure");
        let r = spec.dissipation.then(|| {
            let mut r = vec![vec![ParamScalar::zero(); m]; m];
            for (i, row) in r.iter_mut().enumerate() {
                row[i] = ParamScalar::from_rational(small(&mut rng, 0, 3, 3));
            }
            r
        });
        if let Some(r) = &r {
            f = f.sub(&apply_dissipation(r, &g));
        }
        let map: Vec<Option<usize>> = (start..start + m).map(Some).collect();
        for (i, p) in f.iter().enumerate() {
            rhs[start + i] = p.remap(n, &map);
        }
        nodes.push(NodeTruth { j, h, r });
        offsets.push(start);
        start += m;
    }
    let es = edges(spec, &mut rng)?;
    let k = spec.coupling_degree.max(1);
    for &(a, b) in &es {
        let xa = offsets[a] + rng.gen_range(0..spec.dims[a]);
        let xb = offsets[b] + rng.gen_range(0..spec.dims[b]);
        let c = ParamScalar::from_rational(nonzero(&mut rng));
        rhs[xa] = rhs[xa].add(&Polynomial::var(n, xb).pow(k).scale(&c));
        rhs[xb] = rhs[xb].sub(&Polynomial::var(n, xa).pow(k).scale(&c));
    }
    let sys = OdeSystem {
        variables: (1..=n).map(|i| format!("x{}", i)).collect(),
        parameters: Vec::new(),
        inputs: Vec::new(),
        rhs: PolyVector::new(n, rhs),
    };
    let blocks = offsets.iter().zip(&spec.dims).map(|(&o, &m)| (o..o + m).collect()).collect();
    Ok((sys, GroundTruth { partition: Partition::new(blocks), nodes, edges: es }))
}

/// Fraction of element pairs on which the two partitions agree.
pub fn rand_index(p: &Partition, q: &Partition) -> Result<Rational, GeneratorError> {
    let (lp, lq) = (p.labels(), q.labels());
    if lp.len() != lq.len() {
        return Err(GeneratorError::GroundSet);
    }
    let n = lp.len();
    if n < 2 {
        return Ok(Rational::from_integer(1.into()));
    }
    let mut agree: i64 = 0;
    for i in 0..n {
        for j in i + 1..n {
            if (lp[i] == lp[j]) == (lq[i] == lq[j]) {
                agree += 1;
            }
        }
    }
    let total = (n * (n - 1) / 2) as i64;
    Ok(Rational::new(agree.into(), total.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depgraph::{build_dependency, partition, PartitionConfig};
    use crate::odedsl::{parse, render_system};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn two_node_chain_partitions_back() {
        let (sys, truth) = synth(&SynthSpec::new(vec![2, 2], Topology::Chain, 42)).unwrap();
        assert_eq!(sys.dim(), 4);
        let p = partition(&build_dependency(&sys), &PartitionConfig::default()).unwrap();
        assert_eq!(rand_index(&p, &truth.partition).unwrap(), q(1, 1));
    }

    #[test]
    fn closed_node_is_conservative() {
        let spec = SynthSpec { dissipation: false, ..SynthSpec::new(vec![2], Topology::Chain, 7) };
        let (sys, truth) = synth(&spec).unwrap();
        let t = &truth.nodes[0];
        assert_eq!(sys.rhs, t.j.mul_vec(&gradient(&t.h)).unwrap());
        assert!(truth.edges.is_empty());
    }

    #[test]
    fn deterministic_and_parseable() {
        let spec = SynthSpec::new(vec![2, 3, 4], Topology::Ring, 5);
        let a = render_system(&synth(&spec).unwrap().0);
        let b = render_system(&synth(&spec).unwrap().0);
        assert_eq!(a, b);
        assert_eq!(parse(&a).unwrap(), synth(&spec).unwrap().0);
    }

    #[test]
    fn truth_reassembles_the_system() {
        let spec = SynthSpec::new(vec![2, 3], Topology::Chain, 11);
        let (sys, truth) = synth(&spec).unwrap();
        // removing the two coupling terms leaves (J - R) grad H per node
        let mut start = 0;
        for t in &truth.nodes {
            let m = t.j.rows();
            let g = gradient(&t.h);
            let want = t.j.mul_vec(&g).unwrap().sub(&apply_dissipation(t.r.as_ref().unwrap(), &g));
            for i in 0..m {
                let map: Vec<Option<usize>> = (start..start + m).map(Some).collect();
                let own = want.get(i).remap(sys.dim(), &map);
                let rest = sys.rhs.get(start + i).sub(&own);
                assert!(rest.monomials().all(|mo| mo.degree() == 1 && mo.support().all(|v| v < start || v >= start + m)));
            }
            start += m;
        }
    }

    #[test]
    fn errors() {
        assert_eq!(synth(&SynthSpec::new(vec![5], Topology::Chain, 1)).unwrap_err(), GeneratorError::NoCatalogFamily(5));
        let spec = SynthSpec { so3: false, ..SynthSpec::new(vec![3], Topology::Chain, 1) };
        assert_eq!(synth(&spec).unwrap_err(), GeneratorError::NoCatalogFamily(3));
        let bad = SynthSpec::new(vec![2, 2], Topology::Edges(vec![(0, 2)]), 1);
        assert_eq!(synth(&bad).unwrap_err(), GeneratorError::BadEdge(0, 2));
    }

    #[test]
    fn rand_index_cases() {
        let a = Partition::new(vec![vec![0, 1], vec![2, 3]]);
        let b = Partition::new(vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(rand_index(&a, &a).unwrap(), q(1, 1));
        // agreeing pairs: {0,3} and {1,2}, both split in each
        assert_eq!(rand_index(&a, &b).unwrap(), q(1, 3));
        let s = Partition::singletons(4);
        assert_eq!(rand_index(&s, &s).unwrap(), q(1, 1));
        assert_eq!(rand_index(&s, &Partition::singletons(3)), Err(GeneratorError::GroundSet));
    }
}

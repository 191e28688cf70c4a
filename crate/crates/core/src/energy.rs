//! Numeric power balance along a short RK4 trajectory.
//!
//! For each node, `dH/dt` must equal `-grad H^T R grad H + grad H^T (p + W u)`
//! where `p` collects the generic internal ports. Each step compares the
//! change in `H` with Simpson's rule applied to the power. The tolerance is
//! absolute for powers up to 1 and relative above that.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::ToPrimitive;

use crate::decomposer::{Decoration, PortKind};
use crate::odedsl::{InputKind, OdeSystem};
use crate::param::ParamScalar;
use crate::poly::{KernelError, Polynomial};
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyConfig {
    pub step: f64,
    pub steps: usize,
    pub tolerance: f64,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        EnergyConfig { step: 1.0 / 128.0, steps: 64, tolerance: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyReport {
    /// Largest `|dH - integral of power| / step` per node, divided by the
    /// step's peak power when that exceeds 1.
    pub per_node: Vec<f64>,
    pub max_discrepancy: f64,
    pub steps: usize,
    pub within_tolerance: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnergyError {
    #[error("expected {expected} parameter values, got {got}")]
    Parameters { expected: usize, got: usize },
    #[error("expected {expected} values for declared inputs, got {got}")]
    Inputs { expected: usize, got: usize },
    #[error("initial state has {got} entries, system has {expected}")]
    State { expected: usize, got: usize },
    #[error("input `{0}` is an unresolved derivative reference")]
    Unresolved(String),
    #[error("{0}")]
    Kernel(#[from] KernelError),
    #[error("coefficient is not a finite number")]
    NotFinite,
    #[error("trajectory diverged at step {0}")]
    Diverged(usize),
}

fn abs(v: f64) -> f64 {
    if v < 0.0 {
        -v
    } else {
        v
    }
}

fn powu(mut b: f64, mut e: u32) -> f64 {
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        b *= b;
        e >>= 1;
    }
    acc
}

/// A polynomial with numeric coefficients, ready for fast evaluation.
#[derive(Clone, Debug)]
struct FloatPoly(Vec<(Vec<u32>, f64)>);

impl FloatPoly {
    fn new(p: &Polynomial, params: &[Option<Rational>]) -> Result<Self, EnergyError> {
        let bound = p.bind_params(params)?;
        let mut terms = Vec::with_capacity(bound.len());
        for (m, c) in bound.terms() {
            let q = c.as_rational().expect("parameters bound");
            let f = q.to_f64().filter(|f| f.is_finite()).ok_or(EnergyError::NotFinite)?;
            terms.push((m.exponents().to_vec(), f));
        }
        Ok(FloatPoly(terms))
    }

    fn eval(&self, z: &[f64]) -> f64 {
        self.0
            .iter()
            .map(|(e, c)| e.iter().zip(z).fold(*c, |acc, (&k, &v)| if k == 0 { acc } else { acc * powu(v, k) }))
            .sum()
    }
}

fn float_scalar(c: &ParamScalar, params: &[Option<Rational>]) -> Result<f64, EnergyError> {
    let q = c.evaluate(params).map_err(KernelError::from)?;
    q.to_f64().filter(|f| f.is_finite()).ok_or(EnergyError::NotFinite)
}

struct NodeBalance {
    h: FloatPoly,
    grad: Vec<FloatPoly>,
    r: Vec<Vec<f64>>,
    /// Generic ports plus coupling, per local equation.
    supply: Vec<FloatPoly>,
}

impl NodeBalance {
    fn power(&self, z: &[f64]) -> f64 {
        let g: Vec<f64> = self.grad.iter().map(|p| p.eval(z)).collect();
        let mut p = 0.0;
        for (i, gi) in g.iter().enumerate() {
            for (j, gj) in g.iter().enumerate() {
                p -= gi * self.r[i][j] * gj;
            }
            p += gi * self.supply[i].eval(z);
        }
        p
    }
}

/// Evaluates the vector field, filling in synthesized inputs from the
/// derivatives they stand for.
struct Field {
    n: usize,
    rhs: Vec<FloatPoly>,
    /// `(slot, var, scale)` for each synthesized input.
    aux: Vec<(usize, usize, f64)>,
    declared: Vec<(usize, f64)>,
}

impl Field {
    fn state(&self, x: &[f64]) -> Vec<f64> {
        let mut z = vec![f64::NAN; self.n + self.aux.len() + self.declared.len()];
        z[..self.n].copy_from_slice(x);
        for &(slot, v) in &self.declared {
            z[slot] = v;
        }
        // resolution is acyclic, so each pass fixes at least one input
        for _ in 0..self.aux.len() {
            for &(slot, var, scale) in &self.aux {
                if z[slot].is_nan() {
                    let v = self.rhs[var].eval(&z);
                    if !v.is_nan() {
                        z[slot] = v / scale;
                    }
                }
            }
        }
        z
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let z = self.state(x);
        self.rhs.iter().map(|p| p.eval(&z)).collect()
    }
}

fn axpy(x: &[f64], a: f64, k: &[f64]) -> Vec<f64> {
    x.iter().zip(k).map(|(x, k)| x + a * k).collect()
}

fn rk4(f: &Field, x: &[f64], h: f64) -> Vec<f64> {
    let k1 = f.eval(x);
    let k2 = f.eval(&axpy(x, h / 2.0, &k1));
    let k3 = f.eval(&axpy(x, h / 2.0, &k2));
    let k4 = f.eval(&axpy(x, h, &k3));
    (0..x.len()).map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect()
}

/// Integrates `sys` from `x0` and checks each node's power balance.
/// `params` binds every parameter; `inputs` holds constant values for the
/// declared inputs in order.
pub fn energy_balance(
    sys: &OdeSystem,
    decorations: &[Decoration],
    params: &[Rational],
    inputs: &[Rational],
    x0: &[f64],
    cfg: &EnergyConfig,
) -> Result<EnergyReport, EnergyError> {
    if params.len() != sys.parameters.len() {
        return Err(EnergyError::Parameters { expected: sys.parameters.len(), got: params.len() });
    }
    let n = sys.dim();
    if x0.len() != n {
        return Err(EnergyError::State { expected: n, got: x0.len() });
    }
    let bound: Vec<Option<Rational>> = params.iter().cloned().map(Some).collect();
    let mut aux = Vec::new();
    let mut declared_slots = Vec::new();
    for (k, inp) in sys.inputs.iter().enumerate() {
        match &inp.kind {
            InputKind::Declared => declared_slots.push(n + k),
            InputKind::Synthesized { var, scale } => aux.push((n + k, *var, float_scalar(scale, &bound)?)),
            InputKind::DotRef { .. } => return Err(EnergyError::Unresolved(inp.name.clone())),
        }
    }
    if inputs.len() != declared_slots.len() {
        return Err(EnergyError::Inputs { expected: declared_slots.len(), got: inputs.len() });
    }
    let declared = declared_slots
        .into_iter()
        .zip(inputs)
        .map(|(s, v)| Ok((s, v.to_f64().filter(|f| f.is_finite()).ok_or(EnergyError::NotFinite)?)))
        .collect::<Result<Vec<_>, EnergyError>>()?;
    let field = Field {
        n,
        rhs: sys.rhs.iter().map(|p| FloatPoly::new(p, &bound)).collect::<Result<_, _>>()?,
        aux,
        declared,
    };

    let ambient = sys.ambient();
    let mut nodes = Vec::with_capacity(decorations.len());
    for d in decorations {
        let map: Vec<Option<usize>> = d.block.iter().map(|&g| Some(g)).collect();
        let h = d.hamiltonian.remap(ambient, &map);
        let grad = d.block.iter().map(|&g| FloatPoly::new(&h.diff(g)?, &bound)).collect::<Result<_, EnergyError>>()?;
        let m = d.block.len();
        let r = match &d.dissipation {
            Some((r, _)) => r.iter().map(|row| row.iter().map(|c| float_scalar(c, &bound)).collect()).collect::<Result<_, _>>()?,
            None => vec![vec![0.0; m]; m],
        };
        let mut supply: Vec<Polynomial> = (0..m).map(|i| d.coupling.row(i, ambient)).collect();
        for p in d.ports.iter().filter(|p| p.kind == PortKind::Generic) {
            supply[p.equation] = supply[p.equation].add(&p.term);
        }
        let supply = supply.iter().map(|p| FloatPoly::new(p, &bound)).collect::<Result<_, _>>()?;
        nodes.push(NodeBalance { h: FloatPoly::new(&h, &bound)?, grad, r, supply });
    }

    let step = cfg.step;
    let mut per_node = vec![0.0f64; nodes.len()];
    let mut x = x0.to_vec();
    for s in 0..cfg.steps {
        let mid = rk4(&field, &x, step / 2.0);
        let next = rk4(&field, &x, step);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(EnergyError::Diverged(s));
        }
        let (z0, zm, z1) = (field.state(&x), field.state(&mid), field.state(&next));
        for (k, nb) in nodes.iter().enumerate() {
            let dh = nb.h.eval(&z1) - nb.h.eval(&z0);
            let (p0, pm, p1) = (nb.power(&z0), nb.power(&zm), nb.power(&z1));
            let work = step / 6.0 * (p0 + 4.0 * pm + p1);
            let scale = [1.0, abs(p0), abs(pm), abs(p1)].into_iter().fold(0.0, f64::max);
            let err = abs(dh - work) / step / scale;
            if err > per_node[k] {
                per_node[k] = err;
            }
        }
        x = next;
    }
    let max_discrepancy = per_node.iter().copied().fold(0.0, f64::max);
    Ok(EnergyReport {
        per_node,
        max_discrepancy,
        steps: cfg.steps,
        within_tolerance: max_discrepancy <= cfg.tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{analyze, AnalyzeConfig};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn damped_oscillator_balances() {
        let a = analyze("params a; vars x1, x2; dot x1 = x2; dot x2 = -x1 - a*x2;", &AnalyzeConfig::default()).unwrap();
        let rep = energy_balance(&a.prepared.system, &a.decorations, &[q(1, 10)], &[], &[1.0, 0.0], &EnergyConfig::default()).unwrap();
        assert!(rep.within_tolerance, "{:?}", rep);
        assert_eq!(rep.steps, 64);
    }

    #[test]
    fn closed_form_oracle() {
        // undamped oscillator: H is conserved exactly, so dissipation
        // computed from the wrong R must show up as a discrepancy
        let a = analyze("params a; vars x1, x2; dot x1 = x2; dot x2 = -x1 - a*x2;", &AnalyzeConfig::default()).unwrap();
        let mut d = a.decorations.clone();
        if let Some((r, _)) = d[0].dissipation.as_mut() {
            r[1][1] = ParamScalar::from_int(0);
        }
        let rep = energy_balance(&a.prepared.system, &d, &[q(1, 2)], &[], &[1.0, 0.5], &EnergyConfig::default()).unwrap();
        assert!(!rep.within_tolerance);
    }

    #[test]
    fn fluid_with_aux_input() {
        let src = "params a, b, c, d, k, l, m; vars x1, x2, x3, x4;
dot x1 = x2; dot x2 = -b/a*x2 - c/a*x1 + d/a*x3; dot x3 = x4;
dot x4 = -k*(x3^2 - 1)*x4 - l*x3 + m*dot(x2);";
        let a = analyze(src, &AnalyzeConfig::default()).unwrap();
        let p = [q(2, 1), q(1, 5), q(3, 1), q(1, 2), q(1, 3), q(2, 1), q(1, 4)];
        let rep = energy_balance(&a.prepared.system, &a.decorations, &p, &[], &[0.3, -0.2, 0.5, 0.1], &EnergyConfig::default()).unwrap();
        assert!(rep.within_tolerance, "{:?}", rep);
        assert_eq!(rep.per_node.len(), 2);
    }

    #[test]
    fn rigid_body_with_constant_torque() {
        let src = "params I1, I2, I3; vars M1, M2, M3; input N1; input N2; input N3;
dot M1 = (I2 - I3)/(I2*I3)*M2*M3 + N1; dot M2 = (I3 - I1)/(I3*I1)*M3*M1 + N2; dot M3 = (I1 - I2)/(I1*I2)*M1*M2 + N3;";
        let a = analyze(src, &AnalyzeConfig::default()).unwrap();
        let sys = &a.prepared.system;
        let p = [q(1, 1), q(2, 1), q(3, 1)];
        let u = [q(1, 10), q(0, 1), q(-1, 5)];
        let rep = energy_balance(sys, &a.decorations, &p, &u, &[0.4, 0.3, -0.2], &EnergyConfig::default()).unwrap();
        assert!(rep.within_tolerance, "{:?}", rep);
        assert_eq!(
            energy_balance(sys, &a.decorations, &p, &[], &[0.0; 3], &EnergyConfig::default()).unwrap_err(),
            EnergyError::Inputs { expected: 3, got: 0 }
        );
    }

    #[test]
    fn integer_powers() {
        assert_eq!(powu(3.0, 0), 1.0);
        assert_eq!(powu(-2.0, 5), -32.0);
        assert_eq!(powu(0.5, 3), 0.125);
    }
}

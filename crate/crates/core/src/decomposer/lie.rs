use crate::poly::{KernelError, PolyMatrix, PolyVector, Polynomial};

/// Lie derivative of the bivector `j` along `x`:
/// `(L_x J)^{ij} = sum_k x^k d_k J^{ij} - J^{kj} d_k x^i - J^{ik} d_k x^j`.
/// It vanishes exactly when the flow of `x` preserves `j`.
pub fn lie_preserves(j: &PolyMatrix, x: &PolyVector) -> Result<PolyMatrix, KernelError> {
    let n = j.rows();
    if !j.is_square() || x.len() != n || j.nvars() != x.nvars() || j.nvars() < n {
        return Err(KernelError::Shape("lie derivative"));
    }
    let mut out = PolyMatrix::zeros(j.nvars(), n, n);
    for a in 0..n {
        for b in 0..n {
            let mut acc = Polynomial::zero(j.nvars());
            for k in 0..n {
                acc = acc
                    .add(&x.get(k).mul(&j.get(a, b).diff(k)?))
                    .sub(&j.get(k, b).mul(&x.get(a).diff(k)?))
                    .sub(&j.get(a, k).mul(&x.get(b).diff(k)?));
            }
            out.set(a, b, acc);
        }
    }
    Ok(out)
}

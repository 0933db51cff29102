//! Bernstein and (uniform-node) Lagrange basis functions.

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Bernstein polynomial `B_i^n(t) = C(n,i) t^i (1-t)^(n-i)`.
pub fn bernstein<R: Real>(n: usize, i: usize, t: R) -> Result<R> {
    if i > n {
        return Err(Error::InvalidArgument(format!(
            "Bernstein index {i} out of range for degree {n}"
        )));
    }
    if !(t >= R::zero() && t <= R::one()) {
        return Err(Error::InvalidArgument(format!(
            "Bernstein parameter {t} outside [0,1]"
        )));
    }
    Ok(bernstein_all(n, t)[i])
}

/// All `n+1` Bernstein values at `t`, via the stable de Casteljau recurrence.
pub fn bernstein_all<R: Real>(n: usize, t: R) -> Vec<R> {
    let mut b = vec![R::zero(); n + 1];
    b[0] = R::one();
    let s = R::one() - t;
    for j in 1..=n {
        let mut saved = R::zero();
        for k in 0..j {
            let tmp = b[k];
            b[k] = saved + s * tmp;
            saved = t * tmp;
        }
        b[j] = saved;
    }
    b
}

/// Lagrange basis `L_i(t)` for uniform nodes `t_j = j/n`.
pub fn lagrange_basis<R: Real>(n: usize, i: usize, t: R) -> Result<R> {
    if n < 1 {
        return Err(Error::InvalidArgument(
            "Lagrange curve degree must be at least 1".into(),
        ));
    }
    if i > n {
        return Err(Error::InvalidArgument(format!(
            "Lagrange index {i} out of range for degree {n}"
        )));
    }
    Ok(lagrange_basis_all(n, t)[i])
}

/// All `n+1` uniform-node Lagrange basis values at `t`.
pub fn lagrange_basis_all<R: Real>(n: usize, t: R) -> Vec<R> {
    let nodes: Vec<R> = (0..=n).map(|j| real(j as f64 / n.max(1) as f64)).collect();
    let mut out = vec![R::one(); n + 1];
    for i in 0..=n {
        for j in 0..=n {
            if j != i {
                out[i] = out[i] * (t - nodes[j]) / (nodes[i] - nodes[j]);
            }
        }
    }
    out
}

/// Derivatives `L_i'(t)` of the uniform-node Lagrange basis.
///
/// Uses the product-sum expansion, which stays finite at the nodes.
pub fn lagrange_deriv_all<R: Real>(n: usize, t: R) -> Vec<R> {
    let nodes: Vec<R> = (0..=n).map(|j| real(j as f64 / n.max(1) as f64)).collect();
    let mut out = vec![R::zero(); n + 1];
    for i in 0..=n {
        let mut acc = R::zero();
        for m in 0..=n {
            if m == i {
                continue;
            }
            let mut term = R::one() / (nodes[i] - nodes[m]);
            for j in 0..=n {
                if j != i && j != m {
                    term = term * (t - nodes[j]) / (nodes[i] - nodes[j]);
                }
            }
            acc += term;
        }
        out[i] = acc;
    }
    out
}

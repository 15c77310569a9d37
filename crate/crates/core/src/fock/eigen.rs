//! Eigensolver backends for the oracle: dense self-adjoint decomposition
//! (faer) for blocks up to a few thousand states, Lanczos with full
//! reorthogonalization for the lowest eigenpairs of larger blocks.

use faer::prelude::*;

/// Dense blocks up to this size go through the full decomposition.
pub(crate) const DENSE_LIMIT: usize = 4096;

/// Full self-adjoint eigendecomposition, eigenvalues ascending.
pub(crate) fn eigh_dense(mat: &Mat<f64>) -> (Vec<f64>, Mat<f64>) {
    let n = mat.nrows();
    let eig = mat
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("self-adjoint eigendecomposition failed");
    let s = eig.S();
    let u = eig.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].partial_cmp(&s[b]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| s[i]).collect();
    let mut vecs = Mat::<f64>::zeros(n, n);
    for (j_new, &j_old) in order.iter().enumerate() {
        for i in 0..n {
            vecs[(i, j_new)] = u[(i, j_old)];
        }
    }
    (vals, vecs)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Deterministic pseudo-random start vector.
fn seed_vector(dim: usize, seed: u64) -> Vec<f64> {
    let mut state = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(1);
    let mut v: Vec<f64> = (0..dim)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        })
        .collect();
    let n = norm(&v);
    for x in &mut v {
        *x /= n;
    }
    v
}

/// Lowest `k` eigenpairs by Lanczos with full reorthogonalization.
///
/// `steps` bounds the Krylov dimension; accuracy is the caller's concern
/// (the oracle validates residuals downstream).
pub(crate) fn lanczos_lowest(
    apply: &dyn Fn(&[f64], &mut [f64]),
    dim: usize,
    k: usize,
    steps: usize,
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = steps.min(dim);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut alphas: Vec<f64> = Vec::with_capacity(m);
    let mut betas: Vec<f64> = Vec::with_capacity(m);
    basis.push(seed_vector(dim, 1));
    let mut w = vec![0.0; dim];
    let mut reseed = 2u64;
    for j in 0..m {
        apply(&basis[j], &mut w);
        let alpha = dot(&w, &basis[j]);
        alphas.push(alpha);
        for (i, v) in basis.iter().enumerate() {
            let c = if i == j {
                alpha
            } else if i + 1 == j {
                betas[i]
            } else {
                0.0
            };
            if c != 0.0 {
                for (wx, vx) in w.iter_mut().zip(v) {
                    *wx -= c * vx;
                }
            }
        }
        // Two rounds of full reorthogonalization.
        for _ in 0..2 {
            for v in &basis {
                let c = dot(&w, v);
                for (wx, vx) in w.iter_mut().zip(v) {
                    *wx -= c * vx;
                }
            }
        }
        if j + 1 == m {
            break;
        }
        let mut beta = norm(&w);
        if beta < 1e-13 {
            // Invariant subspace exhausted; continue from a fresh
            // deterministic direction.
            w = seed_vector(dim, reseed);
            reseed += 1;
            for v in &basis {
                let c = dot(&w, v);
                for (wx, vx) in w.iter_mut().zip(v) {
                    *wx -= c * vx;
                }
            }
            beta = norm(&w);
            if beta < 1e-13 {
                break;
            }
            betas.push(0.0);
        } else {
            betas.push(beta);
        }
        let next: Vec<f64> = w.iter().map(|x| x / beta).collect();
        basis.push(next);
    }

    let m_eff = alphas.len();
    let mut t = Mat::<f64>::zeros(m_eff, m_eff);
    for i in 0..m_eff {
        t[(i, i)] = alphas[i];
        if i + 1 < m_eff {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let (theta, s) = eigh_dense(&t);
    let k_eff = k.min(m_eff);
    let mut vals = Vec::with_capacity(k_eff);
    let mut vecs = Vec::with_capacity(k_eff);
    for j in 0..k_eff {
        vals.push(theta[j]);
        let mut y = vec![0.0; dim];
        for (i, v) in basis.iter().enumerate() {
            let c = s[(i, j)];
            for (yx, vx) in y.iter_mut().zip(v) {
                *yx += c * vx;
            }
        }
        let n = norm(&y);
        for x in &mut y {
            *x /= n;
        }
        vecs.push(y);
    }
    (vals, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lanczos_matches_dense_on_tridiagonal() {
        let n = 400;
        let mut m = Mat::<f64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = (i % 13) as f64 * 0.7;
            if i + 1 < n {
                m[(i, i + 1)] = -0.3;
                m[(i + 1, i)] = -0.3;
            }
        }
        let (dense_vals, _) = eigh_dense(&m);
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..n {
                let mut acc = m[(i, i)] * x[i];
                if i > 0 {
                    acc += m[(i, i - 1)] * x[i - 1];
                }
                if i + 1 < n {
                    acc += m[(i, i + 1)] * x[i + 1];
                }
                y[i] = acc;
            }
        };
        let (vals, vecs) = lanczos_lowest(&apply, n, 5, 160);
        for j in 0..5 {
            assert!(
                (vals[j] - dense_vals[j]).abs() < 1e-9,
                "lanczos {} vs dense {}",
                vals[j],
                dense_vals[j]
            );
            // Residual check ‖Av − θv‖.
            let mut av = vec![0.0; n];
            apply(&vecs[j], &mut av);
            let res: f64 = av
                .iter()
                .zip(&vecs[j])
                .map(|(a, v)| (a - vals[j] * v).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-8, "residual {res}");
        }
    }
}

//! Small dense factorizations for the normal-equation solves inside IRLS and
//! for drawing correlated Gaussians.

use ndarray::Array2;

use crate::scalar::Scalar;

/// Lower Cholesky factor of a symmetric positive definite matrix, or `None`
/// when a non-positive pivot shows up.
pub fn cholesky<F: Scalar>(a: &Array2<F>) -> Option<Array2<F>> {
    let m = a.nrows();
    if a.ncols() != m {
        return None;
    }
    let mut l = Array2::<F>::zeros((m, m));
    for j in 0..m {
        let mut diag = a[[j, j]];
        for k in 0..j {
            diag -= l[[j, k]] * l[[j, k]];
        }
        if !(diag > F::zero()) || !diag.is_finite() {
            return None;
        }
        let ljj = diag.sqrt();
        l[[j, j]] = ljj;
        for i in (j + 1)..m {
            let mut s = a[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = s / ljj;
        }
    }
    Some(l)
}

/// Outcome of a rank-revealing solve that refused to produce an answer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singular {
    /// Smallest over largest pivot of the equilibrated matrix at the point of failure.
    pub pivot_ratio: f64,
}

/// Solves `A x = b` for symmetric positive semi-definite `A` (row-major, `m × m`)
/// with a diagonally pivoted Cholesky factorization on the equilibrated matrix.
///
/// The system is rejected as singular when a pivot falls below
/// [`Scalar::singular_ratio`] times the leading pivot, i.e. when the condition
/// estimate exceeds roughly `1e12`.
pub fn solve_spd_pivoted<F: Scalar>(a: &[F], m: usize, b: &[F]) -> Result<Vec<F>, Singular> {
    assert_eq!(a.len(), m * m);
    assert_eq!(b.len(), m);
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut scale = Vec::with_capacity(m);
    for i in 0..m {
        let d = a[i * m + i];
        if !(d > F::zero()) || !d.is_finite() {
            return Err(Singular { pivot_ratio: 0.0 });
        }
        scale.push(F::one() / d.sqrt());
    }
    let mut l: Vec<F> = (0..m * m)
        .map(|idx| a[idx] * scale[idx / m] * scale[idx % m])
        .collect();
    let mut perm: Vec<usize> = (0..m).collect();
    let threshold = F::singular_ratio();
    let mut lead = F::zero();

    for k in 0..m {
        let mut q = k;
        let mut best = l[k * m + k];
        for i in (k + 1)..m {
            let d = l[i * m + i];
            if d > best {
                best = d;
                q = i;
            }
        }
        if k == 0 {
            lead = best;
        }
        if !(best > lead * threshold) || !best.is_finite() {
            return Err(Singular {
                pivot_ratio: (best / lead).to_f64_lossy().max(0.0),
            });
        }
        if q != k {
            for j in 0..m {
                l.swap(k * m + j, q * m + j);
            }
            for i in 0..m {
                l.swap(i * m + k, i * m + q);
            }
            perm.swap(k, q);
        }
        let lkk = best.sqrt();
        l[k * m + k] = lkk;
        for i in (k + 1)..m {
            l[i * m + k] /= lkk;
        }
        for i in (k + 1)..m {
            let lik = l[i * m + k];
            if lik == F::zero() {
                continue;
            }
            for j in (k + 1)..=i {
                let v = l[i * m + j] - lik * l[j * m + k];
                l[i * m + j] = v;
                l[j * m + i] = v;
            }
        }
    }

    // L L^T z = P D b, then x = D P^T z
    let mut z: Vec<F> = perm.iter().map(|&src| b[src] * scale[src]).collect();
    for i in 0..m {
        let mut s = z[i];
        for k in 0..i {
            s -= l[i * m + k] * z[k];
        }
        z[i] = s / l[i * m + i];
    }
    for i in (0..m).rev() {
        let mut s = z[i];
        for k in (i + 1)..m {
            s -= l[k * m + i] * z[k];
        }
        z[i] = s / l[i * m + i];
    }
    let mut x = vec![F::zero(); m];
    for (pos, &src) in perm.iter().enumerate() {
        x[src] = z[pos] * scale[src];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn cholesky_reconstructs() {
        let a: Array2<f64> = array![[4.0, 2.0, 0.4], [2.0, 5.0, 1.0], [0.4, 1.0, 3.0]];
        let l = cholesky(&a).unwrap();
        let back = l.dot(&l.t());
        for (x, y) in back.iter().zip(a.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = array![[1.0, 2.0], [2.0, 1.0]];
        assert!(cholesky(&a).is_none());
    }

    #[test]
    fn pivoted_solve_matches_direct() {
        let a = [4.0, 2.0, 0.4, 2.0, 5.0, 1.0, 0.4, 1.0, 3.0];
        let b = [1.0, -2.0, 0.5];
        let x = solve_spd_pivoted(&a, 3, &b).unwrap();
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| a[i * 3 + j] * x[j]).sum();
            assert!((r - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn pivoted_solve_flags_collinear() {
        // third column is the sum of the first two
        let a = [1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 2.0];
        let err = solve_spd_pivoted(&a, 3, &[1.0, 1.0, 2.0]).unwrap_err();
        assert!(err.pivot_ratio < 1e-12);
    }

    #[test]
    fn pivoted_solve_badly_scaled_but_regular() {
        let a = [1e8, 0.0, 0.0, 1e-6];
        let x: Vec<f64> = solve_spd_pivoted(&a, 2, &[1e8, 1e-6]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }
}

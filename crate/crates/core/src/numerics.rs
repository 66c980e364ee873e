//! Dense real-matrix primitives: positive/negative splitting, symmetric
//! eigendecomposition, SPD linear solves, and the Kronecker-vectorized
//! Sylvester reference solver.
//!
//! Everything here is a pure function over `ndarray::Array2<f64>` values.
//! Inputs are rejected if they contain NaN or infinite entries; tolerances
//! are relative to `max(1, ||·||_F)` so they behave sanely near zero.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Relative tolerance for the symmetry check on inputs that are symmetric
/// by construction.
const SYMMETRY_TOL: f64 = 1e-10;

/// Frobenius norm.
pub fn frob(a: &Array2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `max(1, ||a||_F)`, the denominator used by every relative bound here.
pub fn frob_floor(a: &Array2<f64>) -> f64 {
    frob(a).max(1.0)
}

/// Rejects matrices containing NaN or infinite entries.
pub fn ensure_finite(name: &str, a: &Array2<f64>) -> Result<()> {
    for ((i, j), &v) in a.indexed_iter() {
        if !v.is_finite() {
            return Err(Error::invalid(format!(
                "{name}[{i},{j}] = {v} is not finite"
            )));
        }
    }
    Ok(())
}

fn ensure_square(name: &str, a: &Array2<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::invalid(format!(
            "{name} must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

fn ensure_symmetric(name: &str, a: &Array2<f64>) -> Result<()> {
    ensure_square(name, a)?;
    let scale = frob_floor(a);
    for i in 0..a.nrows() {
        for j in (i + 1)..a.ncols() {
            let gap = (a[(i, j)] - a[(j, i)]).abs();
            if gap > SYMMETRY_TOL * scale {
                return Err(Error::invalid(format!(
                    "{name} is not symmetric: |{name}[{i},{j}] - {name}[{j},{i}]| = {gap:e} \
                     exceeds {SYMMETRY_TOL:e} relative"
                )));
            }
        }
    }
    Ok(())
}

/// Splits a matrix into entrywise nonnegative parts `(pos, neg)` with
/// `pos - neg = a` and `pos + neg = |a|`.
pub fn pos_neg_split(a: &Array2<f64>) -> Result<(Array2<f64>, Array2<f64>)> {
    ensure_finite("a", a)?;
    let pos = a.mapv(|v| (v.abs() + v) / 2.0);
    let neg = a.mapv(|v| (v.abs() - v) / 2.0);
    Ok((pos, neg))
}

/// Symmetric eigendecomposition by the cyclic Jacobi method.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvector columns, so `a * q_j = lambda_j * q_j`. The input is checked
/// for symmetry and then symmetrized as `(A + A^T)/2` to absorb roundoff
/// accumulated upstream.
pub fn sym_eig(a: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    ensure_finite("a", a)?;
    ensure_symmetric("a", a)?;
    let n = a.nrows();

    let mut m = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = (a[(i, j)] + a[(j, i)]) / 2.0;
        }
    }
    let mut q = Array2::<f64>::eye(n);

    let scale = frob(&m).max(1.0);
    let stop = 1e-15 * scale;
    const MAX_SWEEPS: usize = 100;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if (2.0 * off).sqrt() <= stop {
            converged = true;
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apq = m[(p, r)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                // Jacobi rotation that annihilates m[p,r].
                let theta = (m[(r, r)] - m[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkr = m[(k, r)];
                    m[(k, p)] = c * mkp - s * mkr;
                    m[(k, r)] = s * mkp + c * mkr;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mrk = m[(r, k)];
                    m[(p, k)] = c * mpk - s * mrk;
                    m[(r, k)] = s * mpk + c * mrk;
                }
                for k in 0..n {
                    let qkp = q[(k, p)];
                    let qkr = q[(k, r)];
                    q[(k, p)] = c * qkp - s * qkr;
                    q[(k, r)] = s * qkp + c * qkr;
                }
            }
        }
    }
    if !converged {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        return Err(Error::numeric(format!(
            "jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps \
             (off-diagonal norm {:e}, n = {n})",
            (2.0 * off).sqrt()
        )));
    }

    // Sort ascending, permuting eigenvector columns alongside.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = Array1::from_iter(order.iter().map(|&i| m[(i, i)]));
    let mut vectors = Array2::<f64>::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, dst)] = q[(k, src)];
        }
    }
    Ok((values, vectors))
}

/// Cholesky factorization of a symmetric positive definite matrix.
/// Returns the lower-triangular factor; a non-positive pivot is reported
/// with its index and value.
fn cholesky(a: &Array2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    let mut l = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) {
            return Err(Error::numeric(format!(
                "matrix is not positive definite: pivot {j} = {d:e}"
            )));
        }
        let dj = d.sqrt();
        l[(j, j)] = dj;
        for i in (j + 1)..n {
            let mut v = a[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / dj;
        }
    }
    Ok(l)
}

fn solve_with_cholesky(l: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let n = l.nrows();
    let m = b.ncols();
    let mut x = b.clone();
    // L y = b
    for col in 0..m {
        for i in 0..n {
            let mut v = x[(i, col)];
            for k in 0..i {
                v -= l[(i, k)] * x[(k, col)];
            }
            x[(i, col)] = v / l[(i, i)];
        }
        // L^T x = y
        for i in (0..n).rev() {
            let mut v = x[(i, col)];
            for k in (i + 1)..n {
                v -= l[(k, i)] * x[(k, col)];
            }
            x[(i, col)] = v / l[(i, i)];
        }
    }
    x
}

/// Solves `A X = B` for symmetric positive definite `A` via Cholesky.
pub fn solve_spd(a: &Array2<f64>, b: &Array2<f64>) -> Result<Array2<f64>> {
    ensure_finite("a", a)?;
    ensure_finite("b", b)?;
    ensure_symmetric("a", a)?;
    if a.nrows() != b.nrows() {
        return Err(Error::invalid(format!(
            "row mismatch: a is {}x{}, b has {} rows",
            a.nrows(),
            a.ncols(),
            b.nrows()
        )));
    }
    let l = cholesky(a)?;
    Ok(solve_with_cholesky(&l, b))
}

/// LU factorization with partial pivoting; in-place, returns the pivot
/// permutation. Kept independent of the Cholesky path so the Sylvester
/// reference solve below shares no code with the production solve.
fn lu_solve(mut a: Array2<f64>, mut b: Array1<f64>) -> Result<Array1<f64>> {
    let n = a.nrows();
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[(col, col)].abs();
        for r in (col + 1)..n {
            let v = a[(r, col)].abs();
            if v > best {
                best = v;
                pivot = r;
            }
        }
        if best <= f64::MIN_POSITIVE {
            return Err(Error::numeric(format!(
                "singular system: no usable pivot in column {col} (|pivot| = {best:e})"
            )));
        }
        if pivot != col {
            for c in 0..n {
                a.swap((col, c), (pivot, c));
            }
            b.swap(col, pivot);
        }
        let d = a[(col, col)];
        for r in (col + 1)..n {
            let f = a[(r, col)] / d;
            if f == 0.0 {
                continue;
            }
            a[(r, col)] = f;
            for c in (col + 1)..n {
                a[(r, c)] -= f * a[(col, c)];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = b;
    for i in (0..n).rev() {
        let mut v = x[i];
        for c in (i + 1)..n {
            v -= a[(i, c)] * x[c];
        }
        x[i] = v / a[(i, i)];
    }
    Ok(x)
}

/// Largest `d*K` the dense Kronecker construction will accept.
pub const SYLVESTER_ORACLE_CAP: usize = 4096;

/// Reference solver for the continuous Sylvester equation `A X + X B = C`
/// built from the explicit `(dK) x (dK)` Kronecker system
/// `[I ⊗ A + B^T ⊗ I] vec(X) = vec(C)`.
///
/// This is a validation path for [`crate::daimc::solve_sylvester`]; it is
/// size-capped and solved densely with LU, so keep it out of production
/// loops.
pub fn sylvester_kron_oracle(
    a: &Array2<f64>,
    b: &Array2<f64>,
    c: &Array2<f64>,
) -> Result<Array2<f64>> {
    ensure_finite("a", a)?;
    ensure_finite("b", b)?;
    ensure_finite("c", c)?;
    ensure_symmetric("a", a)?;
    ensure_symmetric("b", b)?;
    let d = a.nrows();
    let k = b.nrows();
    if c.nrows() != d || c.ncols() != k {
        return Err(Error::invalid(format!(
            "c must be {d}x{k}, got {}x{}",
            c.nrows(),
            c.ncols()
        )));
    }
    let n = d * k;
    if n > SYLVESTER_ORACLE_CAP {
        return Err(Error::invalid(format!(
            "dense Sylvester system of size {n} exceeds the cap {SYLVESTER_ORACLE_CAP}"
        )));
    }

    // vec() stacks columns: entry (i, j) of X sits at index j*d + i.
    let mut system = Array2::<f64>::zeros((n, n));
    for j in 0..k {
        for i in 0..d {
            let row = j * d + i;
            for i2 in 0..d {
                system[(row, j * d + i2)] += a[(i, i2)];
            }
            for j2 in 0..k {
                system[(row, j2 * d + i)] += b[(j2, j)];
            }
        }
    }
    let mut rhs = Array1::<f64>::zeros(n);
    for j in 0..k {
        for i in 0..d {
            rhs[j * d + i] = c[(i, j)];
        }
    }
    let x = lu_solve(system, rhs)?;
    let mut out = Array2::<f64>::zeros((d, k));
    for j in 0..k {
        for i in 0..d {
            out[(i, j)] = x[j * d + i];
        }
    }

    let residual = frob(&(a.dot(&out) + out.dot(b) - c));
    if residual > 1e-8 * frob_floor(c) {
        return Err(Error::numeric(format!(
            "Sylvester reference residual {residual:e} exceeds 1e-8 relative \
             (d = {d}, K = {k})"
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn split_separates_signs() {
        let (pos, neg) = pos_neg_split(&array![[1.0, -2.0]]).unwrap();
        assert_eq!(pos, array![[1.0, 0.0]]);
        assert_eq!(neg, array![[0.0, 2.0]]);

        let (pos, neg) = pos_neg_split(&array![[0.0]]).unwrap();
        assert_eq!(pos, array![[0.0]]);
        assert_eq!(neg, array![[0.0]]);

        let (pos, neg) = pos_neg_split(&array![[-3.5, 4.0]]).unwrap();
        assert_eq!(pos, array![[0.0, 4.0]]);
        assert_eq!(neg, array![[3.5, 0.0]]);
    }

    #[test]
    fn split_rejects_non_finite() {
        assert!(pos_neg_split(&array![[f64::NAN]]).is_err());
        assert!(pos_neg_split(&array![[f64::INFINITY, 0.0]]).is_err());
    }

    #[test]
    fn eig_diagonal_matrix() {
        let (vals, vecs) = sym_eig(&array![[2.0, 0.0], [0.0, 3.0]]).unwrap();
        assert!((vals[0] - 2.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        // Columns of the identity, in eigenvalue order.
        assert!((vecs[(0, 0)].abs() - 1.0).abs() < 1e-12);
        assert!((vecs[(1, 1)].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_exchange_matrix() {
        let (vals, _) = sym_eig(&array![[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_scalar() {
        let (vals, vecs) = sym_eig(&array![[5.0]]).unwrap();
        assert_eq!(vals[0], 5.0);
        assert_eq!(vecs[(0, 0)], 1.0);
    }

    #[test]
    fn eig_rejects_asymmetric() {
        assert!(sym_eig(&array![[0.0, 1.0], [0.0, 0.0]]).is_err());
    }

    #[test]
    fn spd_identity_returns_rhs() {
        let b = array![[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]];
        let x = solve_spd(&Array2::eye(3), &b).unwrap();
        assert!(frob(&(&x - &b)) < 1e-12);
    }

    #[test]
    fn spd_scalar() {
        let x = solve_spd(&array![[2.0]], &array![[6.0]]).unwrap();
        assert!((x[(0, 0)] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn spd_diagonal_backsubstitution() {
        let x = solve_spd(&array![[4.0, 0.0], [0.0, 2.0]], &array![[4.0], [4.0]]).unwrap();
        assert!((x[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((x[(1, 0)] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn spd_reports_offending_pivot() {
        let err = solve_spd(&array![[1.0, 0.0], [0.0, -1.0]], &array![[1.0], [1.0]]).unwrap_err();
        assert!(err.to_string().contains("pivot 1"), "got: {err}");
    }

    #[test]
    fn oracle_scalar() {
        let x = sylvester_kron_oracle(&array![[1.0]], &array![[1.0]], &array![[3.0]]).unwrap();
        assert!((x[(0, 0)] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn oracle_zero_a_inverts_b() {
        // A = 0 and B = I reduce to X = C.
        let c = array![[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]];
        let x = sylvester_kron_oracle(&Array2::zeros((3, 3)), &Array2::eye(2), &c).unwrap();
        assert!(frob(&(&x - &c)) < 1e-10);
    }

    #[test]
    fn oracle_decoupled_rows() {
        let x = sylvester_kron_oracle(
            &array![[2.0, 0.0], [0.0, 2.0]],
            &array![[1.0]],
            &array![[3.0], [6.0]],
        )
        .unwrap();
        assert!((x[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((x[(1, 0)] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_rejects_oversize() {
        let d = 70;
        let a = Array2::<f64>::eye(d);
        let b = Array2::<f64>::eye(d);
        let c = Array2::<f64>::zeros((d, d));
        assert!(sylvester_kron_oracle(&a, &b, &c).is_err());
    }
}

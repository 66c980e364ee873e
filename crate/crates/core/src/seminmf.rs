//! Single-view semi-NMF: `X ~ U V^T` with `V >= 0` and `U` unconstrained.
//!
//! Alternates the closed-form least-squares basis update with the
//! multiplicative latent update built on positive/negative splits. Used
//! directly as a comparison method on concatenated views and as the
//! initializer for the multi-view factorization.

use ndarray::{Array2, Zip};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::numerics::{ensure_finite, frob, pos_neg_split, solve_spd};

/// Guard added to the multiplicative-update denominator.
pub const UPDATE_EPS: f64 = 1e-10;

/// Ridge added to `V^T V` before the basis solve.
pub const BASIS_RIDGE: f64 = 1e-12;

/// Factor pair plus the objective history of the run that produced it.
#[derive(Debug, Clone)]
pub struct SemiNmfState {
    /// Basis, features x k, unconstrained sign.
    pub u: Array2<f64>,
    /// Latent features, instances x k, entrywise nonnegative.
    pub v: Array2<f64>,
    /// `||X - U V^T||_F^2` for the current factors.
    pub objective: f64,
    /// Objective after initialization and after each iteration.
    pub objective_trace: Vec<f64>,
    /// Set when a zero column of `V` forced the ridge to carry a basis solve.
    pub degenerate_v: bool,
}

pub fn objective(x: &Array2<f64>, u: &Array2<f64>, v: &Array2<f64>) -> f64 {
    let r = x - &u.dot(&v.t());
    frob(&r).powi(2)
}

/// `V_jk * sqrt(num_jk / (den_jk + eps))`, shared with the multi-view
/// latent update so the single-view case collapses to the same arithmetic.
pub(crate) fn multiplicative_step(
    v: &Array2<f64>,
    num: &Array2<f64>,
    den: &Array2<f64>,
    eps: f64,
) -> Array2<f64> {
    let mut out = v.clone();
    Zip::from(&mut out).and(num).and(den).for_each(|o, &n, &d| {
        *o *= (n / (d + eps)).sqrt();
    });
    out
}

fn update_u_flagged(x: &Array2<f64>, v: &Array2<f64>) -> Result<(Array2<f64>, bool)> {
    let k = v.ncols();
    let degenerate = (0..k).any(|c| v.column(c).iter().all(|&e| e == 0.0));
    let mut gram = v.t().dot(v);
    for i in 0..k {
        gram[(i, i)] += BASIS_RIDGE;
    }
    let rhs = x.dot(v).t().to_owned();
    let ut = solve_spd(&gram, &rhs)?;
    Ok((ut.t().to_owned(), degenerate))
}

/// Least-squares-optimal basis for fixed `V`: `U = X V (V^T V)^-1`,
/// ridge-regularized.
pub fn update_u(x: &Array2<f64>, v: &Array2<f64>) -> Result<Array2<f64>> {
    ensure_finite("x", x)?;
    ensure_finite("v", v)?;
    if x.ncols() != v.nrows() {
        return Err(Error::invalid(format!(
            "x has {} instances but v has {} rows",
            x.ncols(),
            v.nrows()
        )));
    }
    Ok(update_u_flagged(x, v)?.0)
}

/// One multiplicative latent update for fixed `U`. Nonnegativity is
/// preserved and zero entries stay zero.
pub fn update_v(x: &Array2<f64>, u: &Array2<f64>, v: &Array2<f64>) -> Result<Array2<f64>> {
    ensure_finite("x", x)?;
    ensure_finite("u", u)?;
    ensure_finite("v", v)?;
    if v.iter().any(|&e| e < 0.0) {
        return Err(Error::invalid("v must be entrywise nonnegative"));
    }
    let (p_pos, p_neg) = pos_neg_split(&x.t().dot(u))?;
    let (g_pos, g_neg) = pos_neg_split(&u.t().dot(u))?;
    let num = p_pos + v.dot(&g_neg);
    let den = p_neg + v.dot(&g_pos);
    Ok(multiplicative_step(v, &num, &den, UPDATE_EPS))
}

/// Initial latent matrix: absolute standard normals, each row scaled by the
/// mean absolute value of the matching instance column so the first basis
/// solve starts at a sane magnitude.
pub(crate) fn init_latent(x: &Array2<f64>, k: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = x.nrows() as f64;
    let n = x.ncols();
    let mut v = Array2::<f64>::zeros((n, k));
    for j in 0..n {
        let scale = x.column(j).iter().map(|e| e.abs()).sum::<f64>() / m;
        for c in 0..k {
            let z: f64 = StandardNormal.sample(&mut rng);
            v[(j, c)] = z.abs() * scale;
        }
    }
    v
}

/// Alternates the two updates until the relative objective change drops
/// below `tol` or `max_iter` is reached. Non-convergence is not an error;
/// the trace tells the story.
pub fn fit(
    x: &Array2<f64>,
    k: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<SemiNmfState> {
    ensure_finite("x", x)?;
    if k == 0 || k > x.nrows().min(x.ncols()) {
        return Err(Error::invalid(format!(
            "k = {k} must lie in [1, min({}, {})]",
            x.nrows(),
            x.ncols()
        )));
    }
    let mut v = init_latent(x, k, seed);
    let (mut u, mut degenerate) = update_u_flagged(x, &v)?;
    let mut obj = objective(x, &u, &v);
    let mut trace = vec![obj];

    for _ in 0..max_iter {
        v = update_v(x, &u, &v)?;
        let (nu, flag) = update_u_flagged(x, &v)?;
        u = nu;
        degenerate |= flag;
        let prev = obj;
        obj = objective(x, &u, &v);
        trace.push(obj);
        if (prev - obj).abs() / prev.max(f64::MIN_POSITIVE) < tol {
            break;
        }
    }
    Ok(SemiNmfState {
        u,
        v,
        objective: obj,
        objective_trace: trace,
        degenerate_v: degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn basis_update_scalar_exact_fit() {
        let u = update_u(&array![[2.0]], &array![[1.0]]).unwrap();
        assert!((u[(0, 0)] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn basis_update_orthonormal_latent() {
        // V with orthonormal columns makes the normal equations trivial.
        let v = array![[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]];
        let x = array![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]];
        let u = update_u(&x, &v).unwrap();
        let expect = x.dot(&v);
        assert!(frob(&(&u - &expect)) < 1e-9);
    }

    #[test]
    fn basis_update_averages_duplicate_columns() {
        let u = update_u(&array![[1.0, 3.0]], &array![[1.0], [1.0]]).unwrap();
        assert!((u[(0, 0)] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn latent_update_scalar_sqrt2() {
        let v = update_v(&array![[2.0]], &array![[1.0]], &array![[1.0]]).unwrap();
        assert!((v[(0, 0)] - 2.0_f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn latent_update_keeps_zeros() {
        let x = array![[1.0, -1.0], [2.0, 0.5]];
        let u = array![[0.3], [-0.7]];
        let v = array![[0.0], [1.2]];
        let v2 = update_v(&x, &u, &v).unwrap();
        assert_eq!(v2[(0, 0)], 0.0);
    }

    #[test]
    fn latent_update_fixed_point() {
        // X = U = V = 1 makes numerator and denominator both 1.
        let v = update_v(&array![[1.0]], &array![[1.0]], &array![[1.0]]).unwrap();
        assert!((v[(0, 0)] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fit_recovers_planted_factorization() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let (m, n, k) = (8, 24, 2);
        let u_true = Array2::from_shape_fn((m, k), |_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z
        });
        let v_true = Array2::from_shape_fn((n, k), |_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z.abs()
        });
        let x = u_true.dot(&v_true.t());
        let st = fit(&x, k, 1e-12, 2000, 7).unwrap();
        let xf2 = frob(&x).powi(2);
        assert!(
            st.objective <= 1e-6 * xf2,
            "objective {} vs bound {}",
            st.objective,
            1e-6 * xf2
        );
    }

    #[test]
    fn fit_rank_one_near_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u_true = Array2::from_shape_fn((5, 1), |_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z
        });
        let v_true = Array2::from_shape_fn((12, 1), |_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z.abs() + 0.1
        });
        let x = u_true.dot(&v_true.t());
        let st = fit(&x, 1, 1e-12, 2000, 11).unwrap();
        assert!(st.objective <= 1e-6 * frob(&x).powi(2));
    }

    #[test]
    fn fit_zero_budget_returns_initialization() {
        let x = array![[1.0, 2.0], [3.0, 4.0]];
        let st = fit(&x, 1, 1e-6, 0, 5).unwrap();
        assert_eq!(st.objective_trace.len(), 1);
        let v0 = init_latent(&x, 1, 5);
        assert_eq!(st.v, v0);
    }

    #[test]
    fn fit_rejects_oversized_k() {
        let x = array![[1.0, 2.0], [3.0, 4.0]];
        assert!(fit(&x, 3, 1e-6, 10, 0).is_err());
    }
}

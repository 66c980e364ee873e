//! Doubly aligned incomplete multi-view factorization.
//!
//! Minimizes, over per-view bases `U_i`, a shared nonnegative latent matrix
//! `V`, and per-view regression matrices `B_i`:
//!
//! ```text
//! sum_i  ||(X_i - U_i V^T) W_i||_F^2
//!        + alpha * ( ||B_i^T U_i - I||_F^2 + beta * ||B_i||_{2,1} )
//! ```
//!
//! where `W_i` is the diagonal 0/1 weight matrix of view `i`'s present
//! instances. The first term ties instances together through the shared
//! `V`; the second aligns every view's basis to a common identity target
//! through row-sparse regression, which keeps views comparable even when
//! many instances are missing.
//!
//! One outer iteration updates each view's basis (a continuous Sylvester
//! equation solved by eigendecomposition of the small Gram factor), takes
//! one reweighted least-squares step on each regression matrix, runs the
//! multiplicative latent update to convergence, and rescales columns so V
//! is column-stochastic.

use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::dataset::MultiViewDataset;
use crate::error::{Error, Result};
use crate::io;
use crate::numerics::{ensure_finite, frob, frob_floor, solve_spd, sym_eig};
use crate::seminmf;

/// Ridge used whenever a nominally positive definite system turns out
/// singular in floating point.
const RIDGE: f64 = 1e-12;

/// Weights and stopping rules for [`fit`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Hyperparams {
    /// Basis-alignment weight.
    pub alpha: f64,
    /// Row-sparsity weight inside the alignment block.
    pub beta: f64,
    /// Subspace dimension; set to the number of clusters.
    pub k: usize,
    pub outer_tol: f64,
    pub inner_tol: f64,
    pub outer_max: usize,
    pub inner_max: usize,
    /// Guard for multiplicative denominators and regression row norms.
    pub epsilon: f64,
    pub seed: u64,
    /// Solve the regression update as the full feature-space system instead
    /// of the small-system form. Cross-check path; the results agree.
    #[serde(default)]
    pub direct_regression: bool,
}

impl Hyperparams {
    pub fn new(k: usize) -> Self {
        Self {
            alpha: 1e1,
            beta: 1e0,
            k,
            outer_tol: 1e-6,
            inner_tol: 1e-5,
            outer_max: 200,
            inner_max: 50,
            epsilon: 1e-10,
            seed: 0,
            direct_regression: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha < 0.0 || self.beta < 0.0 {
            return Err(Error::invalid("alpha and beta must be nonnegative"));
        }
        if self.k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if !(self.outer_tol > 0.0) || !(self.inner_tol > 0.0) {
            return Err(Error::invalid("tolerances must be positive"));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::invalid("epsilon must be positive"));
        }
        Ok(())
    }
}

/// Factors of a fitted model plus the objective history of the run.
#[derive(Debug, Clone)]
pub struct FactorizationState {
    /// Per-view basis, `d_i x k`.
    pub basis: Vec<Array2<f64>>,
    /// Shared latent features, `N x k`, entrywise nonnegative.
    pub latent: Array2<f64>,
    /// Per-view regression matrices, `d_i x k`.
    pub regression: Vec<Array2<f64>>,
    /// Objective recorded after each outer iteration's normalization,
    /// starting with the initial value. Drives the stopping rule.
    pub objective_trace: Vec<f64>,
    /// Objective recorded immediately before each normalization. This is
    /// the trace whose nonincrease the update steps guarantee; the column
    /// rescaling afterwards changes the alignment term.
    pub pre_normalization_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn annotate(e: Error, ctx: &str) -> Error {
    match e {
        Error::InvalidInput(m) => Error::InvalidInput(format!("{ctx}: {m}")),
        Error::Numeric(m) => Error::Numeric(format!("{ctx}: {m}")),
        other => other,
    }
}

/// Zeroes the columns whose weight is 0; leaves others untouched.
fn mask_columns(x: &Array2<f64>, w: &Array1<f64>) -> Array2<f64> {
    let mut out = x.clone();
    for (j, &wj) in w.iter().enumerate() {
        if wj == 0.0 {
            out.column_mut(j).fill(0.0);
        }
    }
    out
}

/// Zeroes the rows whose weight is 0; leaves others untouched.
fn mask_rows(m: &Array2<f64>, w: &Array1<f64>) -> Array2<f64> {
    let mut out = m.clone();
    for (j, &wj) in w.iter().enumerate() {
        if wj == 0.0 {
            out.row_mut(j).fill(0.0);
        }
    }
    out
}

fn check_shapes(ds: &MultiViewDataset, st: &FactorizationState, k: usize) -> Result<()> {
    if st.basis.len() != ds.n_views() || st.regression.len() != ds.n_views() {
        return Err(Error::invalid(format!(
            "state has {} basis / {} regression matrices for {} views",
            st.basis.len(),
            st.regression.len(),
            ds.n_views()
        )));
    }
    if st.latent.nrows() != ds.n_instances || st.latent.ncols() != k {
        return Err(Error::invalid(format!(
            "latent is {}x{}, expected {}x{k}",
            st.latent.nrows(),
            st.latent.ncols(),
            ds.n_instances
        )));
    }
    for (i, (u, b)) in st.basis.iter().zip(&st.regression).enumerate() {
        let d = ds.views[i].nrows();
        if u.nrows() != d || u.ncols() != k || b.nrows() != d || b.ncols() != k {
            return Err(Error::invalid(format!(
                "view {i}: basis {}x{}, regression {}x{}, expected {d}x{k}",
                u.nrows(),
                u.ncols(),
                b.nrows(),
                b.ncols()
            )));
        }
    }
    Ok(())
}

/// Sum of a matrix's row-wise Euclidean norms.
pub fn l21_norm(b: &Array2<f64>) -> f64 {
    b.rows()
        .into_iter()
        .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
        .sum()
}

/// The weighted reconstruction part of the objective,
/// `sum_i ||(X_i - U_i V^T) W_i||_F^2`. This is also the inner-loop
/// stopping functional for the latent update.
pub fn data_objective(ds: &MultiViewDataset, basis: &[Array2<f64>], latent: &Array2<f64>) -> f64 {
    let mut total = 0.0;
    for (i, x) in ds.views.iter().enumerate() {
        let w = ds.indicator.weight_diag(i);
        let xm = mask_columns(x, &w);
        let vm = mask_rows(latent, &w);
        let r = &xm - &basis[i].dot(&vm.t());
        total += frob(&r).powi(2);
    }
    total
}

/// Full objective value for a state.
pub fn objective(ds: &MultiViewDataset, st: &FactorizationState, hp: &Hyperparams) -> Result<f64> {
    check_shapes(ds, st, hp.k)?;
    let mut total = data_objective(ds, &st.basis, &st.latent);
    for (u, b) in st.basis.iter().zip(&st.regression) {
        let mut align = b.t().dot(u);
        for c in 0..hp.k {
            align[(c, c)] -= 1.0;
        }
        total += hp.alpha * (frob(&align).powi(2) + hp.beta * l21_norm(b));
    }
    Ok(total)
}

/// Solves the continuous Sylvester equation `A X + X B = C` for symmetric
/// positive semidefinite `A` (large side) and `B` (small side).
///
/// `B` is eigendecomposed, the right-hand side is rotated into its
/// eigenbasis, and each column is a shifted SPD solve `(A + lambda_j I)`.
/// A tiny ridge is retried when a shift is numerically singular. The
/// residual is verified before returning.
pub fn solve_sylvester(
    a: &Array2<f64>,
    b: &Array2<f64>,
    c: &Array2<f64>,
) -> Result<Array2<f64>> {
    ensure_finite("a", a)?;
    ensure_finite("c", c)?;
    let d = a.nrows();
    let k = b.nrows();
    if c.nrows() != d || c.ncols() != k {
        return Err(Error::invalid(format!(
            "c must be {d}x{k}, got {}x{}",
            c.nrows(),
            c.ncols()
        )));
    }
    let (eigvals, q) = sym_eig(b)?;
    let c_rot = c.dot(&q);
    let mut x_rot = Array2::<f64>::zeros((d, k));
    for j in 0..k {
        let rhs = c_rot
            .column(j)
            .to_owned()
            .into_shape_with_order((d, 1))
            .expect("column reshape");
        let mut shifted = a.clone();
        for r in 0..d {
            shifted[(r, r)] += eigvals[j];
        }
        let col = match solve_spd(&shifted, &rhs) {
            Ok(col) => col,
            Err(_) => {
                for r in 0..d {
                    shifted[(r, r)] += RIDGE;
                }
                solve_spd(&shifted, &rhs).map_err(|e| {
                    annotate(e, &format!("shift {j} (eigenvalue {:e}) singular after ridge", eigvals[j]))
                })?
            }
        };
        for r in 0..d {
            x_rot[(r, j)] = col[(r, 0)];
        }
    }
    let x = x_rot.dot(&q.t());

    let residual = frob(&(a.dot(&x) + x.dot(b) - c));
    if residual > 1e-8 * frob_floor(c) {
        return Err(Error::numeric(format!(
            "Sylvester residual {residual:e} exceeds 1e-8 relative (d = {d}, K = {k})"
        )));
    }
    Ok(x)
}

/// Least-squares basis for a view when the alignment term is off:
/// `U = X W V (V^T W V + ridge I)^-1`.
fn basis_least_squares(xm: &Array2<f64>, vm: &Array2<f64>) -> Result<Array2<f64>> {
    let k = vm.ncols();
    let mut gram = vm.t().dot(vm);
    for i in 0..k {
        gram[(i, i)] += RIDGE;
    }
    let rhs = xm.dot(vm).t().to_owned();
    Ok(solve_spd(&gram, &rhs)?.t().to_owned())
}

/// New basis for one view: the minimizer of the view's quadratic
/// subproblem, found by solving `alpha B B^T U + U (V^T W V) = X W V + alpha B`.
pub fn update_basis(
    ds: &MultiViewDataset,
    st: &FactorizationState,
    hp: &Hyperparams,
    view: usize,
) -> Result<Array2<f64>> {
    check_shapes(ds, st, hp.k)?;
    if view >= ds.n_views() {
        return Err(Error::invalid(format!("view {view} out of range")));
    }
    let w = ds.indicator.weight_diag(view);
    let xm = mask_columns(&ds.views[view], &w);
    let vm = mask_rows(&st.latent, &w);
    if hp.alpha == 0.0 {
        return basis_least_squares(&xm, &vm);
    }
    let b = &st.regression[view];
    let a = b.dot(&b.t()).mapv(|v| v * hp.alpha);
    let gram = vm.t().dot(&vm);
    let c = xm.dot(&vm) + &b.mapv(|v| v * hp.alpha);
    solve_sylvester(&a, &gram, &c)
}

/// Runs the multiplicative latent update until the reconstruction term
/// stops moving (relative change below `inner_tol`) or `inner_max` steps.
/// Nonnegativity is preserved and zero entries stay zero.
pub fn update_latent(
    ds: &MultiViewDataset,
    st: &FactorizationState,
    hp: &Hyperparams,
) -> Result<Array2<f64>> {
    check_shapes(ds, st, hp.k)?;
    if st.latent.iter().any(|&v| v < 0.0) {
        return Err(Error::invalid("latent matrix must be nonnegative"));
    }
    let n_v = ds.n_views();
    let mut weights = Vec::with_capacity(n_v);
    let mut proj_pos = Vec::with_capacity(n_v);
    let mut proj_neg = Vec::with_capacity(n_v);
    let mut gram_pos = Vec::with_capacity(n_v);
    let mut gram_neg = Vec::with_capacity(n_v);
    for i in 0..n_v {
        let w = ds.indicator.weight_diag(i);
        let proj = ds.views[i].t().dot(&st.basis[i]);
        let (pp, pn) = crate::numerics::pos_neg_split(&proj)?;
        proj_pos.push(mask_rows(&pp, &w));
        proj_neg.push(mask_rows(&pn, &w));
        let (gp, gn) = crate::numerics::pos_neg_split(&st.basis[i].t().dot(&st.basis[i]))?;
        gram_pos.push(gp);
        gram_neg.push(gn);
        weights.push(w);
    }

    let mut v = st.latent.clone();
    let mut prev = data_objective(ds, &st.basis, &v);
    for _ in 0..hp.inner_max {
        let shape = (v.nrows(), v.ncols());
        let mut num = Array2::<f64>::zeros(shape);
        let mut den = Array2::<f64>::zeros(shape);
        for i in 0..n_v {
            let vm = mask_rows(&v, &weights[i]);
            num += &(&proj_pos[i] + &vm.dot(&gram_neg[i]));
            den += &(&proj_neg[i] + &vm.dot(&gram_pos[i]));
        }
        v = seminmf::multiplicative_step(&v, &num, &den, hp.epsilon);
        let cur = data_objective(ds, &st.basis, &v);
        let rel = (prev - cur).abs() / prev.max(f64::MIN_POSITIVE);
        prev = cur;
        if rel < hp.inner_tol {
            break;
        }
    }
    Ok(v)
}

/// Row norms of the current regression matrix, floored at `eps`. These are
/// the inverse IRLS weights.
fn floored_row_norms(b: &Array2<f64>, eps: f64) -> Array1<f64> {
    Array1::from_iter(b.rows().into_iter().map(|r| {
        r.iter().map(|v| v * v).sum::<f64>().sqrt().max(eps)
    }))
}

/// Full feature-space regression solve:
/// `B = (U U^T + 0.5 beta D)^-1 U` with `D = diag(1 / floored row norm)`.
/// With `beta = 0` the reweighting drops out and a plain ridge keeps the
/// rank-deficient Gram invertible.
fn regression_direct(u: &Array2<f64>, floored: &Array1<f64>, beta: f64) -> Result<Array2<f64>> {
    let d = u.nrows();
    let mut m = u.dot(&u.t());
    if beta > 0.0 {
        for j in 0..d {
            m[(j, j)] += 0.5 * beta / floored[j];
        }
    } else {
        for j in 0..d {
            m[(j, j)] += RIDGE;
        }
    }
    match solve_spd(&m, u) {
        Ok(b) => Ok(b),
        Err(_) => {
            for j in 0..d {
                m[(j, j)] += RIDGE;
            }
            solve_spd(&m, u).map_err(|e| annotate(e, "regression system singular after ridge"))
        }
    }
}

/// Small-system form of the same solve, rearranged so only a `k x k`
/// system is factored:
/// `B = (2/beta) [D^-1 - D^-1 U (U^T D^-1 U + 0.5 beta I)^-1 U^T D^-1] U`.
fn regression_small_system(
    u: &Array2<f64>,
    floored: &Array1<f64>,
    beta: f64,
) -> Result<Array2<f64>> {
    let k = u.ncols();
    let mut scaled = u.clone();
    for (j, mut row) in scaled.rows_mut().into_iter().enumerate() {
        row.mapv_inplace(|v| v * floored[j]);
    }
    let h = u.t().dot(&scaled);
    let mut g = h.clone();
    for c in 0..k {
        g[(c, c)] += 0.5 * beta;
    }
    let t = match solve_spd(&g, &h) {
        Ok(t) => t,
        Err(_) => {
            for c in 0..k {
                g[(c, c)] += RIDGE;
            }
            solve_spd(&g, &h).map_err(|e| annotate(e, "regression system singular after ridge"))?
        }
    };
    let b = &scaled - &scaled.dot(&t);
    Ok(b.mapv(|v| v * (2.0 / beta)))
}

/// One reweighted least-squares step on a view's regression matrix: the
/// row weights come from the current iterate, then the frozen-weight
/// quadratic is minimized exactly.
pub fn update_regression(
    st: &FactorizationState,
    hp: &Hyperparams,
    view: usize,
) -> Result<Array2<f64>> {
    if view >= st.basis.len() {
        return Err(Error::invalid(format!("view {view} out of range")));
    }
    let u = &st.basis[view];
    let floored = floored_row_norms(&st.regression[view], hp.epsilon);
    if hp.beta == 0.0 || hp.direct_regression {
        regression_direct(u, &floored, hp.beta)
    } else {
        regression_small_system(u, &floored, hp.beta)
    }
}

/// The full feature-space route, regardless of flags. Cross-check twin of
/// [`update_regression`].
pub fn update_regression_direct(
    st: &FactorizationState,
    hp: &Hyperparams,
    view: usize,
) -> Result<Array2<f64>> {
    if view >= st.basis.len() {
        return Err(Error::invalid(format!("view {view} out of range")));
    }
    let floored = floored_row_norms(&st.regression[view], hp.epsilon);
    regression_direct(&st.basis[view], &floored, hp.beta)
}

/// Rescales so each latent column sums to 1, absorbing the scale into the
/// bases; reconstructions `U_i V^T` are unchanged. Returns the indices of
/// all-zero columns, which are left alone.
pub fn normalize(st: &FactorizationState) -> (FactorizationState, Vec<usize>) {
    let mut out = st.clone();
    let mut skipped = Vec::new();
    let k = out.latent.ncols();
    for c in 0..k {
        let sum: f64 = out.latent.column(c).sum();
        if sum > 0.0 {
            out.latent.column_mut(c).mapv_inplace(|v| v / sum);
            for u in &mut out.basis {
                u.column_mut(c).mapv_inplace(|v| v * sum);
            }
        } else {
            skipped.push(c);
        }
    }
    (out, skipped)
}

pub(crate) fn derive_seed(base: u64, stream: u64) -> u64 {
    base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Builds the initial state: each view's latent comes from a single-view
/// factorization of its present instances (missing rows filled with that
/// view's latent column means), averaged across views; bases start from
/// the least-squares solve and regression matrices from the unweighted
/// alignment solve.
fn initialize(ds: &MultiViewDataset, hp: &Hyperparams) -> Result<FactorizationState> {
    let n = ds.n_instances;
    let k = hp.k;
    let mut latent = Array2::<f64>::zeros((n, k));
    for (i, x) in ds.views.iter().enumerate() {
        let present = ds.indicator.present_indices(i);
        let mut x_present = Array2::<f64>::zeros((x.nrows(), present.len()));
        for (jj, &j) in present.iter().enumerate() {
            for r in 0..x.nrows() {
                x_present[(r, jj)] = x[(r, j)];
            }
        }
        let fitted = seminmf::fit(
            &x_present,
            k,
            hp.outer_tol,
            hp.outer_max,
            derive_seed(hp.seed, i as u64),
        )
        .map_err(|e| annotate(e, &format!("initialization of view {i}")))?;
        let col_means: Vec<f64> = (0..k)
            .map(|c| fitted.v.column(c).sum() / present.len() as f64)
            .collect();
        let mut full = Array2::<f64>::zeros((n, k));
        for c in 0..k {
            for row in full.column_mut(c).iter_mut() {
                *row = col_means[c];
            }
        }
        for (jj, &j) in present.iter().enumerate() {
            for c in 0..k {
                full[(j, c)] = fitted.v[(jj, c)];
            }
        }
        latent += &full;
    }
    latent.mapv_inplace(|v| v / ds.n_views() as f64);

    let mut basis = Vec::with_capacity(ds.n_views());
    for (i, x) in ds.views.iter().enumerate() {
        let w = ds.indicator.weight_diag(i);
        let xm = mask_columns(x, &w);
        let vm = mask_rows(&latent, &w);
        basis.push(
            basis_least_squares(&xm, &vm)
                .map_err(|e| annotate(e, &format!("initial basis of view {i}")))?,
        );
    }

    let ones = |d: usize| Array1::<f64>::ones(d);
    let mut regression = Vec::with_capacity(ds.n_views());
    for (i, u) in basis.iter().enumerate() {
        regression.push(
            regression_direct(u, &ones(u.nrows()), hp.beta)
                .map_err(|e| annotate(e, &format!("initial regression of view {i}")))?,
        );
    }

    Ok(FactorizationState {
        basis,
        latent,
        regression,
        objective_trace: Vec::new(),
        pre_normalization_trace: Vec::new(),
        iterations: 0,
        converged: false,
    })
}

/// Runs the alternating optimization. Per outer iteration: every view's
/// basis then regression update, the inner latent loop, the objective
/// snapshot, and the column rescaling. Stops when the recorded objective's
/// relative change drops below `outer_tol` or after `outer_max` iterations.
pub fn fit(ds: &MultiViewDataset, hp: &Hyperparams) -> Result<FactorizationState> {
    hp.validate()?;
    let d_min = ds.views.iter().map(|x| x.nrows()).min().unwrap_or(0);
    if hp.k > ds.n_instances.min(d_min) {
        return Err(Error::invalid(format!(
            "k = {} exceeds min(instances = {}, smallest view dim = {d_min})",
            hp.k, ds.n_instances
        )));
    }
    for i in 0..ds.n_views() {
        let present = ds.indicator.present_count(i);
        if present < hp.k + 1 {
            return Err(Error::invalid(format!(
                "view {i} retains {present} instances, need at least k + 1 = {}",
                hp.k + 1
            )));
        }
    }

    let mut st = initialize(ds, hp)?;
    let initial = objective(ds, &st, hp)?;
    st.objective_trace.push(initial);
    st.pre_normalization_trace.push(initial);

    for iter in 1..=hp.outer_max {
        for i in 0..ds.n_views() {
            st.basis[i] = update_basis(ds, &st, hp, i)
                .map_err(|e| annotate(e, &format!("outer iteration {iter}, basis of view {i}")))?;
            st.regression[i] = update_regression(&st, hp, i).map_err(|e| {
                annotate(e, &format!("outer iteration {iter}, regression of view {i}"))
            })?;
        }
        st.latent = update_latent(ds, &st, hp)
            .map_err(|e| annotate(e, &format!("outer iteration {iter}, latent update")))?;

        let pre = objective(ds, &st, hp)?;
        st.pre_normalization_trace.push(pre);

        let (normalized, _skipped) = normalize(&st);
        st = normalized;

        let post = objective(ds, &st, hp)?;
        let prev = *st.objective_trace.last().expect("trace nonempty");
        st.objective_trace.push(post);
        st.iterations = iter;
        if (prev - post).abs() / prev.max(f64::MIN_POSITIVE) < hp.outer_tol {
            st.converged = true;
            break;
        }
    }
    Ok(st)
}

/// Writes the factor matrices as CSV files plus a JSON sidecar holding the
/// hyperparameters, shapes, and objective traces.
pub fn save_factors(dir: &Path, st: &FactorizationState, hp: &Hyperparams) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (i, u) in st.basis.iter().enumerate() {
        io::write_matrix_csv(&dir.join(format!("basis_{i}.csv")), u)?;
    }
    io::write_matrix_csv(&dir.join("latent.csv"), &st.latent)?;
    for (i, b) in st.regression.iter().enumerate() {
        io::write_matrix_csv(&dir.join(format!("regression_{i}.csv")), b)?;
    }
    let sidecar = serde_json::json!({
        "hyperparams": hp,
        "shapes": {
            "basis": st.basis.iter().map(|u| vec![u.nrows(), u.ncols()]).collect::<Vec<_>>(),
            "latent": vec![st.latent.nrows(), st.latent.ncols()],
            "regression": st.regression.iter().map(|b| vec![b.nrows(), b.ncols()]).collect::<Vec<_>>(),
        },
        "objective_trace": st.objective_trace,
        "pre_normalization_trace": st.pre_normalization_trace,
        "iterations": st.iterations,
        "converged": st.converged,
    });
    std::fs::write(
        dir.join("factors.json"),
        serde_json::to_string_pretty(&sidecar)
            .map_err(|e| Error::format(format!("sidecar serialization: {e}")))?,
    )?;
    Ok(())
}

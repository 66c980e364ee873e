//! Multi-view data with per-instance presence: the indicator matrix and its
//! diagonal weight matrices, random incompleteness masks, planted-cluster
//! synthesis, and the on-disk manifest format.
//!
//! A dataset holds one `d_i x N` matrix per view (features x instances).
//! The indicator matrix marks which instances are present in which view;
//! a masked instance contributes nothing to any factorization because the
//! weight matrix zeroes its column, and its stored data is zeroed as well
//! so the assumption is auditable.

use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::numerics::ensure_finite;

/// Binary presence matrix, one row per view, one column per instance.
/// Every instance must be present in at least one view.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorMatrix {
    entries: Array2<u8>,
}

impl IndicatorMatrix {
    pub fn new(entries: Array2<u8>) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::invalid("indicator matrix must be nonempty"));
        }
        for ((v, j), &e) in entries.indexed_iter() {
            if e > 1 {
                return Err(Error::invalid(format!(
                    "indicator[{v},{j}] = {e}, entries must be 0 or 1"
                )));
            }
        }
        for j in 0..entries.ncols() {
            if (0..entries.nrows()).all(|v| entries[(v, j)] == 0) {
                return Err(Error::constraint(format!(
                    "instance {j} is missing from every view"
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn complete(n_views: usize, n_instances: usize) -> Self {
        Self {
            entries: Array2::ones((n_views, n_instances)),
        }
    }

    pub fn n_views(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_instances(&self) -> usize {
        self.entries.ncols()
    }

    pub fn is_present(&self, view: usize, instance: usize) -> bool {
        self.entries[(view, instance)] == 1
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().all(|&e| e == 1)
    }

    /// Number of instances present in a view.
    pub fn present_count(&self, view: usize) -> usize {
        (0..self.n_instances())
            .filter(|&j| self.is_present(view, j))
            .count()
    }

    /// Indices of the instances present in a view, ascending.
    pub fn present_indices(&self, view: usize) -> Vec<usize> {
        (0..self.n_instances())
            .filter(|&j| self.is_present(view, j))
            .collect()
    }

    /// The diagonal of the view's weight matrix as a 0/1 vector.
    pub fn weight_diag(&self, view: usize) -> Array1<f64> {
        Array1::from_iter((0..self.n_instances()).map(|j| f64::from(self.entries[(view, j)])))
    }

    pub fn entries(&self) -> &Array2<u8> {
        &self.entries
    }
}

/// Per-view feature matrices sharing an instance axis, with optional
/// ground-truth labels.
#[derive(Debug, Clone)]
pub struct MultiViewDataset {
    pub views: Vec<Array2<f64>>,
    pub n_instances: usize,
    pub labels: Option<Vec<usize>>,
    pub indicator: IndicatorMatrix,
}

impl MultiViewDataset {
    pub fn new(
        views: Vec<Array2<f64>>,
        labels: Option<Vec<usize>>,
        indicator: IndicatorMatrix,
    ) -> Result<Self> {
        if views.is_empty() {
            return Err(Error::invalid("a dataset needs at least one view"));
        }
        let n = views[0].ncols();
        if n < 2 {
            return Err(Error::invalid("a dataset needs at least two instances"));
        }
        for (i, v) in views.iter().enumerate() {
            if v.ncols() != n {
                return Err(Error::invalid(format!(
                    "view {i} has {} instances, view 0 has {n}",
                    v.ncols()
                )));
            }
            if v.nrows() == 0 {
                return Err(Error::invalid(format!("view {i} has zero features")));
            }
            ensure_finite(&format!("view {i}"), v)?;
        }
        if indicator.n_views() != views.len() || indicator.n_instances() != n {
            return Err(Error::invalid(format!(
                "indicator is {}x{}, expected {}x{n}",
                indicator.n_views(),
                indicator.n_instances(),
                views.len()
            )));
        }
        if let Some(ref l) = labels {
            if l.len() != n {
                return Err(Error::invalid(format!(
                    "labels have length {}, expected {n}",
                    l.len()
                )));
            }
        }
        Ok(Self {
            views,
            n_instances: n,
            labels,
            indicator,
        })
    }

    /// A complete dataset: every instance present in every view.
    pub fn complete(views: Vec<Array2<f64>>, labels: Option<Vec<usize>>) -> Result<Self> {
        let n_views = views.len();
        let n = views.first().map(|v| v.ncols()).unwrap_or(0);
        Self::new(views, labels, IndicatorMatrix::complete(n_views, n))
    }

    pub fn n_views(&self) -> usize {
        self.views.len()
    }

    /// Restricts the dataset to its first `m` views, dropping instances that
    /// are present in none of them (labels are subset alongside). This is the
    /// view-number study transform: masks are drawn against the full view
    /// set, then clustering runs on what the retained views can actually see.
    pub fn take_views(&self, m: usize) -> Result<MultiViewDataset> {
        if m == 0 || m > self.n_views() {
            return Err(Error::invalid(format!(
                "cannot take {m} of {} views",
                self.n_views()
            )));
        }
        let keep: Vec<usize> = (0..self.n_instances)
            .filter(|&j| (0..m).any(|v| self.indicator.is_present(v, j)))
            .collect();
        if keep.len() < 2 {
            return Err(Error::constraint(format!(
                "only {} instances survive restriction to {m} views",
                keep.len()
            )));
        }
        let views: Vec<Array2<f64>> = (0..m).map(|v| select_columns(&self.views[v], &keep)).collect();
        let mut ind = Array2::<u8>::zeros((m, keep.len()));
        for v in 0..m {
            for (jj, &j) in keep.iter().enumerate() {
                ind[(v, jj)] = u8::from(self.indicator.is_present(v, j));
            }
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| keep.iter().map(|&j| l[j]).collect());
        MultiViewDataset::new(views, labels, IndicatorMatrix::new(ind)?)
    }
}

fn select_columns(m: &Array2<f64>, cols: &[usize]) -> Array2<f64> {
    let mut out = Array2::<f64>::zeros((m.nrows(), cols.len()));
    for (jj, &j) in cols.iter().enumerate() {
        for i in 0..m.nrows() {
            out[(i, jj)] = m[(i, j)];
        }
    }
    out
}

/// The view's weight matrix as a dense `N x N` diagonal 0/1 matrix.
/// Satisfies `W = W W^T` (idempotent), so masking a factorization residual
/// once is the same as masking it twice.
pub fn build_weight_matrix(indicator: &IndicatorMatrix, view: usize) -> Result<Array2<f64>> {
    if view >= indicator.n_views() {
        return Err(Error::invalid(format!(
            "view {view} out of range, dataset has {} views",
            indicator.n_views()
        )));
    }
    Ok(Array2::from_diag(&indicator.weight_diag(view)))
}

/// Randomly masks `round(rate * N)` instances per view (half-up rounding),
/// redrawing up to 1000 times if a draw would remove some instance from
/// every view. Masked columns are zeroed in the stored matrices.
pub fn apply_incomplete_rate(
    ds: &MultiViewDataset,
    rate: f64,
    seed: u64,
) -> Result<MultiViewDataset> {
    if !(0.0..=0.5).contains(&rate) {
        return Err(Error::invalid(format!(
            "incomplete rate must lie in [0, 0.5], got {rate}"
        )));
    }
    if !ds.indicator.is_complete() {
        return Err(Error::invalid(
            "apply_incomplete_rate expects a complete dataset",
        ));
    }
    let n = ds.n_instances;
    let n_views = ds.n_views();
    let remove_per_view = (rate * n as f64).round() as usize;
    if remove_per_view == 0 {
        return Ok(ds.clone());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const MAX_ATTEMPTS: usize = 1000;
    for _ in 0..MAX_ATTEMPTS {
        let mut entries = Array2::<u8>::ones((n_views, n));
        for v in 0..n_views {
            // Partial Fisher-Yates: the first `remove_per_view` slots of a
            // shuffled index vector are the masked instances.
            let mut idx: Vec<usize> = (0..n).collect();
            for t in 0..remove_per_view {
                let swap = rng.random_range(t..n);
                idx.swap(t, swap);
            }
            for &j in &idx[..remove_per_view] {
                entries[(v, j)] = 0;
            }
        }
        let covered = (0..n).all(|j| (0..n_views).any(|v| entries[(v, j)] == 1));
        if !covered {
            continue;
        }
        let indicator = IndicatorMatrix::new(entries)?;
        let mut views = ds.views.clone();
        for (v, view) in views.iter_mut().enumerate() {
            for j in 0..n {
                if !indicator.is_present(v, j) {
                    view.column_mut(j).fill(0.0);
                }
            }
        }
        return MultiViewDataset::new(views, ds.labels.clone(), indicator);
    }
    Err(Error::constraint(format!(
        "could not mask {remove_per_view} of {n} instances per view across {n_views} view(s) \
         while keeping every instance covered ({MAX_ATTEMPTS} attempts)"
    )))
}

/// Parameters for the planted-cluster generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_per_cluster: usize,
    pub k_clusters: usize,
    pub n_views: usize,
    pub dims: Vec<usize>,
    pub separation: f64,
    pub noise_sd: f64,
    pub seed: u64,
}

/// Draws a complete multi-view dataset with planted clusters: every view
/// places `k_clusters` centers uniformly in `[0, separation]^d` and emits
/// instances as center plus isotropic Gaussian noise. Views share the
/// cluster memberships but have independent centers and noise.
pub fn synth_planted(spec: &SynthSpec) -> Result<MultiViewDataset> {
    if spec.k_clusters < 2 {
        return Err(Error::invalid("need at least 2 clusters"));
    }
    if spec.n_per_cluster == 0 {
        return Err(Error::invalid("need at least 1 instance per cluster"));
    }
    if spec.dims.len() != spec.n_views {
        return Err(Error::invalid(format!(
            "dims has {} entries for {} views",
            spec.dims.len(),
            spec.n_views
        )));
    }
    if spec.dims.iter().any(|&d| d == 0) {
        return Err(Error::invalid("every view needs at least one feature"));
    }
    if !(spec.separation > 0.0) {
        return Err(Error::invalid("separation must be positive"));
    }
    if spec.noise_sd < 0.0 {
        return Err(Error::invalid("noise_sd must be nonnegative"));
    }

    let n = spec.n_per_cluster * spec.k_clusters;
    let labels: Vec<usize> = (0..n).map(|j| j / spec.n_per_cluster).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut views = Vec::with_capacity(spec.n_views);
    for &d in &spec.dims {
        let mut centers = Array2::<f64>::zeros((d, spec.k_clusters));
        for c in 0..spec.k_clusters {
            for i in 0..d {
                centers[(i, c)] = rng.random_range(0.0..spec.separation);
            }
        }
        let mut x = Array2::<f64>::zeros((d, n));
        for (j, &label) in labels.iter().enumerate() {
            for i in 0..d {
                let z: f64 = StandardNormal.sample(&mut rng);
                x[(i, j)] = centers[(i, label)] + spec.noise_sd * z;
            }
        }
        views.push(x);
    }
    MultiViewDataset::complete(views, Some(labels))
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestView {
    path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    views: Vec<ManifestView>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<String>,
}

/// Loads a dataset from a JSON manifest listing per-view CSV files and an
/// optional labels file. A column that is entirely NaN in a view encodes a
/// missing instance; a NaN inside an otherwise present column is an error.
pub fn load_manifest(path: &Path) -> Result<MultiViewDataset> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::format(format!("cannot read manifest {}: {e}", path.display())))?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| Error::format(format!("manifest {}: {e}", path.display())))?;
    if manifest.views.is_empty() {
        return Err(Error::format("manifest lists no views"));
    }
    let base = path.parent().unwrap_or_else(|| Path::new("."));

    let mut raw_views = Vec::new();
    for view in &manifest.views {
        raw_views.push(io::read_matrix_csv(&base.join(&view.path))?);
    }

    let n = raw_views[0].ncols();
    let mismatched: Vec<String> = manifest
        .views
        .iter()
        .zip(&raw_views)
        .filter(|(_, m)| m.ncols() != n)
        .map(|(v, m)| format!("{} ({} columns)", v.path, m.ncols()))
        .collect();
    if !mismatched.is_empty() {
        return Err(Error::format(format!(
            "views disagree on instance count: {} has {n} columns but {}",
            manifest.views[0].path,
            mismatched.join(", ")
        )));
    }

    let mut entries = Array2::<u8>::ones((raw_views.len(), n));
    let mut views = Vec::with_capacity(raw_views.len());
    for (v, raw) in raw_views.into_iter().enumerate() {
        let mut clean = raw.clone();
        for j in 0..n {
            let col = raw.column(j);
            let nan_count = col.iter().filter(|x| x.is_nan()).count();
            if nan_count == col.len() {
                entries[(v, j)] = 0;
                clean.column_mut(j).fill(0.0);
            } else if nan_count > 0 {
                let row = col.iter().position(|x| x.is_nan()).unwrap();
                return Err(Error::format(format!(
                    "view {} ({}): NaN at row {row}, column {j} of a present instance",
                    v, manifest.views[v].path
                )));
            } else if let Some((row, &bad)) = col.iter().enumerate().find(|(_, x)| !x.is_finite()) {
                return Err(Error::format(format!(
                    "view {} ({}): non-finite value {bad} at row {row}, column {j}",
                    v, manifest.views[v].path
                )));
            }
        }
        views.push(clean);
    }

    let labels = match &manifest.labels {
        Some(rel) => {
            let l = io::read_labels_csv(&base.join(rel))?;
            if l.len() != n {
                return Err(Error::format(format!(
                    "labels file {rel} has {} entries, expected {n}",
                    l.len()
                )));
            }
            Some(l)
        }
        None => None,
    };

    MultiViewDataset::new(views, labels, IndicatorMatrix::new(entries)?)
}

/// Writes a dataset in the manifest format under `dir`, returning the
/// manifest path. Missing instances are written as all-NaN columns, so
/// `load_manifest` reproduces the dataset bit-exact.
pub fn save_manifest(ds: &MultiViewDataset, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let mut manifest = Manifest {
        views: Vec::new(),
        labels: None,
    };
    for (v, view) in ds.views.iter().enumerate() {
        let file = format!("view_{v}.csv");
        let mut masked = view.clone();
        for j in 0..ds.n_instances {
            if !ds.indicator.is_present(v, j) {
                masked.column_mut(j).fill(f64::NAN);
            }
        }
        io::write_matrix_csv(&dir.join(&file), &masked)?;
        manifest.views.push(ManifestView {
            path: file,
            name: None,
        });
    }
    if let Some(ref labels) = ds.labels {
        io::write_labels_csv(&dir.join("labels.csv"), labels)?;
        manifest.labels = Some("labels.csv".to_string());
    }
    let path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::format(format!("manifest serialization: {e}")))?;
    std::fs::write(&path, json)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn toy(n_views: usize, d: usize, n: usize) -> MultiViewDataset {
        let views = (0..n_views)
            .map(|v| {
                Array2::from_shape_fn((d, n), |(i, j)| (v * 100 + i * 10 + j) as f64 * 0.1 + 1.0)
            })
            .collect();
        MultiViewDataset::complete(views, None).unwrap()
    }

    #[test]
    fn weight_matrix_mirrors_indicator_row() {
        let ind = IndicatorMatrix::new(array![[1, 0, 1], [1, 1, 1]]).unwrap();
        let w = build_weight_matrix(&ind, 0).unwrap();
        assert_eq!(w, Array2::from_diag(&array![1.0, 0.0, 1.0]));
    }

    #[test]
    fn complete_view_weight_is_identity() {
        let ind = IndicatorMatrix::complete(1, 4);
        let w = build_weight_matrix(&ind, 0).unwrap();
        assert_eq!(w, Array2::eye(4));
    }

    #[test]
    fn weight_matrix_is_idempotent() {
        let ind = IndicatorMatrix::new(array![[1, 0, 1, 0], [0, 1, 0, 1]]).unwrap();
        for v in 0..2 {
            let w = build_weight_matrix(&ind, v).unwrap();
            assert_eq!(w.dot(&w), w);
        }
    }

    #[test]
    fn weight_matrix_rejects_bad_view() {
        let ind = IndicatorMatrix::complete(2, 3);
        assert!(build_weight_matrix(&ind, 2).is_err());
    }

    #[test]
    fn rate_zero_changes_nothing() {
        let ds = toy(2, 3, 6);
        let masked = apply_incomplete_rate(&ds, 0.0, 7).unwrap();
        assert!(masked.indicator.is_complete());
        assert_eq!(masked.views[0], ds.views[0]);
    }

    #[test]
    fn rate_half_removes_half_per_view() {
        let ds = toy(3, 4, 10);
        let masked = apply_incomplete_rate(&ds, 0.5, 11).unwrap();
        for v in 0..3 {
            assert_eq!(masked.indicator.present_count(v), 5);
        }
    }

    #[test]
    fn masking_is_deterministic() {
        let ds = toy(2, 3, 8);
        let a = apply_incomplete_rate(&ds, 0.25, 99).unwrap();
        let b = apply_incomplete_rate(&ds, 0.25, 99).unwrap();
        assert_eq!(a.indicator, b.indicator);
        assert_eq!(a.views[0], b.views[0]);
    }

    #[test]
    fn masked_columns_are_zeroed() {
        let ds = toy(2, 3, 8);
        let masked = apply_incomplete_rate(&ds, 0.5, 3).unwrap();
        for v in 0..2 {
            for j in 0..8 {
                if !masked.indicator.is_present(v, j) {
                    assert!(masked.views[v].column(j).iter().all(|&x| x == 0.0));
                }
            }
        }
    }

    #[test]
    fn single_view_masking_is_infeasible() {
        let ds = toy(1, 3, 8);
        let err = apply_incomplete_rate(&ds, 0.5, 1).unwrap_err();
        assert!(matches!(err, Error::Constraint(_)), "got {err:?}");
    }

    #[test]
    fn rate_out_of_range_rejected() {
        let ds = toy(2, 3, 8);
        assert!(apply_incomplete_rate(&ds, 0.6, 1).is_err());
        assert!(apply_incomplete_rate(&ds, -0.1, 1).is_err());
    }

    #[test]
    fn synth_zero_noise_collapses_clusters() {
        let spec = SynthSpec {
            n_per_cluster: 4,
            k_clusters: 2,
            n_views: 2,
            dims: vec![3, 5],
            separation: 2.0,
            noise_sd: 0.0,
            seed: 5,
        };
        let ds = synth_planted(&spec).unwrap();
        let labels = ds.labels.as_ref().unwrap();
        for v in 0..2 {
            for j in 1..ds.n_instances {
                if labels[j] == labels[0] {
                    assert_eq!(ds.views[v].column(j), ds.views[v].column(0));
                }
            }
        }
    }

    #[test]
    fn synth_labels_shape() {
        let spec = SynthSpec {
            n_per_cluster: 3,
            k_clusters: 4,
            n_views: 1,
            dims: vec![2],
            separation: 1.0,
            noise_sd: 0.1,
            seed: 0,
        };
        let ds = synth_planted(&spec).unwrap();
        let labels = ds.labels.unwrap();
        assert_eq!(labels.len(), 12);
        let mut distinct = labels.clone();
        distinct.sort_unstable();
        distinct.dedup();
        assert_eq!(distinct, vec![0, 1, 2, 3]);
    }

    #[test]
    fn synth_seeds_differ_but_labels_match() {
        let mut spec = SynthSpec {
            n_per_cluster: 3,
            k_clusters: 2,
            n_views: 1,
            dims: vec![4],
            separation: 1.0,
            noise_sd: 0.2,
            seed: 1,
        };
        let a = synth_planted(&spec).unwrap();
        spec.seed = 2;
        let b = synth_planted(&spec).unwrap();
        assert_ne!(a.views[0], b.views[0]);
        assert_eq!(a.labels, b.labels);
    }

    #[test]
    fn synth_rejects_zero_dims() {
        let spec = SynthSpec {
            n_per_cluster: 3,
            k_clusters: 2,
            n_views: 2,
            dims: vec![4, 0],
            separation: 1.0,
            noise_sd: 0.2,
            seed: 1,
        };
        assert!(synth_planted(&spec).is_err());
    }

    #[test]
    fn manifest_roundtrip_no_nan() {
        let dir = tempfile::tempdir().unwrap();
        let ds = toy(2, 3, 5);
        let path = save_manifest(&ds, dir.path()).unwrap();
        let back = load_manifest(&path).unwrap();
        assert!(back.indicator.is_complete());
        assert_eq!(back.views[0], ds.views[0]);
        assert_eq!(back.views[1], ds.views[1]);
    }

    #[test]
    fn manifest_nan_column_becomes_missing() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("manifest.json"),
            r#"{"views": [{"path": "v0.csv"}, {"path": "v1.csv"}]}"#,
        )
        .unwrap();
        std::fs::write(dir.path().join("v0.csv"), "1,2,3\n4,5,6\n").unwrap();
        std::fs::write(dir.path().join("v1.csv"), "1,nan,3\n4,nan,6\n").unwrap();
        let ds = load_manifest(&dir.path().join("manifest.json")).unwrap();
        assert!(ds.indicator.is_present(0, 1));
        assert!(!ds.indicator.is_present(1, 1));
        assert_eq!(ds.views[1].column(1).to_vec(), vec![0.0, 0.0]);
    }

    #[test]
    fn manifest_partial_nan_is_error() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("manifest.json"),
            r#"{"views": [{"path": "v0.csv"}]}"#,
        )
        .unwrap();
        std::fs::write(dir.path().join("v0.csv"), "1,nan\n4,5\n").unwrap();
        let err = load_manifest(&dir.path().join("manifest.json")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 0") && msg.contains("column 1"), "got: {msg}");
    }

    #[test]
    fn manifest_inconsistent_n_names_views() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("manifest.json"),
            r#"{"views": [{"path": "v0.csv"}, {"path": "v1.csv"}]}"#,
        )
        .unwrap();
        std::fs::write(dir.path().join("v0.csv"), "1,2,3\n").unwrap();
        std::fs::write(dir.path().join("v1.csv"), "1,2\n").unwrap();
        let err = load_manifest(&dir.path().join("manifest.json")).unwrap_err();
        assert!(err.to_string().contains("v1.csv"), "got: {err}");
    }

    #[test]
    fn manifest_wrong_label_length_is_error() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("manifest.json"),
            r#"{"views": [{"path": "v0.csv"}], "labels": "labels.csv"}"#,
        )
        .unwrap();
        std::fs::write(dir.path().join("v0.csv"), "1,2,3\n").unwrap();
        std::fs::write(dir.path().join("labels.csv"), "0\n1\n").unwrap();
        assert!(load_manifest(&dir.path().join("manifest.json")).is_err());
    }

    #[test]
    fn take_views_drops_uncovered_instances() {
        let views = vec![
            array![[1.0, 2.0, 3.0, 4.0]],
            array![[5.0, 6.0, 7.0, 8.0]],
        ];
        let ind = IndicatorMatrix::new(array![[1, 0, 1, 0], [0, 1, 1, 1]]).unwrap();
        let ds = MultiViewDataset::new(views, Some(vec![0, 1, 0, 1]), ind).unwrap();
        let sub = ds.take_views(1).unwrap();
        assert_eq!(sub.n_instances, 2);
        assert_eq!(sub.views[0], array![[1.0, 3.0]]);
        assert_eq!(sub.labels, Some(vec![0, 0]));
        assert!(sub.indicator.is_complete());
    }
}

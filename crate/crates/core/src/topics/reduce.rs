use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::embed::{vectors_from_responses, VectorRequest, VectorResponse};
use super::{EmbeddingMatrix, TopicError};
use crate::adapter::{self, AdapterConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedMatrix {
    pub rows: Vec<Vec<f64>>,
    pub dim: usize,
    pub reducer_id: String,
    /// Fraction of total variance per component (empty for external reducers).
    pub explained_variance_ratio: Vec<f64>,
}

/// Flips `v` so its largest-magnitude entry (first on ties) is positive.
fn canonical_sign(v: &mut DVector<f64>) {
    let mut pivot = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[pivot].abs() {
            pivot = i;
        }
    }
    if v.len() > 0 && v[pivot] < 0.0 {
        v.neg_mut();
    }
}

fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = eig.eigenvectors.select_columns(&order);
    (values, vectors)
}

/// Principal component projection onto the top `target_dim` axes.
///
/// Axes come from the covariance matrix, or from the Gram matrix when the
/// dimension exceeds the row count; both give the same subspace.
pub fn reduce_pca(embeddings: &EmbeddingMatrix, target_dim: usize) -> Result<ReducedMatrix, TopicError> {
    let n = embeddings.len();
    let d = embeddings.dim;
    if target_dim == 0 || target_dim > d {
        return Err(TopicError::Reduction(format!("target_dim {target_dim} must be in 1..={d}")));
    }
    if n < target_dim + 1 {
        return Err(TopicError::Reduction(format!(
            "PCA to {target_dim} dimensions needs at least {} rows, got {n}",
            target_dim + 1
        )));
    }
    let mut x = embeddings.to_dmatrix();
    let mean = x.row_mean();
    for mut row in x.row_iter_mut() {
        row -= &mean;
    }
    let total: f64 = x.iter().map(|v| v * v).sum();
    let scale = embeddings.rows.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    if total <= 1e-24 * scale * scale * (n * d) as f64 {
        return Err(TopicError::Reduction(
            "degenerate covariance: all points are identical; skip reduction (reducer \"none\")".into(),
        ));
    }

    let mut axes = DMatrix::zeros(d, target_dim);
    let values;
    if d <= n {
        let (vals, vecs) = sorted_eigen(x.transpose() * &x);
        for c in 0..target_dim {
            let mut v = vecs.column(c).into_owned();
            canonical_sign(&mut v);
            axes.set_column(c, &v);
        }
        values = vals;
    } else {
        let (vals, vecs) = sorted_eigen(&x * x.transpose());
        for c in 0..target_dim {
            let mut v = x.transpose() * vecs.column(c);
            let norm = v.norm();
            if norm > 0.0 {
                v /= norm;
            }
            canonical_sign(&mut v);
            axes.set_column(c, &v);
        }
        values = vals;
    }
    let projected = &x * &axes;
    let explained = values
        .iter()
        .take(target_dim)
        .map(|&l| (l.max(0.0) / total).min(1.0))
        .collect();
    Ok(ReducedMatrix {
        rows: (0..n).map(|i| projected.row(i).iter().copied().collect()).collect(),
        dim: target_dim,
        reducer_id: "pca".into(),
        explained_variance_ratio: explained,
    })
}

/// Reduces through an external adapter (e.g. UMAP). Requests carry
/// `{id, vector, target_dim}`; responses `{id, vector}`.
pub fn reduce_external(
    ids: &[&str],
    embeddings: &EmbeddingMatrix,
    target_dim: usize,
    config: &AdapterConfig,
) -> Result<ReducedMatrix, TopicError> {
    if ids.len() != embeddings.len() {
        return Err(TopicError::Input(format!("{} ids for {} embeddings", ids.len(), embeddings.len())));
    }
    let requests: Vec<VectorRequest> = ids
        .iter()
        .zip(&embeddings.rows)
        .map(|(id, v)| VectorRequest {
            id,
            vector: v,
            target_dim,
        })
        .collect();
    let responses: Vec<VectorResponse> = adapter::call_all(config, &requests)?;
    let rows = vectors_from_responses(responses)?;
    let dim = rows.first().map_or(0, Vec::len);
    Ok(ReducedMatrix {
        rows,
        dim,
        reducer_id: format!("external:{}", config.endpoint),
        explained_variance_ratio: Vec::new(),
    })
}

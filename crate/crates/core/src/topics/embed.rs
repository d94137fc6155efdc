use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::TopicError;
use crate::adapter::{self, AdapterConfig, AdapterError, Keyed};
use crate::termstats::{document_frequencies, smoothed_idf};

pub const BUILTIN_EMBEDDER_ID: &str = "builtin-tfidf-lsa";

const OVERSAMPLE: usize = 10;
const POWER_ITERATIONS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingMatrix {
    pub rows: Vec<Vec<f64>>,
    pub dim: usize,
    pub embedder_id: String,
}

impl EmbeddingMatrix {
    /// Checks the row shape and finiteness.
    pub fn new(rows: Vec<Vec<f64>>, embedder_id: impl Into<String>) -> Result<Self, TopicError> {
        let dim = rows.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(TopicError::Input("embeddings must have positive dimension".into()));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != dim) {
            return Err(TopicError::Input(format!("row {i} has dimension {} (expected {dim})", rows[i].len())));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(TopicError::Input("embeddings contain non-finite values".into()));
        }
        Ok(EmbeddingMatrix {
            rows,
            dim,
            embedder_id: embedder_id.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub(crate) fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows.len(), self.dim, |i, j| self.rows[i][j])
    }
}

type SparseRow = Vec<(usize, f64)>;

fn tfidf_rows(docs: &[&[String]]) -> (Vec<SparseRow>, usize) {
    let df = document_frequencies(docs);
    let mut terms: Vec<&str> = df.keys().copied().collect();
    terms.sort_unstable();
    let index: BTreeMap<&str, usize> = terms.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let n = docs.len();
    let rows = docs
        .par_iter()
        .map(|doc| {
            let mut tf: BTreeMap<usize, usize> = BTreeMap::new();
            for t in doc.iter() {
                *tf.entry(index[t.as_str()]).or_default() += 1;
            }
            tf.into_iter()
                .map(|(j, c)| (j, c as f64 * smoothed_idf(n, df[terms[j]])))
                .collect()
        })
        .collect();
    (rows, terms.len())
}

/// `X * m` for sparse `X` (n x v) and dense `m` (v x l).
fn sparse_mul(x: &[SparseRow], m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(x.len(), m.ncols());
    for (i, row) in x.iter().enumerate() {
        for &(j, w) in row {
            for c in 0..m.ncols() {
                out[(i, c)] += w * m[(j, c)];
            }
        }
    }
    out
}

/// `X^T * m` for sparse `X` (n x v) and dense `m` (n x l).
fn sparse_tmul(x: &[SparseRow], v: usize, m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(v, m.ncols());
    for (i, row) in x.iter().enumerate() {
        for &(j, w) in row {
            for c in 0..m.ncols() {
                out[(j, c)] += w * m[(i, c)];
            }
        }
    }
    out
}

fn orthonormal(m: DMatrix<f64>) -> DMatrix<f64> {
    m.qr().q()
}

/// Rank-`k` document coordinates `X V_k` by randomized truncated SVD.
fn truncated_svd(x: &[SparseRow], v: usize, k: usize, seed: u64) -> DMatrix<f64> {
    let n = x.len();
    let l = (k + OVERSAMPLE).min(n).min(v);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = DMatrix::from_fn(v, l, |_, _| StandardNormal.sample(&mut rng));
    let mut q = orthonormal(sparse_mul(x, &omega));
    for _ in 0..POWER_ITERATIONS {
        let z = orthonormal(sparse_tmul(x, v, &q));
        q = orthonormal(sparse_mul(x, &z));
    }
    // B = Q^T X, kept transposed (v x l).
    let bt = sparse_tmul(x, v, &q);
    let gram = bt.transpose() * &bt;
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    let k = k.min(l);
    let sigma_max = eig.eigenvalues.iter().fold(0.0f64, |m, &e| m.max(e)).max(0.0).sqrt();
    // Right singular vectors V = B^T U / sigma; rows are projected one by one
    // so identical documents get bit-identical coordinates.
    let mut basis = DMatrix::zeros(v, k);
    for (c, &e) in order.iter().take(k).enumerate() {
        let sigma = eig.eigenvalues[e].max(0.0).sqrt();
        if sigma <= 1e-12 * sigma_max {
            continue;
        }
        let mut col = &bt * eig.eigenvectors.column(e) / sigma;
        let pivot = col.iamax();
        if col[pivot] < 0.0 {
            col = -col;
        }
        basis.set_column(c, &col);
    }
    sparse_mul(x, &basis)
}

fn normalize(row: &mut [f64]) {
    let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in row {
            *x /= norm;
        }
    }
}

/// TF-IDF document vectors, optionally projected to `lsa_dim` by truncated
/// SVD, with rows L2-normalized. Documents without stems stay zero rows.
pub fn embed_builtin(docs: &[&[String]], lsa_dim: usize, seed: u64) -> Result<EmbeddingMatrix, TopicError> {
    if docs.len() < 2 {
        return Err(TopicError::Input(format!("embedding needs at least 2 documents, got {}", docs.len())));
    }
    let (sparse, v) = tfidf_rows(docs);
    if v == 0 {
        return Err(TopicError::Input("no document has any terms".into()));
    }
    let mut rows: Vec<Vec<f64>> = if lsa_dim == 0 {
        sparse
            .iter()
            .map(|r| {
                let mut dense = vec![0.0; v];
                for &(j, w) in r {
                    dense[j] = w;
                }
                dense
            })
            .collect()
    } else {
        let coords = truncated_svd(&sparse, v, lsa_dim, seed);
        (0..coords.nrows()).map(|i| coords.row(i).iter().copied().collect()).collect()
    };
    for row in &mut rows {
        normalize(row);
    }
    EmbeddingMatrix::new(rows, BUILTIN_EMBEDDER_ID)
}

#[derive(Debug, Serialize)]
struct TextRequest<'a> {
    id: &'a str,
    text: &'a str,
}

impl Keyed for TextRequest<'_> {
    fn key(&self) -> &str {
        self.id
    }
}

#[derive(Debug, Serialize)]
pub(crate) struct VectorRequest<'a> {
    pub id: &'a str,
    pub vector: &'a [f64],
    pub target_dim: usize,
}

impl Keyed for VectorRequest<'_> {
    fn key(&self) -> &str {
        self.id
    }
}

#[derive(Debug, Deserialize)]
pub(crate) struct VectorResponse {
    pub id: String,
    pub vector: Vec<f64>,
}

impl Keyed for VectorResponse {
    fn key(&self) -> &str {
        &self.id
    }
}

/// Checks adapter vectors share one positive dimension.
pub(crate) fn vectors_from_responses(responses: Vec<VectorResponse>) -> Result<Vec<Vec<f64>>, AdapterError> {
    let dim = responses.first().map_or(0, |r| r.vector.len());
    for r in &responses {
        if r.vector.is_empty() || r.vector.len() != dim {
            return Err(AdapterError::protocol(
                format!("vector for id {:?} has dimension {} (expected {dim})", r.id, r.vector.len()),
                serde_json::to_string(&r.vector).unwrap_or_default(),
            ));
        }
        if r.vector.iter().any(|x| !x.is_finite()) {
            return Err(AdapterError::protocol(format!("vector for id {:?} is not finite", r.id), ""));
        }
    }
    Ok(responses.into_iter().map(|r| r.vector).collect())
}

/// Embeds `(id, text)` pairs through an external adapter answering `{id, vector}`.
pub fn embed_external(items: &[(String, String)], config: &AdapterConfig) -> Result<EmbeddingMatrix, TopicError> {
    let requests: Vec<TextRequest> = items.iter().map(|(id, text)| TextRequest { id, text }).collect();
    let responses: Vec<VectorResponse> = adapter::call_all(config, &requests)?;
    let rows = vectors_from_responses(responses)?;
    EmbeddingMatrix::new(rows, format!("external:{}", config.endpoint))
}

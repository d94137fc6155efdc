use serde::{Deserialize, Serialize};

use super::SparseVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    pub k: usize,
    /// Row-major K x K cosine similarities.
    pub values: Vec<Vec<f64>>,
}

impl SimilarityMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }
}

/// Pairwise cosine similarity; a zero vector has similarity 0 to everything,
/// itself included.
pub fn topic_similarity(vectors: &[SparseVector]) -> SimilarityMatrix {
    let k = vectors.len();
    let norms: Vec<f64> = vectors.iter().map(SparseVector::norm).collect();
    let mut values = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let s = if norms[i] == 0.0 || norms[j] == 0.0 {
                0.0
            } else if i == j {
                1.0
            } else {
                (vectors[i].dot(&vectors[j]) / (norms[i] * norms[j])).clamp(-1.0, 1.0)
            };
            values[i][j] = s;
            values[j][i] = s;
        }
    }
    SimilarityMatrix { k, values }
}

/// Agglomeration of nodes `left` and `right` into node `K + step index`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeStep {
    pub left: usize,
    pub right: usize,
    pub distance: f64,
    /// Number of topics under the new node.
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicHierarchy {
    /// Leaves are topics `0..K`; step `i` creates node `K + i`.
    pub steps: Vec<MergeStep>,
}

/// Average-linkage agglomerative clustering on `1 - cosine`.
///
/// Ties go to the pair whose smaller node id is smallest, then the pair's
/// larger id.
pub fn topic_hierarchy(vectors: &[SparseVector]) -> TopicHierarchy {
    let k = vectors.len();
    let sim = topic_similarity(vectors);
    // Distances between active nodes, indexed by node id.
    let mut dist: Vec<Vec<f64>> = vec![vec![0.0; 2 * k]; 2 * k];
    for i in 0..k {
        for j in 0..k {
            dist[i][j] = (1.0 - sim.get(i, j)).max(0.0);
        }
    }
    let mut size = vec![1usize; 2 * k];
    let mut active: Vec<usize> = (0..k).collect();
    let mut steps = Vec::with_capacity(k.saturating_sub(1));
    while active.len() > 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        for (x, &a) in active.iter().enumerate() {
            for &b in &active[x + 1..] {
                let d = dist[a][b];
                if best.map_or(true, |(bd, _, _)| d < bd) {
                    best = Some((d, a, b));
                }
            }
        }
        let (d, a, b) = best.expect("at least two active nodes");
        let node = k + steps.len();
        size[node] = size[a] + size[b];
        for &c in &active {
            if c != a && c != b {
                let merged = (size[a] as f64 * dist[a][c] + size[b] as f64 * dist[b][c]) / size[node] as f64;
                dist[node][c] = merged;
                dist[c][node] = merged;
            }
        }
        steps.push(MergeStep {
            left: a,
            right: b,
            distance: d,
            size: size[node],
        });
        active.retain(|&c| c != a && c != b);
        active.push(node);
    }
    TopicHierarchy { steps }
}

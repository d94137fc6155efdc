//! HDBSCAN over Euclidean points.
//!
//! Core distances count the point itself as its first neighbour. The mutual
//! reachability MST is built with Prim's algorithm on the implicit dense
//! graph, turned into a single-linkage tree, condensed with
//! `min_cluster_size`, and flat clusters are chosen by excess of mass with
//! the root excluded. When the root never splits into two large children,
//! the root itself is kept as one cluster of its densest points.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::TopicError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HdbscanParams {
    pub min_cluster_size: usize,
    pub min_samples: usize,
}

impl Default for HdbscanParams {
    fn default() -> Self {
        HdbscanParams {
            min_cluster_size: 15,
            min_samples: 15,
        }
    }
}

impl HdbscanParams {
    pub fn new(min_cluster_size: usize) -> Self {
        HdbscanParams {
            min_cluster_size,
            min_samples: min_cluster_size,
        }
    }

    pub fn validate(&self) -> Result<(), TopicError> {
        if self.min_cluster_size < 2 {
            return Err(TopicError::Input(format!(
                "min_cluster_size must be at least 2, got {}",
                self.min_cluster_size
            )));
        }
        if self.min_samples < 1 {
            return Err(TopicError::Input("min_samples must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    /// -1 for noise, otherwise `0..k`.
    pub labels: Vec<i32>,
    pub k: usize,
    /// Membership strength in `[0, 1]`; 0 for noise.
    pub probabilities: Vec<f64>,
}

impl ClusterAssignment {
    pub fn all_noise(n: usize) -> Self {
        ClusterAssignment {
            labels: vec![-1; n],
            k: 0,
            probabilities: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            if l >= 0 {
                sizes[l as usize] += 1;
            }
        }
        sizes
    }

    pub fn noise_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l < 0).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MstEdge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn check_points(points: &[Vec<f64>]) -> Result<(), TopicError> {
    if points.is_empty() {
        return Err(TopicError::Input("clustering needs at least one point".into()));
    }
    let dim = points[0].len();
    for (i, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(TopicError::Input(format!("point {i} has dimension {} (expected {dim})", p.len())));
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(TopicError::Input(format!("point {i} has non-finite coordinates")));
        }
    }
    Ok(())
}

/// Distance from each point to its `min_samples`-th nearest neighbour, the
/// point itself being the first.
pub fn core_distances(points: &[Vec<f64>], min_samples: usize) -> Vec<f64> {
    let k = min_samples.clamp(1, points.len().max(1)) - 1;
    points
        .par_iter()
        .map(|p| {
            let mut d: Vec<f64> = points.iter().map(|q| euclidean(p, q)).collect();
            let (_, kth, _) = d.select_nth_unstable_by(k, f64::total_cmp);
            *kth
        })
        .collect()
}

/// Minimum spanning tree of the mutual reachability graph, edges in the
/// order Prim's algorithm adds them (starting from point 0).
pub fn mutual_reachability_mst(points: &[Vec<f64>], min_samples: usize) -> Result<Vec<MstEdge>, TopicError> {
    check_points(points)?;
    let core = core_distances(points, min_samples);
    Ok(prim(points, &core))
}

fn prim(points: &[Vec<f64>], core: &[f64]) -> Vec<MstEdge> {
    let n = points.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut source = vec![0usize; n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    let mut current = 0;
    for _ in 1..n {
        in_tree[current] = true;
        let mut next = usize::MAX;
        let mut next_weight = f64::INFINITY;
        for j in 0..n {
            if in_tree[j] {
                continue;
            }
            let mr = euclidean(&points[current], &points[j]).max(core[current]).max(core[j]);
            if mr < best[j] {
                best[j] = mr;
                source[j] = current;
            }
            if best[j] < next_weight || next == usize::MAX {
                next_weight = best[j];
                next = j;
            }
        }
        edges.push(MstEdge {
            a: source[next],
            b: next,
            weight: next_weight,
        });
        current = next;
    }
    edges
}

/// Merge of two single-linkage nodes; points are `0..n`, merges `n..2n-1`.
#[derive(Debug, Clone, Copy)]
struct Link {
    left: usize,
    right: usize,
    distance: f64,
    size: usize,
}

fn single_linkage(n: usize, mut edges: Vec<MstEdge>) -> Vec<Link> {
    edges.sort_by(|a, b| a.weight.total_cmp(&b.weight));
    let mut parent: Vec<usize> = (0..2 * n).collect();
    let mut size = vec![1usize; 2 * n];
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        while parent[x] != root {
            let next = parent[x];
            parent[x] = root;
            x = next;
        }
        root
    }
    let mut links = Vec::with_capacity(edges.len());
    for (i, e) in edges.iter().enumerate() {
        let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
        let node = n + i;
        links.push(Link {
            left: ra,
            right: rb,
            distance: e.weight,
            size: size[ra] + size[rb],
        });
        parent[ra] = node;
        parent[rb] = node;
        size[node] = size[ra] + size[rb];
    }
    links
}

/// Level-order node list of the single-linkage subtree under `root`.
fn bfs(links: &[Link], n: usize, root: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut queue = VecDeque::from([root]);
    while let Some(node) = queue.pop_front() {
        out.push(node);
        if node >= n {
            let l = links[node - n];
            queue.push_back(l.left);
            queue.push_back(l.right);
        }
    }
    out
}

/// One row of the condensed tree: `child` is a point (< n) or a cluster (>= n).
#[derive(Debug, Clone, Copy)]
struct Condensed {
    parent: usize,
    child: usize,
    lambda: f64,
    size: usize,
}

fn lambda_of(distance: f64) -> f64 {
    if distance > 0.0 {
        1.0 / distance
    } else {
        f64::INFINITY
    }
}

fn condense(links: &[Link], n: usize, min_cluster_size: usize) -> Vec<Condensed> {
    let root = 2 * n - 2;
    let mut relabel = vec![0usize; root + 1];
    relabel[root] = n;
    let mut next_label = n + 1;
    let mut ignore = vec![false; root + 1];
    let mut rows = Vec::new();
    let count = |node: usize| if node >= n { links[node - n].size } else { 1 };

    for node in bfs(links, n, root) {
        if ignore[node] || node < n {
            continue;
        }
        let link = links[node - n];
        let lambda = lambda_of(link.distance);
        let (lc, rc) = (count(link.left), count(link.right));
        let parent = relabel[node];
        let fall_out = |sub: usize, rows: &mut Vec<Condensed>, ignore: &mut Vec<bool>| {
            for s in bfs(links, n, sub) {
                if s < n {
                    rows.push(Condensed {
                        parent,
                        child: s,
                        lambda,
                        size: 1,
                    });
                }
                ignore[s] = true;
            }
        };
        if lc >= min_cluster_size && rc >= min_cluster_size {
            for (child, c) in [(link.left, lc), (link.right, rc)] {
                relabel[child] = next_label;
                next_label += 1;
                rows.push(Condensed {
                    parent,
                    child: relabel[child],
                    lambda,
                    size: c,
                });
            }
        } else if lc < min_cluster_size && rc < min_cluster_size {
            fall_out(link.left, &mut rows, &mut ignore);
            fall_out(link.right, &mut rows, &mut ignore);
        } else if lc < min_cluster_size {
            relabel[link.right] = parent;
            fall_out(link.left, &mut rows, &mut ignore);
        } else {
            relabel[link.left] = parent;
            fall_out(link.right, &mut rows, &mut ignore);
        }
    }
    rows
}

/// Excess-of-mass stability per cluster id (index `c - n`).
fn stabilities(tree: &[Condensed], n: usize, n_clusters: usize) -> Vec<f64> {
    let mut birth = vec![0.0f64; n_clusters];
    for r in tree.iter().filter(|r| r.child >= n) {
        birth[r.child - n] = r.lambda;
    }
    let mut stability = vec![0.0f64; n_clusters];
    for r in tree {
        let b = birth[r.parent - n];
        let gain = if r.lambda == b { 0.0 } else { r.lambda - b };
        stability[r.parent - n] += gain * r.size as f64;
    }
    stability
}

fn select_eom(tree: &[Condensed], n: usize, n_clusters: usize) -> Vec<bool> {
    let mut stability = stabilities(tree, n, n_clusters);
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n_clusters];
    for r in tree.iter().filter(|r| r.child >= n) {
        children[r.parent - n].push(r.child - n);
    }
    let mut selected = vec![true; n_clusters];
    selected[0] = false;
    // Children always carry larger ids than their parent.
    for c in (1..n_clusters).rev() {
        let subtree: f64 = children[c].iter().map(|&ch| stability[ch]).sum();
        if subtree > stability[c] {
            selected[c] = false;
            stability[c] = subtree;
        } else {
            let mut stack = children[c].clone();
            while let Some(d) = stack.pop() {
                selected[d] = false;
                stack.extend_from_slice(&children[d]);
            }
        }
    }
    selected
}

/// Clusters `points` with HDBSCAN.
pub fn cluster_hdbscan(points: &[Vec<f64>], params: HdbscanParams) -> Result<ClusterAssignment, TopicError> {
    params.validate()?;
    check_points(points)?;
    let n = points.len();
    if n < params.min_cluster_size {
        return Ok(ClusterAssignment::all_noise(n));
    }
    let mst = mutual_reachability_mst(points, params.min_samples)?;
    let links = single_linkage(n, mst);
    let tree = condense(&links, n, params.min_cluster_size);
    let n_clusters = tree.iter().map(|r| r.parent.max(r.child)).max().map_or(1, |m| m.max(n) - n + 1);

    let mut point_row = vec![usize::MAX; n];
    let mut cluster_parent = vec![usize::MAX; n_clusters];
    let mut death = vec![0.0f64; n_clusters];
    for (i, r) in tree.iter().enumerate() {
        if r.child < n {
            point_row[r.child] = i;
        } else {
            cluster_parent[r.child - n] = r.parent - n;
        }
        death[r.parent - n] = death[r.parent - n].max(r.lambda);
    }

    let has_children = tree.iter().any(|r| r.child >= n);
    let mut selected = if has_children {
        select_eom(&tree, n, n_clusters)
    } else {
        vec![false; n_clusters]
    };
    let mut root_members = Vec::new();
    if !has_children {
        // Root fallback: the points that leave the root at its densest level.
        root_members = (0..n).filter(|&p| tree[point_row[p]].lambda >= death[0]).collect();
        if root_members.len() >= params.min_cluster_size {
            selected[0] = true;
        }
    }

    let mut label_of = vec![-1i32; n_clusters];
    let mut k = 0;
    for c in 0..n_clusters {
        if selected[c] {
            label_of[c] = k as i32;
            k += 1;
        }
    }

    let mut labels = vec![-1i32; n];
    let mut probabilities = vec![0.0f64; n];
    for p in 0..n {
        let row = tree[point_row[p]];
        let mut c = row.parent - n;
        let cluster = if c == 0 {
            (selected[0] && root_members.binary_search(&p).is_ok()).then_some(0)
        } else {
            loop {
                if selected[c] {
                    break Some(c);
                }
                c = cluster_parent[c];
                if c == 0 {
                    break None;
                }
            }
        };
        if let Some(c) = cluster {
            labels[p] = label_of[c];
            let max_lambda = death[c];
            probabilities[p] = if max_lambda == 0.0 || !row.lambda.is_finite() || !max_lambda.is_finite() {
                1.0
            } else {
                row.lambda.min(max_lambda) / max_lambda
            };
        }
    }
    Ok(ClusterAssignment {
        labels,
        k,
        probabilities,
    })
}

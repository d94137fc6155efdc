use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use revmon_core::topics::{core_distances, mutual_reachability_mst};

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Decodes a Prüfer sequence into the edges of a labelled tree on `n` nodes.
fn prufer_edges(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&i| degree[i] == 1).unwrap();
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Minimum total weight over all n^(n-2) spanning trees.
fn brute_force_mst(weight: &dyn Fn(usize, usize) -> f64, n: usize) -> f64 {
    let len = n - 2;
    let mut seq = vec![0; len];
    let mut best = f64::INFINITY;
    loop {
        let total: f64 = prufer_edges(&seq, n).iter().map(|&(a, b)| weight(a, b)).sum();
        best = best.min(total);
        let mut i = 0;
        while i < len {
            seq[i] += 1;
            if seq[i] < n {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
        if i == len {
            return best;
        }
    }
}

#[test]
fn mst_weight_equals_brute_force_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for instance in 0..20 {
        let points: Vec<Vec<f64>> = (0..6)
            .map(|_| (0..2).map(|_| rng.random_range(-5.0..5.0)).collect())
            .collect();
        let min_samples = 1 + instance % 4;
        let core = core_distances(&points, min_samples);
        let mreach = |a: usize, b: usize| euclid(&points[a], &points[b]).max(core[a]).max(core[b]);
        let edges = mutual_reachability_mst(&points, min_samples).unwrap();
        assert_eq!(edges.len(), 5);
        let got: f64 = edges.iter().map(|e| e.weight).sum();
        let want = brute_force_mst(&mreach, 6);
        assert!((got - want).abs() < 1e-9, "instance {instance}: {got} vs {want}");
    }
}

#[test]
fn prufer_decoding_covers_all_trees() {
    let mut count = 0;
    let mut seen = std::collections::HashSet::new();
    let n = 4;
    for a in 0..n {
        for b in 0..n {
            let mut e = prufer_edges(&[a, b], n);
            for x in e.iter_mut() {
                *x = (x.0.min(x.1), x.0.max(x.1));
            }
            e.sort();
            seen.insert(e);
            count += 1;
        }
    }
    assert_eq!((count, seen.len()), (16, 16));
}

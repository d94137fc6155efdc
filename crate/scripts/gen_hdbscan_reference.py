#!/usr/bin/env python3
"""Freeze reference HDBSCAN labelings computed with scikit-learn.

Writes crates/core/tests/fixtures/hdbscan_reference.json, a list of cases
{name, min_cluster_size, min_samples, points, labels}. Points are written with
repr() so the Rust side reads back the exact same doubles.
"""

import json
import pathlib

import numpy as np
from sklearn.cluster import HDBSCAN

OUT = pathlib.Path(__file__).resolve().parent.parent / "crates/core/tests/fixtures/hdbscan_reference.json"


def two_blobs(rng):
    a = rng.normal([0.0, 0.0], 0.1, size=(30, 2))
    b = rng.normal([10.0, 0.0], 0.1, size=(30, 2))
    # Far-field noise, well away from both blobs.
    noise = np.array([[-40.0, 35.0], [45.0, -38.0], [5.0, 50.0], [-30.0, -45.0], [50.0, 40.0]])
    noise = noise + rng.uniform(-2.0, 2.0, size=noise.shape)
    return np.vstack([a, b, noise])


def mixed(rng, centers, sizes, spreads, dim, n_noise, box):
    parts = [rng.normal(c, s, size=(n, dim)) for c, n, s in zip(centers, sizes, spreads)]
    parts.append(rng.uniform(-box, box, size=(n_noise, dim)))
    pts = np.vstack(parts)
    return pts[rng.permutation(len(pts))]


def case(name, pts, mcs, ms):
    labels = HDBSCAN(min_cluster_size=mcs, min_samples=ms).fit(pts).labels_
    return {
        "name": name,
        "min_cluster_size": mcs,
        "min_samples": ms,
        "points": pts.tolist(),
        "labels": [int(l) for l in labels],
    }


def main():
    rng = np.random.default_rng(20240601)
    cases = [case("two_blobs_noise", two_blobs(rng), 10, 10)]
    cases.append(case(
        "three_blobs_2d",
        mixed(rng, [[0, 0], [4, 4], [-4, 5]], [40, 30, 25], [0.5, 0.8, 0.4], 2, 10, 10),
        8, 5,
    ))
    cases.append(case(
        "uneven_5d",
        mixed(rng, [np.zeros(5), np.full(5, 3.0)], [50, 20], [1.0, 0.3], 5, 15, 8),
        10, 10,
    ))
    cases.append(case(
        "nested_2d",
        mixed(rng, [[0, 0], [1.2, 0], [8, 8]], [30, 30, 40], [0.3, 0.3, 1.5], 2, 5, 12),
        6, 3,
    ))
    cases.append(case("uniform_3d", rng.uniform(0, 1, size=(60, 3)), 5, 5))
    OUT.write_text(json.dumps(cases, indent=None) + "\n")
    for c in cases:
        k = max(c["labels"]) + 1
        noise = sum(1 for l in c["labels"] if l < 0)
        print(f"{c['name']}: n={len(c['labels'])} K={k} noise={noise}")


if __name__ == "__main__":
    main()

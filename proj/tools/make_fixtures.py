#!/usr/bin/env python3
"""Writes the small LIBSVM fixtures used by the tests.

The files mimic the layout of a few public LIBSVM classification sets
(label conventions, feature counts, sparsity) but are generated here from
a planted logistic model, so they carry no third-party data.

    python3 tools/make_fixtures.py tests/fixtures
"""

import math
import os
import random
import sys


def fmt(v):
    s = "%.6g" % v
    return s


def planted_labels(rows, d, rng, scale):
    w = [rng.gauss(0.0, 1.0) for _ in range(d)]
    out = []
    for feats in rows:
        z = sum(w[j - 1] * v for j, v in feats) * scale
        p = 1.0 / (1.0 + math.exp(-z))
        out.append(1 if rng.random() < p else 0)
    return out


def binary_rows(n, d, density, rng):
    rows = []
    for _ in range(n):
        idx = sorted(rng.sample(range(1, d + 1), max(1, int(rng.gauss(density * d, 2)))))
        rows.append([(j, 1.0) for j in idx])
    return rows


def write(path, labels, rows, names):
    with open(path, "w", newline="\n") as fh:
        for y, feats in zip(labels, rows):
            fh.write(names[y])
            for j, v in feats:
                fh.write(" %d:%s" % (j, fmt(v)))
            fh.write("\n")


def main(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    n = 1000

    rng = random.Random(11)
    rows = binary_rows(n, 112, 0.19, rng)
    write(os.path.join(out_dir, "mushrooms_like.libsvm"),
          planted_labels(rows, 112, rng, 4.0), rows, {0: "1", 1: "2"})

    rng = random.Random(12)
    rows = []
    for _ in range(n):
        feats = []
        for j in range(1, 69):
            r = rng.random()
            if r < 0.35:
                feats.append((j, 1.0))
            elif r < 0.45:
                feats.append((j, 0.5))
        rows.append(feats or [(1, 1.0)])
    write(os.path.join(out_dir, "phishing_like.libsvm"),
          planted_labels(rows, 68, rng, 3.0), rows, {0: "0", 1: "1"})

    rng = random.Random(13)
    rows = []
    for _ in range(n):
        feats = []
        for j in range(1, 23):
            v = rng.uniform(-1.0, 1.0) if j > 10 else float(rng.random() < 0.1)
            if v != 0.0:
                feats.append((j, v))
        rows.append(feats)
    write(os.path.join(out_dir, "ijcnn1_like.libsvm"),
          planted_labels(rows, 22, rng, 8.0), rows, {0: "-1", 1: "+1"})

    rng = random.Random(14)
    rows = binary_rows(n, 300, 0.04, rng)
    write(os.path.join(out_dir, "w8a_like.libsvm"),
          planted_labels(rows, 300, rng, 5.0), rows, {0: "-1", 1: "+1"})

    bad = {
        "bad_label.libsvm": "1 1:0.5\nabc 2:1\n",
        "bad_pair.libsvm": "1 1:0.5 2\n",
        "bad_index.libsvm": "1 0:0.5\n",
        "unsorted.libsvm": "1 3:1 2:1\n",
        "bad_value.libsvm": "1 1:nan\n",
        "empty.libsvm": "# nothing here\n\n",
    }
    for name, text in bad.items():
        with open(os.path.join(out_dir, name), "w", newline="\n") as fh:
            fh.write(text)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures")

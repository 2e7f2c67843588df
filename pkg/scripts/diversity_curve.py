#!/usr/bin/env python3
"""Corpus-size-vs-diversity curve over the bundled assertion corpus.

Prints a CSV of mean pairwise 3-gram TF-IDF distance for seeded uniform
subsets of increasing size (sizes are clamped to the corpus size, and
the corpus is tiled with label renamings when a requested size exceeds
it, so the shape of the curve stays inspectable).

Usage: python scripts/diversity_curve.py [sizes...] [--seed N]
"""

import argparse
import random
from pathlib import Path

from svaforge.metrics import tfidf_diversity

CORPUS = Path(__file__).resolve().parents[1] / "src" / "svaforge" / \
    "data" / "sva_corpus.txt"


def expand(corpus, size, rng):
    """Sample `size` documents, tiling with relabelled copies if the
    corpus is smaller than requested."""
    pool = list(corpus)
    copy = 0
    while len(pool) < size:
        copy += 1
        pool += [f"v{copy}_{line}" for line in corpus]
    return rng.sample(pool, size)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("sizes", nargs="*", type=int, default=[10, 50, 100])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--pair-cap", type=int, default=10000)
    args = ap.parse_args()
    corpus = [ln for ln in CORPUS.read_text().splitlines() if ln.strip()]
    rng = random.Random(args.seed)
    print("size,diversity,seed")
    for size in args.sizes or [10, 50, 100]:
        subset = expand(corpus, size, rng)
        value = tfidf_diversity(subset, n_gram=3, pair_cap=args.pair_cap,
                                seed=args.seed)
        print(f"{size},{value:.6f},{args.seed}")


if __name__ == "__main__":
    main()

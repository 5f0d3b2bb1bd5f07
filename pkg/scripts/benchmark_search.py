#!/usr/bin/env python3
"""Compare SSS against RSSS: average number of models scored before the
eventual posterior-mode model is first scored, over a grid of dimensions.

Usage:
    python scripts/benchmark_search.py [--p-grid 100,200,300,400,500] [--threads 4]
"""

import argparse

from nlp_select.study import benchmark_run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p-grid", default="100,200,300,400,500")
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--replicates", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--iterations", type=int, default=20)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    p_grid = tuple(int(tok) for tok in args.p_grid.split(",") if tok.strip())
    rows = benchmark_run(
        p_grid,
        n=args.n,
        replicates=args.replicates,
        base_seed=args.seed,
        n_iterations=args.iterations,
        threads=args.threads,
    )
    print(f"{'p':>5} {'algorithm':>9} {'models before best':>19} {'agreement':>10}")
    for row in rows:
        print(
            f"{row['p']:>5} {row['algorithm']:>9} "
            f"{row['mean_models_scored_before_best']:>19.1f} "
            f"{row['best_agreement']:>7}/{row['replicates']}"
        )


if __name__ == "__main__":
    main()

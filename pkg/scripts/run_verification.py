#!/usr/bin/env python3
"""Run every verification suite and write one CSV report per suite.

Usage: python scripts/run_verification.py [--outdir results] [--reps N] [--seed S]
"""
import argparse
import pathlib
import sys
import time

from fvkit import verify
from fvkit.reporting import render_table


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--reps", type=int, default=10_000)
    ap.add_argument("--mc-reps", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=11)
    args = ap.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    runs = [
        ("combinatorics", lambda: verify.verify_combinatorics()),
        ("urn", lambda: verify.verify_urn()),
        ("death", lambda: verify.verify_death(mc_reps=args.mc_reps, mc_seed=args.seed)),
        ("measures", lambda: verify.verify_measures(reps=args.reps, seed=args.seed)),
        ("processes", lambda: verify.verify_processes(reps=args.reps, seed=args.seed)),
    ]
    failed = 0
    for name, fn in runs:
        t0 = time.time()
        rep = fn()
        took = time.time() - t0
        text = render_table(
            {"suite": name, "reps": args.reps, "seed": args.seed},
            ["check", "instance", "observed", "tolerance", "pass"],
            rep.table_rows(),
            footer={"checks": len(rep.rows), "failed": rep.n_failed, "seconds": round(took, 2)},
        )
        (outdir / f"verify_{name}.csv").write_text(text)
        print(f"{name}: {len(rep.rows) - rep.n_failed}/{len(rep.rows)} passed ({took:.1f}s)")
        failed += rep.n_failed
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()

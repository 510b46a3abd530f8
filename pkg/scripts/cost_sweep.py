"""Sweep the per-message cost and write plot-ready acceptance rates.

    python scripts/cost_sweep.py --out sweep.csv --users 200 --seed 2026

One row per (cost, design, condition). The population uses the two-attribute
smoke/body-type schema with sharp archetypes, where reply probabilities are
spread widely enough for costs to matter.
"""

import argparse
import csv
import sys

import numpy as np

from recipx.model import AttributeSchema, SynthConfig, default_schema, generate_population
from recipx.sim import AgentPolicy, Condition, CostConfig, run_experiment


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out", default="-")
    parser.add_argument("--users", type=int, default=200)
    parser.add_argument("--seed", type=int, default=2026)
    parser.add_argument("--costs", type=float, nargs="+", default=list(np.round(np.arange(0, 3.01, 0.25), 2)))
    parser.add_argument("--one-sided-confidence", type=float, default=0.6)
    parser.add_argument("--reciprocal-confidence", type=float, default=0.9)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)

    schema = AttributeSchema(default_schema().attributes[1:3])
    snap = generate_population(SynthConfig(n_users=args.users, schema=schema, concentration=0.1), args.seed)
    conditions = [Condition("one-sided"), Condition("reciprocal")]
    policy = AgentPolicy(confidence={"one-sided": args.one_sided_confidence, "reciprocal": args.reciprocal_confidence})

    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="", encoding="utf-8")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["cost", "design", "condition", "n", "accept_rate_mean", "accept_rate_sd", "payoff_mean"])
    for cost in args.costs:
        for design in ("between", "paired"):
            report = run_experiment(
                snap, conditions, CostConfig(acceptance_cost=cost), policy, 5, args.seed,
                workers=args.workers, design=design,
            )
            for c in report.conditions:
                writer.writerow([cost, design, c.label, c.n, f"{c.accept_rate_mean:.6f}",
                                 f"{c.accept_rate_sd:.6f}", f"{c.payoff_mean:.6f}"])
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Error-versus-steps study for the Magnus propagator.

Runs fixed-step simulations of the analytically solvable one-qubit problem
over a ladder of step counts and several truncation orders, and writes one
CSV row per (order, n_steps) with the trace distance, max element error and
mean element error against the exact state.

Example:
    python scripts/convergence_study.py --tau 100 --orders 1,2,4,6 \
        --min-exp 4 --max-exp 14 --out convergence.csv
"""

import argparse
import csv

import annealsim as qa


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tau", type=float, default=100.0)
    parser.add_argument("--orders", default="1,2,4,6")
    parser.add_argument("--min-exp", type=int, default=4)
    parser.add_argument("--max-exp", type=int, default=14)
    parser.add_argument("--out", default="convergence.csv")
    args = parser.parse_args()

    model = qa.single_field_model()
    schedule = qa.builtin_schedule("circular")
    target = qa.rho_h1(1.0, args.tau)
    orders = [int(o) for o in args.orders.split(",")]

    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["order", "n_steps", "trace_distance", "error_max", "error_mean"])
        for order in orders:
            for exp in range(args.min_exp, args.max_exp + 1):
                n = 2**exp
                result = qa.simulate_fixed(model, args.tau, schedule, order=order, n_steps=n)
                writer.writerow(
                    [
                        order,
                        n,
                        repr(qa.trace_distance(result.rho, target)),
                        repr(qa.error_max(result.rho, target)),
                        repr(qa.error_mean(result.rho, target)),
                    ]
                )
                print(f"order={order} n={n}: done")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Tabulate effective T-counts of the AND-based adder against the inline baseline.

Shows the measured (circuit-derived) cost next to the closed-form model, the
break-even width, and the hybrid cutoff, under a chosen cost model.

    python scripts/effective_t_table.py --idle-factor 6
"""
import argparse

from tclean.gadgets import AdderSpec, gidney_adder
from tclean.resources import (
    CostModel,
    count,
    crossover,
    effective_t,
    effective_t_formula,
    hybrid_cutoff,
)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--t-volume", type=float, default=960.0)
    parser.add_argument("--idle-factor", type=float, default=1.0)
    args = parser.parse_args()
    model = CostModel(t_state_volume=args.t_volume, idle_factor=args.idle_factor)

    print(f"cost per ancilla-layer: {model.cost_per_ancilla_depth:.6f} |T> states")
    print(f"{'n':>6} {'measured':>14} {'closed form':>14} {'baseline 8n':>12}")
    for n in (8, 16, 64, 256, 960, 1920, 3840):
        if n <= 256:
            measured = f"{effective_t(count(gidney_adder(AdderSpec(n))), model):14.3f}"
        else:
            measured = f"{'-':>14}"
        closed = effective_t_formula(n, "temporary-and", model)
        base = effective_t_formula(n, "cuccaro", model)
        print(f"{n:>6} {measured} {closed:14.3f} {base:12.1f}")

    n_star = crossover(lambda n: effective_t_formula(n, "temporary-and", model),
                       lambda n: effective_t_formula(n, "cuccaro", model))
    print(f"\nbreak-even width (whole-adder switch): n = {n_star}")
    print(f"hybrid cutoff (per-bit switch):        d = {hybrid_cutoff(model)}")


if __name__ == "__main__":
    main()

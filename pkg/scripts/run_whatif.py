"""Sweep the swap cap on an instance and print the frontier.

Usage: python scripts/run_whatif.py [instance.json] [k_max]
Defaults to the built-in two-route example with k_max = 4.
"""

import sys

from skedfit import bnb, experiments, fixtures
from skedfit.instance import load_instance


def main() -> None:
    inst = (load_instance(sys.argv[1]) if len(sys.argv) > 1
            else fixtures.two_route_instance())
    k_max = int(sys.argv[2]) if len(sys.argv) > 2 else 4
    points = experiments.whatif_sweep(
        inst, k_max, config=bnb.SolveConfig(time_limit=1800))
    print(experiments.frontier_to_gnuplot(points), end="")
    plateau = experiments.frontier_plateau(points)
    print(f"# plateau at max_swap = {plateau}")


if __name__ == "__main__":
    main()

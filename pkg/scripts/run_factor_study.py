"""Factor study: profit improvement of swapping over pure re-timing,
across fuel-price / spill-cost / swap-cost levels, with the
aircraft-dependent surcharge variant alongside.

Usage: python scripts/run_factor_study.py [replications] [out_prefix]
"""

import json
import sys

from skedfit import bnb, experiments
from skedfit.experiments import FactorDesign


def main() -> None:
    reps = int(sys.argv[1]) if len(sys.argv) > 1 else 2
    prefix = sys.argv[2] if len(sys.argv) > 2 else None
    design = FactorDesign(replications=reps, seed=1)
    config = bnb.SolveConfig(time_limit=1800)

    flat = experiments.compare_ctc_ctcas(design, config=config)
    print("flat swap cost:")
    print(json.dumps(experiments.summarize_improvements(flat), indent=2))

    surcharged = experiments.swap_cost_study(design, config=config)
    print("aircraft-dependent swap cost:")
    print(json.dumps(experiments.summarize_improvements(surcharged),
                     indent=2))
    spill = [r["spill_pct"] for r in surcharged]
    print(f"spilled passengers: min {min(spill):.2f}% "
          f"avg {sum(spill) / len(spill):.2f}% max {max(spill):.2f}%")
    if prefix:
        with open(f"{prefix}_flat.csv", "w") as fh:
            fh.write(experiments.rows_to_csv(flat))
        with open(f"{prefix}_surcharged.csv", "w") as fh:
            fh.write(experiments.rows_to_csv(surcharged))


if __name__ == "__main__":
    main()

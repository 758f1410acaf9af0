#!/usr/bin/env python3
"""Recompute the headline closed-form numbers and print pass/fail."""

import sys

from sepkit.experiments import run_cascade_examples, run_remark1


def main() -> int:
    r1 = run_remark1()
    print(f"simple max-M: {r1.max_m_value:.4f} (floor {r1.max_m_floor}) < {r1.cap}: "
          f"{r1.max_m_floor < r1.cap}")
    print(f"all-pairs bound at M={r1.selected_m}: {r1.pairwise_bound:.7f} "
          f">= {r1.target_probability}: {r1.pairwise_bound >= r1.target_probability}")
    casc = run_cascade_examples()
    for row in casc.rows:
        print(f"cascade complement at M={row.m:.3g}: {row.complement:.3e} "
              f"< {row.ceiling:.0e}: {row.passed}")
    ok = r1.passed and casc.passed
    print(f"pass={ok}")
    return 0 if ok else 3


if __name__ == "__main__":
    sys.exit(main())

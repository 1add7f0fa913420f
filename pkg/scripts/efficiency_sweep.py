"""Efficiency across heating ratios: pipeline value against the closed form."""

import argparse

import numpy as np

from euqoe.engine import efficiency_closed_form
from euqoe.protocol import build_protocol


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omega1", type=float, default=1.0)
    ap.add_argument("--omega2", type=float, default=2.0)
    ap.add_argument("--aH2", type=float, default=1.0)
    ap.add_argument("--tau-a", type=float, default=1.0)
    ap.add_argument("--count", type=int, default=9)
    args = ap.parse_args()
    e0 = 1 - args.omega1 / args.omega2
    print(f"{'alpha_aH':>9} {'alpha_aC':>9} {'parity':>14} {'eta_E':>12} {'closed':>12} valid")
    for alpha in np.linspace(e0 + 0.05 * (1 - e0), 0.95, args.count):
        rec = build_protocol(args.omega1, args.omega2, float(alpha), args.aH2, args.tau_a)
        closed = efficiency_closed_form(args.omega1, args.omega2, float(alpha))
        parity = rec.parity.value if rec.parity else "degenerate"
        print(f"{alpha:9.4f} {rec.alpha_aC:9.4f} {parity:>14} {rec.eta_E:12.9f} {closed:12.9f} "
              f"{rec.valid}")


if __name__ == "__main__":
    main()

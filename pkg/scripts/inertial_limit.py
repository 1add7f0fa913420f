"""Approach to the unaccelerated-observer limit alpha_aH -> 0 at fixed aH2."""

import argparse
import math

from euqoe.engine import i1_1p1
from euqoe.protocol import build_protocol


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omega1", type=float, default=0.9)
    ap.add_argument("--omega2", type=float, default=1.0)
    ap.add_argument("--aH2", type=float, default=1.5)
    ap.add_argument("--tau-a", type=float, default=1.0)
    args = ap.parse_args()
    limit = i1_1p1(0.0, args.omega2, args.tau_a, aH2=args.aH2)
    print(f"lim I1/alpha = {limit:.12f}")
    print(f"{'alpha':>8} {'I1/alpha':>16} {'rel dev':>10} {'dev/sqrt(alpha)':>16}")
    for e in range(2, 8):
        a = 10.0 ** -e
        v = i1_1p1(a, args.omega2, args.tau_a, aH2=args.aH2) / a
        dev = abs(v / limit - 1)
        print(f"{a:8.0e} {v:16.12f} {dev:10.2e} {dev / math.sqrt(a):16.3f}")
    rec = build_protocol(args.omega1, args.omega2, 0.0, args.aH2, args.tau_a)
    print(f"eta_E at alpha_aH = 0: {rec.eta_E!r} (2 eta0 = {2 * rec.eta0!r})")


if __name__ == "__main__":
    main()

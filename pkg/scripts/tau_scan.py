"""Scan the interaction time and show which entangled state runs the engine."""

import argparse

from euqoe.protocol import scan_tau_a


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omega1", type=float, default=1.0)
    ap.add_argument("--omega2", type=float, default=2.0)
    ap.add_argument("--alpha-aH", type=float, default=0.8)
    ap.add_argument("--aH2", type=float, default=1.0)
    ap.add_argument("--n-grid", type=int, default=25)
    ap.add_argument("--dimension", default="1p1", choices=["1p1", "1p3"])
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    points = scan_tau_a(args.omega1, args.omega2, args.alpha_aH, args.aH2, n_grid=args.n_grid,
                        dimension=args.dimension, workers=args.workers)
    print(f"{'tau_a':>10} {'I1':>14} {'error':>10} state")
    for p in points:
        label = p.parity.value if p.parity else p.status
        print(f"{p.tau_a:10.4f} {p.i1:14.6e} {p.error:10.1e} {label}")


if __name__ == "__main__":
    main()

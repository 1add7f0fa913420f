"""Brute-force perturbation series against the factorized traces at one point."""

import argparse
import time

from euqoe.algebra import EntangledParity, InitialState
from euqoe.engine import CycleConfig
from euqoe.oracle import OracleConfig, delta_rho_traces_numeric


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha-aH", type=float, default=0.6)
    ap.add_argument("--a1", type=float, default=1.0)
    ap.add_argument("--omega2", type=float, default=2.0)
    ap.add_argument("--tau-a", type=float, default=1.0)
    ap.add_argument("--parity", default="symmetric")
    ap.add_argument("--dimension", default="1p1", choices=["1p1", "1p3"])
    ap.add_argument("--k-max", type=float, default=None)
    args = ap.parse_args()
    state = InitialState.from_parity(EntangledParity.parse(args.parity))
    cycle = CycleConfig(1.0, args.omega2, args.alpha_aH, args.a1 / args.alpha_aH, args.tau_a,
                        state=state, dimension=args.dimension)
    cfg = OracleConfig(cycle, k_max=args.k_max)
    start = time.perf_counter()
    reports = delta_rho_traces_numeric(cfg, [0.0, args.alpha_aH, 1.0])
    print(f"k_max {cfg.resolved_k_max:g}, {time.perf_counter() - start:.1f} s")
    print(f"{'alpha_prime':>11} {'oracle':>16} {'error est':>10} {'engine':>16} {'rel dev':>9}")
    for r in reports:
        print(f"{r.alpha_prime:11.3f} {r.value:16.10f} {r.abs_error_estimate:10.1e} "
              f"{r.analytic:16.10f} {r.relative_deviation:9.2e}")


if __name__ == "__main__":
    main()

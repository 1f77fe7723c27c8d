"""Command line entry points: run scenarios, selftest, rate table, kernel dumps."""

from __future__ import annotations

import argparse
import sys

import numpy as np


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="driftlab",
        description="fractional drift-diffusion asymptotics laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario config (JSON)")
    p_run.add_argument("config", help="path to a config file or a bundled scenario name")
    p_run.add_argument("-o", "--output-dir", default=None)
    p_run.add_argument("--resume", action="store_true",
                       help="continue from the latest checkpoint in the output dir")

    sub.add_parser("selftest", help="fast invariant suite")
    sub.add_parser("scenarios", help="list bundled scenario names")

    p_rates = sub.add_parser("rates", help="print the theoretical remainder exponent")
    p_rates.add_argument("n", type=int)
    p_rates.add_argument("theta", type=float)
    p_rates.add_argument("q", help="Lebesgue exponent, e.g. 1, 2 or inf")

    p_kernel = sub.add_parser("kernel", help="emit a kernel snapshot")
    p_kernel.add_argument("n", type=int)
    p_kernel.add_argument("theta", type=float)
    p_kernel.add_argument("t", type=float)
    p_kernel.add_argument("-L", type=float, default=30.0)
    p_kernel.add_argument("-N", type=int, default=256)
    p_kernel.add_argument("-o", "--output", default="kernel.bin")

    args = parser.parse_args(argv)

    if args.command == "run":
        from .harness import bundled_scenario_path, run_scenario
        config = args.config
        if not config.endswith(".json"):
            config = str(bundled_scenario_path(config))
        return run_scenario(config, output_dir=args.output_dir, resume=args.resume)

    if args.command == "selftest":
        from .harness import selftest
        results = selftest()
        bad = [k for k, ok in results.items() if not ok]
        print(f"{len(results) - len(bad)}/{len(results)} checks passed")
        return 0 if not bad else 2

    if args.command == "scenarios":
        from .harness import list_bundled_scenarios
        for name in list_bundled_scenarios():
            print(name)
        return 0

    if args.command == "rates":
        from .verifier import rate_table, VerifierError
        q = np.inf if args.q in ("inf", "Inf", "oo") else float(args.q)
        try:
            print(f"{rate_table(args.n, args.theta, q):.6g}")
        except VerifierError as e:
            print(f"error: {e}", file=sys.stderr)
            return 1
        return 0

    if args.command == "kernel":
        from .grid import GridSpec, write_snapshot
        from .kernels import KernelHandle, sample_kernel
        spec = GridSpec(n=args.n, L=args.L, N=args.N, theta=args.theta)
        field = sample_kernel(KernelHandle(spec=spec, t=args.t))
        write_snapshot(args.output, field, time=args.t)
        print(f"wrote {args.output} (mass {field.mass:.12f})")
        return 0

    return 1


if __name__ == "__main__":
    raise SystemExit(main())

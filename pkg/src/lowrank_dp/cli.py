"""Command-line interface.

Every subcommand prints a JSON object on success. On failure a JSON error
object goes to stderr and the exit code is nonzero (2 for bad parameters,
1 otherwise).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bench import ExperimentConfig, lambda_sweep, run_llr_bench, run_table, write_rows
from .discrepancy import (
    breakpoints_nn,
    breakpoints_wnn,
    estimate_noise_median,
    eta_bound,
    solve_lambda_nn,
    solve_lambda_weighted,
)
from .errors import ParameterError, TrivialSolutionError
from .io import read_matrix, write_matrix
from .matrix import svd
from .pipeline import denoise
from .shrinkage import Regularizer, weights_gwnn


def _regularizer(args):
    kind = args.reg
    if kind == "tnn":
        return Regularizer.tnn(args.r)
    if kind == "gwnn":
        return Regularizer.gwnn(args.p, args.eps)
    return Regularizer(kind)


def _add_reg_flags(p):
    p.add_argument("--reg", choices=["nn", "tnn", "gwnn", "rank"], default="nn")
    p.add_argument("--r", type=int, default=1, help="TNN: leading components left unpenalized")
    p.add_argument("--p", type=float, default=0.7, help="GWNN exponent")
    p.add_argument("--eps", type=float, default=1e-6, help="GWNN offset")


def _parse_spectrum(text):
    try:
        values = [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise ParameterError(f"cannot parse spectrum {text!r}") from None
    return np.sort(np.asarray(values))[::-1]


def cmd_solve_lambda(args):
    if args.spectrum is not None:
        s = _parse_spectrum(args.spectrum)
        m = args.m if args.m is not None else s.size
        n = args.n if args.n is not None else s.size
    elif args.input is not None:
        y = read_matrix(args.input, args.format)
        s = svd(y).s
        m, n = y.shape
    else:
        raise ParameterError("give --spectrum or --input")
    eta = args.eta
    if eta is None:
        if args.tau is None:
            raise ParameterError("give --eta or --tau")
        eta = eta_bound(m, n, args.tau, args.c)
    reg = _regularizer(args)
    r = reg.r if reg.kind == "tnn" else 0
    reg.check_dims(s.size)
    out = {"eta": eta, "norm_sq": float(np.sum(s * s)), "reg": reg.kind}
    if reg.kind == "gwnn":
        w = weights_gwnn(s, reg.p, reg.eps)
        out["breakpoints"] = breakpoints_wnn(s, w).b.tolist()
        solve = lambda: solve_lambda_weighted(s, w, eta)  # noqa: E731
    elif reg.kind in ("nn", "tnn"):
        out["breakpoints"] = breakpoints_nn(s[r:]).b.tolist()
        solve = lambda: solve_lambda_nn(s[r:], eta)  # noqa: E731
    else:
        raise ParameterError("solve-lambda supports nn, tnn and gwnn")
    try:
        sol = solve()
    except TrivialSolutionError:
        out.update(trivial=True, lam=None, k=r)
        return out
    out.update(trivial=False, lam=sol.lam, k=sol.k + r, residual_sq=sol.residual_sq)
    return out


def cmd_denoise(args):
    y = read_matrix(args.input, args.input_format)
    reg = _regularizer(args)
    ell = args.ell
    if args.randomized and ell is None:
        raise ParameterError("--randomized needs --ell")
    out = denoise(
        y,
        reg,
        args.method,
        tau=args.tau,
        eta=args.eta,
        c=args.c,
        randomized=args.randomized,
        ell=ell,
        power_iters=args.power_iters,
        seed=args.seed,
    )
    write_matrix(args.output, out.x_hat, args.format)
    return {
        "output": str(args.output),
        "method": args.method,
        "reg": reg.kind,
        "lam": out.lam,
        "tau": out.tau,
        "eta": out.eta,
        "shape": list(out.x_hat.shape),
    }


def cmd_bench_synth(args):
    config = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    overrides = {
        k: v for k, v in {
            "m": args.m, "n": args.n, "tau": args.tau, "rho": args.rho,
            "trials": args.trials, "seed": args.seed, "c": args.c,
            "ell_offset": args.ell_offset, "power_iters": args.power_iters,
        }.items() if v is not None
    }
    if args.methods:
        overrides["methods"] = [m for m in args.methods.split(",") if m]
    if args.randomized:
        overrides["randomized"] = True
    if overrides:
        config = ExperimentConfig.from_dict({**config.to_dict(), **overrides})
    log = (lambda msg: print(msg, file=sys.stderr)) if args.verbose else None
    rows = run_table(config, log=log)
    if args.out:
        write_rows(args.out, rows)
    result = {
        "config": config.to_dict(),
        "rows": [{"method": r.method, "snr_db": r.snr_db, "wall_time": r.wall_time} for r in rows],
    }
    if args.sweep_out:
        sweep, lam_dp, lam_sure = lambda_sweep(
            config.m, config.n, config.rho, config.tau, config.seed, config.c
        )
        with open(args.sweep_out, "w") as fh:
            fh.write("lam,snr_db\n")
            for lam, snr in sweep:
                fh.write(f"{lam!r},{snr!r}\n")
        result["sweep"] = {"path": str(args.sweep_out), "lam_dp": lam_dp, "lam_sure": lam_sure}
    return result


def cmd_bench_llr(args):
    methods = [m for m in args.methods.split(",") if m]
    summary, maps = run_llr_bench(
        methods=methods,
        tau=args.tau,
        height=args.height,
        width=args.width,
        frames=args.frames,
        window=args.window,
        stride=args.stride,
        c=args.c,
        seed=args.seed,
        padding=args.padding,
    )
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, err in maps.items():
            path = out / f"worst_case_{name}.csv"
            write_matrix(path, err, "csv")
            summary["methods"][name]["error_map"] = str(path)
        (out / "summary.json").write_text(json.dumps(summary, indent=2))
    return summary


def cmd_estimate_noise(args):
    y = read_matrix(args.input, args.format)
    return {"tau": estimate_noise_median(y), "shape": list(y.shape)}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lowrank-dp",
        description="Low-rank matrix denoising with closed-form discrepancy-principle thresholds.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-lambda", help="threshold for a residual bound")
    p.add_argument("--spectrum", help="comma-separated singular values")
    p.add_argument("--input", help="matrix file (CSV or LRMX binary)")
    p.add_argument("--format", choices=["csv", "bin"], default=None)
    p.add_argument("--eta", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--m", type=int, help="row count when --tau is used with --spectrum")
    p.add_argument("--n", type=int, help="column count when --tau is used with --spectrum")
    _add_reg_flags(p)
    p.set_defaults(func=cmd_solve_lambda)

    p = sub.add_parser("denoise", help="denoise a matrix file")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--input-format", choices=["csv", "bin"], default=None)
    p.add_argument("--format", choices=["csv", "bin"], default="bin", help="output format")
    p.add_argument("--method", choices=["dp", "sure", "hardt"], default="dp")
    _add_reg_flags(p)
    p.add_argument("--eta", type=float)
    p.add_argument("--tau", type=float, help="noise level; median rule if omitted")
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--randomized", action="store_true")
    p.add_argument("--ell", type=int)
    p.add_argument("--power-iters", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("bench-synth", help="synthetic denoising table")
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--tau", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--c", type=float)
    p.add_argument("--methods", help="comma-separated, e.g. NN-DP,NN-SURE,HardT")
    p.add_argument("--randomized", action="store_true")
    p.add_argument("--ell-offset", type=int)
    p.add_argument("--power-iters", type=int)
    p.add_argument("--out", help="result rows (.jsonl or .csv)")
    p.add_argument("--sweep-out", help="CSV of SNR against threshold")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_bench_synth)

    p = sub.add_parser("bench-llr", help="locally low-rank phantom study")
    p.add_argument("--methods", default="NN-DP,NN-SURE")
    p.add_argument("--tau", type=float, default=30.0)
    p.add_argument("--height", type=int, default=64)
    p.add_argument("--width", type=int, default=64)
    p.add_argument("--frames", type=int, default=20)
    p.add_argument("--window", type=int, default=7)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--padding", choices=["none", "edge"], default="none")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_bench_llr)

    p = sub.add_parser("estimate-noise", help="median-rule noise level of a matrix")
    p.add_argument("input")
    p.add_argument("--format", choices=["csv", "bin"], default=None)
    p.set_defaults(func=cmd_estimate_noise)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.func(args)
    except (ParameterError, ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    print(json.dumps(result, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Benchmark harness for the synthetic denoising tables and the LLR phantom study."""

from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .baselines import SURE_GRID, sure_select
from .discrepancy import eta_bound, solve_lambda_nn
from .errors import ParameterError
from .llr import denoise_llr, worst_case_error
from .matrix import svd
from .pipeline import denoise
from .reduced import default_ell
from .shrinkage import Regularizer, soft_values
from .synth import gen_phantom, gen_synthetic, snr_db

__all__ = [
    "Method",
    "ExperimentConfig",
    "ResultRow",
    "parse_method",
    "run_table",
    "lambda_sweep",
    "run_llr_bench",
    "write_rows",
    "read_rows",
    "DEFAULT_METHODS",
]

DEFAULT_METHODS = (
    "HardT", "NN-SURE", "NN-DP", "TNN-SURE", "TNN-DP", "GWNN-SURE", "GWNN-DP",
)


@dataclass(frozen=True)
class Method:
    reg: Regularizer
    selector: str

    @property
    def name(self):
        if self.selector == "hardt":
            return "HardT"
        return f"{self.reg.label}-{self.selector.upper()}"


def parse_method(name, tnn_r=1, gwnn_p=0.7, gwnn_eps=1e-6):
    """``"NN-DP"``, ``"TNN-SURE"``, ``"GWNN-DP"``, ``"HardT"`` ... -> :class:`Method`."""
    key = name.strip().lower()
    if key in ("hardt", "rank-hardt"):
        return Method(Regularizer.rank(), "hardt")
    try:
        reg_name, selector = key.rsplit("-", 1)
    except ValueError:
        raise ParameterError(f"cannot parse method {name!r}; expected e.g. 'NN-DP'") from None
    regs = {
        "nn": Regularizer.nn(),
        "tnn": Regularizer.tnn(tnn_r),
        "gwnn": Regularizer.gwnn(gwnn_p, gwnn_eps),
        "rank": Regularizer.rank(),
    }
    if reg_name not in regs or selector not in ("dp", "sure", "hardt"):
        raise ParameterError(f"cannot parse method {name!r}")
    return Method(regs[reg_name], selector)


@dataclass
class ExperimentConfig:
    m: int = 500
    n: int = 500
    tau: float = 3.0
    rho: float = 0.05
    trials: int = 10
    methods: list = field(default_factory=lambda: list(DEFAULT_METHODS))
    randomized: bool = False
    ell_offset: int = 5
    power_iters: int = 2
    c: float = 1.0
    seed: int = 0
    tnn_r: int = 1
    gwnn_p: float = 0.7
    gwnn_eps: float = 1e-6

    def __post_init__(self):
        if not 0 < self.rho <= 1:
            raise ParameterError(f"rho must lie in (0, 1], got {self.rho}")
        if self.trials < 1:
            raise ParameterError(f"trials must be >= 1, got {self.trials}")
        self.methods = [m if isinstance(m, str) else m.name for m in self.methods]
        for name in self.methods:
            parse_method(name)

    @classmethod
    def from_dict(cls, data):
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ParameterError(f"unknown config keys: {unknown}")
        return cls(**known)

    @classmethod
    def from_json(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self):
        return asdict(self)

    def parsed_methods(self):
        return [parse_method(name, self.tnn_r, self.gwnn_p, self.gwnn_eps) for name in self.methods]

    @property
    def ell(self):
        return default_ell(self.m, self.n, self.rho, self.ell_offset)


@dataclass
class ResultRow:
    method: str
    m: int
    n: int
    tau: float
    rho: float
    randomized: bool
    snr_db: float
    wall_time: float
    snr_trials: list
    time_trials: list

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


def _trial_seeds(seed, trials):
    children = np.random.SeedSequence(seed).spawn(trials)
    return [int(c.generate_state(1)[0]) for c in children]


def run_table(config: ExperimentConfig, log=None):
    """Run every method on ``config.trials`` fresh synthetic problems.

    Wall times bracket only the denoising call (SVD or range finder,
    parameter selection and reconstruction), never data generation.
    """
    methods = config.parsed_methods()
    snrs = {m.name: [] for m in methods}
    times = {m.name: [] for m in methods}
    ell = config.ell if config.randomized else None
    for trial, seed in enumerate(_trial_seeds(config.seed, config.trials)):
        truth, observed = gen_synthetic(config.m, config.n, config.rho, config.tau, seed)
        eta = eta_bound(config.m, config.n, config.tau, config.c)
        for method in methods:
            start = time.perf_counter()
            out = denoise(
                observed,
                method.reg,
                method.selector,
                tau=config.tau,
                eta=eta,
                randomized=config.randomized,
                ell=ell,
                power_iters=config.power_iters,
                seed=seed,
            )
            elapsed = time.perf_counter() - start
            snrs[method.name].append(snr_db(truth, out.x_hat))
            times[method.name].append(elapsed)
            if log:
                log(f"trial {trial} {method.name}: {snrs[method.name][-1]:.2f} dB, {elapsed:.3f} s")
    rows = []
    for method in methods:
        rows.append(ResultRow(
            method=method.name,
            m=config.m,
            n=config.n,
            tau=config.tau,
            rho=config.rho,
            randomized=config.randomized,
            snr_db=float(np.mean(snrs[method.name])),
            wall_time=float(np.mean(times[method.name])),
            snr_trials=[float(v) for v in snrs[method.name]],
            time_trials=[float(v) for v in times[method.name]],
        ))
    return rows


def lambda_sweep(m, n, rho, tau, seed=0, c=1.0, grid=None):
    """SNR as a function of the soft threshold, with the DP and SURE choices marked.

    Returns ``(rows, lam_dp, lam_sure)`` where rows are ``(lam, snr_db)``.
    """
    truth, observed = gen_synthetic(m, n, rho, tau, seed)
    f = svd(observed)
    grid = SURE_GRID if grid is None else np.asarray(grid, dtype=np.float64)
    rows = [(float(lam), snr_db(truth, f.compose(soft_values(f.s, lam)))) for lam in grid]
    lam_dp = solve_lambda_nn(f, eta_bound(m, n, tau, c)).lam
    lam_sure = sure_select(f, tau).argmin_lambda
    return rows, lam_dp, lam_sure


def run_llr_bench(
    methods=("NN-DP", "NN-SURE"),
    tau=30.0,
    height=64,
    width=64,
    frames=20,
    window=7,
    stride=1,
    c=1.0,
    seed=0,
    padding="none",
):
    """Denoise a noisy phantom with each method.

    Returns ``(summary, error_maps)``: summary holds input SNR plus
    per-method SNR and wall time; error_maps holds worst-case error images.
    """
    truth = gen_phantom(height, width, frames, seed)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    noisy = truth + tau * rng.standard_normal(truth.shape)
    summary = {"input_snr_db": snr_db(truth, noisy), "tau": tau, "methods": {}}
    maps = {}
    for name in methods:
        method = parse_method(name)
        start = time.perf_counter()
        est = denoise_llr(noisy, method.reg, tau, c, window, stride, method.selector, padding=padding)
        elapsed = time.perf_counter() - start
        summary["methods"][method.name] = {"snr_db": snr_db(truth, est), "wall_time": elapsed}
        maps[method.name] = worst_case_error(truth, est)
    return summary, maps


_CSV_LIST_FIELDS = ("snr_trials", "time_trials")


def write_rows(path, rows, fmt=None):
    """Write result rows as JSON lines (``.jsonl``) or CSV (``.csv``)."""
    path = Path(path)
    fmt = fmt or ("csv" if path.suffix == ".csv" else "jsonl")
    if fmt == "jsonl":
        with path.open("w") as fh:
            for row in rows:
                fh.write(json.dumps(row.to_dict()) + "\n")
    elif fmt == "csv":
        fields = list(ResultRow.__dataclass_fields__)
        with path.open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=fields)
            writer.writeheader()
            for row in rows:
                data = row.to_dict()
                for key in _CSV_LIST_FIELDS:
                    data[key] = json.dumps(data[key])
                writer.writerow(data)
    else:
        raise ParameterError(f"unknown result format {fmt!r}")


def read_rows(path, fmt=None):
    path = Path(path)
    fmt = fmt or ("csv" if path.suffix == ".csv" else "jsonl")
    if fmt == "jsonl":
        with path.open() as fh:
            return [ResultRow.from_dict(json.loads(line)) for line in fh if line.strip()]
    if fmt == "csv":
        rows = []
        with path.open(newline="") as fh:
            for data in csv.DictReader(fh):
                rows.append(ResultRow(
                    method=data["method"],
                    m=int(data["m"]),
                    n=int(data["n"]),
                    tau=float(data["tau"]),
                    rho=float(data["rho"]),
                    randomized=data["randomized"] == "True",
                    snr_db=float(data["snr_db"]),
                    wall_time=float(data["wall_time"]),
                    snr_trials=json.loads(data["snr_trials"]),
                    time_trials=json.loads(data["time_trials"]),
                ))
        return rows
    raise ParameterError(f"unknown result format {fmt!r}")


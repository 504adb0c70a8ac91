"""Sweep orchestration: trial plans, concurrent execution and report files.

A trial is fully determined by ``(theorem_id, seed, index)``; its parameters
are read off the config grids by cycling on ``index`` and its matrices come
from :func:`doiforge.ensembles.trial_rng`.  Trials run on a thread pool and
are merged back in plan order, so the report files do not depend on the
thread count.
"""
from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Callable

import numpy as np

from . import ensembles as ens
from .besov import besov_chain_check, log_grid, sample
from .config import THEOREMS, RunConfig
from .doi import DoiOperator, commutator_transfer_check, defining_identity_check
from .errors import ConfigError, DoiforgeError, IoError
from .fourier import fourier_profile, theta_scaling_fit, write_profile_csv
from .functions import f_alpha, h_alpha, main_f
from .harness import (c_commutator, weak_power_check, multiplier_constant, verify_cor12, verify_thm11,
                      verify_thm13, verify_thm14, verify_thm15, verify_thm16_cor22, verify_thm17,
                      verify_thm18, verify_thm19)
from .kernels import constant, left, mainf_kernel, psi_prime_alpha, right
from .norms import NormSpec, norm_eval, schatten, weak_lp
from .report import DEFAULT_TOL
from .spectral import HermitianOperator, apply_function

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# (full, quick) trial counts
TRIALS = {
    "doi": (500, 20), "thm3": (1000, 30), "thm11": (1000, 30), "cor12": (100, 5),
    "thm13": (200, 12), "thm14": (200, 12), "thm15": (200, 12), "thm16": (200, 12),
    "cor22": (50, 4), "thm17": (200, 10), "thm17_scalar": (12, 12), "thm18": (100, 4),
    "thm19": (10, 1),
}

DEFAULTS = {
    "n": (4, 8),
    "alpha": (0.1, 0.5, 1.0, 2.0, 10.0),
    "theta": (0.25, 0.5, 0.75),
    "p": (1.0, 2.0),
    "r": (1.1, 1.5, 2.0, 3.0),
    "norms": ("schatten:1", "schatten:2", "op", "weak:1"),
}
SCALAR_P = (1.0, 2.0, 3.0)
SCALAR_R = (1.1, 1.5, 2.0, 3.0)
SCALAR_SIZE = 1000


def _cycle(values, i):
    return values[i % len(values)]


def _dim(g, i, default=DEFAULTS["n"]):
    return _cycle(g.n or default, i)


def _combo(i, *axes):
    """Mixed-radix digits of ``i``: one value per axis, first axis fastest.

    Consecutive trials sweep the full product of the axes, then the counter
    that is returned last keeps going for any remaining choice.
    """
    out = []
    for axis in axes:
        out.append(axis[i % len(axis)])
        i //= len(axis)
    return (*out, i)


@dataclass(frozen=True)
class Grid:
    n: tuple  # empty means each plan's own default
    alpha: tuple
    theta: tuple
    p: tuple
    r: tuple
    norms: tuple
    tol: float

    @classmethod
    def from_config(cls, cfg: RunConfig) -> "Grid":
        return cls(
            n=cfg.n,
            alpha=cfg.alpha or DEFAULTS["alpha"],
            theta=cfg.theta or DEFAULTS["theta"],
            p=cfg.p or DEFAULTS["p"],
            r=cfg.r or DEFAULTS["r"],
            norms=tuple(NormSpec.parse(s) for s in (cfg.norms or DEFAULTS["norms"])),
            tol=DEFAULT_TOL if cfg.tol is None else cfg.tol,
        )


def trial_count(theorem_id: str, cfg: RunConfig) -> int:
    if theorem_id == "thm17_scalar":
        return len(SCALAR_P) * len(SCALAR_R)
    if cfg.trials is not None:
        return cfg.trials
    full, quick = TRIALS[theorem_id]
    return quick if cfg.quick else full


def _perturbed(rng, D0: HermitianOperator, size: float) -> HermitianOperator:
    return HermitianOperator(D0.entries + ens.hermitian_with_norm(rng, D0.dim, size).entries)


# --- one function per theorem id: (grid, rng, index, seed) -> EstimateReport ------

def _t_doi(g, rng, i, seed):
    k, rest = _combo(i, range(5))
    n = min(_dim(g, rest, tuple(range(2, 9))), 8)
    kernels = (constant(2.0 - 0.5j), left(main_f()), right(h_alpha(1.0)),
               psi_prime_alpha(_cycle(g.alpha, rest)), mainf_kernel())
    D0 = ens.gaussian_hermitian(rng, n, 2.0)
    D1 = ens.gaussian_hermitian(rng, n, 2.0)
    return defining_identity_check(DoiOperator(kernels[k], D0, D1), trials=1, rng=rng)


def _t_thm3(g, rng, i, seed):
    f, rest = _combo(i, (main_f(), h_alpha(1.0), f_alpha(0.5)))
    n = _dim(g, rest, tuple(range(2, 9)))
    D0 = ens.gaussian_hermitian(rng, n, 2.0)
    D1 = ens.gaussian_hermitian(rng, n, 2.0)
    a = ens.complex_gaussian(rng, n)
    return commutator_transfer_check(f, None, D0, D1, a)


def _t_thm11(g, rng, i, seed):
    alpha, spec, scale, rest = _combo(i, g.alpha, g.norms, (1.0, 5.0))
    n = _dim(g, rest)
    D = ens.gaussian_hermitian(rng, n, scale)
    a = ens.complex_gaussian(rng, n)
    return verify_thm11(D, a, alpha, spec, tol=g.tol, seed=seed)


def _t_cor12(g, rng, i, seed):
    n = _dim(g, i)
    D = ens.clustered_spectrum(rng, n, gap=1e-3, floor=1.0)
    a = ens.complex_gaussian(rng, n)
    p = _cycle(g.p + (math.inf,), i)
    return verify_cor12(D, a, p, tol=g.tol, seed=seed)


def _lipschitz_pair(g, rng, rest, size):
    n = _dim(g, rest)
    D0 = ens.gaussian_hermitian(rng, n, 2.0)
    return D0, _perturbed(rng, D0, size)


def _t_thm13(g, rng, i, seed):
    alpha, theta, spec, rest = _combo(i, g.alpha, g.theta, g.norms)
    D0, D = _lipschitz_pair(g, rng, rest, 1.0)
    return verify_thm13(D0, D, alpha, theta, spec, tol=g.tol, seed=seed)


def _t_thm14(g, rng, i, seed):
    alpha, theta, spec, rest = _combo(i, g.alpha, g.theta, g.norms)
    D0, D = _lipschitz_pair(g, rng, rest, 0.5)
    return verify_thm14(D0, D, alpha, theta, spec, tol=g.tol, seed=seed)


def _t_thm15(g, rng, i, seed):
    alpha, spec, rest = _combo(i, g.alpha, g.norms)
    size = float(np.exp(rng.uniform(np.log(0.1), np.log(3.0))))
    D0, D = _lipschitz_pair(g, rng, rest, size)
    return verify_thm15(D0, D, alpha, spec, tol=g.tol, seed=seed)


def _t_thm16(g, rng, i, seed):
    alpha, spec, rest = _combo(i, g.alpha, g.norms)
    size = float(rng.uniform(1e-3, 1.0))
    D0, D = _lipschitz_pair(g, rng, rest, size)
    return verify_thm16_cor22(D0, D, alpha, spec, tol=g.tol, seed=seed)


def _t_cor22(g, rng, i, seed):
    N = (5, 10, 20)[i % 3]
    D0 = ens.periodic_derivative_model(N)
    V = ens.bounded_potential(rng, N, norm=float(rng.uniform(0.05, 1.0)))
    D = HermitianOperator(D0.entries + V.entries)
    return verify_thm16_cor22(D0, D, 1.0, weak_lp(_cycle(g.p, i)), tol=g.tol, seed=seed,
                              theorem_id="cor22")


def _t_thm17(g, rng, i, seed):
    p, r, rest = _combo(i, g.p, g.r)
    n = _dim(g, rest)
    D = ens.gaussian_hermitian(rng, n, 3.0)
    a = ens.complex_gaussian(rng, n)
    return verify_thm17(D, a, p, r, tol=g.tol, seed=seed)


def _t_thm17_scalar(g, rng, i, seed):
    p, r = list(product(SCALAR_P, SCALAR_R))[i]
    lam = np.arange(1, SCALAR_SIZE + 1, dtype=float) ** (1.0 / p)
    return weak_power_check(lam, p, r, tol=g.tol)


def _t_thm18(g, rng, i, seed):
    p, rest = _combo(i, (1.0, 2.0))
    n = min(_dim(g, rest), 8)
    D0 = ens.gaussian_hermitian(rng, n, 2.0)
    G = ens.hermitian_with_norm(rng, n, 1.0)
    return verify_thm18(D0, G.entries, schatten(p), tol=g.tol, seed=seed)


def _t_thm19(g, rng, i, seed):
    n = 6
    D0 = ens.gaussian_hermitian(rng, n, 2.0)
    G = ens.hermitian_with_norm(rng, n, 1.0)
    K = ens.hermitian_with_norm(rng, n, 1.0)
    return verify_thm19(D0, G.entries, K.entries, schatten(1.0), seed=seed)


PLANS: dict[str, Callable] = {
    "doi": _t_doi, "thm3": _t_thm3, "thm11": _t_thm11, "cor12": _t_cor12,
    "thm13": _t_thm13, "thm14": _t_thm14, "thm15": _t_thm15, "thm16": _t_thm16,
    "cor22": _t_cor22, "thm17": _t_thm17, "thm17_scalar": _t_thm17_scalar,
    "thm18": _t_thm18, "thm19": _t_thm19,
}
assert set(PLANS) == set(THEOREMS)

RECORD_FIELDS = ("theorem_id", "lhs", "rhs", "constant_used", "ratio", "passed", "tolerance",
                 "params", "notes", "extras")


# --- records --------------------------------------------------------------------

def jsonable(x):
    """Plain JSON types; non-finite floats become the strings ``inf``, ``-inf``, ``nan``."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, complex):
        return [jsonable(x.real), jsonable(x.imag)]
    if x is None or isinstance(x, str):
        return x
    return str(x)


def _num(v):
    return float(v) if isinstance(v, str) else v


def recheck_record(rec: dict) -> bool:
    """Recompute ``passed`` from the stored numbers of a JSON record."""
    if rec.get("error"):
        return False
    lhs, rhs, c, tol = (_num(rec[k]) for k in ("lhs", "rhs", "constant_used", "tolerance"))
    ok = lhs <= c * rhs + tol
    return bool(ok and rec.get("extras", {}).get("side_checks_passed", True))


def run_trial(theorem_id: str, grid: Grid, seed: int, index: int) -> dict:
    rng = ens.trial_rng(seed, theorem_id, index)
    try:
        rep = PLANS[theorem_id](grid, rng, index, seed)
        rec = rep.to_record()
        rec["error"] = None
    except DoiforgeError as e:
        rec = {k: None for k in RECORD_FIELDS}
        rec.update(theorem_id=theorem_id, passed=False, params={}, extras={}, notes="",
                   error=f"{type(e).__name__}: {e}")
    rec["trial"] = index
    rec["seed"] = seed
    rec["suite"] = theorem_id
    return jsonable(rec)


def thread_count(cfg: RunConfig) -> int:
    env = os.environ.get("DOIFORGE_THREADS")
    cap = cfg.threads
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise ConfigError(f"DOIFORGE_THREADS must be an integer, got {env!r}") from None
    if cap is None:
        cap = min(4, os.cpu_count() or 1)
    return max(1, cap)


def warm_constants(grid: Grid, theorems) -> None:
    """Build the cached Fourier constants up front so worker threads only read them."""
    lip = {"thm11", "thm13", "thm14", "thm15", "thm16", "cor22", "cor12"}
    if lip & set(theorems):
        multiplier_constant(0.5)
    if {"thm13", "thm14"} & set(theorems):
        for th in grid.theta:
            multiplier_constant(th)


def execute(cfg: RunConfig) -> list[dict]:
    cfg.validate()
    if not cfg.theorems:
        raise ConfigError("no theorems selected")
    grid = Grid.from_config(cfg)
    warm_constants(grid, cfg.theorems)
    jobs = [(tid, i) for tid in cfg.theorems for i in range(trial_count(tid, cfg))]
    workers = thread_count(cfg)
    if workers == 1:
        return [run_trial(tid, grid, cfg.seed, i) for tid, i in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # map preserves submission order, which is the deterministic merge
        return list(pool.map(lambda job: run_trial(job[0], grid, cfg.seed, job[1]), jobs))


def summarize(records: list[dict]) -> list[dict]:
    rows = {}
    for rec in records:
        suite = rec["suite"]
        row = rows.setdefault(suite, {"theorem_id": suite, "trials": 0, "passed": 0, "failed": 0,
                                      "errors": 0, "max_ratio": 0.0, "max_bound_usage": 0.0})
        row["trials"] += 1
        row["passed" if rec["passed"] else "failed"] += 1
        if rec.get("error"):
            row["errors"] += 1
            continue
        ratio = _num(rec["ratio"])
        lhs, rhs, c = _num(rec["lhs"]), _num(rec["rhs"]), _num(rec["constant_used"])
        row["max_ratio"] = max(row["max_ratio"], ratio)
        bound = c * rhs
        usage = lhs / bound if bound > 0 and math.isfinite(bound) else 0.0
        row["max_bound_usage"] = max(row["max_bound_usage"], usage)
    return list(rows.values())


def write_reports(records: list[dict], out: Path) -> tuple[Path, Path]:
    try:
        out.mkdir(parents=True, exist_ok=True)
        rec_path = out / "records.jsonl"
        with rec_path.open("w") as fh:
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True, allow_nan=False) + "\n")
        sum_path = out / "summary.csv"
        rows = summarize(records)
        with sum_path.open("w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=["theorem_id", "trials", "passed", "failed", "errors",
                                               "max_ratio", "max_bound_usage"])
            w.writeheader()
            for row in rows:
                w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    except OSError as e:
        raise IoError(f"cannot write reports to {out}: {e}") from None
    return rec_path, sum_path


def format_summary(records: list[dict]) -> str:
    lines = [f"{'theorem':<14}{'trials':>8}{'pass':>8}{'fail':>8}{'max ratio':>14}{'max lhs/bound':>16}"]
    for row in summarize(records):
        lines.append(f"{row['theorem_id']:<14}{row['trials']:>8}{row['passed']:>8}{row['failed']:>8}"
                     f"{row['max_ratio']:>14.6g}{row['max_bound_usage']:>16.6g}")
    return "\n".join(lines)


def run(cfg: RunConfig) -> tuple[int, list[dict]]:
    records = execute(cfg)
    write_reports(records, Path(cfg.out))
    status = EXIT_OK if all(r["passed"] for r in records) else EXIT_FAIL
    return status, records


# --- demo -----------------------------------------------------------------------

def periodic_demo(N: int, p: float, seed: int, *, alpha: float = 1.0, potential_norm: float = 1.0) -> dict:
    """Derivative on the circle plus a bounded smooth potential, in weak-L^p norms."""
    D0 = ens.periodic_derivative_model(N)
    V = ens.bounded_potential(ens.trial_rng(seed, "demo_periodic", 0), N, norm=potential_norm)
    D = HermitianOperator(D0.entries + V.entries)
    spec = weak_lp(p)
    rep = verify_thm16_cor22(D0, D, alpha, spec, theorem_id="cor22", seed=seed)
    inv0 = apply_function(h_alpha(alpha), D0)
    inv1 = apply_function(h_alpha(alpha), D)
    rec = rep.to_record()
    rec["extras"].update({
        "N": N, "p": p, "alpha": alpha, "potential_norm": potential_norm,
        "weak_norm_inv_delta0": norm_eval(inv0, spec),
        "weak_norm_inv_delta": norm_eval(inv1, spec),
        "weak_norm_inv_difference": norm_eval(inv1.entries - inv0.entries, spec),
    })
    return jsonable(rec)


def run_demo(cfg: RunConfig) -> tuple[int, dict]:
    cfg.validate()
    rec = periodic_demo(cfg.demo_N, cfg.demo_p, cfg.seed)
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "demo_periodic.json").write_text(json.dumps(rec, sort_keys=True, indent=1) + "\n")
    except OSError as e:
        raise IoError(f"cannot write demo report to {out}: {e}") from None
    return (EXIT_OK if rec["passed"] else EXIT_FAIL), rec


# --- profiles -------------------------------------------------------------------

def _write_rows(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def emit_profiles(cfg: RunConfig) -> tuple[int, dict]:
    """CSV data for the sech profile, the theta sweep, the FD order curve and the Besov chain."""
    cfg.validate()
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        paths = {}
        paths["sech_half"] = out / "profile_sech_half.csv"
        write_profile_csv(fourier_profile("SechHalf"), paths["sech_half"])

        fit = theta_scaling_fit()
        paths["theta_sweep"] = out / "theta_sweep.csv"
        spec2 = schatten(2)
        _write_rows(paths["theta_sweep"],
                    ["theta", "sobolev_sum", "multiplier_constant", "c_commutator_schatten2",
                     "fitted_exponent"],
                    [(th, v, multiplier_constant(float(th)), c_commutator(spec2, float(th)), fit.exponent)
                     for th, v in zip(fit.thetas, fit.sobolev)])

        rng = ens.trial_rng(cfg.seed, "thm18", 0)
        D0 = ens.gaussian_hermitian(rng, 6, 2.0)
        G = ens.hermitian_with_norm(rng, 6, 1.0)
        rep = verify_thm18(D0, G.entries, schatten(2.0), seed=cfg.seed)
        ex = rep.extras
        paths["thm18_order"] = out / "thm18_order.csv"
        ratios_one = [float("nan")] + ex["one_sided_ratio"]
        ratios_cen = [float("nan")] + ex["central_ratio"]
        _write_rows(paths["thm18_order"], ["t", "one_sided_error", "central_error",
                                           "one_sided_ratio", "central_ratio"],
                    zip(ex["t"], ex["one_sided"], ex["central"], ratios_one, ratios_cen))

        f = sample(main_f(), decay="inverse-square")
        chain, prof = besov_chain_check(f, 0.5, 1.0, log_grid(20 if cfg.quick else 200))
        paths["besov"] = out / "besov_profile.csv"
        prof.write_csv(paths["besov"])
        (out / "besov_chain.json").write_text(
            json.dumps(jsonable(chain.to_record()), sort_keys=True, indent=1) + "\n")
    except OSError as e:
        raise IoError(f"cannot write profiles to {out}: {e}") from None
    ok = rep.passed and chain.passed
    return (EXIT_OK if ok else EXIT_FAIL), {k: str(v) for k, v in paths.items()}

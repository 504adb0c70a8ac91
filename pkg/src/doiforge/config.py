"""Run configuration: a TOML file plus command-line overrides.

Schema (every key optional)::

    seed = 7                      # required somewhere: file or --seed
    theorems = ["thm11", "thm13"] # or "all"
    out = "reports"
    tol = 1e-9                    # relative slack added to every inequality
    quick = false

    [grid]
    n = [4, 8]
    trials = 20
    alpha = [0.1, 1.0, 10.0]
    theta = [0.25, 0.5, 0.75]
    p = [1.0, 2.0]
    r = [1.5, 2.0]
    norms = ["schatten:1", "schatten:2"]

    [demo]
    N = 50
    p = 1.0
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError, InvalidSpec
from .norms import NormSpec

THEOREMS = ("doi", "thm3", "thm11", "cor12", "thm13", "thm14", "thm15", "thm16",
            "cor22", "thm17", "thm17_scalar", "thm18", "thm19")
ALIASES = {"thm16_cor22": "thm16"}


def _floats(v, name):
    vals = v if isinstance(v, list) else [v]
    out = []
    for x in vals:
        if isinstance(x, str) and x.strip().lower() in ("inf", "infinity"):
            out.append(math.inf)
            continue
        try:
            out.append(float(x))
        except (TypeError, ValueError):
            raise ConfigError(f"{name}: expected numbers, got {x!r}") from None
    return tuple(out)


def _ints(v, name):
    vals = v if isinstance(v, list) else [v]
    try:
        out = tuple(int(x) for x in vals)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected integers, got {v!r}") from None
    return out


@dataclass(frozen=True)
class RunConfig:
    seed: int | None = None
    theorems: tuple = ()
    out: Path = Path("reports")
    tol: float | None = None
    quick: bool = False
    n: tuple = ()
    trials: int | None = None
    alpha: tuple = ()
    theta: tuple = ()
    p: tuple = ()
    r: tuple = ()
    norms: tuple = ()
    demo_N: int = 50
    demo_p: float = 1.0
    threads: int | None = None

    def validate(self) -> "RunConfig":
        if self.seed is None:
            raise ConfigError("a seed is required (config 'seed' or --seed)")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must fit in 64 bits")
        for t in self.theorems:
            if t not in THEOREMS:
                raise ConfigError(f"unknown theorem id {t!r}; choose from {', '.join(THEOREMS)} or all")
        if any(n < 1 for n in self.n):
            raise ConfigError("n must be positive")
        if self.trials is not None and self.trials < 1:
            raise ConfigError("trials must be positive")
        if any(not a > 0 for a in self.alpha):
            raise ConfigError("alpha values must be positive")
        if any(not 0 < t < 1 for t in self.theta):
            raise ConfigError("theta values must lie in (0, 1)")
        if any(not p >= 1 for p in self.p):
            raise ConfigError("p values must be >= 1")
        if any(not r > 1 for r in self.r):
            raise ConfigError("r values must exceed 1")
        if self.tol is not None and not self.tol >= 0:
            raise ConfigError("tol must be non-negative")
        if self.demo_N < 1 or not self.demo_p >= 1:
            raise ConfigError("demo needs N >= 1 and p >= 1")
        for s in self.norms:
            try:
                NormSpec.parse(s)
            except InvalidSpec as e:
                raise ConfigError(str(e)) from None
        return self

    @property
    def norm_specs(self) -> tuple:
        return tuple(NormSpec.parse(s) for s in self.norms)


def expand_theorems(names) -> tuple:
    out = []
    for name in names:
        name = ALIASES.get(name, name)
        if name == "all":
            out.extend(THEOREMS)
        else:
            out.append(name)
    seen = []
    for t in out:
        if t not in seen:
            seen.append(t)
    return tuple(seen)


def load_config(path) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"invalid TOML in {path}: {e}") from None
    return from_mapping(data)


def from_mapping(data: dict) -> RunConfig:
    known = {"seed", "theorems", "out", "tol", "quick", "grid", "demo", "threads"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    grid = data.get("grid", {})
    demo = data.get("demo", {})
    kw = {}
    if "seed" in data:
        kw["seed"] = _ints(data["seed"], "seed")[0]
    if "theorems" in data:
        th = data["theorems"]
        kw["theorems"] = expand_theorems([th] if isinstance(th, str) else th)
    if "out" in data:
        kw["out"] = Path(data["out"])
    if "tol" in data:
        kw["tol"] = _floats(data["tol"], "tol")[0]
    if "quick" in data:
        kw["quick"] = bool(data["quick"])
    if "threads" in data:
        kw["threads"] = _ints(data["threads"], "threads")[0]
    for key in ("alpha", "theta", "p", "r"):
        if key in grid:
            kw[key] = _floats(grid[key], f"grid.{key}")
    if "n" in grid:
        kw["n"] = _ints(grid["n"], "grid.n")
    if "trials" in grid:
        kw["trials"] = _ints(grid["trials"], "grid.trials")[0]
    if "norms" in grid:
        norms = grid["norms"]
        kw["norms"] = tuple([norms] if isinstance(norms, str) else norms)
    unknown = set(grid) - {"alpha", "theta", "p", "r", "n", "trials", "norms"}
    if unknown:
        raise ConfigError(f"unknown grid keys: {', '.join(sorted(unknown))}")
    if "N" in demo:
        kw["demo_N"] = _ints(demo["N"], "demo.N")[0]
    if "p" in demo:
        kw["demo_p"] = _floats(demo["p"], "demo.p")[0]
    return RunConfig(**kw)


def override(cfg: RunConfig, **flags) -> RunConfig:
    """Apply command-line values that were actually given (``None`` means absent)."""
    changes = {k: v for k, v in flags.items() if v is not None and v != ()}
    return replace(cfg, **changes)

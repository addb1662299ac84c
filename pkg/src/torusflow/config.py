"""Flat key=value run configuration with strict parsing.

The format is one ``key = value`` assignment per line; blank lines and lines
starting with ``#`` are skipped, and a trailing ``# comment`` is stripped
from values.  Unknown keys, duplicate keys, missing required keys and
out-of-range values are all rejected, and every violation is reported at
once.  Nothing is read from environment variables.

Schema (defaults in parentheses):

    target              sphere:K | flat-torus          [required]
    grid                N or HxW, 4..4096              [required]
    init                covering | lonlat | constant   [required]
    degree_p            int in [-32, 32]               (1)
    degree_q            int in [-32, 32]               (1)
    lat_amplitude       float in (0, 1.5]              (0.5)
    perturb_amplitude   float in [0, 1]                (0)
    seed                int >= 0                       (0)
    a0                  float                          (0)
    b0                  float >= 1e-6                  (1)
    eta2                float >= 0                     (2)
    dt_policy           cfl | fixed                    (cfl)
    cfl_fraction        float in (0, 0.2]              (0.2)
    dt_fixed            float > 0                      [required iff dt_policy = fixed]
    t_max               float >= 0                     (10)
    tol_converge        float > 0                      (5e-4)
    cadence             int >= 1, trace rows           (100)
    checkpoint_cadence  int >= 0, 0 disables           (0)
    out                 output directory               (unset)
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .errors import ConfigError
from .targets import TargetManifold


@dataclass(frozen=True)
class RunConfig:
    target: str
    grid_h: int
    grid_w: int
    init: str
    degree_p: int = 1
    degree_q: int = 1
    lat_amplitude: float = 0.5
    perturb_amplitude: float = 0.0
    seed: int = 0
    a0: float = 0.0
    b0: float = 1.0
    eta2: float = 2.0
    dt_policy: str = "cfl"
    cfl_fraction: float = 0.2
    dt_fixed: Optional[float] = None
    t_max: float = 10.0
    tol_converge: float = 5e-4
    cadence: int = 100
    checkpoint_cadence: int = 0
    out: Optional[str] = None

    def with_overrides(self, seed: Optional[int] = None, out: Optional[str] = None) -> "RunConfig":
        cfg = self
        if seed is not None:
            cfg = replace(cfg, seed=seed)
        if out is not None:
            cfg = replace(cfg, out=out)
        return cfg


def _parse_grid(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) == 1:
        n = int(parts[0])
        dims = (n, n)
    elif len(parts) == 2:
        dims = (int(parts[0]), int(parts[1]))
    else:
        raise ValueError("expected N or HxW")
    for d in dims:
        if not 4 <= d <= 4096:
            raise ValueError(f"grid dimension {d} outside [4, 4096]")
    return dims


_INT_KEYS = {
    "degree_p": (-32, 32),
    "degree_q": (-32, 32),
    "seed": (0, 2**62),
    "cadence": (1, 2**62),
    "checkpoint_cadence": (0, 2**62),
}

_FLOAT_KEYS = {
    "lat_amplitude": (0.0, 1.5, "open_low"),
    "perturb_amplitude": (0.0, 1.0, "closed"),
    "a0": (float("-inf"), float("inf"), "closed"),
    "b0": (1e-6, float("inf"), "closed"),
    "eta2": (0.0, float("inf"), "closed"),
    "cfl_fraction": (0.0, 0.2, "open_low"),
    "dt_fixed": (0.0, float("inf"), "open_low"),
    "t_max": (0.0, float("inf"), "closed"),
    "tol_converge": (0.0, float("inf"), "open_low"),
}

_ALL_KEYS = (
    {"target", "grid", "init", "dt_policy", "out"}
    | set(_INT_KEYS)
    | set(_FLOAT_KEYS)
)

_REQUIRED = ("target", "grid", "init")


def parse_config(text: str) -> RunConfig:
    """Parse and validate; raises ConfigError listing every violation."""
    raw: dict[str, str] = {}
    problems: list[str] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "#" in stripped:
            stripped = stripped[: stripped.index("#")].strip()
            if not stripped:
                continue
        if "=" not in stripped:
            problems.append(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
            continue
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _ALL_KEYS:
            problems.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in raw:
            problems.append(f"line {lineno}: duplicate key {key!r}")
            continue
        if not value:
            problems.append(f"line {lineno}: empty value for {key!r}")
            continue
        raw[key] = value

    for key in _REQUIRED:
        if key not in raw:
            problems.append(f"missing required key {key!r}")

    fields: dict[str, object] = {}

    if "target" in raw:
        try:
            TargetManifold.from_name(raw["target"])
            fields["target"] = raw["target"]
        except ValueError as exc:
            problems.append(f"target: {exc}")
    if "grid" in raw:
        try:
            fields["grid_h"], fields["grid_w"] = _parse_grid(raw["grid"])
        except ValueError as exc:
            problems.append(f"grid: {exc}")
    if "init" in raw:
        if raw["init"] in ("covering", "lonlat", "constant"):
            fields["init"] = raw["init"]
        else:
            problems.append(f"init: unknown generator {raw['init']!r}")
    if "dt_policy" in raw:
        if raw["dt_policy"] in ("cfl", "fixed"):
            fields["dt_policy"] = raw["dt_policy"]
        else:
            problems.append(f"dt_policy: expected 'cfl' or 'fixed', got {raw['dt_policy']!r}")
    if "out" in raw:
        fields["out"] = raw["out"]

    for key, (lo, hi) in _INT_KEYS.items():
        if key not in raw:
            continue
        try:
            v = int(raw[key])
        except ValueError:
            problems.append(f"{key}: not an integer: {raw[key]!r}")
            continue
        if not lo <= v <= hi:
            problems.append(f"{key}: {v} outside [{lo}, {hi}]")
        else:
            fields[key] = v

    for key, (lo, hi, mode) in _FLOAT_KEYS.items():
        if key not in raw:
            continue
        try:
            v = float(raw[key])
        except ValueError:
            problems.append(f"{key}: not a number: {raw[key]!r}")
            continue
        ok = (v > lo if mode == "open_low" else v >= lo) and v <= hi
        if not ok:
            left = "(" if mode == "open_low" else "["
            problems.append(f"{key}: {v} outside {left}{lo}, {hi}]")
        else:
            fields[key] = v

    # cross-field constraints (only meaningful once the pieces parsed)
    if not problems:
        cfg = RunConfig(**fields)
        target = TargetManifold.from_name(cfg.target)
        if cfg.init == "covering" and target.kind != "flat-torus":
            problems.append("init: the covering generator requires target = flat-torus")
        if cfg.init == "lonlat" and (target.kind != "sphere" or target.ambient_dim < 3):
            problems.append("init: the lonlat generator requires target = sphere:K with K >= 3")
        if cfg.dt_policy == "fixed" and cfg.dt_fixed is None:
            problems.append("dt_policy: 'fixed' requires dt_fixed")
        if problems:
            raise ConfigError(problems)
        return cfg
    raise ConfigError(problems)


def config_to_text(cfg: RunConfig) -> str:
    """Serialize back to the flat format (used when embedding in checkpoints)."""
    lines = [
        f"target = {cfg.target}",
        f"grid = {cfg.grid_h}x{cfg.grid_w}",
        f"init = {cfg.init}",
        f"degree_p = {cfg.degree_p}",
        f"degree_q = {cfg.degree_q}",
        f"lat_amplitude = {cfg.lat_amplitude!r}",
        f"perturb_amplitude = {cfg.perturb_amplitude!r}",
        f"seed = {cfg.seed}",
        f"a0 = {cfg.a0!r}",
        f"b0 = {cfg.b0!r}",
        f"eta2 = {cfg.eta2!r}",
        f"dt_policy = {cfg.dt_policy}",
        f"cfl_fraction = {cfg.cfl_fraction!r}",
        f"t_max = {cfg.t_max!r}",
        f"tol_converge = {cfg.tol_converge!r}",
        f"cadence = {cfg.cadence}",
        f"checkpoint_cadence = {cfg.checkpoint_cadence}",
    ]
    if cfg.dt_fixed is not None:
        lines.append(f"dt_fixed = {cfg.dt_fixed!r}")
    if cfg.out is not None:
        lines.append(f"out = {cfg.out}")
    return "\n".join(lines) + "\n"

"""TOML run configuration: parsing, validation and construction of inputs."""

from __future__ import annotations

import hashlib
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..effective import derive_scales
from ..errors import ConfigError, InconsistentFrequenciesError
from ..params import BONDS, CavityMode, FockCutoff, SystemParams, solve_frequencies

WORKFLOWS = ("effective", "audit", "validate-bond", "validate-atom", "kitaev-ed", "phase-scan", "feasibility")

ALLOWED = {
    "atom": {"omega_ea", "omega_ba"},
    "drive": {"mode", "nu1", "nu2", "Omega_a1", "Omega_a2", "Omega_b1", "Omega_b2"},
    "cavity": {"mode", "nu", "delta", "g_a", "g_b", "t"},
    "lattice": {"L1", "L2", "boundary"},
    "numerics": {"n_max", "ed_limit", "equality_rtol", "ratio_threshold", "momentum_grid",
                 "gap_rtol", "ed_gap_rtol", "n_eigs", "coupling_mode"},
    "decay": {"gamma", "kappa"},
    "effective": {"with_field"},
    "audit": {"table", "bonds"},
    "validate_bond": {"bonds", "scale_ratios", "omega_ea", "omega_ba", "detuning", "g"},
    "validate_atom": {"ratios", "Delta", "omega_ea", "omega_ba", "mode", "compensate_light_shift", "n_times"},
    "kitaev": {"source", "J_x", "J_y", "J_z", "B", "with_field"},
    "phase_scan": {"method", "J_x", "J_y", "J_z", "B"},
    "feasibility": {"preset", "Omega", "g", "Delta", "delta", "t", "gamma", "kappa"},
}

DEFAULT_NUMERICS = {
    "n_max": 2,
    "ed_limit": 16,
    "equality_rtol": 1e-9,
    "ratio_threshold": 10.0,
    "momentum_grid": 64,
    "gap_rtol": 1e-8,
    "ed_gap_rtol": 1e-2,
    "n_eigs": 8,
    "coupling_mode": "auto",
}


@dataclass(frozen=True)
class RunConfig:
    path: str
    input_hash: str
    sections: dict[str, Any]
    numerics: dict[str, Any]
    params: SystemParams | None = None
    params_error: str | None = None
    blocks: dict[str, dict] = field(default_factory=dict)

    @property
    def cutoff(self) -> FockCutoff:
        return FockCutoff(int(self.numerics["n_max"]))

    def block(self, name: str) -> dict:
        return self.blocks.get(name, {})

    def require_params(self) -> SystemParams:
        if self.params is None:
            raise ConfigError(self.params_error or "[atom], [drive] and [cavity.x/y/z] sections are required")
        return self.params


def real(section: dict, key: str, where: str, default: Any = None, required: bool = False) -> float | None:
    """Fetch a finite real number; bools and strings are rejected."""
    if key not in section:
        if required:
            raise ConfigError("missing required key", f"[{where}].{key}")
        return default
    v = section[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"expected a number, got {v!r}", f"[{where}].{key}")
    v = float(v)
    if not math.isfinite(v):
        raise ConfigError("value must be finite", f"[{where}].{key}")
    return v


def integer(section: dict, key: str, where: str, default: int | None = None, minimum: int | None = None) -> int | None:
    if key not in section:
        return default
    v = section[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"expected an integer, got {v!r}", f"[{where}].{key}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"must be >= {minimum}", f"[{where}].{key}")
    return v


def choice(section: dict, key: str, where: str, options, default):
    v = section.get(key, default)
    if v not in options:
        raise ConfigError(f"must be one of {list(options)}, got {v!r}", f"[{where}].{key}")
    return v


def _check_keys(data: dict, strict: bool):
    if not strict:
        return
    for name, body in data.items():
        if name == "cavity":
            if not isinstance(body, dict):
                raise ConfigError("must be a table of [cavity.x], [cavity.y], [cavity.z]", "[cavity]")
            for k, sub in body.items():
                if k not in BONDS:
                    raise ConfigError("unknown cavity mode", f"[cavity.{k}]")
                if not isinstance(sub, dict):
                    raise ConfigError("must be a table", f"[cavity.{k}]")
                for key in sub:
                    if key not in ALLOWED["cavity"]:
                        raise ConfigError("unknown key", f"[cavity.{k}].{key}")
            continue
        if name not in ALLOWED:
            raise ConfigError("unknown section", f"[{name}]")
        if not isinstance(body, dict):
            raise ConfigError("must be a table", f"[{name}]")
        for key in body:
            if key not in ALLOWED[name]:
                raise ConfigError("unknown key", f"[{name}].{key}")


def _numerics(data: dict) -> dict:
    sec = data.get("numerics", {})
    out = dict(DEFAULT_NUMERICS)
    out["n_max"] = integer(sec, "n_max", "numerics", out["n_max"], minimum=0)
    out["ed_limit"] = integer(sec, "ed_limit", "numerics", out["ed_limit"], minimum=1)
    out["momentum_grid"] = integer(sec, "momentum_grid", "numerics", out["momentum_grid"], minimum=64)
    out["n_eigs"] = integer(sec, "n_eigs", "numerics", out["n_eigs"], minimum=1)
    for key in ("equality_rtol", "ratio_threshold", "gap_rtol", "ed_gap_rtol"):
        v = real(sec, key, "numerics", out[key])
        if v <= 0:
            raise ConfigError("must be positive", f"[numerics].{key}")
        out[key] = v
    out["coupling_mode"] = choice(sec, "coupling_mode", "numerics", ("auto", "simple", "general"), "auto")
    return out


def _build_params(data: dict) -> SystemParams:
    atom = data.get("atom")
    if atom is None:
        raise ConfigError("missing section", "[atom]")
    omega_ea = real(atom, "omega_ea", "atom", required=True)
    omega_ba = real(atom, "omega_ba", "atom", required=True)
    if omega_ba <= 0:
        raise ConfigError(f"must be positive, got {omega_ba}", "[atom].omega_ba")

    drive = data.get("drive")
    if drive is None:
        raise ConfigError("missing section", "[drive]")
    dmode = choice(drive, "mode", "drive", ("solve", "raw"), "solve")
    nu2 = real(drive, "nu2", "drive", required=True)
    if dmode == "raw":
        nu1 = real(drive, "nu1", "drive", required=True)
    else:
        if "nu1" in drive:
            raise ConfigError("nu1 is derived in solve mode; set mode = \"raw\" to supply it", "[drive].nu1")
        nu1 = solve_frequencies(omega_ba, nu2)["nu1"]
    Omega = {k: real(drive, f"Omega_{k}", "drive", 0.0) for k in ("a1", "a2", "b1", "b2")}

    cav = data.get("cavity", {})
    modes = {}
    for k in BONDS:
        where = f"cavity.{k}"
        sec = cav.get(k)
        if sec is None:
            raise ConfigError("missing section", f"[{where}]")
        cmode = choice(sec, "mode", where, ("solve", "raw"), "solve")
        if cmode == "raw":
            if "delta" in sec:
                raise ConfigError("delta is only used in solve mode", f"[{where}].delta")
            nu = real(sec, "nu", where, required=True)
        else:
            if "nu" in sec:
                raise ConfigError("nu is derived in solve mode; set mode = \"raw\" to supply it", f"[{where}].nu")
            delta = real(sec, "delta", where, 0.0)
            nu = solve_frequencies(omega_ba, nu2, {k: delta})[f"nu_{k}"]
        modes[k] = CavityMode(
            nu=nu,
            g_a=real(sec, "g_a", where, required=True),
            g_b=real(sec, "g_b", where, required=True),
            t=real(sec, "t", where, 0.0),
        )
    return SystemParams(omega_ea, omega_ba, nu1, nu2, Omega["a1"], Omega["a2"], Omega["b1"], Omega["b2"], modes)


def parse_config(path: str | Path, workflow: str | None = None, strict: bool = True) -> RunConfig:
    """Read and validate a TOML run configuration.

    Physical parameters are built when ``[atom]`` is present; workflows that
    need them call :meth:`RunConfig.require_params`.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from exc
    try:
        data = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"unparseable config: {exc}", str(path)) from exc
    _check_keys(data, strict)
    numerics = _numerics(data)

    params, params_error = None, None
    if "atom" in data or "drive" in data or "cavity" in data:
        params = _build_params(data)
        try:
            derive_scales(params, rtol=numerics["equality_rtol"])
        except InconsistentFrequenciesError as exc:
            raise InconsistentFrequenciesError(f"[drive]/[cavity]: {exc}") from exc
    else:
        params_error = "[atom], [drive] and [cavity.x/y/z] sections are required for this workflow"

    blocks = {name: data.get(name, {}) for name in ALLOWED if name not in ("atom", "drive", "cavity", "numerics")}
    cfg = RunConfig(
        path=str(path),
        input_hash=hashlib.sha256(raw).hexdigest(),
        sections=data,
        numerics=numerics,
        params=params,
        params_error=params_error,
        blocks=blocks,
    )
    if workflow is not None:
        _require_for(cfg, workflow)
    return cfg


def _require_for(cfg: RunConfig, workflow: str):
    if workflow not in WORKFLOWS:
        raise ConfigError(f"unknown workflow {workflow!r}; choose from {list(WORKFLOWS)}")
    needs_params = {"effective", "audit"}
    if workflow in needs_params:
        cfg.require_params()
    if workflow == "validate-bond" and "scale_ratios" not in cfg.block("validate_bond"):
        cfg.require_params()
    if workflow == "validate-atom" and "ratios" not in cfg.block("validate_atom"):
        cfg.require_params()
    if workflow == "kitaev-ed" and "lattice" not in cfg.sections:
        raise ConfigError("missing section", "[lattice]")
    if workflow == "phase-scan" and "phase_scan" not in cfg.sections:
        raise ConfigError("missing section", "[phase_scan]")

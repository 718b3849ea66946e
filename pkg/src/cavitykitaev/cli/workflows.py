"""Named workflows: each turns a :class:`RunConfig` into a :class:`RunReport`."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

from .. import effective as eff
from .. import feasibility as fz
from .. import kitaev as kt
from .. import microscopic as mic
from .. import qops
from ..errors import ConditionError, ConfigError, UnsupportedError
from ..params import BONDS
from .config import RunConfig, choice, integer, real
from .emit import RunReport


def _pmap(fn: Callable, items: list, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _bonds(block: dict, where: str, default) -> list[str]:
    bonds = block.get("bonds", list(default))
    if not isinstance(bonds, list) or any(b not in BONDS for b in bonds):
        raise ConfigError(f"must be a list drawn from {list(BONDS)}", f"[{where}].bonds")
    return bonds


def _positive_list(block: dict, key: str, where: str) -> list[float]:
    vals = block.get(key)
    if not isinstance(vals, list) or not vals:
        raise ConfigError("must be a non-empty list of numbers", f"[{where}].{key}")
    out = [real({key: v}, key, where) for v in vals]
    if any(v <= 0 for v in out):
        raise ConfigError("entries must be positive", f"[{where}].{key}")
    return out


def _grid(block: dict, key: str, where: str, default: float) -> list[float]:
    """A number, a list of numbers, or ``{start, stop, num}``."""
    if key not in block:
        return [default]
    v = block[key]
    if isinstance(v, dict):
        for k in v:
            if k not in ("start", "stop", "num"):
                raise ConfigError("unknown key", f"[{where}].{key}.{k}")
        start = real(v, "start", f"{where}.{key}", required=True)
        stop = real(v, "stop", f"{where}.{key}", required=True)
        num = integer(v, "num", f"{where}.{key}", 0, minimum=0)
        return [float(x) for x in np.linspace(start, stop, num)]
    if isinstance(v, list):
        return [real({key: x}, key, where) for x in v]
    return [real(block, key, where)]


def _table_for(scales: eff.DerivedScales, requested) -> int:
    if requested == "auto":
        return 1 if scales.is_simple else 2
    return int(requested)


# -- workflows ---------------------------------------------------------------


def run_effective(cfg: RunConfig, threads: int) -> RunReport:
    p = cfg.require_params()
    num = cfg.numerics
    scales = eff.derive_scales(p, rtol=num["equality_rtol"])
    couplings = eff.effective_couplings(scales, p, mode=num["coupling_mode"])
    table = 1 if couplings.mode == "simple" else 2
    report = eff.check_conditions(p, scales, table=table, tol=num["equality_rtol"],
                                  ratio_threshold=num["ratio_threshold"])
    with_field = bool(cfg.block("effective").get("with_field", False))
    results = {
        "params": p.to_dict(),
        "scales": scales.to_dict(),
        "couplings": couplings.to_dict(),
        "table": table,
        "verdict": report.verdict,
    }
    try:
        results["kitaev"] = eff.kitaev_couplings(couplings, scales, p, with_field=with_field, report=report).to_dict()
    except ConditionError as exc:
        results["kitaev"] = None
        results["kitaev_unavailable"] = str(exc)
    return RunReport("effective", cfg.input_hash, results, conditions=[e.to_dict() for e in report.entries])


def run_audit(cfg: RunConfig, threads: int) -> RunReport:
    p = cfg.require_params()
    num = cfg.numerics
    block = cfg.block("audit")
    scales = eff.derive_scales(p, rtol=num["equality_rtol"])
    table = _table_for(scales, choice(block, "table", "audit", ("auto", 1, 2), "auto"))
    bonds = _bonds(block, "audit", BONDS)
    report = eff.check_conditions(p, scales, table=table, bond_set=bonds, tol=num["equality_rtol"],
                                  ratio_threshold=num["ratio_threshold"])
    rows = [e.to_dict() for e in report.entries]
    return RunReport(
        "audit", cfg.input_hash,
        {"table": table, "bonds": bonds, "verdict": report.verdict},
        conditions=rows,
        table=rows,
        columns=["name", "kind", "satisfied", "residual", "value", "threshold"],
    )


def run_validate_bond(cfg: RunConfig, threads: int) -> RunReport:
    block = cfg.block("validate_bond")
    n_max = cfg.numerics["n_max"]
    if n_max < 1:
        raise ConfigError("bond validation needs n_max >= 1", "[numerics].n_max")
    bonds = _bonds(block, "validate_bond", ("z", "x"))
    if "scale_ratios" in block:
        ratios = _positive_list(block, "scale_ratios", "validate_bond")
        geometry = {k: real(block, k, "validate_bond") for k in ("omega_ea", "omega_ba", "detuning", "g")}
        geometry = {k: v for k, v in geometry.items() if v is not None}
        jobs = [(b, mic.table_bond_params(b, r, **geometry)) for b in bonds for r in ratios]
    else:
        p = cfg.require_params()
        jobs = [(b, p) for b in bonds]
    rows = _pmap(lambda job: mic.validate_bond(job[1], job[0], n_max=n_max).to_dict(), jobs, threads)
    columns = ["bond", "scale_ratio", "J_analytic", "J_extracted", "relative_error", "B_extracted",
               "fit_residual", "gap_ratio", "n_max", "J_extracted_next", "cutoff_change"]
    return RunReport("validate-bond", cfg.input_hash, {"rows": rows}, table=rows, columns=columns)


def run_validate_atom(cfg: RunConfig, threads: int) -> RunReport:
    block = cfg.block("validate_atom")
    cutoff = cfg.cutoff
    mode = choice(block, "mode", "validate_atom", ("x", "y"), "x")
    compensate = block.get("compensate_light_shift", True)
    if not isinstance(compensate, bool):
        raise ConfigError("expected true or false", "[validate_atom].compensate_light_shift")
    n_times = integer(block, "n_times", "validate_atom", 4001, minimum=16)
    if "ratios" in block:
        ratios = _positive_list(block, "ratios", "validate_atom")
        geometry = {k: real(block, k, "validate_atom") for k in ("Delta", "omega_ba", "omega_ea")}
        geometry = {k: v for k, v in geometry.items() if v is not None}
        jobs = [(r, mic.raman_site_params(r, mode=mode, **geometry)) for r in ratios]
    else:
        jobs = [(None, cfg.require_params())]

    def one(job):
        ratio, p = job
        row = mic.simulate_raman_site(p, cutoff, mode=mode, compensate_light_shift=compensate,
                                      n_times=n_times).to_dict()
        row["ratio"] = ratio
        return row

    rows = _pmap(one, jobs, threads)
    columns = ["ratio", "fitted_frequency", "raman_frequency", "generalized_rabi", "relative_error",
               "mean_excited_population", "occupancy_estimate", "excited_ratio", "max_transfer",
               "light_shift_compensated", "cavity_frequency"]
    return RunReport("validate-atom", cfg.input_hash, {"rows": rows}, table=rows, columns=columns)


def _lattice(cfg: RunConfig) -> kt.HoneycombLattice:
    sec = cfg.sections.get("lattice", {})
    L1 = integer(sec, "L1", "lattice", 2, minimum=1)
    L2 = integer(sec, "L2", "lattice", 2, minimum=1)
    boundary = choice(sec, "boundary", "lattice", ("periodic", "open"), "periodic")
    return kt.build_lattice(L1, L2, boundary, ed_limit=cfg.numerics["ed_limit"])


def _kitaev_couplings(cfg: RunConfig) -> kt.KitaevCouplings:
    block = cfg.block("kitaev")
    source = choice(block, "source", "kitaev", ("couplings", "params"), "couplings")
    if source == "params":
        p = cfg.require_params()
        scales = eff.derive_scales(p, rtol=cfg.numerics["equality_rtol"])
        couplings = eff.effective_couplings(scales, p, mode=cfg.numerics["coupling_mode"])
        with_field = block.get("with_field", False)
        if not isinstance(with_field, bool):
            raise ConfigError("expected true or false", "[kitaev].with_field")
        return eff.kitaev_couplings(couplings, scales, p, with_field=with_field)
    vals = {k: real(block, k, "kitaev", 0.0) for k in ("J_x", "J_y", "J_z", "B")}
    return kt.KitaevCouplings(**vals)


def run_kitaev_ed(cfg: RunConfig, threads: int) -> RunReport:
    lattice = _lattice(cfg)
    couplings = _kitaev_couplings(cfg)
    H = kt.build_kitaev_hamiltonian(kt.KitaevHamiltonianSpec(couplings, lattice), ed_limit=cfg.numerics["ed_limit"])
    info = kt.ed_ground_and_gap(H, k=cfg.numerics["n_eigs"])
    results = {
        "couplings": couplings.to_dict(),
        "n_sites": lattice.n_sites,
        "n_bonds": len(lattice.bonds),
        "E0": info.E0,
        "E0_per_site": info.E0 / lattice.n_sites,
        "gap": info.gap,
        "ground_degeneracy": info.degeneracy,
        "classification": kt.classify_ed_gap(info.gap, couplings, cfg.numerics["ed_gap_rtol"]),
        "eigenvalues": info.eigenvalues,
    }
    rows = [{"index": i, "eigenvalue": e} for i, e in enumerate(info.eigenvalues)]
    if lattice.boundary == "periodic" and lattice.plaquettes:
        W = kt.plaquette_operators(lattice)
        res = qops.eig_low(H, info.degeneracy)
        ground = res.eigenvectors
        comm = [qops.commutator(H, w).norm() for w in W]
        expect = [float(np.real(np.trace(ground.conj().T @ (w.matrix @ ground)))) / info.degeneracy for w in W]
        results["plaquette_commutator_norms"] = comm
        results["plaquette_ground_expectations"] = expect
    return RunReport("kitaev-ed", cfg.input_hash, results, table=rows, columns=["index", "eigenvalue"])


def run_phase_scan(cfg: RunConfig, threads: int) -> RunReport:
    block = cfg.block("phase_scan")
    method = choice(block, "method", "phase_scan", ("oracle", "ed"), "oracle")
    axes = [_grid(block, k, "phase_scan", d) for k, d in (("J_x", 1.0), ("J_y", 1.0), ("J_z", 1.0), ("B", 0.0))]
    points = list(itertools.product(*axes))
    num = cfg.numerics
    if method == "oracle":
        if any(B != 0.0 for *_, B in points):
            raise UnsupportedError("the free-fermion oracle has no field term; use method = \"ed\" for B != 0")

        def one(pt):
            jx, jy, jz, _ = pt
            return kt.freefermion_gap(jx, jy, jz, grid=num["momentum_grid"], gap_rtol=num["gap_rtol"]).to_dict()
    else:
        lattice = _lattice(cfg)

        def one(pt):
            jx, jy, jz, B = pt
            c = kt.KitaevCouplings(jx, jy, jz, B=B)
            H = kt.build_kitaev_hamiltonian(kt.KitaevHamiltonianSpec(c, lattice), ed_limit=num["ed_limit"])
            info = kt.ed_ground_and_gap(H, k=num["n_eigs"])
            return {"J_x": jx, "J_y": jy, "J_z": jz, "B": B, "gap": info.gap,
                    "classification": kt.classify_ed_gap(info.gap, c, num["ed_gap_rtol"]),
                    "tolerance": num["ed_gap_rtol"]}

    rows = _pmap(one, points, threads)
    flips = sum(1 for a, b in zip(rows, rows[1:]) if a["classification"] != b["classification"])
    return RunReport(
        "phase-scan", cfg.input_hash,
        {"method": method, "n_points": len(rows), "classification_changes": flips, "rows": rows},
        table=rows,
        columns=["J_x", "J_y", "J_z", "B", "gap", "classification"],
    )


def run_feasibility(cfg: RunConfig, threads: int) -> RunReport:
    block = cfg.block("feasibility")
    presets = fz.cooperativity_scenarios()
    if "preset" in block:
        name = choice(block, "preset", "feasibility", tuple(sorted(presets)), None)
        inp = presets[name]
    elif any(k in block for k in ("Omega", "g", "Delta", "delta", "t")):
        vals = {k: real(block, k, "feasibility", required=True)
                for k in ("Omega", "g", "Delta", "delta", "t", "gamma", "kappa")}
        inp = fz.FeasibilityInput(**vals)
    else:
        decay = cfg.sections.get("decay")
        if decay is None:
            raise ConfigError("missing section (needed with parameters from [atom]/[drive]/[cavity])", "[decay]")
        inp = fz.from_params(cfg.require_params(), real(decay, "gamma", "decay", required=True),
                             real(decay, "kappa", "decay", required=True))
    rep = fz.estimate(inp)
    regime = fz.check_regime(rep, inp, ratio_threshold=cfg.numerics["ratio_threshold"])
    results = {
        "input": inp.to_dict(),
        "report": rep.to_dict(),
        "sufficient_ratios": fz.sufficient_ratios(inp),
        "verdict": regime.verdict,
    }
    return RunReport("feasibility", cfg.input_hash, results, conditions=[e.to_dict() for e in regime.entries])


WORKFLOW_RUNNERS = {
    "effective": run_effective,
    "audit": run_audit,
    "validate-bond": run_validate_bond,
    "validate-atom": run_validate_atom,
    "kitaev-ed": run_kitaev_ed,
    "phase-scan": run_phase_scan,
    "feasibility": run_feasibility,
}


def run(workflow: str, cfg: RunConfig, threads: int = 1) -> RunReport:
    return WORKFLOW_RUNNERS[workflow](cfg, threads)

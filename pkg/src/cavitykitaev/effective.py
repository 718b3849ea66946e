"""Closed-form effective spin couplings of the cavity lattice.

After both adiabatic eliminations the pseudo-spins (``|a>`` = down,
``|b>`` = up) interact through virtual photon exchange.  This module holds
the second-order scales, the coupling coefficients of the resulting spin
Hamiltonian, the parameter conditions that reduce it to the Kitaev model,
and a solver that produces parameter sets meeting those conditions.
"""

from __future__ import annotations

import math
import sys
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping

from . import qops
from .errors import ConditionError, InconsistentFrequenciesError, SingularityError
from .kitaev import HoneycombLattice, KitaevCouplings, bond_operator
from .params import BONDS, S_BONDS, SystemParams, make_params, solve_frequencies

EPS = sys.float_info.epsilon
EQUALITY_RTOL = 1e-9
RATIO_THRESHOLD = 10.0


@dataclass(frozen=True)
class DerivedScales:
    eta_a1: float
    eta_a2: float
    eta_b1: float
    eta_b2: float
    delta_a: Mapping[str, float]  # cavity detunings, rebuilt so both detuning differences agree exactly
    delta_b: Mapping[str, float]
    lambda_a: Mapping[str, float]
    lambda_b: Mapping[str, float]
    lam: Mapping[str, float]  # common photon-conditioned shift per mode
    A: Mapping[str, float]  # keys x1 x2 y1 y2 z1 z2
    gamma: Mapping[str, float]
    delta: Mapping[str, float]  # detuning differences delta_k
    epsilon: Mapping[str, float]
    kappa_a: Mapping[str, float]
    kappa_b: Mapping[str, float]

    @property
    def is_simple(self) -> bool:
        return all(self.delta[k] == 0.0 for k in BONDS)

    def to_dict(self) -> dict:
        out = {
            "eta_a1": self.eta_a1,
            "eta_a2": self.eta_a2,
            "eta_b1": self.eta_b1,
            "eta_b2": self.eta_b2,
        }
        for name in ("delta_a", "delta_b", "lambda_a", "lambda_b", "lam", "gamma", "delta",
                     "epsilon", "kappa_a", "kappa_b"):
            for k, v in getattr(self, name).items():
                out[f"{name}_{k}"] = v
        for k, v in self.A.items():
            out[f"A_{k}"] = v
        return out


def _nonzero(name, value):
    if value == 0.0:
        raise SingularityError(f"{name} vanishes")
    return value


def derive_scales(params: SystemParams, rtol: float = EQUALITY_RTOL) -> DerivedScales:
    """Second-order scales (Stark shifts, photon shifts, Raman/Rayleigh amplitudes).

    The detuning differences ``delta_k`` are defined twice over; both forms
    must agree to ``rtol`` or :class:`InconsistentFrequenciesError` is raised.
    Differences at the rounding level of the input frequencies are set to 0.
    """
    D = params.laser_detunings()
    for name, v in D.items():
        _nonzero(name, v)
    raw_a = {k: _nonzero(f"delta_a^{k}", params.delta_a(k)) for k in BONDS}
    raw_b = {k: _nonzero(f"delta_b^{k}", params.delta_b(k)) for k in BONDS}

    freq_scale = max(abs(params.omega_ea), abs(params.nu1), abs(params.nu2),
                     *(abs(params.cavity[k].nu) for k in BONDS))
    rounding = 64 * EPS * freq_scale

    # delta_s = delta_a^s - Delta_b2 = delta_b^s - Delta_a1 ; delta_z = delta_a^z - Delta_a2 = delta_b^z - Delta_b2
    partner = {"x": ("Delta_b2", "Delta_a1"), "y": ("Delta_b2", "Delta_a1"), "z": ("Delta_a2", "Delta_b2")}
    delta, delta_a, delta_b = {}, {}, {}
    for k in BONDS:
        la_, lb_ = partner[k]
        d1 = raw_a[k] - D[la_]
        d2 = raw_b[k] - D[lb_]
        scale = max(abs(raw_a[k]), abs(raw_b[k]), abs(D[la_]), abs(D[lb_]))
        if abs(d1 - d2) > rtol * scale + rounding:
            raise InconsistentFrequenciesError(
                f"detuning differences for the {k} mode disagree: "
                f"delta_a^{k} - {la_} = {d1:.12g} but delta_b^{k} - {lb_} = {d2:.12g}"
            )
        d = 0.5 * (d1 + d2)
        if abs(d) <= rounding:
            d = 0.0
        delta[k] = d
        delta_a[k] = D[la_] + d
        delta_b[k] = D[lb_] + d

    eta = {b: params_Omega(params, b) ** 2 / (4.0 * D[f"Delta_{b}"]) for b in ("a1", "a2", "b1", "b2")}
    lambda_a = {k: params.g_a(k) ** 2 / delta_a[k] for k in BONDS}
    lambda_b = {k: params.g_b(k) ** 2 / delta_b[k] for k in BONDS}
    lam = {k: 0.5 * (lambda_a[k] + lambda_b[k]) for k in BONDS}
    A = {}
    for s in S_BONDS:
        A[f"{s}1"] = params.g_b(s) * params.Omega_a1 / (2.0 * delta_b[s])
        A[f"{s}2"] = params.g_a(s) * params.Omega_b2 / (2.0 * delta_a[s])
    A["z1"] = params.g_a("z") * params.Omega_a2 / (2.0 * delta_a["z"])
    A["z2"] = params.g_b("z") * params.Omega_b2 / (2.0 * delta_b["z"])

    gamma = {k: delta_a[k] / delta_b[k] for k in BONDS}
    epsilon = {}
    for k in BONDS:
        if delta[k] == 0.0:
            epsilon[k] = 1.0
        elif lam[k] == 0.0:
            epsilon[k] = 0.0
        else:
            denom = 1.0 + delta[k] / lam[k]
            epsilon[k] = 1.0 / _nonzero(f"1 + delta_{k}/lambda_{k}", denom)
    kappa_a = {k: 1.0 + delta[k] / (2.0 * delta_a[k]) for k in BONDS}
    kappa_b = {k: 1.0 + delta[k] / (2.0 * delta_b[k]) for k in BONDS}

    return DerivedScales(
        eta_a1=eta["a1"], eta_a2=eta["a2"], eta_b1=eta["b1"], eta_b2=eta["b2"],
        delta_a=delta_a, delta_b=delta_b,
        lambda_a=lambda_a, lambda_b=lambda_b, lam=lam, A=A, gamma=gamma,
        delta=delta, epsilon=epsilon, kappa_a=kappa_a, kappa_b=kappa_b,
    )


def params_Omega(params: SystemParams, which: str) -> float:
    return getattr(params, f"Omega_{which}")


def dressed_amplitudes(scales: DerivedScales) -> dict[str, float]:
    """Raman/Rayleigh amplitudes including the detuning-offset factors kappa.

    Equal to ``scales.A`` when every ``delta_k`` is zero.
    """
    out = {}
    for s in S_BONDS:
        out[f"{s}1"] = scales.kappa_b[s] * scales.A[f"{s}1"]
        out[f"{s}2"] = scales.kappa_a[s] * scales.A[f"{s}2"]
    out["z1"] = scales.kappa_a["z"] * scales.A["z1"]
    out["z2"] = scales.kappa_b["z"] * scales.A["z2"]
    return out


# -- effective couplings -----------------------------------------------------


@dataclass(frozen=True)
class EffectiveCouplings:
    B_x: float
    B_y: float
    B_z: float
    J_x1: float
    J_x2: float
    J_y1: float
    J_y2: float
    J_z1: float
    J_z2: float
    J_z3: float
    mode: str  # "simple" | "general"

    def J(self, name: str) -> float:
        return getattr(self, f"J_{name}")

    @property
    def field(self) -> float:
        """Total single-site sigma^z coefficient of the effective Hamiltonian."""
        return self.B_x + self.B_y + self.B_z + 0.25 * (-self.J_z1 + self.J_z2)

    def bond_terms(self, bond: str) -> dict[str, float]:
        """Pauli-pair coefficients ``{"xx": .., "yy": .., "zz": ..}`` on one link."""
        if bond in S_BONDS:
            j1, j2 = self.J(f"{bond}1"), self.J(f"{bond}2")
            return {"xx": 0.5 * (j1 + j2), "yy": 0.5 * (j1 - j2), "zz": 0.0}
        return {"xx": 0.0, "yy": 0.0, "zz": 0.25 * (self.J_z1 + self.J_z2 - 2.0 * self.J_z3)}

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "B_x": self.B_x, "B_y": self.B_y, "B_z": self.B_z,
            "J_x1": self.J_x1, "J_x2": self.J_x2,
            "J_y1": self.J_y1, "J_y2": self.J_y2,
            "J_z1": self.J_z1, "J_z2": self.J_z2, "J_z3": self.J_z3,
            "field": self.field,
        }


def _ratio(num, g, name):
    if g == 0.0:
        if num == 0.0:
            return 0.0
        raise SingularityError(f"coupling {name} vanishes in a denominator")
    return num / g


def _checked_product(ga, gb, name):
    if ga == 0.0 or gb == 0.0:
        raise SingularityError(f"coupling {name} vanishes in a denominator")
    return ga * gb


def _simple_couplings(scales: DerivedScales, p: SystemParams) -> EffectiveCouplings:
    J = {}
    for s in S_BONDS:
        ga, gb, t = p.g_a(s), p.g_b(s), p.t(s)
        J[f"{s}1"] = (t / 4.0) * (_ratio(p.Omega_a1, gb, f"g_b^{s}") ** 2
                                  + _ratio(p.Omega_b2, ga, f"g_a^{s}") ** 2)
        if p.Omega_a1 * p.Omega_b2 == 0.0:
            J[f"{s}2"] = 0.0
        else:
            J[f"{s}2"] = (t / 2.0) * (p.Omega_a1 * p.Omega_b2 / _checked_product(ga, gb, s))
    ga, gb, t = p.g_a("z"), p.g_b("z"), p.t("z")
    J["z1"] = (t / 2.0) * _ratio(p.Omega_a2, ga, "g_a^z") ** 2
    J["z2"] = (t / 2.0) * _ratio(p.Omega_b2, gb, "g_b^z") ** 2
    if p.Omega_a2 * p.Omega_b2 == 0.0:
        J["z3"] = 0.0
    else:
        J["z3"] = (t / 2.0) * (p.Omega_a2 * p.Omega_b2 / _checked_product(ga, gb, "z"))
    B_s = 0.5 * (scales.eta_b2 - scales.eta_a1)
    B_z = 0.5 * (scales.eta_b2 - scales.eta_a2)
    return EffectiveCouplings(
        B_x=B_s, B_y=B_s, B_z=B_z,
        J_x1=J["x1"], J_x2=J["x2"], J_y1=J["y1"], J_y2=J["y2"],
        J_z1=J["z1"], J_z2=J["z2"], J_z3=J["z3"], mode="simple",
    )


def _general_couplings(scales: DerivedScales, p: SystemParams) -> EffectiveCouplings:
    eps, ka, kb = scales.epsilon, scales.kappa_a, scales.kappa_b
    da, db = scales.delta_a, scales.delta_b
    J, B = {}, {}
    for s in S_BONDS:
        ga, gb, t = p.g_a(s), p.g_b(s), p.t(s)
        J[f"{s}1"] = (t / 4.0) * (_ratio(eps[s] * kb[s] * p.Omega_a1, gb, f"g_b^{s}") ** 2
                                  + _ratio(eps[s] * ka[s] * p.Omega_b2, ga, f"g_a^{s}") ** 2)
        if p.Omega_a1 * p.Omega_b2 == 0.0:
            J[f"{s}2"] = 0.0
        else:
            J[f"{s}2"] = (t / 2.0) * ((eps[s] ** 2 * ka[s] * kb[s]) * p.Omega_a1 * p.Omega_b2
                                      / _checked_product(ga, gb, s))
        B[s] = 0.125 * eps[s] * ((p.Omega_b2 * ka[s]) ** 2 / da[s]
                                 - (p.Omega_a1 * kb[s]) ** 2 / db[s])
    ga, gb, t = p.g_a("z"), p.g_b("z"), p.t("z")
    J["z1"] = (t / 2.0) * _ratio(eps["z"] * ka["z"] * p.Omega_a2, ga, "g_a^z") ** 2
    J["z2"] = (t / 2.0) * _ratio(eps["z"] * kb["z"] * p.Omega_b2, gb, "g_b^z") ** 2
    if p.Omega_a2 * p.Omega_b2 == 0.0:
        J["z3"] = 0.0
    else:
        J["z3"] = (t / 2.0) * ((eps["z"] ** 2 * ka["z"] * kb["z"]) * p.Omega_a2 * p.Omega_b2
                               / _checked_product(ga, gb, "z"))
    B["z"] = 0.125 * eps["z"] * ((p.Omega_b2 * kb["z"]) ** 2 / db["z"]
                                 - (p.Omega_a2 * ka["z"]) ** 2 / da["z"])
    return EffectiveCouplings(
        B_x=B["x"], B_y=B["y"], B_z=B["z"],
        J_x1=J["x1"], J_x2=J["x2"], J_y1=J["y1"], J_y2=J["y2"],
        J_z1=J["z1"], J_z2=J["z2"], J_z3=J["z3"], mode="general",
    )


def effective_couplings(scales: DerivedScales, params: SystemParams, mode: str = "auto") -> EffectiveCouplings:
    """Coefficients of the zero-photon effective spin Hamiltonian.

    ``mode="simple"`` uses the matched-detuning formulas, ``"general"`` the
    ones dressed by ``epsilon_k`` and ``kappa_k``; ``"auto"`` picks
    ``general`` as soon as any ``delta_k`` is non-zero.
    """
    if mode == "auto":
        mode = "simple" if scales.is_simple else "general"
    if mode == "simple":
        return _simple_couplings(scales, params)
    if mode == "general":
        return _general_couplings(scales, params)
    raise ValueError(f"unknown coupling mode {mode!r}")


# -- parameter conditions ----------------------------------------------------


@dataclass(frozen=True)
class ConditionEntry:
    name: str
    satisfied: bool
    residual: float
    value: float | None = None  # raw ratio for hierarchy checks
    threshold: float | None = None
    kind: str = "table"  # "table" (algebraic identity) or "regime" (>> hierarchy)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "satisfied": self.satisfied,
            "residual": self.residual,
            "value": self.value,
            "threshold": self.threshold,
        }


@dataclass(frozen=True)
class ConditionReport:
    entries: tuple[ConditionEntry, ...]
    label: str = ""

    @property
    def verdict(self) -> bool:
        return all(e.satisfied for e in self.entries)

    def verdict_for(self, kind: str) -> bool:
        return all(e.satisfied for e in self.entries if e.kind == kind)

    def failed(self) -> list[ConditionEntry]:
        return [e for e in self.entries if not e.satisfied]

    def __getitem__(self, name: str) -> ConditionEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    def to_dict(self) -> dict:
        return {"label": self.label, "verdict": self.verdict,
                "entries": [e.to_dict() for e in self.entries]}


def _rel_gap(lhs: float, rhs: float) -> float:
    scale = max(abs(lhs), abs(rhs))
    return 0.0 if scale == 0.0 else abs(lhs - rhs) / scale


def _identity_entry(name, lhs, rhs, tol):
    r = _rel_gap(lhs, rhs)
    return ConditionEntry(name, r <= tol, r, value=r, threshold=tol)


def _ratio_entry(name, big, small, threshold):
    ratio = math.inf if small == 0.0 else abs(big) / abs(small)
    ok = ratio >= threshold
    residual = 0.0 if ok else 1.0 - ratio / threshold
    return ConditionEntry(name, ok, residual, value=ratio, threshold=threshold, kind="regime")


SIGN_REQUIRED = {"x": +1, "y": -1, "z": -1}


def check_conditions(
    params: SystemParams,
    scales: DerivedScales,
    table: int = 1,
    bond_set: Iterable[str] = BONDS,
    tol: float = EQUALITY_RTOL,
    ratio_threshold: float = RATIO_THRESHOLD,
) -> ConditionReport:
    """Evaluate the parameter conditions for the Kitaev reduction.

    Table 1 is the matched-detuning case, table 2 the general case with the
    ``kappa`` factors.  Residuals are dimensionless: relative mismatch for
    identities, ``1`` for a violated sign rule, ``1 - ratio/threshold`` for a
    failed ``>>`` hierarchy.  A report is always returned.
    """
    if table not in (1, 2):
        raise ValueError("table must be 1 or 2")
    bonds = [k for k in BONDS if k in set(bond_set)]
    p, sc = params, scales
    entries = []
    general = table == 2
    ka = sc.kappa_a if general else {k: 1.0 for k in BONDS}
    kb = sc.kappa_b if general else {k: 1.0 for k in BONDS}

    for k in bonds:
        g = sc.gamma[k]
        if k in S_BONDS:
            entries.append(_identity_entry(
                f"{k}.omega_balance", g * (kb[k] * p.Omega_a1) ** 2, (ka[k] * p.Omega_b2) ** 2, tol))
        else:
            entries.append(_identity_entry(
                f"{k}.omega_balance", (ka[k] * p.Omega_a2) ** 2, g * (kb[k] * p.Omega_b2) ** 2, tol))
        prod_sign = math.copysign(1.0, p.g_a(k) * p.g_b(k)) if p.g_a(k) * p.g_b(k) != 0 else 0.0
        ok = prod_sign == SIGN_REQUIRED[k]
        entries.append(ConditionEntry(f"{k}.sign", ok, 0.0 if ok else 1.0,
                                      value=p.g_a(k) * p.g_b(k), threshold=0.0))
        entries.append(_identity_entry(f"{k}.coupling_ratio", p.g_a(k) ** 2, g * p.g_b(k) ** 2, tol))
        if table == 1:
            scale = max(abs(sc.delta_a[k]), abs(sc.delta_b[k]))
            r = abs(sc.delta[k]) / scale
            entries.append(ConditionEntry(f"{k}.matched_detuning", r <= tol, r, value=r, threshold=tol))

    D = p.laser_detunings()
    positive = [D["Delta_a1"], D["Delta_a2"], D["Delta_b2"]]
    positive += [sc.delta_a[k] for k in bonds] + [sc.delta_b[k] for k in bonds]
    wrong = sum(1 for v in positive if v <= 0) + (1 if D["Delta_b1"] >= 0 else 0)
    total = len(positive) + 1
    entries.append(ConditionEntry("red_shift", wrong == 0, wrong / total, value=float(wrong), threshold=0.0))

    couplings = [abs(p.g_a(k)) for k in bonds] + [abs(p.g_b(k)) for k in bonds]
    couplings += [abs(p.Omega_a1), abs(p.Omega_a2), abs(p.Omega_b1), abs(p.Omega_b2)]
    detunings = [abs(v) for v in D.values()]
    detunings += [abs(sc.delta_a[k]) for k in bonds] + [abs(sc.delta_b[k]) for k in bonds]
    entries.append(_ratio_entry("large_detuning", min(detunings), max(couplings), ratio_threshold))

    for k in bonds:
        gap = sc.lam[k] + sc.delta[k]
        entries.append(_ratio_entry(f"{k}.second_elimination", gap,
                                    max(_drive_scale(p, sc, k), abs(p.t(k))), ratio_threshold))

    return ConditionReport(tuple(entries), label=f"table {table}")


def _drive_scale(p: SystemParams, sc: DerivedScales, k: str) -> float:
    """Largest |g Omega| (1/delta + 1/Delta)/4 among the two processes feeding mode ``k``."""
    if k in S_BONDS:
        legs = [(p.g_b(k), p.Omega_a1, sc.delta_b[k], p.Delta_a1),
                (p.g_a(k), p.Omega_b2, sc.delta_a[k], p.Delta_b2)]
    else:
        legs = [(p.g_a(k), p.Omega_a2, sc.delta_a[k], p.Delta_a2),
                (p.g_b(k), p.Omega_b2, sc.delta_b[k], p.Delta_b2)]
    return max(abs(g * W) / 4.0 * abs(1.0 / d + 1.0 / D) for g, W, d, D in legs)


def scale_ratio(params: SystemParams, scales: DerivedScales, bond: str) -> float:
    """``(lambda_k + delta_k) / max(|A|, t_k)``: how deep the second elimination is."""
    return (scales.lam[bond] + scales.delta[bond]) / max(_drive_scale(params, scales, bond), abs(params.t(bond)))


# -- Kitaev reduction --------------------------------------------------------


def kitaev_couplings(
    couplings: EffectiveCouplings,
    scales: DerivedScales,
    params: SystemParams,
    with_field: bool = False,
    report: ConditionReport | None = None,
) -> KitaevCouplings:
    """Reduce the effective couplings to ``(J_x, J_y, J_z, B, J_zc)``.

    Without a field every table condition must hold (else
    :class:`ConditionError`).  With a field only the z-bond Omega balance may
    be violated; it is exactly that detuning of ``Omega_a2`` that generates
    ``B``.
    """
    table = 1 if couplings.mode == "simple" else 2
    if report is None:
        report = check_conditions(params, scales, table=table)
    allowed = {"z.omega_balance"} if with_field else set()
    broken = [e.name for e in report.failed() if e.kind == "table" and e.name not in allowed]
    if broken:
        raise ConditionError(f"table {table} conditions fail: {', '.join(broken)}")
    for e in report.failed():
        if e.kind == "regime":
            warnings.warn(f"regime condition {e.name} not satisfied (ratio {e.value:.3g})",
                          RuntimeWarning, stacklevel=2)

    p = params
    if couplings.mode == "simple":
        J_x = (p.t("x") / 2.0) * (p.Omega_b2 / p.g_a("x")) ** 2
        J_y = (p.t("y") / 2.0) * (p.Omega_b2 / p.g_a("y")) ** 2
        J_z = (p.t("z") / 2.0) * (p.Omega_b2 / p.g_b("z")) ** 2
    else:
        e, ka, kb = scales.epsilon, scales.kappa_a, scales.kappa_b
        J_x = (p.t("x") / 2.0) * (e["x"] * ka["x"] * p.Omega_b2 / p.g_a("x")) ** 2
        J_y = (p.t("y") / 2.0) * (e["y"] * ka["y"] * p.Omega_b2 / p.g_a("y")) ** 2
        J_z = (p.t("z") / 2.0) * (e["z"] * kb["z"] * p.Omega_b2 / p.g_b("z")) ** 2
    if not with_field:
        return KitaevCouplings(J_x=J_x, J_y=J_y, J_z=J_z, B=0.0, J_zc=J_z)
    B = couplings.B_z - (couplings.J_z1 - couplings.J_z2) / 4.0
    J_zc = (couplings.J_z1 + couplings.J_z2 - 2.0 * couplings.J_z3) / 4.0
    return KitaevCouplings(J_x=J_x, J_y=J_y, J_z=J_z, B=B, J_zc=J_zc)


def build_effective_spin_hamiltonian(couplings: EffectiveCouplings, lattice: HoneycombLattice,
                                     ed_limit: int = 16) -> qops.OperatorMatrix:
    """Assemble the zero-photon effective spin Hamiltonian on ``lattice``."""
    lattice.require_ed(ed_limit)
    space = lattice.space()
    H = qops.zero(space)
    h = couplings.field
    if h != 0.0:
        for j in range(lattice.n_sites):
            H = H + h * qops.embed(qops.SIGMA_Z, j, space)
    for i, j, bond in lattice.bonds:
        for pair, coeff in couplings.bond_terms(bond).items():
            if coeff != 0.0:
                H = H + coeff * bond_operator(i, j, pair[0], space)
    return H


# -- parameter solver --------------------------------------------------------


def table_parameters(
    omega_ea: float,
    omega_ba: float,
    nu2: float,
    g_b: Mapping[str, float],
    Omega_b2: float,
    t: Mapping[str, float],
    Omega_b1: float = 0.0,
    delta: Mapping[str, float] | None = None,
    Omega_a2_scale: float = 1.0,
) -> SystemParams:
    """Parameter set meeting the Kitaev conditions exactly.

    Frequencies follow :func:`solve_frequencies`; ``g_a``, ``Omega_a1`` and
    ``Omega_a2`` are then fixed by the table identities (table 2 when any
    ``delta`` is non-zero, which needs ``delta_x == delta_y`` because both
    s-bonds share the lasers).  ``Omega_a2_scale != 1`` detunes ``Omega_a2``
    from its table value to switch on the uniform field.
    """
    delta = {k: float((delta or {}).get(k, 0.0)) for k in BONDS}
    if delta["x"] != delta["y"]:
        raise ConditionError("delta_x must equal delta_y: the s-bond conditions share Omega_a1")
    f = solve_frequencies(omega_ba, nu2, delta)
    omega_eb = omega_ea - omega_ba
    da = {k: omega_ea - f[f"nu_{k}"] for k in BONDS}
    db = {k: omega_eb - f[f"nu_{k}"] for k in BONDS}
    gamma = {k: da[k] / db[k] for k in BONDS}
    if any(gk <= 0 for gk in gamma.values()):
        raise ConditionError("cavity detunings of |a> and |b> must share a sign (gamma_k > 0)")
    ka = {k: 1.0 + delta[k] / (2.0 * da[k]) for k in BONDS}
    kb = {k: 1.0 + delta[k] / (2.0 * db[k]) for k in BONDS}

    g_a = {}
    for k in BONDS:
        mag = math.sqrt(gamma[k]) * abs(g_b[k])
        g_a[k] = SIGN_REQUIRED[k] * math.copysign(mag, g_b[k])
    Omega_a1 = ka["x"] * Omega_b2 / (kb["x"] * math.sqrt(gamma["x"]))
    Omega_a2 = Omega_a2_scale * kb["z"] * math.sqrt(gamma["z"]) * Omega_b2 / ka["z"]
    return make_params(
        omega_ea=omega_ea,
        omega_ba=omega_ba,
        nu2=nu2,
        Omega={"a1": Omega_a1, "a2": Omega_a2, "b1": Omega_b1, "b2": Omega_b2},
        g_a=g_a,
        g_b=g_b,
        t=t,
        delta=delta,
    )

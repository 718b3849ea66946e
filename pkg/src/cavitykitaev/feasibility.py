"""Order-of-magnitude feasibility estimates for the cavity implementation.

Given the strongest drive and coupling, the smallest detunings and the two
loss rates, estimate the excited-state and photon populations, the spin
coupling scale, the resulting effective decay rates and check that the
couplings beat the losses.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .effective import ConditionEntry, ConditionReport, derive_scales
from .errors import ContractViolation, SingularityError
from .params import BONDS, SystemParams

RATIO_THRESHOLD = 10.0


@dataclass(frozen=True)
class FeasibilityInput:
    Omega: float  # strongest Rabi frequency
    g: float  # strongest atom-cavity coupling
    Delta: float  # smallest laser detuning magnitude
    delta: float  # smallest detuning difference delta_k (0 for matched detunings)
    t: float  # weakest tunnelling rate
    gamma: float  # excited-state decay rate
    kappa: float  # cavity decay rate
    label: str = ""

    def __post_init__(self):
        for name in ("Omega", "g", "Delta", "delta", "t", "gamma", "kappa"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ContractViolation(f"{name} must be finite and non-negative, got {v}")

    def to_dict(self) -> dict:
        return asdict(self)


def _quotient(num: float, den: float, what: str) -> float:
    if den == 0.0:
        if num == 0.0:
            raise SingularityError(f"{what} is 0/0")
        return math.inf
    return num / den


@dataclass(frozen=True)
class FeasibilityReport:
    occupancy: float
    n_ph: float
    J_estimate: float
    Gamma1: float
    Gamma2: float
    cooperativity: float
    mu: float
    eta: float
    occupancy_valid: bool  # estimate only meaningful while <= 1
    n_ph_valid: bool

    def to_dict(self) -> dict:
        return asdict(self)


def estimate(inp: FeasibilityInput) -> FeasibilityReport:
    """Populations, coupling scale, effective decay rates, cooperativity, ``mu`` and ``eta``."""
    if inp.Delta == 0.0:
        raise SingularityError("Delta must be non-zero")
    g, W, D, d = inp.g, inp.Omega, inp.Delta, inp.delta
    occupancy = (W / D) ** 2
    photon_amp = _quotient(g * W, d * D + g * g + W * W / 4.0, "photon amplitude")
    n_ph = photon_amp ** 2
    if W == 0.0:
        J = 0.0
    else:
        J = inp.t * _quotient(g * W, d * D + g * g, "coupling amplitude") ** 2
    return FeasibilityReport(
        occupancy=occupancy,
        n_ph=n_ph,
        J_estimate=J,
        Gamma1=occupancy * inp.gamma,
        Gamma2=n_ph * inp.kappa,
        cooperativity=_quotient(g * g, inp.kappa * inp.gamma, "cooperativity"),
        mu=_quotient(g, W, "mu"),
        eta=_quotient(d * D, g * W, "eta"),
        occupancy_valid=occupancy <= 1.0,
        n_ph_valid=n_ph <= 1.0,
    )


def _much_greater(name: str, big: float, small: float, threshold: float) -> ConditionEntry:
    if small == 0.0:
        ratio = math.inf if big > 0 else 0.0
    else:
        ratio = big / small
    ok = ratio >= threshold
    return ConditionEntry(name, ok, 0.0 if ok else 1.0 - ratio / threshold,
                          value=ratio, threshold=threshold, kind="regime")


def sufficient_ratios(inp: FeasibilityInput) -> dict[str, float]:
    """The two alternative ways of securing ``mu + eta >> 1/2``.

    ``2|delta Delta| / |g Omega|`` (large detunings) and ``2|g| / |Omega|``
    (strong coupling); either one being large is enough.
    """
    gW = inp.g * inp.Omega
    return {
        "detuning_product": math.inf if gW == 0.0 else 2 * inp.delta * inp.Delta / gW,
        "coupling_vs_drive": math.inf if inp.Omega == 0.0 else 2 * inp.g / inp.Omega,
    }


def _either_sufficient(inp: FeasibilityInput, threshold: float) -> ConditionEntry:
    ratio = max(sufficient_ratios(inp).values())
    ok = ratio >= threshold
    return ConditionEntry("detuning_or_coupling_dominates", ok, 0.0 if ok else 1.0 - ratio / threshold,
                          value=ratio, threshold=threshold, kind="regime")


def check_regime(report: FeasibilityReport, inp: FeasibilityInput,
                 ratio_threshold: float = RATIO_THRESHOLD) -> ConditionReport:
    """Each ``>>`` is read as ``ratio >= ratio_threshold``; raw ratios are kept."""
    th = ratio_threshold
    g, d, D, t = inp.g, inp.delta, inp.Delta, inp.t
    t_g_delta = math.inf if d == 0.0 else t * (g / d) ** 2
    t_D_g = math.inf if g == 0.0 else t * (D / g) ** 2
    entries = [
        _much_greater("gamma_vs_t(g/delta)^2", t_g_delta, inp.gamma, th),
        _much_greater("gamma_vs_t(Delta/g)^2", t_D_g, inp.gamma, th),
        _much_greater("kappa_vs_t", t, inp.kappa, th),
        _much_greater("mu_plus_eta", report.mu + report.eta, 0.5, th),
        _either_sufficient(inp, th),
        _much_greater("Gamma1_vs_J", report.J_estimate, report.Gamma1, th),
        _much_greater("Gamma2_vs_J", report.J_estimate, report.Gamma2, th),
    ]
    return ConditionReport(tuple(entries), label="feasibility")


def from_params(params: SystemParams, gamma: float, kappa: float, label: str = "") -> FeasibilityInput:
    """Summary scales of a full parameter set (max drive and coupling, min detunings and tunnelling)."""
    scales = derive_scales(params)
    return FeasibilityInput(
        Omega=max(abs(params.Omega_a1), abs(params.Omega_a2), abs(params.Omega_b1), abs(params.Omega_b2)),
        g=max(max(abs(params.g_a(k)), abs(params.g_b(k))) for k in BONDS),
        Delta=min(abs(v) for v in params.laser_detunings().values()),
        delta=min(abs(scales.delta[k]) for k in BONDS),
        t=min(abs(params.t(k)) for k in BONDS),
        gamma=gamma,
        kappa=kappa,
        label=label,
    )


def cooperativity_scenarios() -> dict[str, FeasibilityInput]:
    """Illustrative presets for a toroidal microcavity and a photonic band-gap cavity.

    Loss rates are set equal (``kappa = gamma``) and chosen to hit the quoted
    cooperativities; the remaining entries are representative GHz-scale values.
    """
    def preset(label, g, C):
        loss = g / math.sqrt(C)
        return FeasibilityInput(Omega=0.2, g=g, Delta=2.0, delta=2.0, t=0.05,
                                gamma=loss, kappa=loss, label=label)

    return {
        "toroidal": preset("toroidal", 0.2, 1e7),
        "photonic_band_gap": preset("photonic_band_gap", 20.0, 1e3),
    }

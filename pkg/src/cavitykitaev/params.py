"""Physical inputs of the cavity lattice.

All quantities are angular frequencies with hbar = 1 (GHz by default).
Frequencies are stored; every detuning is derived from them on access, so
there is a single source of truth.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from types import MappingProxyType
from typing import Mapping

from .errors import ContractViolation

BONDS = ("x", "y", "z")
S_BONDS = ("x", "y")


@dataclass(frozen=True)
class CavityMode:
    nu: float  # mode frequency
    g_a: float  # coupling to |a> <-> |e>
    g_b: float  # coupling to |b> <-> |e>
    t: float  # tunnelling rate between neighbouring cavities


@dataclass(frozen=True)
class SystemParams:
    omega_ea: float
    omega_ba: float
    nu1: float
    nu2: float
    Omega_a1: float
    Omega_a2: float
    Omega_b1: float
    Omega_b2: float
    cavity: Mapping[str, CavityMode]

    def __post_init__(self):
        missing = [k for k in BONDS if k not in self.cavity]
        if missing:
            raise ContractViolation(f"cavity modes missing for bonds {missing}")
        object.__setattr__(self, "cavity", MappingProxyType(dict(self.cavity)))
        if not self.omega_ba > 0:
            raise ContractViolation(f"omega_ba must be positive, got {self.omega_ba}")
        strongest = max(
            [abs(self.Omega_a1), abs(self.Omega_a2), abs(self.Omega_b1), abs(self.Omega_b2)]
            + [abs(m.g_a) for m in self.cavity.values()]
            + [abs(m.g_b) for m in self.cavity.values()]
        )
        if strongest > 0 and self.omega_ba < 10 * strongest:
            warnings.warn(
                f"omega_ba = {self.omega_ba:g} is not much larger than the strongest "
                f"coupling {strongest:g}",
                RuntimeWarning,
                stacklevel=3,
            )

    # -- derived detunings ---------------------------------------------------
    @property
    def omega_eb(self) -> float:
        return self.omega_ea - self.omega_ba

    @property
    def Delta_a1(self) -> float:
        return self.omega_ea - self.nu1

    @property
    def Delta_a2(self) -> float:
        return self.omega_ea - self.nu2

    @property
    def Delta_b1(self) -> float:
        return self.omega_eb - self.nu1

    @property
    def Delta_b2(self) -> float:
        return self.omega_eb - self.nu2

    def delta_a(self, k: str) -> float:
        return self.omega_ea - self.cavity[k].nu

    def delta_b(self, k: str) -> float:
        return self.omega_eb - self.cavity[k].nu

    def g_a(self, k: str) -> float:
        return self.cavity[k].g_a

    def g_b(self, k: str) -> float:
        return self.cavity[k].g_b

    def t(self, k: str) -> float:
        return self.cavity[k].t

    def laser_detunings(self) -> dict[str, float]:
        return {
            "Delta_a1": self.Delta_a1,
            "Delta_a2": self.Delta_a2,
            "Delta_b1": self.Delta_b1,
            "Delta_b2": self.Delta_b2,
        }

    def cavity_detunings(self) -> dict[str, float]:
        out = {}
        for k in BONDS:
            out[f"delta_a_{k}"] = self.delta_a(k)
            out[f"delta_b_{k}"] = self.delta_b(k)
        return out

    def with_cavity(self, k: str, **changes) -> "SystemParams":
        modes = dict(self.cavity)
        modes[k] = replace(modes[k], **changes)
        return replace(self, cavity=modes)

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        out = {
            "omega_ea": self.omega_ea,
            "omega_ba": self.omega_ba,
            "nu1": self.nu1,
            "nu2": self.nu2,
            "Omega_a1": self.Omega_a1,
            "Omega_a2": self.Omega_a2,
            "Omega_b1": self.Omega_b1,
            "Omega_b2": self.Omega_b2,
        }
        for k in BONDS:
            m = self.cavity[k]
            out[f"cavity_{k}"] = {"nu": m.nu, "g_a": m.g_a, "g_b": m.g_b, "t": m.t}
        out.update(self.laser_detunings())
        out.update(self.cavity_detunings())
        return out


@dataclass(frozen=True)
class FockCutoff:
    n_max: int = 2

    def __post_init__(self):
        if self.n_max < 0:
            raise ContractViolation("n_max must be non-negative")

    @property
    def dim(self) -> int:
        return self.n_max + 1

    def require_virtual(self):
        if self.n_max < 1:
            raise ContractViolation("virtual-photon physics needs n_max >= 1")


def solve_frequencies(
    omega_ba: float,
    nu2: float,
    delta: Mapping[str, float] | None = None,
) -> dict[str, float]:
    """Laser and cavity frequencies that make the matching conditions exact.

    With ``delta = 0`` this is the simple resonance pattern
    ``Delta_a1 = delta_b^s``, ``Delta_a2 = delta_a^z``, ``Delta_b2 = delta_a^s = delta_b^z``,
    i.e. ``nu_s = nu1 - omega_ba = nu2 + omega_ba`` and ``nu_z = nu2``.  Non-zero
    ``delta[k]`` shifts the cavity frequency so that
    ``delta_a^s - Delta_b2 = delta_b^s - Delta_a1 = delta_s`` and
    ``delta_a^z - Delta_a2 = delta_b^z - Delta_b2 = delta_z``.

    The two s-type equalities can only hold together if ``nu1 - nu2 = 2 omega_ba``,
    which is why ``nu1`` is not an independent input.
    """
    delta = dict(delta or {})
    d = {k: float(delta.get(k, 0.0)) for k in BONDS}
    nu1 = nu2 + 2.0 * omega_ba
    return {
        "nu1": nu1,
        "nu2": nu2,
        "nu_x": nu2 + omega_ba - d["x"],
        "nu_y": nu2 + omega_ba - d["y"],
        "nu_z": nu2 - d["z"],
    }


def make_params(
    omega_ea: float,
    omega_ba: float,
    nu2: float,
    Omega: Mapping[str, float],
    g_a: Mapping[str, float],
    g_b: Mapping[str, float],
    t: Mapping[str, float],
    delta: Mapping[str, float] | None = None,
) -> SystemParams:
    """Build :class:`SystemParams` from independent inputs via :func:`solve_frequencies`.

    ``Omega`` is keyed ``a1, a2, b1, b2``; ``g_a``, ``g_b``, ``t`` and ``delta``
    are keyed by bond direction.
    """
    f = solve_frequencies(omega_ba, nu2, delta)
    modes = {
        k: CavityMode(nu=f[f"nu_{k}"], g_a=float(g_a[k]), g_b=float(g_b[k]), t=float(t[k]))
        for k in BONDS
    }
    return SystemParams(
        omega_ea=float(omega_ea),
        omega_ba=float(omega_ba),
        nu1=f["nu1"],
        nu2=f["nu2"],
        Omega_a1=float(Omega.get("a1", 0.0)),
        Omega_a2=float(Omega.get("a2", 0.0)),
        Omega_b1=float(Omega.get("b1", 0.0)),
        Omega_b2=float(Omega.get("b2", 0.0)),
        cavity=modes,
    )

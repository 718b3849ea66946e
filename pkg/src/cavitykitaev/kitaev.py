"""Kitaev honeycomb model: lattice, Hamiltonian, plaquettes and spectral probes.

Site ``2*(i*L2 + j)`` is the A site of unit cell ``(i, j)`` and the next
index is its B site.  The z bond joins A and B of the same cell, the x bond
joins ``A(r)`` to ``B(r - n1)`` and the y bond joins ``A(r)`` to ``B(r - n2)``.
Spin operators follow the Pauli convention with basis index 0 = spin up.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from itertools import product

import numpy as np
import scipy.sparse as sp
from scipy.optimize import least_squares

from . import qops
from .errors import CapacityError, ContractViolation, ShapeError, UnsupportedError

ED_LIMIT = 16
DEGENERACY_TOL = 1e-9
ORACLE_GAP_RTOL = 1e-8
ED_GAP_RTOL = 1e-2


@dataclass(frozen=True)
class KitaevCouplings:
    J_x: float
    J_y: float
    J_z: float
    B: float = 0.0
    J_zc: float | None = None  # z-bond coefficient in the presence of a field

    def __post_init__(self):
        if self.J_zc is None:
            object.__setattr__(self, "J_zc", self.J_z)
        for name in ("J_x", "J_y", "J_z", "B", "J_zc"):
            if not math.isfinite(getattr(self, name)):
                raise ContractViolation(f"{name} must be finite")

    @property
    def bond_strength(self) -> dict[str, float]:
        """Coefficient of sigma^k sigma^k on each bond type (``J_zc`` on z)."""
        return {"x": self.J_x, "y": self.J_y, "z": self.J_zc}

    def to_dict(self) -> dict:
        return {"J_x": self.J_x, "J_y": self.J_y, "J_z": self.J_z, "B": self.B, "J_zc": self.J_zc}


@dataclass(frozen=True)
class HoneycombLattice:
    L1: int
    L2: int
    boundary: str
    bonds: tuple[tuple[int, int, str], ...]
    plaquettes: tuple[tuple[tuple[int, str], ...], ...] = field(default=())

    @property
    def n_sites(self) -> int:
        return 2 * self.L1 * self.L2

    def space(self) -> qops.SpaceSpec:
        return qops.compose([2] * self.n_sites)

    def require_ed(self, limit: int = ED_LIMIT):
        if self.n_sites > limit:
            raise CapacityError(f"{self.n_sites} spins exceed the exact-diagonalization limit of {limit}")

    def bonds_of_type(self, kind: str) -> list[tuple[int, int]]:
        return [(i, j) for i, j, b in self.bonds if b == kind]

    def relabel(self, mapping: dict[str, str]) -> "HoneycombLattice":
        """Same geometry with bond types renamed by ``mapping``."""
        bonds = tuple((i, j, mapping[b]) for i, j, b in self.bonds)
        plaqs = tuple(tuple((s, mapping[a]) for s, a in p) for p in self.plaquettes)
        return HoneycombLattice(self.L1, self.L2, self.boundary, bonds, plaqs)


def site_index(L2: int, i: int, j: int, sublattice: str) -> int:
    return 2 * (i * L2 + j) + (0 if sublattice == "A" else 1)


def build_lattice(L1: int, L2: int, boundary: str = "periodic", ed_limit: int = ED_LIMIT) -> HoneycombLattice:
    """Honeycomb lattice of ``L1 x L2`` unit cells.

    Open boundaries drop every bond that would wrap around.  Plaquettes are
    built for periodic lattices with ``L1, L2 >= 2`` (smaller tori do not
    close a hexagon on six distinct sites).
    """
    if L1 < 1 or L2 < 1:
        raise ShapeError("L1 and L2 must be at least 1")
    if boundary not in ("open", "periodic"):
        raise ShapeError(f"boundary must be 'open' or 'periodic', got {boundary!r}")
    periodic = boundary == "periodic"

    def cell(i, j):
        if periodic:
            return i % L1, j % L2
        if 0 <= i < L1 and 0 <= j < L2:
            return i, j
        return None

    def A(c):
        return site_index(L2, c[0], c[1], "A")

    def B(c):
        return site_index(L2, c[0], c[1], "B")

    bonds = []
    for i, j in product(range(L1), range(L2)):
        bonds.append((A((i, j)), B((i, j)), "z"))
    for kind, (di, dj) in (("x", (1, 0)), ("y", (0, 1))):
        for i, j in product(range(L1), range(L2)):
            other = cell(i - di, j - dj)
            if other is not None:
                bonds.append((A((i, j)), B(other), kind))

    plaquettes = []
    if periodic and L1 >= 2 and L2 >= 2:
        for i, j in product(range(L1), range(L2)):
            cycle = (
                (A(cell(i, j)), "x"),
                (B(cell(i, j)), "y"),
                (A(cell(i + 1, j)), "z"),
                (B(cell(i + 1, j - 1)), "x"),
                (A(cell(i + 1, j - 1)), "y"),
                (B(cell(i, j - 1)), "z"),
            )
            plaquettes.append(cycle)

    lattice = HoneycombLattice(L1, L2, boundary, tuple(bonds), tuple(plaquettes))
    _validate(lattice)
    if lattice.n_sites > ed_limit:
        warnings.warn(
            f"lattice has {lattice.n_sites} spins, beyond the exact-diagonalization limit {ed_limit}",
            RuntimeWarning,
            stacklevel=2,
        )
    return lattice


def _validate(lattice: HoneycombLattice):
    seen = {}
    for i, j, kind in lattice.bonds:
        for s in (i, j):
            if (s, kind) in seen:
                raise ShapeError(f"site {s} has two {kind} bonds")
            seen[(s, kind)] = True
    if lattice.boundary == "periodic" and len(seen) != 3 * lattice.n_sites:
        raise ShapeError("periodic lattice must give every site one bond of each type")
    for cycle in lattice.plaquettes:
        if len({s for s, _ in cycle}) != 6:
            raise ShapeError("plaquette does not visit six distinct sites")


# -- operators ---------------------------------------------------------------


def pauli_string(ops: dict[int, str], n_sites: int) -> sp.csr_matrix:
    """Sparse matrix of a product of Pauli operators on ``n_sites`` spins."""
    dim = 1 << n_sites
    cols = np.arange(dim, dtype=np.int64)
    flip = 0
    values = np.ones(dim, dtype=complex)
    for site, kind in ops.items():
        shift = n_sites - 1 - site
        bit = (cols >> shift) & 1
        if kind == "x":
            flip |= 1 << shift
        elif kind == "y":
            flip |= 1 << shift
            values *= np.where(bit == 0, 1j, -1j)
        elif kind == "z":
            values *= np.where(bit == 0, 1.0, -1.0)
        else:
            raise ValueError(f"unknown Pauli label {kind!r}")
    rows = cols ^ flip
    return sp.csr_matrix((values, (rows, cols)), shape=(dim, dim))


def bond_operator(i: int, j: int, kind: str, space: qops.SpaceSpec) -> qops.OperatorMatrix:
    """``sigma^kind_i sigma^kind_j`` on a spin-1/2 space."""
    if any(d != 2 for d in space.factors):
        raise ShapeError("bond operators need a pure spin-1/2 space")
    return qops.OperatorMatrix(space, pauli_string({i: kind, j: kind}, len(space.factors)))


@dataclass(frozen=True)
class KitaevHamiltonianSpec:
    couplings: KitaevCouplings
    lattice: HoneycombLattice


def build_kitaev_hamiltonian(spec: KitaevHamiltonianSpec, ed_limit: int = ED_LIMIT) -> qops.OperatorMatrix:
    """``sum_k J_k sum_<ij>_k s^k_i s^k_j + B sum_j s^z_j`` on the lattice."""
    lat, c = spec.lattice, spec.couplings
    lat.require_ed(ed_limit)
    n = lat.n_sites
    dim = 1 << n
    M = sp.csr_matrix((dim, dim), dtype=complex)
    strength = c.bond_strength
    for i, j, kind in lat.bonds:
        if strength[kind] != 0.0:
            M = M + strength[kind] * pauli_string({i: kind, j: kind}, n)
    if c.B != 0.0:
        for s in range(n):
            M = M + c.B * pauli_string({s: "z"}, n)
    return qops.OperatorMatrix(lat.space(), M.tocsr())


def plaquette_operators(lattice: HoneycombLattice) -> list[qops.OperatorMatrix]:
    """One ``W_p`` per hexagon: product of ``sigma^alpha`` with alpha the outward bond type."""
    if lattice.boundary != "periodic":
        raise UnsupportedError("plaquette operators are defined for periodic lattices only")
    space = lattice.space()
    return [qops.OperatorMatrix(space, pauli_string(dict(cycle), lattice.n_sites)) for cycle in lattice.plaquettes]


# -- exact diagonalization ---------------------------------------------------


@dataclass(frozen=True)
class GroundStateInfo:
    E0: float
    gap: float
    degeneracy: int
    eigenvalues: np.ndarray


def ed_ground_and_gap(H: qops.OperatorMatrix, k: int = 12, degeneracy_tol: float = DEGENERACY_TOL) -> GroundStateInfo:
    """Ground energy, gap above the (possibly degenerate) ground level, degeneracy."""
    n = H.dim
    k = min(k, n)
    while True:
        res = qops.eig_low(H, k, return_vectors=False)
        w = res.eigenvalues
        above = np.nonzero(w - w[0] > degeneracy_tol)[0]
        if above.size or k == n:
            break
        k = min(2 * k, n)
    E0 = float(w[0])
    if above.size:
        deg = int(above[0])
        gap = float(w[above[0]] - E0)
    else:
        deg, gap = n, 0.0
    return GroundStateInfo(E0=E0, gap=gap, degeneracy=deg, eigenvalues=w)


# -- free-fermion oracle -----------------------------------------------------


@dataclass(frozen=True)
class PhasePoint:
    J_x: float
    J_y: float
    J_z: float
    B: float
    gap: float
    classification: str  # "gapless" | "gapped"
    tolerance: float

    def to_dict(self) -> dict:
        return {
            "J_x": self.J_x, "J_y": self.J_y, "J_z": self.J_z, "B": self.B,
            "gap": self.gap, "classification": self.classification, "tolerance": self.tolerance,
        }


def dispersion(J_x: float, J_y: float, J_z: float, theta1, theta2):
    """``J_x e^{i theta1} + J_y e^{i theta2} + J_z`` (vortex-free sector)."""
    return J_x * np.exp(1j * np.asarray(theta1)) + J_y * np.exp(1j * np.asarray(theta2)) + J_z


def freefermion_gap(J_x: float, J_y: float, J_z: float, grid: int = 64,
                    gap_rtol: float = ORACLE_GAP_RTOL) -> PhasePoint:
    """Single-fermion gap ``2 min_q |f(q)|`` over the Brillouin zone.

    A ``grid x grid`` scan locates candidate minima, which are then polished
    by least squares on ``(Re f, Im f)`` since Dirac points fall between grid
    points.
    """
    if grid < 64:
        raise ContractViolation("momentum grid must be at least 64 x 64")
    for v in (J_x, J_y, J_z):
        if not math.isfinite(v):
            raise ContractViolation("couplings must be finite")
    th = 2 * np.pi * np.arange(grid) / grid
    T1, T2 = np.meshgrid(th, th, indexing="ij")
    mag = np.abs(dispersion(J_x, J_y, J_z, T1, T2))
    best = float(mag.min())
    flat = np.argsort(mag, axis=None)[:4]

    def resid(q):
        f = dispersion(J_x, J_y, J_z, q[0], q[1])
        return [f.real, f.imag]

    for idx in flat:
        a, b = np.unravel_index(idx, mag.shape)
        sol = least_squares(resid, x0=[th[a], th[b]], xtol=1e-15, ftol=1e-15, gtol=1e-15)
        best = min(best, float(np.hypot(*sol.fun)))
    gap = 2.0 * best
    tol = gap_rtol * max(abs(J_x), abs(J_y), abs(J_z))
    label = "gapless" if gap <= tol else "gapped"
    return PhasePoint(J_x, J_y, J_z, 0.0, gap, label, tol)


def vortex_free_energy_per_site(J_x: float, J_y: float, J_z: float, grid: int = 512) -> float:
    """Thermodynamic ground energy per spin, ``-(1/2) <|f(q)|>_BZ``."""
    th = 2 * np.pi * (np.arange(grid) + 0.5) / grid
    T1, T2 = np.meshgrid(th, th, indexing="ij")
    return -0.5 * float(np.abs(dispersion(J_x, J_y, J_z, T1, T2)).mean())


def classify_ed_gap(gap: float, couplings: KitaevCouplings, gap_rtol: float = ED_GAP_RTOL) -> str:
    scale = max(abs(couplings.J_x), abs(couplings.J_y), abs(couplings.J_zc), abs(couplings.B))
    return "gapless" if gap <= gap_rtol * scale else "gapped"


# -- Jordan-Wigner oracle ----------------------------------------------------


def pfaffian(A: np.ndarray) -> float:
    """Pfaffian of a real antisymmetric matrix by pivoted Gaussian elimination."""
    A = np.array(A, dtype=float)
    n = A.shape[0]
    if n % 2:
        return 0.0
    result = 1.0
    for k in range(0, n - 1, 2):
        p = k + 1 + int(np.argmax(np.abs(A[k, k + 1:])))
        if p != k + 1:
            A[[k + 1, p], :] = A[[p, k + 1], :]
            A[:, [k + 1, p]] = A[:, [p, k + 1]]
            result = -result
        pivot = A[k, k + 1]
        if pivot == 0.0:
            return 0.0
        result *= pivot
        if k + 2 < n:
            tau = A[k, k + 2:] / pivot
            A[k + 2:, k + 2:] += np.outer(tau, A[k + 2:, k + 1]) - np.outer(A[k + 2:, k + 1], tau)
    return result


def jw_ring_spectrum(J_x: float, J_y: float, n_sites: int) -> np.ndarray:
    """Full spectrum of the periodic ring with ``yy`` on even links, ``xx`` on odd links.

    Link ``(j, j+1)`` carries ``J_y s^y s^y`` for even ``j`` and ``J_x s^x s^x``
    for odd ``j`` (including the closing link).  Solved by Jordan-Wigner
    fermions separately in each sector of the total parity ``prod_j s^z_j``.
    """
    if n_sites < 2 or n_sites % 2:
        raise ContractViolation("the alternating ring needs an even number of sites >= 2")
    N = n_sites
    energies = []
    for P in (+1, -1):
        A = np.zeros((2 * N, 2 * N))

        def put(a, b, val):
            A[a, b] += val
            A[b, a] -= val

        for j in range(N):
            J = J_y if j % 2 == 0 else J_x
            if j < N - 1:
                if j % 2 == 0:  # yy = i c_{2j} c_{2j+3}
                    put(2 * j, 2 * j + 3, 2 * J)
                else:  # xx = -i c_{2j+1} c_{2j+2}
                    put(2 * j + 1, 2 * j + 2, -2 * J)
            else:
                if j % 2 == 0:  # yy = -i P c_{2N-2} c_1
                    put(2 * N - 2, 1, -2 * P * J)
                else:  # xx = i P c_{2N-1} c_0
                    put(2 * N - 1, 0, 2 * P * J)
        eps = np.linalg.eigvalsh(1j * A)[N:]
        eps = np.clip(eps, 0.0, None)
        pf = pfaffian(A)
        ground_parity = 1.0 if pf == 0.0 or abs(pf) < 1e-14 else math.copysign(1.0, pf)
        e0 = -0.5 * eps.sum()
        for occ in product((0, 1), repeat=N):
            if ground_parity * (-1) ** sum(occ) == P:
                energies.append(e0 + float(np.dot(occ, eps)))
    return np.sort(np.array(energies))

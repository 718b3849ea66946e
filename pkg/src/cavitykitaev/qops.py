"""Composite Hilbert spaces and sparse operator algebra.

Basis ordering is leftmost-major: for factors ``(d0, d1, ...)`` the basis
index of ``|i0, i1, ...>`` is ``i0 * (d1 * d2 * ...) + i1 * (d2 * ...) + ...``,
the same convention as ``numpy.kron``.  Every physics module relies on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Callable, Mapping, Sequence, Union

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    ContractViolation,
    IntegratorError,
    InvalidSpaceError,
    ShapeError,
    SolverError,
)

DENSE_THRESHOLD = 1024
HERMITIAN_RTOL = 1e-12


@dataclass(frozen=True)
class SpaceSpec:
    factors: tuple[int, ...]

    @property
    def dim(self) -> int:
        return prod(self.factors)

    def __len__(self):
        return len(self.factors)


def compose(factors: Sequence[int]) -> SpaceSpec:
    """Tensor-product space of the given local dimensions."""
    factors = tuple(int(d) for d in factors)
    if not factors:
        raise InvalidSpaceError("a space needs at least one factor")
    if any(d < 1 for d in factors):
        raise InvalidSpaceError(f"local dimensions must be >= 1, got {factors}")
    return SpaceSpec(factors)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Sparse complex operator acting on ``space``."""

    space: SpaceSpec
    matrix: sp.csr_matrix

    def __post_init__(self):
        n = self.space.dim
        if self.matrix.shape != (n, n):
            raise ShapeError(f"matrix shape {self.matrix.shape} does not match space dim {n}")

    @property
    def dim(self) -> int:
        return self.space.dim

    def _check_same_space(self, other):
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        if other.space.factors != self.space.factors:
            raise ShapeError(f"space mismatch: {self.space.factors} vs {other.space.factors}")
        return None

    def __add__(self, other):
        if self._check_same_space(other) is NotImplemented:
            return NotImplemented
        return OperatorMatrix(self.space, (self.matrix + other.matrix).tocsr())

    def __sub__(self, other):
        if self._check_same_space(other) is NotImplemented:
            return NotImplemented
        return OperatorMatrix(self.space, (self.matrix - other.matrix).tocsr())

    def __neg__(self):
        return OperatorMatrix(self.space, -self.matrix)

    def __mul__(self, scalar):
        if isinstance(scalar, OperatorMatrix):
            return NotImplemented
        return OperatorMatrix(self.space, (self.matrix * complex(scalar)).tocsr())

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check_same_space(other)
            return OperatorMatrix(self.space, (self.matrix @ other.matrix).tocsr())
        return self.matrix @ other

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.matrix.conj().T.tocsr())

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def norm(self) -> float:
        """Frobenius norm."""
        return float(spla.norm(self.matrix))

    def hermiticity_defect(self) -> float:
        """Relative Frobenius norm of ``H - H^dagger`` (0 for the null operator)."""
        ref = self.norm()
        if ref == 0.0:
            return 0.0
        return float(spla.norm(self.matrix - self.matrix.conj().T)) / ref

    def is_hermitian(self, rtol: float = HERMITIAN_RTOL) -> bool:
        return self.hermiticity_defect() <= rtol


def zero(space: SpaceSpec) -> OperatorMatrix:
    return OperatorMatrix(space, sp.csr_matrix((space.dim, space.dim), dtype=complex))


def identity(space: SpaceSpec) -> OperatorMatrix:
    return OperatorMatrix(space, sp.identity(space.dim, dtype=complex, format="csr"))


def commutator(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    return a @ b - b @ a


# -- local operators ---------------------------------------------------------

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}


def destroy(n_max: int) -> np.ndarray:
    """Bosonic annihilation operator truncated to occupancies ``0..n_max``."""
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(complex)


def create(n_max: int) -> np.ndarray:
    return destroy(n_max).conj().T


def number(n_max: int) -> np.ndarray:
    return np.diag(np.arange(n_max + 1, dtype=float)).astype(complex)


def ket_bra(dim: int, p: int, q: int) -> np.ndarray:
    """``|p><q|`` on a ``dim``-level system."""
    out = np.zeros((dim, dim), dtype=complex)
    out[p, q] = 1.0
    return out


def embed(local_op, factor_index: int, space: SpaceSpec) -> OperatorMatrix:
    """Lift a single-factor operator to ``space`` (identity on all other factors)."""
    return embed_many({factor_index: local_op}, space)


def embed_many(local_ops: Mapping[int, object], space: SpaceSpec) -> OperatorMatrix:
    """Tensor product of local operators on distinct factors, identity elsewhere."""
    dims = space.factors
    for idx, op in local_ops.items():
        if not 0 <= idx < len(dims):
            raise ShapeError(f"factor index {idx} out of range for {len(dims)} factors")
        shape = op.shape
        if shape != (dims[idx], dims[idx]):
            raise ShapeError(f"local operator {shape} does not fit factor {idx} of dimension {dims[idx]}")
    out = sp.identity(1, dtype=complex, format="csr")
    pending = 1  # run of identity factors not yet folded in
    for idx, d in enumerate(dims):
        if idx in local_ops:
            if pending > 1:
                out = sp.kron(out, sp.identity(pending, dtype=complex), format="csr")
            pending = 1
            out = sp.kron(out, sp.csr_matrix(local_ops[idx], dtype=complex), format="csr")
        else:
            pending *= d
    if pending > 1:
        out = sp.kron(out, sp.identity(pending, dtype=complex), format="csr")
    return OperatorMatrix(space, out.tocsr())


def basis_state(space: SpaceSpec, occupations: Sequence[int]) -> np.ndarray:
    """Product basis vector ``|i0, i1, ...>`` as a dense complex array."""
    if len(occupations) != len(space.factors):
        raise ShapeError("one occupation per factor required")
    psi = np.zeros(space.dim, dtype=complex)
    psi[np.ravel_multi_index(tuple(occupations), space.factors)] = 1.0
    return psi


# -- spectra -----------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    residual_norms: np.ndarray


def _require_hermitian(H: OperatorMatrix):
    defect = H.hermiticity_defect()
    if defect > HERMITIAN_RTOL:
        raise ContractViolation(f"operator is not Hermitian (relative defect {defect:.3e})")


def eig_low(
    H: OperatorMatrix,
    k: int,
    dense_threshold: int = DENSE_THRESHOLD,
    rtol: float = 1e-10,
    return_vectors: bool = True,
) -> SpectrumResult:
    """Lowest ``k`` eigenpairs of a Hermitian operator.

    Dense ``eigh`` up to ``dense_threshold``, Lanczos (``eigsh``) above it.
    Every returned pair satisfies ``||Hv - Ev|| <= rtol * ||H||_1``; a
    violation raises :class:`SolverError` with the residuals attached.
    """
    _require_hermitian(H)
    n = H.dim
    if not 1 <= k <= n:
        raise ContractViolation(f"k must satisfy 1 <= k <= {n}, got {k}")
    M = H.matrix
    hnorm = float(spla.norm(M, 1)) if M.nnz else 0.0
    if n <= dense_threshold or k >= n - 1:
        dense = M.toarray()
        dense = 0.5 * (dense + dense.conj().T)
        if not np.any(dense.imag):
            w, v = la.eigh(dense.real, subset_by_index=(0, k - 1))
        else:
            w, v = la.eigh(dense, subset_by_index=(0, k - 1))
    else:
        rng = np.random.default_rng(0)  # deterministic Lanczos start vector
        v0 = rng.standard_normal(n)
        if not np.any(M.data.imag):
            op = M.real.tocsr()
        else:
            op = M
            v0 = v0.astype(complex)
        try:
            w, v = spla.eigsh(op, k=k, which="SA", v0=v0, tol=0.0, maxiter=max(1000, 20 * n))
        except spla.ArpackNoConvergence as exc:
            raise SolverError("Lanczos did not converge", residuals=None) from exc
        order = np.argsort(w)
        w, v = w[order], v[:, order]
    residuals = np.linalg.norm(M @ v - v * w, axis=0)
    bound = rtol * max(hnorm, 1.0e-300)
    if hnorm > 0 and np.any(residuals > bound):
        raise SolverError(
            f"residuals up to {residuals.max():.3e} exceed tolerance {bound:.3e}",
            residuals=residuals,
        )
    return SpectrumResult(
        eigenvalues=np.asarray(w, dtype=float),
        eigenvectors=np.asarray(v) if return_vectors else None,
        residual_norms=residuals,
    )


# -- time evolution ----------------------------------------------------------

HamiltonianLike = Union[OperatorMatrix, Callable[[float], OperatorMatrix]]


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), dim)

    def populations(self, index) -> np.ndarray:
        return np.abs(self.states[:, index]) ** 2


def _expm_apply(M, h: float, psi: np.ndarray) -> np.ndarray:
    if M.shape[0] <= 64:
        return la.expm(-1j * h * M.toarray()) @ psi
    return spla.expm_multiply(-1j * h * M, psi)


def evolve(
    H_of_t: HamiltonianLike,
    psi0,
    times,
    fidelity_tol: float = 1e-8,
    norm_tol: float = 1e-8,
    max_halvings: int = 20,
) -> Trajectory:
    """Integrate ``i d/dt psi = H(t) psi`` and sample ``psi`` at ``times``.

    A constant :class:`OperatorMatrix` is propagated exactly through its
    eigendecomposition (or Krylov ``expm_multiply`` for large spaces).  A
    callable is integrated with the exponential midpoint rule; each grid
    interval is subdivided until halving the step changes the end state's
    fidelity by less than ``fidelity_tol``.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ContractViolation("times must be a non-empty 1-D grid")
    if np.any(np.diff(times) <= 0):
        raise ContractViolation("times must be strictly increasing")
    psi = np.asarray(psi0, dtype=complex).copy()
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ContractViolation("initial state must be normalised")

    if isinstance(H_of_t, OperatorMatrix):
        states = _evolve_static(H_of_t, psi, times)
    else:
        states = _evolve_midpoint(H_of_t, psi, times, fidelity_tol, max_halvings)

    drift = np.abs(np.linalg.norm(states, axis=1) - 1.0)
    if np.any(drift > norm_tol):
        raise IntegratorError(f"norm drift {drift.max():.3e} exceeds {norm_tol:.1e}")
    return Trajectory(times=times, states=states)


def _evolve_static(H: OperatorMatrix, psi: np.ndarray, times: np.ndarray) -> np.ndarray:
    _require_hermitian(H)
    if psi.shape != (H.dim,):
        raise ShapeError("state dimension does not match Hamiltonian")
    dt = times - times[0]
    if H.dim <= DENSE_THRESHOLD:
        dense = H.toarray()
        w, v = la.eigh(0.5 * (dense + dense.conj().T))
        coeff = v.conj().T @ psi
        return (v @ (np.exp(-1j * np.outer(w, dt)) * coeff[:, None])).T
    out = np.empty((times.size, H.dim), dtype=complex)
    out[0] = psi
    for n in range(1, times.size):
        psi = spla.expm_multiply(-1j * (times[n] - times[n - 1]) * H.matrix, psi)
        out[n] = psi
    return out


def _evolve_midpoint(H_of_t, psi, times, fidelity_tol, max_halvings) -> np.ndarray:
    out = np.empty((times.size, psi.size), dtype=complex)
    out[0] = psi

    def sweep(psi_start, t0, t1, nsteps):
        h = (t1 - t0) / nsteps
        phi = psi_start
        for s in range(nsteps):
            Hm = H_of_t(t0 + (s + 0.5) * h)
            _require_hermitian(Hm)
            phi = _expm_apply(Hm.matrix, h, phi)
        return phi

    nsteps = 1
    for n in range(1, times.size):
        t0, t1 = times[n - 1], times[n]
        coarse = sweep(psi, t0, t1, nsteps)
        for _ in range(max_halvings):
            fine = sweep(psi, t0, t1, 2 * nsteps)
            nsteps *= 2
            deficit = 1.0 - abs(np.vdot(coarse, fine)) ** 2
            if deficit < fidelity_tol:
                break
            coarse = fine
        else:
            raise IntegratorError(f"step refinement did not converge on [{t0}, {t1}]")
        psi = fine
        # let the next interval start from a coarser step again
        nsteps = max(1, nsteps // 4)
        out[n] = psi
    return out

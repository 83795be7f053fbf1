"""State containers and conversions between them.

``StateVector`` holds a pure state, possibly unnormalized (non-Hermitian
evolution does not preserve the norm) and possibly living on a
system (x) ancilla product space.  ``DensityOperator`` holds a positive
Hermitian matrix, unit-trace unless flagged otherwise.  ``purify`` /
``reduced_density`` move between the two pictures.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import BadParameter, NormUnderflow, NotPSD, ShapeError

NORM_FLOOR = 1e-14
RANK_CUTOFF = 1e-12  # eigenvalues below this carry no ancilla dimension


@dataclass(eq=False)
class StateVector:
    """A pure state vector with norm tracking.

    Attributes:
        amplitudes: complex amplitudes, flattened.
        layout: ``(d_system, d_ancilla)`` when the vector lives on a product
            space (index ``s * d_a + a``), else ``None``.
    """

    amplitudes: np.ndarray
    layout: tuple[int, int] | None = None

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.layout is not None:
            ds, da = int(self.layout[0]), int(self.layout[1])
            if ds * da != amp.size:
                raise ShapeError(
                    f"layout {self.layout} inconsistent with {amp.size} amplitudes"
                )
            self.layout = (ds, da)
        n = float(np.linalg.norm(amp))
        if not np.isfinite(n):
            raise ValueError("state vector has non-finite amplitudes")
        if n <= NORM_FLOOR:
            raise NormUnderflow(f"state norm {n:.3e} at or below {NORM_FLOOR:.0e}")
        self.amplitudes = amp

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = 1e-12) -> bool:
        return abs(self.norm - 1.0) <= tol

    def density(self) -> np.ndarray:
        """Outer product |psi><psi| as a plain matrix (not trace-normalized)."""
        return np.outer(self.amplitudes, np.conj(self.amplitudes))


@dataclass(eq=False)
class DensityOperator:
    """Hermitian PSD operator; unit trace unless ``trace_normalized=False``."""

    matrix: np.ndarray
    trace_normalized: bool = True

    def __post_init__(self):
        m = linalg.require_hermitian(self.matrix, "density operator")
        m = 0.5 * (m + linalg.dag(m))
        w = np.linalg.eigvalsh(m)
        if w[0] < linalg.PSD_CLAMP:
            raise NotPSD(f"density operator eigenvalue {w[0]:.3e} below tolerance")
        if self.trace_normalized:
            tr = float(np.trace(m).real)
            if abs(tr - 1.0) > 1e-10:
                raise BadParameter(f"trace {tr!r} is not 1 within 1e-10")
        self.matrix = m

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def pure_density(psi: StateVector) -> DensityOperator:
    """Unit-trace density operator of a (normalized) pure state."""
    unit, _ = normalize(psi)
    return DensityOperator(unit.density())


def as_density_matrix(state) -> np.ndarray:
    """Unit-trace density matrix from a StateVector or DensityOperator."""
    if isinstance(state, StateVector):
        unit, _ = normalize(state)
        return unit.density()
    if isinstance(state, DensityOperator):
        m = state.matrix
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > 1e-8:
            raise BadParameter(f"density operator trace {tr!r} is not 1")
        return m / tr
    m = linalg.as_matrix(state)
    return DensityOperator(m).matrix


def normalize(psi: StateVector) -> tuple[StateVector, float]:
    """Split ``psi`` into a unit vector and its norm.

    Raises:
        NormUnderflow: if the norm is at or below 1e-14 (the state has
            decayed away; normalized quantities are meaningless).
    """
    n = psi.norm
    if n <= NORM_FLOOR:
        raise NormUnderflow(f"cannot normalize state with norm {n:.3e}")
    return StateVector(psi.amplitudes / n, layout=psi.layout), n


def purify(rho: DensityOperator) -> StateVector:
    """Purify a unit-trace density operator onto system (x) ancilla.

    The ancilla dimension equals the rank of ``rho`` (eigenvalues above
    ``RANK_CUTOFF``); ancilla basis states are indexed by descending
    eigenvalue so the construction is deterministic.
    """
    if not rho.trace_normalized:
        raise BadParameter("purification requires a unit-trace density operator")
    w, v = linalg.herm_eig(rho.matrix)
    order = np.argsort(w)[::-1]
    w, v = w[order], v[:, order]
    keep = w > RANK_CUTOFF
    w, v = w[keep], v[:, keep]
    if w.size == 0:
        raise NotPSD("density operator has no positive eigenvalues")
    ds = rho.dim
    da = w.size
    amp = np.zeros(ds * da, dtype=complex)
    for l in range(da):
        amp[l::da] = np.sqrt(w[l]) * v[:, l]
    return StateVector(amp, layout=(ds, da))


def reduced_density(psi: StateVector) -> DensityOperator:
    """System-side reduced state of a normalized product-space vector."""
    if psi.layout is None:
        raise ShapeError("state vector carries no system/ancilla layout")
    if not psi.is_normalized(1e-8):
        raise BadParameter(f"state norm {psi.norm!r} is not 1; normalize first")
    unit, _ = normalize(psi)
    red = linalg.partial_trace(unit.density(), psi.layout, keep="S")
    red = 0.5 * (red + linalg.dag(red))
    return DensityOperator(red)

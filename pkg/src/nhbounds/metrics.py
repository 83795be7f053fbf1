"""Distances and statistics on states and observables.

Uhlmann fidelity, Bures angle, observable moments (Hermitian and the
generalized non-Hermitian standard deviation), the Hellinger-type overlap
ceiling built from two sets of moments, and Renyi divergences between
classical distributions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DegenerateObservable, HermiticityViolation, NotDistribution
from .states import DensityOperator, StateVector, as_density_matrix


@dataclass(frozen=True)
class ObservableStats:
    """First and second moments of a Hermitian observable in a state."""

    mean: float
    std: float


def _rho(state) -> np.ndarray:
    if isinstance(state, DensityOperator):
        return state.matrix
    if isinstance(state, StateVector):
        return as_density_matrix(state)
    return linalg.as_matrix(state)


def fidelity(rho1, rho2) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2 in [0, 1].

    General inputs go through two PSD square roots with tiny negative
    eigenvalues clamped.  When either input is rank-1 the exact identity
    Fid(|psi><psi|, rho) = <psi|rho|psi> is used instead: the square-root
    route carries sqrt(machine-eps) noise from the spurious zero
    eigenvalues of a projector, which would break the 1e-12 pure-overlap
    contract.
    """
    a = _rho(rho1)
    b = _rho(rho2)
    for first, second in ((a, b), (b, a)):
        w, v = np.linalg.eigh(first)
        if w[-1] >= 1.0 - 1e-10:
            top = v[:, -1]
            f = float(np.real(np.vdot(top, second @ top)))
            return min(max(f, 0.0), 1.0)
    ra = linalg.sqrtm_psd(a)
    inner = ra @ b @ ra
    inner = 0.5 * (inner + linalg.dag(inner))
    root = linalg.sqrtm_psd(inner)
    f = float(np.trace(root).real) ** 2
    if f > 1.0 + 1e-6:
        raise ValueError(f"fidelity {f!r} exceeds 1; inputs are not unit-trace states")
    return min(max(f, 0.0), 1.0)


def bures_angle(rho1, rho2) -> float:
    """arccos of the square-root fidelity, in [0, pi/2]."""
    return float(np.arccos(np.clip(np.sqrt(fidelity(rho1, rho2)), 0.0, 1.0)))


def observable_stats(c, state) -> ObservableStats:
    """Mean and standard deviation of a Hermitian observable.

    ``state`` may be a normalized StateVector or a unit-trace
    DensityOperator.  The variance is clamped at zero against round-off.
    """
    op = linalg.require_hermitian(c, "observable")
    rho = _rho(state)
    mean_c = complex(np.trace(op @ rho))
    if abs(mean_c.imag) > 1e-10 * (1.0 + abs(mean_c.real)):
        raise HermiticityViolation(
            f"observable mean has imaginary residue {mean_c.imag:.3e}"
        )
    second = float(np.trace(op @ op @ rho).real)
    var = max(second - mean_c.real**2, 0.0)
    return ObservableStats(mean=mean_c.real, std=float(np.sqrt(var)))


def generalized_std(op, state) -> float:
    """Standard deviation sqrt(<O^dag O> - |<O>|^2) for an arbitrary operator.

    Reduces to ``observable_stats(...).std`` when ``op`` is Hermitian.  The
    value is invariant under shifts ``op -> op - lam*I`` (the direct formula
    cancels the shift for any complex ``lam``).
    """
    o = linalg.as_matrix(op)
    rho = _rho(state)
    second = float(np.trace(linalg.dag(o) @ o @ rho).real)
    mean = complex(np.trace(o @ rho))
    var = max(second - abs(mean) ** 2, 0.0)
    return float(np.sqrt(var))


def overlap_upper_bound(stats1: ObservableStats, stats2: ObservableStats) -> float:
    """Hellinger-type ceiling on the overlap of two states, from moments.

    Returns ``[((m1 - m2) / (s1 + s2))^2 + 1]^(-1/2)``; exactly 1 when the
    means coincide (including the zero-spread limit).

    Raises:
        DegenerateObservable: when both spreads vanish but the means differ
            (the ratio is infinite and the ceiling degenerates to 0).
    """
    dm = stats1.mean - stats2.mean
    ds = stats1.std + stats2.std
    if ds <= 0.0:
        if abs(dm) <= 1e-14:
            return 1.0
        raise DegenerateObservable(
            f"zero spread with distinct means ({stats1.mean}, {stats2.mean})"
        )
    return float(1.0 / np.sqrt((dm / ds) ** 2 + 1.0))


def _check_distribution(p) -> np.ndarray:
    v = np.asarray(p, dtype=float).reshape(-1)
    if v.size == 0:
        raise NotDistribution("empty distribution")
    if np.any(v < -1e-12):
        raise NotDistribution(f"negative entry {v.min():.3e}")
    if abs(v.sum() - 1.0) > 1e-10:
        raise NotDistribution(f"entries sum to {v.sum()!r}, not 1")
    return np.clip(v, 0.0, None)


def renyi_divergence(p, q, alpha: float = 0.5) -> float:
    """Renyi divergence D_alpha(P||Q) = ln(sum P^a Q^(1-a)) / (a - 1).

    Implemented for 0 < alpha < 1 as stated; terms where either entry
    vanishes contribute zero, and disjoint support yields +inf.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    pv = _check_distribution(p)
    qv = _check_distribution(q)
    if pv.size != qv.size:
        raise NotDistribution("distributions have different lengths")
    mask = (pv > 0.0) & (qv > 0.0)
    if not np.any(mask):
        return float("inf")
    s = float(np.sum(pv[mask] ** alpha * qv[mask] ** (1.0 - alpha)))
    if s <= 0.0:
        return float("inf")
    return max(float(np.log(s) / (alpha - 1.0)), 0.0)


def renyi_half(p, q) -> float:
    """D_{1/2}(P||Q) = -2 ln sum sqrt(P Q); symmetric in its arguments."""
    return renyi_divergence(p, q, alpha=0.5)

"""Time evolution engines.

Closed-form non-Hermitian propagation (exact matrix exponential for constant
generators, midpoint exponential product for time-dependent ones), the
Lindblad master equation via the exact vectorized-Liouvillian exponential,
single Kraus steps, quantum-jump trajectory sampling with per-trajectory
RNG streams, and the no-jump conditioned state with its survival weight.

Units: hbar = 1 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .errors import (
    BadParameter,
    IntegratorDiverged,
    NonPositiveGamma,
    NormUnderflow,
    ShapeError,
    StepTooLarge,
)
from .states import DensityOperator, StateVector, as_density_matrix, normalize

DEFAULT_TD_STEPS = 2000        # midpoint steps for time-dependent propagation
MAX_JUMP_PROB = 1e-3           # per-step jump probability cap in trajectories


@dataclass(eq=False, frozen=True)
class NonHermitianModel:
    """Generator H - i*Gamma of norm-non-preserving evolution.

    ``h`` and ``gamma`` are Hermitian; ``gamma`` is PSD (its eigenvalues set
    the decay rates).  An optional ``time_dependence`` callback
    ``t -> (H(t), Gamma(t))`` makes the model time dependent; ``h``/``gamma``
    then hold the t=0 snapshot used for validation.
    """

    h: np.ndarray
    gamma: np.ndarray
    time_dependence: Callable[[float], tuple[np.ndarray, np.ndarray]] | None = None

    def __post_init__(self):
        h = linalg.require_hermitian(self.h, "H")
        g = linalg.require_hermitian(self.gamma, "Gamma")
        if h.shape != g.shape:
            raise ShapeError("H and Gamma have different dimensions")
        w = np.linalg.eigvalsh(g)
        if w[0] < linalg.PSD_CLAMP:
            raise NonPositiveGamma(f"Gamma eigenvalue {w[0]:.3e} below tolerance")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "gamma", g)

    @property
    def dim(self) -> int:
        return self.h.shape[0]

    @property
    def is_time_dependent(self) -> bool:
        return self.time_dependence is not None

    def parts(self, t: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
        if self.time_dependence is None:
            return self.h, self.gamma
        h, g = self.time_dependence(t)
        return np.asarray(h, dtype=complex), np.asarray(g, dtype=complex)

    def full_generator(self, t: float = 0.0) -> np.ndarray:
        """H(t) - i Gamma(t)."""
        h, g = self.parts(t)
        return h - 1j * g


@dataclass(eq=False, frozen=True)
class LindbladModel:
    """System Hamiltonian plus jump operators of a Markovian open system."""

    h_s: np.ndarray
    jumps: tuple[np.ndarray, ...]

    def __post_init__(self):
        h = linalg.require_hermitian(self.h_s, "H_S")
        ls = tuple(linalg.as_matrix(l) for l in self.jumps)
        for l in ls:
            if l.shape != h.shape:
                raise ShapeError("jump operator dimension differs from H_S")
        object.__setattr__(self, "h_s", h)
        object.__setattr__(self, "jumps", ls)

    @property
    def dim(self) -> int:
        return self.h_s.shape[0]

    @property
    def n_channels(self) -> int:
        return len(self.jumps)

    def jump_rate_operator(self) -> np.ndarray:
        """Sum of L^dag L over all channels."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for l in self.jumps:
            out += linalg.dag(l) @ l
        return out

    def effective_hamiltonian(self) -> np.ndarray:
        """H_S - (i/2) sum L^dag L, the no-jump generator."""
        return self.h_s - 0.5j * self.jump_rate_operator()

    def no_jump_model(self) -> NonHermitianModel:
        """The equivalent non-Hermitian model (H_S, half the jump-rate operator)."""
        half = 0.5 * self.jump_rate_operator()
        half = 0.5 * (half + linalg.dag(half))
        return NonHermitianModel(self.h_s, half)


@dataclass
class Trajectory:
    """One quantum-jump record: event times/channels plus optional states."""

    jump_times: list[tuple[float, int]]
    jump_count: int
    final_state: StateVector
    sampled_states: list[tuple[float, StateVector]] | None = None


@dataclass
class TrajectoryEnsemble:
    """Order-independent accumulation of many trajectories.

    ``mean_states[k]`` is the ensemble mean projector at ``times[k]``;
    ``stderr_real``/``stderr_imag`` hold the entrywise standard errors of the
    corresponding real and imaginary parts.
    """

    n_trajectories: int
    times: np.ndarray
    mean_states: list[np.ndarray]
    stderr_real: list[np.ndarray]
    stderr_imag: list[np.ndarray]
    jump_counts: np.ndarray
    dt: float
    n_steps: int

    def mean_jump_count(self) -> float:
        return float(self.jump_counts.mean())

    def jump_count_std(self) -> float:
        return float(self.jump_counts.std(ddof=1)) if self.n_trajectories > 1 else 0.0

    def jump_count_stderr(self) -> float:
        return self.jump_count_std() / math.sqrt(self.n_trajectories)


@dataclass(frozen=True)
class NoJumpState:
    """No-jump conditioned state and its survival weight.

    ``weight`` is the trace of the unnormalized no-jump branch (the paper's
    normalization of the conditional state); it is non-increasing in time
    when the jump-rate operator is PSD.
    """

    state: DensityOperator
    weight: float


# ---------------------------------------------------------------------------
# closed (non-Hermitian) propagation


def propagator(model: NonHermitianModel, t: float, steps: int | None = None) -> np.ndarray:
    """Time-ordered exponential of -i * (H - i Gamma) up to time ``t``.

    Constant generators use a single matrix exponential (exact).
    Time-dependent ones use a second-order midpoint exponential product with
    ``steps`` intervals (default ``DEFAULT_TD_STEPS``).
    """
    if t < 0:
        raise BadParameter("propagation time must be nonnegative")
    if t == 0:
        return np.eye(model.dim, dtype=complex)
    if not model.is_time_dependent:
        return linalg.expm(-1j * t * model.full_generator())
    n = int(steps) if steps else DEFAULT_TD_STEPS
    if n < 1:
        raise BadParameter("steps must be a positive integer")
    dt = t / n
    out = np.eye(model.dim, dtype=complex)
    for k in range(n):
        mid = (k + 0.5) * dt
        out = linalg.expm(-1j * dt * model.full_generator(mid)) @ out
    return out


def propagator_with_error(
    model: NonHermitianModel, t: float, steps: int | None = None
) -> tuple[np.ndarray, float]:
    """Propagator plus a Richardson step-halving error estimate.

    For constant generators the propagator is exact and the estimate is 0.
    """
    full = propagator(model, t, steps)
    if not model.is_time_dependent or t == 0:
        return full, 0.0
    n = int(steps) if steps else DEFAULT_TD_STEPS
    half = propagator(model, t, max(n // 2, 1))
    return full, linalg.max_abs(full - half)


def propagator_span(
    model: NonHermitianModel,
    t1: float,
    t2: float,
    n: int,
    substeps: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Propagators from time 0 to each node of a uniform grid over [t1, t2].

    Returns ``(times, mats)`` with ``times`` of length ``n + 1`` and
    ``mats[k]`` the propagator at ``times[k]``.  For constant generators the
    node-to-node factor is one exact exponential; for time-dependent ones
    each interval is covered by ``substeps`` midpoint steps.
    """
    if t2 < t1 or t1 < 0:
        raise BadParameter("need 0 <= t1 <= t2")
    times = t1 + (t2 - t1) * np.arange(n + 1) / max(n, 1)
    mats = np.empty((n + 1, model.dim, model.dim), dtype=complex)
    mats[0] = propagator(model, t1)
    if n == 0:
        return times, mats
    dt = (t2 - t1) / n
    if not model.is_time_dependent:
        step = linalg.expm(-1j * dt * model.full_generator())
        for k in range(n):
            mats[k + 1] = step @ mats[k]
        return times, mats
    sub = max(int(substeps), 1)
    h = dt / sub
    for k in range(n):
        acc = mats[k]
        for j in range(sub):
            mid = times[k] + (j + 0.5) * h
            acc = linalg.expm(-1j * h * model.full_generator(mid)) @ acc
        mats[k + 1] = acc
    return times, mats


def evolve_nonhermitian(
    model: NonHermitianModel, psi0: StateVector, t: float, steps: int | None = None
) -> StateVector:
    """Evolve a normalized pure state; the result is generally unnormalized."""
    if not psi0.is_normalized(1e-10):
        raise BadParameter("initial state must be normalized")
    if psi0.dim != model.dim:
        raise ShapeError("state dimension differs from model dimension")
    amp = propagator(model, t, steps) @ psi0.amplitudes
    n = float(np.linalg.norm(amp))
    if n <= 1e-14:
        raise NormUnderflow(f"evolved state norm {n:.3e} underflowed")
    return StateVector(amp)


def evolve_density_nonhermitian(
    model: NonHermitianModel, rho0: DensityOperator, t: float, steps: int | None = None
) -> DensityOperator:
    """Evolve a density operator as M rho0 M^dag (unnormalized output)."""
    if rho0.dim != model.dim:
        raise ShapeError("state dimension differs from model dimension")
    m = propagator(model, t, steps)
    out = m @ rho0.matrix @ linalg.dag(m)
    out = 0.5 * (out + linalg.dag(out))
    tr = float(np.trace(out).real)
    if tr <= 1e-14:
        raise NormUnderflow(f"evolved density trace {tr:.3e} underflowed")
    return DensityOperator(out, trace_normalized=False)


# ---------------------------------------------------------------------------
# Lindblad propagation


def liouvillian(model: LindbladModel) -> np.ndarray:
    """Dense superoperator L with vec(rho') = L vec(rho), row-major vec."""
    d = model.dim
    eye = np.eye(d, dtype=complex)
    h = model.h_s
    out = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for l in model.jumps:
        ldl = linalg.dag(l) @ l
        out += np.kron(l, np.conj(l))
        out -= 0.5 * (np.kron(ldl, eye) + np.kron(eye, ldl.T))
    return out


def evolve_lindblad(model: LindbladModel, rho0: DensityOperator, t: float) -> DensityOperator:
    """Exact Lindblad evolution via the vectorized-Liouvillian exponential."""
    if t < 0:
        raise BadParameter("propagation time must be nonnegative")
    rho = as_density_matrix(rho0)
    if rho.shape[0] != model.dim:
        raise ShapeError("state dimension differs from model dimension")
    vec = linalg.expm(liouvillian(model) * t) @ rho.reshape(-1)
    out = vec.reshape(model.dim, model.dim)
    out = 0.5 * (out + linalg.dag(out))
    tr = float(np.trace(out).real)
    if abs(tr - 1.0) > 1e-8:
        raise IntegratorDiverged(f"trace drifted to {tr!r}")
    w = np.linalg.eigvalsh(out)
    if w[0] < -1e-8:
        raise IntegratorDiverged(f"negative eigenvalue {w[0]:.3e}")
    out = out / tr
    if w[0] < linalg.PSD_CLAMP:
        # round-off cleanup: project the offending eigenvalues to zero
        w2, v = np.linalg.eigh(out)
        w2 = np.clip(w2, 0.0, None)
        out = (v * (w2 / w2.sum())) @ linalg.dag(v)
    return DensityOperator(out)


def kraus_operators(model: LindbladModel, dt: float) -> list[np.ndarray]:
    """First-order Kraus set: V0 = I - i dt H_eff, V_m = sqrt(dt) L_m."""
    if dt <= 0:
        raise BadParameter("dt must be positive")
    v0 = np.eye(model.dim, dtype=complex) - 1j * dt * model.effective_hamiltonian()
    return [v0] + [math.sqrt(dt) * l for l in model.jumps]


def kraus_step(model: LindbladModel, rho: DensityOperator, dt: float) -> DensityOperator:
    """One first-order Kraus map application; trace deviates at O(dt^2).

    Raises:
        StepTooLarge: if dt * ||H_eff|| exceeds 0.1.
    """
    heff = model.effective_hamiltonian()
    if dt * float(np.linalg.norm(heff, 2)) > 0.1:
        raise StepTooLarge(f"dt={dt!r} violates dt*||H_eff|| <= 0.1")
    out = np.zeros((model.dim, model.dim), dtype=complex)
    for v in kraus_operators(model, dt):
        out += v @ rho.matrix @ linalg.dag(v)
    out = 0.5 * (out + linalg.dag(out))
    return DensityOperator(out, trace_normalized=False)


# ---------------------------------------------------------------------------
# quantum-jump trajectories


def _trajectory_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-style stream for one trajectory, independent of scheduling."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def _step_schedule(model: LindbladModel, tau: float, dt_max: float | None) -> tuple[float, int]:
    """Step size keeping both the jump probability and dt*||H_eff|| small."""
    scale = 1e-12
    if model.n_channels:
        scale = max(scale, float(np.linalg.eigvalsh(model.jump_rate_operator())[-1]))
    scale = max(scale, float(np.linalg.norm(model.effective_hamiltonian(), 2)))
    dt = MAX_JUMP_PROB / scale
    if dt_max is not None:
        if dt_max <= 0:
            raise BadParameter("dt_max must be positive")
        dt = min(dt, dt_max)
    dt = min(dt, tau) if tau > 0 else dt
    n = max(1, math.ceil(tau / dt - 1e-12))
    return tau / n, n


def _snap_sample_indices(sample_times, dt: float, n_steps: int) -> list[tuple[int, float]]:
    out = []
    for t in sample_times:
        k = int(round(t / dt)) if dt > 0 else 0
        k = min(max(k, 0), n_steps)
        out.append((k, k * dt))
    return out


def sample_trajectory(
    model: LindbladModel,
    psi0: StateVector,
    tau: float,
    seed: int,
    *,
    traj_index: int = 0,
    dt_max: float | None = None,
    sample_times: Sequence[float] | None = None,
) -> Trajectory:
    """Sample one quantum-jump trajectory.

    Per step, channel m fires with probability dt * <L_m^dag L_m>; otherwise
    the state advances with V0 = I - i dt H_eff and is renormalized.  The
    uniform stream is derived from ``(seed, traj_index)`` so results are
    reproducible and identical to the matching member of
    ``trajectory_ensemble``.
    """
    if not psi0.is_normalized(1e-10):
        raise BadParameter("initial state must be normalized")
    if psi0.dim != model.dim:
        raise ShapeError("state dimension differs from model dimension")
    if tau < 0:
        raise BadParameter("tau must be nonnegative")
    dt, n = _step_schedule(model, tau, dt_max)
    if tau == 0:
        n = 0
    v0 = np.eye(model.dim, dtype=complex) - 1j * dt * model.effective_hamiltonian()
    rng = _trajectory_rng(seed, traj_index)
    uniforms = rng.random(n)
    want = _snap_sample_indices(sample_times, dt, n) if sample_times is not None else []
    sampled: list[tuple[float, StateVector]] = []
    psi = psi0.amplitudes / psi0.norm
    for idx, tt in want:
        if idx == 0:
            sampled.append((tt, StateVector(psi.copy())))
    events: list[tuple[float, int]] = []
    for k in range(n):
        amps = [l @ psi for l in model.jumps]
        weights = np.array([dt * float(np.vdot(a, a).real) for a in amps])
        total = float(weights.sum())
        r = uniforms[k]
        if r < total:
            cum = np.cumsum(weights)
            ch = int(np.searchsorted(cum, r, side="right"))
            a = amps[ch]
            psi = a / np.linalg.norm(a)
            events.append(((k + 1) * dt, ch))
        else:
            nxt = v0 @ psi
            nn = float(np.linalg.norm(nxt))
            if nn <= 1e-14:
                raise NormUnderflow("no-jump branch norm underflowed")
            psi = nxt / nn
        for idx, tt in want:
            if idx == k + 1:
                sampled.append((tt, StateVector(psi.copy())))
    return Trajectory(
        jump_times=events,
        jump_count=len(events),
        final_state=StateVector(psi),
        sampled_states=sampled if sample_times is not None else None,
    )


def trajectory_ensemble(
    model: LindbladModel,
    state0,
    tau: float,
    n_traj: int,
    seed: int,
    *,
    dt_max: float | None = None,
    sample_times: Sequence[float] | None = None,
    chunk_size: int = 2048,
) -> TrajectoryEnsemble:
    """Run ``n_traj`` trajectories and accumulate order-independent statistics.

    ``state0`` may be a normalized pure state or a unit-trace density
    operator; in the mixed case each trajectory first draws its initial
    eigenstate from the spectral decomposition (one extra uniform, taken
    before the per-step stream).  Accumulation is in trajectory-index order,
    so the result is deterministic for a fixed seed regardless of how work
    would be scheduled.
    """
    if n_traj < 1:
        raise BadParameter("need at least one trajectory")
    if tau < 0:
        raise BadParameter("tau must be nonnegative")
    dt, n_steps = _step_schedule(model, tau, dt_max)
    if tau == 0:
        n_steps = 0
    d = model.dim

    mixed = isinstance(state0, DensityOperator)
    if mixed:
        w, v = linalg.herm_eig(state0.matrix)
        order = np.argsort(w)[::-1]
        probs, vecs = w[order], v[:, order]
        probs = np.clip(probs, 0.0, None)
        probs = probs / probs.sum()
        cum_init = np.cumsum(probs)
    else:
        if not isinstance(state0, StateVector):
            state0 = StateVector(np.asarray(state0, dtype=complex))
        unit, _ = normalize(state0)
        base = unit.amplitudes

    if sample_times is None:
        sample_times = [tau]
    snap = _snap_sample_indices(sample_times, dt, n_steps)
    out_times = np.array([tt for _, tt in snap])
    by_index: dict[int, list[int]] = {}
    for pos, (idx, _) in enumerate(snap):
        by_index.setdefault(idx, []).append(pos)

    v0 = np.eye(d, dtype=complex) - 1j * dt * model.effective_hamiltonian()
    ls = list(model.jumps)
    n_ch = len(ls)

    sum_rho = [np.zeros((d, d), dtype=complex) for _ in snap]
    sum_sq_re = [np.zeros((d, d)) for _ in snap]
    sum_sq_im = [np.zeros((d, d)) for _ in snap]
    jump_counts = np.zeros(n_traj, dtype=np.int64)

    def accumulate(pos: int, psi: np.ndarray) -> None:
        proj = np.einsum("ci,cj->cij", psi, np.conj(psi))
        sum_rho[pos] += proj.sum(axis=0)
        sum_sq_re[pos] += (proj.real**2).sum(axis=0)
        sum_sq_im[pos] += (proj.imag**2).sum(axis=0)

    for start in range(0, n_traj, chunk_size):
        idxs = range(start, min(start + chunk_size, n_traj))
        c = len(idxs)
        uniforms = np.empty((c, n_steps))
        psi = np.empty((c, d), dtype=complex)
        for row, i in enumerate(idxs):
            rng = _trajectory_rng(seed, i)
            if mixed:
                pick = int(np.searchsorted(cum_init, rng.random(), side="right"))
                pick = min(pick, len(probs) - 1)
                psi[row] = vecs[:, pick]
            else:
                psi[row] = base
            uniforms[row] = rng.random(n_steps)
        counts = np.zeros(c, dtype=np.int64)
        for pos in by_index.get(0, []):
            accumulate(pos, psi)
        for k in range(n_steps):
            if n_ch:
                amps = np.stack([psi @ l.T for l in ls])          # (m, c, d)
                w = dt * np.sum(np.abs(amps) ** 2, axis=2)         # (m, c)
                cum = np.cumsum(w, axis=0)
                total = cum[-1]
            else:
                total = np.zeros(c)
            r = uniforms[:, k]
            jumped = r < total
            nxt = psi @ v0.T
            nxt /= np.linalg.norm(nxt, axis=1, keepdims=True)
            if n_ch and np.any(jumped):
                ch = np.sum(r[None, :] >= cum, axis=0)
                ch = np.minimum(ch, n_ch - 1)
                chosen = amps[ch, np.arange(c), :]
                norms = np.linalg.norm(chosen, axis=1, keepdims=True)
                chosen = chosen / np.where(norms > 0.0, norms, 1.0)
                psi = np.where(jumped[:, None], chosen, nxt)
                counts += jumped
            else:
                psi = nxt
            for pos in by_index.get(k + 1, []):
                accumulate(pos, psi)
        jump_counts[start : start + c] = counts

    means, se_re, se_im = [], [], []
    for pos in range(len(snap)):
        mean = sum_rho[pos] / n_traj
        if n_traj > 1:
            var_re = np.clip(sum_sq_re[pos] / n_traj - mean.real**2, 0.0, None)
            var_im = np.clip(sum_sq_im[pos] / n_traj - mean.imag**2, 0.0, None)
            fac = n_traj / (n_traj - 1)
            se_re.append(np.sqrt(fac * var_re / n_traj))
            se_im.append(np.sqrt(fac * var_im / n_traj))
        else:
            se_re.append(np.zeros((d, d)))
            se_im.append(np.zeros((d, d)))
        means.append(mean)

    return TrajectoryEnsemble(
        n_trajectories=n_traj,
        times=out_times,
        mean_states=means,
        stderr_real=se_re,
        stderr_imag=se_im,
        jump_counts=jump_counts,
        dt=dt,
        n_steps=n_steps,
    )


# ---------------------------------------------------------------------------
# no-jump conditioned state


def no_jump_state(model: LindbladModel, rho0: DensityOperator, t: float) -> NoJumpState:
    """No-jump conditioned state M rho0 M^dag / Z with M = exp(-i H_eff t).

    ``Z`` is the survival weight Tr[M rho0 M^dag]; it equals the squared norm
    of the no-jump branch for pure initial states.

    Raises:
        NormUnderflow: if Z falls below 1e-14.
    """
    rho = as_density_matrix(rho0)
    if rho.shape[0] != model.dim:
        raise ShapeError("state dimension differs from model dimension")
    m = linalg.expm(-1j * t * model.effective_hamiltonian())
    raw = m @ rho @ linalg.dag(m)
    raw = 0.5 * (raw + linalg.dag(raw))
    z = float(np.trace(raw).real)
    if z <= 1e-14:
        raise NormUnderflow(f"survival weight {z:.3e} underflowed")
    return NoJumpState(state=DensityOperator(raw / z), weight=z)


def no_jump_heff_std(model: LindbladModel, rho0: DensityOperator, t: float) -> float:
    """Standard deviation of H_eff in the no-jump conditioned state at time t."""
    cond = no_jump_state(model, rho0, t)
    heff = model.effective_hamiltonian()
    rho = cond.state.matrix
    second = float(np.trace(linalg.dag(heff) @ heff @ rho).real)
    mean = complex(np.trace(heff @ rho))
    return float(np.sqrt(max(second - abs(mean) ** 2, 0.0)))

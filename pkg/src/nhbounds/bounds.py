"""Evaluation of every trade-off inequality as a structured report.

Two families, each in a closed (non-Hermitian generator) and an open
(continuous-measurement / Lindblad) form:

* mean-based ("ML") bounds, built from the initial expectations of the
  Hamiltonian and the decay operator, valid for commuting time-independent
  generators;
* deviation-based ("MT") bounds, built from the time-integrated generalized
  standard deviation of the full generator along the normalized trajectory.

Each produces a fidelity floor, a speed limit on the Bures angle, and a
scaled-variance (TUR-style) inequality; the classical Markov special case
adds a Renyi-divergence speed limit and an activity-based TUR.  All checks
come back as :class:`BoundReport` with lhs/rhs oriented so that
``slack = lhs - rhs >= 0`` means the inequality holds; preconditions that
fail dynamically (positivity, integration window, fidelity/weight domain)
flip ``applicable`` instead of raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg, metrics
from .errors import (
    BadParameter,
    CommutatorViolation,
    DegenerateObservable,
    NonPositiveGamma,
)
from .models import ClassicalMarkovModel
from .propagation import (
    LindbladModel,
    NonHermitianModel,
    no_jump_state,
    evolve_lindblad,
    propagator,
    propagator_span,
    trajectory_ensemble,
)
from .states import DensityOperator, as_density_matrix

SLACK_TOL = 1e-8            # a theorem violation is slack below this
WINDOW_TOL = 1e-7           # round-off allowance at the pi/2 window edge
DEFAULT_QUAD_STEPS = 400    # composite Simpson panels

Condition = tuple[str, bool]


@dataclass(frozen=True)
class BoundReport:
    """One evaluated inequality, oriented so slack >= 0 means satisfied."""

    kind: str
    lhs: float
    rhs: float
    applicable: bool
    conditions: tuple[Condition, ...] = ()
    params: dict = field(default_factory=dict)

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs

    @property
    def satisfied(self) -> bool:
        return self.slack >= -SLACK_TOL

    def failed_conditions(self) -> list[str]:
        return [name for name, ok in self.conditions if not ok]


@dataclass(frozen=True)
class JumpCountObservable:
    """Marker selecting the jump-count observable for open-system TURs.

    By the vacuum convention the count has zero mean and zero spread at
    t = 0; statistics at the end time come from a trajectory ensemble.
    """

    n_trajectories: int = 10000
    seed: int = 0
    dt_max: float | None = None


# ---------------------------------------------------------------------------
# shared helpers


def commutator_check(h, gamma) -> tuple[float, bool]:
    """Max-abs norm of [H, Gamma] and whether it passes the relative gate."""
    a = linalg.require_hermitian(h, "H")
    b = linalg.require_hermitian(gamma, "Gamma")
    norm = linalg.max_abs(a @ b - b @ a)
    gate = 1e-10 * (1.0 + linalg.max_abs(a) * linalg.max_abs(b))
    return norm, norm <= gate


def ground_energy(h) -> float:
    """Minimum eigenvalue of a Hermitian operator."""
    w, _ = linalg.herm_eig(h)
    return float(w[0])


def _expectation(op: np.ndarray, rho: np.ndarray) -> float:
    return float(np.trace(op @ rho).real)


def _simpson(values: np.ndarray, dt: float) -> tuple[float, float]:
    """Composite Simpson plus a conservative error estimate.

    ``values`` has n + 1 nodes with n divisible by 4.  The estimate combines
    the plain doubling difference |S_n - S_{n/2}| (an overestimate of the
    asymptotic truncation error of S_n by roughly a factor 15) with a
    round-off floor, so it stays an upper bound once truncation drops to
    machine precision.
    """
    n = len(values) - 1
    if n % 4 != 0:
        raise BadParameter("Simpson panel count must be divisible by 4")
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    fine = dt / 3.0 * float(w @ values)
    half = values[::2]
    w2 = np.ones(n // 2 + 1)
    w2[1:-1:2] = 4.0
    w2[2:-1:2] = 2.0
    coarse = 2.0 * dt / 3.0 * float(w2 @ half)
    return fine, abs(fine - coarse) + 1e-13 * (1.0 + abs(fine))


def _require_time_independent(model: NonHermitianModel, what: str) -> None:
    if model.is_time_dependent:
        raise BadParameter(f"{what} requires a time-independent model")


def _require_commuting(model: NonHermitianModel) -> float:
    norm, ok = commutator_check(model.h, model.gamma)
    if not ok:
        raise CommutatorViolation(f"[H, Gamma] norm {norm:.3e} exceeds tolerance")
    w = np.linalg.eigvalsh(model.gamma)
    if w[0] < linalg.PSD_CLAMP:
        raise NonPositiveGamma(f"Gamma eigenvalue {w[0]:.3e} below tolerance")
    return norm


def _evolved_density(model: NonHermitianModel, rho0: np.ndarray, t: float):
    """(unnormalized rho(t), its trace) under M rho M^dag."""
    m = propagator(model, t)
    raw = m @ rho0 @ linalg.dag(m)
    raw = 0.5 * (raw + linalg.dag(raw))
    return raw, float(np.trace(raw).real)


def normalized_overlap(
    model: NonHermitianModel, state0, tau1: float, tau2: float, steps: int | None = None
) -> float:
    """|<psi~(tau1)|psi~(tau2)>| along the normalized (purified) trajectory."""
    rho0 = as_density_matrix(state0)
    m1 = propagator(model, tau1, steps)
    m2 = propagator(model, tau2, steps)
    num = abs(complex(np.trace(linalg.dag(m1) @ m2 @ rho0)))
    n1 = math.sqrt(float(np.trace(m1 @ rho0 @ linalg.dag(m1)).real))
    n2 = math.sqrt(float(np.trace(m2 @ rho0 @ linalg.dag(m2)).real))
    return num / (n1 * n2)


def _generalized_std_integral(
    model: NonHermitianModel,
    rho0: np.ndarray,
    tau1: float,
    tau2: float,
    steps: int,
    substeps: int = 1,
) -> tuple[float, float]:
    """Simpson integral of the generalized std of the full generator.

    Evaluated along the normalized trajectory between tau1 and tau2, plus
    the doubling error estimate.
    """
    if steps % 4 != 0 or steps <= 0:
        raise BadParameter("quadrature steps must be a positive multiple of 4")
    if tau2 == tau1:
        return 0.0, 0.0
    times, mats = propagator_span(model, tau1, tau2, steps, substeps=substeps)
    constant = not model.is_time_dependent
    if constant:
        gen = model.full_generator()
        gen_sq = linalg.dag(gen) @ gen
    values = np.empty(steps + 1)
    for k in range(steps + 1):
        if not constant:
            gen = model.full_generator(times[k])
            gen_sq = linalg.dag(gen) @ gen
        raw = mats[k] @ rho0 @ linalg.dag(mats[k])
        tr = float(np.trace(raw).real)
        second = float(np.trace(gen_sq @ raw).real) / tr
        mean = complex(np.trace(gen @ raw)) / tr
        values[k] = math.sqrt(max(second - abs(mean) ** 2, 0.0))
    return _simpson(values, (tau2 - tau1) / steps)


def _scaled_ratio_sq(
    observable: np.ndarray, rho_a: np.ndarray, rho_b: np.ndarray
) -> tuple[float, dict]:
    """Squared mean-change-over-total-spread ratio of a Hermitian observable."""
    s_a = metrics.observable_stats(observable, DensityOperator(rho_a))
    s_b = metrics.observable_stats(observable, DensityOperator(rho_b))
    dm = s_b.mean - s_a.mean
    ds = s_b.std + s_a.std
    if ds <= 0.0:
        if abs(dm) <= 1e-14:
            return 0.0, {"mean_start": s_a.mean, "mean_end": s_b.mean}
        raise DegenerateObservable("zero spread at both times with distinct means")
    info = {
        "mean_start": s_a.mean,
        "mean_end": s_b.mean,
        "std_start": s_a.std,
        "std_end": s_b.std,
    }
    return (dm / ds) ** 2, info


# ---------------------------------------------------------------------------
# closed system, mean-based (ML) family


def _ml_ingredients(model: NonHermitianModel, state0, tau: float) -> dict:
    _require_time_independent(model, "the mean-based bound")
    comm_norm = _require_commuting(model)
    if tau < 0:
        raise BadParameter("tau must be nonnegative")
    rho0 = as_density_matrix(state0)
    mean_h = _expectation(model.h, rho0)
    mean_g = _expectation(model.gamma, rho0)
    e_g = ground_energy(model.h)
    _, trace_tau = _evolved_density(model, rho0, tau)
    norm_tau = math.sqrt(max(trace_tau, 0.0))
    raw = math.exp(-mean_g * tau) - tau * (mean_h - e_g)
    return {
        "rho0": rho0,
        "tau": tau,
        "mean_h": mean_h,
        "mean_gamma": mean_g,
        "ground_energy": e_g,
        "norm_tau": norm_tau,
        "floor_raw": raw,
        "commutator_norm": comm_norm,
    }


def ml_fidelity_bound(model: NonHermitianModel, state0, tau: float) -> float:
    """Mean-based fidelity floor: [exp(-<Gamma> tau) - tau(<H> - E_g)] / ||psi(tau)||.

    Requires a time-independent model with commuting (H, Gamma) and PSD
    Gamma; expectations are taken in the initial state.
    """
    ing = _ml_ingredients(model, state0, tau)
    if ing["norm_tau"] <= 1e-14:
        raise BadParameter("evolved norm underflowed; the bound is meaningless")
    return ing["floor_raw"] / ing["norm_tau"]


def fid_ml(model: NonHermitianModel, state0, tau: float) -> BoundReport:
    """Measured normalized overlap against the mean-based floor."""
    ing = _ml_ingredients(model, state0, tau)
    floor = ing["floor_raw"] / ing["norm_tau"]
    measured = normalized_overlap(model, state0, 0.0, tau)
    conditions = (
        ("commuting_h_gamma", True),
        ("gamma_psd", True),
        ("floor_positive", ing["floor_raw"] > 0.0),
    )
    params = {k: v for k, v in ing.items() if k != "rho0"}
    params["fidelity_floor"] = floor
    return BoundReport(
        kind="fid-ml",
        lhs=measured,
        rhs=floor,
        applicable=True,
        conditions=conditions,
        params=params,
    )


def qsl_ml(model: NonHermitianModel, state0, tau: float) -> BoundReport:
    """Mean-based speed limit on the Bures angle between the endpoints.

    Full form: 1 + [tau(<H> - E_g) - exp(-<Gamma> tau)] / ||psi(tau)||
    bounds 2 sin^2(angle / 2) from above.  The simplified norm-free variant
    (valid under the positivity condition) is attached under
    ``params["simple"]`` together with the weakest linear-in-tau form and
    the geometric minimum-time estimate it implies.
    """
    ing = _ml_ingredients(model, state0, tau)
    raw, norm_tau, tau_ = ing["floor_raw"], ing["norm_tau"], ing["tau"]
    de = ing["mean_h"] - ing["ground_energy"]
    lhs = 1.0 - raw / norm_tau
    raw_t, tr_t = _evolved_density(model, ing["rho0"], tau_)
    angle = metrics.bures_angle(DensityOperator(ing["rho0"]), DensityOperator(raw_t / tr_t))
    rhs = 2.0 * math.sin(angle / 2.0) ** 2
    positive = raw > 0.0
    rate_sum = de + ing["mean_gamma"]
    simple_lhs = tau_ * de + 1.0 - math.exp(-ing["mean_gamma"] * tau_)
    weak_lhs = tau_ * rate_sum
    params = {k: v for k, v in ing.items() if k != "rho0"}
    params.update(
        {
            "bures_angle": angle,
            "simple": {
                "lhs": simple_lhs,
                "weak_lhs": weak_lhs,
                "rhs": rhs,
                "applicable": positive,
            },
            "tau_min_geometric": (rhs / rate_sum) if rate_sum > 0 else 0.0,
        }
    )
    return BoundReport(
        kind="qsl-ml",
        lhs=lhs,
        rhs=rhs,
        applicable=True,
        conditions=(
            ("commuting_h_gamma", True),
            ("gamma_psd", True),
            ("floor_positive", positive),
        ),
        params=params,
    )


def tur_ml(model: NonHermitianModel, state0, tau: float, observable) -> BoundReport:
    """Mean-based scaled-variance inequality for a Hermitian observable.

    Headline lhs is the tight, norm-weighted form
    ||psi(tau)||^2 / floor^2 - 1; the loose norm-free variant sits under
    ``params["loose"]``.  Applicable only while the floor is positive.
    """
    ing = _ml_ingredients(model, state0, tau)
    raw, norm_tau = ing["floor_raw"], ing["norm_tau"]
    raw_t, tr_t = _evolved_density(model, ing["rho0"], tau)
    ratio_sq, stats = _scaled_ratio_sq(
        linalg.require_hermitian(observable, "observable"), ing["rho0"], raw_t / tr_t
    )
    positive = raw > 0.0
    lhs_tight = (norm_tau**2 / raw**2 - 1.0) if raw != 0.0 else float("inf")
    lhs_loose = (1.0 / raw**2 - 1.0) if raw != 0.0 else float("inf")
    params = {k: v for k, v in ing.items() if k != "rho0"}
    params.update(stats)
    params["loose"] = {"lhs": lhs_loose, "rhs": ratio_sq, "applicable": positive}
    return BoundReport(
        kind="tur-ml",
        lhs=lhs_tight,
        rhs=ratio_sq,
        applicable=positive,
        conditions=(
            ("commuting_h_gamma", True),
            ("gamma_psd", True),
            ("floor_positive", positive),
        ),
        params=params,
    )


# ---------------------------------------------------------------------------
# closed system, deviation-based (MT) family


def mt_fidelity_bound(
    model: NonHermitianModel, state0, tau1: float, tau2: float, steps: int = DEFAULT_QUAD_STEPS
) -> float:
    """Deviation-based fidelity floor cos(integral of the generalized std).

    The cosine form is only a valid floor while the integral stays within
    [0, pi/2]; callers get that window through the report builders.
    """
    rho0 = as_density_matrix(state0)
    integral, _ = _generalized_std_integral(model, rho0, tau1, tau2, steps)
    return math.cos(integral)


def fid_mt(
    model: NonHermitianModel, state0, tau1: float, tau2: float, steps: int = DEFAULT_QUAD_STEPS
) -> BoundReport:
    """Measured normalized overlap against the deviation-based floor."""
    rho0 = as_density_matrix(state0)
    integral, err = _generalized_std_integral(model, rho0, tau1, tau2, steps)
    in_window = integral <= math.pi / 2.0 + WINDOW_TOL
    measured = normalized_overlap(model, state0, tau1, tau2)
    return BoundReport(
        kind="fid-mt",
        lhs=measured,
        rhs=math.cos(integral),
        applicable=in_window,
        conditions=(("window_le_half_pi", in_window),),
        params={"tau1": tau1, "tau2": tau2, "integral": integral, "quad_err": err},
    )


def qsl_mt(
    model: NonHermitianModel, state0, tau1: float, tau2: float, steps: int = DEFAULT_QUAD_STEPS
) -> BoundReport:
    """Deviation-based speed limit: the integrated std bounds the Bures angle.

    Also emits the implied minimum time ``tau_min`` = angle / (time-averaged
    std) in the params.
    """
    rho0 = as_density_matrix(state0)
    integral, err = _generalized_std_integral(model, rho0, tau1, tau2, steps)
    raw1, tr1 = _evolved_density(model, rho0, tau1)
    raw2, tr2 = _evolved_density(model, rho0, tau2)
    angle = metrics.bures_angle(DensityOperator(raw1 / tr1), DensityOperator(raw2 / tr2))
    in_window = integral <= math.pi / 2.0 + WINDOW_TOL
    if integral > 0.0:
        tau_min = angle * (tau2 - tau1) / integral
    else:
        tau_min = 0.0 if angle == 0.0 else float("inf")
    return BoundReport(
        kind="qsl-mt",
        lhs=integral,
        rhs=angle,
        applicable=in_window,
        conditions=(("window_le_half_pi", in_window),),
        params={
            "tau1": tau1,
            "tau2": tau2,
            "quad_err": err,
            "tau_min": tau_min,
            "mean_std": integral / (tau2 - tau1) if tau2 > tau1 else 0.0,
        },
    )


def energy_time_check(
    model: NonHermitianModel, state0, t: float, observable, h: float = 1e-4
) -> BoundReport:
    """Energy-time relation: spread(C) * spread(generator) >= |d<C>/dt| / 2.

    The time derivative uses a centered finite difference with step ``h``,
    taken along the normalized trajectory.
    """
    if t < h:
        raise BadParameter("need t >= h for the centered difference")
    obs = linalg.require_hermitian(observable, "observable")
    rho0 = as_density_matrix(state0)

    def stats_at(tt: float):
        raw, tr = _evolved_density(model, rho0, tt)
        return raw / tr

    rho_t = stats_at(t)
    s_c = metrics.observable_stats(obs, DensityOperator(rho_t))
    gen = model.full_generator(t)
    second = float(np.trace(linalg.dag(gen) @ gen @ rho_t).real)
    mean = complex(np.trace(gen @ rho_t))
    std_gen = math.sqrt(max(second - abs(mean) ** 2, 0.0))
    mean_plus = metrics.observable_stats(obs, DensityOperator(stats_at(t + h))).mean
    mean_minus = metrics.observable_stats(obs, DensityOperator(stats_at(t - h))).mean
    deriv = (mean_plus - mean_minus) / (2.0 * h)
    return BoundReport(
        kind="energy-time",
        lhs=s_c.std * std_gen,
        rhs=abs(deriv) / 2.0,
        applicable=True,
        conditions=(),
        params={"t": t, "fd_step": h, "observable_std": s_c.std, "generator_std": std_gen,
                "mean_derivative": deriv},
    )


def tur_mt(
    model: NonHermitianModel,
    state0,
    tau1: float,
    tau2: float,
    observable,
    steps: int = DEFAULT_QUAD_STEPS,
    fd_step: float = 1e-4,
) -> BoundReport:
    """Deviation-based scaled-variance inequality tan^2(integral) >= ratio^2.

    Requires the integral strictly inside the pi/2 window.  The short-time
    energy-time variant evaluated at tau2 is attached under
    ``params["energy_time"]`` whenever tau2 >= fd_step.
    """
    obs = linalg.require_hermitian(observable, "observable")
    rho0 = as_density_matrix(state0)
    integral, err = _generalized_std_integral(model, rho0, tau1, tau2, steps)
    raw1, tr1 = _evolved_density(model, rho0, tau1)
    raw2, tr2 = _evolved_density(model, rho0, tau2)
    ratio_sq, stats = _scaled_ratio_sq(obs, raw1 / tr1, raw2 / tr2)
    in_window = integral < math.pi / 2.0
    lhs = math.tan(integral) ** 2 if in_window else float("inf")
    params = {"tau1": tau1, "tau2": tau2, "quad_err": err, "integral": integral}
    params.update(stats)
    if tau2 >= fd_step:
        et = energy_time_check(model, state0, tau2, obs, h=fd_step)
        params["energy_time"] = {"lhs": et.lhs, "rhs": et.rhs, "slack": et.slack}
    return BoundReport(
        kind="tur-mt",
        lhs=lhs,
        rhs=ratio_sq,
        applicable=in_window,
        conditions=(("window_lt_half_pi", in_window),),
        params=params,
    )


# ---------------------------------------------------------------------------
# open system (continuous measurement)


def dynamical_activity(model: LindbladModel, state0) -> float:
    """Expected jump rate Tr[sum L^dag L rho] in the given state."""
    rho = as_density_matrix(state0)
    return _expectation(model.jump_rate_operator(), rho)


def open_overlap(model: LindbladModel, state0, tau: float) -> float:
    """|<Psi(0)|Psi(tau)>| of the measurement record state: |Tr[M rho0]|
    with M the no-jump propagator exp(-i H_eff tau)."""
    rho0 = as_density_matrix(state0)
    m = linalg.expm(-1j * tau * model.effective_hamiltonian())
    return abs(complex(np.trace(m @ rho0)))


def _open_ml_ingredients(model: LindbladModel, state0, tau: float) -> dict:
    rate_op = model.jump_rate_operator()
    norm, ok = commutator_check(model.h_s, 0.5 * (rate_op + linalg.dag(rate_op)))
    if not ok:
        raise CommutatorViolation(
            f"[H_S, sum L^dag L] norm {norm:.3e} exceeds tolerance"
        )
    if tau < 0:
        raise BadParameter("tau must be nonnegative")
    rho0 = as_density_matrix(state0)
    activity = _expectation(rate_op, rho0)
    mean_h = _expectation(model.h_s, rho0)
    e_g = ground_energy(model.h_s)
    floor = math.exp(-0.5 * activity * tau) - tau * (mean_h - e_g)
    return {
        "rho0": rho0,
        "tau": tau,
        "activity": activity,
        "mean_h_s": mean_h,
        "ground_energy": e_g,
        "floor": floor,
        "commutator_norm": norm,
    }


def ml_fidelity_bound_open(model: LindbladModel, state0, tau: float) -> float:
    """Open-system mean-based floor exp(-activity*tau/2) - tau(<H_S> - E_g).

    Requires H_S to commute with the jump-rate operator (satisfied by the
    dephasing model, the refrigerator, and every classical embedding).
    """
    return _open_ml_ingredients(model, state0, tau)["floor"]


def fid_ml_open(model: LindbladModel, state0, tau: float) -> BoundReport:
    """Measured record-state overlap against the open mean-based floor."""
    ing = _open_ml_ingredients(model, state0, tau)
    measured = open_overlap(model, state0, tau)
    params = {k: v for k, v in ing.items() if k != "rho0"}
    return BoundReport(
        kind="fid-ml-open",
        lhs=measured,
        rhs=ing["floor"],
        applicable=True,
        conditions=(
            ("commuting_hs_jumps", True),
            ("floor_positive", ing["floor"] > 0.0),
        ),
        params=params,
    )


def qsl_ml_open(model: LindbladModel, state0, tau: float) -> BoundReport:
    """Open mean-based speed limit against the Bures angle of the Lindblad
    endpoints (the averaged, unconditioned evolution)."""
    ing = _open_ml_ingredients(model, state0, tau)
    rho_tau = evolve_lindblad(model, DensityOperator(ing["rho0"]), tau)
    angle = metrics.bures_angle(DensityOperator(ing["rho0"]), rho_tau)
    lhs = 1.0 - ing["floor"]
    rhs = 2.0 * math.sin(angle / 2.0) ** 2
    params = {k: v for k, v in ing.items() if k != "rho0"}
    params["bures_angle"] = angle
    return BoundReport(
        kind="qsl-ml-open",
        lhs=lhs,
        rhs=rhs,
        applicable=True,
        conditions=(
            ("commuting_hs_jumps", True),
            ("floor_positive", ing["floor"] > 0.0),
        ),
        params=params,
    )


def _jump_count_ratio_sq(
    model: LindbladModel, state0, tau: float, spec: JumpCountObservable
) -> tuple[float, dict]:
    if spec.n_trajectories < 1:
        raise BadParameter("jump-count statistics need at least one trajectory")
    ens = trajectory_ensemble(
        model,
        state0,
        tau,
        spec.n_trajectories,
        spec.seed,
        dt_max=spec.dt_max,
        sample_times=[tau],
    )
    counts = ens.jump_counts.astype(float)
    mean = float(counts.mean())
    var = float(counts.var(ddof=1)) if counts.size > 1 else 0.0
    if var <= 0.0:
        ratio_sq = 0.0 if abs(mean) <= 1e-14 else float("inf")
    else:
        ratio_sq = mean**2 / var
    n = counts.size
    se_mean = math.sqrt(var / n) if n > 1 else 0.0
    info = {
        "mc": {
            "n_trajectories": n,
            "mean": mean,
            "var": var,
            "stderr_mean": se_mean,
            "stderr_var": var * math.sqrt(2.0 / (n - 1)) if n > 1 else 0.0,
            "seed": spec.seed,
        }
    }
    return ratio_sq, info


def _open_ratio_sq(model: LindbladModel, state0, tau: float, observable):
    rho0 = as_density_matrix(state0)
    if isinstance(observable, JumpCountObservable):
        return _jump_count_ratio_sq(model, state0, tau, observable)
    obs = linalg.require_hermitian(observable, "observable")
    rho_tau = evolve_lindblad(model, DensityOperator(rho0), tau)
    return _scaled_ratio_sq(obs, rho0, rho_tau.matrix)


def tur_ml_open(model: LindbladModel, state0, tau: float, observable) -> BoundReport:
    """Open mean-based scaled-variance inequality 1/floor^2 - 1 >= ratio^2.

    ``observable`` is either a Hermitian system operator (statistics from
    the Lindblad state) or :class:`JumpCountObservable` (statistics from a
    trajectory ensemble, with Monte Carlo error bars attached).  For
    classical embeddings (H_S = 0) the lhs reduces to
    exp(activity * tau) - 1; that specialized value is attached in params.
    """
    ing = _open_ml_ingredients(model, state0, tau)
    floor = ing["floor"]
    positive = floor > 0.0
    ratio_sq, stats = _open_ratio_sq(model, state0, tau, observable)
    lhs = (1.0 / floor**2 - 1.0) if floor != 0.0 else float("inf")
    params = {k: v for k, v in ing.items() if k != "rho0"}
    params.update(stats)
    if linalg.max_abs(model.h_s) <= 1e-12:
        params["classical_form_lhs"] = math.expm1(ing["activity"] * tau)
    return BoundReport(
        kind="tur-ml-open",
        lhs=lhs,
        rhs=ratio_sq,
        applicable=positive,
        conditions=(
            ("commuting_hs_jumps", True),
            ("floor_positive", positive),
        ),
        params=params,
    )


def _no_jump_std_integral(
    model: LindbladModel, rho0: np.ndarray, tau: float, steps: int
) -> tuple[float, float]:
    """Integral of the H_eff standard deviation along the no-jump state.

    The no-jump conditioned state is exactly the normalized trajectory of
    the equivalent non-Hermitian model, so the closed-system quadrature is
    reused with the full (non-Hermitian) effective generator.
    """
    return _generalized_std_integral(model.no_jump_model(), rho0, 0.0, tau, steps)


def mt_fidelity_bound_open(
    model: LindbladModel, state0, tau: float, steps: int = DEFAULT_QUAD_STEPS
) -> float:
    """Open deviation-based floor sqrt(Z(tau)) * cos(integrated H_eff std)."""
    rho0 = as_density_matrix(state0)
    integral, _ = _no_jump_std_integral(model, rho0, tau, steps)
    z = no_jump_state(model, DensityOperator(rho0), tau).weight
    return math.sqrt(z) * math.cos(integral)


def fid_mt_open(
    model: LindbladModel, state0, tau: float, steps: int = DEFAULT_QUAD_STEPS
) -> BoundReport:
    """Measured record-state overlap against the open deviation-based floor."""
    rho0 = as_density_matrix(state0)
    integral, err = _no_jump_std_integral(model, rho0, tau, steps)
    z = no_jump_state(model, DensityOperator(rho0), tau).weight
    in_window = integral <= math.pi / 2.0 + WINDOW_TOL
    return BoundReport(
        kind="fid-mt-open",
        lhs=open_overlap(model, state0, tau),
        rhs=math.sqrt(z) * math.cos(integral),
        applicable=in_window,
        conditions=(("window_le_half_pi", in_window),),
        params={"tau": tau, "integral": integral, "survival_weight": z, "quad_err": err},
    )


def qsl_mt_open(
    model: LindbladModel, state0, tau: float, steps: int = DEFAULT_QUAD_STEPS
) -> BoundReport:
    """Open deviation-based speed limit.

    lhs is the integrated no-jump H_eff std; rhs is
    arccos(sqrt(Fid(rho_S(0), rho_S(tau)) / Z(tau))), defined only while the
    fidelity does not exceed the survival weight.  Outside that domain the
    report is flagged inapplicable and rhs is NaN.  The underlying
    pre-monotonicity rhs (arccos of the normalized no-jump overlap) is
    always attached in params.
    """
    rho0 = as_density_matrix(state0)
    integral, err = _no_jump_std_integral(model, rho0, tau, steps)
    z = no_jump_state(model, DensityOperator(rho0), tau).weight
    fid = metrics.fidelity(DensityOperator(rho0), evolve_lindblad(model, DensityOperator(rho0), tau))
    ratio = fid / z
    fid_ok = ratio <= 1.0 + 1e-10
    rhs = float(np.arccos(np.clip(math.sqrt(min(ratio, 1.0)), 0.0, 1.0))) if fid_ok else float("nan")
    raw_overlap = open_overlap(model, state0, tau) / math.sqrt(z)
    underlying = float(np.arccos(np.clip(raw_overlap, 0.0, 1.0)))
    return BoundReport(
        kind="qsl-mt-open",
        lhs=integral,
        rhs=rhs,
        applicable=fid_ok,
        conditions=(("fid_le_z", fid_ok),),
        params={
            "tau": tau,
            "survival_weight": z,
            "fidelity": fid,
            "quad_err": err,
            "underlying_rhs": underlying,
        },
    )


def tur_mt_open(
    model: LindbladModel,
    state0,
    tau: float,
    observable,
    steps: int = DEFAULT_QUAD_STEPS,
) -> BoundReport:
    """Open deviation-based scaled-variance inequality.

    lhs = 1 / (Z(tau) cos^2(integral)) - 1.  System-operator statistics are
    taken against the Lindblad state (the record-state convention); the
    pseudo-state alternative is noted in params.  Jump-count statistics work
    as in :func:`tur_ml_open`.
    """
    rho0 = as_density_matrix(state0)
    integral, err = _no_jump_std_integral(model, rho0, tau, steps)
    z = no_jump_state(model, DensityOperator(rho0), tau).weight
    in_window = integral < math.pi / 2.0
    lhs = (1.0 / (z * math.cos(integral) ** 2) - 1.0) if in_window else float("inf")
    ratio_sq, stats = _open_ratio_sq(model, state0, tau, observable)
    params = {
        "tau": tau,
        "integral": integral,
        "survival_weight": z,
        "quad_err": err,
        "observable_convention": "lindblad-state",
    }
    params.update(stats)
    return BoundReport(
        kind="tur-mt-open",
        lhs=lhs,
        rhs=ratio_sq,
        applicable=in_window,
        conditions=(("window_lt_half_pi", in_window),),
        params=params,
    )


# ---------------------------------------------------------------------------
# classical Markov special case


def qsl_classical(chain: ClassicalMarkovModel, tau: float) -> BoundReport:
    """Classical speed limit: activity * tau >= D_{1/2}(P(0) || P(tau))."""
    if tau < 0:
        raise BadParameter("tau must be nonnegative")
    p_tau = chain.propagate(tau)
    activity = chain.activity()
    div = metrics.renyi_half(chain.p0 / chain.p0.sum(), p_tau / p_tau.sum())
    return BoundReport(
        kind="qsl-classical",
        lhs=activity * tau,
        rhs=div,
        applicable=True,
        conditions=(),
        params={"tau": tau, "activity": activity},
    )


def tur_classical(chain: ClassicalMarkovModel, tau: float, observable) -> BoundReport:
    """Classical scaled-variance inequality exp(activity * tau) - 1 >= ratio^2.

    ``observable`` is a real vector of per-state values; moments are taken
    against P(0) and P(tau).
    """
    c = np.asarray(observable, dtype=float).reshape(-1)
    if c.size != chain.n_states:
        raise BadParameter("observable length differs from the state count")
    p0 = chain.p0 / chain.p0.sum()
    pt = chain.propagate(tau)
    pt = pt / pt.sum()

    def stats(p):
        mean = float(c @ p)
        var = max(float((c**2) @ p) - mean**2, 0.0)
        return mean, math.sqrt(var)

    m0, s0 = stats(p0)
    mt, st = stats(pt)
    dm, ds = mt - m0, st + s0
    if ds <= 0.0:
        if abs(dm) <= 1e-14:
            ratio_sq = 0.0
        else:
            raise DegenerateObservable("zero spread at both times with distinct means")
    else:
        ratio_sq = (dm / ds) ** 2
    activity = chain.activity()
    return BoundReport(
        kind="tur-classical",
        lhs=math.expm1(activity * tau),
        rhs=ratio_sq,
        applicable=True,
        conditions=(),
        params={
            "tau": tau,
            "activity": activity,
            "mean_start": m0,
            "mean_end": mt,
            "std_start": s0,
            "std_end": st,
        },
    )

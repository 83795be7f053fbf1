"""Batch front end: bound sweeps, trajectory experiments, model emission.

Subcommands:

* ``check``: evaluate bound families on a time grid, write one CSV row per
  (t, bound kind) plus a JSON summary.  Exit status 0 iff every applicable
  row satisfies its inequality within tolerance.
* ``trajectory``: run a quantum-jump ensemble, write per-trajectory jump
  counts plus a summary comparing the ensemble mean against the Lindblad
  solution.
* ``models``: construct a built-in model and emit its JSON description.

Outputs are deterministic for a fixed configuration and master seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bounds as bnd
from . import serialize
from .errors import SimulationError
from .models import (
    ClassicalMarkovModel,
    classical_initial_density,
    make_classical,
    make_dephasing,
    make_refrigerator,
    random_commuting,
)
from .propagation import LindbladModel, NonHermitianModel, evolve_lindblad, trajectory_ensemble
from .states import DensityOperator, StateVector

GROUPS = {
    "ml": ("fid-ml", "qsl-ml", "qsl-ml-simple", "tur-ml"),
    "mt": ("fid-mt", "qsl-mt", "tur-mt", "energy-time"),
    "ml-open": ("fid-ml-open", "qsl-ml-open", "tur-ml-open"),
    "mt-open": ("fid-mt-open", "qsl-mt-open", "tur-mt-open"),
    "classical": ("qsl-classical", "tur-classical"),
}

CSV_COLUMNS = ["t", "bound", "lhs", "rhs", "slack", "applicable", "cond_failures", "quad_err"]


@dataclass
class ExperimentConfig:
    """Validated sweep configuration."""

    model: object
    initial: object
    groups: list[str]
    times: list[float]
    window: tuple[float, float] | None
    observable: object
    quad_steps: int
    fd_step: float
    n_traj: int
    seed: int
    dt_max: float | None
    out: Path
    echo: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.times or any(t <= 0 for t in self.times):
            raise SimulationError("time grid must be strictly positive")
        if sorted(self.times) != list(self.times):
            raise SimulationError("time grid must be ordered")
        if isinstance(self.observable, bnd.JumpCountObservable) and self.n_traj < 1:
            raise SimulationError("trajectory-backed observable needs --n-traj >= 1")


def _parse_scalar(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _parse_builtin(spec: str):
    """``builtin:name?key=value&key=value`` -> (model, initial or None)."""
    body = spec.split(":", 1)[1]
    name, _, query = body.partition("?")
    params: dict = {}
    if query:
        for item in query.split("&"):
            key, _, value = item.partition("=")
            params[key.replace("-", "_")] = _parse_scalar(value)
    if name == "dephasing":
        return make_dephasing(float(params.get("gamma", 1.0))), None
    if name == "refrigerator":
        return (
            make_refrigerator(
                float(params.get("gamma", 1.0)),
                float(params.get("omega1", 1.0)),
                float(params.get("omega2", 1.0)),
                float(params.get("beta1", 1.0)),
                float(params.get("beta2", 1.0)),
                float(params.get("beta3", 1.0)),
            ),
            None,
        )
    if name == "classical":
        rates = np.asarray(params["rates"], dtype=float)
        p0 = np.asarray(params["p0"], dtype=float)
        return ClassicalMarkovModel(rates, p0), None
    if name == "random-commuting":
        return (
            random_commuting(
                int(params.get("dim", 2)),
                int(params.get("seed", 0)),
                gamma_scale=float(params.get("gamma_scale", 1.0)),
                h_scale=float(params.get("h_scale", 1.0)),
            ),
            None,
        )
    raise SimulationError(f"unknown builtin model {name!r}")


def _load_model(spec: str):
    if spec.startswith("builtin:"):
        return _parse_builtin(spec)
    return serialize.load_model(spec)


def _parse_state(spec: str | None, model, initial):
    dim = model.n_states if isinstance(model, ClassicalMarkovModel) else model.dim
    if spec is None:
        if initial is not None:
            return initial
        if isinstance(model, ClassicalMarkovModel):
            return classical_initial_density(model)
        raise SimulationError("no initial state: pass --state or put one in the model JSON")
    if spec == "plus":
        return StateVector(np.ones(dim, dtype=complex) / math.sqrt(dim))
    if spec == "maxmixed":
        return DensityOperator(np.eye(dim, dtype=complex) / dim)
    if spec.startswith("basis:"):
        k = int(spec.split(":", 1)[1])
        amp = np.zeros(dim, dtype=complex)
        amp[k] = 1.0
        return StateVector(amp)
    if spec.startswith("{"):
        return serialize.state_from_json(json.loads(spec), dim)
    return serialize.state_from_json(json.loads(Path(spec).read_text()), dim)


def _parse_observable(spec: str | None, dim: int, n_traj: int, seed: int, dt_max):
    if spec is None or spec == f"proj:{dim - 1}" or spec == "proj:last":
        out = np.zeros((dim, dim), dtype=complex)
        out[dim - 1, dim - 1] = 1.0
        return out
    if spec.startswith("proj:"):
        k = int(spec.split(":", 1)[1])
        out = np.zeros((dim, dim), dtype=complex)
        out[k, k] = 1.0
        return out
    if spec.startswith("diag:"):
        vals = [float(x) for x in spec.split(":", 1)[1].split(",")]
        if len(vals) != dim:
            raise SimulationError(f"diag observable needs {dim} entries")
        return np.diag(vals).astype(complex)
    if spec == "jump-count":
        return bnd.JumpCountObservable(n_trajectories=n_traj, seed=seed, dt_max=dt_max)
    raise SimulationError(f"unknown observable spec {spec!r}")


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _report_row(t: float, report: bnd.BoundReport) -> dict:
    return {
        "t": _fmt(float(t)),
        "bound": report.kind,
        "lhs": _fmt(float(report.lhs)),
        "rhs": _fmt(float(report.rhs)),
        "slack": _fmt(float(report.slack)),
        "applicable": _fmt(report.applicable),
        "cond_failures": ";".join(report.failed_conditions()),
        "quad_err": _fmt(float(report.params["quad_err"])) if "quad_err" in report.params else "",
    }


def _sub_row(t: float, kind: str, sub: dict, quad_err=None) -> dict:
    lhs, rhs = float(sub["lhs"]), float(sub["rhs"])
    return {
        "t": _fmt(float(t)),
        "bound": kind,
        "lhs": _fmt(lhs),
        "rhs": _fmt(rhs),
        "slack": _fmt(lhs - rhs),
        "applicable": _fmt(bool(sub.get("applicable", True))),
        "cond_failures": "",
        "quad_err": _fmt(float(quad_err)) if quad_err is not None else "",
    }


def _rows_for_group(group: str, cfg: ExperimentConfig, t: float, window) -> list[dict]:
    model, state, obs = cfg.model, cfg.initial, cfg.observable
    t1, t2 = window if window else (0.0, t)
    rows: list[dict] = []
    if group == "ml":
        rows.append(_report_row(t, bnd.fid_ml(model, state, t)))
        q = bnd.qsl_ml(model, state, t)
        rows.append(_report_row(t, q))
        rows.append(_sub_row(t, "qsl-ml-simple", q.params["simple"]))
        if not isinstance(obs, bnd.JumpCountObservable):
            rows.append(_report_row(t, bnd.tur_ml(model, state, t, obs)))
    elif group == "mt":
        rows.append(_report_row(t2, bnd.fid_mt(model, state, t1, t2, cfg.quad_steps)))
        rows.append(_report_row(t2, bnd.qsl_mt(model, state, t1, t2, cfg.quad_steps)))
        if not isinstance(obs, bnd.JumpCountObservable):
            rep = bnd.tur_mt(model, state, t1, t2, obs, cfg.quad_steps, cfg.fd_step)
            rows.append(_report_row(t2, rep))
            if "energy_time" in rep.params:
                rows.append(
                    _sub_row(t2, "energy-time", rep.params["energy_time"])
                )
    elif group == "ml-open":
        rows.append(_report_row(t, bnd.fid_ml_open(model, state, t)))
        rows.append(_report_row(t, bnd.qsl_ml_open(model, state, t)))
        rows.append(_report_row(t, bnd.tur_ml_open(model, state, t, obs)))
    elif group == "mt-open":
        rows.append(_report_row(t, bnd.fid_mt_open(model, state, t, cfg.quad_steps)))
        rows.append(_report_row(t, bnd.qsl_mt_open(model, state, t, cfg.quad_steps)))
        rows.append(_report_row(t, bnd.tur_mt_open(model, state, t, obs, cfg.quad_steps)))
    elif group == "classical":
        chain = cfg.echo["chain"]
        rows.append(_report_row(t, bnd.qsl_classical(chain, t)))
        if not isinstance(obs, bnd.JumpCountObservable):
            rows.append(_report_row(t, bnd.tur_classical(chain, t, np.diag(obs).real)))
    return rows


def _run_check(args) -> int:
    model, initial = _load_model(args.model)
    chain = None
    if isinstance(model, ClassicalMarkovModel):
        chain = model
        state = _parse_state(args.state, model, initial)
        model = make_classical(chain)
        if args.state is None and initial is None:
            state = classical_initial_density(chain)
    else:
        state = _parse_state(args.state, model, initial)

    groups = [g.strip() for g in args.bounds.split(",") if g.strip()]
    for g in groups:
        if g not in GROUPS:
            raise SimulationError(f"unknown bound group {g!r}")
        if g in ("ml", "mt") and not isinstance(model, NonHermitianModel):
            raise SimulationError(f"bound group {g!r} needs a nonhermitian model")
        if g in ("ml-open", "mt-open") and not isinstance(model, LindbladModel):
            raise SimulationError(f"bound group {g!r} needs a lindblad or classical model")
        if g == "classical" and chain is None:
            raise SimulationError("bound group 'classical' needs a classical model")

    n = int(args.steps)
    if n < 1 or args.t_final <= 0:
        raise SimulationError("need --t-final > 0 and --steps >= 1")
    times = [args.t_final * (k + 1) / n for k in range(n)]
    window = None
    if args.tau1 is not None or args.tau2 is not None:
        if args.tau1 is None or args.tau2 is None or not 0 <= args.tau1 < args.tau2:
            raise SimulationError("--tau1/--tau2 must satisfy 0 <= tau1 < tau2")
        window = (args.tau1, args.tau2)

    dim = model.dim
    observable = _parse_observable(args.observable, dim, args.n_traj, args.seed, args.dt_max)
    cfg = ExperimentConfig(
        model=model,
        initial=state,
        groups=groups,
        times=times,
        window=window,
        observable=observable,
        quad_steps=args.quad_panels,
        fd_step=args.fd_step,
        n_traj=args.n_traj,
        seed=args.seed,
        dt_max=args.dt_max,
        out=Path(args.out),
        echo={"chain": chain, "argv": vars(args).copy()},
    )

    rows: list[dict] = []
    for t in cfg.times:
        for g in cfg.groups:
            rows.extend(_rows_for_group(g, cfg, t, None))
    if window is not None:
        for g in cfg.groups:
            if g == "mt":
                rows.extend(_rows_for_group(g, cfg, window[1], window))

    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    with open(cfg.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)

    violations = [
        r for r in rows
        if r["applicable"] == "true" and float(r["slack"]) < -bnd.SLACK_TOL
    ]
    per_kind: dict[str, dict] = {}
    for r in rows:
        entry = per_kind.setdefault(
            r["bound"], {"rows": 0, "applicable": 0, "min_slack": None}
        )
        entry["rows"] += 1
        if r["applicable"] == "true":
            entry["applicable"] += 1
            s = float(r["slack"])
            if entry["min_slack"] is None or s < entry["min_slack"]:
                entry["min_slack"] = s
    summary = {
        "model": args.model,
        "bounds": groups,
        "t_final": args.t_final,
        "steps": n,
        "quad_panels": args.quad_panels,
        "seed": args.seed,
        "rows": len(rows),
        "violations": violations,
        "per_bound": per_kind,
        "slack_tolerance": bnd.SLACK_TOL,
        "all_applicable_hold": not violations,
    }
    summary_path = cfg.out.with_suffix(".summary.json")
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True, default=str))
    print(f"wrote {len(rows)} rows to {cfg.out}; summary in {summary_path}")
    return 0 if not violations else 1


def _run_trajectory(args) -> int:
    model, initial = _load_model(args.model)
    if isinstance(model, ClassicalMarkovModel):
        chain = model
        model = make_classical(chain)
        state = _parse_state(args.state, chain, initial or classical_initial_density(chain))
    elif isinstance(model, LindbladModel):
        state = _parse_state(args.state, model, initial)
    else:
        raise SimulationError("trajectory needs a lindblad or classical model")
    if args.n_traj < 1:
        raise SimulationError("--n-traj must be at least 1")
    if args.t_final <= 0:
        raise SimulationError("--t-final must be positive")

    ens = trajectory_ensemble(
        model, state, args.t_final, args.n_traj, args.seed,
        dt_max=args.dt_max, sample_times=[args.t_final],
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["traj", "jumps"])
        for i, c in enumerate(ens.jump_counts):
            writer.writerow([i, int(c)])

    exact = evolve_lindblad(model, _as_density(state), args.t_final)
    dev = np.abs(ens.mean_states[0] - exact.matrix)
    se = np.sqrt(ens.stderr_real[0] ** 2 + ens.stderr_imag[0] ** 2)
    summary = {
        "n_trajectories": ens.n_trajectories,
        "t_final": args.t_final,
        "seed": args.seed,
        "dt": ens.dt,
        "n_steps": ens.n_steps,
        "mean_jump_count": ens.mean_jump_count(),
        "jump_count_std": ens.jump_count_std(),
        "jump_count_stderr": ens.jump_count_stderr(),
        "max_abs_deviation_from_lindblad": float(dev.max()),
        "max_entry_stderr": float(se.max()),
    }
    out.with_suffix(".summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
    print(f"wrote {ens.n_trajectories} trajectories to {out}")
    return 0


def _as_density(state) -> DensityOperator:
    if isinstance(state, DensityOperator):
        return state
    from .states import pure_density

    return pure_density(state)


def _run_models(args) -> int:
    name = args.name
    initial = None
    if name == "dephasing":
        model = make_dephasing(args.gamma)
    elif name == "refrigerator":
        model = make_refrigerator(
            args.gamma, args.omega1, args.omega2, args.beta1, args.beta2, args.beta3
        )
    elif name == "classical":
        if args.rates is None or args.p0 is None:
            raise SimulationError("classical model needs --rates and --p0")
        model = ClassicalMarkovModel(
            np.asarray(json.loads(args.rates), dtype=float),
            np.asarray(json.loads(args.p0), dtype=float),
        )
    elif name == "random-commuting":
        model = random_commuting(
            args.dim, args.seed, gamma_scale=args.gamma_scale, h_scale=args.h_scale
        )
    else:
        raise SimulationError(f"unknown builtin {name!r}")
    serialize.save_model(args.emit, model, initial)
    print(f"wrote {name} model to {args.emit}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nhbounds",
        description="Evaluate speed limits and uncertainty relations for "
        "non-Hermitian and continuously measured quantum dynamics.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    chk = sub.add_parser("check", help="run a bound sweep over a time grid")
    chk.add_argument("--model", required=True, help="model JSON path or builtin:name?k=v")
    chk.add_argument("--state", default=None, help="plus | maxmixed | basis:K | JSON")
    chk.add_argument("--bounds", default="ml,mt", help="comma list: ml,mt,ml-open,mt-open,classical")
    chk.add_argument("--t-final", type=float, required=True)
    chk.add_argument("--steps", type=int, required=True)
    chk.add_argument("--tau1", type=float, default=None)
    chk.add_argument("--tau2", type=float, default=None)
    chk.add_argument("--observable", default=None, help="proj:K | diag:a,b,... | jump-count")
    chk.add_argument("--quad-panels", type=int, default=bnd.DEFAULT_QUAD_STEPS)
    chk.add_argument("--fd-step", type=float, default=1e-4)
    chk.add_argument("--n-traj", type=int, default=2000)
    chk.add_argument("--seed", type=int, default=0)
    chk.add_argument("--dt-max", type=float, default=None)
    chk.add_argument("--out", required=True)
    chk.set_defaults(func=_run_check)

    trj = sub.add_parser("trajectory", help="sample a quantum-jump ensemble")
    trj.add_argument("--model", required=True)
    trj.add_argument("--state", default=None)
    trj.add_argument("--t-final", type=float, required=True)
    trj.add_argument("--n-traj", type=int, required=True)
    trj.add_argument("--seed", type=int, default=0)
    trj.add_argument("--dt-max", type=float, default=None)
    trj.add_argument("--out", required=True)
    trj.set_defaults(func=_run_trajectory)

    mdl = sub.add_parser("models", help="emit a built-in model as JSON")
    mdl.add_argument("name", choices=["dephasing", "refrigerator", "classical", "random-commuting"])
    mdl.add_argument("--gamma", type=float, default=1.0)
    mdl.add_argument("--omega1", type=float, default=1.0)
    mdl.add_argument("--omega2", type=float, default=1.0)
    mdl.add_argument("--beta1", type=float, default=1.0)
    mdl.add_argument("--beta2", type=float, default=1.0)
    mdl.add_argument("--beta3", type=float, default=1.0)
    mdl.add_argument("--rates", default=None, help="JSON rate matrix (classical)")
    mdl.add_argument("--p0", default=None, help="JSON initial distribution (classical)")
    mdl.add_argument("--dim", type=int, default=2)
    mdl.add_argument("--seed", type=int, default=0)
    mdl.add_argument("--gamma-scale", type=float, default=1.0)
    mdl.add_argument("--h-scale", type=float, default=1.0)
    mdl.add_argument("--emit", required=True)
    mdl.set_defaults(func=_run_models)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

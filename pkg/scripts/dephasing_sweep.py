#!/usr/bin/env python3
"""Sweep every open-system bound for the qubit dephasing model.

For dephasing the mean-based and deviation-based fidelity floors are both
exactly the record-state overlap e^(-gamma t / 2), so the fid-* rows are
equalities; the speed limits and uncertainty relations hold with positive
slack.  Writes a CSV next to this script unless --out is given.
"""

import argparse
import math
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from nhbounds import (  # noqa: E402
    StateVector,
    fid_ml_open,
    fid_mt_open,
    make_dephasing,
    qsl_ml_open,
    qsl_mt_open,
    tur_ml_open,
    tur_mt_open,
)
from nhbounds.cli import main as cli_main  # noqa: E402


def run(gamma: float, t_final: float, steps: int, out: str) -> int:
    model = make_dephasing(gamma)
    plus = StateVector(np.array([1.0, 1.0]) / math.sqrt(2.0))
    proj = np.diag([0.0, 1.0]).astype(complex)
    print(f"dephasing gamma={gamma}, |+> start; hbar = 1")
    print(f"{'t':>6} {'overlap':>10} {'ml floor':>10} {'mt floor':>10} "
          f"{'qsl-ml':>9} {'qsl-mt':>9} {'tur-ml':>9} {'tur-mt':>9}")
    for k in range(1, steps + 1):
        t = t_final * k / steps
        f_ml = fid_ml_open(model, plus, t)
        f_mt = fid_mt_open(model, plus, t)
        rows = (
            qsl_ml_open(model, plus, t),
            qsl_mt_open(model, plus, t),
            tur_ml_open(model, plus, t, proj),
            tur_mt_open(model, plus, t, proj),
        )
        def tag(r):
            return f"{r.slack:+.2e}" if r.applicable else "   vacuous"
        print(f"{t:6.2f} {f_ml.lhs:10.6f} {f_ml.rhs:10.6f} {f_mt.rhs:10.6f} "
              + " ".join(tag(r) for r in rows))
    return cli_main([
        "check", "--model", f"builtin:dephasing?gamma={gamma}", "--state", "plus",
        "--bounds", "ml-open,mt-open", "--t-final", str(t_final),
        "--steps", str(steps), "--out", out,
    ])


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gamma", type=float, default=1.0)
    ap.add_argument("--t-final", type=float, default=2.0)
    ap.add_argument("--steps", type=int, default=8)
    ap.add_argument("--out", default=str(Path(__file__).parent / "dephasing_sweep.csv"))
    args = ap.parse_args()
    sys.exit(run(args.gamma, args.t_final, args.steps, args.out))

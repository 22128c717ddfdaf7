"""Regenerate the frozen regression values under tests/golden/.

The benchmark setting has no externally published numbers to compare with,
so the pipeline's own outputs are frozen once and guarded against drift.
Run from the repository root:

    python scripts/make_goldens.py
"""

import json
from pathlib import Path

import numpy as np

from noisykerr import (OscillatorModel, choose_truncation, currents, g2_zero,
                       ness)
from noisykerr.config import resolve_config

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"


def ness_summary(omega, chi):
    cfg = resolve_config(preset="paper_fig1")
    noise = cfg.noise
    model = OscillatorModel(omega=omega, chi=chi)
    n_max = choose_truncation(model, noise, tail_tol=cfg.numerics["tail_tol"])
    dist = ness(model, noise, n_max=n_max)
    report = currents(model, noise, dist)
    return {
        "omega": omega,
        "chi": chi,
        "n_max": n_max,
        "mean_n": dist.mean_n(),
        "g2_0": g2_zero(dist),
        "i_cl": report.i_classical,
        "i_q": report.i_phonon,
        "i_d": report.i_detector,
    }


def sweep_row(chi, omegas):
    cfg = resolve_config(preset="paper_fig1")
    rows = []
    for omega in omegas:
        model = OscillatorModel(omega=omega, chi=chi)
        n_max = choose_truncation(model, cfg.noise)
        dist = ness(model, cfg.noise, n_max=n_max)
        rows.append({"omega": omega, "g2_0": g2_zero(dist),
                     "mean_n": dist.mean_n()})
    return {"chi": chi, "rows": rows}


def main():
    GOLDEN.mkdir(parents=True, exist_ok=True)
    payload = {
        "ness_omega5_chi3": ness_summary(5.0, 3.0),
        "ness_omega20_chi3": ness_summary(20.0, 3.0),
        "g2_line_chi3": sweep_row(3.0, [1.0, 2.0, 5.0, 10.0, 20.0, 30.0]),
    }
    for name, data in payload.items():
        path = GOLDEN / f"{name}.json"
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()

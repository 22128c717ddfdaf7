"""Bundled run configurations.

`paper_fig1` is the canonical three-bath setting: classical 1/f noise,
a cold super-Ohmic phonon bath and a flat wide-band detector, with
Γ_cl = 1e-3, Γ_q = 1e-6, Γ_D = 1e-3, s = 3, β = 10 and hard cutoffs
[0.01, 50] in units of the reference frequency.  `paper_fig3` is the same
setting without the phonon bath.
"""

import copy

_FIG1 = {
    "noise": {
        "omega_min": 0.01,
        "omega_max": 50.0,
        "components": [
            {"kind": "classical_1f", "gamma": 1e-3},
            {"kind": "superohmic", "gamma": 1e-6, "s": 3.0, "beta": 10.0},
            {"kind": "flat", "gamma": 1e-3, "beta": 10.0},
        ],
    },
    "oscillator": {"omega": 5.0, "chi": 3.0, "nonlinearity": "kerr"},
}

_FIG3 = {
    "noise": {
        "omega_min": 0.01,
        "omega_max": 50.0,
        "components": [
            {"kind": "classical_1f", "gamma": 1e-3},
            {"kind": "flat", "gamma": 1e-3, "beta": 10.0},
        ],
    },
    "oscillator": {"omega": 5.0, "chi": 3.0, "nonlinearity": "kerr"},
}

PRESETS = {"paper_fig1": _FIG1, "paper_fig3": _FIG3}


def preset_config(name):
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    return copy.deepcopy(PRESETS[name])

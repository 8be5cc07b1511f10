"""Named figure presets.

Each preset is a raw scenario document (same schema the CLI accepts) frozen
to the published caption parameters:

* fig1_*: double slit, t in [0, 2], rho0 = 5/8, u = -2, X = 2.5, 50
  quantile-spaced trajectories.  Quantum panel Logistic(15, 2), mesoscopic
  Logistic(0.5, 2), classical Logistic(40, 0).
* fig3_*: planar oscillator, k0 = 1, alpha = pi/2, t in [0, 35].  Quantum
  Logistic(1, 200), mesoscopic Logistic(16, 10) and Logistic(0.5, 4),
  classical Logistic(37, 0).
* fig4 / fig5: quantum-potential field maps (double slit over x and t,
  oscillator over the plane) with a small trajectory overlay run.
* fig6 / fig7 / fig8: Coulomb system over t in [0, 2500]; classical orbits,
  guidance orbits with a field map, and the slow transition with b = 0.014
  (the source prints the decimal-comma "b=0,014").  The transition midpoint
  t0 is not stated there; 1250 centres it in the run.

Trajectory counts for figures 3 and 6-8 are not stated either; the presets
use the counts visible in the plots (4 and 3) and any count can be
overridden through ``ensemble.n``.
"""

import json
import math

from .errors import ConfigurationError
from .scenario import ScenarioConfig, build_scenario

_OSC_STARTS = [[0.5, 0.0], [1.0, 0.0], [1.5, 0.0], [2.0, 0.0]]
_HYD_STARTS = [[4.0, 0.0, 0.0], [0.0, 5.0, 1.0], [-5.0, -2.0, -1.0]]


def _ds(b, t0):
    return {
        "system": {"type": "double_slit"},
        "mode": "transition",
        "coupling": {"type": "logistic", "b": b, "t0": t0},
        "ensemble": {"mode": "quantile_1d", "n": 50, "seed": 0},
        "time": {"start": 0.0, "end": 2.0, "n_outputs": 41},
    }


def _osc(b, t0):
    return {
        "system": {"type": "oscillator_2d", "k0": 1.0},
        "mode": "transition",
        "coupling": {"type": "logistic", "b": b, "t0": t0},
        "ensemble": {"mode": "fixed", "positions": _OSC_STARTS},
        "time": {"start": 0.0, "end": 35.0, "n_outputs": 351},
    }


def _hyd(mode, coupling=None):
    doc = {
        "system": {"type": "hydrogen", "n": 2, "l": 1, "m": 1},
        "mode": mode,
        "ensemble": {"mode": "fixed", "positions": _HYD_STARTS},
        "time": {"start": 0.0, "end": 2500.0, "n_outputs": 2501},
    }
    if coupling is not None:
        doc["coupling"] = coupling
    return doc


def _presets():
    fig4 = {
        "system": {"type": "double_slit"},
        "mode": "guidance",
        "ensemble": {"mode": "quantile_1d", "n": 9, "seed": 0},
        "time": {"start": 0.0, "end": 2.5, "n_outputs": 51},
        "output": {
            "field": {"quantity": "Q", "xlim": [-8.0, 8.0], "ylim": [0.0, 2.5],
                      "nx": 201, "ny": 161},
        },
    }
    fig5 = {
        "system": {"type": "oscillator_2d", "k0": 1.0, "alpha": math.pi / 2.0},
        "mode": "guidance",
        "ensemble": {"mode": "fixed", "positions": _OSC_STARTS},
        "time": {"start": 0.0, "end": 2.0 * math.pi, "n_outputs": 129},
        "output": {
            "field": {"quantity": "Q", "xlim": [-3.0, 3.0], "ylim": [-3.0, 3.0],
                      "nx": 201, "ny": 201, "t": 0.0},
        },
    }
    fig7 = _hyd("guidance")
    fig7["output"] = {
        "field": {"quantity": "Q", "xlim": [-12.0, 12.0], "ylim": [-12.0, 12.0],
                  "nx": 201, "ny": 201, "t": 0.0, "plane": "xy", "offset": 0.0},
    }
    return {
        "fig1_quantum": _ds(15.0, 2.0),
        "fig1_meso_a": _ds(0.5, 2.0),
        "fig1_classical": _ds(40.0, 0.0),
        "fig3_quantum": _osc(1.0, 200.0),
        "fig3_meso_a": _osc(16.0, 10.0),
        "fig3_meso_b": _osc(0.5, 4.0),
        "fig3_classical": _osc(37.0, 0.0),
        "fig4": fig4,
        "fig5": fig5,
        "fig6": _hyd("classical"),
        "fig7": fig7,
        "fig8": _hyd("transition", {"type": "logistic", "b": 0.014, "t0": 1250.0}),
    }


_ALIASES = {"fig1": "fig1_quantum", "fig3": "fig3_quantum"}


def preset_names() -> list:
    """All accepted preset names, aliases included."""
    return sorted(_presets().keys() | _ALIASES.keys())


def preset_doc(name: str) -> dict:
    """Raw scenario document for a preset (deep copy, safe to mutate)."""
    table = _presets()
    canonical = _ALIASES.get(name, name)
    if canonical not in table:
        raise ConfigurationError(
            f"unknown preset {name!r} (known: {', '.join(preset_names())})", path="preset"
        )
    return json.loads(json.dumps(table[canonical]))


def preset(name: str) -> ScenarioConfig:
    """Resolved ScenarioConfig for a named figure preset."""
    return build_scenario(preset_doc(name), name=name)

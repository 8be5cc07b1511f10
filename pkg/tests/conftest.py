"""Shared fixtures.

The session-scoped warm-up drives every jit kernel once so tests that assert
wall-clock budgets never pay compilation inside the timed block.
"""
import numpy as np
import pytest

import qctrans as qt

_START = {"double_slit": [0.5], "oscillator_2d": [1.0, 0.0], "hydrogen": [4.0, 0.0, 0.0]}


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    tg = np.linspace(0.0, 0.01, 3)
    rk4 = qt.IntegratorConfig(method="rk4_fixed", dt=0.005)
    for kind, x0 in _START.items():
        sys = qt.make_system(kind)
        x = np.asarray(x0, dtype=float)
        qt.integrate_guidance(sys, x0, tg)
        qt.integrate_guidance(sys, x0, tg, use_closed=False)
        v0 = qt.velocity_grad_s(sys, x, 0.0)
        qt.integrate_transition(sys, qt.Logistic(1.0, 0.005), (x0, v0), tg)
        qt.integrate_transition(sys, qt.Constant(0.5), (x0, v0), tg, integrator=rk4)
        qt.quantum_potential(sys, x, 0.0)
        qt.velocity_current(sys, x, 0.0)
        qt.sample_positions(sys, qt.SamplerConfig(mode="rejection", n=4, seed=0))

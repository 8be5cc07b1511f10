"""Numeric field operators: density, guidance velocity, quantum potential.

Operators accept either a :class:`~qctrans.systems.WaveField` (dispatched to
the compiled kernels) or any callable ``psi(x, t) -> complex`` taking a
position vector, which runs through the same centred-difference formulas in
plain Python.  Both routes share the stencil contract:

* velocity from the phase gradient uses centre-referenced phase increments,
  so each half-stencil difference stays on the principal branch;
* Q = -lap|psi| / (2 |psi|) by second central differences;
* Richardson extrapolation (h and 2h) is applied when enabled;
* points with density below ``min_rho`` raise :class:`NodeProximityError`.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidParameterError, NodeProximityError
from .systems import WaveField


@dataclass(frozen=True)
class StencilConfig:
    h: float = 1e-4
    richardson: bool = True
    min_rho: float = 1e-12

    def __post_init__(self):
        if not (isinstance(self.h, (int, float)) and math.isfinite(self.h) and self.h > 0):
            raise InvalidParameterError(f"stencil h must be > 0, got {self.h!r}")
        if not (isinstance(self.min_rho, (int, float)) and self.min_rho >= 0):
            raise InvalidParameterError(f"min_rho must be >= 0, got {self.min_rho!r}")


DEFAULT_STENCIL = StencilConfig()


def _point(x):
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size < 1 or x.size > 3:
        raise InvalidParameterError(f"position must have 1..3 components, got {x.size}")
    return x


def _pad3(x):
    out = np.zeros(3)
    out[: x.size] = x
    return out


def _guard(rho, x, t, min_rho):
    if not (rho >= min_rho and math.isfinite(rho)):
        raise NodeProximityError(
            f"density {rho:.3e} below node guard {min_rho:.3e}", point=np.array(x), t=t
        )


def _raise_guarded(x, t, min_rho):
    raise NodeProximityError(
        f"field evaluation guarded near a node/singular set (min_rho {min_rho:.3e})",
        point=np.array(x), t=t,
    )


def density(psi, x, t):
    """|psi(x, t)|^2 at a single point."""
    x = _point(x)
    if isinstance(psi, WaveField):
        p = _pad3(x)
        psi._check_t(t)
        return kernels.density(psi.sys_id, psi._par, p[0], p[1], p[2], float(t))
    w = psi(x, float(t))
    return (w * w.conjugate()).real


def velocity_grad_s(psi, x, t, stencil: StencilConfig | None = None):
    """Guidance velocity u = grad(S) from the wavefunction phase."""
    st = stencil or DEFAULT_STENCIL
    x = _point(x)
    if isinstance(psi, WaveField):
        psi._check_t(t)
        p = _pad3(x)
        out = np.zeros(3)
        rc = kernels.velocity_grad_s(
            psi.sys_id, psi._par, psi.dim, p[0], p[1], p[2], float(t),
            st.h, st.richardson, st.min_rho, out,
        )
        if rc != 0:
            _raise_guarded(x, t, st.min_rho)
        return out[: psi.dim].copy()
    return _callable_velocity_grad_s(psi, x, float(t), st)


def _callable_velocity_grad_s(psi, x, t, st):
    pc = psi(x, t)
    rho = abs(pc) ** 2
    _guard(rho, x, t, st.min_rho)
    cc = pc.conjugate()
    out = np.zeros(x.size)
    for ax in range(x.size):
        def ph(d):
            xp = x.copy()
            xp[ax] += d
            return cmath.phase(psi(xp, t) * cc)

        d1 = (ph(st.h) - ph(-st.h)) / (2.0 * st.h)
        if st.richardson:
            d2 = (ph(2.0 * st.h) - ph(-2.0 * st.h)) / (4.0 * st.h)
            out[ax] = (4.0 * d1 - d2) / 3.0
        else:
            out[ax] = d1
    return out


def velocity_current(psi, x, t, stencil: StencilConfig | None = None):
    """Velocity from the probability current, u = Im(psi* grad psi)/|psi|^2."""
    st = stencil or DEFAULT_STENCIL
    x = _point(x)
    if isinstance(psi, WaveField):
        psi._check_t(t)
        p = _pad3(x)
        out = np.zeros(3)
        rc = kernels.velocity_current(
            psi.sys_id, psi._par, psi.dim, p[0], p[1], p[2], float(t),
            st.h, st.richardson, st.min_rho, out,
        )
        if rc != 0:
            _raise_guarded(x, t, st.min_rho)
        return out[: psi.dim].copy()
    pc = psi(x, float(t))
    rho = abs(pc) ** 2
    _guard(rho, x, t, st.min_rho)
    cc = pc.conjugate()
    out = np.zeros(x.size)
    for ax in range(x.size):
        def dpsi(d):
            xp = x.copy()
            xp[ax] += d
            return psi(xp, float(t))

        d1 = (cc * (dpsi(st.h) - dpsi(-st.h))).imag / (2.0 * st.h)
        if st.richardson:
            d2 = (cc * (dpsi(2.0 * st.h) - dpsi(-2.0 * st.h))).imag / (4.0 * st.h)
            out[ax] = (4.0 * d1 - d2) / (3.0 * rho)
        else:
            out[ax] = d1 / rho
    return out


def quantum_potential(psi, x, t, stencil: StencilConfig | None = None):
    """Q = -lap(R)/(2R), R = |psi|, by second central differences."""
    st = stencil or DEFAULT_STENCIL
    x = _point(x)
    if isinstance(psi, WaveField):
        psi._check_t(t)
        p = _pad3(x)
        q, rc = kernels.quantum_potential(
            psi.sys_id, psi._par, psi.dim, p[0], p[1], p[2], float(t),
            st.h, st.richardson, st.min_rho,
        )
        if rc != 0:
            _raise_guarded(x, t, st.min_rho)
        return q
    return _callable_qpot(psi, x, float(t), st)


def _callable_qpot(psi, x, t, st):
    r0 = abs(psi(x, t))
    _guard(r0 * r0, x, t, st.min_rho)

    def lap(h):
        acc = 0.0
        for ax in range(x.size):
            xp = x.copy()
            xp[ax] += h
            xm = x.copy()
            xm[ax] -= h
            acc += abs(psi(xp, t)) + abs(psi(xm, t)) - 2.0 * r0
        return acc / (h * h)

    q1 = -0.5 * lap(st.h) / r0
    if st.richardson:
        q2 = -0.5 * lap(2.0 * st.h) / r0
        return (4.0 * q1 - q2) / 3.0
    return q1


def qpot_gradient(psi, x, t, stencil: StencilConfig | None = None):
    """grad Q by centred differences of Q with outer step 2h."""
    st = stencil or DEFAULT_STENCIL
    x = _point(x)
    if isinstance(psi, WaveField):
        psi._check_t(t)
        p = _pad3(x)
        out = np.zeros(3)
        rc = kernels.grad_quantum_potential(
            psi.sys_id, psi._par, psi.dim, p[0], p[1], p[2], float(t),
            st.h, st.richardson, st.min_rho, out,
        )
        if rc != 0:
            _raise_guarded(x, t, st.min_rho)
        return out[: psi.dim].copy()
    d = 2.0 * st.h
    out = np.zeros(x.size)
    for ax in range(x.size):
        xp = x.copy()
        xp[ax] += d
        xm = x.copy()
        xm[ax] -= d
        out[ax] = (_callable_qpot(psi, xp, float(t), st) - _callable_qpot(psi, xm, float(t), st)) / (2.0 * d)
    return out


def force(system: WaveField, coupling, x, t, stencil: StencilConfig | None = None,
          use_closed: bool = True):
    """Transition force -grad(V + P(t) Q) at a single point.

    ``use_closed`` selects the analytic grad-Q route when the system has one;
    the numeric stencil route is used otherwise (and always for the
    double slit).
    """
    st = stencil or DEFAULT_STENCIL
    x = _point(x)
    system._check_t(t)
    p = _pad3(x)
    out = np.zeros(3)
    scratch = np.zeros(3)
    c0, c1 = coupling._packed()
    rc = kernels.force(
        system.sys_id, system._par, system.dim, coupling._kind, c0, c1,
        p[0], p[1], p[2], float(t), st.h, st.richardson, st.min_rho,
        bool(use_closed), out, scratch,
    )
    if rc != 0:
        _raise_guarded(x, t, st.min_rho)
    return out[: system.dim].copy()

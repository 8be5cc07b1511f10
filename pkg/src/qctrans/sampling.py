"""Initial-condition sampling from |psi(. , t_start)|^2.

Two samplers:

* ``quantile_1d`` -- deterministic inverse-CDF placement at the midpoint
  levels (k - 1/2)/n; 1D systems only.  The CDF comes from composite Simpson
  quadrature on a symmetric interval, inverted by bisection.
* ``rejection`` -- seeded rejection sampling inside a bounding box under a
  constant envelope (grid-scanned density maximum times a safety margin).
  The stream is a counter-based Philox generator, so runs are reproducible
  across platforms; spawned substreams keep resampling independent of the
  main proposal stream.

A third mode, ``fixed``, passes explicit start positions through (velocities
optional), which is how figure-style runs pin their starting points.

Initial velocities are the phase gradient grad S at t_start.  Positions that
land inside the node guard are perturbed by the stencil step (quantile/fixed)
or resampled (rejection), at most 10 times each.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, EnvelopeError, InvalidParameterError, NodeProximityError
from .fields import DEFAULT_STENCIL, velocity_grad_s
from .systems import WaveField

_MAX_RETRIES = 10


@dataclass(frozen=True)
class SamplerConfig:
    mode: str = "rejection"
    n: int = 100
    seed: int = 0
    domain: tuple | None = None          # ((lo, hi), ...) per dimension
    envelope_margin: float = 1.5
    envelope: float | None = None        # explicit density bound override
    positions: tuple | None = None       # fixed mode
    velocities: tuple | None = None      # fixed mode, optional

    def __post_init__(self):
        if self.mode not in ("rejection", "quantile_1d", "fixed"):
            raise InvalidParameterError(f"unknown sampler mode {self.mode!r}")
        if not (isinstance(self.n, int) and not isinstance(self.n, bool) and self.n >= 1):
            raise InvalidParameterError(f"n must be a positive int, got {self.n!r}")
        if not (isinstance(self.seed, int) and self.seed >= 0):
            raise InvalidParameterError(f"seed must be a non-negative int, got {self.seed!r}")
        if self.envelope_margin < 1.0:
            raise InvalidParameterError(
                f"envelope_margin must be >= 1, got {self.envelope_margin}"
            )
        if self.mode == "fixed" and self.positions is None:
            raise InvalidParameterError("fixed sampler mode requires positions")


def default_domain(system: WaveField):
    """Bounding box holding > 1 - 1e-8 of the mass at t_start = 0."""
    if system.kind == "double_slit":
        p = system.params
        half = 4.0 * p.X + 6.0 * p.rho0
        return ((-half, half),)
    if system.kind == "oscillator_2d":
        half = 6.0 / math.sqrt(system.params.omega)
        return ((-half, half), (-half, half))
    half = 5.0 * system.params.n**2
    return ((-half, half),) * 3


def _domain(system, sampler):
    dom = sampler.domain if sampler.domain is not None else default_domain(system)
    dom = tuple((float(lo), float(hi)) for lo, hi in dom)
    if len(dom) != system.dim:
        raise ConfigurationError(
            f"domain has {len(dom)} dimensions, system has {system.dim}",
            path="ensemble.domain",
        )
    for lo, hi in dom:
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ConfigurationError(f"bad interval ({lo}, {hi})", path="ensemble.domain")
    return dom


class GridCDF:
    """Numeric CDF of a 1D non-negative density on [lo, hi].

    Composite Simpson per cell (nodes + midpoints), refined until the total
    mass is stable to 1e-12 relative; point queries finish the partial cell
    with 3-point Gauss-Legendre.  Quantiles are found by bisection from the
    full symmetric interval, so an antisymmetric-density midpoint level hits
    the centre exactly.
    """

    _GL_X = (-math.sqrt(0.6), 0.0, math.sqrt(0.6))
    _GL_W = (5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0)
    _CHUNK = 1024  # marginal callbacks broadcast an inner quadrature axis

    def __init__(self, fn, lo, hi, n_cells=4096, tol=1e-12, max_cells=1 << 19):
        self.fn = fn
        self.lo = float(lo)
        self.hi = float(hi)
        n = int(n_cells)
        total_prev = None
        while True:
            nodes = np.linspace(self.lo, self.hi, n + 1)
            mids = 0.5 * (nodes[:-1] + nodes[1:])
            fn_nodes = self._eval(nodes)
            fn_mids = self._eval(mids)
            w = np.diff(nodes)
            cells = w / 6.0 * (fn_nodes[:-1] + 4.0 * fn_mids + fn_nodes[1:])
            total = float(cells.sum())
            if total_prev is not None and abs(total - total_prev) <= tol * max(total, 1e-300):
                break
            if n >= max_cells:
                break
            total_prev = total
            n *= 2
        if not (total > 0 and math.isfinite(total)):
            raise ConfigurationError(f"density mass on [{lo}, {hi}] is {total}")
        self.nodes = nodes
        self.cum = np.concatenate([[0.0], np.cumsum(cells)])
        self.total = total

    def _eval(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.size <= self._CHUNK:
            return np.asarray(self.fn(x), dtype=float)
        out = np.empty(x.shape)
        for i in range(0, x.size, self._CHUNK):
            out[i : i + self._CHUNK] = np.asarray(self.fn(x[i : i + self._CHUNK]), dtype=float)
        return out

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        xc = np.clip(x, self.lo, self.hi)
        idx = np.clip(np.searchsorted(self.nodes, xc, side="right") - 1, 0, len(self.nodes) - 2)
        a = self.nodes[idx]
        half = 0.5 * (xc - a)
        part = np.zeros_like(xc)
        for gx, gw in zip(self._GL_X, self._GL_W):
            part += gw * self._eval(a + half * (1.0 + gx))
        part *= half
        return np.clip((self.cum[idx] + part) / self.total, 0.0, 1.0)

    def ppf(self, levels, tol=1e-10):
        """Inverse CDF by bisection; stops at |F - level| <= tol per point."""
        levels = np.atleast_1d(np.asarray(levels, dtype=float))
        if np.any((levels <= 0) | (levels >= 1)):
            raise InvalidParameterError("quantile levels must lie in (0, 1)")
        lo = np.full(levels.shape, self.lo)
        hi = np.full(levels.shape, self.hi)
        mid = 0.5 * (lo + hi)
        for _ in range(200):
            f = self.cdf(mid) - levels
            done = np.abs(f) <= tol
            if done.all():
                break
            hi = np.where(f > 0, mid, hi)
            lo = np.where(f > 0, lo, mid)
            new_mid = 0.5 * (lo + hi)
            mid = np.where(done, mid, new_mid)
            if np.max(hi - lo) < 1e-13 * max(1.0, abs(self.hi - self.lo)):
                break
        return mid

    def mean(self):
        return self._moment(lambda x: x)

    def var(self):
        m = self.mean()
        return self._moment(lambda x: (x - m) ** 2)

    def _moment(self, g):
        nodes = self.nodes
        mids = 0.5 * (nodes[:-1] + nodes[1:])
        w = np.diff(nodes)
        fn_nodes = self._eval(nodes) * g(nodes)
        fn_mids = self._eval(mids) * g(mids)
        cells = w / 6.0 * (fn_nodes[:-1] + 4.0 * fn_mids + fn_nodes[1:])
        return float(cells.sum()) / self.total


def marginal_density_1d(system: WaveField, t=0.0, axis="auto"):
    """Vectorized 1D marginal density and its natural support.

    Returns (fn, lo, hi).  Marginals: x for the double slit, polar radius for
    the oscillator, cylindrical radius 's' or 'z' for hydrogen.
    """
    if system.kind == "double_slit":
        (dom,) = default_domain(system)

        def fn(x):
            return system.rho(np.asarray(x, dtype=float)[..., None], t)

        return fn, dom[0], dom[1]
    if system.kind == "oscillator_2d":
        hi = default_domain(system)[0][1]

        def fn(r):
            r = np.asarray(r, dtype=float)
            theta = np.linspace(0.0, 2.0 * math.pi, 257)[:-1]
            pts = np.stack(
                [r[..., None] * np.cos(theta), r[..., None] * np.sin(theta)], axis=-1
            )
            return r * system.rho(pts, t).mean(axis=-1) * 2.0 * math.pi

        return fn, 0.0, hi
    # hydrogen: |psi|^2 is phi-independent, so the phi integral is 2 pi
    hi = default_domain(system)[0][1]
    if axis == "z":
        def fn(z):
            z = np.asarray(z, dtype=float)
            s = np.linspace(0.0, hi, 1025)
            pts = np.stack(
                [np.broadcast_to(s, z.shape + s.shape),
                 np.zeros(z.shape + s.shape),
                 np.broadcast_to(z[..., None], z.shape + s.shape)], axis=-1
            )
            vals = system.rho(pts, t) * s
            return 2.0 * math.pi * np.trapezoid(vals, s, axis=-1)

        return fn, -hi, hi

    def fn(s):
        s = np.asarray(s, dtype=float)
        z = np.linspace(-hi, hi, 2049)
        pts = np.stack(
            [np.broadcast_to(s[..., None], s.shape + z.shape),
             np.zeros(s.shape + z.shape),
             np.broadcast_to(z, s.shape + z.shape)], axis=-1
        )
        vals = system.rho(pts, t)
        return 2.0 * math.pi * s * np.trapezoid(vals, z, axis=-1)

    return fn, 0.0, hi


def _rng(seed):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def estimate_envelope(system: WaveField, domain, t, margin):
    """Grid-scanned density maximum times the safety margin."""
    dim = system.dim
    n = {1: 8192, 2: 512, 3: 96}[dim]
    axes = [np.linspace(lo, hi, n) for lo, hi in domain]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    return float(system.rho(pts, t).max()) * margin


def sample_positions(system: WaveField, sampler: SamplerConfig, t_start=0.0):
    """Draw n start positions distributed as |psi(. , t_start)|^2."""
    if sampler.mode == "fixed":
        pos = np.asarray(sampler.positions, dtype=float).reshape(-1, system.dim)
        if pos.shape[0] != sampler.n:
            raise ConfigurationError(
                f"fixed positions count {pos.shape[0]} != n {sampler.n}",
                path="ensemble.positions",
            )
        return pos.copy()
    if sampler.mode == "quantile_1d":
        if system.dim != 1:
            raise ConfigurationError(
                "quantile_1d requires a 1D system", path="ensemble.mode"
            )
        dom = _domain(system, sampler)[0]

        def fn(x):
            return system.rho(np.asarray(x, dtype=float)[..., None], t_start)

        cdf = GridCDF(fn, dom[0], dom[1])
        levels = (np.arange(sampler.n) + 0.5) / sampler.n
        return cdf.ppf(levels)[:, None]
    return _rejection_sample(system, sampler, t_start, sampler.n, _rng(sampler.seed))


def _rejection_sample(system, sampler, t_start, n, rng):
    dom = _domain(system, sampler)
    dim = system.dim
    env = sampler.envelope
    if env is None:
        env = estimate_envelope(system, dom, t_start, sampler.envelope_margin)
    if not (env > 0 and math.isfinite(env)):
        raise ConfigurationError(f"bad rejection envelope {env}", path="ensemble.envelope")
    lo = np.array([d[0] for d in dom])
    wid = np.array([d[1] - d[0] for d in dom])
    out = np.empty((n, dim))
    got = 0
    batches = 0
    proposed = 0
    chunk = max(4096, 2 * n)
    while got < n:
        batches += 1
        if batches > 5000:
            raise ConfigurationError(
                "rejection sampling acceptance rate is pathologically low",
                path="ensemble",
            )
        pts = lo + wid * rng.random((chunk, dim))
        rho = system.rho(pts, t_start)
        bad = rho > env
        if np.any(bad):
            pt = pts[np.argmax(bad)]
            raise EnvelopeError(
                f"density {rho.max():.6e} exceeds envelope {env:.6e} at {pt.tolist()}",
                path="ensemble.envelope",
            )
        keep = pts[rng.random(chunk) * env < rho]
        take = min(n - got, keep.shape[0])
        out[got : got + take] = keep[:take]
        got += take
        proposed += chunk
        # low-acceptance boxes (3D especially) grow the proposal batch so
        # the draw stays vectorized instead of looping thousands of times
        if got < n and got > 0:
            rate = got / proposed
            chunk = int(min(1 << 22, max(chunk, 1.5 * (n - got) / rate)))
    return out


def initial_velocities(system: WaveField, positions, t_start=0.0, stencil=None,
                       mode="quantile_1d", resample=None):
    """grad S at each start position, with node-guard retries.

    Guarded positions are perturbed by the stencil step (``quantile_1d`` /
    ``fixed`` modes) or replaced via the ``resample`` callable (``rejection``),
    at most 10 times each.  Returns (positions, velocities); positions may
    differ from the input where retries fired.
    """
    st = stencil or DEFAULT_STENCIL
    pos = np.asarray(positions, dtype=float).reshape(-1, system.dim).copy()
    vel = np.zeros_like(pos)
    for i in range(pos.shape[0]):
        x = pos[i].copy()
        for attempt in range(_MAX_RETRIES + 1):
            try:
                vel[i] = velocity_grad_s(system, x, t_start, st)
                pos[i] = x
                break
            except NodeProximityError:
                if attempt == _MAX_RETRIES:
                    raise
                if mode == "rejection" and resample is not None:
                    x = resample()
                else:
                    x = x + st.h
    return pos, vel


def sample_initial_conditions(system: WaveField, sampler: SamplerConfig, t_start=0.0,
                              stencil=None):
    """Positions from the configured sampler plus grad-S velocities.

    In ``fixed`` mode explicit velocities (when given) bypass the grad-S
    computation, which is how classical-analytic scenarios pin v0.
    """
    pos = sample_positions(system, sampler, t_start)
    if sampler.mode == "fixed" and sampler.velocities is not None:
        vel = np.asarray(sampler.velocities, dtype=float).reshape(-1, system.dim)
        if vel.shape != pos.shape:
            raise ConfigurationError(
                f"velocities shape {vel.shape} != positions shape {pos.shape}",
                path="ensemble.velocities",
            )
        return pos, vel.copy()
    resample = None
    if sampler.mode == "rejection":
        retry_rng = _rng(sampler.seed + 1_000_003)

        def resample():
            return _rejection_sample(system, sampler, t_start, 1, retry_rng)[0]

    pos, vel = initial_velocities(system, pos, t_start, stencil, sampler.mode, resample)
    return pos, vel

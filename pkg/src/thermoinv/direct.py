"""Direct problem: truncated sine-series solver, measurement generation,
bounded noise, and an independent Crank-Nicolson reference solver.

The PDE is u_t = a^2 u_xx + f(x) on [0, length] with zero Dirichlet
boundaries and zero initial state.  Expanding f in sine modes gives

    u(x, t) = sum_k sin(k pi x / l) * (1 - exp(-w_k^2 t)) / w_k^2 * b_k,

with w_k = a k pi / l and b_k the mode coefficients of f.  In physical
mode b_k = (2/l) * integral(f sin); paper mode drops the factor 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.linalg import cho_solve_banded, cholesky_banded

from .model import (
    FixedPoint,
    FixedTime,
    Measurements,
    NoiseSpec,
    ProblemConfig,
    RandomPoints,
    SamplingScheme,
    SourceFunction,
)


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


@dataclass(frozen=True)
class SineCoefficients:
    """Mode coefficients b_k, k = 1..n_modes, of a source function."""

    values: np.ndarray
    mode: str

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sine coefficients must be finite")


def _sine_integral_quad(f: SourceFunction, k: int, length: float, tol: float) -> float:
    """integral(f(s) sin(k pi s / length), 0..length) by oscillatory quadrature,
    split at declared discontinuities."""
    edges = [0.0, *sorted(bp for bp in f.breakpoints if 0.0 < bp < length), length]
    w = k * np.pi / length
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        out = quad(f.evaluator, a, b, weight="sin", wvar=w,
                   epsabs=tol / (len(edges) - 1), epsrel=1e-10,
                   limit=200, full_output=1)
        if len(out) > 3:  # scipy appends a message when the tolerance was not met
            raise QuadratureError(
                f"quadrature for mode {k} on [{a:g}, {b:g}] did not converge: {out[3]}")
        total += out[0]
    return total


def sine_coefficients(f: SourceFunction, config: ProblemConfig,
                      tol: float = 1e-12) -> SineCoefficients:
    """Expand a source function in the sine basis.

    Uses the exact ``f.sine_integral`` when the source provides one,
    otherwise adaptive oscillatory quadrature with absolute tolerance
    ``tol`` per mode.

    Raises
    ------
    QuadratureError
        If quadrature cannot reach the tolerance for some mode.
    """
    l = config.length
    if f.sine_integral is not None:
        raw = np.array([f.sine_integral(k, l) for k in range(1, config.n_modes + 1)])
    else:
        raw = np.array([_sine_integral_quad(f, k, l, tol)
                        for k in range(1, config.n_modes + 1)])
    return SineCoefficients(config.mode_factor * raw, config.kernel_mode)


def evaluate_field(coeffs: SineCoefficients, x, t, config: ProblemConfig):
    """Temperature of the truncated series solution at (x, t).

    ``x`` and ``t`` broadcast together elementwise; the result has the
    broadcast shape (a scalar in, a scalar out).
    """
    x_arr, t_arr = np.broadcast_arrays(np.asarray(x, dtype=float),
                                       np.asarray(t, dtype=float))
    if np.any(x_arr < 0) or np.any(x_arr > config.length):
        raise ValueError("positions must lie in [0, length]")
    if np.any(t_arr < 0):
        raise ValueError("times must be >= 0")
    scalar = x_arr.ndim == 0
    x_flat = np.atleast_1d(x_arr).ravel()
    t_flat = np.atleast_1d(t_arr).ravel()

    k = np.arange(1, config.n_modes + 1)
    w2 = (config.diffusivity * k * np.pi / config.length) ** 2
    sines = np.sin(np.outer(x_flat, k * np.pi / config.length))
    gains = (1.0 - np.exp(-np.outer(t_flat, w2))) / w2
    u = (sines * gains) @ coeffs.values
    if scalar:
        return float(u[0])
    return u.reshape(x_arr.shape)


def sample_points(scheme: SamplingScheme) -> tuple[np.ndarray, np.ndarray]:
    """Measurement coordinates (x_i, t_i) of a sampling layout, i = 1..n_points."""
    n = scheme.n_points
    if isinstance(scheme, FixedPoint):
        x = np.full(n, scheme.sensor_x)
        t = scheme.t_start + scheme.dt * np.arange(n)
    elif isinstance(scheme, FixedTime):
        x = np.arange(1, n + 1) * scheme.spacing
        t = np.full(n, scheme.snapshot_t)
    elif isinstance(scheme, RandomPoints):
        rng = np.random.default_rng(scheme.seed)
        x = rng.uniform(0.0, scheme.length, n)
        while np.any(x == 0.0):  # keep positions strictly interior
            mask = x == 0.0
            x[mask] = rng.uniform(0.0, scheme.length, int(mask.sum()))
        t = scheme.t_start + scheme.dt * np.arange(n)
    else:
        raise TypeError(f"unknown sampling scheme {type(scheme).__name__}")
    return x, t


def generate_data(f: SourceFunction, scheme: SamplingScheme,
                  config: ProblemConfig) -> Measurements:
    """Clean temperature data for a source under a sampling layout."""
    x, t = sample_points(scheme)
    coeffs = sine_coefficients(f, config)
    values = evaluate_field(coeffs, x, t, config)
    return Measurements(x, t, values, delta=0.0, scheme=scheme)


def apply_noise(m: Measurements, spec: NoiseSpec) -> Measurements:
    """Perturb values by delta * r with r i.i.d. uniform on [-1, 1].

    Guarantees |u'_i - u_i| <= delta for every i.  Noise bounds compose by
    addition when applied repeatedly.  Pure: same inputs, same output.
    """
    r = np.random.default_rng(spec.seed).uniform(-1.0, 1.0, len(m))
    return m.with_values(m.values + spec.delta * r, m.delta + spec.delta)


def _cell_averages(f: SourceFunction, nodes: np.ndarray, dx: float) -> np.ndarray:
    """Average of f over the cell [x_i - dx/2, x_i + dx/2] around each node.

    Mass-preserving source discretization; plain nodal sampling would move a
    source discontinuity by up to dx/2 and poison the comparison solver.
    """
    gauss_x, gauss_w = np.polynomial.legendre.leggauss(5)
    lo = nodes - dx / 2
    breaks = [bp for bp in f.breakpoints]
    cell_has_break = np.zeros(nodes.size, dtype=bool)
    for bp in breaks:
        inside = (lo < bp) & (bp < lo + dx)
        cell_has_break |= inside

    # smooth cells in one vectorized sweep
    mids = nodes[:, None] + (dx / 2) * gauss_x[None, :]
    avgs = (f(mids) @ gauss_w) / 2.0

    # cells containing a breakpoint: integrate each smooth piece separately
    for i in np.nonzero(cell_has_break)[0]:
        a = lo[i]
        edges = sorted({a, a + dx, *(bp for bp in breaks if a < bp < a + dx)})
        acc = 0.0
        for p, q in zip(edges[:-1], edges[1:]):
            mid = 0.5 * (p + q)
            half = 0.5 * (q - p)
            acc += half * float(f(mid + half * gauss_x) @ gauss_w)
        avgs[i] = acc / dx
    return avgs


def fd_reference(f: SourceFunction, config: ProblemConfig, t: float,
                 m_nodes: int = 401, dt: float = 1e-4) -> np.ndarray:
    """Crank-Nicolson reference solve, independent of the series solver.

    Solves the PDE on a uniform grid of ``m_nodes`` points (boundaries
    included) and returns the interior field at time ``t``.  The scheme is
    unconditionally stable and second order; a final shortened step absorbs
    any remainder when ``t`` is not a multiple of ``dt``.

    Parameters
    ----------
    f : SourceFunction
        Source term; discretized by exact cell averages.
    config : ProblemConfig
        Supplies diffusivity and bar length (series settings are unused).
    t : float
        Target time, >= 0.
    m_nodes : int
        Total spatial nodes including both boundaries (>= 3).
    dt : float
        Time step, > 0.
    """
    if m_nodes < 3:
        raise ValueError("m_nodes must be >= 3")
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if t < 0:
        raise ValueError("t must be >= 0")

    dx = config.length / (m_nodes - 1)
    interior = np.arange(1, m_nodes - 1) * dx
    rhs_f = _cell_averages(f, interior, dx)
    u = np.zeros(interior.size)
    if t == 0:
        return u

    n_full, remainder = divmod(t, dt)
    steps = [dt] * int(n_full)
    if remainder > 1e-12 * dt:
        steps.append(remainder)

    def banded_factor(step):
        lam = config.diffusivity ** 2 * step / (2 * dx * dx)
        ab = np.zeros((2, interior.size))
        ab[0, 1:] = -lam
        ab[1, :] = 1 + 2 * lam
        return lam, cholesky_banded(ab, lower=False)

    lam, factor = banded_factor(dt)
    for step in steps:
        if step != dt:
            lam, factor = banded_factor(step)
        lap = np.empty_like(u)
        lap[:] = -2 * u
        lap[:-1] += u[1:]
        lap[1:] += u[:-1]
        rhs = u + lam * lap + step * rhs_f
        u = cho_solve_banded((factor, False), rhs)
    return u


def fd_interior_nodes(m_nodes: int, length: float = 1.0) -> np.ndarray:
    """Interior node positions matching :func:`fd_reference` output."""
    dx = length / (m_nodes - 1)
    return np.arange(1, m_nodes - 1) * dx

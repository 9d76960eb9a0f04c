"""Problem configuration, source functions, grids, sampling layouts, measurements.

Everything here is an immutable value object; the numerical work lives in
the sibling modules (``direct``, ``kernel``, ``inversion``, ``rules``).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

import numpy as np

KERNEL_MODES = ("paper", "physical")

#: Canonical defaults shared by the sampling layouts.
DEFAULT_T_START = 0.004
DEFAULT_DT = 0.004
DEFAULT_N_POINTS = 100


@dataclass(frozen=True)
class ProblemConfig:
    """Physical and numerical constants of the heat problem.

    Parameters
    ----------
    diffusivity : float
        Heat diffusion coefficient of the bar (enters the PDE as its square).
    length : float
        Length of the bar; the domain is [0, length].
    n_modes : int
        Number of sine modes kept in the truncated series solution.
    kernel_mode : str
        ``"physical"`` uses the orthonormal sine expansion (factor 2/length in
        coefficients and kernel), so the direct solver matches an independent
        finite-difference solve.  ``"paper"`` drops that factor (plain 1/length
        scaling).  Reconstructions are identical in both modes because data
        generation and inversion share the kernel; only the alpha scale shifts.
    """

    diffusivity: float = 1.0
    length: float = 1.0
    n_modes: int = 100
    kernel_mode: str = "physical"

    def __post_init__(self):
        if self.diffusivity <= 0:
            raise ValueError(f"diffusivity must be > 0, got {self.diffusivity}")
        if self.length <= 0:
            raise ValueError(f"length must be > 0, got {self.length}")
        if self.n_modes < 1:
            raise ValueError(f"n_modes must be >= 1, got {self.n_modes}")
        if self.kernel_mode not in KERNEL_MODES:
            raise ValueError(f"kernel_mode must be one of {KERNEL_MODES}")

    @property
    def mode_factor(self) -> float:
        """Scale of the sine expansion: 2/length (physical) or 1/length (paper)."""
        return (2.0 if self.kernel_mode == "physical" else 1.0) / self.length


@dataclass(frozen=True)
class SourceFunction:
    """A stationary heat source density on [0, length].

    ``evaluator`` must accept scalars or numpy arrays and be finite on the
    whole bar.  ``breakpoints`` lists interior discontinuities so quadrature
    can split around them.  ``sine_integral``, when given, returns the exact
    value of integral(f(s) * sin(k*pi*s/length), s=0..length) and short-cuts
    adaptive quadrature.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    label: str
    breakpoints: tuple = ()
    sine_integral: Optional[Callable[[int, float], float]] = None

    def __call__(self, s):
        return self.evaluator(s)


def box_source(lo: float = 1.0 / 3.0, hi: float = 2.0 / 3.0, height: float = 1.0) -> SourceFunction:
    """Pulse source: ``height`` on the closed interval [lo, hi], zero elsewhere."""
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")

    def evaluator(s):
        s = np.asarray(s, dtype=float)
        return np.where((s >= lo) & (s <= hi), height, 0.0)

    def sine_integral(k: int, length: float) -> float:
        # integral of height*sin(k pi s / length) over [lo, hi], closed form
        w = k * np.pi / length
        return height / w * (np.cos(w * lo) - np.cos(w * hi))

    return SourceFunction(evaluator, f"box[{lo:g},{hi:g}]x{height:g}",
                          breakpoints=(lo, hi), sine_integral=sine_integral)


def zero_source() -> SourceFunction:
    """Identically zero source."""
    return SourceFunction(lambda s: np.zeros_like(np.asarray(s, dtype=float)),
                          "zero", sine_integral=lambda k, length: 0.0)


@dataclass(frozen=True)
class ReconstructionGrid:
    """Uniform interior grid s_j = j * length/(n_nodes+1), j = 1..n_nodes.

    Endpoints are excluded on purpose: the kernel vanishes at s = 0 and
    s = length, so source values there are invisible to the data.
    """

    n_nodes: int
    length: float = 1.0

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ValueError(f"n_nodes must be >= 1, got {self.n_nodes}")
        if self.length <= 0:
            raise ValueError(f"length must be > 0, got {self.length}")

    @property
    def spacing(self) -> float:
        return self.length / (self.n_nodes + 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(1, self.n_nodes + 1) * self.spacing


def make_grid(n_nodes: int, length: float = 1.0) -> ReconstructionGrid:
    """Build the interior reconstruction grid with n_nodes points."""
    return ReconstructionGrid(n_nodes=n_nodes, length=length)


def discretize_source(f: SourceFunction, grid: ReconstructionGrid) -> np.ndarray:
    """Sample f at the grid nodes; entry j is f(s_j)."""
    return np.asarray(f(grid.nodes), dtype=float)


@dataclass(frozen=True)
class FixedPoint:
    """Measurement layout 1: one sensor at ``sensor_x`` read at equally spaced times.

    Times are t_start + i*dt for i = 0..n_points-1.
    """

    sensor_x: float = 0.35
    t_start: float = DEFAULT_T_START
    dt: float = DEFAULT_DT
    n_points: int = DEFAULT_N_POINTS
    length: float = 1.0
    kind: str = field(default="fixed-point", init=False, repr=False)

    def __post_init__(self):
        if not 0 < self.sensor_x < self.length:
            raise ValueError(f"sensor_x must lie strictly inside (0, {self.length})")
        if self.t_start <= 0 or self.dt <= 0:
            raise ValueError("t_start and dt must be > 0")
        if self.n_points < 1:
            raise ValueError("n_points must be >= 1")


@dataclass(frozen=True)
class FixedTime:
    """Measurement layout 2: one snapshot at time ``snapshot_t`` over a uniform
    spatial grid x_i = i * length/(n_points+1), i = 1..n_points."""

    snapshot_t: float = 0.1
    n_points: int = DEFAULT_N_POINTS
    length: float = 1.0
    kind: str = field(default="fixed-time", init=False, repr=False)

    def __post_init__(self):
        if self.snapshot_t <= 0:
            raise ValueError("snapshot_t must be > 0")
        if self.n_points < 1:
            raise ValueError("n_points must be >= 1")
        if self.length <= 0:
            raise ValueError("length must be > 0")

    @property
    def spacing(self) -> float:
        return self.length / (self.n_points + 1)


@dataclass(frozen=True)
class RandomPoints:
    """Measurement layout 3: random sensor positions, one per time step.

    Positions are i.i.d. uniform strictly inside (0, length), drawn from a
    generator seeded with ``seed``; times as in :class:`FixedPoint`.
    """

    t_start: float = DEFAULT_T_START
    dt: float = DEFAULT_DT
    n_points: int = DEFAULT_N_POINTS
    seed: int = 0
    length: float = 1.0
    kind: str = field(default="random", init=False, repr=False)

    def __post_init__(self):
        if self.t_start <= 0 or self.dt <= 0:
            raise ValueError("t_start and dt must be > 0")
        if self.n_points < 1:
            raise ValueError("n_points must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


SamplingScheme = Union[FixedPoint, FixedTime, RandomPoints]


@dataclass(frozen=True)
class NoiseSpec:
    """Bounded measurement noise: each value is perturbed by at most ``delta``."""

    delta: float = 0.0001
    seed: int = 0

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


@dataclass(frozen=True)
class Measurements:
    """Temperature samples u_i at points (x_i, t_i), with the noise bound that
    the values carry (0 for clean data)."""

    x: np.ndarray
    t: np.ndarray
    values: np.ndarray
    delta: float = 0.0
    scheme: Optional[SamplingScheme] = None

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "t", np.asarray(self.t, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if not (self.x.shape == self.t.shape == self.values.shape) or self.x.ndim != 1:
            raise ValueError("x, t and values must be 1-d arrays of equal length")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")

    def __len__(self) -> int:
        return self.x.size

    def with_values(self, values: np.ndarray, delta: float) -> "Measurements":
        return Measurements(self.x, self.t, values, delta, self.scheme)

"""Fredholm kernel of the source-to-data map and its discretization.

The data relate to the source through u = integral(K((x,t), s) f(s) ds);
on the reconstruction grid this becomes the matrix equation
u = K f * source_weight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    DEFAULT_DT,
    FixedPoint,
    FixedTime,
    ProblemConfig,
    RandomPoints,
    ReconstructionGrid,
    SamplingScheme,
)


@dataclass(frozen=True)
class KernelMatrix:
    """Discretized Fredholm operator with its quadrature weights.

    ``values`` is N x J: rows follow the data points, columns the grid nodes.
    ``source_weight`` (h_s) converts sums over grid nodes into integrals;
    ``data_weight`` (h_i) does the same for sums over data points.
    """

    values: np.ndarray
    source_weight: float
    data_weight: float
    scheme_kind: str
    mode: str

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.ndim != 2:
            raise ValueError("kernel matrix must be 2-d")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("kernel entries must be finite")
        if self.source_weight <= 0 or self.data_weight <= 0:
            raise ValueError("quadrature weights must be > 0")

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def kernel_value(x, t, s, config: ProblemConfig):
    """Kernel at data point (x, t) and source position s.

    Sum over modes of sin(k pi x / l) * (1 - exp(-w_k^2 t)) / w_k^2
    * sin(k pi s / l), scaled by the expansion factor of the active
    kernel mode.  Arguments broadcast elementwise; symmetric in x and s.
    """
    x_arr, t_arr, s_arr = np.broadcast_arrays(np.asarray(x, dtype=float),
                                              np.asarray(t, dtype=float),
                                              np.asarray(s, dtype=float))
    scalar = x_arr.ndim == 0
    xf, tf, sf = (np.atleast_1d(a).ravel() for a in (x_arr, t_arr, s_arr))

    k = np.arange(1, config.n_modes + 1)
    w2 = (config.diffusivity * k * np.pi / config.length) ** 2
    gains = (1.0 - np.exp(-np.outer(tf, w2))) / w2
    terms = (np.sin(np.outer(xf, k * np.pi / config.length)) * gains
             * np.sin(np.outer(sf, k * np.pi / config.length)))
    out = config.mode_factor * terms.sum(axis=1)
    if scalar:
        return float(out[0])
    return out.reshape(x_arr.shape)


def data_weight_for(scheme: SamplingScheme, paper_weights: bool = False) -> float:
    """Quadrature weight of the data coordinate for a sampling layout.

    By default the weight follows the coordinate the layout actually sweeps:
    time spacing for the fixed-sensor and random layouts, space spacing for
    the snapshot layout.  ``paper_weights`` selects the alternative listing
    that swaps the first two assignments (space spacing for the fixed sensor,
    the default time spacing for the snapshot); the swap only rescales the
    regularization parameter.
    """
    if isinstance(scheme, FixedPoint):
        return scheme.length / (scheme.n_points + 1) if paper_weights else scheme.dt
    if isinstance(scheme, FixedTime):
        return DEFAULT_DT if paper_weights else scheme.spacing
    if isinstance(scheme, RandomPoints):
        return scheme.dt
    raise TypeError(f"unknown sampling scheme {type(scheme).__name__}")


def assemble(x, t, grid: ReconstructionGrid, scheme: SamplingScheme,
             config: ProblemConfig, paper_weights: bool = False) -> KernelMatrix:
    """Build the N x J kernel matrix over data points (x_i, t_i) and grid nodes."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if x.size == 0:
        raise ValueError("need at least one data point")
    if x.shape != t.shape or x.ndim != 1:
        raise ValueError("x and t must be 1-d arrays of equal length")

    k = np.arange(1, config.n_modes + 1)
    w2 = (config.diffusivity * k * np.pi / config.length) ** 2
    data_part = (np.sin(np.outer(x, k * np.pi / config.length))
                 * (1.0 - np.exp(-np.outer(t, w2))) / w2)
    source_part = np.sin(np.outer(k * np.pi / config.length, grid.nodes))
    entries = config.mode_factor * (data_part @ source_part)
    return KernelMatrix(entries, grid.spacing,
                        data_weight_for(scheme, paper_weights),
                        scheme.kind, config.kernel_mode)

"""Euclidean slice recursion for the pulsed-measurement boundary propagator.

The boundary amplitude with n equally spaced projections is computed by
propagating a spatial slice through imaginary time.  In rescaled time
``s = t / eps`` the slice obeys

    F_n(s, x) = int_0^inf dy K(m, (s - n) eps, x, y) F_{n-1}(n, y),
    n <= s <= n + 1,

with ``K`` the heat kernel and ``F_0`` the heat kernel itself; the
projection onto x > 0 is enacted purely by the half-line integration range.
The real-time boundary amplitude is recovered through the dimensionless
envelope

    f(t) = F(s, 0) / K(m, t, 0, 0),    t = s eps,

which equals one for free evolution and continues to real time untouched
(only the square-root prefactor rotates).

Numerics: slices live on a uniform grid over [0, x_max] with x_max about
ten thermal widths of the total duration; the y-integral uses uniform
weights with halved endpoints (interior nodes are midpoints of their
panels), making every advance a discrete convolution evaluated by
``np.convolve`` in a fixed summation order, so results are deterministic.
One-sided limits at the projection instants: the left limit is the ordinary
sample at the end of an interval; the right limit is obtained by evaluating
the convolution at two small offsets and Richardson-extrapolating in
sqrt(offset), the leading correction being of that order.  The exact
coincidence limit (half the left-limit slice value at the origin) is also
exposed for cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BoundaryCurve, Grid1D, heat_kernel
from .exact import absorbing_envelope
from .sawtooth import oscillation_ratio

__all__ = [
    "EuclideanSlice",
    "RecursionConfig",
    "default_grid",
    "default_config",
    "initial_slice",
    "advance_slice",
    "boundary_amplitude",
    "projection_right_limit",
    "slice_mass",
    "run_recursion",
    "numeric_oscillation_curve",
]


@dataclass
class EuclideanSlice:
    """Slice F(s, x) at rescaled time s on a half-line grid (grid.x_min = 0).
    Values are real and non-negative: the kernel is positive and the initial
    slice is."""

    s: float
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if len(self.values) != self.grid.n_points:
            raise ValueError("slice values must match the grid size")
        if self.grid.x_min != 0.0:
            raise ValueError("slice grids start at x = 0")


@dataclass(frozen=True)
class RecursionConfig:
    m: float
    eps: float
    n_max: int
    grid: Grid1D
    samples_per_interval: int = 16
    limit_offset: float = 1e-4   # rescaled-time offset for right limits
    kernel_span: float = 10.0    # kernel truncated at this many std widths

    def __post_init__(self) -> None:
        if self.m <= 0 or self.eps <= 0:
            raise ValueError("mass and eps must be positive")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.samples_per_interval < 2:
            raise ValueError("samples_per_interval must be >= 2")
        if not 0 < self.limit_offset < 0.1:
            raise ValueError("limit_offset must lie in (0, 0.1)")


def default_grid(
    m: float = 1.0,
    eps: float = 1.0,
    n_max: int = 20,
    spacing_scale: float = 1e-3,
    q_trunc: float = 10.0,
) -> Grid1D:
    """Grid spanning q_trunc thermal widths of the total duration with
    spacing ``spacing_scale * sqrt(eps/m)``; at the defaults the Gaussian
    tails beyond x_max are below 1e-20."""
    tau_total = (n_max + 1) * eps
    h = spacing_scale * np.sqrt(eps / m)
    x_max = q_trunc * np.sqrt(tau_total / m)
    n_points = int(np.ceil(x_max / h)) + 1
    return Grid1D(0.0, h * (n_points - 1), n_points)


def default_config(
    m: float = 1.0,
    eps: float = 1.0,
    n_max: int = 20,
    spacing_scale: float = 1e-3,
    q_trunc: float = 10.0,
    samples_per_interval: int = 16,
) -> RecursionConfig:
    grid = default_grid(m, eps, n_max, spacing_scale, q_trunc)
    return RecursionConfig(m, eps, n_max, grid, samples_per_interval)


def _quad_weights(grid: Grid1D) -> np.ndarray:
    w = np.full(grid.n_points, grid.spacing)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def initial_slice(cfg: RecursionConfig, s: float) -> EuclideanSlice:
    """F_0(s, x): heat-kernel spreading from the origin, 0 < s <= 1."""
    if not 0 < s <= 1:
        raise ValueError(f"initial slice needs 0 < s <= 1, got s={s}")
    x = cfg.grid.points()
    return EuclideanSlice(s, cfg.grid, heat_kernel(cfg.m, s * cfg.eps, x, 0.0))


def _integer_index(s: float) -> int:
    n = int(round(s))
    if abs(s - n) > 1e-9:
        raise ValueError(f"slice must sit at an integer rescaled time, got s={s}")
    return n


def advance_slice(prev: EuclideanSlice, cfg: RecursionConfig, s_next: float) -> EuclideanSlice:
    """Propagate a slice taken at integer s = n to s_next in (n, n+1].

    The projection at s = n is enacted by the half-line integration range;
    the output slice is evaluated on the full grid (including x = 0)."""
    n = _integer_index(prev.s)
    if not n < s_next <= n + 1:
        raise ValueError(f"s_next must lie in ({n}, {n + 1}], got {s_next}")
    dt = (s_next - n) * cfg.eps
    h = cfg.grid.spacing
    taps = min(int(np.ceil(cfg.kernel_span * np.sqrt(dt / cfg.m) / h)), cfg.grid.n_points - 1)
    offsets = np.arange(-taps, taps + 1) * h
    kernel = heat_kernel(cfg.m, dt, offsets, 0.0)
    full = np.convolve(prev.values * _quad_weights(cfg.grid), kernel)
    new_values = full[taps : taps + cfg.grid.n_points]
    return EuclideanSlice(s_next, cfg.grid, new_values)


def boundary_amplitude(prev: EuclideanSlice, cfg: RecursionConfig, s_next: float) -> float:
    """F(s_next, 0) from a slice at integer s = n, without forming the full
    advanced slice (only grid points within reach of the kernel matter)."""
    n = _integer_index(prev.s)
    if not n < s_next <= n + 1:
        raise ValueError(f"s_next must lie in ({n}, {n + 1}], got {s_next}")
    dt = (s_next - n) * cfg.eps
    h = cfg.grid.spacing
    reach = min(
        int(np.ceil((cfg.kernel_span + 2.0) * np.sqrt(dt / cfg.m) / h)) + 1,
        cfg.grid.n_points,
    )
    x = cfg.grid.points()[:reach]
    kernel = heat_kernel(cfg.m, dt, x, 0.0)
    return float(np.dot(kernel, (prev.values * _quad_weights(cfg.grid))[:reach]))


def projection_right_limit(prev: EuclideanSlice, cfg: RecursionConfig) -> float:
    """Exact coincidence limit of the envelope just after the projection at
    integer s: half the pre-projection slice value at the origin, normalised
    by the free kernel."""
    n = _integer_index(prev.s)
    t = n * cfg.eps
    return float(0.5 * prev.values[0] / heat_kernel(cfg.m, t, 0.0, 0.0))


def _envelope(cfg: RecursionConfig, amplitude: float, s: float) -> float:
    return amplitude / float(heat_kernel(cfg.m, s * cfg.eps, 0.0, 0.0))


def _right_limit_envelope(prev: EuclideanSlice, cfg: RecursionConfig) -> float:
    """Right limit of the envelope at integer s via sqrt(offset) Richardson."""
    n = _integer_index(prev.s)
    d1 = cfg.limit_offset
    r1 = _envelope(cfg, boundary_amplitude(prev, cfg, n + d1), n + d1)
    r2 = _envelope(cfg, boundary_amplitude(prev, cfg, n + d1 / 4), n + d1 / 4)
    return 2.0 * r2 - r1


def slice_mass(sl: EuclideanSlice) -> float:
    """Trapezoid integral of the slice over the half-line."""
    w = _quad_weights(sl.grid)
    return float(np.dot(w, sl.values))


def run_recursion(cfg: RecursionConfig, collect_slices: bool = False):
    """Boundary envelope curve for n_max projections.

    Sampling per interval (n, n+1]: the right limit at s = n (side '+'),
    ``samples_per_interval - 1`` interior points, and the sample at
    s = n + 1, which is the peak / left limit at the next projection
    (side '-').  The first interval starts from the exact initial slice,
    where the envelope is identically one.

    Returns the envelope ``BoundaryCurve`` (times are physical, t = s eps);
    with ``collect_slices=True`` also returns the list of pre-projection
    slices at integer s = 1..n_max+1 for diagnostics.
    """
    spi = cfg.samples_per_interval
    times: list[float] = []
    vals: list[float] = []
    sides: list[str] = []

    def emit(s: float, value: float, side: str) -> None:
        times.append(s * cfg.eps)
        vals.append(value)
        sides.append(side)

    # interval (0, 1]: free spreading, envelope identically 1
    for j in range(1, spi):
        s = j / spi
        sl = initial_slice(cfg, s)
        emit(s, _envelope(cfg, sl.values[0], s), "")
    prev = initial_slice(cfg, 1.0)
    emit(1.0, _envelope(cfg, prev.values[0], 1.0), "-")
    slices = [prev]

    for n in range(1, cfg.n_max + 1):
        emit(float(n), _right_limit_envelope(prev, cfg), "+")
        for j in range(1, spi):
            s = n + j / spi
            emit(s, _envelope(cfg, boundary_amplitude(prev, cfg, s), s), "")
        prev = advance_slice(prev, cfg, float(n + 1))
        emit(float(n + 1), _envelope(cfg, prev.values[0], n + 1.0), "-")
        if collect_slices:
            slices.append(prev)

    curve = BoundaryCurve(np.array(times), np.array(vals), np.array(sides))
    if collect_slices:
        return curve, slices
    return curve


def numeric_oscillation_curve(curve: BoundaryCurve, v0: float) -> BoundaryCurve:
    """Oscillation ratio S(t) = f(t)/f_absorbing(t) - 1 of a numeric envelope
    curve against the absorbing envelope at strength v0."""
    fv = absorbing_envelope(v0, curve.times)
    s = oscillation_ratio(curve.values, fv)
    return BoundaryCurve(curve.times, np.atleast_1d(s), curve.sides)

"""Constrained random walks on a space-time lattice.

A walker starts at the origin, takes steps of +-eta with probability 1/2
each per time slice dtau, and must sit strictly on the positive axis at the
intermediate constraint instants (every ``steps_per_projection`` slices).
The exact return probability u(0, tau | 0, 0) under these constraints comes
from a dynamic program over site occupancies; mapped to a density through
the factor 1/(2 eta) (reachable sites alternate parity, so the effective
site spacing is 2 eta) it converges, as the lattice under each projection
interval is refined at fixed physical tau and eps, to the continuum
boundary amplitude with that many projections:

    (1/2 eta) u  ->  sqrt(m / 2 pi tau) * eps / tau,

the peak law, with m = dtau / eta^2.  The leading finite-lattice error is
O(eta) from the site-based boundary cutoff, so a short refinement sweep
extrapolates cleanly.

With a constraint at every step the walk instead probes the restricted
(absorbing-boundary) propagator through an O(eta) boundary layer: the
strictly-positive convention behaves like an absorbing wall half a site
above the origin and (1/2 eta) u tends to one HALF of the expression above,
while the non-strict convention (sites >= 0 allowed) tends to twice it.
Both conventions are available; the refinement sweep is therefore performed
at fixed physical constraint spacing, where the convention only shifts the
O(eta) term.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .core import NumericalFailure

__all__ = [
    "LatticeConfig",
    "constrained_walk_probability",
    "brute_force_walk_probability",
    "unconstrained_return_probability",
    "catalan_number",
    "LatticeSweep",
    "continuum_peak_estimate",
]


@dataclass(frozen=True)
class LatticeConfig:
    n_steps: int
    steps_per_projection: int
    eta: float
    dtau: float
    boundary: str = "strict"   # "strict": site > 0; "nonneg": site >= 0

    def __post_init__(self) -> None:
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if self.steps_per_projection < 1:
            raise ValueError("steps_per_projection must be >= 1")
        if self.eta <= 0 or self.dtau <= 0:
            raise ValueError("lattice spacings must be positive")
        if self.boundary not in ("strict", "nonneg"):
            raise ValueError("boundary must be 'strict' or 'nonneg'")

    @property
    def mass(self) -> float:
        """Mass implied by the diffusive continuum map, m = dtau / eta^2."""
        return self.dtau / self.eta**2

    @property
    def tau(self) -> float:
        return self.n_steps * self.dtau

    @property
    def eps(self) -> float:
        return self.steps_per_projection * self.dtau


def constrained_walk_probability(cfg: LatticeConfig) -> float:
    """Exact probability of returning to the origin after n_steps while
    satisfying the positivity constraint at every intermediate multiple of
    steps_per_projection.

    Dynamic programming over site occupancies; every intermediate value is
    a dyadic rational exactly representable in binary floating point, so the
    result matches brute-force enumeration bit for bit on small lattices.
    """
    n = cfg.n_steps
    center = n  # site index offset; reachable sites stay within +-n
    v = np.zeros(2 * n + 1)
    v[center] = 1.0
    for step in range(1, n + 1):
        shifted = np.zeros_like(v)
        shifted[1:] += 0.5 * v[:-1]
        shifted[:-1] += 0.5 * v[1:]
        v = shifted
        if step < n and step % cfg.steps_per_projection == 0:
            if cfg.boundary == "strict":
                v[: center + 1] = 0.0
            else:
                v[:center] = 0.0
    return float(v[center])


def brute_force_walk_probability(cfg: LatticeConfig) -> float:
    """Enumerate all 2**n_steps walks (n_steps <= 20)."""
    n = cfg.n_steps
    if n > 20:
        raise ValueError("brute force capped at 20 steps")
    codes = np.arange(2**n, dtype=np.uint32)
    steps = np.where(
        (codes[:, None] >> np.arange(n)[None, :]) & 1, 1, -1
    ).astype(np.int32)
    pos = np.cumsum(steps, axis=1)
    ok = pos[:, -1] == 0
    for step in range(cfg.steps_per_projection, n, cfg.steps_per_projection):
        if cfg.boundary == "strict":
            ok &= pos[:, step - 1] > 0
        else:
            ok &= pos[:, step - 1] >= 0
    return float(ok.sum()) / 2.0**n


def unconstrained_return_probability(n_steps: int) -> float:
    """C(2k, k) / 4**k for n_steps = 2k (zero for odd step counts)."""
    if n_steps % 2:
        return 0.0
    k = n_steps // 2
    return comb(2 * k, k) / 4.0**k


def catalan_number(k: int) -> int:
    return comb(2 * k, k) // (k + 1)


@dataclass
class LatticeSweep:
    steps_per_projection: np.ndarray
    etas: np.ndarray
    ratios: np.ndarray
    extrapolated: float


def continuum_peak_estimate(
    tau: float,
    eps: float,
    m: float = 1.0,
    levels: tuple[int, ...] = (4, 16, 64, 256),
    boundary: str = "strict",
) -> LatticeSweep:
    """Refinement sweep of the walk toward the continuum peak law.

    Holds the physical duration ``tau`` and constraint spacing ``eps``
    fixed while quadrupling the number of steps per constraint interval
    (so eta halves level to level), forms the ratio

        [(1/2 eta) u] / [sqrt(m / 2 pi tau) * eps / tau]

    at each level, and removes the O(eta) and O(eta^2) errors by two
    Richardson stages.  The extrapolated ratio is 1 to a few parts in 1e3
    at the default levels.
    """
    if not tau > 0 or not eps > 0:
        raise ValueError("tau and eps must be positive")
    n_intervals = tau / eps
    if abs(n_intervals - round(n_intervals)) > 1e-9:
        raise ValueError("tau must be an integer multiple of eps")
    n_intervals = int(round(n_intervals))
    if len(levels) < 3:
        raise NumericalFailure("refinement sweep too short to extrapolate")
    for a, b in zip(levels, levels[1:]):
        if b != 4 * a:
            raise ValueError("levels must quadruple so that eta halves")

    target = np.sqrt(m / (2 * np.pi * tau)) * (eps / tau)
    etas, ratios = [], []
    for r in levels:
        dtau = eps / r
        eta = np.sqrt(dtau / m)
        cfg = LatticeConfig(
            n_steps=n_intervals * r,
            steps_per_projection=r,
            eta=eta,
            dtau=dtau,
            boundary=boundary,
        )
        u = constrained_walk_probability(cfg)
        etas.append(eta)
        ratios.append(u / (2 * eta) / target)

    first = [2 * b - a for a, b in zip(ratios, ratios[1:])]
    second = [(4 * b - a) / 3 for a, b in zip(first, first[1:])]
    return LatticeSweep(
        steps_per_projection=np.array(levels),
        etas=np.array(etas),
        ratios=np.array(ratios),
        extrapolated=float(second[-1]),
    )

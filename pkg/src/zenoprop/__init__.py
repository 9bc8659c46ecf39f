"""zenoprop: pulsed position measurements vs. a complex absorbing potential.

Numerically establishes the equivalence between the boundary propagator of a
free particle interrupted by periodic projections onto the positive axis and
the boundary propagator of a complex step potential, and propagates the
difference onto wave packets.  See the README for the map of subpackages.
"""

from .core import (
    BoundaryCurve,
    Grid1D,
    NumericalFailure,
    QuadratureRule,
    ROOT_INV_I,
    free_propagator,
    half_power_weights,
    heat_kernel,
    integrate,
    quadrature_nodes,
)
from .exact import (
    absorbing_boundary_propagator,
    absorbing_envelope,
    chain_integral,
    chain_plus_minus,
    chain_plus_plus,
    final_gap_ratio,
    half_value_ratio,
    projected_boundary_exact,
    projected_envelope_exact,
    reconstructed_triple_plus,
    restricted_propagator,
    time_averaged_envelope,
    time_averaged_product,
)
from .lattice import (
    LatticeConfig,
    LatticeSweep,
    brute_force_walk_probability,
    constrained_walk_probability,
    continuum_peak_estimate,
)
from .recursion import (
    EuclideanSlice,
    RecursionConfig,
    advance_slice,
    boundary_amplitude,
    default_config,
    default_grid,
    initial_slice,
    numeric_oscillation_curve,
    run_recursion,
)
from .sawtooth import (
    ProjectionSchedule,
    calibrate_absorption,
    default_schedule,
    oscillation_ratio,
    peak_value,
    sample_model_curves,
    sawtooth_envelope,
    trough_value,
)
from .wavepacket import (
    WavePacket,
    crossing_density,
    delta_norm_scan,
    free_packet,
    normalized_crossing_density,
    packet_boundary_derivative,
    pdx_delta_psi,
    stationary_delta_g,
    suppression_factor,
)

__version__ = "0.1.0"

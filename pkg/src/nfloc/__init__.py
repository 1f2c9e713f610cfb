"""Downlink localization of single-antenna users by a planar array.

The library models the exact spherical-wave channel next to a large
panel together with its planar-wave approximation, builds steered and
focused beam codebooks, and runs grid-refinement position estimators
plus Fisher-information error bounds over both models.
"""

from .errors import (
    AllBeamsSuppressed,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidRegion,
    InvalidThreshold,
    NflocError,
    ParseError,
    SingularModel,
    ValidationError,
    ZeroDistance,
)
from .geometry import (
    SPEED_OF_LIGHT,
    ArrayConfig,
    SphericalCoord,
    antenna_positions,
    aperture_diagonal,
    cart_to_sph,
    direction,
    fraunhofer_distance,
    sph_to_cart,
    subcarrier_frequency,
    subcarrier_wavelength,
)
from .channel import (
    ChannelMatrix,
    delay_ramp_period,
    ff_channel,
    ff_equivalent,
    ff_steering,
    ff_steering_many,
    model_gap,
    nf_channel,
    nf_steering,
    nf_steering_many,
    path_scalar,
    t_vector,
)
from .codebooks import (
    Codebook,
    Region,
    angular_grid,
    codebook_to_csv,
    make_ff_codebook,
    make_nf_codebook,
    min_coverage_gain,
    ring_radii,
)
from .airlink import (
    LinkBudget,
    RxGrid,
    noise_power,
    noise_power_mw,
    snr_at,
    synthesize_rx,
)
from .estimators import (
    BeamWeights,
    EstimatorConfig,
    PositionEstimate,
    estimate_ff,
    estimate_nf,
    localize_adaptive,
    rssi_weights,
)
from .bounds import FisherMatrix, fisher_info, position_error_bound
from .config import (
    DEFAULTS,
    BenchConfig,
    ExperimentConfig,
    SnrMapConfig,
    TrackingConfig,
    build_experiment,
    config_echo,
    default_ladder,
    parse_config,
)
from .harness import (
    ResultTable,
    algorithm_cost_model,
    run_bound_curve,
    run_complexity_bench,
    run_rmse_sweep,
    run_snr_map,
    run_tracking,
    trial_seed,
    write_manifest,
)

__version__ = "0.1.0"

__all__ = [
    "AllBeamsSuppressed", "ArrayConfig", "BeamWeights", "BenchConfig",
    "ChannelMatrix", "Codebook", "DEFAULTS", "DimensionMismatch",
    "EstimatorConfig", "ExperimentConfig", "FisherMatrix", "IndexOutOfRange",
    "InvalidRegion", "InvalidThreshold", "LinkBudget", "NflocError",
    "ParseError", "PositionEstimate", "Region", "ResultTable", "RxGrid",
    "SPEED_OF_LIGHT", "SingularModel", "SnrMapConfig", "SphericalCoord",
    "TrackingConfig", "ValidationError", "ZeroDistance",
    "algorithm_cost_model", "angular_grid", "antenna_positions",
    "aperture_diagonal", "build_experiment", "cart_to_sph", "codebook_to_csv",
    "config_echo", "default_ladder", "delay_ramp_period", "direction",
    "estimate_ff", "estimate_nf", "ff_channel", "ff_equivalent",
    "ff_steering", "ff_steering_many", "fisher_info", "fraunhofer_distance",
    "localize_adaptive", "make_ff_codebook", "make_nf_codebook",
    "min_coverage_gain", "model_gap", "nf_channel", "nf_steering",
    "nf_steering_many", "noise_power", "noise_power_mw", "parse_config",
    "path_scalar", "position_error_bound", "ring_radii", "rssi_weights",
    "run_bound_curve", "run_complexity_bench", "run_rmse_sweep",
    "run_snr_map", "run_tracking", "snr_at", "sph_to_cart",
    "subcarrier_frequency", "subcarrier_wavelength", "synthesize_rx",
    "t_vector", "trial_seed", "write_manifest",
]

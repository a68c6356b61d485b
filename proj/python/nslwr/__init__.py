"""Lagrangian LWR platoon simulator."""

from ._nslwr import (
    ConfigError,
    ExperimentInvalid,
    FundamentalDiagram,
    MeasurementError,
    UnsupportedDiagram,
    cfl_threshold,
    check_concave,
    collision_free_threshold,
    diffusion_coefficient,
    eulerian_dispersion_roots,
    normalize_config,
    riemann_wave,
    run,
    shock_speed_rh,
    string_stability,
    template_names,
    template_text,
    validate_step_sizes,
)

__all__ = [
    "ConfigError",
    "ExperimentInvalid",
    "FundamentalDiagram",
    "MeasurementError",
    "UnsupportedDiagram",
    "cfl_threshold",
    "check_concave",
    "collision_free_threshold",
    "diffusion_coefficient",
    "eulerian_dispersion_roots",
    "normalize_config",
    "riemann_wave",
    "run",
    "shock_speed_rh",
    "string_stability",
    "template_names",
    "template_text",
    "validate_step_sizes",
]

"""Inverse mean curvature flow of spacelike graphs in warped cosmological spacetimes."""
from .analysis import (
    CheckReport,
    check_area_law,
    check_evolution_identities,
    check_H_exponential_bound,
    check_lifespan,
    check_singularity_approach,
    check_w_bounded,
    lifespan_bound,
    run_checks,
)
from .config import ScenarioConfig, bundled_scenarios, from_dict, load_config, load_scenario
from .flow import FlowSettings, FlowTrajectory, integrate, run_flow, scalar_flow_rhs, step
from .hypersurface import CauchyGrid, GraphState, area, compute_geometry, validate_graph_parametric
from .spacetime import (
    EnergySampleSpec,
    ScaleFactor,
    TimelikeVector,
    WarpedSpacetime,
    energy_condition_margin,
    metric_at,
    ricci_quadratic_form,
    slice_mean_curvature,
)

__version__ = "0.1.0"

"""Python interface to the diracbvp C++ core."""

from ._core import (
    AcceptanceRow,
    BoundaryOperators,
    CampaignResult,
    CoefficientField,
    ConfigError,
    DimensionMismatch,
    Error,
    InvalidArgument,
    Solution,
    Torus,
    WellPosednessFailure,
    block_campaign,
    duality_campaign,
    hodge_campaign,
    poisson_extension,
    rellich_campaign,
    run_acceptance,
    smooth_data,
    solve_dirichlet,
    solve_neu_perp,
    solve_neumann,
    solve_regularity_from_potential,
)

__all__ = [name for name in dir() if not name.startswith("_")]

"""Simultaneous best-subset selection for systems of regression models.

The heavy lifting lives in the C++ extension module; this package re-exports
its public surface.
"""

from sbs._core import (  # noqa: F401
    AcfPacf,
    ConstraintSet,
    Criterion,
    Feasibility,
    PanelDataset,
    SarimaFit,
    SarimaOrder,
    SbsProblem,
    SbsSolution,
    SelectionMetrics,
    SimDesign,
    Sps2Config,
    Sps2Result,
    StepwiseFit,
    SvsSolution,
    SystemTruth,
    __version__,
    acf_pacf,
    build_hc_set,
    check_feasible,
    css_loglik,
    exp_smooth,
    expand_transform_grid,
    fit_sarima,
    filter_panel,
    forward_stepwise,
    gen_ar_corr_mvn,
    gen_system,
    lambda_grid,
    metrics,
    ols,
    pred_mse,
    run_experiment,
    run_sps2,
    seasonal_difference,
    select_sarima,
    solve_path,
    solve_sbs,
    svs_m_path,
    svs_m_solve,
    validate_dataset,
    whiten,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]

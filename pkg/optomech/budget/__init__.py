from .decomposition import (
    backaction_dominated_span,
    crossover_power,
    db_ratio,
    noise_budget,
    sql_imprecision_ratio,
    thermal_fraction,
)
from .sweep import (
    SWEEP_COLUMNS,
    SweepPoint,
    SweepResult,
    analyze_spectra,
    point_seed,
    run_sweep,
    sweep_point,
)

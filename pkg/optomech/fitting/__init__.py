from .calibration import CalibrationResult, calibrate_g0
from .lorentzian import (
    WEIGHTINGS,
    CavityFit,
    LorentzianFit,
    fit_group_delay,
    fit_lorentzian,
    initial_guess,
    linewidth_guard,
)
from .optimizer import LeastSquaresResult, damped_gauss_newton

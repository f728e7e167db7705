# Copyright 2024 The optomech Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Lorentzian-plus-floor fits of spectra and group-delay traces.

The model is ``floor + height / (1 + 4 (f - center)^2 / linewidth^2)``. Internally the data
are normalised (frequencies by the guessed centre and width, values by their maximum) and
height and linewidth are optimised in log space, which keeps them positive without
constraints. Two objectives are available:

``linear``
    plain least squares on the values. The covariance is the sandwich estimator with the
    per-bin variance of an averaged periodogram, (model / sqrt(n_avg))^2.
``log``
    least squares on log values, with the mean log-bias of a Gamma(n_avg) bin,
    psi(n_avg) - ln(n_avg), removed for noisy (seeded) spectra. The floor is then also fitted
    in log space. Residuals are homoscedastic with variance psi'(n_avg), which lets the floor
    be recovered when it lies many decades below the peak.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import special

from ..errors import FitError, GridError
from ..physics import OptomechSystem, lorentzian
from ..spectrum import Spectrum
from .optimizer import damped_gauss_newton

logger = logging.getLogger(__name__)

WEIGHTINGS = ("linear", "log")
PARAMETER_NAMES = ("floor", "height", "center", "linewidth")

MIN_BINS = 50
MIN_SPAN_LINEWIDTHS = 10.0
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class LorentzianFit:
    floor: float
    height: float
    center: float
    linewidth: float
    covariance: np.ndarray
    n_iter: int
    converged: bool
    residual_norm: float

    def __post_init__(self):
        cov = np.array(self.covariance, dtype=float).reshape(4, 4)
        object.__setattr__(self, "covariance", 0.5 * (cov + cov.T))

    @property
    def params(self) -> np.ndarray:
        return np.array([self.floor, self.height, self.center, self.linewidth])

    @property
    def stderr(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))

    @property
    def area(self) -> float:
        """Floor-subtracted area, (pi/2) height linewidth."""
        return 0.5 * math.pi * self.height * self.linewidth

    def model(self, freqs) -> np.ndarray:
        return self.floor + self.height * lorentzian(freqs, self.center, self.linewidth)

    def to_dict(self) -> dict:
        return {
            "floor": float(self.floor),
            "height": float(self.height),
            "center": float(self.center),
            "linewidth": float(self.linewidth),
            "covariance": [[float(v) for v in row] for row in self.covariance],
            "n_iter": int(self.n_iter),
            "converged": bool(self.converged),
            "residual_norm": float(self.residual_norm),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LorentzianFit":
        return cls(**{f.name: data[f.name] for f in dataclasses.fields(cls)})


@dataclass(frozen=True)
class CavityFit:
    """Cavity parameters from a group-delay trace."""

    cavity_freq: float
    cavity_linewidth: float
    peak_delay: float
    fit: LorentzianFit


def _unconverged(floor, height, center, linewidth, n_iter=0) -> LorentzianFit:
    return LorentzianFit(
        floor, height, center, linewidth, np.zeros((4, 4)), n_iter, False, float("nan")
    )


def _half_max_width(freqs: np.ndarray, values: np.ndarray, i_max: int, level: float):
    """Full width where ``values`` exceed ``level`` around ``i_max``, linearly interpolated."""
    j = i_max
    while j > 0 and values[j - 1] >= level:
        j -= 1
    if j == 0:
        return None
    left = freqs[j - 1] + (level - values[j - 1]) * (freqs[j] - freqs[j - 1]) / (
        values[j] - values[j - 1]
    )
    k = i_max
    last = len(values) - 1
    while k < last and values[k + 1] >= level:
        k += 1
    if k == last:
        return None
    right = freqs[k] + (values[k] - level) * (freqs[k + 1] - freqs[k]) / (
        values[k] - values[k + 1]
    )
    return right - left


def _guess_from_arrays(freqs: np.ndarray, values: np.ndarray) -> LorentzianFit:
    floor = float(np.median(values))
    i_max = int(np.argmax(values))  # first maximum, i.e. the lowest frequency on ties
    height = float(values[i_max] - floor)
    center = float(freqs[i_max])
    width = None
    if height > 0:
        width = _half_max_width(freqs, values, i_max, floor + 0.5 * height)
    if width is None or not width > 0:
        width = float(freqs[-1] - freqs[0]) / 100.0
    return _unconverged(floor, height, center, float(width))


def _check_bins(n_bins: int):
    if n_bins < MIN_BINS:
        raise GridError(f"a Lorentzian fit needs at least {MIN_BINS} bins, got {n_bins}")


def initial_guess(spec: Spectrum) -> LorentzianFit:
    """Starting point for :func:`fit_lorentzian`.

    floor = median, center = frequency of the maximum, height = maximum - floor, linewidth =
    interpolated full width at half height (span / 100 when no crossing exists on both sides).
    """
    _check_bins(len(spec))
    return _guess_from_arrays(spec.freqs, spec.values)


class _NormalizedLorentzian:
    """Residuals and Jacobian of the normalised problem.

    Parameters: [floor or ln floor, ln height, center offset, ln linewidth], with frequencies
    in units of the guessed width around the guessed centre and values in units of ``scale``.
    """

    def __init__(self, x: np.ndarray, y: np.ndarray, log_residuals: bool, bias: float = 0.0):
        self.x = x
        self.y = y
        self.log_residuals = log_residuals
        self.log_y = np.log(y) if log_residuals else None
        self.bias = bias

    def unpack(self, q: np.ndarray):
        floor = math.exp(q[0]) if self.log_residuals else q[0]
        return floor, math.exp(q[1]), q[2], math.exp(q[3])

    def _model_and_columns(self, q: np.ndarray):
        floor, height, center, width = self.unpack(q)
        u = 2.0 * (self.x - center) / width
        shape = 1.0 / (1.0 + u**2)
        model = floor + height * shape
        columns = np.empty((len(self.x), 4))
        columns[:, 0] = floor if self.log_residuals else 1.0
        columns[:, 1] = height * shape
        columns[:, 2] = height * 4.0 * u * shape**2 / width
        columns[:, 3] = height * 2.0 * u**2 * shape**2
        return model, columns

    def residuals(self, q: np.ndarray) -> np.ndarray:
        try:
            model, _ = self._model_and_columns(q)
        except OverflowError:
            return np.full(len(self.x), np.inf)
        if self.log_residuals:
            if np.any(model <= 0):
                return np.full(len(self.x), np.inf)
            return np.log(model) - self.log_y + self.bias
        return model - self.y

    def jacobian(self, q: np.ndarray) -> np.ndarray:
        model, columns = self._model_and_columns(q)
        if self.log_residuals:
            return columns / model[:, None]
        return columns

    def linear_jacobian(self, floor, height, center, width) -> Tuple[np.ndarray, np.ndarray]:
        """Model and Jacobian with respect to linear (floor, height, center, width)."""
        u = 2.0 * (self.x - center) / width
        shape = 1.0 / (1.0 + u**2)
        columns = np.empty((len(self.x), 4))
        columns[:, 0] = 1.0
        columns[:, 1] = shape
        columns[:, 2] = height * 4.0 * u * shape**2 / width
        columns[:, 3] = height * 2.0 * u**2 * shape**2 / width
        return floor + height * shape, columns


def _inverse_normal_matrix(J: np.ndarray) -> Optional[np.ndarray]:
    """(J^T J)^-1 with Jacobi scaling, or None when the problem is ill-conditioned."""
    A = J.T @ J
    d = np.sqrt(np.diag(A))
    if not np.all(np.isfinite(d)) or np.any(d == 0):
        return None
    scaled = A / np.outer(d, d)
    if not np.isfinite(np.linalg.cond(scaled)) or np.linalg.cond(scaled) > MAX_CONDITION:
        return None
    return np.linalg.inv(scaled) / np.outer(d, d)


def _fit_peak(
    freqs: np.ndarray,
    values: np.ndarray,
    guess: LorentzianFit,
    weighting: str,
    n_avg: Optional[int],
    noisy: bool,
    max_iter: int,
) -> LorentzianFit:
    """Fit the normalised problem and map the result back to physical units."""
    scale = float(np.max(values))
    x = (freqs - guess.center) / guess.linewidth
    y = values / scale
    log_residuals = weighting == "log"

    if log_residuals:
        if np.any(y <= 0):
            raise ValueError("log weighting needs strictly positive spectrum values")
        bias = float(special.digamma(n_avg) - math.log(n_avg)) if noisy else 0.0
        floor0 = math.log(max(guess.floor / scale, 1e-300))
    else:
        bias = 0.0
        floor0 = guess.floor / scale
    problem = _NormalizedLorentzian(x, y, log_residuals, bias)
    q0 = np.array([floor0, math.log(guess.height / scale), 0.0, 0.0])

    result = damped_gauss_newton(problem.residuals, problem.jacobian, q0, max_iter=max_iter)
    floor_n, height_n, center_n, width_n = problem.unpack(result.params)

    floor = scale * floor_n
    height = scale * height_n
    center = guess.center + guess.linewidth * center_n
    linewidth = guess.linewidth * width_n

    model_n, J = problem.linear_jacobian(floor_n, height_n, center_n, width_n)
    cov_n = None
    if not np.all(np.isfinite(J)):
        logger.debug("non-finite Jacobian at the solution")
    elif log_residuals:
        # residual variance of ln Gamma(n)/n is the trigamma function at n
        inverse = _inverse_normal_matrix(J / model_n[:, None]) if np.all(model_n > 0) else None
        if inverse is not None:
            cov_n = float(special.polygamma(1, n_avg)) * inverse
    elif n_avg is not None:
        inverse = _inverse_normal_matrix(J)
        if inverse is not None:
            sigma2 = model_n**2 / n_avg
            cov_n = inverse @ (J.T @ (J * sigma2[:, None])) @ inverse
    else:
        inverse = _inverse_normal_matrix(J)
        if inverse is not None:
            cov_n = (result.cost / max(len(x) - 4, 1)) * inverse

    usable = cov_n is not None and np.all(np.isfinite(cov_n))
    if usable:
        units = np.array([scale, scale, guess.linewidth, guess.linewidth])
        covariance = cov_n * np.outer(units, units)
    else:
        covariance = np.zeros((4, 4))

    if log_residuals:
        residual_norm = float(np.sqrt(np.mean(result.residuals**2)))
    else:
        residual_norm = float(np.sqrt(np.mean(result.residuals**2)) / height_n)

    params_finite = all(math.isfinite(v) for v in (floor, height, center, linewidth))
    converged = (
        result.converged
        and usable
        and params_finite
        and height > 0
        and linewidth > 0
        and freqs[0] <= center <= freqs[-1]
        and linewidth < freqs[-1] - freqs[0]
    )
    if not converged:
        logger.debug("fit flagged unconverged: %s (usable covariance=%s)", result.message, usable)
    fit = LorentzianFit(
        floor, height, center, linewidth, covariance, result.n_iter, converged, residual_norm
    )
    return fit


def fit_lorentzian(
    spec: Spectrum,
    init: Optional[LorentzianFit] = None,
    weighting: str = "linear",
    max_iter: int = 200,
) -> LorentzianFit:
    """Fit floor, height, center and linewidth of the peak in ``spec``.

    Non-convergence is reported through ``converged=False``, never raised.
    """
    if weighting not in WEIGHTINGS:
        raise ValueError(f"weighting must be one of {WEIGHTINGS}, got {weighting!r}")
    _check_bins(len(spec))
    guess = init if init is not None else initial_guess(spec)
    span = float(spec.freqs[-1] - spec.freqs[0])
    if not guess.linewidth > 0 or span < MIN_SPAN_LINEWIDTHS * guess.linewidth:
        raise GridError(
            f"spectrum spans {span:g} Hz, less than {MIN_SPAN_LINEWIDTHS:g} linewidths "
            f"of {guess.linewidth:g} Hz"
        )
    if not guess.height > 0:
        logger.info("no peak above the median floor; fit not attempted")
        return _unconverged(guess.floor, guess.height, guess.center, guess.linewidth)

    fit = _fit_peak(
        spec.freqs,
        spec.values,
        guess,
        weighting,
        spec.n_avg,
        noisy=not spec.is_noise_free,
        max_iter=max_iter,
    )
    if fit.converged and fit.floor < 0:
        fit = dataclasses.replace(fit, converged=False)
    return fit


def fit_group_delay(
    freqs: np.ndarray, delays: np.ndarray, init: Optional[LorentzianFit] = None
) -> CavityFit:
    """Lorentzian fit of a cavity group-delay trace; kappa/2pi is the fitted FWHM."""
    freqs = np.asarray(freqs, dtype=float)
    delays = np.asarray(delays, dtype=float)
    _check_bins(len(freqs))
    if np.any(np.diff(freqs) <= 0):
        raise GridError("probe frequencies must be strictly increasing")
    guess = init if init is not None else _guess_from_arrays(freqs, delays)
    if not guess.height > 0:
        raise FitError("group delay trace has no peak")
    fit = _fit_peak(freqs, delays, guess, "linear", None, noisy=False, max_iter=200)
    return CavityFit(fit.center, fit.linewidth, fit.height, fit)


def linewidth_guard(fit: LorentzianFit, sys: OptomechSystem, tolerance: float = 0.05) -> bool:
    """True when the fitted linewidth is within ``tolerance`` of the intrinsic Gamma_m/2pi.

    A larger deviation indicates dynamical backaction from residual detuning.
    """
    if not fit.converged:
        raise FitError("linewidth guard needs a converged fit")
    return abs(fit.linewidth - sys.mech_linewidth) / sys.mech_linewidth <= tolerance

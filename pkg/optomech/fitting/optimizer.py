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

"""Damped Gauss-Newton (Levenberg-Marquardt) least squares with an analytic Jacobian."""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

logger = logging.getLogger(__name__)

ResidualFn = Callable[[np.ndarray], np.ndarray]
JacobianFn = Callable[[np.ndarray], np.ndarray]


@dataclass
class LeastSquaresResult:
    params: np.ndarray
    residuals: np.ndarray
    jacobian: np.ndarray
    cost: float
    n_iter: int
    converged: bool
    message: str


def _cost(residuals: np.ndarray) -> float:
    if not np.all(np.isfinite(residuals)):
        return np.inf
    return float(residuals @ residuals)


def damped_gauss_newton(
    residual_fn: ResidualFn,
    jacobian_fn: JacobianFn,
    p0: np.ndarray,
    max_iter: int = 200,
    xtol: float = 1e-10,
    ftol: float = 1e-12,
    damping: float = 1e-3,
    max_damping: float = 1e16,
) -> LeastSquaresResult:
    """Minimise ``sum(residual_fn(p) ** 2)`` starting from ``p0``.

    Each iteration solves (J^T J + lambda diag(J^T J)) dp = -J^T r. A trial that lowers the
    cost is accepted and lambda is divided by 10; otherwise lambda is multiplied by 10.
    Convergence: relative step below ``xtol`` or relative cost decrease below ``ftol``.
    Every trial step counts as one iteration.
    """
    p = np.array(p0, dtype=float)
    with np.errstate(all="ignore"):
        r = residual_fn(p)
    cost = _cost(r)
    if not np.isfinite(cost):
        return LeastSquaresResult(
            p, r, np.full((len(r), len(p)), np.nan), cost, 0, False, "non-finite start"
        )
    J = jacobian_fn(p)
    lam = damping
    n_iter = 0
    converged = False
    message = "maximum number of iterations reached"

    while n_iter < max_iter:
        n_iter += 1
        A = J.T @ J
        g = J.T @ r
        scale = np.diag(A).copy()
        scale[~(scale > 0)] = 1.0
        try:
            step = np.linalg.solve(A + lam * np.diag(scale), -g)
        except np.linalg.LinAlgError:
            step = None
        if step is None or not np.all(np.isfinite(step)):
            lam *= 10.0
            if lam > max_damping:
                message = "singular normal equations"
                break
            continue

        small_step = np.linalg.norm(step) < xtol * (np.linalg.norm(p) + xtol)
        trial = p + step
        with np.errstate(all="ignore"):
            r_trial = residual_fn(trial)
        cost_trial = _cost(r_trial)

        if cost_trial < cost:
            decrease = (cost - cost_trial) / cost
            p, r, cost = trial, r_trial, cost_trial
            with np.errstate(all="ignore"):
                J = jacobian_fn(p)
            lam /= 10.0
            if small_step:
                converged, message = True, "relative step below tolerance"
                break
            if decrease < ftol or cost == 0.0:
                converged, message = True, "relative cost decrease below tolerance"
                break
        else:
            if small_step:
                # no representable improvement left around p
                converged, message = True, "relative step below tolerance"
                break
            lam *= 10.0
            if lam > max_damping:
                message = "damping exceeded its limit"
                break

    logger.debug("damped Gauss-Newton: %s after %d iterations (cost=%.3e)", message, n_iter, cost)
    return LeastSquaresResult(p, r, J, cost, n_iter, converged, message)

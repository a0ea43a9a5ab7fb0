import logging
from math import sqrt
from typing import Callable, List

import numpy as np

from errors import NoConvergenceError

LOGGER = logging.getLogger('olfact')


class ProximalResult:

    def __init__(self, x: np.ndarray, objective: float, iterations: int, kkt_residual: float, restarts: int, objective_trace: List[float], stalled: bool = False):
        self.x = x
        self.objective = objective
        self.iterations = iterations
        self.kkt_residual = kkt_residual
        self.restarts = restarts
        self.objective_trace = objective_trace
        self.stalled = stalled


def accelerated_proximal_gradient(
        smooth: Callable[[np.ndarray], float],
        gradient: Callable[[np.ndarray], np.ndarray],
        prox: Callable[[np.ndarray, float], np.ndarray],
        penalty: Callable[[np.ndarray], float],
        x0: np.ndarray,
        lipschitz: float,
        tol: float,
        max_iter: int,
        name: str = 'problem') -> ProximalResult:
    '''
    Minimizes smooth(x) + penalty(x) with a monotone accelerated proximal gradient method.

    prox(v, step) must return the minimizer of penalty(x) * step + 1/2 ||x - v||^2.
    Whenever the accelerated candidate fails to lower the objective the momentum is dropped and a plain
    proximal step is taken from the current iterate, so the objective never increases.

    The method stops once the relative KKT residual (norm of the gradient mapping divided by
    max(1, ||grad f(0)||)) is at most tol. It also stops when the plain step cannot lower the objective
    either: a plain step of length 1/L decreases the objective by at least L/2 ||x+ - x||^2, so the iterate
    is optimal to floating point precision and would never move again. The KKT residual reached is
    reported in both cases. NoConvergenceError is raised only when max_iter runs out while the iterate
    is still moving.
    '''
    def objective(x):
        return smooth(x) + penalty(x)

    x = np.array(x0, dtype=float)
    if lipschitz <= 0:
        # smooth part is constant, every penalty used here is minimized at zero
        x = np.zeros_like(x)
        value = objective(x)
        return ProximalResult(x, value, 0, 0.0, 0, [value])

    step = 1.0 / lipschitz
    scale = max(1.0, float(np.linalg.norm(gradient(np.zeros_like(x)))))

    def kkt_residual(point):
        mapped = prox(point - step * gradient(point), step)
        return lipschitz * float(np.linalg.norm(point - mapped)) / scale

    fx = objective(x)
    trace = [fx]
    residual = kkt_residual(x)
    if residual <= tol:
        return ProximalResult(x, fx, 0, residual, 0, trace)

    y = x.copy()
    t = 1.0
    restarts = 0
    LOGGER.debug(f'Solving {name}: shape {x.shape}, lipschitz {lipschitz:.6g}, tol {tol:g}.')

    for iteration in range(1, max_iter + 1):
        candidate = prox(y - step * gradient(y), step)
        f_candidate = objective(candidate)

        if f_candidate >= fx:
            restarts += 1
            t = 1.0
            candidate = prox(x - step * gradient(x), step)
            f_candidate = objective(candidate)
            if f_candidate >= fx:
                LOGGER.debug(f'{name} stalled at floating point precision after {iteration} iterations ({restarts} restarts), kkt residual {residual:.3e}.')
                return ProximalResult(x, fx, iteration, residual, restarts, trace, stalled=True)

        x_previous, x, fx = x, candidate, f_candidate
        trace.append(fx)

        t_next = (1.0 + sqrt(1.0 + 4.0 * t * t)) / 2.0
        y = x + ((t - 1.0) / t_next) * (x - x_previous)
        t = t_next

        residual = kkt_residual(x)
        if residual <= tol:
            LOGGER.debug(f'{name} converged after {iteration} iterations ({restarts} restarts), kkt residual {residual:.3e}.')
            return ProximalResult(x, fx, iteration, residual, restarts, trace)

    raise NoConvergenceError(f'{name} did not converge', residual, max_iter)

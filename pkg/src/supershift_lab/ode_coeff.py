"""Coefficient ODEs behind the electric-field and oscillator propagators.

The oscillator pair alpha'' = -4 lam alpha, beta'' = -4 lam beta (with
alpha(0)=0, alpha'(0)=1, beta(0)=1, beta'(0)=0) is integrated with an
embedded Dormand-Prince 5(4) scheme; cubic Hermite interpolation between
accepted steps provides dense output and sign-change bisection locates the
validity horizon.  The electric-field coefficients come from the
regularized first-order form t^2 alpha'(t) = -int_0^t s lam(s) ds, which
removes the t = 0 singularity of the raw equation
t alpha'' + 2 alpha' = -lam.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

# Dormand-Prince 5(4) tableau
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


class DenseSolution:
    """Accepted RK nodes with cubic Hermite evaluation in between."""

    def __init__(self, ts: np.ndarray, ys: np.ndarray, fs: np.ndarray):
        self.ts = ts
        self.ys = ys
        self.fs = fs

    def __call__(self, t: float) -> np.ndarray:
        ts = self.ts
        if not ts[0] <= t <= ts[-1]:
            raise ValueError(f"t={t} outside solved span [{ts[0]}, {ts[-1]}]")
        i = int(np.searchsorted(ts, t, side="right") - 1)
        i = min(max(i, 0), len(ts) - 2)
        h = ts[i + 1] - ts[i]
        if h == 0.0:
            return self.ys[i]
        s = (t - ts[i]) / h
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        return (
            h00 * self.ys[i]
            + h10 * h * self.fs[i]
            + h01 * self.ys[i + 1]
            + h11 * h * self.fs[i + 1]
        )


def solve_rk45(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    t_span: tuple[float, float],
    y0,
    rtol: float = 1e-12,
    atol: float = 1e-14,
    h_max: float = np.inf,
) -> DenseSolution:
    """Adaptive Dormand-Prince 5(4) integration with stored node slopes."""
    t0, t1 = t_span
    y = np.asarray(y0, dtype=float)
    t = t0
    f = np.asarray(rhs(t, y), dtype=float)

    ts, ys, fs = [t], [y.copy()], [f.copy()]
    h = min(h_max, (t1 - t0) / 100.0, 1e-2)
    k = np.empty((7, y.size))

    while t < t1:
        h = min(h, t1 - t, h_max)
        k[0] = f
        for i in range(1, 7):
            k[i] = rhs(t + _DP_C[i] * h, y + h * (_DP_A[i] @ k[:i]))
        y5 = y + h * (_DP_B5 @ k)
        y4 = y + h * (_DP_B4 @ k)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err = float(np.sqrt(np.mean(((y5 - y4) / scale) ** 2)))

        if err <= 1.0:
            t = t + h
            y = y5
            f = np.asarray(rhs(t, y), dtype=float)  # FSAL not reused: keep simple
            ts.append(t)
            ys.append(y.copy())
            fs.append(f.copy())
        factor = 0.9 * (1.0 / err) ** 0.2 if err > 0 else 5.0
        h *= min(5.0, max(0.2, factor))
        if h < 1e-14 * max(1.0, abs(t)):
            raise RuntimeError("step size underflow in solve_rk45")

    return DenseSolution(np.array(ts), np.array(ys), np.array(fs))


def _first_zero(sol: DenseSolution, component: int, t_hi: float) -> float:
    """First positive zero of a solution component, or +inf if none.

    Sign changes are scanned on the accepted nodes (plus midpoints) and
    refined by bisection on the dense output to 1e-12 absolute.
    """
    ts = sol.ts
    probes = np.sort(np.concatenate([ts, 0.5 * (ts[:-1] + ts[1:])]))
    probes = probes[(probes > 0) & (probes <= t_hi)]
    vals = np.array([sol(t)[component] for t in probes])
    sign = np.sign(vals)
    idx = np.where((sign[:-1] > 0) & (sign[1:] <= 0))[0]
    if idx.size == 0:
        return np.inf
    lo, hi = probes[idx[0]], probes[idx[0] + 1]
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if sol(mid)[component] > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12:
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ElectricCoeffs:
    """Phase coefficients of the uniform-field propagator.

    alpha, beta solve t alpha'' + 2 alpha' = -lam, beta' = -t^2 alpha'^2
    with alpha(0) = beta(0) = 0 and t alpha'(t) -> 0.  t_alpha_prime
    returns t * alpha'(t), the combination the kernel phase actually
    uses, which stays well conditioned near t = 0.
    """

    lam: Callable[[float], float]
    t_max: float
    _sol: DenseSolution

    def alpha(self, t: float) -> float:
        return float(self._sol(t)[1])

    def alpha_prime(self, t: float) -> float:
        if t == 0.0:
            return 0.0
        return float(-self._sol(t)[0] / (t * t))

    def t_alpha_prime(self, t: float) -> float:
        if t == 0.0:
            return 0.0
        return float(-self._sol(t)[0] / t)

    def beta(self, t: float) -> float:
        return float(self._sol(t)[2])


@dataclass(frozen=True)
class HarmonicCoeffs:
    """Oscillator coefficient pair with Wronskian alpha' beta - alpha beta' = 1.

    ``horizon`` is the first positive zero of alpha (+inf when alpha stays
    positive on the solved span); ``beta_horizon`` the first zero of beta.
    """

    lam: Callable[[float], float]
    t_max: float
    horizon: float
    beta_horizon: float
    _sol: DenseSolution

    def alpha(self, t: float) -> float:
        return float(self._sol(t)[0])

    def alpha_prime(self, t: float) -> float:
        return float(self._sol(t)[1])

    def beta(self, t: float) -> float:
        return float(self._sol(t)[2])

    def beta_prime(self, t: float) -> float:
        return float(self._sol(t)[3])


def solve_electric(
    lam: Callable[[float], float], t_max: float, tol: float = 1e-12
) -> ElectricCoeffs:
    """Integrate the field coefficients on [0, t_max].

    State (u, alpha, beta) with u(t) = int_0^t s lam(s) ds, so
    alpha' = -u/t^2 and beta' = -(u/t)^2; both right-hand sides extend
    continuously to t = 0 for continuous lam.
    """
    lam0 = float(lam(0.0))

    def rhs(t, y):
        u = y[0]
        if t == 0.0:
            return np.array([0.0, -0.5 * lam0, 0.0])
        w = u / t
        return np.array([t * float(lam(t)), -u / (t * t), -w * w])

    sol = solve_rk45(rhs, (0.0, t_max), [0.0, 0.0, 0.0], rtol=tol, atol=tol * 1e-2,
                     h_max=min(0.01, t_max / 20.0))
    return ElectricCoeffs(lam=lam, t_max=t_max, _sol=sol)


def solve_harmonic(
    lam: Callable[[float], float], t_max: float, tol: float = 1e-13
) -> HarmonicCoeffs:
    """Integrate the oscillator pair on [0, t_max] and locate horizons."""

    def rhs(t, y):
        c = -4.0 * float(lam(t))
        return np.array([y[1], c * y[0], y[3], c * y[2]])

    sol = solve_rk45(
        rhs,
        (0.0, t_max),
        [0.0, 1.0, 1.0, 0.0],
        rtol=tol,
        atol=tol * 0.1,
        h_max=min(2e-3, t_max / 20.0),
    )
    horizon = _first_zero(sol, 0, t_max)
    beta_horizon = _first_zero(sol, 2, t_max)
    return HarmonicCoeffs(
        lam=lam,
        t_max=t_max,
        horizon=horizon,
        beta_horizon=beta_horizon,
        _sol=sol,
    )


def wronskian_drift(coeffs: HarmonicCoeffs, grid) -> float:
    """max over the grid of |alpha' beta - alpha beta' - 1|."""
    worst = 0.0
    for t in grid:
        y = coeffs._sol(t)
        worst = max(worst, abs(y[1] * y[2] - y[0] * y[3] - 1.0))
    return worst

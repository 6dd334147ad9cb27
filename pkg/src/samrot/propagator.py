"""Analytic propagation from the normalized Hamiltonian.

The normalized Hamiltonian depends on the prime variables only through
``w = u' U'`` and ``V``, so the prime flow is

    u'(t) = u'0 exp(W t),  U'(t) = U'0 exp(-W t),  v'(t) = v'0 + Wv t

with ``W = dK/dw`` and ``Wv = dK/dV``.  Initial prime variables come from the
inverse series; osculating variables at ``t`` from the direct series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .charts import (
    ComplexState,
    andoyer_nonsingular,
    andoyer_to_complex,
    nonsingular_complex,
)
from .errors import GridMismatch, OrderUnavailable, ValidationError
from .oracle import Trajectory, full_hamiltonian
from .series import Monomial, Series, SeriesEvaluator


def _param_bindings(params):
    return {"alpha": params.alpha, "beta": params.beta, "C": params.C,
            "sqrtgamma": params.sqrtgamma}


def _check_order(result, order):
    if order < 0 or order > result.order:
        raise OrderUnavailable(f"order {order} not available (normalized to {result.order})")


def _truncated(seq, order):
    out = Series()
    for n in range(1, order + 1):
        out = out + seq[n - 1] / factorial(n)
    return out


class _Maps:
    """Compiled truncated variable series for one ``(result, order)``."""

    def __init__(self, result, order):
        self.direct = {k: SeriesEvaluator(_truncated(v, order))
                       for k, v in result.direct_series.items()}
        self.inverse = {k: SeriesEvaluator(_truncated(v, order))
                        for k, v in result.inverse_series.items()}


def _maps(result, order):
    cache = result.__dict__.setdefault("_maps_cache", {})
    if order not in cache:
        if not result.direct_series or not result.inverse_series:
            raise OrderUnavailable("normalization was run without variable series")
        cache[order] = _Maps(result, order)
    return cache[order]


def init_prime(state, result, order, params):
    """Prime complex variables at epoch from the truncated inverse series."""
    _check_order(result, order)
    if order == 0:
        return state
    m = _maps(result, order)
    b = _param_bindings(params)
    b.update(u=state.u, U=state.U, V=state.V)
    du = complex(m.inverse["u"](b))
    dU = complex(m.inverse["U"](b))
    dv = complex(m.inverse["v"](b))
    return ComplexState(state.u + du, state.U + dU, state.v + dv.real, state.V,
                        state.lam, state.Lambda)


def _dK_dw(K):
    """``dK/dw`` written as a series in ``u`` alone (evaluate with ``u = w``)."""
    out = {}
    for mono, c in K.terms():
        j = mono["u"]
        if j == 0:
            continue
        e = mono.as_dict()
        e["u"] = j - 1
        e["U"] = 0
        out[Monomial.of(**e)] = c * j
    return Series(out)


def _dK_dV(K):
    out = {}
    for mono, c in K.terms():
        p = mono["V"]
        if p == 0:
            continue
        e = mono.as_dict()
        e["V"] = p - 1
        e["u"] = mono["u"]
        e["U"] = 0
        out[Monomial.of(**e)] = c * p
    return Series(out)


def flow_rates(w, V, params, result, order):
    """``(dK/dw, dK/dV)`` of the normalized Hamiltonian truncated at ``order``."""
    _check_order(result, order)
    K = result.K(order)
    b = _param_bindings(params)
    b.update(u=w, U=1.0, V=V)
    rate_u = complex(_dK_dw(K).evaluate(b))
    rate_v = complex(_dK_dV(K).evaluate(b)).real
    return rate_u, rate_v


@dataclass
class AnalyticSolution:
    order: int
    prime0: ComplexState
    rate_u: complex
    rate_v: float
    params: object
    result: object = field(repr=False)

    def prime_at(self, t):
        t = np.asarray(t, dtype=float)
        e = np.exp(self.rate_u * t)
        return (self.prime0.u * e, self.prime0.U / e,
                self.prime0.v + self.rate_v * t)

    def complex_at(self, t):
        """Osculating ``(u, U, v)`` arrays at times ``t``."""
        up, Up, vp = self.prime_at(t)
        if self.order == 0:
            return up, Up, vp
        m = _maps(self.result, self.order)
        b = _param_bindings(self.params)
        b.update(u=up, U=Up, V=self.prime0.V)
        return (up + m.direct["u"](b), Up + m.direct["U"](b),
                vp + np.real(m.direct["v"](b)))

    def trajectory(self, times):
        times = np.asarray(times, dtype=float)
        u, U, v = self.complex_at(times)
        p = self.params
        x = np.real((u - 1j * U) / math.sqrt(2.0 * p.omega))
        X = np.real(math.sqrt(p.omega / 2.0) * (U - 1j * u))
        Y = np.full(times.shape, self.prime0.V / p.sqrtgamma)
        y = p.sqrtgamma * v
        H = full_hamiltonian(x, X, Y, p)
        return Trajectory(times, x, X, y, Y, H, self.prime0.lam, self.prime0.Lambda)

    def reality_defect(self, times):
        u, U, _ = self.complex_at(np.asarray(times, dtype=float))
        return np.abs(U - 1j * np.conj(u))


def analytic_solution(andoyer0, params, result, order):
    """Set up the exponential prime flow for the epoch state ``andoyer0``."""
    _check_order(result, order)
    z0 = andoyer_to_complex(andoyer0, params)
    prime = init_prime(z0, result, order, params)
    rate_u, rate_v = flow_rates(prime.u * prime.U, prime.V, params, result, order)
    return AnalyticSolution(order, prime, rate_u, rate_v, params, result)


def propagate_analytic(andoyer0, params, result, order, t):
    """Andoyer state at time ``t``; ``lam`` and ``Lambda`` are constants of the free motion."""
    sol = analytic_solution(andoyer0, params, result, order)
    u, U, v = sol.complex_at(np.array([float(t)]))
    z = ComplexState(complex(u[0]), complex(U[0]), float(v[0]), sol.prime0.V,
                     andoyer0.lam, andoyer0.Lambda)
    return andoyer_nonsingular(nonsingular_complex(z, params, "inverse"), "inverse")


def mu_period(params, M):
    """Period of the main-problem rotation angle, ``2 pi C / M``."""
    return 2.0 * math.pi * params.C / M


@dataclass
class ErrorReport:
    max_abs_err: dict
    times: np.ndarray
    order: int
    delta: float
    xX_max: float
    xX_relative: float

    def to_json(self):
        return {"max_abs_err": dict(self.max_abs_err), "order": self.order,
                "delta": self.delta, "xX_max": self.xX_max,
                "xX_relative": self.xX_relative, "n_samples": int(len(self.times)),
                "t_max": float(self.times[-1]) if len(self.times) else 0.0}


def compare_trajectories(analytic, oracle_traj, order=0):
    """Max absolute errors per component on a common grid (``y`` modulo 2 pi)."""
    a, o = analytic, oracle_traj
    if len(a.times) != len(o.times) or not np.allclose(a.times, o.times, rtol=0, atol=1e-12):
        raise GridMismatch("trajectories are sampled on different grids")
    if not len(a.times):
        raise ValidationError("empty trajectories")
    dy = np.remainder(np.asarray(a.y) - np.asarray(o.y) + math.pi, 2 * math.pi) - math.pi
    errs = {"x": float(np.max(np.abs(a.x - o.x))),
            "X": float(np.max(np.abs(a.X - o.X))),
            "y": float(np.max(np.abs(dy))),
            "H": float(np.max(np.abs(a.H - o.H)))}
    xX = max(errs["x"], errs["X"])
    amp = float(np.max(np.hypot(o.x, o.X)))
    delta = float((o.x[0] ** 2 + o.X[0] ** 2) / (2 * o.Y[0]))
    return ErrorReport(errs, np.asarray(o.times), order, delta, xX,
                       xX / amp if amp > 0 else 0.0)


def run_comparison(andoyer0, params, result, order, times, tol=1e-13):
    """Analytic trajectory, oracle trajectory and their :class:`ErrorReport`."""
    from .oracle import integrate

    sol = analytic_solution(andoyer0, params, result, order)
    ana = sol.trajectory(times)
    ns0 = andoyer_nonsingular(andoyer0, "forward")
    ref = integrate(ns0, params, (times[0], times[-1]), tol=tol, times=times)
    return ana, ref, compare_trajectories(ana, ref, order)



"""First-order gravity-gradient perturbation near the axis of maximum inertia.

The disturbing body moves on a Kepler orbit whose plane is the inertial
reference plane.  Only the terms that survive when ``sin(J/2)`` is neglected
are kept:

    D = -(n^2/4)(a/r)^3 { (C - (A+B)/2)(2 - 3 s^2 + 3 s^2 cos 2t)
        + (3/4)(B - A)[(1-c)^2 cos(2y - 2t) + 2 s^2 cos 2y + (1+c)^2 cos(2y + 2t)] }

with ``t = lam - theta``, ``c = cos i = Lambda/M`` and ``s = sin i``.  The
orbit geometry (``r``, ``theta``) is frozen while solving the homological
equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInclination, NoConvergence, SingularDenominator, ValidationError
from .lie import main_hamiltonian
from .series import partial_derivative


@dataclass(frozen=True)
class OrbitModel:
    a: float
    e: float
    n_mean: float
    phase0: float = 0.0
    theta0: float = 0.0

    def __post_init__(self):
        if not (self.a > 0 and self.n_mean > 0 and 0 <= self.e < 1):
            raise ValidationError("need a > 0, n_mean > 0 and 0 <= e < 1")


@dataclass(frozen=True)
class GravGradGeometry:
    r: float
    theta: float
    vartheta: float
    inc: float
    c: float
    s: float


def solve_kepler(mean_anomaly, e, tol=1e-13, max_iter=50):
    """Eccentric anomaly from Kepler's equation by Newton iteration."""
    Mn = math.remainder(mean_anomaly, 2 * math.pi)
    E = Mn if e < 0.8 else math.copysign(math.pi, Mn) if Mn else 0.0
    for _ in range(max_iter):
        f = E - e * math.sin(E) - Mn
        dE = f / (1.0 - e * math.cos(E))
        E -= dE
        if abs(dE) < tol:
            return E + (mean_anomaly - Mn)
    raise NoConvergence(f"Kepler iteration did not converge (M={mean_anomaly}, e={e})")


def kepler_position(orbit, t):
    """Polar coordinates ``(r, theta)`` of the disturbing body at time ``t``."""
    Mn = orbit.phase0 + orbit.n_mean * t
    E = solve_kepler(Mn, orbit.e)
    e = orbit.e
    r = orbit.a * (1.0 - e * math.cos(E))
    f = 2.0 * math.atan2(math.sqrt(1 + e) * math.sin(E / 2), math.sqrt(1 - e) * math.cos(E / 2))
    return r, orbit.theta0 + f


def geometry(andoyer_state, orbit, t):
    Lam, M = andoyer_state.Lambda, andoyer_state.M
    if abs(Lam) > M:
        raise InvalidInclination("|Lambda| > M")
    r, theta = kepler_position(orbit, t)
    c = Lam / M
    s = math.sqrt(max(0.0, 1.0 - c * c))
    return GravGradGeometry(r, theta, andoyer_state.lam - theta, math.acos(c), c, s)


def _scale(orbit, geo):
    return -orbit.n_mean ** 2 / 4.0 * (orbit.a / geo.r) ** 3


def _terms(geo):
    """``[(weight, phase)]`` of the three ``cos(2y + phase)`` terms."""
    c, s, t = geo.c, geo.s, geo.vartheta
    return [((1 - c) ** 2, -2 * t), (2 * s * s, 0.0), ((1 + c) ** 2, 2 * t)]


def potential_from_geometry(geo, y, orbit, params):
    A, B, C = params.A, params.B, params.C
    k = _scale(orbit, geo)
    s2 = geo.s ** 2
    axial = (C - (A + B) / 2) * (2 - 3 * s2 + 3 * s2 * np.cos(2 * geo.vartheta))
    tri = sum(w * np.cos(2 * y + ph) for w, ph in _terms(geo))
    return k * (axial + 0.75 * (B - A) * tri)


def gravgrad_potential(andoyer_state, nonsingular_y, orbit, params, t):
    """``D`` at time ``t`` for the rotational state and the ``y`` angle."""
    geo = geometry(andoyer_state, orbit, t)
    return float(potential_from_geometry(geo, nonsingular_y, orbit, params))


def average_y(geo, orbit, params):
    """Closed-form mean of ``D`` over ``y``."""
    A, B, C = params.A, params.B, params.C
    s2 = geo.s ** 2
    return _scale(orbit, geo) * (C - (A + B) / 2) * (2 - 3 * s2 + 3 * s2 * math.cos(2 * geo.vartheta))


def average_y_quadrature(geo, orbit, params, n=4096):
    """Trapezoid mean of ``D`` over one ``y`` period (spectrally exact for trigonometric D)."""
    y = 2 * math.pi * np.arange(n) / n
    return float(np.mean(potential_from_geometry(geo, y, orbit, params)))


def _dM_dV(V, uU, params):
    """``dM/dV`` of the main problem bound numerically."""
    dM = partial_derivative(main_hamiltonian(), "V")
    return dM.evaluate({"u": uU, "U": 1.0, "V": V, "C": params.C,
                        "sqrtgamma": params.sqrtgamma})


@dataclass(frozen=True)
class TrigGenerator:
    """``amplitude * sum_k weight_k sin(2y + phase_k)`` with ``amplitude`` a function of (uU, V)."""

    amplitude: complex
    weights: tuple
    phases: tuple

    def __call__(self, y):
        return self.amplitude * sum(w * np.sin(2 * y + ph)
                                    for w, ph in zip(self.weights, self.phases))

    def d_dy(self, y):
        return self.amplitude * sum(2 * w * np.cos(2 * y + ph)
                                    for w, ph in zip(self.weights, self.phases))


def gravgrad_generator(geo, orbit, params, V, uU):
    """Printed and engine-derived particular generators as :class:`TrigGenerator` pairs.

    The engine solution divides each ``exp(+-2iy)`` component of ``D - <D>`` by
    its eigenvalue ``+-2i sqrt(gamma) dM/dV`` under the ``d/dv`` part of the
    main-problem Lie derivative (``d/dv = sqrt(gamma) d/dy``).
    """
    B, A, C = params.B, params.A, params.C
    g = params.gamma
    sg = params.sqrtgamma
    den = 1j * g ** 1.5 * uU - V
    if abs(den) < 1e-12 * abs(V):
        raise SingularDenominator("i gamma^(3/2) uU - V vanishes")
    k = _scale(orbit, geo) * 0.75 * (B - A)
    terms = _terms(geo)
    weights = tuple(w for w, _ in terms)
    phases = tuple(ph for _, ph in terms)
    printed = TrigGenerator(k * (3.0 / 16.0) * C * sg / den, weights, phases)

    mv = complex(_dM_dV(V, uU, params))
    if abs(mv) < 1e-300:
        raise SingularDenominator("dM/dV vanishes")
    # each exp(+-2iy) component is divided by +-2i sqrt(gamma) dM/dV
    engine = TrigGenerator(k / (2.0 * sg * mv), weights, phases)
    return printed, engine


def lie_derivative_full(S, y, uU, V, params):
    """Main-problem Lie derivative of a ``TrigGenerator`` at a point.

    The ``(U d/dU - u d/du)`` part annihilates functions of ``uU``; what is
    left is ``dS/dv * dM/dV`` with ``dS/dv = sqrt(gamma) dS/dy``.
    """
    return params.sqrtgamma * S.d_dy(y) * complex(_dM_dV(V, uU, params))


def homological_residual(S, geo, orbit, params, y, uU, V):
    """``|L(S) - (D - <D>)|`` at the frozen-orbit point."""
    periodic = potential_from_geometry(geo, y, orbit, params) - average_y(geo, orbit, params)
    return abs(lie_derivative_full(S, y, uU, V, params) - periodic)


def generator_ratio(printed, engine):
    """Constant ``printed/engine`` (the trigonometric parts coincide)."""
    if engine.amplitude == 0:
        return complex("nan") if printed.amplitude else 1.0 + 0j
    return printed.amplitude / engine.amplitude


def report(andoyer_state, complex_state, params, orbit, t=0.0):
    """Everything about the gravity-gradient term at one epoch (CLI payload)."""
    y = complex_state.v * params.sqrtgamma
    geo = geometry(andoyer_state, orbit, t)
    uU = complex_state.u * complex_state.U
    V = complex_state.V
    printed, engine = gravgrad_generator(geo, orbit, params, V, uU)
    D = float(potential_from_geometry(geo, y, orbit, params))
    return {
        "D": D,
        "D_avg": average_y(geo, orbit, params),
        "S_paper": complex(printed(y)),
        "S_engine": complex(engine(y)),
        "residual_paper": float(homological_residual(printed, geo, orbit, params, y, uU, V)),
        "residual_engine": float(homological_residual(engine, geo, orbit, params, y, uU, V)),
        "ratio": generator_ratio(printed, engine),
    }

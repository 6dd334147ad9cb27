"""Body parameters and the canonical charts of short-axis-mode rotation.

Charts, all canonical with unit multiplier:

* Andoyer ``(lam, mu, nu, Lambda, M, N)``;
* nonsingular ``(x, X, y, Y)`` with ``x = -sqrt(2(M-N)) sin nu``,
  ``X = sqrt(2(M-N)) cos nu``, ``y = mu + nu``, ``Y = M``;
* complex ``(u, U, v, V)`` with ``x = (u - iU)/sqrt(2 omega)``,
  ``X = sqrt(omega/2)(U - iu)``, ``y = sqrt(gamma) v``, ``Y = V/sqrt(gamma)``;
* action-angle ``(ell, L)`` of the main-problem oscillator.

``lam`` and ``Lambda`` are carried through unchanged in every chart.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import (
    ChartMismatch,
    DegenerateBody,
    InvalidMomentum,
    InvalidOrdering,
    InvalidParams,
    NotSAM,
    ValidationError,
)

TWO_PI = 2.0 * math.pi


class SAMValidityWarning(UserWarning):
    """Emitted when ``(M - N)/M > 0.5``; the perturbative ordering is poor there."""


def wrap_angle(a):
    """Map ``a`` into ``(-pi, pi]``."""
    r = math.remainder(a, TWO_PI)
    return math.pi if r == -math.pi else r


@dataclass(frozen=True)
class BodyParams:
    A: float
    B: float
    C: float
    alpha: float
    beta: float
    omega: float
    gamma: float

    @property
    def sqrtgamma(self):
        return math.sqrt(self.gamma)

    def as_dict(self):
        return {"A": self.A, "B": self.B, "C": self.C, "alpha": self.alpha,
                "beta": self.beta, "omega": self.omega, "gamma": self.gamma}


def derive_params(A, B, C):
    """Triaxiality parameters from the principal moments ``A <= B <= C``.

    >>> p = derive_params(1.0, 2.0, 3.0)
    >>> p.alpha, p.beta, p.omega, p.gamma
    (1.25, 0.6, 2.0, 1.0)
    """
    A, B, C = float(A), float(B), float(C)
    if not (A > 0 and B > 0 and C > 0) or not (A <= B <= C):
        raise InvalidOrdering(f"need 0 < A <= B <= C, got {(A, B, C)}")
    if A == C:
        raise DegenerateBody("A = B = C: alpha vanishes and beta is indeterminate")
    if B == C:
        raise NotSAM("B = C gives beta = 1 and an unbounded frequency")
    ka = C / A - 1.0
    kb = C / B - 1.0
    alpha = 0.5 * (ka + kb)
    beta = (ka - kb) / (ka + kb)
    omega = math.sqrt((1.0 + beta) / (1.0 - beta))
    gamma = math.sqrt(ka * kb)
    return BodyParams(A, B, C, alpha, beta, omega, gamma)


def nondimensional_params(A, B, C):
    """Parameters with the moments rescaled so that ``C = 1``."""
    return derive_params(A / C, B / C, 1.0)


@dataclass(frozen=True)
class AndoyerState:
    lam: float
    mu: float
    nu: float
    Lambda: float
    M: float
    N: float
    nu_undefined: bool = False

    def __post_init__(self):
        if not self.M > 0:
            raise InvalidMomentum("total angular momentum M must be positive")
        if abs(self.N) > self.M * (1 + 1e-12) or abs(self.Lambda) > self.M * (1 + 1e-12):
            raise InvalidMomentum("need |N| <= M and |Lambda| <= M")
        for name in ("lam", "mu", "nu"):
            object.__setattr__(self, name, wrap_angle(getattr(self, name)))

    @property
    def J(self):
        return math.acos(max(-1.0, min(1.0, self.N / self.M)))

    @property
    def delta(self):
        return (self.M - self.N) / self.M

    @classmethod
    def from_inclination(cls, J, M=1.0, nu=0.0, mu=0.0, lam=0.0, Lambda=None):
        """Build a state from the inclination ``J`` between invariable and equatorial planes."""
        return cls(lam, mu, nu, M if Lambda is None else Lambda, M, M * math.cos(J))


@dataclass(frozen=True)
class NonsingularState:
    x: float
    X: float
    y: float
    Y: float
    lam: float = 0.0
    Lambda: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "y", wrap_angle(self.y))


@dataclass(frozen=True)
class ComplexState:
    u: complex
    U: complex
    v: float
    V: float
    lam: float = 0.0
    Lambda: float = 0.0

    @property
    def w(self):
        return self.u * self.U

    def reality_defect(self):
        """``|U - i conj(u)|``; zero on the physical slice."""
        return abs(self.U - 1j * self.u.conjugate())


@dataclass(frozen=True)
class ActionAngleState:
    ell: float
    L: float
    y: float = 0.0
    Y: float = 0.0
    ell_undefined: bool = False

    def __post_init__(self):
        object.__setattr__(self, "ell", wrap_angle(self.ell))


def _check_direction(direction):
    if direction not in ("forward", "inverse"):
        raise ValidationError(f"direction must be 'forward' or 'inverse', not {direction!r}")


def _sam_guard(M, N):
    if (M - N) / M > 0.5:
        warnings.warn(f"(M-N)/M = {(M - N) / M:.3g} exceeds 0.5; not short-axis-mode",
                      SAMValidityWarning, stacklevel=3)


def andoyer_nonsingular(state, direction="forward"):
    _check_direction(direction)
    if direction == "forward":
        if not isinstance(state, AndoyerState):
            raise ChartMismatch("forward map expects an AndoyerState")
        if state.N > state.M:
            raise InvalidMomentum("N > M")
        _sam_guard(state.M, state.N)
        rho = math.sqrt(2.0 * (state.M - state.N))
        return NonsingularState(-rho * math.sin(state.nu), rho * math.cos(state.nu),
                                state.mu + state.nu, state.M, state.lam, state.Lambda)
    if not isinstance(state, NonsingularState):
        raise ChartMismatch("inverse map expects a NonsingularState")
    x, X, Y = state.x, state.X, state.Y
    half = 0.5 * (x * x + X * X)
    if not Y > 0 or half > Y * (1 + 1e-12):
        raise InvalidMomentum("need Y > 0 and (x^2 + X^2)/2 <= Y")
    undefined = x == 0.0 and X == 0.0
    nu = 0.0 if undefined else math.atan2(-x, X)
    return AndoyerState(state.lam, state.y - nu, nu, state.Lambda, Y, Y - half,
                        nu_undefined=undefined)


def _check_params(params):
    if not (params.gamma > 0 and params.omega > 0):
        raise InvalidParams("need gamma > 0 and omega > 0")


def nonsingular_complex(state, params, direction="forward"):
    _check_direction(direction)
    _check_params(params)
    w = params.omega
    sg = params.sqrtgamma
    if direction == "forward":
        if not isinstance(state, NonsingularState):
            raise ChartMismatch("forward map expects a NonsingularState")
        a = math.sqrt(w / 2.0) * state.x
        b = state.X / math.sqrt(2.0 * w)
        return ComplexState(complex(a, b), complex(b, a), state.y / sg, state.Y * sg,
                            state.lam, state.Lambda)
    if not isinstance(state, ComplexState):
        raise ChartMismatch("inverse map expects a ComplexState")
    x, X = complex_to_cartesian(state.u, state.U, params)
    return NonsingularState(x.real, X.real, sg * state.v, state.V / sg,
                            state.lam, state.Lambda)


def complex_to_cartesian(u, U, params):
    """Literal ``(x, X)`` from ``(u, U)``, complex-valued off the physical slice."""
    w = params.omega
    return (u - 1j * U) / math.sqrt(2.0 * w), math.sqrt(w / 2.0) * (U - 1j * u)


def nonsingular_actionangle(state, params, direction="forward"):
    _check_direction(direction)
    _check_params(params)
    w = params.omega
    if direction == "forward":
        if not isinstance(state, NonsingularState):
            raise ChartMismatch("forward map expects a NonsingularState")
        x, X = state.x, state.X
        L = (X * X + w * w * x * x) / (2.0 * w)
        undefined = x == 0.0 and X == 0.0
        ell = 0.0 if undefined else math.atan2(w * x, X)
        return ActionAngleState(ell, L, state.y, state.Y, ell_undefined=undefined)
    if not isinstance(state, ActionAngleState):
        raise ChartMismatch("inverse map expects an ActionAngleState")
    if state.L < 0:
        raise InvalidMomentum("action L must be non-negative")
    x = math.sqrt(2.0 * state.L / w) * math.sin(state.ell)
    X = math.sqrt(2.0 * w * state.L) * math.cos(state.ell)
    return NonsingularState(x, X, state.y, state.Y)


_CHART_TYPES = {"andoyer": AndoyerState, "nonsingular": NonsingularState,
                "complex": ComplexState}


def evaluate_hamiltonian(chart, state, params, part="full"):
    """Main problem, perturbation or full torque-free Hamiltonian in ``chart``.

    The complex chart returns a complex number (real on the physical slice);
    the other charts return floats.
    """
    if chart not in _CHART_TYPES:
        raise ValidationError(f"unknown chart {chart!r}")
    if not isinstance(state, _CHART_TYPES[chart]):
        raise ChartMismatch(f"{type(state).__name__} is not a {chart} state")
    if part not in ("main", "perturbation", "full"):
        raise ValidationError(f"unknown part {part!r}")
    a, b, C = params.alpha, params.beta, params.C
    if chart == "andoyer":
        M, N = state.M, state.N
        _sam_guard(M, N)
        d = 1.0 - N / M
        tri = 1.0 - b * math.cos(2.0 * state.nu)
        if part == "main":
            return M * M / (2 * C) * (1.0 + 2.0 * a * d * tri)
        if part == "perturbation":
            return -M * M / (2 * C) * a * d * d * tri
        s = 1.0 - (N / M) ** 2
        return M * M / (2 * C) * (1.0 + a * s - a * b * s * math.cos(2.0 * state.nu))
    if chart == "nonsingular":
        x, X, Y = state.x, state.X, state.Y
        main = (Y * Y / (2 * C)
                + Y / C * a * (1 - b) * 0.5 * (X * X + params.omega ** 2 * x * x))
        pert = -a / (8 * C) * ((1 + b) * x ** 4 + 2 * x * x * X * X + (1 - b) * X ** 4)
    else:
        u, U, V = state.u, state.U, state.V
        sg = params.sqrtgamma
        main = V * V / (2 * C * params.gamma) - V * sg / C * 1j * u * U
        pert = a / (4 * C) * (2 * u * u * U * U - 1j * b * (u ** 3 * U - u * U ** 3))
    if part == "main":
        return main
    if part == "perturbation":
        return pert
    return main + pert


def andoyer_to_complex(state, params):
    return nonsingular_complex(andoyer_nonsingular(state, "forward"), params, "forward")


def complex_to_andoyer(state, params):
    return andoyer_nonsingular(nonsingular_complex(state, params, "inverse"), "inverse")

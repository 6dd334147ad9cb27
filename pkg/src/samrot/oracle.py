"""Reference integration of the exact torque-free equations in the nonsingular chart."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .charts import NonsingularState, wrap_angle
from .errors import StepFailure, ValidationError

# DOP853 refuses relative tolerances below this
_RTOL_FLOOR = 100 * np.finfo(float).eps


def hamiltonian_rhs(state, params):
    """Canonical equations of the full Hamiltonian: ``(dx, dX, dy, dY)``."""
    x, X, Y = state.x, state.X, state.Y
    a, b, C = params.alpha, params.beta, params.C
    dx = Y / C * a * (1 - b) * X - a / (2 * C) * (x * x * X + (1 - b) * X ** 3)
    dX = -Y / C * a * (1 + b) * x + a / (2 * C) * ((1 + b) * x ** 3 + x * X * X)
    dy = Y / C + a / (2 * C) * ((1 - b) * X * X + (1 + b) * x * x)
    return dx, dX, dy, 0.0


def full_hamiltonian(x, X, Y, params):
    """Vectorised full Hamiltonian in the nonsingular chart."""
    a, b, C = params.alpha, params.beta, params.C
    main = Y * Y / (2 * C) + Y / (2 * C) * a * ((1 - b) * X * X + (1 + b) * x * x)
    pert = -a / (8 * C) * ((1 + b) * x ** 4 + 2 * x * x * X * X + (1 - b) * X ** 4)
    return main + pert


@dataclass
class Trajectory:
    """Samples ``(times, x, X, y, Y)`` plus ``H``; ``y`` is kept unwrapped."""

    times: np.ndarray
    x: np.ndarray
    X: np.ndarray
    y: np.ndarray
    Y: np.ndarray
    H: np.ndarray
    lam: float = 0.0
    Lambda: float = 0.0

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or (len(t) > 1 and not np.all(np.diff(t) > 0)):
            raise ValidationError("times must be strictly increasing")

    @property
    def states(self):
        return [NonsingularState(float(a), float(b), float(c), float(d), self.lam, self.Lambda)
                for a, b, c, d in zip(self.x, self.X, self.y, self.Y)]

    def to_csv(self, path_or_file):
        rows = zip(self.times, self.x, self.X, self.y, self.Y, self.H)
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "x", "X", "y", "Y", "H"])
            for t, x, X, y, Y, H in rows:
                w.writerow([f"{v:.17g}" for v in (t, x, X, wrap_angle(y), Y, H)])
        finally:
            if own:
                fh.close()


def integrate(state0, params, t_span, tol=1e-12, times=None):
    """Integrate from ``state0`` over ``t_span = (t0, t1)`` with DOP853 (8(5,3)).

    ``Y`` is not integrated: it is a constant of motion and is copied to every
    sample.  ``times`` (default: the two end points) is the output grid; it
    may run backwards when ``t1 < t0``.
    """
    if not 1e-14 <= tol <= 1e-6:
        raise ValidationError("tol must lie in [1e-14, 1e-6]")
    t0, t1 = map(float, t_span)
    if times is None:
        times = np.array([t0, t1])
    times = np.asarray(times, dtype=float)
    Y = float(state0.Y)
    a, b, C = params.alpha, params.beta, params.C
    ka, kb = a * (1 + b), a * (1 - b)

    def rhs(_t, z):
        x, X = z[0], z[1]
        x2, X2 = x * x, X * X
        return [Y / C * kb * X - a / (2 * C) * (x2 * X + (1 - b) * X2 * X),
                -Y / C * ka * x + a / (2 * C) * ((1 + b) * x2 * x + x * X2),
                Y / C + (kb * X2 + ka * x2) / (2 * C)]

    amp = math.hypot(state0.x, state0.X)
    scale = max(amp, 1e-8)
    rtol = max(tol, _RTOL_FLOOR)
    atol = [tol * scale, tol * scale, tol * max(1.0, abs(state0.y))]
    z0 = [state0.x, state0.X, state0.y]
    if t0 == t1:
        xs = np.full(times.shape, state0.x)
        Xs = np.full(times.shape, state0.X)
        ys = np.full(times.shape, state0.y)
    else:
        sol = solve_ivp(rhs, (t0, t1), z0, method="DOP853", rtol=rtol, atol=atol,
                        t_eval=times, dense_output=False)
        if sol.status != 0:
            raise StepFailure(f"integration failed: {sol.message}")
        xs, Xs, ys = sol.y
    Ys = np.full(xs.shape, Y)
    H = full_hamiltonian(xs, Xs, Ys, params)
    order = np.argsort(times)
    return Trajectory(times[order], xs[order], Xs[order], ys[order], Ys[order], H[order],
                      state0.lam, state0.Lambda)

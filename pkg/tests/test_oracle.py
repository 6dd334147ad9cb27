import io
import math
import random

import numpy as np
import pytest

from samrot.charts import NonsingularState, andoyer_nonsingular, derive_params, AndoyerState
from samrot.checks import random_params
from samrot.errors import ValidationError
from samrot.oracle import Trajectory, full_hamiltonian, hamiltonian_rhs, integrate
from samrot.propagator import mu_period

AXI = derive_params(2.0, 2.0, 3.0)


def test_rhs_at_equilibrium():
    p = derive_params(1.0, 2.0, 3.0)
    assert hamiltonian_rhs(NonsingularState(0.0, 0.0, 0.4, 1.0), p) == (0.0, 0.0, pytest.approx(1 / 3), 0.0)


def test_rhs_hand_value():
    dx, dX, _, dY = hamiltonian_rhs(NonsingularState(0.0, 0.2, 0.0, 1.0), AXI)
    assert dx == pytest.approx(0.5 / 3 * 0.2 - 0.5 / 6 * 0.008, rel=1e-14)
    assert dX == 0.0 and dY == 0.0


def test_rhs_matches_finite_differences():
    rng = random.Random(2)
    h = 1e-6
    for _ in range(100):
        p = random_params(rng)
        x, X, Y = rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(0.5, 2)
        dx, dX, dy, dY = hamiltonian_rhs(NonsingularState(x, X, 0.0, Y), p)
        H = lambda a, b, c: full_hamiltonian(a, b, c, p)  # noqa: E731
        assert abs(dx - (H(x, X + h, Y) - H(x, X - h, Y)) / (2 * h)) < 1e-7
        assert abs(dX + (H(x + h, X, Y) - H(x - h, X, Y)) / (2 * h)) < 1e-7
        assert abs(dy - (H(x, X, Y + h) - H(x, X, Y - h)) / (2 * h)) < 1e-7
        assert dY == 0.0


def test_equilibrium_trajectory():
    p = derive_params(1.0, 2.0, 3.0)
    t = np.linspace(0, 50, 11)
    tr = integrate(NonsingularState(0.0, 0.0, 0.1, 1.0), p, (0, 50), times=t)
    assert np.all(tr.x == 0) and np.all(tr.X == 0)
    assert np.allclose(tr.y, 0.1 + t / 3, rtol=0, atol=1e-11)


def _ten_periods(params, tol):
    a = AndoyerState.from_inclination(math.radians(15), nu=0.4)
    s = andoyer_nonsingular(a)
    T = 10 * mu_period(params, a.M)
    return s, T, integrate(s, params, (0, T), tol=tol, times=np.linspace(0, T, 1001))


@pytest.mark.parametrize("params", [AXI, derive_params(1.0, 2.0, 3.0)], ids=["axisymmetric", "triaxial"])
def test_energy_drift(params):
    tol = 1e-12
    _, _, tr = _ten_periods(params, tol)
    assert np.max(np.abs(tr.H - tr.H[0])) / abs(tr.H[0]) < 10 * tol


def test_Y_structurally_constant():
    s, _, tr = _ten_periods(derive_params(1.0, 2.0, 3.0), 1e-10)
    assert np.all(tr.Y == s.Y)


def test_axisymmetric_orbit_is_closed_curve():
    # beta = 0: x^2 + X^2 is conserved by the full flow
    _, _, tr = _ten_periods(AXI, 1e-12)
    r2 = tr.x ** 2 + tr.X ** 2
    assert np.ptp(r2) < 1e-10


@pytest.mark.parametrize("tol", [1e-12, 1e-10])
def test_reversibility(tol):
    p = derive_params(1.0, 2.0, 3.0)
    s, T, tr = _ten_periods(p, tol)
    end = NonsingularState(tr.x[-1], tr.X[-1], tr.y[-1], tr.Y[-1])
    back = integrate(end, p, (T, 0.0), tol=tol, times=np.array([T, 0.0]))
    assert abs(back.x[0] - s.x) < 100 * tol
    assert abs(back.X[0] - s.X) < 100 * tol
    assert abs(math.remainder(back.y[0] - s.y, 2 * math.pi)) < 100 * tol


def test_halving_tol_reduces_error_fourfold():
    p = derive_params(1.0, 2.0, 3.0)
    a = AndoyerState.from_inclination(math.radians(15), nu=0.4)
    s = andoyer_nonsingular(a)
    T = 10 * mu_period(p, a.M)
    end = np.array([0.0, T])
    ref = integrate(s, p, (0, T), tol=1e-14, times=end)

    def err(tol):
        tr = integrate(s, p, (0, T), tol=tol, times=end)
        return math.hypot(tr.x[-1] - ref.x[-1], tr.X[-1] - ref.X[-1])

    for tol in (1e-8, 1e-9):
        assert err(tol) / err(tol / 2) >= 4.0


def test_error_decreases_with_tol():
    p = derive_params(1.0, 2.0, 3.0)
    a = AndoyerState.from_inclination(math.radians(15), nu=0.4)
    s = andoyer_nonsingular(a)
    T = 10 * mu_period(p, a.M)
    end = np.array([0.0, T])
    ref = integrate(s, p, (0, T), tol=1e-14, times=end)
    errs = []
    for tol in (1e-6, 1e-8, 1e-10):
        tr = integrate(s, p, (0, T), tol=tol, times=end)
        errs.append(math.hypot(tr.x[-1] - ref.x[-1], tr.X[-1] - ref.X[-1]))
    assert errs[0] > 10 * errs[1] > 100 * errs[2]


def test_tol_range_enforced():
    s = NonsingularState(0.1, 0.0, 0.0, 1.0)
    with pytest.raises(ValidationError):
        integrate(s, AXI, (0, 1), tol=1e-3)
    with pytest.raises(ValidationError):
        integrate(s, AXI, (0, 1), tol=1e-16)


def test_trajectory_requires_increasing_times():
    z = np.zeros(2)
    with pytest.raises(ValidationError):
        Trajectory(np.array([1.0, 0.0]), z, z, z, z + 1, z)


def test_trajectory_csv():
    p = derive_params(1.0, 2.0, 3.0)
    tr = integrate(NonsingularState(0.1, 0.0, 0.0, 1.0), p, (0, 1), times=np.linspace(0, 1, 3))
    buf = io.StringIO()
    tr.to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "t,x,X,y,Y,H"
    assert len(lines) == 4
    assert [float(v) for v in lines[2].split(",")][0] == 0.5

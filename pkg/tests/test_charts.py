import math
import random
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from samrot import charts
from samrot.charts import (
    ActionAngleState,
    AndoyerState,
    ComplexState,
    NonsingularState,
    andoyer_nonsingular,
    derive_params,
    evaluate_hamiltonian,
    nonsingular_actionangle,
    nonsingular_complex,
)
from samrot.checks import (
    _actionangle_map,
    _andoyer_map,
    _complex_map,
    numeric_jacobian,
    random_params,
    random_sam_state,
    symplectic_defect,
)
from samrot.errors import (
    ChartMismatch,
    DegenerateBody,
    InvalidMomentum,
    InvalidOrdering,
    InvalidParams,
    NotSAM,
)

P123 = derive_params(1.0, 2.0, 3.0)


# -- parameters --------------------------------------------------------------------------

def test_axisymmetric_params():
    p = derive_params(2, 2, 3)
    assert (p.alpha, p.beta, p.omega, p.gamma) == pytest.approx((0.5, 0.0, 1.0, 0.5), abs=1e-15)


def test_triaxial_params():
    assert (P123.alpha, P123.beta, P123.omega, P123.gamma) == pytest.approx((1.25, 0.6, 2.0, 1.0), rel=1e-15)
    # back-substitution into the defining relations
    assert P123.alpha * (1 + P123.beta) == pytest.approx(3 / 1 - 1, rel=1e-14)
    assert P123.alpha * (1 - P123.beta) == pytest.approx(3 / 2 - 1, rel=1e-14)


@pytest.mark.parametrize("moments, exc", [((3, 3, 3), DegenerateBody), ((1, 3, 3), NotSAM),
                                          ((3, 2, 1), InvalidOrdering), ((0, 1, 2), InvalidOrdering)])
def test_params_errors(moments, exc):
    with pytest.raises(exc):
        derive_params(*moments)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.05, 0.99), st.floats(0.0, 1.0))
def test_param_invariants(a_frac, b_frac):
    A = a_frac
    B = A + b_frac * (0.999 - A)
    p = derive_params(A, B, 1.0)
    assert p.alpha * (1 + p.beta) == pytest.approx(1 / A - 1, rel=1e-14)
    assert p.alpha * (1 - p.beta) == pytest.approx(1 / B - 1, rel=1e-14)
    assert 0 <= p.beta < 1
    assert p.omega == pytest.approx(math.sqrt((1 + p.beta) / (1 - p.beta)), rel=1e-14)
    assert p.gamma == pytest.approx(p.alpha * math.sqrt(1 - p.beta ** 2), rel=1e-13)


# -- Andoyer <-> nonsingular -------------------------------------------------------------

def test_equilibrium_maps_to_origin():
    s = andoyer_nonsingular(AndoyerState(0.0, 0.4, 1.1, 0.5, 1.0, 1.0))
    assert s.x == 0 and s.X == 0 and s.Y == 1.0


def test_andoyer_anchor():
    s = andoyer_nonsingular(AndoyerState(0.0, 0.0, math.pi / 2, 0.0, 1.0, 0.98))
    assert s.x == pytest.approx(-0.2, abs=1e-15)
    assert s.X == pytest.approx(0.0, abs=1e-15)
    assert s.y == pytest.approx(math.pi / 2)
    assert s.Y == 1.0


def test_inverse_at_origin_flags_nu():
    a = andoyer_nonsingular(NonsingularState(0.0, 0.0, 0.3, 1.0), "inverse")
    assert a.N == a.M == 1.0 and a.nu == 0.0 and a.nu_undefined


def test_forward_rejects_N_above_M():
    with pytest.raises(InvalidMomentum):
        AndoyerState(0, 0, 0, 0, 1.0, 1.1)


def test_inverse_rejects_large_amplitude():
    with pytest.raises(InvalidMomentum):
        andoyer_nonsingular(NonsingularState(2.0, 0.0, 0.0, 1.0), "inverse")


def test_sam_warning():
    with pytest.warns(charts.SAMValidityWarning):
        andoyer_nonsingular(AndoyerState(0, 0, 0, 0, 1.0, 0.2))


def test_roundtrip_1000_states():
    rng = random.Random(7)
    for _ in range(1000):
        a = random_sam_state(rng)
        b = andoyer_nonsingular(andoyer_nonsingular(a), "inverse")
        assert b.N == pytest.approx(a.N, abs=1e-13)
        assert math.remainder(b.nu - a.nu, 2 * math.pi) == pytest.approx(0, abs=1e-13)
        assert math.remainder(b.mu - a.mu, 2 * math.pi) == pytest.approx(0, abs=1e-13)
        assert (b.lam, b.Lambda) == (a.lam, a.Lambda)


def test_angles_are_wrapped():
    a = AndoyerState(7.0, -4.0, math.pi, 0.0, 1.0, 0.9)
    for ang in (a.lam, a.mu, a.nu):
        assert -math.pi < ang <= math.pi
    assert a.nu == math.pi


# -- complexification ----------------------------------------------------------------------

def test_complex_origin():
    z = nonsingular_complex(NonsingularState(0.0, 0.0, 0.0, 1.0), P123)
    assert z.u == 0 and z.U == 0


def test_complex_anchor_unit():
    z = nonsingular_complex(NonsingularState(1.0, 0.0, 0.0, 1.0), P123)
    assert z.u == pytest.approx(1.0) and z.U == pytest.approx(1j)
    assert (z.v, z.V) == (0.0, 1.0)
    back = nonsingular_complex(z, P123, "inverse")
    assert (back.x, back.X, back.y, back.Y) == pytest.approx((1.0, 0.0, 0.0, 1.0))


def test_complex_anchor_reality():
    z = nonsingular_complex(NonsingularState(-0.2, 0.0, 0.0, 1.0), P123)
    assert z.u == pytest.approx(-0.2) and z.U == pytest.approx(-0.2j)
    assert z.reality_defect() < 1e-15


def test_complex_rejects_bad_params():
    bad = charts.BodyParams(1, 2, 3, 1.0, 0.5, 1.0, 0.0)
    with pytest.raises(InvalidParams):
        nonsingular_complex(NonsingularState(0.1, 0.1, 0.0, 1.0), bad)


@settings(max_examples=200, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-3, 3), st.floats(0.5, 2))
def test_reality_slice_and_oscillator(x, X, y, Y):
    s = NonsingularState(x, X, y, Y)
    z = nonsingular_complex(s, P123)
    assert z.reality_defect() < 1e-13
    osc = 0.5 * (X * X + P123.omega ** 2 * x * x)
    assert abs(osc - (-1j * P123.omega * z.u * z.U)) < 1e-13
    back = nonsingular_complex(z, P123, "inverse")
    assert (back.x, back.X, back.Y) == pytest.approx((x, X, Y), abs=1e-13)


# -- action-angle -----------------------------------------------------------------------

def test_actionangle_cosine_axis():
    a = nonsingular_actionangle(NonsingularState(0.0, 2.0, 0.0, 1.0), P123)
    assert (a.L, a.ell) == pytest.approx((1.0, 0.0))


def test_actionangle_inverse_anchor():
    s = nonsingular_actionangle(ActionAngleState(math.pi / 2, 1.0), P123, "inverse")
    assert s.x == pytest.approx(1.0) and s.X == pytest.approx(0.0, abs=1e-15)


def test_actionangle_origin_flag():
    a = nonsingular_actionangle(NonsingularState(0.0, 0.0, 0.0, 1.0), P123)
    assert a.L == 0 and a.ell == 0 and a.ell_undefined


@settings(max_examples=200, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1))
def test_actionangle_roundtrip(x, X):
    s = NonsingularState(x, X, 0.0, 1.0)
    a = nonsingular_actionangle(s, P123)
    assert 2 * P123.omega * a.L == pytest.approx(X * X + P123.omega ** 2 * x * x, abs=1e-15)
    b = nonsingular_actionangle(a, P123, "inverse")
    assert (b.x, b.X) == pytest.approx((x, X), abs=1e-13)


def test_transformed_state_identities():
    rng = random.Random(3)
    for _ in range(200):
        a = random_sam_state(rng)
        s = andoyer_nonsingular(a)
        assert s.x ** 2 + s.X ** 2 == pytest.approx(2 * (a.M - a.N), abs=1e-14)


# -- Hamiltonian ----------------------------------------------------------------------------

def test_hamiltonian_at_equilibrium():
    a = AndoyerState(0, 0, 0.7, 0, 1.0, 1.0)
    assert evaluate_hamiltonian("andoyer", a, P123) == pytest.approx(1 / 6, rel=1e-15)


def test_hamiltonian_anchor_all_charts():
    a = AndoyerState(0.0, 0.0, math.pi / 2, 0.0, 1.0, 0.98)
    s = andoyer_nonsingular(a)
    z = nonsingular_complex(s, P123)
    for chart, state in (("andoyer", a), ("nonsingular", s), ("complex", z)):
        main = evaluate_hamiltonian(chart, state, P123, "main")
        pert = evaluate_hamiltonian(chart, state, P123, "perturbation")
        full = evaluate_hamiltonian(chart, state, P123, "full")
        assert complex(main) == pytest.approx(0.18, abs=1e-13)
        assert complex(pert) == pytest.approx(-0.0004 / 3, abs=1e-13)
        assert complex(full) == pytest.approx(0.18 - 0.0004 / 3, abs=1e-13)


def test_energy_invariance_1000_states():
    rng = random.Random(11)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", charts.SAMValidityWarning)
        for _ in range(1000):
            p = random_params(rng)
            a = random_sam_state(rng)
            s = andoyer_nonsingular(a)
            z = nonsingular_complex(s, p)
            Ha = evaluate_hamiltonian("andoyer", a, p)
            assert evaluate_hamiltonian("nonsingular", s, p) == pytest.approx(Ha, rel=1e-12)
            Hc = evaluate_hamiltonian("complex", z, p)
            assert abs(Hc - Ha) <= 1e-12 * abs(Ha)


def test_chart_mismatch():
    with pytest.raises(ChartMismatch):
        evaluate_hamiltonian("complex", NonsingularState(0, 0, 0, 1), P123)
    with pytest.raises(ChartMismatch):
        nonsingular_complex(ComplexState(0, 0, 0, 1), P123, "forward")


# -- symplecticity --------------------------------------------------------------------------

def test_symplectic_andoyer_map():
    rng = random.Random(5)
    for _ in range(100):
        M = rng.uniform(0.5, 2)
        z = [rng.uniform(-3, 3), rng.uniform(-3, 3), M, M * (1 - rng.uniform(0.01, 0.3))]
        assert symplectic_defect(numeric_jacobian(_andoyer_map, z)) < 1e-9


def test_symplectic_actionangle_map():
    rng = random.Random(6)
    for _ in range(100):
        z = [rng.uniform(-1, 1), rng.choice((-1, 1)) * rng.uniform(0.2, 1)]
        assert symplectic_defect(numeric_jacobian(_actionangle_map, z)) < 1e-9


def test_symplectic_complex_map():
    rng = random.Random(8)
    for _ in range(100):
        p = random_params(rng)
        z = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)), rng.uniform(-3, 3),
             complex(rng.uniform(-1, 1), rng.uniform(-1, 1)), rng.uniform(0.5, 2)]
        assert symplectic_defect(numeric_jacobian(_complex_map(p), z)) < 1e-9

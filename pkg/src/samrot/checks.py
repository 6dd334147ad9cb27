"""Invariant suite behind ``samrot check``.

Every check returns a :class:`CheckResult`; ``run_all`` collects them.  The
random draws are seeded so the suite is reproducible.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import charts, gravgrad, lie, oracle, propagator, tables
from .series import I, GaussianRational, Monomial, Series, poisson_bracket

SEED = 20240611


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    informational: bool = False

    def line(self):
        tag = "INFO" if self.informational else ("PASS" if self.passed else "FAIL")
        return f"{tag} {self.name}" + (f": {self.detail}" if self.detail else "")


# -- random generators ------------------------------------------------------

def random_series(rng, nterms=3, max_deg=2):
    """Small random series with Gaussian-rational coefficients."""
    terms = {}
    for _ in range(nterms):
        mono = Monomial.of(u=rng.randint(0, max_deg), U=rng.randint(0, max_deg),
                           V=rng.randint(-1, 1), C=rng.randint(-1, 0),
                           alpha=rng.randint(0, 1), beta=rng.randint(0, 1),
                           sqrtgamma=rng.randint(-1, 1))
        c = GaussianRational(Fraction(rng.randint(-5, 5), rng.randint(1, 4)),
                             Fraction(rng.randint(-5, 5), rng.randint(1, 4)))
        terms[mono] = c
    return Series(terms)


def random_params(rng):
    """Ordered moments with a comfortable margin from the degenerate cases."""
    C = 1.0
    A = rng.uniform(0.3, 0.9)
    B = rng.uniform(A, 0.97)
    return charts.derive_params(A, B, C)


def random_sam_state(rng, max_J=math.radians(40)):
    M = rng.uniform(0.5, 2.0)
    J = rng.uniform(0.01, max_J)
    return charts.AndoyerState.from_inclination(
        J, M=M, nu=rng.uniform(-math.pi, math.pi), mu=rng.uniform(-math.pi, math.pi),
        lam=rng.uniform(-math.pi, math.pi), Lambda=rng.uniform(-M, M))


def numeric_jacobian(f, z, h=1e-5):
    """Fourth-order central-difference Jacobian (complex-valued maps allowed)."""
    z = np.asarray(z, dtype=complex)
    cols = []
    for k in range(len(z)):
        e = np.zeros(len(z), dtype=complex)
        e[k] = h
        g = lambda s: np.asarray(f(z + s * e))  # noqa: E731
        cols.append((-g(2) + 8 * g(1) - 8 * g(-1) + g(-2)) / (12 * h))
    return np.array(cols).T


def symplectic_defect(J):
    n = J.shape[0] // 2
    Om = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])
    return float(np.max(np.abs(J.T @ Om @ J - Om)))


# coordinates ordered (q..., p...)
def _andoyer_map(z):
    mu, nu, M, N = (float(np.real(c)) for c in z)
    r = math.sqrt(2 * (M - N))
    return [-r * math.sin(nu), mu + nu, r * math.cos(nu), M]


def _actionangle_map(z):
    # omega = 2
    x, X = (float(np.real(c)) for c in z)
    return [math.atan2(2.0 * x, X), (X * X + 4.0 * x * x) / 4.0]


def _complex_map(params):
    w, sg = params.omega, params.sqrtgamma

    def f(z):
        u, v, U, V = z
        return [(u - 1j * U) / math.sqrt(2 * w), sg * v,
                math.sqrt(w / 2) * (U - 1j * u), V / sg]
    return f


# -- checks -------------------------------------------------------------------

def check_algebra(n_cases=100, n_jacobi=25):
    rng = random.Random(SEED)
    bad = []
    for _ in range(n_cases):
        f, g, h = (random_series(rng) for _ in range(3))
        a = GaussianRational(rng.randint(-3, 3), rng.randint(-3, 3))
        if poisson_bracket(f, g) != -poisson_bracket(g, f):
            bad.append("antisymmetry")
        if poisson_bracket(f.scale(a) + h, g) != poisson_bracket(f, g).scale(a) + poisson_bracket(h, g):
            bad.append("bilinearity")
        if poisson_bracket(f * g, h) != f * poisson_bracket(g, h) + poisson_bracket(f, h) * g:
            bad.append("leibniz")
        if (f + g) + h != f + (g + h) or f + g != g + f:
            bad.append("addition")
        if (f * g) * h != f * (g * h) or f * g != g * f or f * (g + h) != f * g + f * h:
            bad.append("multiplication")
    for _ in range(n_jacobi):
        f, g, h = (random_series(rng, 2, 2) for _ in range(3))
        jac = (poisson_bracket(f, poisson_bracket(g, h)) + poisson_bracket(g, poisson_bracket(h, f))
               + poisson_bracket(h, poisson_bracket(f, g)))
        if jac:
            bad.append("jacobi")
    return CheckResult("series.algebra_laws", not bad,
                       f"{n_cases} cases, {n_jacobi} Jacobi triples" + (f"; failed {sorted(set(bad))}" if bad else ""))


def check_evaluation(n_cases=100):
    rng = random.Random(SEED + 1)
    worst = 0.0
    for _ in range(n_cases):
        f, g = random_series(rng), random_series(rng)
        p = random_params(rng)
        b = {"u": complex(rng.uniform(-1, 1), rng.uniform(-1, 1)),
             "U": complex(rng.uniform(-1, 1), rng.uniform(-1, 1)),
             "V": rng.uniform(0.5, 2), "C": p.C, "alpha": p.alpha, "beta": p.beta}
        lhs = (f * g).evaluate(b)
        rhs = f.evaluate(b) * g.evaluate(b)
        scale = max(abs(rhs), 1e-300)
        worst = max(worst, abs(lhs - rhs) / scale)
    return CheckResult("series.evaluation_homomorphism", worst < 1e-12, f"max rel err {worst:.3g}")


def check_normalization(result):
    out = []
    resid = [n for n in range(1, result.order + 1) if lie.homological_residual(result, n)]
    out.append(CheckResult("lie.homological_exactness", not resid,
                           f"orders 1..{result.order}" + (f"; nonzero at {resid}" if resid else "")))
    purity = all(m["u"] == m["U"] for K in result.K_terms for m, _ in K.terms())
    purity &= all(m["u"] != m["U"] for S in result.S_terms for m, _ in S.terms())
    out.append(CheckResult("lie.kernel_purity", purity))
    homog = True
    for n in range(1, result.order + 1):
        for m, _ in result.K_terms[n].terms():
            homog &= m["u"] + m["U"] == 2 * (n + 1) and m["V"] == 1 - n
    out.append(CheckResult("lie.homogeneity", homog))
    beta2 = all(m["beta"] >= 2 for p in result.p_polys[2:] for m, _ in p.terms())
    out.append(CheckResult("lie.p_divisible_by_beta2", beta2))
    units = []
    for n, match, ratio in tables.compare_p(result.p_polys):
        expected = (-I) ** (n - 1) if n >= 1 else GaussianRational(1)
        units.append(ratio == expected)
    out.append(CheckResult("lie.p_published_up_to_reality_unit", all(units),
                           "engine/published = (-i)^(n-1) for n >= 1"))
    literal = [n for n, match, _ in tables.compare_p(result.p_polys) if not match]
    out.append(CheckResult("lie.p_published_literal", not literal,
                           f"orders differing from the printed list: {literal}", informational=True))
    ratios = [(m, r) for m, _, r in tables.compare_s(result.s_terms, result.s_inexact)]
    out.append(CheckResult("lie.s_factorization_exact", not result.s_inexact,
                           "beta(u^2+U^2) divides every S_m" if not result.s_inexact
                           else f"inexact at {result.s_inexact}"))
    out.append(CheckResult("lie.s_published_ratio", True,
                           ", ".join(f"s{m}: {r}" for m, r in ratios), informational=True))
    if result.direct_series:
        defect = lie.composition_defect(result)
        nz = {v: [k + 1 for k, s in enumerate(d) if s] for v, d in defect.items()}
        ok = not any(nz.values())
        out.append(CheckResult("lie.composition_identity", ok, f"through order {result.order}"))
    return out


def check_charts(n_states=1000, n_symp=100):
    rng = random.Random(SEED + 2)
    worst_rt = worst_H = worst_real = worst_osc = 0.0
    for _ in range(n_states):
        p = random_params(rng)
        a = random_sam_state(rng)
        ns = charts.andoyer_nonsingular(a)
        z = charts.nonsingular_complex(ns, p)
        back = charts.andoyer_nonsingular(charts.nonsingular_complex(z, p, "inverse"), "inverse")
        worst_rt = max(worst_rt, abs(back.N - a.N), abs(math.remainder(back.nu - a.nu, 2 * math.pi)),
                       abs(math.remainder(back.mu - a.mu, 2 * math.pi)))
        Ha = charts.evaluate_hamiltonian("andoyer", a, p)
        Hn = charts.evaluate_hamiltonian("nonsingular", ns, p)
        Hc = charts.evaluate_hamiltonian("complex", z, p)
        worst_H = max(worst_H, abs(Hn - Ha) / abs(Ha), abs(Hc - Ha) / abs(Ha))
        worst_real = max(worst_real, z.reality_defect())
        osc = 0.5 * (ns.X ** 2 + p.omega ** 2 * ns.x ** 2)
        worst_osc = max(worst_osc, abs(osc - (-1j * p.omega * z.u * z.U)))
    out = [
        CheckResult("charts.roundtrip", worst_rt < 1e-12, f"max err {worst_rt:.3g}"),
        CheckResult("charts.energy_invariance", worst_H < 1e-12, f"max rel err {worst_H:.3g}"),
        CheckResult("charts.reality_slice", worst_real < 1e-13, f"max |U - i conj(u)| {worst_real:.3g}"),
        CheckResult("charts.oscillator_consistency", worst_osc < 1e-13, f"max err {worst_osc:.3g}"),
    ]
    worst = 0.0
    for _ in range(n_symp):
        p = random_params(rng)
        M = rng.uniform(0.5, 2)
        z = [rng.uniform(-3, 3), rng.uniform(-3, 3), M, M - rng.uniform(0.01, 0.3) * M]
        worst = max(worst, symplectic_defect(numeric_jacobian(_andoyer_map, z)))
        xz = [rng.uniform(-1, 1), rng.uniform(0.2, 1) * rng.choice((-1, 1))]
        worst = max(worst, symplectic_defect(numeric_jacobian(_actionangle_map, xz)))
        cz = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)), rng.uniform(-3, 3),
              complex(rng.uniform(-1, 1), rng.uniform(-1, 1)), rng.uniform(0.5, 2)]
        worst = max(worst, symplectic_defect(numeric_jacobian(_complex_map(p), cz)))
    out.append(CheckResult("charts.symplecticity", worst < 1e-9, f"max |J^T W J - W| {worst:.3g}"))
    return out


def check_oracle(n_fd=100, periods=10):
    rng = random.Random(SEED + 3)
    worst = 0.0
    for _ in range(n_fd):
        p = random_params(rng)
        s = charts.NonsingularState(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                                    rng.uniform(-3, 3), rng.uniform(0.5, 2))
        rhs = oracle.hamiltonian_rhs(s, p)
        h = 1e-6
        H = lambda x, X, Y: oracle.full_hamiltonian(x, X, Y, p)  # noqa: E731
        fd = ((H(s.x, s.X + h, s.Y) - H(s.x, s.X - h, s.Y)) / (2 * h),
              -(H(s.x + h, s.X, s.Y) - H(s.x - h, s.X, s.Y)) / (2 * h),
              (H(s.x, s.X, s.Y + h) - H(s.x, s.X, s.Y - h)) / (2 * h))
        worst = max(worst, *(abs(a - b) for a, b in zip(rhs[:3], fd)))
    out = [CheckResult("oracle.rhs_finite_difference", worst < 1e-7, f"max err {worst:.3g}")]
    tol = 1e-12
    p = charts.nondimensional_params(1.0, 2.0, 3.0)
    a = charts.AndoyerState.from_inclination(math.radians(10), nu=0.7, mu=0.3)
    ns = charts.andoyer_nonsingular(a)
    T = periods * propagator.mu_period(p, a.M)
    tr = oracle.integrate(ns, p, (0.0, T), tol=tol, times=np.linspace(0.0, T, 20 * periods + 1))
    drift = float(np.max(np.abs(tr.H - tr.H[0])) / abs(tr.H[0]))
    out.append(CheckResult("oracle.energy_drift", drift < 10 * tol, f"rel drift {drift:.3g} over {periods} periods"))
    out.append(CheckResult("oracle.Y_constant", bool(np.all(tr.Y == ns.Y))))
    end = charts.NonsingularState(tr.x[-1], tr.X[-1], tr.y[-1], tr.Y[-1])
    back = oracle.integrate(end, p, (T, 0.0), tol=tol, times=np.array([T, 0.0]))
    rev = max(abs(back.x[0] - ns.x), abs(back.X[0] - ns.X),
              abs(math.remainder(back.y[0] - ns.y, 2 * math.pi)))
    out.append(CheckResult("oracle.reversibility", rev < 100 * tol, f"error {rev:.3g}"))
    return out


def check_propagator(result, quick=False):
    p = charts.nondimensional_params(1.0, 2.0, 3.0)
    out = []
    a = charts.AndoyerState.from_inclination(math.radians(1), nu=0.7, mu=0.3)
    back = propagator.propagate_analytic(a, p, result, min(3, result.order), 0.0)
    err = max(abs(back.N - a.N), abs(math.remainder(back.nu - a.nu, 2 * math.pi)),
              abs(math.remainder(back.mu - a.mu, 2 * math.pi)))
    out.append(CheckResult("propagator.epoch_roundtrip", err < 1e-12, f"J=1 deg, error {err:.3g}"))
    a = charts.AndoyerState.from_inclination(math.radians(10), nu=0.7, mu=0.3)
    sol = propagator.analytic_solution(a, p, result, min(3, result.order))
    t = np.linspace(0, propagator.mu_period(p, a.M), 101)
    up, Up, _ = sol.prime_at(t)
    spread = float(np.ptp(np.abs(up)))
    out.append(CheckResult("propagator.prime_modulus_constant", spread < 1e-12 and abs(sol.rate_u.real) < 1e-12,
                           f"spread {spread:.3g}, Re(rate_u) {sol.rate_u.real:.3g}"))
    if not quick:
        errs = []
        times = np.linspace(0, propagator.mu_period(p, a.M), 201)
        for n in range(1, min(3, result.order) + 1):
            _, _, rep = propagator.run_comparison(a, p, result, n, times, tol=1e-14)
            errs.append(rep.xX_max)
        mono = all(b < a_ for a_, b in zip(errs, errs[1:]))
        out.append(CheckResult("propagator.convergence_monotone", mono,
                               ", ".join(f"{e:.3g}" for e in errs)))
    return out


def check_gravgrad(n_avg=20, n_res=100):
    rng = random.Random(SEED + 4)
    worst_avg = worst_res = worst_kep = 0.0
    ratios = set()
    for k in range(max(n_avg, n_res)):
        p = random_params(rng)
        orbit = gravgrad.OrbitModel(rng.uniform(0.5, 2), rng.uniform(0, 0.6), rng.uniform(1e-4, 1e-2),
                                    rng.uniform(-math.pi, math.pi), rng.uniform(-math.pi, math.pi))
        a = random_sam_state(rng, math.radians(20))
        geo = gravgrad.geometry(a, orbit, rng.uniform(0, 100))
        scale = abs(gravgrad._scale(orbit, geo)) * p.C
        if k < n_avg:
            d = abs(gravgrad.average_y(geo, orbit, p) - gravgrad.average_y_quadrature(geo, orbit, p))
            worst_avg = max(worst_avg, d / scale)
        if k < n_res:
            y = rng.uniform(-math.pi, math.pi)
            V = rng.uniform(0.5, 2)
            uU = 1j * rng.uniform(0, 0.3)
            printed, engine = gravgrad.gravgrad_generator(geo, orbit, p, V, uU)
            D = abs(float(gravgrad.potential_from_geometry(geo, y, orbit, p)))
            worst_res = max(worst_res, gravgrad.homological_residual(engine, geo, orbit, p, y, uU, V) / D)
            ratios.add(round(gravgrad.generator_ratio(printed, engine).real, 12))
        Mn = rng.uniform(-10, 10)
        E = gravgrad.solve_kepler(Mn, orbit.e)
        worst_kep = max(worst_kep, abs(E - orbit.e * math.sin(E) - Mn))
    return [
        CheckResult("gravgrad.average_quadrature", worst_avg < 1e-12, f"max rel err {worst_avg:.3g}"),
        CheckResult("gravgrad.engine_residual", worst_res < 1e-10, f"max |residual|/|D| {worst_res:.3g}"),
        CheckResult("gravgrad.printed_ratio", True, f"printed/engine = {sorted(ratios)}", informational=True),
        CheckResult("gravgrad.kepler_residual", worst_kep < 1e-13, f"max {worst_kep:.3g}"),
    ]


def run_all(quick=False):
    order = 4 if quick else 9
    result = lie.normalize(order)
    results = []
    results.append(check_algebra(20 if quick else 100, 5 if quick else 25))
    results.append(check_evaluation(20 if quick else 100))
    results.extend(check_normalization(result))
    results.extend(check_charts(100 if quick else 1000, 20 if quick else 100))
    results.extend(check_oracle(20 if quick else 100, 10))
    results.extend(check_propagator(result, quick))
    results.extend(check_gravgrad(20, 20 if quick else 100))
    return results

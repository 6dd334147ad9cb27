"""Lie-Deprit normalization of the short-axis-mode Hamiltonian.

The Hamiltonian is expanded as ``H = sum eps^n/n! H[n,0]`` with ``H[0,0]``
the main problem and ``H[1,0]`` the quartic perturbation, both written in the
complex pair ``(u, U)`` and the real pair ``(v, V)``.  The generator is
``S = sum eps^m/m! S[m+1]`` and Deprit's triangle

    f[n,q] = f[n+1,q-1] + sum_{m=0..n} binom(n,m) {f[n-m,q-1]; S[m+1]}

is evaluated exactly with :mod:`samrot.series`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

from .errors import DependsOnAngle, InexactDivision, NotKernelForm, OrderTooLarge, ValidationError
from .series import (
    GaussianRational,
    I,
    Monomial,
    Series,
    exact_divide,
    partial_derivative,
    poisson_bracket,
)


class _VCoordinate:
    """The coordinate function ``v`` (not representable as a v-free Series)."""

    def __repr__(self):
        return "v"


V_COORD = _VCoordinate()

_u = Series.symbol("u")
_U = Series.symbol("U")


def main_hamiltonian():
    """``V^2/(2 C gamma) - i (V sqrt(gamma)/C) u U``."""
    return (Series.monomial(Fraction(1, 2), V=2, C=-1, sqrtgamma=-2)
            + Series.monomial(-I, V=1, sqrtgamma=1, C=-1, u=1, U=1))


def perturbation():
    """``alpha/(4C) [2 u^2 U^2 - i beta (u^3 U - u U^3)]``."""
    return (Series.monomial(Fraction(1, 2), alpha=1, C=-1, u=2, U=2)
            + Series.monomial(-I / 4, alpha=1, beta=1, C=-1, u=3, U=1)
            + Series.monomial(I / 4, alpha=1, beta=1, C=-1, u=1, U=3))


def lie_derivative_main(f):
    """``{f; M}``: each ``u^j U^k`` is multiplied by ``(sqrt(gamma)/C) V i (k-j)``."""
    if f is V_COORD:
        raise DependsOnAngle("the main-problem operator here acts on v-free series only")
    out = {}
    for mono, c in f.terms():
        j, k = mono["u"], mono["U"]
        if j == k:
            continue
        e = mono.as_dict()
        e["sqrtgamma"] += 1
        e["C"] -= 1
        e["V"] += 1
        out[Monomial.of(**e)] = c * I * (k - j)
    return Series(out)


def solve_homological(T):
    """Split ``T`` into its kernel part and the generator ``W`` with ``{W; M} = T - kernel``."""
    if T is V_COORD:
        raise DependsOnAngle("right-hand side depends on v")
    kernel, gen = {}, {}
    for mono, c in T.terms():
        j, k = mono["u"], mono["U"]
        if j == k:
            kernel[mono] = c
            continue
        e = mono.as_dict()
        e["C"] += 1
        e["sqrtgamma"] -= 1
        e["V"] -= 1
        gen[Monomial.of(**e)] = c * I / (j - k)
    return Series(kernel), Series(gen)


def _bracket(f, g):
    if f is V_COORD:
        # {v; g} = dg/dV
        return partial_derivative(g, "V")
    return poisson_bracket(f, g)


@dataclass
class NormalizationResult:
    """Output of :func:`normalize`.

    ``K_terms[n]`` is ``H[0,n]`` (``K_terms[0]`` is the main problem),
    ``S_terms[m-1]`` is ``S[m]``.  ``direct_series[var][n-1]`` is the
    order-``n`` entry ``f[0,n]`` of the triangle started from the coordinate
    ``var``; ``inverse_series[var][n-1]`` is ``f[n,0]`` of the inverse triangle.
    Both carry the ``1/n!`` weight implicitly.
    """

    order: int
    K_terms: list
    S_terms: list
    H_tilde: list
    p_polys: list = field(default_factory=list)
    s_terms: list = field(default_factory=list)
    s_inexact: list = field(default_factory=list)
    direct_series: dict = field(default_factory=dict)
    inverse_series: dict = field(default_factory=dict)

    def S(self, m):
        return self.S_terms[m - 1]

    def K(self, order=None):
        """Truncated normalized Hamiltonian ``sum_{n<=order} K_terms[n]/n!``."""
        order = self.order if order is None else order
        out = Series()
        for n in range(order + 1):
            out = out + self.K_terms[n] / factorial(n)
        return out


def _run_normalization(order):
    M = main_hamiltonian()
    f = {(0, 0): M, (1, 0): perturbation()}
    for n in range(2, order + 1):
        f[(n, 0)] = Series()
    S = []  # S[m-1] = S_m
    K = [M]
    H_tilde = [Series()]
    for q in range(1, order + 1):
        # S_q enters this diagonal only through {M; S_q}; add it afterwards
        S.append(Series())
        for k in range(1, q + 1):
            n = q - k
            acc = f[(n + 1, k - 1)]
            for m in range(n + 1):
                g = f[(n - m, k - 1)]
                if g and S[m]:
                    acc = acc + poisson_bracket(g, S[m]) * comb(n, m)
            f[(n, k)] = acc
        ht = f[(0, q)]
        kernel, gen = solve_homological(ht)
        S[q - 1] = gen
        correction = kernel - ht  # = {M; S_q}
        for k in range(1, q + 1):
            f[(q - k, k)] = f[(q - k, k)] + correction
        K.append(kernel)
        H_tilde.append(ht)
    return K, S, H_tilde


def lie_transform(F, S, order):
    """Direct triangle for a function with ``F[n] = f[n,0]`` (missing entries zero).

    Returns ``[f[0,1], ..., f[0,order]]``.
    """
    f = {(n, 0): (F[n] if n < len(F) else Series()) for n in range(order + 1)}
    out = []
    for q in range(1, order + 1):
        for k in range(1, q + 1):
            n = q - k
            acc = f[(n + 1, k - 1)]
            for m in range(n + 1):
                g = f[(n - m, k - 1)]
                if (g is V_COORD or g) and S[m]:
                    acc = acc + _bracket(g, S[m]) * comb(n, m)
            f[(n, k)] = acc
        out.append(f[(0, q)])
    return out


def inverse_lie_transform(coord, S, order):
    """Inverse triangle: ``f[0,0] = coord``, ``f[0,q] = 0``; returns ``[f[1,0], ..., f[order,0]]``."""
    f = {(0, 0): coord}
    for q in range(1, order + 1):
        f[(0, q)] = Series()
    for k in range(1, order + 1):
        for j in range(1, k + 1):
            acc = f[(j - 1, k - j + 1)]
            for m in range(j):
                g = f[(j - 1 - m, k - j)]
                if (g is V_COORD or g) and S[m]:
                    acc = acc - _bracket(g, S[m]) * comb(j - 1, m)
            f[(j, k - j)] = acc
    return [f[(n, 0)] for n in range(1, order + 1)]


COORDINATES = {"u": _u, "U": _U, "v": V_COORD}


def transform_series(result, direction):
    """Per-coordinate correction series (``direct``: old in terms of prime; ``inverse``: prime in terms of old)."""
    if direction == "direct":
        return {name: lie_transform([c], result.S_terms, result.order)
                for name, c in COORDINATES.items()}
    if direction == "inverse":
        return {name: inverse_lie_transform(c, result.S_terms, result.order)
                for name, c in COORDINATES.items()}
    raise ValidationError(f"direction must be 'direct' or 'inverse', not {direction!r}")


def normalize(order, *, transformations=True):
    """Normalize through ``order`` and (optionally) build the variable series."""
    if order < 1:
        raise ValidationError("order must be >= 1")
    try:
        K, S, H_tilde = _run_normalization(order)
        result = NormalizationResult(order=order, K_terms=K, S_terms=S, H_tilde=H_tilde)
        result.p_polys, result.s_terms = extract_published_forms(result)
        if transformations:
            result.direct_series = transform_series(result, "direct")
            result.inverse_series = transform_series(result, "inverse")
    except MemoryError as exc:
        raise OrderTooLarge(f"normalization to order {order} exhausted memory") from exc
    return result


def homological_residual(result, n):
    """``{S_n; M} - (H~_n - H[0,n])``; the empty series when the order is solved exactly."""
    return lie_derivative_main(result.S(n)) - (result.H_tilde[n] - result.K_terms[n])


def triaxiality_polynomial(K_n, n):
    """``p_n`` from ``K_n = H[0,n]`` (the ``V``-only term of ``K_0`` is dropped)."""
    if n == 0:
        K_n = K_n.filter(lambda m: m["u"] > 0 or m["U"] > 0)
    for mono, _ in K_n.terms():
        if mono["u"] != mono["U"]:
            raise NotKernelForm(f"K_{n} contains the non-kernel monomial {mono}")
    try:
        p = (K_n / factorial(n)).shift(C=1, sqrtgamma=n - 1, alpha=-n, V=n - 1,
                                        u=-(n + 1), U=-(n + 1)).scale(2)
    except InexactDivision as exc:
        raise NotKernelForm(f"K_{n} is not of the form c*(uU)^{n + 1}") from exc
    for mono, _ in p.terms():
        if any(e for s, e in mono.as_dict().items() if s != "beta"):
            raise NotKernelForm(f"K_{n} has unexpected structure {mono}")
    return p


UU_SUM = _u * _u + _U * _U


def generator_factor(S_m, m):
    """``s_m = S_m / [(m-1)! alpha^m gamma^(-m/2) V^(-m) beta (u^2+U^2)]`` (raises InexactDivision)."""
    scaled = S_m.shift(alpha=-m, sqrtgamma=m, V=m, beta=-1) / factorial(m - 1)
    return exact_divide(scaled, UU_SUM)


def extract_published_forms(result):
    """Return ``(p_polys, s_terms)``.

    ``s_terms[m-1]`` is ``s_m`` when the factorization is exact and the raw
    ``S_m`` otherwise (its ``m`` is then listed in ``result.s_inexact``).
    """
    p_polys = [triaxiality_polynomial(result.K_terms[n], n) for n in range(result.order + 1)]
    s_terms = []
    result.s_inexact = []
    for m in range(1, result.order + 1):
        try:
            s_terms.append(generator_factor(result.S(m), m))
        except InexactDivision:
            s_terms.append(result.S(m))
            result.s_inexact.append(m)
    return p_polys, s_terms


def constant_ratio(a, b):
    """``c`` with ``a == c*b`` exactly, or ``None``."""
    if not a and not b:
        return GaussianRational(1)
    if not a or not b:
        return None
    (m0, b0), = b.terms()[:1]
    c = a.coefficient(m0) / b0
    return c if a == b.scale(c) else None


# -- truncated composition -------------------------------------------------

def _gmul(A, B, top):
    out = [Series() for _ in range(top + 1)]
    for i, a in enumerate(A):
        if not a:
            continue
        for j in range(min(len(B), top + 1 - i)):
            if B[j]:
                out[i + j] = out[i + j] + a * B[j]
    return out


def _compose(f, Gu, GU, top, cache):
    """Graded ``f(Gu, GU)`` truncated at grade ``top``."""
    total = [Series() for _ in range(top + 1)]
    for mono, c in f.terms():
        a, b = mono["u"], mono["U"]
        key = (a, b, top)
        if key not in cache:
            pa = _gpow(Gu, a, top, cache, "u")
            pb = _gpow(GU, b, top, cache, "U")
            cache[key] = _gmul(pa, pb, top)
        rest = mono.as_dict()
        rest["u"] = rest["U"] = 0
        r = Series({Monomial.of(**rest): c})
        for k, s in enumerate(cache[key]):
            if s:
                total[k] = total[k] + s * r
    return total


def _gpow(G, n, top, cache, tag):
    key = (tag, n, top)
    if key not in cache:
        if n == 0:
            cache[key] = [Series.constant(1)] + [Series() for _ in range(top)]
        else:
            cache[key] = _gmul(_gpow(G, n - 1, top, cache, tag), G, top)
    return cache[key]


def composition_defect(result, order=None):
    """Graded residual of ``direct(inverse(z)) - z`` for ``u, U, v`` through ``order``.

    Returns ``{var: [defect at grade 1, ..., grade order]}``; all empty when
    the two transformations are mutually inverse to that order.
    """
    N = result.order if order is None else order
    inv = result.inverse_series
    dct = result.direct_series
    Gu = [_u] + [inv["u"][n - 1] / factorial(n) for n in range(1, N + 1)]
    GU = [_U] + [inv["U"][n - 1] / factorial(n) for n in range(1, N + 1)]
    out = {}
    cache = {}
    for var in ("u", "U", "v"):
        total = [Series() for _ in range(N + 1)]
        for k in range(1, N + 1):
            total[k] = inv[var][k - 1] / factorial(k)
        for n in range(1, N + 1):
            top = N - n
            comp = _compose(dct[var][n - 1] / factorial(n), Gu, GU, top, cache)
            for k, s in enumerate(comp):
                total[n + k] = total[n + k] + s
        out[var] = total[1:]
    return out

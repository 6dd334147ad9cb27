"""Published normal-form data as exact series, and comparisons against the engine."""

from __future__ import annotations

from fractions import Fraction as F

from .lie import constant_ratio
from .series import I, Series

_b = Series.symbol("beta")
_u = Series.symbol("u")
_U = Series.symbol("U")
_w = _u * _U
_b2 = _b ** 2


def _c(x):
    return Series.constant(x)


PUBLISHED_P = [
    _c(-2 * I),
    _c(1),
    _b2 * F(1, 2),
    _b2 * F(5, 8),
    _b2 * (_b2 * 3 + 8) * F(3, 32),
    _b2 * (_b2 * 5 + 4) * F(7, 32),
    _b2 * (_b ** 4 * 45 + _b2 * 354 + 128) * F(1, 128),
    _b2 * (_b ** 4 * 265 + _b2 * 650 + 128) * F(9, 1024),
    _b2 * (_b ** 6 * 953 + _b ** 4 * 14888 + _b2 * 17120 + 2048) * F(5, 8192),
    _b2 * (_b ** 6 * 4075 + _b ** 4 * 20212 + _b2 * 13104 + 1024) * F(11, 8192),
]

_d = _U * _U - _u * _u
PUBLISHED_S = [
    _w * (I / 8),
    _w ** 2 * (I / 4),
    (_w * (_b2 + 2) * (24 * I) + _b * _d * 5) * _w ** 2 * F(1, 64),
    (_w * (_b2 * 57 + 32) * (2 * I) + _b * (_b2 * 9 + 20) * _d) * _w ** 3 * F(3, 64),
    (_w ** 2 * (_b ** 4 * 343 + _b2 * 2024 + 480) * 2
     - _b2 * (_b2 + 2) * (_u ** 4 + _U ** 4) * 11
     - _b * (_b2 * 147 + 100) * _w * _d * (6 * I)) * _w ** 3 * (I / 64),
]


def compare_p(engine_p):
    """Rows ``(n, exact_match, ratio)``; ``ratio`` is ``engine/published`` or ``None``."""
    rows = []
    for n, p in enumerate(engine_p[: len(PUBLISHED_P)]):
        ref = PUBLISHED_P[n]
        rows.append((n, p == ref, constant_ratio(p, ref)))
    return rows


def compare_s(engine_s, inexact=()):
    """Rows ``(m, exact_match, ratio)`` for the generator factors."""
    rows = []
    for m, s in enumerate(engine_s[: len(PUBLISHED_S)], start=1):
        if m in inexact:
            rows.append((m, False, None))
            continue
        ref = PUBLISHED_S[m - 1]
        rows.append((m, s == ref, constant_ratio(s, ref)))
    return rows

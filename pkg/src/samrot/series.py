"""Exact sparse Poisson-series algebra.

A :class:`Series` is a finite sum of monomials in the symbols
``u, U, V, C, alpha, beta, sqrtgamma`` with :class:`GaussianRational`
coefficients.  ``(u, U)`` and ``(v, V)`` are canonical pairs; the angle ``v``
is never a symbol, so every series is ``v``-free and its bracket reduces to
the ``(u, U)`` part.  ``V``, ``C`` and ``sqrtgamma`` may carry negative
exponents; a ``sqrtgamma`` exponent ``g`` stands for ``gamma**(g/2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import InexactDivision, InvalidParams, UnboundSymbol, ValidationError

# Monomials are packed into one int: seven 9-bit fields of exponent + BIAS.
# Kernel coefficients are Gaussian-integer numerators over a shared denominator.
FIELD_BITS = 9
FIELD_MASK = (1 << FIELD_BITS) - 1
BIAS = 1 << (FIELD_BITS - 1)
NSYM = 7
OFFSET = sum(BIAS << (FIELD_BITS * i) for i in range(NSYM))
# lowering u and U by one each
DUDU = 1 + (1 << FIELD_BITS)


def _finish(acc):
    keys, re, im = [], [], []
    for key, (a, b) in acc.items():
        if a or b:
            keys.append(key)
            re.append(a)
            im.append(b)
    return keys, re, im


def _mul_terms(kf, rf, jf, kg, rg, jg):
    acc = {}
    get = acc.get
    for a, ra, ia in zip(kf, rf, jf):
        a -= OFFSET
        for b, rb, ib in zip(kg, rg, jg):
            key = a + b
            t = get(key)
            if t is None:
                acc[key] = [ra * rb - ia * ib, ra * ib + ia * rb]
            else:
                t[0] += ra * rb - ia * ib
                t[1] += ra * ib + ia * rb
    return _finish(acc)


def _bracket_terms(kf, rf, jf, kg, rg, jg):
    """``f_u g_U - f_U g_u`` on the (u, U) pair."""
    acc = {}
    get = acc.get
    ug = [(b, (b & FIELD_MASK) - BIAS, ((b >> FIELD_BITS) & FIELD_MASK) - BIAS,
           rb, ib) for b, rb, ib in zip(kg, rg, jg)]
    for a, ra, ia in zip(kf, rf, jf):
        ja = (a & FIELD_MASK) - BIAS
        ka = ((a >> FIELD_BITS) & FIELD_MASK) - BIAS
        if ja == 0 and ka == 0:
            continue
        a -= OFFSET + DUDU
        for b, jb, kb, rb, ib in ug:
            w = ja * kb - ka * jb
            if w == 0:
                continue
            key = a + b
            re = w * (ra * rb - ia * ib)
            im = w * (ra * ib + ia * rb)
            t = get(key)
            if t is None:
                acc[key] = [re, im]
            else:
                t[0] += re
                t[1] += im
    return _finish(acc)


SYMBOLS = ("u", "U", "V", "C", "alpha", "beta", "sqrtgamma")
NONNEGATIVE = frozenset({"u", "U", "alpha", "beta"})
_INDEX = {s: i for i, s in enumerate(SYMBOLS)}
_MAX_EXP = BIAS - 1


def _fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot make an exact rational from {type(x).__name__}")


class GaussianRational:
    """Exact complex number ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _fraction(re)
        self.im = _fraction(im)

    @classmethod
    def coerce(cls, x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, dict):
            return cls(x.get("re", 0), x.get("im", 0))
        return cls(x)

    def __add__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return self * GaussianRational(o.re / n, -o.im / n)

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else 1 / self
        out = GaussianRational(1)
        for _ in range(abs(n)):
            out = out * base
        return out

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def __eq__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({str(self.re)!r}, {str(self.im)!r})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}*i"
        return f"({self.re} + {self.im}*i)"

    def to_json(self):
        return {"re": f"{self.re.numerator}/{self.re.denominator}",
                "im": f"{self.im.numerator}/{self.im.denominator}"}


def _coerce_or_none(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    return None


I = GaussianRational(0, 1)
ZERO = GaussianRational(0)
ONE = GaussianRational(1)


def pack(exps):
    key = 0
    for i, e in enumerate(exps):
        if not -BIAS < e <= _MAX_EXP:
            raise ValidationError(f"exponent {e} out of representable range")
        key |= (e + BIAS) << (FIELD_BITS * i)
    return key


def unpack(key):
    return tuple(((key >> (FIELD_BITS * i)) & FIELD_MASK) - BIAS for i in range(NSYM))


@dataclass(frozen=True, order=True)
class Monomial:
    """Exponent vector over :data:`SYMBOLS` (canonical symbol order)."""

    exps: tuple = (0,) * NSYM

    def __post_init__(self):
        if len(self.exps) != NSYM:
            raise ValidationError("monomial needs one exponent per symbol")
        for s, e in zip(SYMBOLS, self.exps):
            if s in NONNEGATIVE and e < 0:
                raise ValidationError(f"negative exponent for {s}")

    @classmethod
    def of(cls, **exps):
        unknown = set(exps) - set(SYMBOLS)
        if unknown:
            raise ValidationError(f"unknown symbols {sorted(unknown)}")
        return cls(tuple(int(exps.get(s, 0)) for s in SYMBOLS))

    def __getitem__(self, symbol):
        return self.exps[_INDEX[symbol]]

    def as_dict(self):
        return dict(zip(SYMBOLS, self.exps))

    def __str__(self):
        parts = []
        for s, e in zip(SYMBOLS, self.exps):
            if e == 1:
                parts.append(s)
            elif e:
                parts.append(f"{s}**{e}" if e > 0 else f"{s}**({e})")
        return "*".join(parts) or "1"


class Series:
    """Immutable sparse polynomial with exact Gaussian-rational coefficients.

    Parameters
    ----------
    terms : mapping, optional
        ``Monomial`` (or exponent tuple) to coefficient.  Coefficients may be
        ints, ``Fraction``, ``GaussianRational`` or ``"p/q"`` strings.  Zero
        coefficients are dropped.
    """

    __slots__ = ("_t", "__dict__")

    def __init__(self, terms=None):
        t = {}
        if terms:
            for mono, c in terms.items():
                if not isinstance(mono, Monomial):
                    mono = Monomial(tuple(mono))
                c = GaussianRational.coerce(c)
                if c:
                    key = pack(mono.exps)
                    t[key] = t[key] + c if key in t else c
            t = {k: c for k, c in t.items() if c}
        self._t = t

    @classmethod
    def _raw(cls, t):
        s = cls.__new__(cls)
        s._t = t
        return s

    @classmethod
    def constant(cls, c):
        c = GaussianRational.coerce(c)
        return cls._raw({OFFSET: c} if c else {})

    @classmethod
    def monomial(cls, coeff=1, **exps):
        return cls({Monomial.of(**exps): coeff})

    @classmethod
    def symbol(cls, name):
        return cls.monomial(1, **{name: 1})

    # -- inspection --------------------------------------------------------

    def __len__(self):
        return len(self._t)

    def __bool__(self):
        return bool(self._t)

    def terms(self):
        """``(Monomial, coeff)`` pairs in canonical (sorted exponent) order."""
        items = [(Monomial(unpack(k)), c) for k, c in self._t.items()]
        items.sort(key=lambda mc: mc[0].exps)
        return items

    def coefficient(self, mono):
        if not isinstance(mono, Monomial):
            mono = Monomial(tuple(mono))
        return self._t.get(pack(mono.exps), ZERO)

    def exponents(self, symbol):
        i = _INDEX[symbol]
        return {unpack(k)[i] for k in self._t}

    def filter(self, predicate):
        """Subseries of terms whose ``Monomial`` satisfies ``predicate``."""
        return Series._raw({k: c for k, c in self._t.items()
                            if predicate(Monomial(unpack(k)))})

    def shift(self, **exps):
        """Multiply by the bare monomial ``prod(symbol**exp)`` (exps may be negative)."""
        delta = [0] * NSYM
        for s, e in exps.items():
            delta[_INDEX[s]] = int(e)
        out = {}
        for k, c in self._t.items():
            new = tuple(a + b for a, b in zip(unpack(k), delta))
            for s, e in zip(SYMBOLS, new):
                if s in NONNEGATIVE and e < 0:
                    raise InexactDivision(f"monomial shift leaves {s}**{e}",
                                          remainder=self)
            out[pack(new)] = c
        return Series._raw(out)

    def set_zero(self, symbol):
        """Substitute ``symbol = 0`` (drop every term containing it)."""
        if symbol not in NONNEGATIVE:
            raise ValidationError(f"{symbol} may carry negative powers")
        i = _INDEX[symbol]
        return Series._raw({k: c for k, c in self._t.items() if unpack(k)[i] == 0})

    def conjugate_coefficients(self):
        return Series._raw({k: c.conjugate() for k, c in self._t.items()})

    # -- arithmetic --------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Series):
            return self._t == other._t
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self == Series.constant(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._t.items()))

    def __add__(self, other):
        other = _as_series(other)
        if other is None:
            return NotImplemented
        t = dict(self._t)
        for k, c in other._t.items():
            if k in t:
                s = t[k] + c
                if s:
                    t[k] = s
                else:
                    del t[k]
            else:
                t[k] = c
        return Series._raw(t)

    __radd__ = __add__

    def __neg__(self):
        return Series._raw({k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        other = _as_series(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = GaussianRational.coerce(c)
        if not c:
            return Series()
        return Series._raw({k: v * c for k, v in self._t.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, str)):
            return self.scale(other)
        if not isinstance(other, Series):
            return NotImplemented
        if not self._t or not other._t:
            return Series()
        return _from_kernel(_mul_terms(*self._kform[:3], *other._kform[:3]),
                            self._kform[3] * other._kform[3])

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, str)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.scale(1 / GaussianRational.coerce(other))
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out, base = Series.constant(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    @cached_property
    def _kform(self):
        keys = list(self._t)
        coeffs = [self._t[k] for k in keys]
        den = 1
        for c in coeffs:
            den = math.lcm(den, c.re.denominator, c.im.denominator)
        re = [c.re.numerator * (den // c.re.denominator) for c in coeffs]
        im = [c.im.numerator * (den // c.im.denominator) for c in coeffs]
        return keys, re, im, den

    # -- numerics ------------------------------------------------------------

    def evaluate(self, bindings):
        return evaluate_series(self, bindings)

    def compile(self):
        return SeriesEvaluator(self)

    # -- output ------------------------------------------------------------

    def to_json(self):
        return {"terms": [{"coeff": c.to_json(), "exp": m.as_dict()}
                          for m, c in self.terms()]}

    @classmethod
    def from_json(cls, data):
        terms = {}
        for term in data["terms"]:
            mono = Monomial.of(**term["exp"])
            terms[mono] = terms.get(mono, ZERO) + GaussianRational.coerce(term["coeff"])
        return cls(terms)

    def __repr__(self):
        if not self._t:
            return "Series(0)"
        return "Series(" + " + ".join(f"({c})*{m}" for m, c in self.terms()) + ")"


def _as_series(x):
    if isinstance(x, Series):
        return x
    if isinstance(x, (int, Fraction, GaussianRational)):
        return Series.constant(x)
    return None


def _from_kernel(result, den):
    keys, re, im = result
    t = {}
    for k, a, b in zip(keys, re, im):
        t[k] = GaussianRational(Fraction(a, den), Fraction(b, den))
    return Series._raw(t)


def poly_arith(op, f, g_or_scalar):
    """Dispatch ``add``, ``mul`` or ``scale``; exact in every case."""
    if op == "add":
        return f + g_or_scalar
    if op == "mul":
        return f * g_or_scalar
    if op == "scale":
        return f.scale(g_or_scalar)
    raise ValidationError(f"unknown operation {op!r}")


def poisson_bracket(f, g):
    """``{f; g} = f_u g_U - f_U g_u + f_v g_V - f_V g_v``.

    Series never contain ``v``, so the ``(v, V)`` part vanishes identically.
    """
    if not f or not g:
        return Series()
    return _from_kernel(_bracket_terms(*f._kform[:3], *g._kform[:3]),
                        f._kform[3] * g._kform[3])


def partial_derivative(f, symbol):
    if symbol not in ("u", "U", "V"):
        raise ValidationError(f"cannot differentiate with respect to {symbol!r}")
    i = _INDEX[symbol]
    unit = 1 << (FIELD_BITS * i)
    out = {}
    for k, c in f._t.items():
        e = ((k >> (FIELD_BITS * i)) & FIELD_MASK) - BIAS
        if e:
            out[k - unit] = c * e
    return Series._raw(out)


def _divides(lead, exps):
    q = tuple(a - b for a, b in zip(exps, lead))
    for s, e in zip(SYMBOLS, q):
        if s in NONNEGATIVE and e < 0:
            return None
    return q


def exact_divide(f, d, max_steps=1_000_000):
    """Return ``q`` with ``f == d*q`` exactly, else raise :class:`InexactDivision`.

    Multivariate division with the lexicographic order on exponent vectors.
    """
    if not d:
        raise ZeroDivisionError("division by the zero series")
    d_terms = [(unpack(k), c) for k, c in d._t.items()]
    lead_exp, lead_c = max(d_terms, key=lambda t: t[0])
    p = dict((unpack(k), c) for k, c in f._t.items())
    quotient, remainder = {}, {}
    steps = 0
    while p:
        steps += 1
        if steps > max_steps:
            raise InexactDivision("division did not terminate", remainder=f)
        exps = max(p)
        c = p.pop(exps)
        q = _divides(lead_exp, exps)
        if q is None:
            remainder[exps] = c
            continue
        qc = c / lead_c
        quotient[q] = quotient.get(q, ZERO) + qc
        for e2, c2 in d_terms:
            if e2 == lead_exp:
                continue
            target = tuple(a + b for a, b in zip(q, e2))
            v = p.get(target, ZERO) - qc * c2
            if v:
                p[target] = v
            else:
                p.pop(target, None)
    qs = Series({Monomial(e): c for e, c in quotient.items()})
    if remainder:
        raise InexactDivision("divisor does not divide the series exactly",
                              remainder=Series({Monomial(e): c for e, c in remainder.items()}),
                              quotient=qs)
    return qs


def _resolve_bindings(bindings):
    b = dict(bindings)
    have = {k for k in ("alpha", "beta", "sqrtgamma") if k in b}
    if {"alpha", "beta"} <= have:
        gamma = b["alpha"] * math.sqrt(1.0 - b["beta"] ** 2)
        if "sqrtgamma" in b:
            sg = b["sqrtgamma"]
            if abs(sg * sg - gamma) > 1e-12 * max(1.0, abs(gamma)):
                raise InvalidParams("sqrtgamma inconsistent with gamma = alpha*sqrt(1-beta^2)")
        else:
            b["sqrtgamma"] = math.sqrt(gamma)
    return b


def evaluate_series(f, bindings):
    """Numerically evaluate ``f`` at scalar ``bindings`` (symbol name -> number).

    Powers of each symbol are tabulated once; real and imaginary parts are
    accumulated with ``math.fsum``.
    """
    if not f:
        return 0j
    b = _resolve_bindings(bindings)
    terms = [(unpack(k), complex(c)) for k, c in f._t.items()]
    tables = []
    for i, s in enumerate(SYMBOLS):
        used = {e[i] for e, _ in terms if e[i]}
        if not used:
            tables.append(None)
            continue
        if s not in b:
            raise UnboundSymbol(f"no binding for {s!r}")
        x = complex(b[s])
        tables.append({e: x ** e for e in used})
    re, im = [], []
    for exps, c in terms:
        val = c
        for i, e in enumerate(exps):
            if e:
                val *= tables[i][e]
        re.append(val.real)
        im.append(val.imag)
    return complex(math.fsum(re), math.fsum(im))


class SeriesEvaluator:
    """Vectorised evaluation of one series over numpy arrays of bindings."""

    def __init__(self, series):
        terms = [(unpack(k), complex(c)) for k, c in series._t.items()]
        self.exps = np.array([e for e, _ in terms], dtype=np.int64).reshape(-1, NSYM)
        self.coeffs = np.array([c for _, c in terms], dtype=complex)
        self.used = [SYMBOLS[i] for i in range(NSYM) if len(self.exps) and self.exps[:, i].any()]

    def __call__(self, bindings):
        b = _resolve_bindings(bindings)
        for s in self.used:
            if s not in b:
                raise UnboundSymbol(f"no binding for {s!r}")
        if not len(self.coeffs):
            return np.zeros(np.broadcast(*[np.asarray(v) for v in b.values()]).shape, complex) \
                if b else 0j
        shape = np.broadcast(*[np.asarray(b[s]) for s in self.used]).shape if self.used else ()
        total = np.zeros(shape, dtype=complex)
        powers = {}
        for s in self.used:
            i = _INDEX[s]
            x = np.asarray(b[s], dtype=complex)
            powers[s] = {int(e): x ** int(e) for e in set(self.exps[:, i].tolist()) if e}
        for row, c in zip(self.exps, self.coeffs):
            term = c
            for s in self.used:
                e = int(row[_INDEX[s]])
                if e:
                    term = term * powers[s][e]
            total = total + term
        return total


def parse_beta_polynomial(coeffs):
    """Series in ``beta`` from a ``{power: coefficient}`` mapping."""
    return Series({Monomial.of(beta=p): c for p, c in coeffs.items()})

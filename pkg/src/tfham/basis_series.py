"""Finite series over the decaying basis ``t**(-e)`` with ``t = alpha + beta*x``.

A :class:`BasisSeries` is the value type used everywhere in the engine.  It
holds a finite map ``exponent -> coefficient``; exponents are exact
:class:`~fractions.Fraction` values ``>= 0`` and coefficients are either exact
rationals (``EXACT`` mode) or ``gmpy2.mpfr`` reals rounded to a fixed mantissa
precision (``NumericMode.approx(bits)``).

Products are computed by dense convolution on the exponent lattice (the
``1/q`` grid spanned by the exponents present), which keeps the inner loops in
numpy even for object-dtype coefficients.
"""

from __future__ import annotations

import contextlib
import json
import math
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

import gmpy2
import numpy as np
from gmpy2 import mpfr, mpq

from .errors import BasisEscapeError, DomainError, ParameterMismatchError

Number = Union[Fraction, "mpfr"]

DEFAULT_PRECISION = 512


def parse_number(text) -> Fraction:
    """Parse an integer, ``"p/q"`` fraction or finite decimal into an exact rational.

    >>> parse_number("3/4"), parse_number("-0.75"), parse_number("1")
    (Fraction(3, 4), Fraction(-3, 4), Fraction(1, 1))
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise TypeError(f"expected a string, got {type(text).__name__}")
    s = text.strip()
    try:
        return Fraction(s)
    except ZeroDivisionError:
        raise ZeroDivisionError(f"zero denominator in {text!r}") from None
    except ValueError:
        raise ValueError(f"malformed number {text!r}") from None


def as_rational(value) -> Fraction:
    if isinstance(value, str):
        return parse_number(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, type(mpq())):
        return Fraction(int(value.numerator), int(value.denominator))
    return Fraction(value)


@dataclass(frozen=True)
class NumericMode:
    """``precision=None`` means exact rational arithmetic; otherwise mpfr with that many bits."""

    precision: int | None = None

    def __post_init__(self):
        if self.precision is not None and self.precision < 64:
            raise ValueError("precision must be at least 64 bits")

    @classmethod
    def approx(cls, bits: int = DEFAULT_PRECISION) -> "NumericMode":
        return cls(int(bits))

    @property
    def is_exact(self) -> bool:
        return self.precision is None

    @cached_property
    def zero_threshold(self):
        """Coefficients below this magnitude are dropped (Approx mode only)."""
        if self.precision is None:
            return None
        return mpfr(2, self.precision) ** (16 - self.precision)

    def context(self):
        if self.precision is None:
            return contextlib.nullcontext()
        return gmpy2.context(gmpy2.get_context(), precision=self.precision)

    def coerce(self, value) -> Number:
        if self.precision is None:
            if isinstance(value, type(mpfr())):
                raise TypeError("Exact mode admits only rational coefficients")
            return as_rational(value)
        if isinstance(value, type(mpfr())):
            return mpfr(value, self.precision)
        if isinstance(value, str):
            if "/" in value:
                value = parse_number(value)
            else:
                return mpfr(value.strip(), self.precision)
        if isinstance(value, Fraction):
            return mpfr(mpq(value.numerator, value.denominator), self.precision)
        return mpfr(value, self.precision)

    def is_zero(self, value) -> bool:
        if self.precision is None:
            return value == 0
        return abs(value) < self.zero_threshold

    def __str__(self):
        return "exact" if self.precision is None else f"float{self.precision}"


EXACT = NumericMode()


def format_number(value, digits: int | None = None) -> str:
    """Render a coefficient: exact rationals as ``p/q``, reals as full-precision decimals."""
    if isinstance(value, (Fraction, int)):
        return str(Fraction(value))
    if isinstance(value, type(mpq())):
        return str(as_rational(value))
    if isinstance(value, type(mpfr())):
        if digits is None:
            digits = int(math.ceil(value.precision * math.log10(2))) + 1
        if value == 0:
            return "0"
        return format(value, f".{digits}g")
    return repr(value)


@dataclass(frozen=True)
class BasisParams:
    """Positive rational ``alpha``, ``beta``, ``gamma`` of the basis ``alpha*(alpha+beta*x)**(-gamma*m)``."""

    alpha: Fraction
    beta: Fraction
    gamma: Fraction

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if isinstance(value, float) and not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            value = as_rational(value)
            if value <= 0:
                raise ValueError(f"{name} must be strictly positive, got {value}")
            object.__setattr__(self, name, value)

    @classmethod
    def unit(cls) -> "BasisParams":
        return cls(Fraction(1), Fraction(1), Fraction(1))

    def __str__(self):
        return f"alpha={self.alpha}, beta={self.beta}, gamma={self.gamma}"


def _lcm_denominator(exponents: Iterable[Fraction]) -> int:
    q = 1
    for e in exponents:
        q = q * e.denominator // math.gcd(q, e.denominator)
    return q


class BasisSeries:
    """Immutable finite sum ``sum(c_e * (alpha + beta*x)**(-e))``.

    Terms are kept sorted by ascending exponent with no zero coefficients.
    Arithmetic operators map to :func:`series_add`, :func:`series_mul` and
    scalar scaling.
    """

    __slots__ = ("params", "mode", "_exps", "_coefs")

    def __init__(self, params: BasisParams, terms: Mapping | Iterable = (), mode: NumericMode = EXACT):
        self.params = params
        self.mode = mode
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Fraction, Number] = {}
        with mode.context():
            for e, c in items:
                e = as_rational(e)
                if e < 0:
                    raise BasisEscapeError(f"negative exponent {e} is outside the decaying basis")
                c = mode.coerce(c)
                acc[e] = acc[e] + c if e in acc else c
        keep = sorted((e, c) for e, c in acc.items() if not mode.is_zero(c))
        self._exps = tuple(e for e, _ in keep)
        self._coefs = tuple(c for _, c in keep)

    @classmethod
    def _raw(cls, params, mode, exps, coefs) -> "BasisSeries":
        # trusted constructor: exps sorted, coefs already in mode, zeros removed
        obj = cls.__new__(cls)
        obj.params = params
        obj.mode = mode
        obj._exps = tuple(exps)
        obj._coefs = tuple(coefs)
        return obj

    @classmethod
    def zero(cls, params: BasisParams, mode: NumericMode = EXACT) -> "BasisSeries":
        return cls._raw(params, mode, (), ())

    @classmethod
    def constant(cls, params: BasisParams, value=1, mode: NumericMode = EXACT) -> "BasisSeries":
        return cls(params, {Fraction(0): value}, mode)

    @classmethod
    def monomial(cls, params: BasisParams, exponent, coefficient=1, mode: NumericMode = EXACT) -> "BasisSeries":
        return cls(params, {as_rational(exponent): coefficient}, mode)

    @property
    def terms(self) -> dict:
        return dict(zip(self._exps, self._coefs))

    @property
    def exponents(self) -> tuple:
        return self._exps

    @property
    def coefficients(self) -> tuple:
        return self._coefs

    def items(self) -> Iterator[tuple]:
        return zip(self._exps, self._coefs)

    def __len__(self):
        return len(self._exps)

    def __getitem__(self, exponent):
        e = as_rational(exponent)
        for ee, c in zip(self._exps, self._coefs):
            if ee == e:
                return c
        return self.mode.coerce(0)

    def is_zero(self) -> bool:
        return not self._exps

    @property
    def min_exponent(self):
        return self._exps[0] if self._exps else None

    @property
    def max_exponent(self):
        return self._exps[-1] if self._exps else None

    def max_abs_coefficient(self):
        if not self._coefs:
            return self.mode.coerce(0)
        return max(abs(c) for c in self._coefs)

    def to_mode(self, mode: NumericMode) -> "BasisSeries":
        """Convert exact coefficients to ``mode`` (Approx to Exact is refused)."""
        if mode == self.mode:
            return self
        if mode.is_exact:
            raise TypeError("cannot convert an approximate series to exact mode")
        return BasisSeries(self.params, self.items(), mode)

    def scale(self, factor) -> "BasisSeries":
        with self.mode.context():
            f = self.mode.coerce(factor)
            return BasisSeries(self.params, ((e, c * f) for e, c in self.items()), self.mode)

    def __add__(self, other):
        return series_add(self, other)

    def __sub__(self, other):
        return series_add(self, other.scale(-1))

    def __neg__(self):
        return self.scale(-1)

    def __mul__(self, other):
        if isinstance(other, BasisSeries):
            return series_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, BasisSeries):
            return NotImplemented
        return (
            self.params == other.params
            and self.mode == other.mode
            and self._exps == other._exps
            and self._coefs == other._coefs
        )

    def __hash__(self):
        return hash((self.params, self.mode, self._exps, self._coefs))

    def __repr__(self):
        if not self._exps:
            body = "0"
        else:
            body = " + ".join(f"({format_number(c, 12)})*t^-{e}" for e, c in self.items())
        return f"BasisSeries[{self.params}; {self.mode}]({body})"

    def to_json(self) -> str:
        return json.dumps(series_to_dict(self))

    @classmethod
    def from_json(cls, text: str) -> "BasisSeries":
        return series_from_dict(json.loads(text))


def _check_compatible(a: BasisSeries, b: BasisSeries):
    if a.params != b.params:
        raise ParameterMismatchError(f"basis parameters differ: ({a.params}) vs ({b.params})")
    if a.mode != b.mode:
        raise ParameterMismatchError(f"numeric modes differ: {a.mode} vs {b.mode}")


def _to_dense(s: BasisSeries, q: int):
    """Return (start_index, object array) of coefficients on the ``1/q`` lattice."""
    idx = [int(e * q) for e in s._exps]
    start = idx[0]
    arr = np.zeros(idx[-1] - start + 1, dtype=object)
    arr[:] = 0
    for i, c in zip(idx, s._coefs):
        arr[i - start] = c
    return start, arr


def _from_dense(params, mode, start: int, q: int, arr) -> BasisSeries:
    exps, coefs = [], []
    for i, c in enumerate(arr):
        if isinstance(c, int):
            c = mode.coerce(c)
        if not mode.is_zero(c):
            exps.append(Fraction(start + i, q))
            coefs.append(c)
    return BasisSeries._raw(params, mode, exps, coefs)


def series_add(a: BasisSeries, b: BasisSeries) -> BasisSeries:
    """Termwise sum; coefficients that cancel are removed."""
    _check_compatible(a, b)
    return series_sum([a, b])


def series_sum(items: list) -> BasisSeries:
    """Sum many series sharing params and mode in one pass."""
    if not items:
        raise ValueError("series_sum needs at least one series")
    first = items[0]
    for s in items[1:]:
        _check_compatible(first, s)
    mode = first.mode
    acc: dict = {}
    with mode.context():
        for s in items:
            for e, c in s.items():
                acc[e] = acc[e] + c if e in acc else c
    keep = sorted((e, c) for e, c in acc.items() if not mode.is_zero(c))
    return BasisSeries._raw(first.params, mode, [e for e, _ in keep], [c for _, c in keep])


def series_mul(a: BasisSeries, b: BasisSeries) -> BasisSeries:
    """Full convolution product: exponents add, coefficients multiply and accumulate."""
    _check_compatible(a, b)
    if a.is_zero() or b.is_zero():
        return BasisSeries.zero(a.params, a.mode)
    q = _lcm_denominator(a._exps + b._exps)
    sa, da = _to_dense(a, q)
    sb, db = _to_dense(b, q)
    with a.mode.context():
        prod = np.convolve(da, db)
        return _from_dense(a.params, a.mode, sa + sb, q, prod)


def series_mul_by_x(a: BasisSeries) -> BasisSeries:
    """Multiply by ``x = (t - alpha)/beta``; every exponent must be at least 1."""
    if a.is_zero():
        return a
    if a.min_exponent < 1:
        raise BasisEscapeError(
            f"x * t^-{a.min_exponent} leaves the decaying basis (needs exponent >= 1)"
        )
    mode = a.mode
    with mode.context():
        beta = mode.coerce(a.params.beta)
        alpha = mode.coerce(a.params.alpha)
        inv_beta = 1 / beta
        ratio = alpha / beta
        acc: dict = {}
        for e, c in a.items():
            lo = e - 1
            acc[lo] = acc[lo] + c * inv_beta if lo in acc else c * inv_beta
            acc[e] = acc[e] - c * ratio if e in acc else -c * ratio
        keep = sorted((e, c) for e, c in acc.items() if not mode.is_zero(c))
    return BasisSeries._raw(a.params, mode, [e for e, _ in keep], [c for _, c in keep])


def series_d2(a: BasisSeries) -> BasisSeries:
    """Second x-derivative: ``c*t^-e -> c*e*(e+1)*beta**2 * t^-(e+2)``."""
    mode = a.mode
    with mode.context():
        b2 = mode.coerce(a.params.beta) ** 2
        exps, coefs = [], []
        for e, c in a.items():
            if e == 0:
                continue
            v = c * mode.coerce(e * (e + 1)) * b2
            if not mode.is_zero(v):
                exps.append(e + 2)
                coefs.append(v)
    return BasisSeries._raw(a.params, mode, exps, coefs)


def _power(base, exponent: Fraction, mode: NumericMode):
    """``base ** (-exponent)`` exactly when possible, otherwise in ``mode``."""
    if exponent.denominator == 1:
        return base ** (-int(exponent))
    if mode.is_exact:
        raise DomainError(f"t^-{exponent} is irrational; evaluate in Approx mode")
    return base ** (-mode.coerce(exponent))


def series_eval(a: BasisSeries, x, mode: NumericMode | None = None):
    """Evaluate at ``x >= 0``.

    In Exact mode with a rational ``x`` and integer exponents the result is an
    exact rational.  Otherwise the series is converted to ``mode`` (default:
    the series' own precision, or 512 bits for an exact series) first.
    """
    if mode is None:
        mode = a.mode
    if mode.is_exact and not a.mode.is_exact:
        raise TypeError("cannot evaluate an approximate series in exact mode")
    if mode.is_exact:
        if isinstance(x, type(mpfr())) or isinstance(x, float):
            mode = NumericMode.approx(DEFAULT_PRECISION)
        elif any(e.denominator != 1 for e in a._exps):
            mode = NumericMode.approx(DEFAULT_PRECISION)
    with mode.context():
        xv = mode.coerce(x)
        if xv < 0:
            raise DomainError(f"series are evaluated on x >= 0, got {x}")
        s = a.to_mode(mode)
        t = mode.coerce(a.params.alpha) + mode.coerce(a.params.beta) * xv
        total = mode.coerce(0)
        for e, c in s.items():
            total += c * _power(t, e, mode)
        return total


def deriv_at_zero(a: BasisSeries, order: int):
    """First or second x-derivative at the origin, exact in Exact mode."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    mode = a.mode
    with mode.context():
        alpha = mode.coerce(a.params.alpha)
        beta = mode.coerce(a.params.beta)
        total = mode.coerce(0)
        for e, c in a.items():
            ee = mode.coerce(e)
            if order == 1:
                total -= c * ee * beta * _power(alpha, e + 1, mode)
            else:
                total += c * ee * (ee + 1) * beta * beta * _power(alpha, e + 2, mode)
        return total


def series_to_dict(s: BasisSeries) -> dict:
    p = s.params
    out = {
        "alpha": str(p.alpha),
        "beta": str(p.beta),
        "gamma": str(p.gamma),
        "mode": "exact" if s.mode.is_exact else "float",
    }
    if not s.mode.is_exact:
        out["precision"] = s.mode.precision
    out["terms"] = [{"e": str(e), "c": format_number(c)} for e, c in s.items()]
    return out


def series_from_dict(data: dict) -> BasisSeries:
    params = BasisParams(parse_number(data["alpha"]), parse_number(data["beta"]), parse_number(data["gamma"]))
    if data.get("mode", "exact") == "exact":
        mode = EXACT
        terms = [(parse_number(t["e"]), parse_number(t["c"])) for t in data["terms"]]
    else:
        mode = NumericMode.approx(int(data.get("precision", DEFAULT_PRECISION)))
        terms = [(parse_number(t["e"]), t["c"]) for t in data["terms"]]
    return BasisSeries(params, terms, mode)

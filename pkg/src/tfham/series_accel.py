"""Diagonal Pade acceleration of a series in the embedding parameter, evaluated at p=1.

Two independent routes are provided: a direct solve of the Pade denominator
system (:func:`pade_at_one` with ``method="direct"``) and Wynn's epsilon
algorithm on the partial sums (:func:`wynn_epsilon`).  Their even-column
entries coincide: ``eps_{2m}^{(0)} = [m/m](1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from .errors import DegeneracyError, DomainError

DIRECT = "direct"
EPSILON = "epsilon"


@dataclass(frozen=True)
class PadeResult:
    m: int
    value: object
    method: str
    cross_check: object = None


def _is_exact(values) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in values)


def _precision_of(values) -> int | None:
    precs = [v.precision for v in values if isinstance(v, type(gmpy2.mpfr()))]
    return max(precs) if precs else None


def _context(values):
    prec = _precision_of(values)
    if prec is None:
        return gmpy2.context(gmpy2.get_context())
    return gmpy2.context(gmpy2.get_context(), precision=prec)


def _solve(matrix, rhs, exact: bool):
    """Gaussian elimination with partial pivoting over Fraction or mpfr."""
    n = len(rhs)
    a = [list(row) + [b] for row, b in zip(matrix, rhs)]
    for col in range(n):
        if exact:
            piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        else:
            piv = max(range(col, n), key=lambda r: abs(a[r][col]))
            if a[piv][col] == 0:
                piv = None
        if piv is None:
            raise DegeneracyError(f"singular Pade system (column {col})")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / p
            if f != 0:
                row_r, row_c = a[r], a[col]
                for j in range(col, n + 1):
                    row_r[j] -= f * row_c[j]
    x = [None] * n
    for r in range(n - 1, -1, -1):
        s = a[r][n]
        for j in range(r + 1, n):
            s -= a[r][j] * x[j]
        x[r] = s / a[r][r]
    return x


def pade_coefficients(coeffs, m: int):
    """Numerator and denominator coefficients of ``[m/m]`` for ``sum a_k p**k`` (``q_0 = 1``)."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if len(coeffs) < 2 * m + 1:
        raise IndexError(f"[{m}/{m}] needs {2 * m + 1} coefficients, got {len(coeffs)}")
    a = list(coeffs)
    exact = _is_exact(a)
    if exact:
        a = [Fraction(v) for v in a]
    with _context(a):
        if m == 0:
            return [a[0]], [a[0] * 0 + 1]
        # sum_{j=0}^{m} q_j a_{k-j} = 0 for k = m+1..2m, q_0 = 1
        matrix = [[a[k - j] for j in range(1, m + 1)] for k in range(m + 1, 2 * m + 1)]
        rhs = [-a[k] for k in range(m + 1, 2 * m + 1)]
        q = [a[0] * 0 + 1] + _solve(matrix, rhs, exact)
        p = [sum(q[j] * a[i - j] for j in range(0, i + 1)) for i in range(m + 1)]
    return p, q


def _pade_direct(coeffs, m):
    p, q = pade_coefficients(coeffs, m)
    with _context(list(coeffs)):
        den = sum(q)
        if den == 0:
            raise DegeneracyError(f"[{m}/{m}] has a pole at p=1")
        return sum(p) / den


def partial_sums(coeffs) -> list:
    out, acc = [], None
    with _context(list(coeffs)):
        for c in coeffs:
            acc = c if acc is None else acc + c
            out.append(acc)
    return out


def pade_at_one(tail, m: int, method: str | None = None, cross_check: bool = False) -> PadeResult:
    """``[m/m]`` approximant of ``sum_k tail[k] * p**k`` at ``p = 1``.

    The default method is the direct solve for exact tails and the epsilon
    table for approximate tails.  With ``cross_check`` the other route is
    computed as well and stored on the result.
    """
    tail = list(tail)
    if len(tail) < 2 * m + 1:
        raise IndexError(f"[{m}/{m}] needs {2 * m + 1} coefficients, got {len(tail)}")
    if method is None:
        method = DIRECT if _is_exact(tail) else EPSILON
    if method not in (DIRECT, EPSILON):
        raise ValueError(f"unknown method {method!r}")

    def via(which):
        if which == DIRECT:
            return _pade_direct(tail, m)
        if m == 0:
            return tail[0]
        table = wynn_epsilon(partial_sums(tail[: 2 * m + 1]))
        v = diagonal(table, m)
        if v is None:
            raise DegeneracyError(f"epsilon table breaks down before column {2 * m}")
        return v

    value = via(method)
    other = None
    if cross_check:
        other = via(EPSILON if method == DIRECT else DIRECT)
    return PadeResult(m, value, method, other)


_INF = object()  # odd-column entry reached by dividing by a zero difference


def _eps_step(a, b, c, c_lo):
    """``c + 1/(a - b)`` with the conventions of the singular epsilon table."""
    if a is None or b is None or c is None:
        return None
    if a is _INF and b is _INF:
        # converged even column: eps_{k+2}^{(n)} = eps_k^{(n+1)}
        if c_lo is not None and c_lo is not _INF and c is not _INF and c_lo == c:
            return c
        return None
    if a is _INF or b is _INF:
        # an isolated infinity needs Wynn's singular cross rule; report unavailable
        return None
    d = a - b
    if d == 0:
        return _INF
    if c is _INF:
        return _INF
    return c + 1 / d


def wynn_epsilon(partial_sums) -> list:
    """Wynn's epsilon table.

    ``table[k][n]`` is ``eps_k^{(n)}`` for ``k = 0 .. len-1``; column 0 holds the
    partial sums.  Entries reached through a zero difference are ``None``
    (unavailable), and so is everything computed from them, except that a
    run of equal values passes through unchanged two columns later.  Tables
    that break down this way raise :class:`DegeneracyError` in
    :func:`pade_at_one` rather than return a wrong value.
    """
    s = list(partial_sums)
    if len(s) < 3:
        raise ValueError("wynn_epsilon needs at least 3 partial sums")
    with _context(s):
        prev = [0] * (len(s) + 1)  # eps_{-1}
        cur = list(s)
        table = [cur]
        for _k in range(1, len(s)):
            nxt = [_eps_step(cur[n + 1], cur[n], prev[n + 1], prev[n]) for n in range(len(cur) - 1)]
            prev, cur = cur, nxt
            table.append(cur)
    return [[None if v is _INF else v for v in col] for col in table]


def diagonal(table, m: int):
    """``eps_{2m}^{(0)}``, the ``[m/m]`` value at p=1, or ``None`` if unavailable."""
    col = 2 * m
    if col >= len(table) or not table[col]:
        return None
    return table[col][0]


def error_percent(value, reference):
    """``100 * |value - reference| / |reference|``."""
    if reference == 0:
        raise DomainError("reference value must be non-zero")
    return 100 * abs(value - reference) / abs(reference)

"""Homotopy-analysis recursion for the Thomas-Fermi problem ``x*u''**2 - u**3 = 0``.

The solution is built order by order in the basis ``t**(-e)``, ``t = alpha + beta*x``::

    u_0 = alpha * t**(-gamma)
    L(u_k) = L(u_{k-1}) + h * R_k,     u_k(0) = u_k(inf) = 0

with the auxiliary operator ``L = t/(gamma+1) * d2/dx2 + beta * d/dx``, which
maps ``t**(-e)`` to ``lam(e) * t**(-(e+1))`` and annihilates ``t**(-gamma)``
and constants.  ``R_k`` is the coefficient of ``p**(k-1)`` in
``N(sum u_m p**m)``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2

from .basis_series import (
    EXACT,
    BasisParams,
    BasisSeries,
    NumericMode,
    as_rational,
    deriv_at_zero,
    series_d2,
    series_eval,
    series_mul,
    series_mul_by_x,
    series_sum,
)
from .errors import BranchError, DomainError, EngineError, ResonanceError, SequencingError, TFHamError

# "consistent": denominator gamma+1, so that t**(-gamma) is in the kernel.
# "printed":    denominator alpha+gamma as typeset; kept only to demonstrate
#               that its kernel leaves the basis when alpha != 1.
OPERATOR_VARIANTS = ("consistent", "printed")

GUARD_BITS_PER_ORDER = 6


@dataclass(frozen=True)
class HamConfig:
    basis: BasisParams
    h: Fraction
    order: int
    mode: NumericMode = field(default_factory=lambda: NumericMode.approx())
    operator: str = "consistent"
    guard_bits: int | None = None

    def __post_init__(self):
        h = as_rational(self.h)
        if h >= 0:
            raise ValueError(f"h must be strictly negative, got {h}")
        object.__setattr__(self, "h", h)
        if int(self.order) != self.order or self.order < 0:
            raise ValueError(f"order must be a non-negative integer, got {self.order}")
        object.__setattr__(self, "order", int(self.order))
        if self.operator not in OPERATOR_VARIANTS:
            raise ValueError(f"unknown operator variant {self.operator!r}")
        if self.mode.is_exact and self.basis.gamma.denominator != 1:
            # the boundary constant needs alpha**gamma, irrational in general
            raise ValueError("Exact mode requires an integer gamma")

    @property
    def working_mode(self) -> NumericMode:
        """Mode the recursion runs in: the requested precision plus guard bits.

        Basis coefficients grow with alternating signs and the order-N
        quantities lose roughly 6*N bits to cancellation, so by default that
        many extra bits are carried internally.
        """
        if self.mode.is_exact:
            return self.mode
        guard = GUARD_BITS_PER_ORDER * self.order + 32 if self.guard_bits is None else self.guard_bits
        return NumericMode.approx(self.mode.precision + guard)


@dataclass(frozen=True)
class OrderDiagnostics:
    k: int
    term_count: int
    max_exponent: Fraction
    residual_verified: bool
    min_forcing_exponent: Fraction | None = None
    seconds: float = 0.0


@dataclass(frozen=True)
class DeformationSequence:
    """Orders ``u_0 .. u_N`` of one run plus per-order ``u_k'(0)`` and ``u_k''(0)``."""

    config: HamConfig
    orders: tuple
    slope_per_order: tuple
    curvature_per_order: tuple
    diagnostics: tuple = ()

    @property
    def n(self) -> int:
        return len(self.orders) - 1

    @property
    def partial_slopes(self) -> list:
        return _cumulative(self.slope_per_order, self.config.working_mode)

    @property
    def partial_curvatures(self) -> list:
        return _cumulative(self.curvature_per_order, self.config.working_mode)

    @property
    def slope(self):
        return self.partial_slopes[-1]

    @property
    def curvature(self):
        return self.partial_curvatures[-1]


def _cumulative(values, mode):
    out, acc = [], None
    with mode.context():
        for v in values:
            acc = v if acc is None else acc + v
            out.append(acc)
    return out


def _denominator(params: BasisParams, operator: str) -> Fraction:
    if operator == "consistent":
        return params.gamma + 1
    return params.alpha + params.gamma


def operator_eigenvalue(params: BasisParams, e, operator: str = "consistent") -> Fraction:
    """``lam(e)`` with ``L t**(-e) = lam(e) t**(-(e+1))``; ``beta**2 e (e-gamma)/(gamma+1)`` by default."""
    e = as_rational(e)
    d = _denominator(params, operator)
    return params.beta ** 2 * e * (e + 1 - d) / d


def kernel_exponents(params: BasisParams, operator: str = "consistent") -> tuple:
    """Exponents ``e`` with ``lam(e) = 0``: the constant and the nontrivial power."""
    return (Fraction(0), _denominator(params, operator) - 1)


def initial_guess(basis: BasisParams, mode: NumericMode = EXACT) -> BasisSeries:
    """``u_0 = alpha**gamma * t**(-gamma)`` (``alpha/t`` for gamma=1); 1 at x=0, 0 at infinity."""
    if basis.gamma.denominator == 1:
        coef = basis.alpha ** int(basis.gamma)
    elif mode.is_exact:
        raise ValueError("Exact mode requires an integer gamma")
    else:
        with mode.context():
            coef = mode.coerce(basis.alpha) ** mode.coerce(basis.gamma)
    return BasisSeries(basis, {basis.gamma: coef}, mode)


def apply_L(s: BasisSeries, operator: str = "consistent") -> BasisSeries:
    params, mode = s.params, s.mode
    with mode.context():
        terms = []
        for e, c in s.items():
            lam = operator_eigenvalue(params, e, operator)
            if lam != 0:
                terms.append((e + 1, c * mode.coerce(lam)))
    return BasisSeries(params, terms, mode)


def invert_L(f: BasisSeries, operator: str = "consistent") -> BasisSeries:
    """Particular solution of ``L(g) = f`` inside the basis.

    Raises :class:`ResonanceError` when a preimage exponent lies in the kernel.
    """
    params, mode = f.params, f.mode
    with mode.context():
        terms = []
        for e, c in f.items():
            pre = e - 1
            if pre < 0:
                raise ResonanceError(e, f"t^-{e} has no preimage in the decaying basis")
            lam = operator_eigenvalue(params, pre, operator)
            if lam == 0:
                raise ResonanceError(e, f"forcing t^-{e} resonates with kernel exponent {pre}")
            terms.append((pre, c / mode.coerce(lam)))
    return BasisSeries._raw(params, mode, [e for e, _ in terms], [c for _, c in terms])


class _Forcing:
    """Caches ``u_i''`` and the pair sums ``S_m = sum_{i+j=m} u_i u_j`` across orders."""

    def __init__(self, params, mode):
        self.params = params
        self.mode = mode
        self.orders: list = []
        self.d2: list = []
        self.squares: list = []

    def push(self, u: BasisSeries):
        self.orders.append(u)
        self.d2.append(series_d2(u))
        m = len(self.orders) - 1
        self.squares.append(_cauchy_term(self.orders, self.orders, m, self.params, self.mode))

    def forcing(self, k: int) -> BasisSeries:
        if k < 1:
            raise SequencingError("R_k is defined for k >= 1")
        if len(self.orders) < k:
            raise SequencingError(f"R_{k} needs orders 0..{k - 1}, only {len(self.orders)} present")
        m = k - 1
        curv = _cauchy_term(self.d2, self.d2, m, self.params, self.mode)
        cubic = series_sum(
            [series_mul(self.orders[i], self.squares[m - i]) for i in range(m + 1)]
        )
        return series_sum([series_mul_by_x(curv), cubic.scale(-1)])


def _cauchy_term(a: list, b: list, m: int, params, mode) -> BasisSeries:
    """``sum_{i=0}^{m} a_i * b_{m-i}``, using symmetry when ``a is b``."""
    if a is b:
        parts = [series_mul(a[i], a[m - i]).scale(2) for i in range((m + 1) // 2)]
        if m % 2 == 0:
            parts.append(series_mul(a[m // 2], a[m // 2]))
    else:
        parts = [series_mul(a[i], b[m - i]) for i in range(m + 1)]
    if not parts:
        return BasisSeries.zero(params, mode)
    return series_sum(parts)


def _forcing_from(seq: DeformationSequence, upto: int) -> _Forcing:
    if len(seq.orders) < upto:
        raise SequencingError(f"sequence holds orders 0..{len(seq.orders) - 1}, need 0..{upto - 1}")
    fc = _Forcing(seq.config.basis, seq.config.working_mode)
    for u in seq.orders[:upto]:
        fc.push(u)
    return fc


def compute_Rk(seq: DeformationSequence, k: int) -> BasisSeries:
    """``R_k = x * sum_i u_i'' u_{k-1-i}'' - sum_{i+j+l=k-1} u_i u_j u_l``."""
    if k < 1:
        raise SequencingError("R_k is defined for k >= 1")
    return _forcing_from(seq, k).forcing(k)


def _boundary_fix(s: BasisSeries) -> BasisSeries:
    """Add ``C1 t**(-gamma)`` so the result vanishes at x=0."""
    params, mode = s.params, s.mode
    with mode.context():
        v0 = series_eval(s, 0, mode) if not s.is_zero() else mode.coerce(0)
        if params.gamma.denominator == 1:
            a_pow = mode.coerce(params.alpha) ** int(params.gamma)
        else:
            a_pow = mode.coerce(params.alpha) ** mode.coerce(params.gamma)
        c1 = -a_pow * v0
        return series_sum([s, BasisSeries(params, {params.gamma: c1}, mode)])


def _solve_with(prev: BasisSeries, rk: BasisSeries, h, operator) -> BasisSeries:
    mode = prev.mode
    with mode.context():
        particular = invert_L(rk, operator).scale(mode.coerce(h))
    return _boundary_fix(series_sum([prev, particular]))


def solve_order(seq: DeformationSequence, k: int) -> BasisSeries:
    """``u_k = u_{k-1} + h*invert_L(R_k) + C1*t**(-gamma)`` with ``u_k(0) = 0``."""
    cfg = seq.config
    rk = compute_Rk(seq, k)
    return _solve_with(seq.orders[k - 1], rk, cfg.h, cfg.operator)


def run(config: HamConfig, verify: bool | None = None, progress=None) -> DeformationSequence:
    """Compute ``u_0 .. u_N``.

    ``verify`` checks the order-k identity after each step (default: on in
    Exact mode).  Any engine failure is re-raised as :class:`EngineError`
    carrying the failing order.
    """
    mode = config.working_mode
    basis = config.basis
    if verify is None:
        verify = mode.is_exact
    u0 = initial_guess(basis, mode)
    fc = _Forcing(basis, mode)
    fc.push(u0)
    slopes = [deriv_at_zero(u0, 1)]
    curvs = [deriv_at_zero(u0, 2)]
    diags = [OrderDiagnostics(0, len(u0), u0.max_exponent, True)]
    for k in range(1, config.order + 1):
        t0 = time.perf_counter()
        try:
            rk = fc.forcing(k)
            min_e = rk.min_exponent
            if basis.gamma == 1 and config.operator == "consistent" and min_e is not None and min_e < 3:
                raise ResonanceError(min_e, f"forcing exponent {min_e} < 3 contradicts the no-resonance bound")
            uk = _solve_with(fc.orders[k - 1], rk, config.h, config.operator)
        except TFHamError as exc:
            raise EngineError(k, exc) from exc
        verified = False
        if verify:
            with mode.context():
                res = series_sum(
                    [apply_L(uk, config.operator), apply_L(fc.orders[k - 1], config.operator).scale(-1),
                     rk.scale(-mode.coerce(config.h))]
                )
            verified = res.is_zero()
        fc.push(uk)
        slopes.append(deriv_at_zero(uk, 1))
        curvs.append(deriv_at_zero(uk, 2))
        diags.append(
            OrderDiagnostics(k, len(uk), uk.max_exponent, verified, min_e, time.perf_counter() - t0)
        )
        if progress is not None:
            progress(k)
    return DeformationSequence(config, tuple(fc.orders), tuple(slopes), tuple(curvs), tuple(diags))


def partial_sum(seq: DeformationSequence, upto: int) -> BasisSeries:
    """``u_0 + ... + u_upto`` as one series."""
    if upto < 0 or upto > seq.n:
        raise IndexError(f"upto={upto} outside 0..{seq.n}")
    return series_sum(list(seq.orders[: upto + 1]))


def order_residual(seq: DeformationSequence, k: int) -> BasisSeries:
    """``L(u_k) - L(u_{k-1}) - h R_k``; identically zero for a correct solve."""
    if k < 1 or k > seq.n:
        raise SequencingError(f"order {k} not available")
    cfg = seq.config
    mode = cfg.working_mode
    rk = compute_Rk(seq, k)
    with mode.context():
        return series_sum(
            [apply_L(seq.orders[k], cfg.operator), apply_L(seq.orders[k - 1], cfg.operator).scale(-1),
             rk.scale(-mode.coerce(cfg.h))]
        )


def original_residual(s: BasisSeries, grid, precision: int | None = None) -> list:
    """Signed residual ``u'' - sqrt(u**3/x)`` of the unsquared Thomas-Fermi equation.

    Squaring admits the spurious branch ``u'' = -sqrt(u**3/x)``; this residual
    is near zero only on the physical (convex) branch.
    """
    if s.mode.is_exact:
        mode = NumericMode.approx(precision or 512)
        s = s.to_mode(mode)
    else:
        mode = s.mode
    d2 = series_d2(s)
    out = []
    with mode.context():
        for x in grid:
            xv = mode.coerce(x)
            if xv <= 0:
                raise DomainError(f"grid points must be positive, got {x}")
            u = series_eval(s, xv, mode)
            if u <= 0:
                raise BranchError(f"u({x}) = {float(u):.3g} <= 0; square root undefined")
            out.append(series_eval(d2, xv, mode) - gmpy2.sqrt(u ** 3 / xv))
    return out

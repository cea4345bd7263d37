"""Numerical reference for the Thomas-Fermi equation ``u'' = sqrt(u**3 / x)``, ``u(0)=1``, ``u(inf)=0``.

The unknown initial slope ``B = u'(0)`` is found by bisection on the fate of
each shot: slopes that are too steep drive ``u`` through zero, slopes that are
too shallow make ``u`` turn upward.  Integration starts at a small ``x0`` from
the singular expansion ``u = 1 + B x + 4/3 x**1.5 + 2B/5 x**2.5 + ...``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BracketError, DomainError, IntegrationError

CROSSED_ZERO = "crossed_zero"
TURNED_UPWARD = "turned_upward"
REACHED_FAR = "reached_far_boundary"


@dataclass(frozen=True)
class ShootingConfig:
    x_start: float = 1e-6
    x_max: float = 200.0
    ode_tol: float = 1e-12
    slope_bracket: tuple = (-1.7, -1.5)
    bracket_tol: float = 1e-12
    max_iterations: int = 200

    def __post_init__(self):
        if not 0 < self.x_start <= 1e-4:
            raise DomainError(f"x_start must lie in (0, 1e-4], got {self.x_start}")
        if self.x_max <= 1:
            raise DomainError("x_max must exceed 1")
        lo, hi = self.slope_bracket
        if not lo < hi:
            raise DomainError("slope_bracket must be (low, high) with low < high")


@dataclass(frozen=True)
class ShotOutcome:
    kind: str
    x: float
    u: float
    u_prime: float


@dataclass
class ShootingResult:
    slope: float
    iterations: int
    bracket: tuple
    config: ShootingConfig
    samples: list = field(default_factory=list)
    history: list = field(default_factory=list)
    _dense: object = field(default=None, repr=False)


def singular_coefficients(B, n_terms: int = 16) -> list:
    """Coefficients ``c_n`` of ``u = sum c_n x**(n/2)`` solving ``u'' = x**(-1/2) u**(3/2)``.

    ``c_0 = 1, c_1 = 0, c_2 = B``; from ``n = 3`` on, matching ``x**((n-4)/2)``
    gives ``c_n (n/2)(n/2 - 1) = w_{n-3}`` where ``w = u**(3/2)`` is expanded by
    the J.C.P. Miller power recurrence.  Works for floats or Fractions.
    """
    one = B * 0 + 1
    c = [one, 0 * one, B]
    w = [one]  # w_n for u**1.5
    a = Fraction(3, 2) if isinstance(B, Fraction) else 1.5

    def w_next(n):
        # n*c_0*w_n = sum_{k=1}^{n} (a*k - n + k) c_k w_{n-k}
        s = 0 * one
        for k in range(1, n + 1):
            s += (a * k - n + k) * c[k] * w[n - k]
        return s / (n * c[0])

    while len(c) < n_terms:
        n = len(c)
        need = n - 3
        while len(w) <= need:
            w.append(w_next(len(w)))
        half = Fraction(n, 2) if isinstance(B, Fraction) else n / 2
        c.append(w[need] / (half * (half - 1)))
    return c


def small_x_state(B: float, x0: float, n_terms: int = 16):
    """``(u, u')`` at ``x0`` from the truncated singular expansion."""
    if not 0 < x0 <= 1e-4:
        raise DomainError(f"x0 must lie in (0, 1e-4], got {x0}")
    c = singular_coefficients(float(B), n_terms)
    r = math.sqrt(x0)
    u = sum(cn * r ** n for n, cn in enumerate(c))
    up = sum(cn * (n / 2) * r ** (n - 2) for n, cn in enumerate(c) if n >= 2)
    return u, up


def _rhs(x, y):
    u = y[0]
    return [y[1], math.sqrt(u ** 3 / x) if u > 0 else 0.0]


def _hit_zero(x, y):
    return y[0]


_hit_zero.terminal = True
_hit_zero.direction = -1


def _turn_up(x, y):
    return y[1]


_turn_up.terminal = True
_turn_up.direction = 1


def _integrate(B, cfg: ShootingConfig, dense=False):
    u0, up0 = small_x_state(B, cfg.x_start)
    sol = solve_ivp(
        _rhs,
        (cfg.x_start, cfg.x_max),
        [u0, up0],
        method="DOP853",
        rtol=cfg.ode_tol,
        atol=cfg.ode_tol * 1e-3,
        events=(_hit_zero, _turn_up),
        dense_output=dense,
    )
    if sol.status == -1:
        raise IntegrationError(float(sol.t[-1]), sol.message)
    return sol


def integrate_shot(B: float, cfg: ShootingConfig | None = None) -> ShotOutcome:
    """Integrate one trajectory with initial slope ``B`` and classify its fate."""
    cfg = cfg or ShootingConfig()
    if not -3 < B < 0:
        raise DomainError(f"initial slope {B} outside (-3, 0)")
    return _classify(_integrate(B, cfg))


def _classify(sol) -> ShotOutcome:
    if sol.status == 1:
        if len(sol.t_events[0]):
            y = sol.y_events[0][0]
            return ShotOutcome(CROSSED_ZERO, float(sol.t_events[0][0]), float(y[0]), float(y[1]))
        y = sol.y_events[1][0]
        return ShotOutcome(TURNED_UPWARD, float(sol.t_events[1][0]), float(y[0]), float(y[1]))
    return ShotOutcome(REACHED_FAR, float(sol.t[-1]), float(sol.y[0, -1]), float(sol.y[1, -1]))


def _side(outcome: ShotOutcome) -> int:
    """-1 when the slope is too steep, +1 when too shallow."""
    if outcome.kind == CROSSED_ZERO:
        return -1
    if outcome.kind == TURNED_UPWARD:
        return 1
    # still undecided at x_max: the growing mode x**4.77 dominates u + x u'/3
    # (which vanishes on the exact 144/x**3 tail)
    return 1 if outcome.u + outcome.x * outcome.u_prime / 3 > 0 else -1


def find_initial_slope(cfg: ShootingConfig | None = None, grid=None) -> ShootingResult:
    """Bisect the slope bracket until its width is below ``bracket_tol``."""
    cfg = cfg or ShootingConfig()
    lo, hi = (float(v) for v in cfg.slope_bracket)
    o_lo, o_hi = integrate_shot(lo, cfg), integrate_shot(hi, cfg)
    s_lo, s_hi = _side(o_lo), _side(o_hi)
    if s_lo == s_hi:
        raise BracketError(
            f"both bracket endpoints {lo}, {hi} classify as {o_lo.kind}/{o_hi.kind}"
        )
    history = [(lo, o_lo.kind), (hi, o_hi.kind)]
    it = 0
    while hi - lo > cfg.bracket_tol and it < cfg.max_iterations:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        o = integrate_shot(mid, cfg)
        history.append((mid, o.kind))
        if _side(o) == s_lo:
            lo = mid
        else:
            hi = mid
        it += 1
    slope = 0.5 * (lo + hi)
    result = ShootingResult(slope, it, (lo, hi), cfg, history=history)
    result._dense = _integrate(slope, cfg, dense=True)
    result.samples = sample_solution(result, np.linspace(0, 10, 41) if grid is None else grid)
    return result


def sample_solution(result: ShootingResult, grid) -> list:
    """``(x, u)`` pairs of the converged trajectory; ``u(0) = 1`` exactly."""
    cfg = result.config
    sol = result._dense
    if sol is None:
        sol = result._dense = _integrate(result.slope, cfg, dense=True)
    x_end = float(sol.t[-1])
    out = []
    for x in grid:
        x = float(x)
        if x < 0 or x > cfg.x_max:
            raise DomainError(f"grid point {x} outside [0, {cfg.x_max}]")
        if x == 0:
            out.append((0.0, 1.0))
        elif x < cfg.x_start:
            out.append((x, small_x_state(result.slope, x)[0]))
        elif x > x_end:
            raise DomainError(f"trajectory ends at x={x_end:.4g} before grid point {x}")
        else:
            out.append((x, float(sol.sol(x)[0])))
    return out


def derivative_samples(result: ShootingResult, grid) -> list:
    """``(x, u, u')`` along the converged trajectory (x > x_start)."""
    sol = result._dense
    return [(float(x), *(float(v) for v in sol.sol(float(x)))) for x in grid]

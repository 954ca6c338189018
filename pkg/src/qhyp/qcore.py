"""Foundational q-arithmetic: Pochhammer symbols, theta, Jackson integration.

Everything here is pure and reentrant.  The global numeric policy lives in
:class:`QContext`; all truncations stop only after three consecutive
sub-tolerance terms so that isolated tiny terms of alternating series do not
trigger premature truncation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import (
    BudgetExceededError,
    DomainError,
    NonDecayingSumError,
    PoleError,
)

_CONSECUTIVE_SMALL = 3
_ZERO_FACTOR_RTOL = 1e-12


@dataclass(frozen=True)
class QContext:
    """Numeric policy: base q, truncation budget and tolerances.

    ``tail_tol`` stops products/sums once consecutive term magnitudes fall
    below it (relative to the running term scale); ``eq_tol`` is the relative
    tolerance used by equality assertions built on top of this module.
    """

    q: complex
    max_terms: int = 512
    tail_tol: float = 1e-16
    eq_tol: float = 1e-8

    def __post_init__(self):
        aq = abs(self.q)
        if not 0.0 < aq < 1.0:
            raise ValueError(f"need 0 < |q| < 1, got |q| = {aq}")
        if self.max_terms < 1:
            raise ValueError("max_terms must be positive")
        if not 0.0 < self.tail_tol < self.eq_tol <= 1e-6:
            raise ValueError("need 0 < tail_tol < eq_tol <= 1e-6")

    def with_budget(self, max_terms: int) -> "QContext":
        return QContext(self.q, max_terms, self.tail_tol, self.eq_tol)


def qpoch_inf(a: complex, ctx: QContext) -> complex:
    """Infinite q-Pochhammer product prod_{n>=0} (1 - a q^n).

    Truncates once |a q^n| stays below ``tail_tol``; the discarded tail then
    differs from 1 by O(tail_tol).
    """
    a = complex(a)
    if a == 0:
        return 1.0 + 0.0j
    q = complex(ctx.q)
    result = 1.0 + 0.0j
    w = a
    for _ in range(ctx.max_terms):
        if abs(w) < ctx.tail_tol:
            return result
        result *= 1.0 - w
        w *= q
    raise BudgetExceededError(
        f"(a; q)_inf with |a|={abs(a):.3g}, |q|={abs(q):.6f} "
        f"did not reach tail_tol within {ctx.max_terms} factors"
    )


def qpoch_fin(a: complex, m: int, ctx: QContext) -> complex:
    """Finite q-Pochhammer (a)_m.

    For m >= 0 this is the exact finite product; for m < 0 it is computed
    directly as prod_{k=1}^{-m} (1 - a q^{-k})^{-1}, which avoids the
    cancellation of the two-infinite-product route.
    """
    a = complex(a)
    q = complex(ctx.q)
    if m >= 0:
        result = 1.0 + 0.0j
        w = a
        for _ in range(m):
            result *= 1.0 - w
            w *= q
        return result
    result = 1.0 + 0.0j
    for k in range(1, -m + 1):
        factor = 1.0 - a * q ** (-k)
        if abs(factor) <= _ZERO_FACTOR_RTOL * (1.0 + abs(a * q ** (-k))):
            raise PoleError(f"(a)_m pole: 1 - a q^-{k} vanishes for a={a}")
        result /= factor
    return result


def qpoch_ratio(nums: Sequence[complex], dens: Sequence[complex], ctx: QContext) -> complex:
    """prod (n_i)_inf / prod (d_j)_inf, accumulated factor-by-factor.

    Interleaving numerator and denominator factors keeps the partial products
    bounded even when individual arguments are large, as long as the overall
    ratio is representable.
    """
    nums = [complex(v) for v in nums]
    dens = [complex(v) for v in dens]
    q = complex(ctx.q)
    result = 1.0 + 0.0j
    wn = nums[:]
    wd = dens[:]
    for _ in range(ctx.max_terms):
        if all(abs(w) < ctx.tail_tol for w in wn) and all(
            abs(w) < ctx.tail_tol for w in wd
        ):
            return result
        for i, w in enumerate(wn):
            if abs(w) >= ctx.tail_tol:
                result *= 1.0 - w
                wn[i] = w * q
        for i, w in enumerate(wd):
            if abs(w) >= ctx.tail_tol:
                factor = 1.0 - w
                if abs(factor) <= _ZERO_FACTOR_RTOL * (1.0 + abs(w)):
                    raise PoleError(f"denominator q-Pochhammer factor vanishes: arg={w}")
                result /= factor
                wd[i] = w * q
    raise BudgetExceededError("q-Pochhammer ratio did not converge within budget")


def theta(t: complex, ctx: QContext) -> complex:
    """theta(t) = (t)_inf (q/t)_inf.  Satisfies theta(q t) = -theta(t)/t."""
    t = complex(t)
    if t == 0:
        raise DomainError("theta(t) requires t != 0")
    return qpoch_inf(t, ctx) * qpoch_inf(ctx.q / t, ctx)


def _eval_f(f: Callable, t: complex) -> complex:
    return complex(f(t))


def jackson_0_to_tau(
    f: Callable[[complex], complex],
    tau: complex,
    measure: str,
    ctx: QContext,
) -> complex:
    """One-sided Jackson integral of ``f`` from 0 to ``tau``.

    measure "dqt" sums (1-q) sum_n f(tau q^n) tau q^n, measure "dqt_over_t"
    drops the weight.  Stops after three consecutive terms fall below
    ``tail_tol`` relative to the largest term seen.
    """
    if measure not in ("dqt", "dqt_over_t"):
        raise ValueError(f"unknown measure {measure!r}")
    tau = complex(tau)
    if tau == 0:
        return 0.0 + 0.0j
    q = complex(ctx.q)
    total = 0.0 + 0.0j
    scale = 1.0
    small = 0
    t = tau
    for _ in range(ctx.max_terms):
        term = _eval_f(f, t)
        if measure == "dqt":
            term *= t
        total += term
        mag = abs(term)
        scale = max(scale, mag)
        if mag < ctx.tail_tol * scale:
            small += 1
            if small >= _CONSECUTIVE_SMALL:
                return (1.0 - q) * total
        else:
            small = 0
        t *= q
    raise NonDecayingSumError(
        "one-sided Jackson sum did not meet the tail criterion within budget"
    )


def jackson_bilateral(
    f: Callable[[complex], complex],
    tau: complex,
    ctx: QContext,
    measure: str = "dqt_over_t",
) -> complex:
    """Bilateral Jackson integral: (1-q) sum over all n in Z of f(tau q^n).

    Both tails must decay; each direction is truncated by the same
    three-consecutive-small-terms rule as the one-sided sum.
    """
    if measure not in ("dqt", "dqt_over_t"):
        raise ValueError(f"unknown measure {measure!r}")
    tau = complex(tau)
    if tau == 0:
        raise DomainError("bilateral Jackson integral requires tau != 0")
    q = complex(ctx.q)

    def side(step_first: complex, step: complex, direction: str) -> complex:
        part = 0.0 + 0.0j
        scale = 1.0
        small = 0
        t = step_first
        for _ in range(ctx.max_terms):
            term = _eval_f(f, t)
            if measure == "dqt":
                term *= t
            part += term
            mag = abs(term)
            scale = max(scale, mag)
            if mag < ctx.tail_tol * scale:
                small += 1
                if small >= _CONSECUTIVE_SMALL:
                    return part
            else:
                small = 0
            t *= step
        raise NonDecayingSumError(
            f"bilateral Jackson sum: {direction} tail did not decay within budget"
        )

    up = side(tau, q, "n -> +inf")
    down = side(tau / q, 1.0 / q, "n -> -inf")
    return (1.0 - q) * (up + down)

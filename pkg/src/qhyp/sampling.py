"""Seeded random parameter draws with the admissibility margins the
verification sweeps need (balance constraints, genericity windows, pole-free
sampling windows, convergence room)."""

from __future__ import annotations

import cmath

import numpy as np

from .equations import (
    H2Params,
    H3Params,
    HeineParams,
    Heun3Params,
    HeunParams,
    Params2,
    Params3,
    qpow,
)
from .qcore import QContext

_MAX_REDRAWS = 2000


def _unit(rng: np.random.Generator, phase: float = 0.85) -> complex:
    return complex(np.exp(1j * rng.uniform(-phase * np.pi, phase * np.pi)))


def _mod(rng: np.random.Generator, lo: float, hi: float, phase: float = 0.85) -> complex:
    return rng.uniform(lo, hi) * _unit(rng, phase)


def draw_context(rng: np.random.Generator, **overrides) -> QContext:
    q = rng.uniform(0.35, 0.55)
    return QContext(q, **overrides)


def _q_window_clear(value: complex, q: complex, lo: int, hi: int, margin: float) -> bool:
    for k in range(lo, hi + 1):
        t = complex(q) ** k
        if abs(value - t) <= margin * max(abs(t), 1e-12):
            return False
    return True


def _pairwise_clear(vals_num, vals_den, q, margin=0.05, window=40) -> bool:
    """Every ratio n/d stays ``margin`` away from integer powers of q."""
    for n in vals_num:
        for d in vals_den:
            if not _q_window_clear(n / d, q, -window, window, margin):
                return False
    return True


def draw_params3(
    rng: np.random.Generator,
    ctx: QContext,
    series_room: bool = False,
) -> Params3:
    """Admissible degree-three tuple: balance holds by construction, B/A off
    the q-power grid, pairwise b/a ratios clear of pole grids.

    With ``series_room`` the draw also keeps the x-free series arguments
    inside the unit disc (|q b3/a1| and |q B/A| below 0.85).
    """
    q = complex(ctx.q)
    for _ in range(_MAX_REDRAWS):
        a = [_mod(rng, 0.8, 1.5) for _ in range(3)]
        b = [_mod(rng, 0.8, 1.5) for _ in range(3)]
        B = _mod(rng, 0.9, 1.3)
        A = q**2 * b[0] * b[1] * b[2] * B / (a[0] * a[1] * a[2])
        p = Params3(a[0], a[1], a[2], b[0], b[1], b[2], A, B)
        if not _q_window_clear(B / A, q, -64, 64, 1e-3):
            continue
        if not _pairwise_clear(b, a, q):
            continue
        if series_room and (abs(q * b[2] / a[0]) > 0.85 or abs(q * B / A) > 0.85):
            continue
        return p
    raise RuntimeError("could not draw admissible degree-three parameters")


def draw_params2(
    rng: np.random.Generator,
    ctx: QContext,
    series_room: bool = False,
) -> Params2:
    """Admissible degree-two tuple; alpha has positive real part so the
    endpoint at 0 and the bilateral endpoint both converge."""
    q = complex(ctx.q)
    for _ in range(_MAX_REDRAWS):
        alpha = complex(rng.uniform(0.35, 1.3), rng.uniform(-0.3, 0.3))
        a = [_mod(rng, 0.8, 1.5) for _ in range(2)]
        b = [_mod(rng, 0.8, 1.5) for _ in range(2)]
        B = _mod(rng, 0.9, 1.3)
        A = qpow(q, alpha + 1) * b[0] * b[1] * B / (a[0] * a[1])
        p = Params2(alpha, a[0], a[1], b[0], b[1], A, B)
        if not _q_window_clear(B / A, q, -64, 64, 1e-3):
            continue
        if not _q_window_clear(qpow(q, alpha), q, -8, 8, 0.02):
            continue
        if not _pairwise_clear(b, a, q):
            continue
        if series_room and abs(A / B) > 0.85:
            continue
        return p
    raise RuntimeError("could not draw admissible degree-two parameters")


def draw_heine(rng: np.random.Generator, ctx: QContext) -> HeineParams:
    """Generic Heine-family triple with all 32 catalogue domains usable."""
    q = complex(ctx.q)
    for _ in range(_MAX_REDRAWS):
        a = _mod(rng, 0.5, 1.6, phase=0.7)
        b = _mod(rng, 0.5, 1.6, phase=0.7)
        c = _mod(rng, 0.5, 1.6, phase=0.7)
        p = HeineParams(a, b, c)
        vals = [a, b, c, a * b / c, a / b, c / a, c / b, a * q / c, b * q / c]
        if not _pairwise_clear(vals, [1.0], q, margin=0.04, window=12):
            continue
        if abs(a * b / c) > 6 or abs(a * b / c) < 0.15:
            continue
        return p
    raise RuntimeError("could not draw admissible Heine parameters")


def draw_params2_terminating(
    rng: np.random.Generator, ctx: QContext, n: int = 4
) -> Params2:
    """Degree-two tuple with A/B = q^-n, the regime in which the term-by-term
    series degeneration from degree three is exact (the series terminate);
    alpha is then pinned by the balance constraint."""
    import cmath as _cm

    q = complex(ctx.q)
    for _ in range(_MAX_REDRAWS):
        a = [_mod(rng, 0.8, 1.5) for _ in range(2)]
        b = [_mod(rng, 0.8, 1.5) for _ in range(2)]
        B = _mod(rng, 0.9, 1.3)
        A = q ** (-n) * B
        alpha = _cm.log(a[0] * a[1] * A / (b[0] * b[1] * B)) / _cm.log(q) - 1
        p = Params2(alpha, a[0], a[1], b[0], b[1], A, B)
        if not _pairwise_clear(b, a, q):
            continue
        return p
    raise RuntimeError("could not draw terminating degree-two parameters")


def draw_heine_extra(rng: np.random.Generator, ctx: QContext, which: int) -> HeineParams:
    """Parameters for the two extra catalogue entries: the terminating factor
    for the formal series, the unit-disc constraint for the integral-analog."""
    p = draw_heine(rng, ctx)
    q = complex(ctx.q)
    if which == 1:
        return HeineParams(q ** (-3), p.b, p.c)
    return HeineParams(p.a * 0.55 / abs(p.a), p.b, p.c)


def draw_heine_for(
    rng: np.random.Generator, ctx: QContext, which: int, n: int = 2
) -> HeineParams:
    """Heine parameters admissible for catalogue row ``which``: generic for
    the everywhere-valid rows, with the row's terminating relation imposed
    for the zero-slot rows."""
    from .solutions import HEINE_TERMINATING

    p = draw_heine(rng, ctx)
    rel = HEINE_TERMINATING.get(which)
    if rel is None:
        return p
    q = complex(ctx.q)
    if rel == "a=q^-n":
        return HeineParams(q ** (-n), p.b, p.c)
    if rel == "b=q^-n":
        return HeineParams(p.a, q ** (-n), p.c)
    if rel == "a=q^n+1":
        return HeineParams(q ** (n + 1), p.b, p.c)
    if rel == "b=q^n+1":
        return HeineParams(p.a, q ** (n + 1), p.c)
    if rel == "c=a*q^-n":
        return HeineParams(p.a, p.b, p.a * q ** (-n))
    if rel == "c=a*q^n+1":
        return HeineParams(p.a, p.b, p.a * q ** (n + 1))
    raise ValueError(f"unknown terminating relation {rel!r}")


def draw_heun(rng: np.random.Generator, ctx: QContext) -> HeunParams:
    return HeunParams(
        h1=_expn(rng), h2=_expn(rng), l1=_expn(rng), l2=_expn(rng),
        t1=_mod(rng, 0.6, 1.5), t2=_mod(rng, 0.6, 1.5),
        alpha1=_expn(rng), alpha2=_expn(rng), beta=_expn(rng),
        E=_mod(rng, 0.3, 1.2),
    )


def draw_heun3(rng: np.random.Generator, ctx: QContext) -> Heun3Params:
    return Heun3Params(
        h1=_expn(rng), h2=_expn(rng), h3=_expn(rng),
        l1=_expn(rng), l2=_expn(rng), l3=_expn(rng),
        t1=_mod(rng, 0.6, 1.5), t2=_mod(rng, 0.6, 1.5), t3=_mod(rng, 0.6, 1.5),
        beta=_expn(rng), E=_mod(rng, 0.3, 1.2),
    )


def draw_h2(rng: np.random.Generator, ctx: QContext) -> H2Params:
    return H2Params(
        h1=_expn(rng), h2=_expn(rng), l1=_expn(rng), l2=_expn(rng),
        t1=_mod(rng, 0.6, 1.5), t2=_mod(rng, 0.6, 1.5),
        alpha1=_expn(rng), alpha2=_expn(rng),
    )


def draw_h3(rng: np.random.Generator, ctx: QContext) -> H3Params:
    return H3Params(
        h1=_expn(rng), h2=_expn(rng), h3=_expn(rng),
        l1=_expn(rng), l2=_expn(rng), l3=_expn(rng),
        t1=_mod(rng, 0.6, 1.5), t2=_mod(rng, 0.6, 1.5), t3=_mod(rng, 0.6, 1.5),
        alpha=_expn(rng),
    )


def _expn(rng: np.random.Generator) -> complex:
    return complex(rng.uniform(-0.8, 0.8), rng.uniform(-0.25, 0.25))


def draw_equation_params(kind: str, rng: np.random.Generator, ctx: QContext):
    if kind == "heine":
        return draw_heine(rng, ctx)
    if kind == "qheun":
        return draw_heun(rng, ctx)
    if kind == "qheun3":
        return draw_heun3(rng, ctx)
    if kind == "h2":
        return draw_h2(rng, ctx)
    if kind == "h3":
        return draw_h3(rng, ctx)
    if kind == "e2":
        return draw_params2(rng, ctx, series_room=True)
    if kind == "e3":
        return draw_params3(rng, ctx, series_room=True)
    raise ValueError(f"unknown equation kind {kind!r}")


def default_sigma(p: Params2) -> complex:
    """Generic bilateral-endpoint constant off every pole grid."""
    scale = float(np.sqrt(abs(p.a1) * abs(p.a2)))
    return 1.17 * scale * cmath.exp(0.41j)

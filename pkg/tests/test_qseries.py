"""Series families: the general q-hypergeometric sum, bilateral series,
very-well-poised series, the q-Appell double sum and the transformation
identities connecting them."""

import numpy as np
import pytest

from conftest import rand_complex
from qhyp.errors import AnnulusError, DivergenceError, PoleError
from qhyp.qcore import QContext, qpoch_fin, qpoch_inf, qpoch_ratio
from qhyp.qseries import (
    PhiSpec,
    appell_phi1,
    bailey_w87_transform,
    heine_transformation_constant,
    is_balanced_w87,
    phi,
    phi21,
    psi33,
    w87,
    w87_to_phi32_limit,
)


class TestPhi:
    def test_argument_zero(self, ctx, rng):
        spec = PhiSpec([rand_complex(rng), rand_complex(rng)], [rand_complex(rng)], 0.0)
        assert phi(spec, ctx) == 1.0

    def test_q_binomial_theorem(self, ctx, rng):
        for _ in range(20):
            a = rand_complex(rng)
            z = rand_complex(rng, 0.1, 0.8)
            lhs = phi(PhiSpec([a], [], z), ctx)
            rhs = qpoch_ratio([a * z], [z], ctx)
            assert abs(lhs - rhs) <= ctx.eq_tol * abs(rhs)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_q_vandermonde(self, ctx, rng, n):
        a, c = rand_complex(rng), rand_complex(rng)
        lhs = phi21(a, ctx.q**-n, c, ctx.q, ctx)
        rhs = qpoch_fin(c / a, n, ctx) / qpoch_fin(c, n, ctx) * a**n
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))

    def test_shuffled_parameter_lists(self, ctx, rng):
        nums = [rand_complex(rng) for _ in range(3)]
        dens = [rand_complex(rng) for _ in range(2)]
        z = 0.4 + 0.2j
        v1 = phi(PhiSpec(nums, dens, z), ctx)
        v2 = phi(PhiSpec(nums[::-1], dens[::-1], z), ctx)
        assert abs(v1 - v2) <= 1e-13 * abs(v1)  # identical up to product order

    def test_divergence_r_greater(self, ctx):
        with pytest.raises(DivergenceError):
            phi(PhiSpec([0.3, 0.4, 0.5], [0.6], 0.5), ctx)

    def test_terminating_allows_large_argument(self, ctx):
        val = phi(PhiSpec([ctx.q**-2, 0.4, 0.5], [0.6], 3.0), ctx)
        assert np.isfinite(abs(val))

    def test_unit_disc_boundary(self, ctx):
        with pytest.raises(DivergenceError):
            phi(PhiSpec([0.3, 0.4], [0.6], 1.0), ctx)

    def test_denominator_pole(self, ctx):
        with pytest.raises(PoleError):
            phi(PhiSpec([0.3, 0.4], [ctx.q**-3], 0.5), ctx)

    def test_terminating_identity_chain(self, ctx, rng):
        """The four terminating representations of the regular solution agree."""
        q = complex(ctx.q)
        b, c, z = rand_complex(rng), rand_complex(rng), 0.55 + 0.1j
        for n in (1, 2, 3):
            a = q**-n
            r1 = phi21(a, b, c, z, ctx)
            r2 = qpoch_fin(a * z, n, ctx) * phi(PhiSpec([a, c / b], [c, a * z], b * z), ctx)
            r3 = (
                qpoch_fin(c / b, n, ctx)
                / qpoch_fin(c, n, ctx)
                * phi(PhiSpec([a, b, a * b * z / c], [q ** (1 - n) * b / c, 0.0], q), ctx)
            )
            r4 = (
                qpoch_fin(b, n, ctx)
                / qpoch_fin(c, n, ctx)
                * qpoch_fin(a * z, n, ctx)
                * phi(PhiSpec([a, c / b, 0.0], [q ** (1 - n) / b, a * z], q), ctx)
            )
            r5 = qpoch_fin(a * b * z / c, n, ctx) * phi(
                PhiSpec([c / b, a, 0.0], [c, c * q / (b * z)], q), ctx
            )
            for r in (r2, r3, r4, r5):
                assert abs(r - r1) <= 1e-12 * abs(r1)


class TestPsi33:
    def test_annulus_violation(self, ctx):
        with pytest.raises(AnnulusError):
            psi33([2.0, 1.5, 1.2], [0.2, 0.3, 0.4], 0.001, ctx)
        with pytest.raises(AnnulusError):
            psi33([2.0, 1.5, 1.2], [0.2, 0.3, 0.4], 1.1, ctx)

    def test_one_sided_reduction(self, ctx, rng):
        av = [0.31, 0.42, 0.47]
        bv = [complex(ctx.q), 0.11, 0.12]
        z = 0.5
        full = psi33(av, bv, z, ctx)
        one = sum(
            np.prod([qpoch_fin(a, n, ctx) for a in av])
            / np.prod([qpoch_fin(b, n, ctx) for b in bv])
            * z**n
            for n in range(250)
        )
        assert abs(full - one) <= 1e-12 * abs(full)

    def test_bilateral_brute_force(self, ctx):
        av = [2.3, 1.7, 1.1]
        bv = [0.21, 0.13, 0.17]
        z = 0.4
        q = complex(ctx.q)

        def term(n):
            t = z**n
            for a, b in zip(av, bv):
                if n >= 0:
                    t *= qpoch_fin(a, n, ctx) / qpoch_fin(b, n, ctx)
                else:
                    for k in range(1, -n + 1):
                        t *= (1 - b * q**-k) / (1 - a * q**-k)
            return t

        brute = sum(term(n) for n in range(-150, 250))
        assert abs(psi33(av, bv, z, ctx) - brute) <= 1e-12 * abs(brute)

    def test_list_permutation_invariance(self, ctx):
        av = [2.3, 1.7, 1.1]
        bv = [0.21, 0.13, 0.17]
        v1 = psi33(av, bv, 0.4, ctx)
        v2 = psi33(av[::-1], [bv[1], bv[0], bv[2]], 0.4, ctx)
        assert abs(v1 - v2) <= 1e-13 * abs(v1)

    def test_limit_lemma_extrapolation(self, ctx, rng):
        """(1-z) * bilateral sum -> product ratio as z -> 1: raw error
        decreasing over z = 1 - 1e-2, 1e-3, 1e-4 and Neville extrapolation
        (augmented with two intermediate nodes) accurate to 1e-8."""
        big = ctx.with_budget(600_000)
        for _ in range(3):
            av = [rand_complex(rng, 1.2, 1.9, 0.4) for _ in range(3)]
            bv = [rand_complex(rng, 0.1, 0.35, 0.4) for _ in range(3)]
            target = np.prod([qpoch_inf(a, ctx) for a in av]) / np.prod(
                [qpoch_inf(b, ctx) for b in bv]
            )
            coarse = [1e-2, 1e-3, 1e-4]
            errs = [abs(e * psi33(av, bv, 1 - e, big) - target) for e in coarse]
            assert errs[0] > errs[1] > errs[2]
            eps = [1e-2, 10**-2.5, 1e-3, 10**-3.5, 1e-4]
            xs = np.array(eps)
            ys = np.array([e * psi33(av, bv, 1 - e, big) for e in eps])
            tableau = ys.copy()
            for j in range(1, len(xs)):
                # Neville value at 0: combine spans [i, i+j]
                tableau = np.array([
                    (xs[i] * tableau[i + 1] - xs[i + j] * tableau[i])
                    / (xs[i] - xs[i + j])
                    for i in range(len(tableau) - 1)
                ])
            assert abs(tableau[0] - target) <= 1e-8 * abs(target)


class TestW87:
    def test_argument_zero(self, ctx, rng):
        v = w87(*(rand_complex(rng) for _ in range(6)), 0.0, ctx)
        assert v == 1.0

    def test_balanced_detector(self, ctx, rng):
        vals = [rand_complex(rng) for _ in range(6)]
        z = vals[0] ** 2 * ctx.q**2 / np.prod(vals[1:])
        assert is_balanced_w87(*vals, z, ctx)
        assert not is_balanced_w87(*vals, z * 1.01, ctx)

    def test_agrees_with_general_series_form(self, ctx, rng):
        """Dual route: the very-well-poised weight equals the 8-parameter
        general series with the +-sqrt(a) satellite parameters."""
        import cmath

        for _ in range(10):
            a = rand_complex(rng, 0.5, 1.3)
            params = [rand_complex(rng, 0.6, 1.4) for _ in range(5)]
            z = rand_complex(rng, 0.1, 0.6)
            sq = cmath.sqrt(a)
            q = complex(ctx.q)
            lhs = w87(a, *params, z, ctx)
            rhs = phi(PhiSpec(
                [a, q * sq, -q * sq] + params,
                [sq, -sq] + [q * a / p for p in params],
                z), ctx)
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))

    def test_bailey_two_term_transformation(self, ctx, rng):
        count = 0
        while count < 20:
            vals = [rand_complex(rng, 0.7, 1.4) for _ in range(6)]
            a, b, c, d, e, f = vals
            if abs(a * a * ctx.q**2 / np.prod(vals[1:])) >= 0.9:
                continue
            mu = ctx.q * a * a / (b * c * d)
            if abs(a * ctx.q / (e * f)) >= 0.9 or abs(mu * ctx.q / (e * f)) >= 0.9:
                continue
            lhs, rhs = bailey_w87_transform(a, b, c, d, e, f, ctx)
            assert abs(lhs - rhs) <= 1e-8 * abs(rhs)
            count += 1

    @pytest.mark.parametrize("which", [1, 2, 3, 4, 5, 6])
    def test_limits_to_phi32(self, which):
        """Each scaling degeneration converges monotonically to its 3phi2
        value; the growing-parameter variants are run in terminating form and
        along the q-lattice so the sum limit equals the term-by-term limit."""
        ctx = QContext(0.5)
        q = 0.5
        if which in (1, 4):
            args = (0.9, 1.2, 1.1, q**-5, 1.3, 1.4) if which == 1 else (
                0.9, 1.2, 1.1, 0.8, q**-5, 1.4)
        elif which in (5, 6):
            args = (q**-6 * 1.2 * 1.1, 1.2, 1.1, 0.8, 1.3, 1.4)
        else:
            args = (0.9, 1.2, 1.1, 0.8, 1.3, 1.4)
        errs = []
        for k in (12, 16, 20):
            ell = q**k if which in (2, 4, 6) else q**-k
            val, lim = w87_to_phi32_limit(which, *args, ell, ctx)
            errs.append(abs(val - lim) / abs(lim))
        assert errs[0] > errs[1] > errs[2]


class TestAppell:
    def test_reduces_to_single_series(self, ctx, rng):
        a, b1, b2, c = (rand_complex(rng) for _ in range(4))
        x1 = 0.3 + 0.1j
        v = appell_phi1(a, b1, b2, c, x1, 0.0, ctx)
        w = phi21(a, b1, c, x1, ctx)
        assert abs(v - w) <= 1e-12 * abs(w)

    def test_symmetry(self, ctx, rng):
        a, b1, b2, c = (rand_complex(rng) for _ in range(4))
        v1 = appell_phi1(a, b1, b2, c, 0.3, 0.2, ctx)
        v2 = appell_phi1(a, b2, b1, c, 0.2, 0.3, ctx)
        assert abs(v1 - v2) <= 1e-12 * abs(v1)

    def test_integral_representation(self, ctx, rng):
        """The one-dimensional Jackson integral reproduces the double sum."""
        import cmath

        from qhyp.qcore import jackson_0_to_tau

        q = complex(ctx.q)
        alpha = complex(rng.uniform(0.4, 1.2), rng.uniform(-0.2, 0.2))
        a = cmath.exp(alpha * cmath.log(q))
        b1, b2, c = (rand_complex(rng) for _ in range(3))
        x1, x2 = 0.35 + 0.1j, 0.25 - 0.15j

        def integrand(t):
            return cmath.exp(alpha * cmath.log(t)) * qpoch_ratio(
                [q * t, b1 * x1 * t, b2 * x2 * t], [c * t / a, x1 * t, x2 * t], ctx
            )

        lhs = jackson_0_to_tau(integrand, 1.0, "dqt_over_t", ctx)
        rhs = (
            (1 - q)
            * qpoch_ratio([q, c], [a, c / a], ctx)
            * appell_phi1(a, b1, b2, c, x1, x2, ctx)
        )
        assert abs(lhs - rhs) <= 1e-9 * abs(rhs)


class TestHeineTransformation:
    def test_constant_in_z(self, ctx, rng):
        for _ in range(20):
            a = rand_complex(rng, 0.2, 0.8)
            b, c = rand_complex(rng), rand_complex(rng)
            vals = [
                heine_transformation_constant(a, b, c, z, ctx)
                for z in (0.15, 0.3, 0.45)
            ]
            target = qpoch_inf(a, ctx) / qpoch_inf(c, ctx)
            assert all(abs(v - target) <= 1e-8 * abs(target) for v in vals)

import numpy as np
import pytest
from numpy.testing import assert_allclose

from zenoprop.core import free_propagator
from zenoprop.exact import (
    absorbing_boundary_propagator,
    absorbing_envelope,
    chain_integral,
    chain_plus_minus,
    chain_plus_plus,
    final_gap_ratio,
    free_propagator_boundary_derivative,
    half_value_ratio,
    projected_boundary_exact,
    projected_envelope_exact,
    reconstructed_triple_plus,
    restricted_propagator,
    restricted_propagator_boundary_derivative,
    time_averaged_envelope,
    time_averaged_product,
)


class TestRestrictedPropagator:
    def test_vanishes_on_boundary(self):
        assert restricted_propagator(1.0, 1.0, 0.0, 1.0) == 0
        assert restricted_propagator(1.0, 1.0, 1.0, 0.0) == 0
        assert restricted_propagator(1.0, 1.0, -0.5, 1.0) == 0

    def test_direct_substitution(self):
        got = restricted_propagator(1.0, 1.0, 1.0, 1.0)
        want = (2 * np.pi) ** -0.5 * np.exp(-1j * np.pi / 4) * (1 - np.exp(2j))
        assert got == pytest.approx(want, rel=1e-14)

    def test_satisfies_schrodinger_equation(self):
        # finite-difference residual of i dg/dt = -(1/2m) d2g/dx1^2 shrinks at
        # second order in the step
        m, t, x1, x0 = 1.0, 0.8, 1.3, 0.9

        def residual(h):
            dt_ = (restricted_propagator(m, t + h, x1, x0)
                   - restricted_propagator(m, t - h, x1, x0)) / (2 * h)
            dxx = (restricted_propagator(m, t, x1 + h, x0)
                   - 2 * restricted_propagator(m, t, x1, x0)
                   + restricted_propagator(m, t, x1 - h, x0)) / h**2
            return abs(1j * dt_ + dxx / (2 * m))

        r1, r2 = residual(1e-3), residual(5e-4)
        assert r1 < 1e-4
        assert r2 < r1 / 3  # ~4x reduction expected

    def test_time_domain_error(self):
        with pytest.raises(ValueError):
            restricted_propagator(1.0, 0.0, 1.0, 1.0)

    def test_boundary_derivative_is_twice_free(self):
        # the image term doubles the normal derivative on the boundary
        rng = np.random.default_rng(3)
        for _ in range(20):
            m, t = rng.uniform(0.5, 2.0, 2)
            x1 = rng.uniform(0.1, 4.0)
            got = restricted_propagator_boundary_derivative(m, t, x1)
            want = 2 * free_propagator_boundary_derivative(m, t, x1)
            assert got == pytest.approx(want, rel=1e-10)

    def test_boundary_derivative_matches_finite_difference(self):
        m, t, x1, h = 1.0, 0.7, 1.1, 1e-6
        fd = (restricted_propagator(m, t, x1, h)
              - restricted_propagator(m, t, x1, 0.0)) / h
        assert restricted_propagator_boundary_derivative(m, t, x1) == pytest.approx(
            fd, rel=1e-4
        )


class TestAbsorbingBoundary:
    def test_short_time_limit(self):
        assert absorbing_envelope(2.0, 1e-12) == pytest.approx(1.0, abs=1e-9)

    def test_log_two_point(self):
        v0 = 2.0
        assert absorbing_envelope(v0, np.log(2) / v0) == pytest.approx(
            1 / (2 * np.log(2)), rel=1e-14
        )

    def test_long_time_asymptote(self):
        v0, t = 1.0, 50.0
        assert absorbing_envelope(v0, t) == pytest.approx(1 / (v0 * t), rel=1e-12)

    def test_monotone_decreasing(self):
        t = np.linspace(0.01, 30, 4000)
        vals = absorbing_envelope(4 / 3, t)
        assert np.all(np.diff(vals) < 0)
        assert np.all((vals > 0) & (vals <= 1))

    def test_propagator_limits(self):
        m, t = 1.0, 1.0
        free = free_propagator(m, t, 0.0, 0.0)
        assert abs(absorbing_boundary_propagator(m, 1e9, t)) < 1e-8
        assert absorbing_boundary_propagator(m, 1e-9, t) == pytest.approx(free, rel=1e-8)

    def test_frozen_modulus(self):
        # m=1, v0=4/3, t=1: (2 pi)^(-1/2) (1-e^(-4/3))/(4/3), frozen at 64-bit
        got = abs(absorbing_boundary_propagator(1.0, 4 / 3, 1.0))
        assert got == pytest.approx(0.2203366777606899, rel=1e-14)

    def test_modulus_monotone_in_time(self):
        t = np.linspace(0.05, 20, 500)
        mods = [abs(absorbing_boundary_propagator(1.0, 4 / 3, tt)) for tt in t]
        assert np.all(np.diff(mods) < 0)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            absorbing_envelope(0.0, 1.0)
        with pytest.raises(ValueError):
            absorbing_envelope(1.0, -1.0)


class TestChainClosedForms:
    def test_equal_interval_values(self):
        eps = 1.7
        assert chain_plus_plus(eps, eps, eps) == pytest.approx(
            1 / (3 * np.sqrt(3 * eps)), rel=1e-14
        )
        assert chain_plus_minus(eps, eps, eps) == pytest.approx(
            1 / (6 * np.sqrt(3 * eps)), rel=1e-14
        )

    def test_symmetry_in_outer_intervals(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            e1, e2, e3 = rng.uniform(0.2, 3.0, 3)
            assert chain_plus_plus(e1, e2, e3) == pytest.approx(
                chain_plus_plus(e3, e2, e1), rel=1e-14
            )

    def test_marginalisation_sum(self):
        # removing the middle constraint: ++ plus +- = 1/(2 sqrt(total))
        rng = np.random.default_rng(6)
        for _ in range(30):
            e = rng.uniform(0.2, 3.0, 3)
            total = e.sum()
            got = chain_plus_plus(*e) + chain_plus_minus(*e)
            assert got == pytest.approx(1 / (2 * np.sqrt(total)), abs=1e-10)
        assert chain_plus_plus(1, 2, 3) + chain_plus_minus(1, 2, 3) == pytest.approx(
            1 / (2 * np.sqrt(6)), rel=1e-13
        )

    def test_wide_middle_decoupling(self):
        # e2 -> inf: the two half-line integrals decouple to 1/(4 sqrt(e2))
        big = 1e8
        assert chain_plus_plus(1.0, big, 1.0) == pytest.approx(
            1 / (4 * np.sqrt(big)), rel=1e-6
        )
        # quadrature oracle confirms the closed form on the way out
        mid = 25.0
        assert chain_integral("++", (1.0, mid, 1.0)) == pytest.approx(
            chain_plus_plus(1.0, mid, 1.0), abs=1e-6
        )

    def test_reconstructed_triple(self):
        for eps in (0.5, 1.0, 2.3):
            assert reconstructed_triple_plus(eps) == pytest.approx(
                1 / (4 * np.sqrt(4 * eps)), abs=1e-12
            )

    def test_rejects_nonpositive_intervals(self):
        with pytest.raises(ValueError):
            chain_plus_plus(1.0, 0.0, 1.0)


class TestChainBruteForce:
    def test_one_constraint_half(self):
        # single projection: exactly half the free result
        got = chain_integral("+", (1.0, 0.7))
        assert got == pytest.approx(0.5 / np.sqrt(1.7), abs=1e-9)

    def test_matches_closed_form_pp(self):
        got = chain_integral("++", (1.0, 1.0, 1.0))
        assert got == pytest.approx(chain_plus_plus(1, 1, 1), abs=1e-6)

    def test_matches_closed_form_pm_unequal(self):
        # frozen from the arctan closed form
        got = chain_integral("+-", (2.0, 1.0, 2.0))
        assert got == pytest.approx(0.05986411761519338, abs=1e-6)

    def test_middle_marginal_equals_merged(self):
        # "0" in the middle merges the adjacent intervals
        got = chain_integral("+0+", (1.0, 1.0, 1.0, 1.0), panels=256, refine=True)
        assert got == pytest.approx(chain_plus_plus(1.0, 2.0, 1.0), abs=2e-6)

    def test_equal_time_unequal_probe(self):
        got = chain_integral("++", (1.0, 2.0, 1.0))
        assert got == pytest.approx(0.1520433619923482, abs=1e-6)

    def test_reflection_symmetry(self):
        # flipping every sign leaves the integral unchanged (grids mirror exactly)
        for signs, flipped in [("+-", "-+"), ("+0-", "-0+"), ("++-", "--+")]:
            a = chain_integral(signs, (1.0, 0.8, 1.2) if len(signs) == 2 else (1.0, 0.8, 1.2, 0.9),
                               panels=128)
            b = chain_integral(flipped, (1.0, 0.8, 1.2) if len(signs) == 2 else (1.0, 0.8, 1.2, 0.9),
                               panels=128)
            assert a == pytest.approx(b, rel=1e-12)

    def test_time_reversal_symmetry(self):
        a = chain_integral("++-", (1.0, 1.0, 1.0, 1.0), panels=192)
        b = chain_integral("-++", (1.0, 1.0, 1.0, 1.0), panels=192)
        assert a == pytest.approx(b, abs=1e-6)

    def test_triple_identity(self):
        # 2 T_+++ = T_+0+ + T_++0 - T_0+- at equal intervals
        e = (1.0, 1.0, 1.0, 1.0)
        t_ppp = chain_integral("+++", e, refine=True)
        t_p0p = chain_integral("+0+", e, panels=256, refine=True)
        t_pp0 = chain_integral("++0", e, panels=256, refine=True)
        t_0pm = chain_integral("0+-", e, panels=256, refine=True)
        assert 2 * t_ppp == pytest.approx(t_p0p + t_pp0 - t_0pm, abs=1e-6)
        assert t_ppp == pytest.approx(1 / (4 * np.sqrt(4.0)), abs=1e-6)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            chain_integral("++++", (1,) * 5)
        with pytest.raises(ValueError):
            chain_integral("+x", (1, 1, 1))
        with pytest.raises(ValueError):
            chain_integral("++", (1, 1))


class TestExactEnvelopes:
    def test_case_table(self):
        eps = 1.0
        assert projected_envelope_exact(eps, 0.5, 0) == 1.0
        assert projected_envelope_exact(eps, 1.5, 1) == 0.5
        # two-projection peak: arctan(1/sqrt(3)) = pi/6 gives exactly 1/3
        assert projected_envelope_exact(eps, 3.0, 2) == pytest.approx(1 / 3, rel=1e-14)
        assert projected_envelope_exact(eps, 2.0, 2) == pytest.approx(0.25, rel=1e-14)
        assert projected_envelope_exact(eps, 4.0, 3) == 0.25

    def test_matches_chain_language(self):
        # two projections at 2 eps <= t < 3 eps equal sqrt(t) T_++(eps, eps, t-2eps)
        eps, t = 1.0, 2.6
        want = np.sqrt(t) * chain_plus_plus(eps, eps, t - 2 * eps)
        assert projected_envelope_exact(eps, t, 2) == pytest.approx(want, rel=1e-13)

    def test_full_amplitude(self):
        got = projected_boundary_exact(1.0, 1.0, 3.0, 2)
        want = free_propagator(1.0, 3.0, 0.0, 0.0) / 3
        assert got == pytest.approx(want, rel=1e-12)

    def test_unsupported_combinations(self):
        with pytest.raises(ValueError):
            projected_envelope_exact(1.0, 2.5, 1)
        with pytest.raises(ValueError):
            projected_envelope_exact(1.0, 3.5, 3)
        with pytest.raises(ValueError):
            projected_envelope_exact(1.0, 1.0, 4)


class TestHalfValueDrop:
    def test_one_projection_exact(self):
        # constant: the single-projection envelope is one half at any gap
        for gap in (0.5, 0.1, 0.01):
            assert final_gap_ratio(1.0, 1, gap) == 0.5

    def test_two_projection_sweep_extrapolates_to_half(self):
        ratios, limit = half_value_ratio(1.0, 2)
        assert np.all(np.diff(ratios) < 0)  # monotone approach from above
        assert limit == pytest.approx(0.5, abs=1e-3)

    def test_three_projection_ratio_approaches_half(self):
        assert final_gap_ratio(1.0, 3, 1.0 / 64) == pytest.approx(0.5, abs=0.04)

    def test_case_table_drops(self):
        # analytic drops across projections: 1 -> 1/2 and 1/3 -> 1/6
        eps = 1.0
        assert projected_envelope_exact(eps, 1.0, 1) / projected_envelope_exact(
            eps, 1.0, 0
        ) == pytest.approx(0.5)
        peak = projected_envelope_exact(eps, 3.0, 2)
        assert peak == pytest.approx(1 / 3, rel=1e-12)
        # trough after the drop at 3 eps is half the peak: 1/6

    def test_validation(self):
        with pytest.raises(ValueError):
            final_gap_ratio(1.0, 4, 0.1)
        with pytest.raises(ValueError):
            final_gap_ratio(1.0, 2, 0.0)


class TestTimeAveraged:
    def test_single_projection_exact_half(self):
        assert time_averaged_envelope(1, 3.0) == 0.5

    def test_two_projections_third(self):
        assert time_averaged_envelope(2, 3.0) == pytest.approx(1 / 3, abs=1e-4)

    def test_full_amplitude_form(self):
        m, tau = 1.0, 3.0
        got = time_averaged_product(m, tau, 2)
        want = free_propagator(m, tau, 0.0, 0.0) / 3
        assert got == pytest.approx(want, abs=1e-4 * abs(want))

    def test_simplex_mean_times(self):
        # ordered uniform times average to k tau/(n+1); the linear term of an
        # expansion about those instants therefore integrates to zero
        tau, panels = 3.0, 2000
        h = tau / panels
        t2 = (np.arange(panels) + 0.5) * h
        mean_t1 = 0.0
        mean_t2 = 0.0
        for t in t2:
            h1 = t / panels
            t1 = (np.arange(panels) + 0.5) * h1
            mean_t1 += t1.sum() * h1          # inner integral of t1
            mean_t2 += t * t                  # t2 times the inner measure t
        mean_t1 *= 2 / tau**2 * h
        mean_t2 *= 2 / tau**2 * h
        assert mean_t1 == pytest.approx(tau / 3, rel=1e-4)
        assert mean_t2 == pytest.approx(2 * tau / 3, rel=1e-4)

    def test_unsupported_order(self):
        with pytest.raises(ValueError):
            time_averaged_envelope(3, 1.0)

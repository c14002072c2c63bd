"""Discretized Rayleigh quotient, its minimizer, and closed-form constants."""

import math

import numpy as np
import pytest

from radial4 import (
    ConstantSource,
    DomainError,
    Grid1D,
    ProblemParams,
    RegimeError,
    ValidationError,
    best_constant_numerical,
    build_cosh_solution,
    eval_v,
    minimize_rayleigh,
    phi_closed_form,
    rayleigh_quotient,
)

B0 = ProblemParams(n=6, alpha=0.0, p=5.0)
SHIFTED = ProblemParams(n=6, alpha=0.0, p=5.0, lam=80.0 / 9.0)
CONJUGATE = ProblemParams(n=6, alpha=-4.0, p=5.0, beta=12.0)
# (K2, K0) = (10, 16) sits on the solvability relation at p = 3
CUBIC = ProblemParams(n=6, alpha=0.0, p=3.0, mu=7.0)

PHI_B0 = 24.0 * (16.0 / 15.0) ** (2.0 / 3.0)


class TestGrid:
    def test_node_count_and_span(self):
        grid = Grid1D(L=10.0, h=0.5, values=np.zeros(41))
        assert grid.n_nodes == 41
        assert grid.ts[0] == -10.0 and grid.ts[-1] == 10.0

    def test_noninteger_ratio_rejected(self):
        with pytest.raises(ValidationError):
            Grid1D(L=10.0, h=0.3, values=np.zeros(67))

    def test_wrong_length_rejected(self):
        with pytest.raises(ValidationError):
            Grid1D(L=10.0, h=0.5, values=np.zeros(40))

    def test_nonfinite_values_rejected(self):
        vals = np.zeros(41)
        vals[3] = np.nan
        with pytest.raises(ValidationError):
            Grid1D(L=10.0, h=0.5, values=vals)

    def test_with_values(self):
        grid = Grid1D(L=10.0, h=0.5, values=np.zeros(41))
        new = grid.with_values(np.ones(41))
        assert new.L == grid.L and new.h == grid.h
        assert np.all(new.values == 1.0)


class TestRayleighQuotient:
    def make_profile_grid(self, params, L=30.0, h=0.01):
        sol = build_cosh_solution(params)
        n = 2 * int(round(L / h)) + 1
        ts = np.linspace(-L, L, n)
        return Grid1D(L=L, h=h, values=np.asarray(eval_v(sol, ts)))

    def test_exact_profile_attains_constant(self):
        grid = self.make_profile_grid(B0)
        q = rayleigh_quotient(grid, 10.0, 9.0, 5.0)
        assert q == pytest.approx(PHI_B0, rel=1e-4)

    def test_scale_invariance(self):
        grid = self.make_profile_grid(B0, L=20.0, h=0.02)
        q0 = rayleigh_quotient(grid, 10.0, 9.0, 5.0)
        rng = np.random.default_rng(37)
        for _ in range(10):
            c = float(rng.uniform(0.1, 50.0))
            q = rayleigh_quotient(grid.with_values(c * grid.values), 10.0, 9.0, 5.0)
            assert q == pytest.approx(q0, rel=1e-12)

    def test_minimizer_is_lower_than_perturbations(self):
        grid = self.make_profile_grid(B0, L=20.0, h=0.02)
        q0 = rayleigh_quotient(grid, 10.0, 9.0, 5.0)
        rng = np.random.default_rng(53)
        bump = np.exp(-grid.ts ** 2)
        for _ in range(10):
            eps = float(rng.uniform(0.01, 0.2))
            q = rayleigh_quotient(grid.with_values(grid.values + eps * bump), 10.0, 9.0, 5.0)
            assert q > q0 - 1e-10

    def test_zero_function_rejected(self):
        grid = Grid1D(L=5.0, h=0.5, values=np.zeros(21))
        with pytest.raises(DomainError):
            rayleigh_quotient(grid, 10.0, 9.0, 5.0)

    def test_needs_five_nodes(self):
        grid = Grid1D(L=1.0, h=0.5, values=np.ones(5))
        rayleigh_quotient(grid, 10.0, 9.0, 5.0)  # five nodes is the minimum
        with pytest.raises(ValidationError):
            rayleigh_quotient(Grid1D(L=0.5, h=0.5, values=np.ones(3)), 10.0, 9.0, 5.0)


class TestMinimize:
    def test_base_instance_converges_to_constant(self):
        value, grid = minimize_rayleigh(B0, L=40.0, h=0.01)
        assert value == pytest.approx(PHI_B0, rel=1e-4)
        assert grid.values[grid.n_nodes // 2] > 0.0

    def test_result_fields(self):
        res = minimize_rayleigh(B0, L=40.0, h=0.01)
        assert res.converged
        assert res.iterations >= 1
        assert res.value == pytest.approx(PHI_B0, rel=1e-4)

    def test_second_order_accuracy(self):
        err1 = abs(minimize_rayleigh(B0, L=40.0, h=0.02).value - PHI_B0)
        err2 = abs(minimize_rayleigh(B0, L=40.0, h=0.01).value - PHI_B0)
        assert err1 / err2 > 3.0

    def test_cubic_exponent_instance(self):
        phi = phi_closed_form(CUBIC).phi
        res = minimize_rayleigh(CUBIC, L=30.0, h=0.01)
        assert res.value == pytest.approx(phi, rel=1e-4)
        assert res.iterations > 1

    def test_profile_is_even_and_positive(self):
        _, grid = minimize_rayleigh(B0, L=30.0, h=0.02)
        v = grid.values
        assert np.all(v >= 0.0)
        assert np.max(np.abs(v - v[::-1])) < 1e-8 * np.max(v)

    def test_requires_coercive_coefficients(self):
        with pytest.raises(RegimeError):
            minimize_rayleigh(ProblemParams(n=6, alpha=0.0, p=5.0, lam=11.0), L=20.0, h=0.05)


class TestClosedFormConstant:
    def test_base_value(self):
        res = phi_closed_form(B0)
        assert res.phi == pytest.approx(PHI_B0, rel=1e-12)
        assert res.S_rad == pytest.approx(math.pi ** 2 * PHI_B0, rel=1e-12)
        assert res.source is ConstantSource.CLOSED_FORM

    def test_shifted_value(self):
        assert phi_closed_form(SHIFTED).phi == pytest.approx(0.6434175091187917, rel=1e-12)

    def test_conjugate_matches_base(self):
        # same reduced coefficients, same 1-D constant
        assert phi_closed_form(CONJUGATE).phi == pytest.approx(phi_closed_form(B0).phi, rel=1e-12)

    def test_cubic_value(self):
        assert phi_closed_form(CUBIC).phi == pytest.approx(34.11298479060644, rel=1e-12)

    def test_to_dict(self):
        d = phi_closed_form(B0).to_dict()
        assert set(d) == {"phi", "S_rad", "source"}
        assert d["source"] == "ClosedForm"


class TestNumericalConstant:
    def test_matches_closed_form(self):
        result, minimized = best_constant_numerical(B0, L=40.0, h=0.01)
        assert result.source is ConstantSource.NUMERICAL
        assert result.phi == pytest.approx(PHI_B0, rel=1e-3)
        assert result.S_rad == pytest.approx(math.pi ** 2 * PHI_B0, rel=1e-3)
        assert minimized.value == result.phi

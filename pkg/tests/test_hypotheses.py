"""Hypothesis quantities against closed-form exponential-integral
oracles.

The second-order workhorse: y'' - y + r0(t) y = 0 with roots (1, -1).
At mu = 1 the shifted spectrum is (-2,), the kernel is the causal
g(t, s) = e^{-2(t-s)} on t >= s, and every quantity below has a closed
form for exponential r0.
"""

from __future__ import annotations

import numpy as np
import pytest

from poincarefp.green import build_kernel
from poincarefp.hypotheses import (
    SigmaEstimate,
    compute_L,
    compute_R,
    compute_phi1,
    estimate_sigma,
    evaluate_hypotheses,
    hypothesis_grid,
)
from poincarefp.multipoly import Poly
from poincarefp.problem import ProblemSpec
from poincarefp.reduction import OmegaTable, _nvars, _r, build_reduced_rhs
from poincarefp.spectral import find_roots, shift_spectrum


@pytest.fixture(scope="module")
def n2_problem():
    return ProblemSpec(
        n=2,
        a=(-1.0, 0.0),
        r_sources=("exp(-3*t)", "0"),
        t0=0.0,
        t_max=64.0,
        grid_points=64,
    )


@pytest.fixture(scope="module")
def n2_kernel(n2_problem):
    spectrum = find_roots(n2_problem.a)
    return build_kernel(shift_spectrum(spectrum, 1))  # mu = 1, gamma = (-2,)


@pytest.fixture(scope="module")
def n2_table(n2_problem):
    return build_reduced_rhs(n2_problem.a, n2_problem.n)


class TestComputeR:
    def test_closed_form_exponential(self, n2_problem, n2_kernel, n2_table):
        # R(t) = |int_0^t e^{-2(t-s)} e^{-3s} ds| = e^{-2t} - e^{-3t}
        for t in (0.5, 1.0, 2.0):
            expected = np.exp(-2 * t) - np.exp(-3 * t)
            got = compute_R(n2_problem, n2_kernel, n2_table, t)
            assert got == pytest.approx(expected, rel=1e-8)

    def test_vanishes_at_t0(self, n2_problem, n2_kernel, n2_table):
        # the causal kernel support collapses at the left endpoint
        assert compute_R(n2_problem, n2_kernel, n2_table, 0.0) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_decays_to_zero(self, n2_problem, n2_kernel, n2_table):
        assert compute_R(n2_problem, n2_kernel, n2_table, 20.0) < 1e-15

    def test_zero_perturbation(self, n2_kernel, n2_table):
        problem = ProblemSpec(
            n=2, a=(-1.0, 0.0), r_sources=("0", "0"), t_max=64.0,
            grid_points=64,
        )
        assert compute_R(problem, n2_kernel, n2_table, 3.0) == 0.0

    def test_quadrature_self_consistency(self, n2_problem, n2_kernel,
                                         n2_table):
        loose = compute_R(n2_problem, n2_kernel, n2_table, 1.5, tol=1e-8)
        tight = compute_R(n2_problem, n2_kernel, n2_table, 1.5, tol=1e-10)
        assert loose == pytest.approx(tight, abs=1e-8)


class TestComputeL:
    def test_constant_mass_closed_form(self, n2_problem, n2_kernel,
                                       n2_table):
        # order-2 mass is the constant 1 (the z^2 coefficient), so
        # L_2(t) = int_0^t e^{-2(t-s)} ds = (1 - e^{-2t}) / 2
        for t in (0.5, 2.0, 10.0):
            expected = (1.0 - np.exp(-2 * t)) / 2.0
            got = compute_L(n2_problem, n2_kernel, n2_table, t, 2)
            assert got == pytest.approx(expected, rel=1e-8)

    def test_linear_mass_vanishes_without_r1(self, n2_problem, n2_kernel,
                                             n2_table):
        assert compute_L(n2_problem, n2_kernel, n2_table, 2.0, 1) == 0.0

    def test_anticausal_side_included(self):
        # mu = -1 gives gamma = (+2): anticausal kernel, so L_2 covers
        # [t, inf) and equals int_t^inf e^{2(t-s)} ds = 1/2 everywhere
        problem = ProblemSpec(
            n=2, a=(-1.0, 0.0), r_sources=("0", "0"), t_max=64.0,
            grid_points=64,
        )
        spectrum = find_roots(problem.a)
        kernel = build_kernel(shift_spectrum(spectrum, 2))
        table = build_reduced_rhs(problem.a, problem.n)
        got = compute_L(problem, kernel, table, 3.0, 2)
        assert got == pytest.approx(0.5, rel=1e-8)


class TestPhi1:
    def test_two_positive_roots(self, ):
        from helpers import make_shifted

        k = build_kernel(make_shifted((2.0, 1.0)))
        assert compute_phi1(k) == pytest.approx(5.0)

    def test_mixed_pair(self):
        from helpers import make_shifted

        k = build_kernel(make_shifted((1.0, -1.0)))
        assert compute_phi1(k) == pytest.approx(2.0)

    def test_single_root(self, n2_kernel):
        assert compute_phi1(n2_kernel) == pytest.approx(1.0)


class TestSigma:
    def test_finite_closed_form_for_decaying_mass(self):
        # custom table whose only |alpha| >= 1 coefficient is r1, with
        # r1(s) = e^{-3s}: sigma_2(t) = int_0^inf e^{-2(t-s)}e^{-3s} ds
        # = e^{-2t}, supremum on the grid at its smallest t
        problem = ProblemSpec(
            n=2, a=(-1.0, 0.0), r_sources=("0", "exp(-3*t)"), t_max=64.0,
            grid_points=64,
        )
        table = OmegaTable(
            n=2,
            a=(-1.0, 0.0),
            table={(1,): _r(2, 1)},
            f_poly=Poly(_nvars(2)),
        )
        grid = (1.0, 2.0, 4.0, 8.0, 16.0)
        est = estimate_sigma(problem, table, 2.0, 1.0, grid)
        assert est.status == "finite"
        assert est.value == pytest.approx(np.exp(-2.0), rel=1e-6)
        assert est.arg_t == pytest.approx(1.0)

    def test_constant_mass_diverges(self, n2_problem, n2_table):
        # the z^2 coefficient contributes constant mass 1, so the
        # weighted integral cannot converge for gamma > 0 ...
        grid = hypothesis_grid(n2_problem)
        est = estimate_sigma(n2_problem, n2_table, 2.0, 1.0, grid)
        assert est.status == "divergent"
        assert est.value == np.inf

    def test_negative_gamma_supremum_diverges(self, n2_problem, n2_table):
        # ... and for gamma < 0 the inner integral grows like e^{|gamma| t}
        grid = hypothesis_grid(n2_problem)
        est = estimate_sigma(n2_problem, n2_table, -2.0, 1.0, grid)
        assert est.status == "divergent"

    def test_monotone_in_mass(self):
        problem_small = ProblemSpec(
            n=2, a=(-1.0, 0.0), r_sources=("0", "exp(-3*t)"), t_max=64.0,
            grid_points=64,
        )
        problem_big = ProblemSpec(
            n=2, a=(-1.0, 0.0), r_sources=("0", "3*exp(-3*t)"), t_max=64.0,
            grid_points=64,
        )
        table = OmegaTable(
            n=2, a=(-1.0, 0.0), table={(1,): _r(2, 1)},
            f_poly=Poly(_nvars(2)),
        )
        grid = (1.0, 2.0, 4.0)
        small = estimate_sigma(problem_small, table, 2.0, 1.0, grid)
        big = estimate_sigma(problem_big, table, 2.0, 1.0, grid)
        assert big.value >= small.value


class TestEvaluateHypotheses:
    def test_trivial_problem(self, trivial_problem):
        report = evaluate_hypotheses(trivial_problem, 1)
        assert report.h1_verdict == "pass"
        assert all(v == 0.0 for v in report.r_samples)
        assert all(v == 0.0 for v in report.l_samples[1])

    def test_repeated_roots_suppress_downstream(self):
        problem = ProblemSpec(
            n=2, a=(1.0, -2.0), r_sources=("0", "0"), t_max=32.0,
            grid_points=32,
        )
        report = evaluate_hypotheses(problem, 1)
        assert report.h1_verdict == "fail"
        assert report.spectrum is None
        assert report.r_samples == ()

    def test_golden_problem_shape(self, e1_problem):
        report = evaluate_hypotheses(e1_problem, 1)
        assert report.h1_verdict == "pass"
        # R decays along the geometric grid
        assert report.r_samples[-1] < 1e-6
        assert report.r_samples[-1] < report.r_samples[0]
        assert report.phi1 == pytest.approx(5.0, rel=1e-9)
        assert len(report.sigma) == 2
        assert isinstance(report.sigma[0], SigmaEstimate)

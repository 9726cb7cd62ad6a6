import math
import warnings

import pytest

from errors import ConfigurationError, NonConvergedLimitError, RegimeWarning
from src.analysis import (
    POSTSELECTED_ROLES, asymptotic_formula, asymptotic_regime_valid, d_vio_full_asymptotic,
    d_vio_full_closed_form, d_vio_full_simulated, d_vio_full_sum, d_vio_reduced, full_analytic_report,
    n_gamma, reference_fisher, repetition_plan, site_flux_zero_bit,
)
from src.circuits import BitProcess, build_full, full_params
from src.optics import propagate


class TestRepetitions:

    @pytest.mark.parametrize("p_success, epsilon, expected", [(1 / 25, 0.05, 74), (0.5, 0.5, 1), (1 / 25, 0.01, 113)])
    def test_n_gamma(self, p_success, epsilon, expected):
        assert n_gamma(p_success, epsilon) == expected

    def test_smallest_count(self):
        plan = repetition_plan(0.3, 0.01)
        assert plan.residual_error <= 0.01
        assert (1 - 0.3) ** (plan.n_gamma - 1) > 0.01

    @pytest.mark.parametrize("p_success, epsilon", [(0.0, 0.05), (1.0, 0.05), (0.2, 0.0), (0.2, 1.0)])
    def test_rejects(self, p_success, epsilon):
        with pytest.raises(ConfigurationError):
            n_gamma(p_success, epsilon)


class TestReduced:

    @pytest.fixture(scope="class")
    def report(self):
        return d_vio_reduced()

    def test_reference(self):
        assert reference_fisher().limit == pytest.approx(4.0, abs=1e-9)

    def test_violation(self, report):
        assert report.n_gamma == 74
        assert report.d_vio_raw == pytest.approx(0.45, abs=1e-9)
        assert report.d_vio == pytest.approx(33.3, abs=1e-9)
        assert report.converged

    def test_contributions(self, report):
        by_site = {s.site: s for s in report.sites}
        assert by_site["theta1"].contribution == pytest.approx(0.4, abs=1e-9)
        assert by_site["theta2"].contribution == pytest.approx(0.05, abs=1e-9)
        assert by_site["theta2"].fisher_zero == pytest.approx(0.0, abs=1e-6)
        assert all(s.flux_gap < 1e-9 for s in report.sites)

    def test_process_probabilities(self, report):
        assert report.success_probability == pytest.approx(0.04, abs=1e-12)
        assert report.bob_detection_probability == pytest.approx(0.5, abs=1e-12)
        assert report.discard_probability == pytest.approx(0.8, abs=1e-12)

    def test_error_target(self):
        report = d_vio_reduced(epsilon=0.01)
        assert report.n_gamma == 113
        assert report.d_vio == pytest.approx(113 * 0.45, abs=1e-9)

    def test_non_converged(self):
        with pytest.raises(NonConvergedLimitError) as info:
            d_vio_reduced(grid=(1.2, 0.6, 0.3))
        assert info.value.sites


class TestFullAnalytic:

    def test_single_term(self):
        assert d_vio_full_sum(2, 2) == pytest.approx(0.25, abs=1e-15)
        assert site_flux_zero_bit(1, 1, 2, 2) == pytest.approx(0.25, abs=1e-15)

    def test_closed_form(self):
        for n_outer in range(2, 65):
            for m_inner in range(2, 65):
                assert d_vio_full_sum(n_outer, m_inner) == pytest.approx(
                    d_vio_full_closed_form(n_outer, m_inner), abs=1e-12
                )

    def test_asymptote_gap_shrinks(self):
        gaps = [
            abs(asymptotic_formula(n, m) - d_vio_full_sum(n, m)) / d_vio_full_sum(n, m)
            for n, m in ((25, 625), (50, 2500), (100, 10_000))
        ]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 0.05

    @pytest.mark.parametrize("n_outer", range(2, 9))
    def test_sum_grows_with_inner_splitters(self, n_outer):
        values = [d_vio_full_sum(n_outer, m_inner) for m_inner in range(2, 65)]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_not_counterfactual(self):
        assert d_vio_full_sum(20, 400) > 1.0

    def test_regime(self):
        assert asymptotic_regime_valid(10, 100)
        assert not asymptotic_regime_valid(9, 1000)
        assert not asymptotic_regime_valid(20, 199)
        with pytest.warns(RegimeWarning):
            value = d_vio_full_asymptotic(5, 20)
        assert value == pytest.approx(math.pi ** 2 / 20 * 10)
        with warnings.catch_warnings():
            warnings.simplefilter("error", RegimeWarning)
            d_vio_full_asymptotic(10, 100)

    def test_report(self):
        report = full_analytic_report(2, 2, "sum")
        assert report.protocol == "full"
        assert report.p_success == pytest.approx(0.25)
        assert report.n_gamma == 11
        assert report.d_vio == pytest.approx(11 * 0.25)
        assert report.regime_valid is False

    def test_unknown_method(self):
        with pytest.raises(ConfigurationError):
            full_analytic_report(2, 2, "simulate")

    @pytest.mark.parametrize("n_outer, m_inner", [(1, 5), (5, 1)])
    def test_sizes(self, n_outer, m_inner):
        with pytest.raises(ConfigurationError):
            d_vio_full_sum(n_outer, m_inner)


class TestFullSimulated:

    @pytest.mark.parametrize("n_outer", range(2, 7))
    @pytest.mark.parametrize("m_inner", range(2, 11))
    def test_flux_matches_sum(self, n_outer, m_inner):
        report = d_vio_full_simulated(n_outer, m_inner, mode="flux", threads=1)
        assert report.d_vio_raw == pytest.approx(d_vio_full_sum(n_outer, m_inner), abs=1e-9)

    def test_site_flux_matches_formula(self):
        report = d_vio_full_simulated(4, 5, mode="flux", threads=1)
        for site in report.sites:
            n, m = (int(k) for k in site.site[1:].split("."))
            assert site.flux_zero == pytest.approx(site_flux_zero_bit(n, m, 4, 5), abs=1e-12)

    def test_fisher_matches_sum(self):
        report = d_vio_full_simulated(3, 4, mode="fisher", threads=2)
        assert report.d_vio_raw == pytest.approx(d_vio_full_sum(3, 4), abs=1e-6)
        assert report.f_ref == pytest.approx(4.0, abs=1e-9)
        assert report.converged
        assert [s.site for s in report.sites] == ["t1.1", "t1.2", "t1.3", "t2.1", "t2.2", "t2.3"]
        assert all(s.flux_gap < 1e-6 for s in report.sites)

    def test_success_and_discard(self):
        report = d_vio_full_simulated(4, 6, mode="flux", threads=1)
        assert report.success_probability == pytest.approx(math.cos(math.pi / 8) ** 8, abs=1e-12)
        assert report.discard_probability == pytest.approx(
            1.0 - report.success_probability - _d1(4, 6), abs=1e-12
        )

    def test_bob_detection_vanishes(self):
        detections = [
            d_vio_full_simulated(n, n * n, bit=BitProcess.ONE, mode="flux").bob_detection_probability
            for n in (5, 10, 20, 40)
        ]
        assert all(a > b for a, b in zip(detections, detections[1:]))
        assert detections[-1] < 0.1

    def test_zero_bit_discard_shrinks_with_components(self):
        sizes = (3, 5, 10, 20)
        discards = [d_vio_full_simulated(n, n * n, mode="flux", threads=1).discard_probability for n in sizes]
        assert all(a > b for a, b in zip(discards, discards[1:]))
        for n, discard in zip(sizes, discards):
            assert discard == pytest.approx(1.0 - math.cos(math.pi / (2 * n)) ** (2 * (n - 1)), abs=1e-9)

    def test_one_bit_discard_shrinks_with_components(self):
        reports = [
            d_vio_full_simulated(n, n * n, bit=BitProcess.ONE, mode="flux", threads=1) for n in (5, 10, 20)
        ]
        discards = [r.discard_probability for r in reports]
        assert all(a > b for a, b in zip(discards, discards[1:]))
        assert all(r.discard_probability >= r.bob_detection_probability for r in reports)

    def test_one_bit_uses_zero_bit_repetitions(self):
        report = d_vio_full_simulated(3, 4, bit=BitProcess.ONE, mode="flux", threads=1)
        assert report.p_success == pytest.approx(math.cos(math.pi / 6) ** 6, abs=1e-12)
        assert all(s.flux_one is not None and s.flux_zero is None for s in report.sites)

    def test_postselected(self):
        report = d_vio_full_simulated(2, 3, mode="fisher", keep=POSTSELECTED_ROLES, threads=1)
        assert report.post_selected
        assert all(s.contribution >= 0.0 for s in report.sites)
        assert math.isfinite(report.d_vio_raw)

    def test_guards(self):
        with pytest.raises(ConfigurationError):
            d_vio_full_simulated(9, 4, mode="fisher")
        with pytest.raises(ConfigurationError):
            d_vio_full_simulated(3, 4, mode="flux", keep=POSTSELECTED_ROLES)
        with pytest.raises(ConfigurationError):
            d_vio_full_simulated(3, 4, mode="exact")


def _d1(n_outer, m_inner):
    circuit = build_full(full_params(n_outer, m_inner))
    return propagate(circuit, circuit.zero_thetas()).probability("D1")

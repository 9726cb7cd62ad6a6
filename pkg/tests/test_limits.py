import math

import pytest

from config import parse_grid, validate_grid
from errors import ConfigurationError
from src.analysis import (
    POSTSELECTED_ROLES, fisher_limit, fisher_report, reduced_limits, richardson_extrapolate, site_family,
)
from src.circuits import REFERENCE_SITE

GRID = (1e-2, 5e-3, 2.5e-3)


def _series(h):
    return 1.5 + 3.0 * h ** 2 - 7.0 * h ** 4


class TestRichardson:

    def test_removes_even_error_terms(self):
        samples = [_series(h) for h in (0.1, 0.05, 0.025)]
        estimate, residual = richardson_extrapolate(samples, ratio=2.0, order=2)
        assert estimate == pytest.approx(1.5, abs=1e-12)
        # the two-point column still carries the h⁴ term
        assert residual == pytest.approx(7.0 * 0.05 ** 4 / 4.0, rel=1e-6)

    def test_two_samples(self):
        samples = [1.0 + 4.0 * h ** 2 for h in (0.2, 0.1)]
        estimate, _ = richardson_extrapolate(samples, ratio=2.0)
        assert estimate == pytest.approx(1.0, abs=1e-12)

    def test_needs_two_samples(self):
        with pytest.raises(ConfigurationError):
            richardson_extrapolate([1.0], ratio=2.0)


class TestGrid:

    def test_parse(self):
        assert parse_grid("1e-2,5e-3,2.5e-3") == GRID

    @pytest.mark.parametrize("grid", [(1e-2,), (1e-2, 2e-2), (1e-2, 5e-3, 1e-3), (1e-2, -5e-3)])
    def test_rejects(self, grid):
        with pytest.raises(ConfigurationError):
            validate_grid(grid)

    def test_rejects_garbage(self):
        with pytest.raises(ConfigurationError):
            parse_grid("1e-2,abc")


class TestFisherLimit:

    def test_reference(self, reference_circuit):
        result = fisher_limit(reference_circuit, REFERENCE_SITE)
        assert result.limit == pytest.approx(4.0, abs=1e-9)
        assert result.converged
        assert result.grid == GRID
        assert result.theta_eval == GRID[-1]

    def test_reduced_constants(self, zero_circuit, one_circuit):
        zero = reduced_limits(zero_circuit)
        one = reduced_limits(one_circuit)
        assert zero["theta1"].limit == pytest.approx(1.6, abs=1e-6)
        assert zero["theta2"].limit == pytest.approx(0.0, abs=1e-6)
        assert one["theta1"].limit == pytest.approx(1.6, abs=1e-6)
        assert one["theta2"].limit == pytest.approx(0.4, abs=1e-6)
        assert all(s.converged for s in (*zero.values(), *one.values()))

    @pytest.mark.parametrize("theta1", [0.05, 0.1, 0.2, 0.3])
    def test_second_site_follows_first_angle(self, zero_circuit, theta1):
        family = site_family(zero_circuit, "theta2", fixed={"theta1": theta1})
        result = fisher_limit(zero_circuit, "theta2", family)
        assert result.limit == pytest.approx(0.8 * (1.0 - math.cos(theta1)), abs=1e-9)

    def test_postselected_one_bit_vanishes(self, one_circuit):
        for result in reduced_limits(one_circuit, keep=POSTSELECTED_ROLES).values():
            assert result.post_selected
            assert max(result.samples) <= 1e-12
            assert result.limit <= 1e-12

    def test_postselected_zero_bit_decays(self, zero_circuit):
        result = reduced_limits(zero_circuit, keep=POSTSELECTED_ROLES)["theta2"]
        samples = result.samples
        assert samples[0] > samples[1] > samples[2]
        assert samples[-1] < 1e-4

    def test_non_converged_is_flagged(self, zero_circuit):
        result = fisher_limit(zero_circuit, "theta1", grid=(0.4, 0.2, 0.1), tolerance=0.0)
        assert not result.converged
        assert result.residual >= 0.0

    def test_unknown_site(self, zero_circuit):
        with pytest.raises(ConfigurationError):
            site_family(zero_circuit, "theta9")

    def test_report(self, zero_circuit):
        report = fisher_report(zero_circuit, grid=GRID)
        assert [s.site for s in report.sites] == ["theta1", "theta2"]
        assert report.limit("theta1") == pytest.approx(1.6, abs=1e-6)
        assert report.converged
        with pytest.raises(KeyError):
            report.limit("theta9")

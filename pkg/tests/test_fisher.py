import math
from types import MappingProxyType

import numpy as np
import pytest

from errors import NumericalInconsistencyError, UndefinedConditioningError
from src.analysis import POSTSELECTED_ROLES, discard_probability, fisher, fisher_postselected, negligible_bins
from src.optics import BinRole, OutcomeDistribution, propagate
from tests.conftest import random_circuit, random_thetas


def _distribution(p, dp, roles):
    return OutcomeDistribution(
        bin_ids=tuple(f"b{k}" for k in range(len(roles))),
        roles=tuple(roles),
        p=np.asarray(p, dtype=float),
        dp=np.asarray(dp, dtype=float),
        active_param="t",
        theta_values=MappingProxyType({"t": 0.1}),
        site_flux=MappingProxyType({}),
    )


@pytest.mark.parametrize("theta", [0.05, 0.3, 0.7, 1.2])
def test_reference_fisher(reference_circuit, theta):
    dist = propagate(reference_circuit, {"theta": theta}, active_param="theta")
    assert fisher(dist) == pytest.approx(4.0, abs=1e-9)


@pytest.mark.parametrize("seed", range(100))
def test_fisher_non_negative(seed):
    circuit = random_circuit(seed)
    thetas = random_thetas(circuit, seed, low=0.05)
    for param in circuit.params:
        value = fisher(propagate(circuit, thetas, active_param=param))
        assert value >= 0.0
        assert math.isfinite(value)


class TestScreening:

    def test_floor_skips_empty_bins(self):
        dist = _distribution([[0.6, 0.4], [5e-15, 0.0]], [[0.1, -0.1], [0.0, 0.0]], [BinRole.D0, BinRole.LOSS])
        assert fisher(dist) == pytest.approx(0.01 / 0.6 + 0.01 / 0.4)

    def test_slope_on_empty_bin_is_inconsistent(self):
        dist = _distribution([[0.6, 0.4], [5e-15, 0.0]], [[0.1, -0.1], [1e-9, 0.0]], [BinRole.D0, BinRole.LOSS])
        with pytest.raises(NumericalInconsistencyError):
            fisher(dist)

    def test_excluded_bins_are_skipped(self):
        dist = _distribution([[0.6, 0.4], [5e-15, 0.0]], [[0.1, -0.1], [1e-9, 0.0]], [BinRole.D0, BinRole.LOSS])
        exclude = np.array([[False, False], [True, True]])
        assert fisher(dist, exclude=exclude) == pytest.approx(0.01 / 0.6 + 0.01 / 0.4)

    def test_negligible_bins(self):
        dist = _distribution([[0.6, 0.4], [5e-15, 0.0]], [[0.1, -0.1], [1e-9, 0.0]], [BinRole.D0, BinRole.LOSS])
        mask = negligible_bins(dist, keep=POSTSELECTED_ROLES)
        assert mask.tolist() == [[False, False], [True, True]]
        with pytest.raises(NumericalInconsistencyError):
            negligible_bins(dist)


class TestPostselected:

    def test_renormalised_statistics(self):
        dist = _distribution(
            [[0.2, 0.0], [0.3, 0.0], [0.5, 0.0]],
            [[0.1, 0.0], [-0.05, 0.0], [-0.05, 0.0]],
            [BinRole.D0, BinRole.D1, BinRole.LOSS],
        )
        assert fisher_postselected(dist) == pytest.approx(0.16 ** 2 / 0.4 + 0.16 ** 2 / 0.6)

    def test_zero_keep_probability(self, reference_circuit):
        dist = propagate(reference_circuit, {"theta": 0.2}, active_param="theta")
        with pytest.raises(UndefinedConditioningError):
            fisher_postselected(dist)

    @pytest.mark.parametrize("site", ["theta1", "theta2"])
    def test_one_bit_carries_nothing(self, one_circuit, site):
        dist = propagate(one_circuit, {"theta1": 0.1, "theta2": 0.1}, active_param=site)
        assert fisher(dist) > 0.0
        assert fisher_postselected(dist) <= 1e-12

    def test_discard_probability(self, zero_circuit, one_circuit):
        assert discard_probability(propagate(zero_circuit, zero_circuit.zero_thetas())) == pytest.approx(0.8)
        assert discard_probability(propagate(one_circuit, one_circuit.zero_thetas())) == pytest.approx(0.75)

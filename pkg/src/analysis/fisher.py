# src/analysis/fisher.py

import logging
from typing import Iterable, Optional

import numpy as np

from constants import FISHER_BIN_FLOOR, FISHER_SLOPE_FLOOR
from errors import NumericalInconsistencyError, UndefinedConditioningError
from src.optics import BinRole, OutcomeDistribution

logger = logging.getLogger(__name__)

POSTSELECTED_ROLES = frozenset({BinRole.D0, BinRole.D1})


def _raise_inconsistent(inconsistent: np.ndarray, dp_raw: np.ndarray, bin_floor: float) -> None:
    worst = float(np.max(np.abs(dp_raw[inconsistent])))
    raise NumericalInconsistencyError(
        f"{int(inconsistent.sum())} bin(s) below p={bin_floor:g} carry |dp| up to {worst:.3e}; "
        "move the evaluation point away from θ=0"
    )


def _screened_sum(q, dq, p_raw, dp_raw, bin_floor, slope_floor, exclude=None) -> float:
    """Σ dq²/q over bins whose raw probability clears the floor; ``exclude`` bins are skipped outright."""
    considered = np.ones(p_raw.shape, dtype=bool) if exclude is None else ~exclude
    negligible = p_raw < bin_floor
    inconsistent = considered & negligible & (np.abs(dp_raw) > slope_floor)
    if np.any(inconsistent):
        _raise_inconsistent(inconsistent, dp_raw, bin_floor)
    kept = considered & ~negligible
    return float(np.sum(dq[kept] ** 2 / q[kept]))


def negligible_bins(
    dist: OutcomeDistribution,
    keep: Optional[Iterable[BinRole]] = None,
    bin_floor: float = FISHER_BIN_FLOOR,
    slope_floor: float = FISHER_SLOPE_FLOOR,
) -> np.ndarray:
    """
    Mask over ``dist.p`` of the bins below the floor. A bin below the floor whose
    slope exceeds ``slope_floor`` is an error: its contribution would not vanish.
    Only bins with a role in ``keep`` are checked when it is given.
    """
    rows = np.ones(len(dist.bin_ids), dtype=bool) if keep is None else dist.role_mask(keep)
    below = dist.p < bin_floor
    inconsistent = below & (np.abs(dist.dp) > slope_floor) & rows[:, None]
    if np.any(inconsistent):
        _raise_inconsistent(inconsistent, dist.dp, bin_floor)
    return below


def fisher(
    dist: OutcomeDistribution,
    bin_floor: float = FISHER_BIN_FLOOR,
    slope_floor: float = FISHER_SLOPE_FLOOR,
    exclude: Optional[np.ndarray] = None,
) -> float:
    """Classical Fisher information of the polarization-resolved bins about dist.active_param."""
    return _screened_sum(dist.p, dist.dp, dist.p, dist.dp, bin_floor, slope_floor, exclude)


def fisher_postselected(
    dist: OutcomeDistribution,
    keep: Iterable[BinRole] = POSTSELECTED_ROLES,
    bin_floor: float = FISHER_BIN_FLOOR,
    slope_floor: float = FISHER_SLOPE_FLOOR,
    exclude: Optional[np.ndarray] = None,
) -> float:
    """
    Fisher information of the statistics that survive post-selection on ``keep``:
    q = p / P_keep, dq = (dp·P_keep − p·dP_keep) / P_keep². Bins are screened on
    their raw p and dp before renormalisation.
    """
    keep = frozenset(keep)
    mask = dist.role_mask(keep)
    p, dp = dist.p[mask], dist.dp[mask]
    p_keep = float(p.sum())
    if p_keep < bin_floor:
        raise UndefinedConditioningError(
            f"post-selection on {sorted(r.value for r in keep)} has probability {p_keep:.3e}"
        )
    dp_keep = float(dp.sum())
    q = p / p_keep
    dq = (dp * p_keep - p * dp_keep) / p_keep ** 2
    return _screened_sum(q, dq, p, dp, bin_floor, slope_floor, None if exclude is None else exclude[mask])


def discard_probability(dist: OutcomeDistribution, keep: Iterable[BinRole] = POSTSELECTED_ROLES) -> float:
    """Share of runs a receiver who post-selects on ``keep`` throws away."""
    return 1.0 - dist.role_probability(*keep)

# src/analysis/limits.py

import logging
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from config import validate_grid
from constants import DEFAULT_THETA_GRID, EXTRAPOLATION_ORDER, EXTRAPOLATION_TOLERANCE
from errors import ConfigurationError
from src.analysis.fisher import fisher, fisher_postselected, negligible_bins
from src.optics import BinRole, Circuit, OutcomeDistribution, propagate

logger = logging.getLogger(__name__)

# h ↦ θ assignment for every tagging of the circuit
ThetaFamily = Callable[[float], Mapping[str, float]]


def site_family(circuit: Circuit, site: str, tied: Iterable[str] = (), fixed: Optional[Mapping[str, float]] = None) -> ThetaFamily:
    """θ_site = h; ``tied`` sites follow h too, ``fixed`` sites are pinned, the rest sit at 0."""
    tied = tuple(tied)
    fixed = dict(fixed or {})
    for param in (site, *tied, *fixed):
        if param not in circuit.params:
            raise ConfigurationError(f"{circuit.name}: unknown tagging site {param!r}")

    def family(h: float) -> Dict[str, float]:
        values = circuit.zero_thetas()
        values.update(fixed)
        for param in (site, *tied):
            values[param] = h
        return values

    return family


def richardson_extrapolate(values: Sequence[float], ratio: float, order: int = EXTRAPOLATION_ORDER) -> Tuple[float, float]:
    """
    Richardson tableau for samples taken at h, h/r, h/r², ... of a function whose
    error series runs in h^order, h^(2·order), ... Returns (estimate, residual),
    where the residual compares the two most refined estimates.
    """
    if len(values) < 2:
        raise ConfigurationError("Richardson extrapolation needs at least two samples")
    column = [float(v) for v in values]
    previous_last = column[-1]
    for j in range(1, len(values)):
        factor = ratio ** (order * j)
        previous_last = column[-1]
        column = [(factor * column[k] - column[k - 1]) / (factor - 1.0) for k in range(1, len(column))]
    estimate = column[-1]
    return estimate, abs(estimate - previous_last)


class SiteFisher(BaseModel):
    """Fisher information about one tagging site, sampled on a grid and extrapolated to θ→0."""
    model_config = ConfigDict(frozen=True)

    site: str
    grid: Tuple[float, ...]
    samples: Tuple[float, ...] = Field(description="F at each grid point")
    theta_eval: float = Field(description="finest grid point")
    fisher_at_eval: float
    limit: float
    residual: float
    converged: bool
    post_selected: bool = False
    keep: Tuple[BinRole, ...] = ()


class FisherReport(BaseModel):
    """Per-site Fisher information of one circuit."""
    model_config = ConfigDict(frozen=True)

    circuit: str
    post_selected: bool
    keep: Tuple[BinRole, ...]
    sites: List[SiteFisher]

    @property
    def converged(self) -> bool:
        return all(s.converged for s in self.sites)

    def limit(self, site: str) -> float:
        for s in self.sites:
            if s.site == site:
                return s.limit
        raise KeyError(site)


def _sorted_roles(keep: Optional[Iterable[BinRole]]) -> Tuple[BinRole, ...]:
    return tuple(sorted(set(keep), key=lambda r: r.value)) if keep is not None else ()


def sample_fisher(
    dist: OutcomeDistribution,
    keep: Optional[Iterable[BinRole]] = None,
    exclude: Optional[np.ndarray] = None,
) -> float:
    """F of one distribution, optionally post-selected on ``keep``."""
    if keep is None:
        return fisher(dist, exclude=exclude)
    return fisher_postselected(dist, keep, exclude=exclude)


def fisher_limit(
    circuit: Circuit,
    site: str,
    family: Optional[ThetaFamily] = None,
    grid: Optional[Sequence[float]] = None,
    keep: Optional[Iterable[BinRole]] = None,
    tolerance: float = EXTRAPOLATION_TOLERANCE,
) -> SiteFisher:
    """
    θ→0 limit of F(θ_site) by Richardson extrapolation in θ² over a geometric grid.

    Bins below the Fisher floor at the finest grid point are left out at every grid
    point, so the dropped terms stay a smooth function of θ that the tableau removes.
    """
    grid = validate_grid(tuple(grid or DEFAULT_THETA_GRID))
    family = family or site_family(circuit, site)
    keep = frozenset(keep) if keep is not None else None

    dists = [propagate(circuit, family(h), active_param=site) for h in grid]
    exclude = negligible_bins(dists[-1], keep)
    samples = tuple(sample_fisher(dist, keep, exclude) for dist in dists)
    limit, residual = richardson_extrapolate(samples, grid[0] / grid[1])
    converged = residual < tolerance
    if not converged:
        logger.warning("%s/%s: extrapolation residual %.3e above %.1e", circuit.name, site, residual, tolerance)
    logger.debug("%s/%s: samples=%s limit=%.17g", circuit.name, site, samples, limit)
    return SiteFisher(
        site=site,
        grid=grid,
        samples=samples,
        theta_eval=grid[-1],
        fisher_at_eval=samples[-1],
        limit=max(limit, 0.0),
        residual=residual,
        converged=converged,
        post_selected=keep is not None,
        keep=_sorted_roles(keep),
    )


def fisher_report(
    circuit: Circuit,
    families: Optional[Mapping[str, ThetaFamily]] = None,
    grid: Optional[Sequence[float]] = None,
    keep: Optional[Iterable[BinRole]] = None,
) -> FisherReport:
    """fisher_limit over every tagging site of ``circuit``."""
    families = families or {}
    keep = frozenset(keep) if keep is not None else None
    sites = [fisher_limit(circuit, site, families.get(site), grid, keep) for site in circuit.params]
    return FisherReport(circuit=circuit.name, post_selected=keep is not None, keep=_sorted_roles(keep), sites=sites)

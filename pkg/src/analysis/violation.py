# src/analysis/violation.py

import logging
import math
import warnings
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from constants import (
    ASYMPTOTIC_MIN_M_OVER_N, ASYMPTOTIC_MIN_N, DEFAULT_ERROR_TARGET, FISHER_SIMULATION_MAX_M,
    FISHER_SIMULATION_MAX_N, FLUX_TOLERANCE, MIN_INNER_SPLITTERS, MIN_OUTER_SPLITTERS, PUBLISHED_F_REF,
)
from errors import ConfigurationError, NonConvergedLimitError, RegimeWarning
from src.analysis.fisher import POSTSELECTED_ROLES, discard_probability
from src.analysis.limits import SiteFisher, fisher_limit, site_family
from src.circuits import (
    REDUCED_SITES, REFERENCE_SITE, BitProcess, ReducedParams, build_full, build_reduced,
    build_reference, full_params,
)
from src.optics import BinRole, Circuit, OutcomeDistribution, propagate
from utils.parallel import map_ordered

logger = logging.getLogger(__name__)


# ===== Repetitions =====

class RepetitionPlan(BaseModel):
    """How often one bit process is repeated so that a 0-bit is missed with probability ≤ ε."""
    model_config = ConfigDict(frozen=True)

    p_success: float = Field(gt=0.0, lt=1.0)
    epsilon: float = Field(gt=0.0, lt=1.0)
    n_gamma: int = Field(ge=1)

    @property
    def residual_error(self) -> float:
        return (1.0 - self.p_success) ** self.n_gamma


def n_gamma(p_success: float, epsilon: float) -> int:
    """Smallest n with (1 - p_success)^n ≤ ε."""
    if not 0.0 < p_success < 1.0:
        raise ConfigurationError(f"success probability must lie in (0, 1), got {p_success}")
    if not 0.0 < epsilon < 1.0:
        raise ConfigurationError(f"error target must lie in (0, 1), got {epsilon}")
    miss = 1.0 - p_success
    n = max(1, math.ceil(math.log(epsilon) / math.log(miss)))
    # log rounding can land one off either way
    while miss ** n > epsilon:
        n += 1
    while n > 1 and miss ** (n - 1) <= epsilon:
        n -= 1
    return n


def repetition_plan(p_success: float, epsilon: float = DEFAULT_ERROR_TARGET) -> RepetitionPlan:
    return RepetitionPlan(p_success=p_success, epsilon=epsilon, n_gamma=n_gamma(p_success, epsilon))


# ===== Reports =====

class SiteContribution(BaseModel):
    """One tagging site's share of the violation, with its crossing-flux cross-check."""
    model_config = ConfigDict(frozen=True)

    site: str
    fisher_zero: Optional[float] = Field(default=None, description="θ→0 Fisher limit, 0-bit process")
    fisher_one: Optional[float] = Field(default=None, description="θ→0 Fisher limit, 1-bit process")
    flux_zero: Optional[float] = Field(default=None, description="probability crossing the site at θ=0, 0-bit")
    flux_one: Optional[float] = Field(default=None, description="probability crossing the site at θ=0, 1-bit")
    contribution: float
    flux_gap: Optional[float] = Field(default=None, description="max |F/F_ref - flux| over the reported processes")
    residual: float = 0.0
    converged: bool = True


class ViolationReport(BaseModel):
    """Counterfactual violation of one protocol instance."""
    model_config = ConfigDict(frozen=True)

    protocol: Literal["reduced", "full"]
    method: Literal["fisher", "flux", "sum", "closed_form", "asymptotic"]
    bit: Optional[BitProcess] = None
    n_outer: Optional[int] = None
    m_inner: Optional[int] = None
    f_ref: float
    epsilon: float
    p_success: float = Field(description="0-bit success probability that fixes n_gamma")
    n_gamma: int
    sites: List[SiteContribution] = Field(default_factory=list)
    d_vio_raw: float = Field(description="sum of the per-site contributions")
    d_vio: float = Field(description="n_gamma times d_vio_raw")
    post_selected: bool = False
    keep: Tuple[BinRole, ...] = ()
    success_probability: Optional[float] = None
    bob_detection_probability: Optional[float] = None
    discard_probability: Optional[float] = None
    regime_valid: Optional[bool] = None

    @property
    def converged(self) -> bool:
        return all(s.converged for s in self.sites)


def _require_converged(limits: Sequence[SiteFisher]) -> None:
    stale = [s.site for s in limits if not s.converged]
    if stale:
        raise NonConvergedLimitError(stale)


def reference_fisher(grid: Optional[Sequence[float]] = None) -> SiteFisher:
    """F_ref as the θ→0 limit of the free-propagation circuit."""
    limit = fisher_limit(build_reference(), REFERENCE_SITE, grid=grid)
    _require_converged([limit])
    return limit


# ===== Reduced protocol =====

def reduced_limits(
    circuit: Circuit,
    grid: Optional[Sequence[float]] = None,
    keep: Optional[Sequence[BinRole]] = None,
) -> Dict[str, SiteFisher]:
    """θ→0 Fisher limits of both reduced-protocol sites."""
    theta1, theta2 = REDUCED_SITES
    return {
        theta1: fisher_limit(circuit, theta1, site_family(circuit, theta1), grid, keep),
        # F(θ2) depends on θ1, so θ1 approaches 0 together with θ2
        theta2: fisher_limit(circuit, theta2, site_family(circuit, theta2, tied=(theta1,)), grid, keep),
    }


def _flux_gap(limit: float, f_ref: float, flux: float, site: str, circuit: str) -> float:
    gap = abs(limit / f_ref - flux)
    if gap > FLUX_TOLERANCE:
        logger.warning("%s/%s: F/F_ref=%.12g departs from crossing flux %.12g", circuit, site, limit / f_ref, flux)
    return gap


def d_vio_reduced(epsilon: float = DEFAULT_ERROR_TARGET, grid: Optional[Sequence[float]] = None) -> ViolationReport:
    """
    Violation strength of the doubly nested interferometer: both tagging sites, both
    bit processes, n_gamma from the 0-bit success probability P(D0) at θ=0.
    """
    f_ref = reference_fisher(grid).limit
    zero = build_reduced(ReducedParams(bit=BitProcess.ZERO))
    one = build_reduced(ReducedParams(bit=BitProcess.ONE))

    limits_zero = reduced_limits(zero, grid)
    limits_one = reduced_limits(one, grid)
    _require_converged([*limits_zero.values(), *limits_one.values()])

    dist_zero = propagate(zero, zero.zero_thetas())
    dist_one = propagate(one, one.zero_thetas())

    sites = []
    for site in REDUCED_SITES:
        f0, f1 = limits_zero[site], limits_one[site]
        flux0, flux1 = dist_zero.site_flux[site], dist_one.site_flux[site]
        sites.append(SiteContribution(
            site=site,
            fisher_zero=f0.limit,
            fisher_one=f1.limit,
            flux_zero=flux0,
            flux_one=flux1,
            contribution=(f0.limit + f1.limit) / (2.0 * f_ref),
            flux_gap=max(_flux_gap(f0.limit, f_ref, flux0, site, zero.name),
                         _flux_gap(f1.limit, f_ref, flux1, site, one.name)),
            residual=max(f0.residual, f1.residual),
            converged=f0.converged and f1.converged,
        ))

    plan = repetition_plan(dist_zero.probability("D0"), epsilon)
    raw = math.fsum(s.contribution for s in sites)
    logger.info("reduced protocol: n_gamma=%d, contributions=%.17g", plan.n_gamma, raw)
    return ViolationReport(
        protocol="reduced",
        method="fisher",
        f_ref=f_ref,
        epsilon=epsilon,
        p_success=plan.p_success,
        n_gamma=plan.n_gamma,
        sites=sites,
        d_vio_raw=raw,
        d_vio=plan.n_gamma * raw,
        success_probability=plan.p_success,
        bob_detection_probability=dist_one.role_probability(BinRole.BOB),
        discard_probability=discard_probability(dist_zero),
    )


# ===== Full protocol, analytic =====

def _check_sizes(n_outer: int, m_inner: int) -> None:
    if n_outer < MIN_OUTER_SPLITTERS or m_inner < MIN_INNER_SPLITTERS:
        raise ConfigurationError(f"need N ≥ {MIN_OUTER_SPLITTERS} and M ≥ {MIN_INNER_SPLITTERS}, got N={n_outer}, M={m_inner}")


def site_flux_zero_bit(n: int, m: int, n_outer: int, m_inner: int) -> float:
    """Probability crossing tagging (n, m) of the 0-bit process at θ=0."""
    outer = math.pi / (2 * n_outer)
    return math.sin(m * math.pi / (2 * m_inner)) ** 2 * math.cos(outer) ** (2 * (n - 1)) * math.sin(outer) ** 2


def d_vio_full_sum(n_outer: int, m_inner: int) -> float:
    """Double sum over every tagging site of the 0-bit process."""
    _check_sizes(n_outer, m_inner)
    outer = math.pi / (2 * n_outer)
    n = np.arange(1, n_outer)
    m = np.arange(1, m_inner)
    outer_terms = np.cos(outer) ** (2 * (n - 1)) * math.sin(outer) ** 2
    inner_terms = np.sin(m * math.pi / (2 * m_inner)) ** 2
    return math.fsum(outer_terms) * math.fsum(inner_terms)


def d_vio_full_closed_form(n_outer: int, m_inner: int) -> float:
    """(1 - cos^{2(N-1)}(π/2N)) · (M-1)/2: the geometric outer sum times the inner sine-square sum."""
    _check_sizes(n_outer, m_inner)
    return (1.0 - math.cos(math.pi / (2 * n_outer)) ** (2 * (n_outer - 1))) * (m_inner - 1) / 2.0


def asymptotic_regime_valid(n_outer: int, m_inner: int) -> bool:
    return n_outer >= ASYMPTOTIC_MIN_N and m_inner >= ASYMPTOTIC_MIN_M_OVER_N * n_outer


def asymptotic_formula(n_outer: int, m_inner: int) -> float:
    """(π²/4N) · (M/2), evaluated without a regime check."""
    _check_sizes(n_outer, m_inner)
    return math.pi ** 2 / (4 * n_outer) * (m_inner / 2)


def d_vio_full_asymptotic(n_outer: int, m_inner: int) -> float:
    """Leading-order violation for M >> N >> 1; warns outside that regime but still answers."""
    value = asymptotic_formula(n_outer, m_inner)
    if not asymptotic_regime_valid(n_outer, m_inner):
        warnings.warn(
            f"asymptotic violation used at N={n_outer}, M={m_inner}; needs N ≥ {ASYMPTOTIC_MIN_N} "
            f"and M ≥ {ASYMPTOTIC_MIN_M_OVER_N}·N",
            RegimeWarning,
            stacklevel=2,
        )
    return value


# ===== Full protocol, simulated =====

def success_port(bit: BitProcess) -> str:
    return "D0" if bit is BitProcess.ZERO else "D1"


def success_probability(n_outer: int, m_inner: int, bit: BitProcess = BitProcess.ZERO) -> float:
    """Probability that the photon leaves through the port that announces ``bit``, at θ=0."""
    circuit = build_full(full_params(n_outer, m_inner, bit))
    return propagate(circuit, circuit.zero_thetas()).probability(success_port(bit))


def zero_bit_success_probability(n_outer: int) -> float:
    """P(D0) of the 0-bit process at θ=0: every inner chain dumps its arm, so D0 only sees outer reflections."""
    if n_outer < MIN_OUTER_SPLITTERS:
        raise ConfigurationError(f"need N ≥ {MIN_OUTER_SPLITTERS}, got N={n_outer}")
    return math.cos(math.pi / (2 * n_outer)) ** (2 * n_outer)


def full_analytic_report(
    n_outer: int,
    m_inner: int,
    method: Literal["sum", "closed_form", "asymptotic"] = "sum",
    epsilon: float = DEFAULT_ERROR_TARGET,
) -> ViolationReport:
    """0-bit violation of the full protocol from one of the analytic evaluators."""
    evaluators = {
        "sum": d_vio_full_sum,
        "closed_form": d_vio_full_closed_form,
        "asymptotic": d_vio_full_asymptotic,
    }
    try:
        evaluate = evaluators[method]
    except KeyError:
        raise ConfigurationError(f"unknown analytic method {method!r}") from None
    raw = evaluate(n_outer, m_inner)
    plan = repetition_plan(zero_bit_success_probability(n_outer), epsilon)
    return ViolationReport(
        protocol="full",
        method=method,
        bit=BitProcess.ZERO,
        n_outer=n_outer,
        m_inner=m_inner,
        f_ref=PUBLISHED_F_REF,
        epsilon=epsilon,
        p_success=plan.p_success,
        n_gamma=plan.n_gamma,
        d_vio_raw=raw,
        d_vio=plan.n_gamma * raw,
        success_probability=plan.p_success,
        regime_valid=asymptotic_regime_valid(n_outer, m_inner),
    )


def d_vio_full_simulated(
    n_outer: int,
    m_inner: int,
    bit: BitProcess = BitProcess.ZERO,
    mode: Literal["fisher", "flux"] = "fisher",
    epsilon: float = DEFAULT_ERROR_TARGET,
    keep: Optional[Sequence[BinRole]] = None,
    grid: Optional[Sequence[float]] = None,
    threads: Optional[int] = None,
    progress: bool = False,
) -> ViolationReport:
    """
    Simulated violation of the full protocol. In ``fisher`` mode every tagging site
    gets its own θ→0 Fisher limit (small instances only); ``flux`` mode reads the
    crossing flux at θ=0, which equals F/F_ref site by site. The 1-bit process also
    reports the probability of a detection in Bob's laboratory.
    """
    params = full_params(n_outer, m_inner, bit)
    if mode not in ("fisher", "flux"):
        raise ConfigurationError(f"unknown simulation mode {mode!r}")
    if mode == "fisher" and (n_outer > FISHER_SIMULATION_MAX_N or m_inner > FISHER_SIMULATION_MAX_M):
        raise ConfigurationError(
            f"per-site Fisher simulation is limited to N ≤ {FISHER_SIMULATION_MAX_N}, "
            f"M ≤ {FISHER_SIMULATION_MAX_M}; use the flux mode"
        )
    if keep is not None and mode != "fisher":
        raise ConfigurationError("post-selected violation needs the fisher mode")
    keep = frozenset(keep) if keep is not None else None

    circuit = build_full(params)
    dist = propagate(circuit, circuit.zero_thetas())
    if bit is BitProcess.ZERO:
        p_success = dist.probability("D0")
    else:
        p_success = zero_bit_success_probability(n_outer)
    plan = repetition_plan(p_success, epsilon)

    if mode == "fisher":
        f_ref = reference_fisher(grid).limit
        limits = map_ordered(
            lambda site: fisher_limit(circuit, site, grid=grid, keep=keep),
            list(circuit.params),
            threads=threads,
            progress=progress,
            desc=f"{circuit.name} sites",
        )
        sites = [_simulated_site(circuit, bit, limit, f_ref, dist, keep is None) for limit in limits]
    else:
        f_ref = PUBLISHED_F_REF
        sites = [_flux_site(bit, site, dist.site_flux[site]) for site in circuit.params]

    raw = math.fsum(s.contribution for s in sites)
    logger.info("%s (%s): raw violation %.17g over %d sites", circuit.name, mode, raw, len(sites))
    return ViolationReport(
        protocol="full",
        method=mode,
        bit=bit,
        n_outer=n_outer,
        m_inner=m_inner,
        f_ref=f_ref,
        epsilon=epsilon,
        p_success=plan.p_success,
        n_gamma=plan.n_gamma,
        sites=sites,
        d_vio_raw=raw,
        d_vio=plan.n_gamma * raw,
        post_selected=keep is not None,
        keep=tuple(sorted(keep, key=lambda r: r.value)) if keep is not None else (),
        success_probability=dist.probability(success_port(bit)),
        bob_detection_probability=dist.role_probability(BinRole.BOB),
        discard_probability=discard_probability(dist, keep or POSTSELECTED_ROLES),
        regime_valid=asymptotic_regime_valid(n_outer, m_inner),
    )


def _flux_site(bit: BitProcess, site: str, flux: float) -> SiteContribution:
    key = "flux_zero" if bit is BitProcess.ZERO else "flux_one"
    return SiteContribution(site=site, contribution=flux, **{key: flux})


def _simulated_site(
    circuit: Circuit,
    bit: BitProcess,
    limit: SiteFisher,
    f_ref: float,
    dist: OutcomeDistribution,
    cross_check: bool,
) -> SiteContribution:
    flux = dist.site_flux[limit.site]
    suffix = "zero" if bit is BitProcess.ZERO else "one"
    return SiteContribution(
        site=limit.site,
        contribution=limit.limit / f_ref,
        flux_gap=_flux_gap(limit.limit, f_ref, flux, limit.site, circuit.name) if cross_check else None,
        residual=limit.residual,
        converged=limit.converged,
        **{f"fisher_{suffix}": limit.limit, f"flux_{suffix}": flux},
    )

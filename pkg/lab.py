import logging
import math
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict

from config import RunConfig
from constants import (
    D_VIO_TOLERANCE, DEFAULT_ERROR_TARGET, F_CURVE_TOLERANCE, F_LIMIT_TOLERANCE, F_REF_CHECK_THETAS,
    F_REF_TOLERANCE, FISHER_SIMULATION_MAX_M, FISHER_SIMULATION_MAX_N, P_D0_TOLERANCE,
    POSTSELECTED_ZERO_TOLERANCE, PUBLISHED_CONTRIBUTION_SUM, PUBLISHED_D_VIO, PUBLISHED_F_ONE_THETA1,
    PUBLISHED_F_ONE_THETA2, PUBLISHED_F_REF, PUBLISHED_F_ZERO_THETA1, PUBLISHED_N_GAMMA, PUBLISHED_P_D0_ONE,
    PUBLISHED_P_D0_ZERO, THETA1_CURVE_POINTS,
)
from errors import ConfigurationError, NonConvergedLimitError
from src.analysis import (
    POSTSELECTED_ROLES, ViolationReport, asymptotic_formula, d_vio_full_simulated, d_vio_full_sum,
    d_vio_reduced, discard_probability, fisher, fisher_limit, fisher_postselected, full_analytic_report,
    reduced_limits, site_family,
)
from src.circuits import REDUCED_SITES, REFERENCE_SITE, BitProcess, ReducedParams, build_reduced, build_reference
from src.classical import ClassicalTranscript, balanced_message, run_classical
from src.optics import propagate
from utils.parallel import map_ordered

logger = logging.getLogger(__name__)


class BinRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    bin: str
    role: str
    polarization: str
    p: float


class SiteRow(BaseModel):
    """Per-site Fisher information; conditioned on the kept bins when the run post-selects."""
    model_config = ConfigDict(frozen=True)

    site: str
    fisher_at_point: float
    fisher_limit: float
    residual: float
    converged: bool
    unconditioned_at_point: Optional[float] = None
    unconditioned_limit: Optional[float] = None


class ReducedRun(BaseModel):
    """Bins and per-site Fisher information of the reduced protocol at one evaluation point."""
    model_config = ConfigDict(frozen=True)

    bit: BitProcess
    theta1: float
    theta2: float
    post_selected: bool
    p_d0: float
    discard_probability: float
    bins: List[BinRow]
    sites: List[SiteRow]


class PublishedCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    quantity: str
    expected: float
    observed: float
    tolerance: float
    passed: bool


class PublishedTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    checks: List[PublishedCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


class SweepRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_outer: int
    m_inner: int
    d_sum: float
    d_asym: float
    relative_gap: float


def _check(quantity: str, expected: float, observed: float, tolerance: float) -> PublishedCheck:
    return PublishedCheck(
        quantity=quantity,
        expected=expected,
        observed=observed,
        tolerance=tolerance,
        passed=abs(observed - expected) <= tolerance,
    )


class CounterfactualLab:
    """
    Facade over the optics core, the builders and the analysis layer; one instance
    carries the run-wide settings (θ grid, error target, parallelism).
    """

    def __init__(
        self,
        grid: Optional[Sequence[float]] = None,
        epsilon: float = DEFAULT_ERROR_TARGET,
        threads: Optional[int] = None,
        progress: bool = False,
    ):
        self.grid = tuple(grid) if grid else None
        self.epsilon = epsilon
        self.threads = threads
        self.progress = progress

    # ----- reduced protocol -----

    def reduced(self, bit: BitProcess, theta1: float = 0.0, theta2: float = 0.0, postselect: bool = False) -> ReducedRun:
        try:
            params = ReducedParams(theta1=theta1, theta2=theta2, bit=bit)
        except ValueError as e:
            raise ConfigurationError(str(e)) from e
        circuit = build_reduced(params)
        point = params.theta_values()
        base = propagate(circuit, point)

        keep = POSTSELECTED_ROLES if postselect else None
        limits = reduced_limits(circuit, self.grid)
        limits_post = reduced_limits(circuit, self.grid, keep) if postselect else {}
        stale = [s.site for s in (*limits.values(), *limits_post.values()) if not s.converged]
        if stale:
            raise NonConvergedLimitError(stale)

        sites = []
        for site in REDUCED_SITES:
            dist = propagate(circuit, point, active_param=site)
            if postselect:
                shown = limits_post[site]
                sites.append(SiteRow(
                    site=site,
                    fisher_at_point=fisher_postselected(dist, keep),
                    fisher_limit=shown.limit,
                    residual=shown.residual,
                    converged=shown.converged,
                    unconditioned_at_point=fisher(dist),
                    unconditioned_limit=limits[site].limit,
                ))
            else:
                sites.append(SiteRow(
                    site=site,
                    fisher_at_point=fisher(dist),
                    fisher_limit=limits[site].limit,
                    residual=limits[site].residual,
                    converged=limits[site].converged,
                ))

        roles = dict(zip(base.bin_ids, base.roles))
        bins = [
            BinRow(bin=bin_id, role=roles[bin_id].value, polarization=pol.name, p=outcome.p)
            for (bin_id, pol), outcome in base.bins.items()
        ]
        return ReducedRun(
            bit=bit,
            theta1=theta1,
            theta2=theta2,
            post_selected=postselect,
            p_d0=base.probability("D0"),
            discard_probability=discard_probability(base),
            bins=bins,
            sites=sites,
        )

    def violation_reduced(self) -> ViolationReport:
        return d_vio_reduced(self.epsilon, self.grid)

    def published_table(self) -> PublishedTable:
        """Every published number of the reduced protocol, recomputed and compared."""
        checks = []
        reference = build_reference()
        for theta in F_REF_CHECK_THETAS:
            observed = fisher(propagate(reference, {REFERENCE_SITE: theta}, REFERENCE_SITE))
            checks.append(_check(f"F_ref(theta={theta:g})", PUBLISHED_F_REF, observed, F_REF_TOLERANCE))

        report = d_vio_reduced(self.epsilon, self.grid)
        by_site = {s.site: s for s in report.sites}
        theta1, theta2 = REDUCED_SITES
        checks.append(_check("F0(theta1)", PUBLISHED_F_ZERO_THETA1, by_site[theta1].fisher_zero, F_LIMIT_TOLERANCE))

        zero = build_reduced(ReducedParams(bit=BitProcess.ZERO))
        for theta in THETA1_CURVE_POINTS:
            family = site_family(zero, theta2, fixed={theta1: theta})
            observed = fisher_limit(zero, theta2, family, self.grid).limit
            expected = 0.8 * (1.0 - math.cos(theta))
            checks.append(_check(f"F0(theta2; theta1={theta:g})", expected, observed, F_CURVE_TOLERANCE))

        checks.append(_check("F1(theta1)", PUBLISHED_F_ONE_THETA1, by_site[theta1].fisher_one, F_LIMIT_TOLERANCE))
        checks.append(_check("F1(theta2)", PUBLISHED_F_ONE_THETA2, by_site[theta2].fisher_one, F_LIMIT_TOLERANCE))

        one = build_reduced(ReducedParams(bit=BitProcess.ONE))
        checks.append(_check("P(D0|bit 0)", PUBLISHED_P_D0_ZERO,
                             propagate(zero, zero.zero_thetas()).probability("D0"), P_D0_TOLERANCE))
        checks.append(_check("P(D0|bit 1)", PUBLISHED_P_D0_ONE,
                             propagate(one, one.zero_thetas()).probability("D0"), P_D0_TOLERANCE))
        post_one = max(s.limit for s in reduced_limits(one, self.grid, POSTSELECTED_ROLES).values())
        checks.append(_check("F1 post-selected", 0.0, post_one, POSTSELECTED_ZERO_TOLERANCE))

        checks.append(_check("n_gamma", PUBLISHED_N_GAMMA, report.n_gamma, 0.0))
        checks.append(_check("sum of contributions", PUBLISHED_CONTRIBUTION_SUM, report.d_vio_raw, D_VIO_TOLERANCE))
        checks.append(_check("D_vio", PUBLISHED_D_VIO, report.d_vio, D_VIO_TOLERANCE))
        table = PublishedTable(checks=checks)
        logger.info("published table: %d/%d checks pass", sum(c.passed for c in checks), len(checks))
        return table

    # ----- full protocol -----

    def full(
        self,
        n_outer: int,
        m_inner: int,
        mode: str = "sum",
        bit: BitProcess = BitProcess.ZERO,
        method: str = "auto",
        postselect: bool = False,
    ) -> ViolationReport:
        if mode != "simulate":
            if bit is not BitProcess.ZERO or postselect:
                raise ConfigurationError(f"mode {mode!r} covers the 0-bit process without post-selection only")
            return full_analytic_report(n_outer, m_inner, mode, self.epsilon)
        if method == "auto":
            small = n_outer <= FISHER_SIMULATION_MAX_N and m_inner <= FISHER_SIMULATION_MAX_M
            method = "fisher" if small or postselect else "flux"
        return d_vio_full_simulated(
            n_outer,
            m_inner,
            bit=bit,
            mode=method,
            epsilon=self.epsilon,
            keep=POSTSELECTED_ROLES if postselect else None,
            grid=self.grid,
            threads=self.threads,
            progress=self.progress,
        )

    def sweep(self, n_values: Sequence[int], m_values: Sequence[int]) -> List[SweepRow]:
        points: List[Tuple[int, int]] = [(n, m) for n in n_values for m in m_values]

        def evaluate(point: Tuple[int, int]) -> SweepRow:
            n, m = point
            d_sum = d_vio_full_sum(n, m)
            d_asym = asymptotic_formula(n, m)
            return SweepRow(n_outer=n, m_inner=m, d_sum=d_sum, d_asym=d_asym, relative_gap=abs(d_asym - d_sum) / d_sum)

        return map_ordered(evaluate, points, threads=self.threads, progress=self.progress, desc="sweep")

    # ----- classical protocol -----

    def classical(self, length: int, seed: Optional[int] = None, message: Optional[str] = None) -> ClassicalTranscript:
        bits = tuple(int(c) for c in message) if message else balanced_message(length, seed)
        return run_classical(bits, seed)


def create_lab(config: Optional[RunConfig] = None, progress: bool = False) -> CounterfactualLab:
    """Factory used by the CLI: `from lab import create_lab`."""
    config = config or RunConfig()
    return CounterfactualLab(grid=config.grid, epsilon=config.epsilon, threads=config.threads, progress=progress)

from src.analysis.fisher import (
    POSTSELECTED_ROLES, discard_probability, fisher, fisher_postselected, negligible_bins,
)
from src.analysis.limits import (
    FisherReport, SiteFisher, ThetaFamily, fisher_limit, fisher_report, richardson_extrapolate, site_family,
)
from src.analysis.violation import (
    RepetitionPlan, SiteContribution, ViolationReport, asymptotic_formula, asymptotic_regime_valid,
    d_vio_full_asymptotic, d_vio_full_closed_form, d_vio_full_simulated, d_vio_full_sum, d_vio_reduced,
    full_analytic_report, n_gamma, reduced_limits, reference_fisher, repetition_plan, site_flux_zero_bit,
    success_port, success_probability, zero_bit_success_probability,
)

__all__ = [
    "POSTSELECTED_ROLES", "FisherReport", "RepetitionPlan", "SiteContribution", "SiteFisher", "ThetaFamily",
    "ViolationReport", "asymptotic_formula", "asymptotic_regime_valid", "d_vio_full_asymptotic",
    "d_vio_full_closed_form", "d_vio_full_simulated", "d_vio_full_sum", "d_vio_reduced", "discard_probability",
    "fisher", "fisher_limit", "fisher_postselected", "fisher_report", "full_analytic_report", "n_gamma",
    "negligible_bins", "reduced_limits", "reference_fisher", "repetition_plan", "richardson_extrapolate", "site_family",
    "site_flux_zero_bit", "success_port", "success_probability", "zero_bit_success_probability",
]

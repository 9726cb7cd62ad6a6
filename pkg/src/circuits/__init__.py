from src.circuits.builders import (
    REDUCED_SITES, REFERENCE_SITE, BitProcess, FullParams, ReducedParams, build_full, build_reduced,
    build_reference, full_params, full_site_id,
)

__all__ = [
    "REDUCED_SITES", "REFERENCE_SITE", "BitProcess", "FullParams", "ReducedParams", "build_full",
    "build_reduced", "build_reference", "full_params", "full_site_id",
]

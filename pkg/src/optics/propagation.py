# src/optics/propagation.py

import logging
import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, Iterable, Mapping, NamedTuple, Optional, Tuple

import numpy as np

from constants import ISOMETRY_DRIFT_PER_ELEMENT, ISOMETRY_TOLERANCE, RESIDUAL_AMPLITUDE_TOLERANCE
from errors import ConfigurationError, NumericalInconsistencyError, StructuralError
from src.optics.circuit import Circuit
from src.optics.elements import (
    BeamSplitter, BinRole, DetectorBin, Mirror, PhasePlate, Polarization, Swap, Tagging,
)
from src.optics.state import PhotonState

logger = logging.getLogger(__name__)


def rotation(theta: float) -> np.ndarray:
    """Tagging rotation on (H, V): H → cosθ H + sinθ V, V → cosθ V − sinθ H."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def rotation_derivative(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[-s, -c], [c, -s]])


def _row(index: Mapping[str, int], mode: str) -> int:
    try:
        return index[mode]
    except KeyError:
        raise ConfigurationError(f"element references unknown mode {mode!r}") from None


def _apply_inplace(amps, tans, bins, index, elem, theta_values, active_param, flux) -> None:
    """Applies one element to writable buffers; the only place the element algebra lives."""
    if isinstance(elem, BeamSplitter):
        lo, hi = _row(index, elem.mode_lo), _row(index, elem.mode_hi)
        t = math.sqrt(elem.transmission)
        r = 1j * math.sqrt(1.0 - elem.transmission)
        for buf in (amps, tans):
            a_lo, a_hi = buf[lo].copy(), buf[hi].copy()
            buf[lo] = t * a_lo + r * a_hi
            buf[hi] = r * a_lo + t * a_hi
    elif isinstance(elem, Tagging):
        k = _row(index, elem.mode)
        try:
            theta = theta_values[elem.param_id]
        except KeyError:
            raise ConfigurationError(f"no angle supplied for tagging {elem.param_id!r}") from None
        if flux is not None:
            flux[elem.param_id] = flux.get(elem.param_id, 0.0) + float(np.sum(np.abs(amps[k]) ** 2))
        rot = rotation(theta)
        before = amps[k].copy()
        amps[k] = rot @ before
        tans[k] = rot @ tans[k]
        if elem.param_id == active_param:
            tans[k] += rotation_derivative(theta) @ before
    elif isinstance(elem, PhasePlate):
        k = _row(index, elem.mode)
        factor = complex(math.cos(elem.phase), math.sin(elem.phase))
        amps[k] *= factor
        tans[k] *= factor
    elif isinstance(elem, Mirror):
        _row(index, elem.mode)
    elif isinstance(elem, Swap):
        a, b = _row(index, elem.mode_a), _row(index, elem.mode_b)
        amps[[a, b]] = amps[[b, a]]
        tans[[a, b]] = tans[[b, a]]
    elif isinstance(elem, DetectorBin):
        k = _row(index, elem.mode)
        if elem.bin_id in bins:
            raise StructuralError(f"detector bin {elem.bin_id!r} absorbs twice")
        bins[elem.bin_id] = (amps[k].copy(), tans[k].copy())
        amps[k] = 0.0
        tans[k] = 0.0
    else:
        raise ConfigurationError(f"unsupported element {elem!r}")


def apply_element(state: PhotonState, elem, theta_values: Mapping[str, float]) -> PhotonState:
    """Pure single-element step: returns a new state, the input state is untouched."""
    amps, tans, bins = state.copy_buffers()
    _apply_inplace(amps, tans, bins, state.mode_index, elem, theta_values, state.active_param, None)
    return PhotonState.build(state.mode_index, amps, tans, state.active_param, bins)


def propagate_state(
    circuit: Circuit,
    state: PhotonState,
    theta_values: Mapping[str, float],
    flux: Optional[Dict[str, float]] = None,
) -> PhotonState:
    """Runs every element of ``circuit`` on ``state``; ``flux`` collects the probability met by each tagging."""
    if tuple(state.mode_index) != circuit.modes:
        raise ConfigurationError(f"state modes do not match circuit {circuit.name!r}")
    amps, tans, bins = state.copy_buffers()
    for elem in circuit.elements:
        _apply_inplace(amps, tans, bins, state.mode_index, elem, theta_values, state.active_param, flux)
    return PhotonState.build(state.mode_index, amps, tans, state.active_param, bins)


class BinOutcome(NamedTuple):
    p: float
    dp: float


@dataclass(frozen=True)
class OutcomeDistribution:
    """Polarization-resolved bin probabilities ``p[k, pol]`` with exact derivatives ``dp``."""
    bin_ids: Tuple[str, ...]
    roles: Tuple[BinRole, ...]
    p: np.ndarray
    dp: np.ndarray
    active_param: Optional[str]
    theta_values: Mapping[str, float]
    site_flux: Mapping[str, float]

    @property
    def bins(self) -> Dict[Tuple[str, Polarization], BinOutcome]:
        return {
            (bin_id, pol): BinOutcome(float(self.p[k, pol]), float(self.dp[k, pol]))
            for k, bin_id in enumerate(self.bin_ids)
            for pol in Polarization
        }

    def probability(self, bin_id: str, polarization: Optional[Polarization] = None) -> float:
        row = self.p[self.bin_ids.index(bin_id)]
        return float(row.sum() if polarization is None else row[polarization])

    def derivative(self, bin_id: str, polarization: Optional[Polarization] = None) -> float:
        row = self.dp[self.bin_ids.index(bin_id)]
        return float(row.sum() if polarization is None else row[polarization])

    def role_mask(self, roles: Iterable[BinRole]) -> np.ndarray:
        wanted = set(roles)
        return np.array([role in wanted for role in self.roles], dtype=bool)

    def role_probability(self, *roles: BinRole) -> float:
        return float(self.p[self.role_mask(roles)].sum())

    def total(self) -> float:
        return float(self.p.sum())


def isometry_bound(circuit: Circuit) -> float:
    """Largest |Σp − 1| accepted for ``circuit``; rounding grows with the number of elements."""
    return max(ISOMETRY_TOLERANCE, ISOMETRY_DRIFT_PER_ELEMENT * len(circuit.elements))


def propagate(
    circuit: Circuit,
    theta_values: Mapping[str, float],
    active_param: Optional[str] = None,
) -> OutcomeDistribution:
    """Sends one H-polarized photon into ``circuit.input_mode`` and collects every bin."""
    if active_param is not None and active_param not in circuit.params:
        raise ConfigurationError(f"{circuit.name}: no tagging {active_param!r} to differentiate")

    start = PhotonState.single_photon(circuit.modes, circuit.input_mode, active_param)
    flux: Dict[str, float] = {}
    final = propagate_state(circuit, start, theta_values, flux)

    residual = final.in_flight()
    if residual > RESIDUAL_AMPLITUDE_TOLERANCE:
        raise StructuralError(f"{circuit.name}: {residual:.3e} probability left in non-terminated modes")

    bin_ids = circuit.bins
    amps = np.array([final.bins[b][0] for b in bin_ids])
    tans = np.array([final.bins[b][1] for b in bin_ids])
    p = np.abs(amps) ** 2
    dp = 2.0 * np.real(np.conj(amps) * tans)

    total = float(p.sum())
    if abs(total - 1.0) > isometry_bound(circuit):
        raise NumericalInconsistencyError(f"{circuit.name}: bins sum to {total!r}, not 1")
    logger.debug("propagated %s (%d elements, active=%s)", circuit.name, len(circuit.elements), active_param)

    for arr in (p, dp):
        arr.setflags(write=False)
    return OutcomeDistribution(
        bin_ids=bin_ids,
        roles=tuple(circuit.roles[b] for b in bin_ids),
        p=p,
        dp=dp,
        active_param=active_param,
        theta_values=MappingProxyType(dict(theta_values)),
        site_flux=MappingProxyType(flux),
    )


def tagging_flux(circuit: Circuit, theta_values: Mapping[str, float]) -> Dict[str, float]:
    """Probability crossing each tagging site during one propagation."""
    return dict(propagate(circuit, theta_values).site_flux)

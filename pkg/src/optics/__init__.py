from src.optics.circuit import Circuit, export_circuit, validate_circuit
from src.optics.elements import (
    BeamSplitter, BinRole, DetectorBin, Element, Mirror, ModeId, PhasePlate, Polarization, Swap, Tagging,
)
from src.optics.propagation import (
    BinOutcome, OutcomeDistribution, apply_element, isometry_bound, propagate, propagate_state, rotation,
    rotation_derivative, tagging_flux,
)
from src.optics.state import PhotonState, superpose

__all__ = [
    "BeamSplitter", "BinOutcome", "BinRole", "Circuit", "DetectorBin", "Element", "Mirror", "ModeId",
    "OutcomeDistribution", "PhasePlate", "PhotonState", "Polarization", "Swap", "Tagging",
    "apply_element", "export_circuit", "isometry_bound", "propagate", "propagate_state", "rotation",
    "rotation_derivative", "superpose", "tagging_flux", "validate_circuit",
]

# src/optics/circuit.py

from typing import Dict, List, Tuple

import orjson
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr

from errors import StructuralError
from src.optics.elements import BinRole, DetectorBin, Element, ModeId, Tagging


class Circuit(BaseModel):
    """Ordered optical elements over named spatial modes, terminated by detector bins."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    modes: Tuple[ModeId, ...]
    input_mode: ModeId
    elements: Tuple[Element, ...]
    roles: Dict[str, BinRole] = Field(description="role of every detector bin")

    _params: Tuple[str, ...] = PrivateAttr(default=())
    _bins: Tuple[str, ...] = PrivateAttr(default=())

    def __init__(self, **data):
        super().__init__(**data)
        validate_circuit(self)
        params: List[str] = []
        bins: List[str] = []
        for elem in self.elements:
            if isinstance(elem, Tagging) and elem.param_id not in params:
                params.append(elem.param_id)
            elif isinstance(elem, DetectorBin):
                bins.append(elem.bin_id)
        self._params = tuple(params)
        self._bins = tuple(bins)

    @property
    def params(self) -> Tuple[str, ...]:
        """Tagging parameter ids in the order the photon meets them."""
        return self._params

    @property
    def bins(self) -> Tuple[str, ...]:
        """Detector bin ids in the order they are placed."""
        return self._bins

    def bins_with_role(self, role: BinRole) -> Tuple[str, ...]:
        return tuple(b for b in self._bins if self.roles[b] is role)

    def zero_thetas(self) -> Dict[str, float]:
        return {p: 0.0 for p in self._params}


def validate_circuit(circuit: Circuit) -> None:
    """Structural isometry check: every mode ends in a bin, bins are unique, roles are total."""
    declared = set(circuit.modes)
    if len(declared) != len(circuit.modes):
        raise StructuralError(f"{circuit.name}: duplicate mode ids")
    if circuit.input_mode not in declared:
        raise StructuralError(f"{circuit.name}: input mode {circuit.input_mode!r} is not declared")

    terminated = {mode: False for mode in circuit.modes}
    seen_bins = set()
    for index, elem in enumerate(circuit.elements):
        for mode in elem.modes:
            if mode not in declared:
                raise StructuralError(f"{circuit.name}: element {index} references unknown mode {mode!r}")
            terminated[mode] = False
        if isinstance(elem, DetectorBin):
            if elem.bin_id in seen_bins:
                raise StructuralError(f"{circuit.name}: duplicate detector bin {elem.bin_id!r}")
            seen_bins.add(elem.bin_id)
            terminated[elem.mode] = True

    open_modes = sorted(mode for mode, done in terminated.items() if not done)
    if open_modes:
        raise StructuralError(f"{circuit.name}: modes not terminated by a detector: {open_modes}")
    if set(circuit.roles) != seen_bins:
        missing = sorted(seen_bins - set(circuit.roles))
        extra = sorted(set(circuit.roles) - seen_bins)
        raise StructuralError(f"{circuit.name}: bin roles not total (missing={missing}, unknown={extra})")


def export_circuit(circuit: Circuit) -> bytes:
    """Deterministic JSON description: modes, elements in order, bin roles."""
    document = {
        "name": circuit.name,
        "input_mode": circuit.input_mode,
        "modes": list(circuit.modes),
        "elements": [elem.model_dump(mode="json") for elem in circuit.elements],
        "roles": {bin_id: role.value for bin_id, role in circuit.roles.items()},
        "params": list(circuit.params),
    }
    return orjson.dumps(document, option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2)

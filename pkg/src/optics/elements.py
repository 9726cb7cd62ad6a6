# src/optics/elements.py

from enum import Enum
from typing import Annotated, Literal, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

ModeId = str


class Polarization(int, Enum):
    """Polarization basis; the value is the row index into an amplitude pair."""
    H = 0
    V = 1


class BinRole(str, Enum):
    """What a detector bin means to the protocol analysis."""
    D0 = "d0"
    D1 = "d1"
    LOSS = "loss"
    BOB = "bob"
    OTHER = "other"


class _Element(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    @property
    def modes(self) -> Tuple[ModeId, ...]:
        return (self.mode,)


class BeamSplitter(_Element):
    """Lossless splitter; reflection picks up a factor i."""
    kind: Literal["beam_splitter"] = "beam_splitter"
    mode_lo: ModeId
    mode_hi: ModeId
    transmission: float = Field(ge=0.0, le=1.0, description="probability of keeping the mode")

    @property
    def modes(self) -> Tuple[ModeId, ...]:
        return (self.mode_lo, self.mode_hi)


class Tagging(_Element):
    """Weak polarization rotation R(θ) whose angle is looked up by param_id."""
    kind: Literal["tagging"] = "tagging"
    mode: ModeId
    param_id: str


class PhasePlate(_Element):
    kind: Literal["phase_plate"] = "phase_plate"
    mode: ModeId
    phase: float


class Mirror(_Element):
    # perfect mirror, phase absorbed into the splitter convention
    kind: Literal["mirror"] = "mirror"
    mode: ModeId


class DetectorBin(_Element):
    """Absorbing, polarization-resolving detector; leaves its mode empty."""
    kind: Literal["detector_bin"] = "detector_bin"
    mode: ModeId
    bin_id: str


class Swap(_Element):
    kind: Literal["swap"] = "swap"
    mode_a: ModeId
    mode_b: ModeId

    @property
    def modes(self) -> Tuple[ModeId, ...]:
        return (self.mode_a, self.mode_b)


Element = Annotated[
    Union[BeamSplitter, Tagging, PhasePlate, Mirror, DetectorBin, Swap],
    Field(discriminator="kind"),
]

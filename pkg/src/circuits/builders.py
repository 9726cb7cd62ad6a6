# src/circuits/builders.py

import logging
import math
from enum import Enum
from typing import Callable, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from constants import (
    FULL_SIZE_GUARD, MIN_INNER_SPLITTERS, MIN_OUTER_SPLITTERS, REDUCED_INNER_SPLITTERS,
    REDUCED_INNER_TRANSMISSION, REDUCED_OUTER_TRANSMISSION,
)
from errors import ConfigurationError
from src.optics import (
    BeamSplitter, BinRole, Circuit, DetectorBin, Mirror, PhasePlate, Tagging,
)

logger = logging.getLogger(__name__)

REFERENCE_SITE = "theta"
REDUCED_SITES = ("theta1", "theta2")


class BitProcess(int, Enum):
    """ZERO: Bob inserts his mirrors. ONE: Bob replaces them with detectors."""
    ZERO = 0
    ONE = 1


class ReducedParams(BaseModel):
    """Evaluation point of the doubly nested interferometer."""
    model_config = ConfigDict(frozen=True)

    theta1: float = Field(default=0.0, ge=0.0, lt=math.pi / 2)
    theta2: float = Field(default=0.0, ge=0.0, lt=math.pi / 2)
    bit: BitProcess = BitProcess.ZERO

    def theta_values(self) -> Dict[str, float]:
        return {"theta1": self.theta1, "theta2": self.theta2}


class FullParams(BaseModel):
    """N outer splitters, M splitters per inner chain."""
    model_config = ConfigDict(frozen=True)

    n_outer: int = Field(ge=MIN_OUTER_SPLITTERS, description="outer beam-splitter count N")
    m_inner: int = Field(ge=MIN_INNER_SPLITTERS, description="inner beam-splitter count M")
    bit: BitProcess = BitProcess.ZERO

    @model_validator(mode="after")
    def _size_guard(self):
        if self.n_outer * self.m_inner > FULL_SIZE_GUARD:
            raise ValueError(f"N·M = {self.n_outer * self.m_inner} exceeds the guard {FULL_SIZE_GUARD}")
        return self

    @property
    def outer_transmission(self) -> float:
        return math.sin(math.pi / (2 * self.n_outer)) ** 2

    @property
    def inner_transmission(self) -> float:
        return math.sin(math.pi / (2 * self.m_inner)) ** 2

    @property
    def tagging_sites(self) -> int:
        return (self.n_outer - 1) * (self.m_inner - 1)


def full_site_id(n: int, m: int) -> str:
    return f"t{n}.{m}"


class _CircuitBuilder:
    """Collects modes, elements and bin roles; every splitter hands the arm roles over."""

    def __init__(self, name: str, input_mode: str):
        self.name = name
        self.input_mode = input_mode
        self.modes: List[str] = [input_mode]
        self.elements: list = []
        self.roles: Dict[str, BinRole] = {}

    def mode(self, mode_id: str) -> str:
        if mode_id not in self.modes:
            self.modes.append(mode_id)
        return mode_id

    def splitter(self, here: str, there: str, transmission: float):
        """
        Splitter whose transmitted beam crosses to the other arm. The mode id that fed
        ``here`` now carries the crossed amplitude, so the two ids exchange roles:
        returns the (here, there) ids after the splitter.
        """
        self.elements.append(BeamSplitter(mode_lo=here, mode_hi=there, transmission=transmission))
        return there, here

    def detector(self, mode: str, bin_id: str, role: BinRole) -> None:
        self.elements.append(DetectorBin(mode=mode, bin_id=bin_id))
        self.roles[bin_id] = role

    def inner_chain(
        self,
        arm: str,
        label: str,
        splitters: int,
        transmission: float,
        bit: BitProcess,
        site_id: Callable[[int], str],
        bob_bin_id: Callable[[int], str],
        loss_bin_id: str,
    ) -> str:
        """
        Chained inner interferometer on ``arm``. Each of the first M-1 crossings into
        Bob's side is tagged, then mirrored (ZERO) or absorbed (ONE). What reaches Bob's
        side after the last splitter is discarded to a loss bin. Returns the mode that
        continues on Alice's side.
        """
        near, far = arm, self.mode(f"{label}.far")
        for m in range(1, splitters + 1):
            near, far = self.splitter(near, far, transmission)
            if m == splitters:
                break
            self.elements.append(Tagging(mode=far, param_id=site_id(m)))
            if bit is BitProcess.ZERO:
                self.elements.append(Mirror(mode=far))
            else:
                self.detector(far, bob_bin_id(m), BinRole.BOB)
        self.detector(far, loss_bin_id, BinRole.LOSS)
        # each pass on Alice's side picks up a factor i; undo i^M so the outer arms add coherently
        self.elements.append(PhasePlate(mode=near, phase=(-splitters * math.pi / 2) % (2 * math.pi)))
        return near

    def build(self) -> Circuit:
        return Circuit(
            name=self.name,
            modes=tuple(self.modes),
            input_mode=self.input_mode,
            elements=tuple(self.elements),
            roles=self.roles,
        )


def build_reference() -> Circuit:
    """The whole wavepacket crosses one tagging and is measured in H/V."""
    builder = _CircuitBuilder("reference", "beam")
    builder.elements.append(Tagging(mode="beam", param_id=REFERENCE_SITE))
    builder.detector("beam", "D", BinRole.OTHER)
    return builder.build()


def build_reduced(params: Optional[ReducedParams] = None) -> Circuit:
    """
    Doubly nested interferometer: an outer splitter (T=4/5) sends the photon into the
    arm that meets two inner interferometers (T=1/2) in series, one per entry into
    Bob's laboratory, and a second outer splitter recombines the arms onto D0/D1.
    Inner loss ports are D2 and D3; Bob's detectors (1-bit process) are B1 and B2.
    """
    params = params or ReducedParams()
    builder = _CircuitBuilder(f"reduced-{params.bit.value}", "outer.a")
    alice, arm = builder.splitter("outer.a", builder.mode("outer.b"), REDUCED_OUTER_TRANSMISSION)
    for k, loss_bin in ((1, "D2"), (2, "D3")):
        arm = builder.inner_chain(
            arm,
            label=f"inner{k}",
            splitters=REDUCED_INNER_SPLITTERS,
            transmission=REDUCED_INNER_TRANSMISSION,
            bit=params.bit,
            site_id=lambda m, k=k: f"theta{k}",
            bob_bin_id=lambda m, k=k: f"B{k}",
            loss_bin_id=loss_bin,
        )
    alice, arm = builder.splitter(alice, arm, REDUCED_OUTER_TRANSMISSION)
    builder.detector(alice, "D0", BinRole.D0)
    builder.detector(arm, "D1", BinRole.D1)
    return builder.build()


def build_full(params: FullParams) -> Circuit:
    """
    Full protocol: N outer splitters with transmission sin²(π/2N); between consecutive
    outer splitters the transmitted arm runs through an inner chain of M splitters with
    transmission sin²(π/2M). Sites are t{n}.{m}, n=1..N-1, m=1..M-1.
    """
    n_outer, m_inner = params.n_outer, params.m_inner
    builder = _CircuitBuilder(f"full-{params.bit.value}-N{n_outer}-M{m_inner}", "outer.a")
    alice, arm = "outer.a", builder.mode("outer.b")
    for n in range(1, n_outer + 1):
        alice, arm = builder.splitter(alice, arm, params.outer_transmission)
        if n == n_outer:
            break
        arm = builder.inner_chain(
            arm,
            label=f"inner{n}",
            splitters=m_inner,
            transmission=params.inner_transmission,
            bit=params.bit,
            site_id=lambda m, n=n: full_site_id(n, m),
            bob_bin_id=lambda m, n=n: f"B{n}.{m}",
            loss_bin_id=f"L{n}",
        )
    builder.detector(alice, "D0", BinRole.D0)
    builder.detector(arm, "D1", BinRole.D1)
    logger.debug("built %s with %d elements", builder.name, len(builder.elements))
    return builder.build()


def full_params(n_outer: int, m_inner: int, bit: BitProcess = BitProcess.ZERO) -> FullParams:
    """FullParams with guard violations reported as configuration errors."""
    try:
        return FullParams(n_outer=n_outer, m_inner=m_inner, bit=bit)
    except ValueError as e:
        raise ConfigurationError(str(e)) from e

# src/optics/state.py

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from errors import ConfigurationError
from src.optics.elements import ModeId, Polarization

BinAmplitude = Tuple[np.ndarray, np.ndarray]  # (amplitude pair, tangent pair)


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class PhotonState:
    """
    Single-photon amplitudes on path ⊗ polarization, plus their derivatives with
    respect to one tagging parameter. Row k of ``amplitudes`` is the (H, V) pair of
    the mode whose index is ``mode_index[mode]``; absorbed amplitude lives in ``bins``.
    """
    mode_index: Mapping[ModeId, int]
    amplitudes: np.ndarray
    tangents: np.ndarray
    active_param: Optional[str] = None
    bins: Mapping[str, BinAmplitude] = field(default_factory=lambda: MappingProxyType({}))

    @classmethod
    def from_amplitudes(
        cls,
        modes: Sequence[ModeId],
        amplitudes: Mapping[ModeId, Sequence[complex]],
        active_param: Optional[str] = None,
    ) -> "PhotonState":
        index = {mode: k for k, mode in enumerate(modes)}
        amps = np.zeros((len(modes), 2), dtype=complex)
        for mode, pair in amplitudes.items():
            if mode not in index:
                raise ConfigurationError(f"unknown mode {mode!r}")
            amps[index[mode]] = pair
        return cls.build(index, amps, np.zeros_like(amps), active_param, {})

    @classmethod
    def single_photon(
        cls,
        modes: Sequence[ModeId],
        input_mode: ModeId,
        active_param: Optional[str] = None,
        polarization: Polarization = Polarization.H,
    ) -> "PhotonState":
        pair = [0j, 0j]
        pair[polarization] = 1.0 + 0j
        return cls.from_amplitudes(modes, {input_mode: pair}, active_param)

    @classmethod
    def build(cls, index, amps, tans, active_param, bins) -> "PhotonState":
        """Wraps freshly computed buffers; the buffers must not be touched afterwards."""
        frozen_bins = {b: (_frozen(a), _frozen(t)) for b, (a, t) in bins.items()}
        return cls(
            mode_index=MappingProxyType(dict(index)),
            amplitudes=_frozen(amps),
            tangents=_frozen(tans),
            active_param=active_param,
            bins=MappingProxyType(frozen_bins),
        )

    @property
    def modes(self) -> Tuple[ModeId, ...]:
        return tuple(self.mode_index)

    def amplitude(self, mode: ModeId) -> np.ndarray:
        return self.amplitudes[self._row(mode)]

    def tangent(self, mode: ModeId) -> np.ndarray:
        return self.tangents[self._row(mode)]

    def norm(self) -> float:
        """Probability still in flight plus probability already absorbed."""
        absorbed = sum(float(np.sum(np.abs(a) ** 2)) for a, _ in self.bins.values())
        return float(np.sum(np.abs(self.amplitudes) ** 2)) + absorbed

    def in_flight(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def copy_buffers(self):
        """Writable copies of (amplitudes, tangents, bins) for the propagation kernels."""
        bins = {b: (a.copy(), t.copy()) for b, (a, t) in self.bins.items()}
        return self.amplitudes.copy(), self.tangents.copy(), bins

    def _row(self, mode: ModeId) -> int:
        try:
            return self.mode_index[mode]
        except KeyError:
            raise ConfigurationError(f"unknown mode {mode!r}") from None


def superpose(weights: Iterable[complex], states: Sequence[PhotonState]) -> PhotonState:
    """Linear combination of states that share the same modes and bins."""
    weights = list(weights)
    first = states[0]
    amps = sum(w * s.amplitudes for w, s in zip(weights, states))
    tans = sum(w * s.tangents for w, s in zip(weights, states))
    bins = {
        b: (
            sum(w * s.bins[b][0] for w, s in zip(weights, states)),
            sum(w * s.bins[b][1] for w, s in zip(weights, states)),
        )
        for b in first.bins
    }
    return PhotonState.build(first.mode_index, np.asarray(amps), np.asarray(tans), first.active_param, bins)

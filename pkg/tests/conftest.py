import math

import numpy as np
import pytest

from src.circuits import BitProcess, ReducedParams, build_reduced, build_reference
from src.optics import (
    BeamSplitter, BinRole, Circuit, DetectorBin, Mirror, PhasePlate, Swap, Tagging,
)

RANDOM_PARAMS = ("p0", "p1", "p2")


def random_circuit(seed: int) -> Circuit:
    """Random element sequence on 2-4 modes, every mode closed by its own detector bin."""
    rng = np.random.default_rng(seed)
    n_modes = int(rng.integers(2, 5))
    modes = [f"m{k}" for k in range(n_modes)]
    elements = []
    roles = {}
    for index in range(int(rng.integers(5, 31))):
        kind = int(rng.integers(0, 6))
        a, b = (modes[int(k)] for k in rng.choice(n_modes, size=2, replace=False))
        if kind == 0:
            elements.append(BeamSplitter(mode_lo=a, mode_hi=b, transmission=float(rng.uniform(0.05, 0.95))))
        elif kind == 1:
            elements.append(Tagging(mode=a, param_id=RANDOM_PARAMS[int(rng.integers(len(RANDOM_PARAMS)))]))
        elif kind == 2:
            elements.append(PhasePlate(mode=a, phase=float(rng.uniform(0.0, 2 * math.pi))))
        elif kind == 3:
            elements.append(Mirror(mode=a))
        elif kind == 4:
            elements.append(Swap(mode_a=a, mode_b=b))
        else:
            # mid-circuit absorption; the mode comes back as vacuum
            elements.append(DetectorBin(mode=a, bin_id=f"mid{index}"))
            roles[f"mid{index}"] = BinRole.OTHER
    for k, mode in enumerate(modes):
        elements.append(DetectorBin(mode=mode, bin_id=f"out{k}"))
        roles[f"out{k}"] = BinRole.D0 if k == 0 else BinRole.D1 if k == 1 else BinRole.LOSS
    return Circuit(
        name=f"random-{seed}",
        modes=tuple(modes),
        input_mode=modes[0],
        elements=tuple(elements),
        roles=roles,
    )


def random_thetas(circuit: Circuit, seed: int, low: float = 0.0, high: float = 0.3) -> dict:
    rng = np.random.default_rng(10_000 + seed)
    return {param: float(rng.uniform(low, high)) for param in circuit.params}


@pytest.fixture(scope="session")
def reference_circuit():
    return build_reference()


@pytest.fixture(scope="session")
def zero_circuit():
    return build_reduced(ReducedParams(bit=BitProcess.ZERO))


@pytest.fixture(scope="session")
def one_circuit():
    return build_reduced(ReducedParams(bit=BitProcess.ONE))

import pytest

from errors import ConfigurationError
from src.classical import Parity, balanced_message, decode, run_classical


def test_balanced_message_is_seeded():
    assert balanced_message(64, seed=3) == balanced_message(64, seed=3)
    assert set(balanced_message(64, seed=3)) == {0, 1}


def test_random_message():
    transcript = run_classical(balanced_message(10_000, seed=2024))
    assert transcript.kept_counterfactual
    assert transcript.all_decoded_correctly
    assert transcript.discard_fraction == pytest.approx(0.5, abs=0.02)
    assert transcript.crossing_count == transcript.discard_count
    assert all(not r.channel_crossing for r in transcript.minutes if r.kept)


def test_all_zero_message():
    transcript = run_classical([0, 0, 0, 0])
    assert [r.ball_sent for r in transcript.minutes] == [False, True, False, True]
    assert transcript.kept_minutes == (0, 2)
    assert transcript.discard_count == 2
    assert transcript.decoded_bits == (0, 0, 0, 0)
    assert transcript.kept_counterfactual


@pytest.mark.parametrize("parity, received, bit", [
    (Parity.EVEN, True, 1), (Parity.EVEN, False, 0), (Parity.ODD, True, 0), (Parity.ODD, False, 1),
])
def test_decode(parity, received, bit):
    assert decode(parity, received) == bit


def test_rows():
    rows = run_classical([1, 1]).rows()
    assert rows == [
        {"minute": 0, "parity": "even", "bit": 1, "sent": True, "received": True, "kept": False},
        {"minute": 1, "parity": "odd", "bit": 1, "sent": False, "received": False, "kept": True},
    ]


@pytest.mark.parametrize("message", [[], [0, 2]])
def test_bad_message(message):
    with pytest.raises(ConfigurationError):
        run_classical(message)


def test_bad_length():
    with pytest.raises(ConfigurationError):
        balanced_message(0)

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ecgmee import (
    MorphConfig,
    detect_r_peaks,
    extract_beats,
    invert_cycles,
    synth_ecg,
)

DATA_DIR = Path(__file__).resolve().parent.parent / "data" / "synth"


@pytest.fixture(scope="session")
def synth_record():
    return synth_ecg(360, 10, 60, 7)


@pytest.fixture(scope="session")
def long_record():
    return synth_ecg(360, 60, 60, 42, jitter=0.05)


@pytest.fixture(scope="session")
def long_beats(long_record):
    peaks = detect_r_peaks(long_record, "II")
    return extract_beats(long_record, "II", peaks)


@pytest.fixture(scope="session")
def separable_record(long_record):
    return invert_cycles(long_record, [5, 13, 21, 29, 37, 45, 53], label="V")


@pytest.fixture(scope="session")
def separable_beats(separable_record):
    peaks = detect_r_peaks(separable_record, "II")
    return extract_beats(separable_record, "II", peaks)


@pytest.fixture
def morph_cfg():
    return MorphConfig.for_variant(2)


def random_beats(count, length=289, seed=0):
    """ECG-shaped beats with amplitude jitter plus a small noise floor."""
    rng = np.random.default_rng(seed)
    t = np.arange(length)
    c = length // 2
    shape = (
        1.0 * np.exp(-0.5 * ((t - c) / (0.018 * length)) ** 2)
        + 0.15 * np.exp(-0.5 * ((t - c + 0.25 * length) / (0.04 * length)) ** 2)
        - 0.25 * np.exp(-0.5 * ((t - c - 0.055 * length) / (0.02 * length)) ** 2)
        + 0.30 * np.exp(-0.5 * ((t - c - 0.28 * length) / (0.055 * length)) ** 2)
    )
    return [
        shape * rng.uniform(0.6, 1.4) + rng.normal(0, 0.02, length)
        for _ in range(count)
    ]


def spike_noise_beat(rng, length=289):
    """Artifact-like beat: near-flat trace with deep negative pops, so the
    modal amplitude bin sits at the very top after normalization."""
    x = rng.normal(0.0, 0.002, length)
    for pos in (length // 5, length // 2, (4 * length) // 5):
        x[pos] -= rng.uniform(2.0, 3.0)
    return x

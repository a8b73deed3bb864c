#!/usr/bin/env python3
"""
pytest configuration and fixtures for the OneMax simulation framework
Provides seeded generators, test configuration, storage frames and sequence factories.
"""

import os
import sys
from dataclasses import dataclass
from typing import List

import numpy as np
import pytest

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from bitstring import BitString, IndexSet, onemax
from config import TestingConfig
from distinguishing import DistinguishingSequence, canonical_sequence
from operators import (
    SigmaMap, StorageFrame, WriteRequest, build_frame, build_sigma, make_block_reference,
    store_delta, write,
)


# ==================== Configuration Fixtures ====================

@pytest.fixture
def test_config(tmp_path):
    """TestingConfig writing into a temporary directory."""
    return TestingConfig(
        SEQUENCE_CACHE_DIR=str(tmp_path / 'sequences'),
        OUTPUT_PATH=str(tmp_path / 'results.csv'),
    )


@pytest.fixture
def cache_dir(tmp_path):
    path = tmp_path / 'sequences'
    path.mkdir()
    return str(path)


@pytest.fixture
def output_path(tmp_path):
    return str(tmp_path / 'results.csv')


# ==================== Randomness Fixtures ====================

@pytest.fixture
def rng():
    """Seeded generator so every test run sees the same draws."""
    return np.random.default_rng(20240601)


@pytest.fixture
def rng_factory():
    def create(seed: int = 0) -> np.random.Generator:
        return np.random.default_rng(seed)
    return create


# ==================== Sequence Fixtures ====================

@pytest.fixture
def canonical_sequences():
    """Canonical verified sequences keyed by block length."""
    def create(*ells: int):
        return {ell: canonical_sequence(ell, limit=16) for ell in ells}
    return create


# ==================== Storage Fixtures ====================

@dataclass
class BlockSetup:
    """One block of the storage algorithm prepared against a known target."""

    z: BitString
    x: BitString
    y: BitString
    kappa: int
    frame: StorageFrame
    sigma: SigmaMap
    y_b: BitString
    s: BitString
    seq: DistinguishingSequence
    deltas: List[int]


def prepare_block(n: int, kappa: int, m: int, rng: np.random.Generator, seq=None) -> BlockSetup:
    """Run the storage steps of one block from x, y = complement(x) with fitness from z."""
    z = BitString.random(n, rng)
    x = BitString.random(n, rng)
    y = x.complement()
    ell = 1 << kappa
    frame = build_frame(x, y, ell, m, rng)
    sigma = build_sigma(frame)
    y_b = make_block_reference(x, frame.levels, frame.block_len, m)
    seq = seq or canonical_sequence(frame.block_len, limit=16)

    contribution = (onemax(x, z) + onemax(y_b, z) - frame.block_len) // 2
    addresses = IndexSet(1 << m, frozenset(range(1, frame.block_len + 1)))
    deltas = [onemax(write(WriteRequest(r, addresses), x, frame, sigma=sigma), z) - contribution
              for r in seq.strings]
    s = x
    for i, delta in enumerate(deltas, start=1):
        s = store_delta(delta, i, kappa, s, frame, sigma=sigma)
    return BlockSetup(z, x, y, kappa, frame, sigma, y_b, s, seq, deltas)


@pytest.fixture
def block_factory():
    """Factory for prepared blocks; see prepare_block."""
    return prepare_block


@pytest.fixture
def small_frame(rng):
    """A refined frame at n=8, ell=2, m=3."""
    x = BitString.random(8, rng)
    return build_frame(x, x.complement(), 2, 3, rng)


@pytest.fixture
def wide_frame(rng):
    """A refined frame at n=16, ell=2, m=3; half the positions lie outside the storage."""
    x = BitString.random(16, rng)
    return build_frame(x, x.complement(), 2, 3, rng)

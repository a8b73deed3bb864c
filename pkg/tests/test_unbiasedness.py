#!/usr/bin/env python3
"""
Unbiasedness Tests
Every variation operator commutes with Hamming automorphisms: deterministic operators
exhaustively on small n, randomized ones by equality of their support sets.
"""

from collections import Counter

import numpy as np
import pytest

from bitstring import Automorphism, BitString
from distinguishing import canonical_sequence
from operators import (
    OperatorSpec, StorageFrame, WriteRequest, build_frame, check_equivariance, complement,
    consistent_support, choose_consistent, enumerate_support, find_storage, flip_first_position,
    in_refine_support, in_storage_support, make_block_reference, record_addresses, refine_storage,
    update_y, write,
)


def partial_pair(n, differing, rng):
    x = BitString.random(n, rng)
    mask = np.zeros(n, dtype=bool)
    mask[rng.choice(n, differing, replace=False)] = True
    return x, x.flip_positions(mask)


def storage_spec(ell, m, rng):
    return OperatorSpec(
        'find_storage',
        sample=lambda x, y: find_storage(x, y, ell, m, rng),
        support=lambda x, y: enumerate_support(lambda w: in_storage_support(w, x, y, ell, m), len(x)),
    )


def refine_spec(m, block_len, rng):
    return OperatorSpec(
        'refine_storage',
        sample=lambda x, y, *levels: refine_storage(x, y, levels, m, block_len, rng),
        support=lambda x, y, *levels: enumerate_support(
            lambda w: in_refine_support(w, x, y, levels, m, block_len), len(x)),
    )


@pytest.mark.unit
class TestDeterministicOperators:
    """Exhaustive checks over all n! 2^n automorphisms."""

    def test_complement(self, rng):
        spec = OperatorSpec('complement', complement)
        report = check_equivariance(spec, [BitString.random(5, rng)], exhaustive=True)
        assert report.passed
        assert report.checked == 120 * 32

    def test_update_y(self, rng):
        inputs = [BitString.random(5, rng) for _ in range(4)]
        assert check_equivariance(OperatorSpec('update_y', update_y), inputs, exhaustive=True).passed

    def test_make_block_reference(self, rng):
        x = BitString.random(5, rng)
        frame = build_frame(x, x.complement(), 2, 2, rng)
        spec = OperatorSpec('make_block_reference',
                            lambda x, *levels: make_block_reference(x, levels, frame.block_len, 2))
        assert check_equivariance(spec, (x,) + frame.levels, exhaustive=True).passed

    def test_write(self, rng):
        x, y = partial_pair(5, 3, rng)
        frame = build_frame(x, y, 2, 2, rng)
        req = WriteRequest(BitString.from_string('10'), record_addresses(1, 1, 2))

        def op(x, y, *rest):
            return write(req, rest[-1], StorageFrame(x, y, 2, frame.block_len, rest[:-1]))

        w = BitString.random(5, rng)
        assert check_equivariance(OperatorSpec('write', op), (x, y) + frame.levels + (w,), exhaustive=True).passed

    @pytest.mark.slow
    def test_write_six(self, rng):
        x, y = partial_pair(6, 4, rng)
        frame = build_frame(x, y, 3, 2, rng)
        req = WriteRequest(BitString.from_string('011'), record_addresses(1, 2, 2))

        def op(x, y, *rest):
            return write(req, rest[-1], StorageFrame(x, y, 2, frame.block_len, rest[:-1]))

        assert check_equivariance(OperatorSpec('write', op), (x, y) + frame.levels + (x,), exhaustive=True).passed


@pytest.mark.unit
class TestRandomizedOperators:
    """Support equality under random automorphisms."""

    @pytest.mark.parametrize('differing', [6, 3, 1])
    def test_find_storage(self, rng, differing):
        x, y = partial_pair(6, differing, rng)
        report = check_equivariance(storage_spec(2, 2, rng), (x, y), trials=200, rng=rng)
        assert report.passed
        assert report.checked == 200

    @pytest.mark.parametrize('differing,ell', [(6, 2), (2, 2), (6, 3)])
    def test_refine_storage_every_depth(self, rng, differing, ell):
        x, y = partial_pair(6, differing, rng)
        frame = build_frame(x, y, ell, 2, rng)
        for depth in range(2):
            spec = refine_spec(2, frame.block_len, rng)
            report = check_equivariance(spec, (x, y) + frame.levels[:depth + 1], trials=200, rng=rng)
            assert report.passed, f"depth {depth}: {report.counterexample}"

    @pytest.mark.parametrize('strings', [3, 1])
    def test_choose_consistent(self, rng, block_factory, strings):
        seq = canonical_sequence(2)
        seq = type(seq)(2, seq.strings[:strings])
        block = block_factory(8, 1, 3, rng, seq)
        m, block_len = block.frame.m, block.frame.block_len

        def unpack(x, y, *rest):
            levels, y_b, s = rest[:-2], rest[-2], rest[-1]
            return StorageFrame(x, y, m, block_len, levels), y_b, s

        def sample(*inputs):
            frame, y_b, s = unpack(*inputs)
            return choose_consistent(frame, y_b, s, seq, rng, 1).q

        def support(*inputs):
            frame, y_b, s = unpack(*inputs)
            return consistent_support(frame, y_b, s, seq, 1)

        inputs = (block.x, block.y) + block.frame.levels + (block.y_b, block.s)
        report = check_equivariance(OperatorSpec('choose_consistent', sample, support), inputs, trials=200, rng=rng)
        assert report.passed

    def test_samples_lie_in_support(self, rng):
        x, y = partial_pair(6, 4, rng)
        spec = storage_spec(2, 2, rng)
        support = spec.support(x, y)
        assert all(spec.sample(x, y) in support for _ in range(100))

    def test_find_storage_covers_support(self, rng):
        x = BitString.random(6, rng)
        y = x.complement()
        support = enumerate_support(lambda w: in_storage_support(w, x, y, 2, 2), 6)
        assert len(support) == 15
        counts = Counter(find_storage(x, y, 2, 2, rng) for _ in range(900))
        assert set(counts) == support
        # 60 expected per member; a skewed sampler drifts far from it
        assert max(counts.values()) < 120
        assert min(counts.values()) > 20


@pytest.mark.unit
class TestPlantedMutants:
    """The harness must catch biased operators."""

    def test_position_dependent_mutant_fails(self, rng):
        spec = OperatorSpec('flip_first_position', flip_first_position)
        report = check_equivariance(spec, [BitString.random(4, rng)], exhaustive=True)
        assert not report.passed
        assert report.counterexample is not None
        assert report.counterexample.expected != report.counterexample.actual

    def test_biased_support_fails(self, rng):
        x, y = partial_pair(6, 6, rng)

        def support(x, y):
            return enumerate_support(lambda w: in_storage_support(w, x, y, 2, 2) and w.bit(1) != x.bit(1), 6)

        spec = OperatorSpec('pinned_storage', lambda x, y: find_storage(x, y, 2, 2, rng), support)
        assert not check_equivariance(spec, (x, y), trials=200, rng=rng).passed

    def test_explicit_automorphisms(self, rng):
        x = BitString.random(4, rng)
        identity = [Automorphism.identity(4)]
        report = check_equivariance(OperatorSpec('flip_first_position', flip_first_position), [x],
                                    automorphisms=identity)
        assert report.passed
        assert report.checked == 1

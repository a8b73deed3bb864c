#!/usr/bin/env python3
"""
Oracle tests: query counting, first-hitting time and history retention.
"""

import pytest

from bitstring import BitString, RejectedInputError
from oracle import make_oracle, reveal_target


@pytest.mark.unit
class TestFitnessOracle:

    def test_counts_and_first_hit(self):
        z = BitString.from_string('1010')
        oracle = make_oracle(target=z)
        assert oracle.query(BitString.from_string('0000')) == 2
        assert oracle.query(z) == 4
        assert oracle.query(z) == 4
        assert oracle.count == 3
        assert oracle.first_hit == 2

    def test_no_hit(self):
        oracle = make_oracle(target=BitString.ones(3))
        oracle.query(BitString.zeros(3))
        assert oracle.first_hit is None

    def test_rejects_wrong_length(self):
        oracle = make_oracle(target=BitString.ones(3))
        with pytest.raises(RejectedInputError):
            oracle.query(BitString.ones(4))
        assert oracle.count == 0

    def test_full_history(self):
        z = BitString.from_string('110')
        oracle = make_oracle(target=z, retention='full')
        oracle.query(BitString.from_string('000'))
        oracle.query(z)
        ledger = oracle.report()
        assert ledger.fitness_trace() == [1, 3]
        assert ledger.history[1][0] == z

    def test_count_retention_keeps_no_history(self):
        oracle = make_oracle(target=BitString.ones(3), retention='count')
        oracle.query(BitString.zeros(3))
        ledger = oracle.report()
        assert ledger.count == 1
        assert ledger.history == ()

    def test_unknown_retention(self):
        with pytest.raises(ValueError):
            make_oracle(target=BitString.ones(3), retention='some')

    def test_seeded_targets(self):
        a = reveal_target(make_oracle(seed=7, n=64))
        b = reveal_target(make_oracle(seed=7, n=64))
        c = reveal_target(make_oracle(seed=8, n=64))
        assert a == b
        assert a != c

    def test_seed_pairs_do_not_collide(self):
        collisions = sum(
            reveal_target(make_oracle(seed=2 * i, n=32)) == reveal_target(make_oracle(seed=2 * i + 1, n=32))
            for i in range(100)
        )
        assert collisions == 0

    def test_seed_needs_length(self):
        with pytest.raises(ValueError):
            make_oracle(seed=1)
        with pytest.raises(ValueError):
            make_oracle(seed=1, n=0)

    def test_target_not_exposed(self):
        oracle = make_oracle(target=BitString.ones(3))
        assert not any('target' in name and not name.startswith('_') for name in vars(oracle))

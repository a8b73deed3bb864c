#!/usr/bin/env python3
"""
Bit-string and automorphism tests.
Covers parsing, OneMax evaluation, automorphism algebra and the binary-value bijection.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bitstring import (
    Automorphism, BitString, IndexSet, RejectedInputError, agreement_and_disagreement,
    all_automorphisms, binary_value, binary_value_inverse, from_int, onemax, to_int,
    truncated_inverse,
)


def bit_strings(min_size=1, max_size=24):
    return st.lists(st.integers(0, 1), min_size=min_size, max_size=max_size).map(BitString)


@st.composite
def automorphism_and_strings(draw, count=2):
    n = draw(st.integers(1, 12))
    perm = draw(st.permutations(list(range(1, n + 1))))
    shift = BitString(draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)))
    strings = [BitString(draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))) for _ in range(count)]
    return Automorphism(perm, shift), strings


@pytest.mark.unit
class TestBitString:
    """Construction and value semantics."""

    def test_from_string(self):
        x = BitString.from_string('1011')
        assert len(x) == 4
        assert [x.bit(j) for j in range(1, 5)] == [1, 0, 1, 1]
        assert str(x) == '1011'

    @pytest.mark.parametrize('text', ['', '10a1', '2'])
    def test_from_string_rejects_garbage(self, text):
        with pytest.raises(RejectedInputError):
            BitString.from_string(text)

    def test_unit_vector(self):
        assert str(BitString.unit(3, 5)) == '00100'
        with pytest.raises(RejectedInputError):
            BitString.unit(6, 5)

    def test_from_positions(self):
        assert str(BitString.from_positions([1, 4], 5)) == '10010'
        with pytest.raises(RejectedInputError):
            BitString.from_positions([0], 5)

    def test_immutable_array(self):
        x = BitString.zeros(4)
        with pytest.raises(ValueError):
            x.array[0] = 1

    def test_equality_and_hash(self):
        a = BitString.from_string('0110')
        b = BitString([0, 1, 1, 0])
        assert a == b
        assert len({a, b}) == 1

    def test_xor_length_mismatch(self):
        with pytest.raises(RejectedInputError):
            BitString.zeros(3) ^ BitString.zeros(4)

    def test_all_strings_order(self):
        strings = [str(s) for s in BitString.all_strings(2)]
        assert strings == ['00', '01', '10', '11']


@pytest.mark.unit
class TestOneMax:

    def test_counts_agreements(self):
        assert onemax(BitString.from_string('1100'), BitString.from_string('1010')) == 2
        assert onemax(BitString.ones(6), BitString.ones(6)) == 6

    def test_length_mismatch(self):
        with pytest.raises(RejectedInputError):
            onemax(BitString.zeros(3), BitString.zeros(5))

    def test_agreement_partition(self):
        x = BitString.from_string('10110')
        y = BitString.from_string('00111')
        agree, differ = agreement_and_disagreement(x, y)
        assert differ.sorted() == (1, 5)
        assert agree.sorted() == (2, 3, 4)


@pytest.mark.unit
class TestIndexSet:

    def test_mask_round_trip(self):
        s = IndexSet(6, frozenset({2, 5}))
        assert IndexSet.from_mask(s.mask()) == s
        assert 5 in s and 1 not in s

    def test_rejects_out_of_range(self):
        with pytest.raises(RejectedInputError):
            IndexSet(4, frozenset({5}))


@pytest.mark.unit
class TestAutomorphism:

    def test_shift_then_permute(self):
        # pi(j) = perm[j-1]; alpha(x)_j = (x XOR v)_{pi(j)}
        alpha = Automorphism([2, 3, 1], BitString.from_string('100'))
        assert str(alpha(BitString.from_string('000'))) == '001'

    def test_identity(self):
        x = BitString.from_string('10011')
        assert Automorphism.identity(5)(x) == x

    def test_rejects_non_bijection(self):
        with pytest.raises(RejectedInputError):
            Automorphism([1, 1, 2], BitString.zeros(3))

    def test_exhaustive_count(self):
        assert sum(1 for _ in all_automorphisms(3)) == 6 * 8

    def test_map_index_tracks_positions(self, rng):
        alpha = Automorphism.random(7, rng)
        moved = alpha(BitString.unit(4, 7))
        assert moved.bit(alpha.map_index(4)) == 1 ^ alpha.shift.bit(4)
        assert alpha.map_positions([4]) == frozenset({alpha.map_index(4)})

    @pytest.mark.property
    @given(automorphism_and_strings(count=2))
    def test_preserves_onemax(self, case):
        alpha, (x, z) = case
        assert onemax(alpha(x), alpha(z)) == onemax(x, z)

    @pytest.mark.property
    @given(automorphism_and_strings(count=1))
    def test_inverse(self, case):
        alpha, (x,) = case
        assert alpha.inverse()(alpha(x)) == x

    @pytest.mark.property
    @settings(max_examples=50)
    @given(st.data())
    def test_compose(self, data):
        n = data.draw(st.integers(1, 10))
        rng = np.random.default_rng(data.draw(st.integers(0, 2 ** 32 - 1)))
        a, b = Automorphism.random(n, rng), Automorphism.random(n, rng)
        x = BitString.random(n, rng)
        assert a.compose(b)(x) == a(b(x))


@pytest.mark.unit
class TestBinaryValue:

    def test_most_significant_first(self):
        assert binary_value(BitString.from_string('110')) == 6
        assert str(binary_value_inverse(5, 4)) == '0101'

    def test_inverse_rejects_overflow(self):
        with pytest.raises(RejectedInputError):
            binary_value_inverse(8, 3)

    def test_truncated_inverse(self):
        assert str(truncated_inverse(3, 2)) == '11'
        assert str(truncated_inverse(4, 3)) == '100'
        with pytest.raises(RejectedInputError):
            truncated_inverse(4, 2)

    @pytest.mark.property
    @given(bit_strings(max_size=40))
    def test_int_bijection(self, x):
        assert from_int(to_int(x), len(x)) == x

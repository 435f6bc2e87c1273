import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fedsplit.errors import DimensionError
from fedsplit.vectors import (PartitionMask, add_scaled, l2_norm, merge, split)


def mask(indices, dim):
    return PartitionMask(he_indices=np.array(indices, dtype=np.int64), dim=dim)


class TestSplit:
    def test_basic(self):
        parts = split(np.array([1.0, 2.0, 3.0, 4.0]), mask([1, 3], 4))
        assert parts.dp_part.tolist() == [1.0, 3.0]
        assert parts.he_part.tolist() == [2.0, 4.0]

    def test_empty_mask_identity(self):
        parts = split(np.array([5.0]), mask([], 1))
        assert parts.dp_part.tolist() == [5.0]
        assert parts.he_part.tolist() == []

    def test_signed_values(self):
        parts = split(np.array([0.1, -5.0, 0.2, 3.0]), mask([1, 3], 4))
        assert parts.he_part.tolist() == [-5.0, 3.0]
        assert parts.dp_part.tolist() == [0.1, 0.2]

    def test_dim_mismatch_rejected(self):
        with pytest.raises(DimensionError):
            split(np.array([1.0, 2.0]), mask([0], 3))


class TestMerge:
    def test_inverse_of_split(self):
        out = merge([1.0, 3.0], [2.0, 4.0], mask([1, 3], 4))
        assert out.tolist() == [1.0, 2.0, 3.0, 4.0]

    def test_all_he(self):
        assert merge([], [7.0, 8.0], mask([0, 1], 2)).tolist() == [7.0, 8.0]

    def test_all_dp(self):
        assert merge([9.0], [], mask([], 1)).tolist() == [9.0]

    def test_length_inconsistency_rejected(self):
        with pytest.raises(DimensionError):
            merge([1.0], [2.0, 4.0], mask([1], 3))
        with pytest.raises(DimensionError):
            merge([1.0, 2.0], [3.0], mask([0], 2))


class TestNormAndAxpy:
    def test_l2_345(self):
        assert l2_norm([3.0, 4.0]) == 5.0

    def test_l2_zero(self):
        assert l2_norm([0.0, 0.0, 0.0]) == 0.0

    def test_l2_ones(self):
        assert l2_norm([1.0, 1.0, 1.0, 1.0]) == 2.0

    def test_add_scaled(self):
        assert add_scaled([1.0, 1.0], [2.0, 2.0], 0.5).tolist() == [2.0, 2.0]
        assert add_scaled([1.0], [1.0], 0.0).tolist() == [1.0]
        assert add_scaled([0.0, 0.0], [3.0, -3.0], 1.0).tolist() == [3.0, -3.0]

    def test_add_scaled_mismatch(self):
        with pytest.raises(DimensionError):
            add_scaled([1.0], [1.0, 2.0], 1.0)


class TestMaskValidation:
    def test_out_of_range_rejected(self):
        with pytest.raises(DimensionError):
            mask([0, 5], 4)

    def test_unsorted_rejected(self):
        with pytest.raises(ValueError):
            mask([3, 1], 4)

    def test_duplicates_rejected(self):
        with pytest.raises(ValueError):
            mask([1, 1], 4)

    def test_from_indices_sorts(self):
        m = PartitionMask.from_indices([3, 1], 4)
        assert m.he_indices.tolist() == [1, 3]


@st.composite
def vector_and_mask(draw):
    dim = draw(st.integers(min_value=1, max_value=64))
    values = draw(st.lists(
        st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
        min_size=dim, max_size=dim))
    k = draw(st.integers(min_value=0, max_value=dim))
    indices = draw(st.permutations(range(dim)))[:k]
    return np.array(values), PartitionMask.from_indices(indices, dim)


@given(vector_and_mask())
@settings(max_examples=200, deadline=None)
def test_roundtrip_exact(data):
    u, m = data
    parts = split(u, m)
    assert np.array_equal(merge(parts.dp_part, parts.he_part, m), u)


@given(vector_and_mask())
@settings(max_examples=200, deadline=None)
def test_partition_completeness(data):
    u, m = data
    parts = split(u, m)
    assert parts.dp_part.size + parts.he_part.size == m.dim
    he = set(m.he_indices.tolist())
    dp = set(m.complement().tolist())
    assert he.isdisjoint(dp)
    assert he | dp == set(range(m.dim))


@given(vector_and_mask())
@settings(max_examples=200, deadline=None)
def test_norm_consistency(data):
    u, m = data
    parts = split(u, m)
    total = l2_norm(u) ** 2
    parts_sq = l2_norm(parts.dp_part) ** 2 + l2_norm(parts.he_part) ** 2
    assert parts_sq == pytest.approx(total, rel=1e-12, abs=1e-300)

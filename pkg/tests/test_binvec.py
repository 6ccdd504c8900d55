import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binae.binvec import (
    BinaryVector,
    WeightMatrix,
    hamming,
    make_rng,
    overlaps,
    pack_bits,
    random_binary_vector,
    random_rows,
    random_weight_matrix,
    transpose_overlaps,
    unpack_bits,
)

bit_lists = st.lists(st.integers(0, 1), min_size=0, max_size=200)


@given(bit_lists)
def test_pack_roundtrip(bits):
    arr = np.array(bits, dtype=np.uint8)
    assert np.array_equal(unpack_bits(pack_bits(arr), len(bits)), arr)


@given(bit_lists)
def test_vector_matches_dense_oracle(bits):
    v = BinaryVector.from_bits(np.array(bits, dtype=np.uint8))
    assert v.ones == sum(bits)
    assert list(v.to_array()) == bits
    assert str(v) == "".join(map(str, bits))
    assert list(v.indices()) == [i for i, b in enumerate(bits) if b]


@given(st.integers(1, 150).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 1), min_size=n, max_size=n),
    st.lists(st.integers(0, 1), min_size=n, max_size=n))))
def test_bitwise_ops_and_hamming(pair):
    a, b = (np.array(p, dtype=np.uint8) for p in pair)
    va, vb = BinaryVector.from_bits(a), BinaryVector.from_bits(b)
    assert np.array_equal((va & vb).to_array(), a & b)
    assert np.array_equal((va | vb).to_array(), a | b)
    assert np.array_equal((va ^ vb).to_array(), a ^ b)
    assert hamming(va, vb) == int((a != b).sum())


@given(st.integers(0, 2**70 - 1))
def test_int_roundtrip(code):
    v = BinaryVector.from_int(code, 70)
    assert v.to_int() == code
    assert v.ones == bin(code).count("1")


def test_bit_order_is_little_endian():
    v = BinaryVector.from_string("1000000001")
    assert v.to_int() == 1 + (1 << 9)
    assert int(v.words[0]) == 1 + (1 << 9)


def test_equality_and_hash():
    a = BinaryVector.from_string("0110")
    b = BinaryVector.from_indices(4, [1, 2])
    assert a == b and hash(a) == hash(b)
    assert a != BinaryVector.from_string("01100")
    assert len({a, b}) == 1


def test_validation():
    with pytest.raises(ValueError):
        BinaryVector(np.array([1 << 5], dtype=np.uint64), 4)  # stray bit past the length
    with pytest.raises(ValueError):
        BinaryVector.from_bits(np.array([0, 2]))
    with pytest.raises(ValueError):
        BinaryVector.from_indices(3, [3])
    with pytest.raises(ValueError):
        BinaryVector.from_string("01") & BinaryVector.from_string("011")
    with pytest.raises(ValueError):
        BinaryVector.from_int(8, 3)


def test_words_are_read_only():
    v = BinaryVector.from_string("101")
    with pytest.raises(ValueError):
        v.words[0] = 0


def test_weight_matrix_masks_and_products():
    rng = make_rng(3)
    dense = (rng.random((9, 13)) < 0.4).astype(np.uint8)
    w = WeightMatrix(dense)
    x = BinaryVector.from_bits((rng.random(13) < 0.5).astype(np.uint8))
    y = BinaryVector.from_bits((rng.random(9) < 0.5).astype(np.uint8))
    assert np.array_equal(overlaps(w, x), dense @ x.to_array())
    assert np.array_equal(transpose_overlaps(w, y), dense.T @ y.to_array())
    assert np.array_equal(unpack_bits(w.row_masks()[:, None], 13), dense)
    assert np.array_equal(unpack_bits(w.column_masks()[:, None], 9), dense.T)
    assert w.transpose().transpose() == w
    assert w.row(2).to_array().tolist() == dense[2].tolist()
    with pytest.raises(ValueError):
        overlaps(w, y)


@settings(max_examples=30)
@given(st.integers(1, 40), st.integers(1, 90), st.data())
def test_random_rows_have_exact_weight(n, length, data):
    ones = data.draw(st.integers(0, length))
    rows = random_rows(make_rng(n, length), n, length, ones)
    assert (rows.sum(axis=1) == ones).all()


def test_seeded_streams_are_reproducible_and_distinct():
    a = random_weight_matrix(30, 20, 7, make_rng(1, 2))
    b = random_weight_matrix(30, 20, 7, make_rng(1, 2))
    c = random_weight_matrix(30, 20, 7, make_rng(1, 3))
    assert a == b and a != c
    assert random_binary_vector(50, 20, 4) == random_binary_vector(50, 20, 4)


def test_bernoulli_weights_match_density_on_average():
    w = random_weight_matrix(400, 50, 30, 0, bernoulli=True)
    assert abs(w.row_ones().mean() - 30) < 0.5
    assert w.row_ones().std() > 0

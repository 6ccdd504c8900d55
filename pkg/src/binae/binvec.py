"""Bit-packed binary vectors and binary weight matrices.

Vectors are stored little-endian in 64-bit words: position ``i`` lives in
word ``i // 64`` at bit ``i % 64``. Bits past ``length`` are always zero,
so two vectors compare equal exactly when their words do.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from . import kernels

WORD_BITS = 64


def make_rng(seed=None, *stream: int) -> np.random.Generator:
    """PCG64 generator keyed by ``(seed, *stream)``.

    Each distinct key gets an independent substream via ``SeedSequence``, so
    trial ``i`` of an experiment draws the same numbers no matter which
    worker runs it. A ``Generator`` passed as ``seed`` is returned as is.
    """
    if isinstance(seed, np.random.Generator):
        if stream:
            raise ValueError("cannot derive a substream from a Generator")
        return seed
    if seed is None:
        return np.random.default_rng()
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), *map(int, stream)])))


def n_words(length: int) -> int:
    return max(1, -(-length // WORD_BITS))


def pack_bits(bits) -> np.ndarray:
    """Pack a ``(..., n)`` array of {0,1} into ``(..., n_words)`` uint64."""
    bits = np.asarray(bits)
    n = bits.shape[-1]
    pad = n_words(n) * WORD_BITS - n
    if pad:
        bits = np.concatenate([bits, np.zeros(bits.shape[:-1] + (pad,), dtype=bits.dtype)], axis=-1)
    packed = np.packbits(bits.astype(bool), axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64)


def unpack_bits(words, length: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype="<u8")
    bits = np.unpackbits(words.view(np.uint8), axis=-1, bitorder="little")
    return bits[..., :length]


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class BinaryVector:
    """Immutable {0,1} vector of fixed length with a cached popcount."""

    __slots__ = ("length", "words", "ones")

    def __init__(self, words, length: int):
        words = np.array(words, dtype=np.uint64).reshape(-1)
        if length < 0:
            raise ValueError("length must be non-negative")
        if words.shape[0] != n_words(length):
            raise ValueError(f"expected {n_words(length)} words for length {length}, got {words.shape[0]}")
        tail = length % WORD_BITS
        if length == 0:
            ok = words[0] == 0
        elif tail:
            ok = (int(words[-1]) >> tail) == 0
        else:
            ok = True
        if not ok:
            raise ValueError("bits set beyond vector length")
        self.length = int(length)
        self.words = _readonly(words)
        self.ones = int(kernels.and_popcount_rows(words[None, :], words)[0])

    @classmethod
    def from_bits(cls, bits) -> "BinaryVector":
        bits = np.asarray(bits)
        if bits.ndim != 1:
            raise ValueError("expected a 1-d array of bits")
        if bits.size and not np.isin(bits, (0, 1)).all():
            raise ValueError("bits must be 0 or 1")
        return cls(pack_bits(bits), bits.shape[0])

    @classmethod
    def from_string(cls, s: str) -> "BinaryVector":
        return cls.from_bits(np.array([int(c) for c in s], dtype=np.uint8))

    @classmethod
    def from_indices(cls, length: int, indices: Iterable[int]) -> "BinaryVector":
        bits = np.zeros(length, dtype=np.uint8)
        idx = np.fromiter(indices, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= length):
            raise ValueError("index out of range")
        bits[idx] = 1
        return cls.from_bits(bits)

    @classmethod
    def from_int(cls, code: int, length: int) -> "BinaryVector":
        if code < 0 or code >> length:
            raise ValueError("code does not fit in length bits")
        words = [(code >> (WORD_BITS * i)) & (2**WORD_BITS - 1) for i in range(n_words(length))]
        return cls(np.array(words, dtype=np.uint64), length)

    @classmethod
    def zeros(cls, length: int) -> "BinaryVector":
        return cls(np.zeros(n_words(length), dtype=np.uint64), length)

    def to_array(self) -> np.ndarray:
        return unpack_bits(self.words, self.length)

    def to_int(self) -> int:
        return sum(int(w) << (WORD_BITS * i) for i, w in enumerate(self.words))

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.to_array())

    def _check(self, other: "BinaryVector") -> None:
        if not isinstance(other, BinaryVector):
            raise TypeError("expected a BinaryVector")
        if other.length != self.length:
            raise ValueError(f"length mismatch: {self.length} != {other.length}")

    def __and__(self, other):
        self._check(other)
        return BinaryVector(self.words & other.words, self.length)

    def __or__(self, other):
        self._check(other)
        return BinaryVector(self.words | other.words, self.length)

    def __xor__(self, other):
        self._check(other)
        return BinaryVector(self.words ^ other.words, self.length)

    def __len__(self) -> int:
        return self.length

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryVector):
            return NotImplemented
        return self.length == other.length and bool(np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.length, self.words.tobytes()))

    def __str__(self) -> str:
        return "".join(map(str, self.to_array()))

    def __repr__(self) -> str:
        if self.length <= 64:
            return f"BinaryVector('{self}')"
        return f"BinaryVector(length={self.length}, ones={self.ones})"


class WeightMatrix:
    """Immutable ``n_rows x n_cols`` binary matrix.

    Keeps both the packed rows (for popcount kernels) and a dense uint8 copy
    (for column sums).
    """

    __slots__ = ("n_rows", "n_cols", "words", "dense")

    def __init__(self, dense):
        dense = np.array(dense, dtype=np.uint8)
        if dense.ndim != 2 or dense.shape[0] < 1 or dense.shape[1] < 1:
            raise ValueError("weight matrix needs at least one row and one column")
        if not np.isin(dense, (0, 1)).all():
            raise ValueError("weights must be 0 or 1")
        self.n_rows, self.n_cols = dense.shape
        self.dense = _readonly(dense)
        self.words = _readonly(np.ascontiguousarray(pack_bits(dense)))

    @classmethod
    def from_rows(cls, rows: Iterable[BinaryVector]) -> "WeightMatrix":
        return cls(np.stack([r.to_array() for r in rows]))

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.n_cols

    @property
    def rows(self) -> list[BinaryVector]:
        return [self.row(i) for i in range(self.n_rows)]

    def row(self, i: int) -> BinaryVector:
        return BinaryVector(self.words[i].copy(), self.n_cols)

    def row_ones(self) -> np.ndarray:
        return self.dense.sum(axis=1, dtype=np.int64)

    def transpose(self) -> "WeightMatrix":
        return WeightMatrix(self.dense.T)

    def row_masks(self) -> np.ndarray:
        """Each row as one uint64 mask over columns (``n_cols <= 64``)."""
        if self.n_cols > WORD_BITS:
            raise ValueError("row masks need n_cols <= 64")
        return np.ascontiguousarray(self.words[:, 0])

    def column_masks(self) -> np.ndarray:
        """Each column as one uint64 mask over rows (``n_rows <= 64``)."""
        if self.n_rows > WORD_BITS:
            raise ValueError("column masks need n_rows <= 64")
        return np.ascontiguousarray(pack_bits(self.dense.T)[:, 0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.dense, other.dense))

    def __hash__(self) -> int:
        return hash((self.shape, self.dense.tobytes()))

    def __repr__(self) -> str:
        return f"WeightMatrix({self.n_rows}x{self.n_cols})"


def random_rows(rng: np.random.Generator, n: int, length: int, ones: int) -> np.ndarray:
    """``n`` dense rows, each with exactly ``ones`` uniformly placed set bits."""
    if not 0 <= ones <= length:
        raise ValueError(f"need 0 <= ones <= length, got ones={ones}, length={length}")
    out = np.zeros((n, length), dtype=np.uint8)
    if ones:
        keys = rng.random((n, length))
        idx = np.argpartition(keys, ones - 1, axis=1)[:, :ones] if ones < length else None
        if idx is None:
            out[:] = 1
        else:
            np.put_along_axis(out, idx, 1, axis=1)
    return out


def random_binary_vector(length: int, ones: int, seed=None) -> BinaryVector:
    return BinaryVector.from_bits(random_rows(make_rng(seed), 1, length, ones)[0])


def random_weight_matrix(n_rows: int, n_cols: int, a_w: int, seed=None, *, bernoulli: bool = False) -> WeightMatrix:
    """Random weights with exactly ``a_w`` ones per row.

    With ``bernoulli=True`` every entry is instead an independent
    Bernoulli(a_w / n_cols) draw, which matches the density only on average.
    """
    if n_rows < 1 or n_cols < 1:
        raise ValueError("n_rows and n_cols must be >= 1")
    if not 0 <= a_w <= n_cols:
        raise ValueError(f"need 0 <= a_w <= n_cols, got a_w={a_w}, n_cols={n_cols}")
    rng = make_rng(seed)
    if bernoulli:
        return WeightMatrix((rng.random((n_rows, n_cols)) < a_w / n_cols).astype(np.uint8))
    return WeightMatrix(random_rows(rng, n_rows, n_cols, a_w))


def hamming(x: BinaryVector, y: BinaryVector) -> int:
    x._check(y)
    return int(kernels.xor_popcount_rows(x.words[None, :], y.words)[0])


def overlaps(w: WeightMatrix, x: BinaryVector) -> np.ndarray:
    """``z = w x``: popcount of each row AND ``x``."""
    if w.n_cols != x.length:
        raise ValueError(f"dimension mismatch: matrix has {w.n_cols} columns, vector length {x.length}")
    return kernels.and_popcount_rows(w.words, x.words)


def transpose_overlaps(w: WeightMatrix, y: BinaryVector) -> np.ndarray:
    """``v = w^T y``: column sums of the rows selected by ``y``."""
    if w.n_rows != y.length:
        raise ValueError(f"dimension mismatch: matrix has {w.n_rows} rows, vector length {y.length}")
    return w.dense[y.indices()].sum(axis=0, dtype=np.int64)

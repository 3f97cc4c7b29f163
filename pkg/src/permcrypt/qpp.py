"""Permutation-pad symmetric cipher over n-bit blocks.

A pad is an ordered list of secret bijections on [0, 2**n).  Encryption
XOR-masks each block with keystream bits, dispatches it to one of the pad's
permutations, and substitutes through its table; decryption inverts the two
layers in reverse order.  An affine variant trades the full permutation
key space for a compact arithmetic form.
"""

from __future__ import annotations

import math
from functools import cached_property

from .errors import FormatError, ParameterError
from .keystream import TAG_QPP_DISPATCH, TAG_QPP_PAD, TAG_QPP_PRERAND, KeystreamState

MIN_BLOCK_BITS = 1
MAX_BLOCK_BITS = 16

MODE_RANDOM = "random"
MODE_SEQUENTIAL = "sequential"
_MODES = (MODE_RANDOM, MODE_SEQUENTIAL)


class Permutation:
    """Bijection on [0, 2**n) stored as a lookup table."""

    def __init__(self, n: int, table):
        if not MIN_BLOCK_BITS <= n <= MAX_BLOCK_BITS:
            raise ParameterError(f"block size must be in [1, {MAX_BLOCK_BITS}] bits")
        table = tuple(table)
        if sorted(table) != list(range(1 << n)):
            raise ParameterError("table is not a bijection on the block range")
        self.n = n
        self.table = table

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(n, range(1 << n))

    @cached_property
    def _inverse_table(self) -> tuple:
        inv = [0] * len(self.table)
        for m, c in enumerate(self.table):
            inv[c] = m
        return tuple(inv)

    def apply(self, m: int) -> int:
        if not 0 <= m < len(self.table):
            raise ParameterError("block out of range")
        return self.table[m]

    def invert(self, c: int) -> int:
        if not 0 <= c < len(self.table):
            raise ParameterError("block out of range")
        return self._inverse_table[c]

    def inverse(self) -> "Permutation":
        return Permutation(self.n, self._inverse_table)

    def compose(self, other: "Permutation") -> "Permutation":
        """Permutation applying `other` first, then self."""
        if self.n != other.n:
            raise ParameterError("cannot compose permutations of different sizes")
        return Permutation(self.n, tuple(self.table[v] for v in other.table))

    def __eq__(self, other):
        return (
            isinstance(other, Permutation)
            and self.n == other.n
            and self.table == other.table
        )

    def __hash__(self):
        return hash((self.n, self.table))


class PermutationPad:
    """Ordered list of permutations sharing one block size."""

    def __init__(self, n: int, perms):
        perms = tuple(perms)
        if not perms:
            raise ParameterError("pad must hold at least one permutation")
        if any(p.n != n for p in perms):
            raise ParameterError("all pad permutations must share the block size")
        self.n = n
        self.perms = perms

    @property
    def size(self) -> int:
        return len(self.perms)

    @property
    def nominal_key_bits(self) -> int:
        """Classical key length this pad nominally represents."""
        return self.size * self.n * (1 << self.n)


class AffinePermutation:
    """x -> (mult*x + offset) mod 2**n; bijective because mult is odd."""

    __slots__ = ("n", "mult", "offset", "_mult_inv")

    def __init__(self, n: int, mult: int, offset: int):
        if not MIN_BLOCK_BITS <= n <= MAX_BLOCK_BITS:
            raise ParameterError(f"block size must be in [1, {MAX_BLOCK_BITS}] bits")
        size = 1 << n
        if not 0 < mult < size or mult % 2 == 0:
            raise ParameterError("multiplier must be odd and in [1, 2**n)")
        if not 0 <= offset < size:
            raise ParameterError("offset out of range")
        self.n = n
        self.mult = mult
        self.offset = offset
        self._mult_inv = pow(mult, -1, size)

    def apply(self, m: int) -> int:
        if not 0 <= m < (1 << self.n):
            raise ParameterError("block out of range")
        return (self.mult * m + self.offset) & ((1 << self.n) - 1)

    def invert(self, c: int) -> int:
        if not 0 <= c < (1 << self.n):
            raise ParameterError("block out of range")
        return (self._mult_inv * (c - self.offset)) & ((1 << self.n) - 1)


def _shuffle_table(state, size: int) -> list:
    # Forward Fisher-Yates: position i swaps with a uniform j in [i, size),
    # so all-zero draws leave the identity arrangement in place.
    table = list(range(size))
    for i in range(size - 1):
        j = i + state.next_index(size - i)
        table[i], table[j] = table[j], table[i]
    return table


def generate_pad(seed: bytes, n: int, size: int) -> PermutationPad:
    """Derive a pad of `size` permutations from the seed.

    Each table is an unbiased Fisher-Yates shuffle of the ordered block
    range, with index draws taken from the pad-tagged keystream; the result
    is a pure function of the seed.
    """
    if not MIN_BLOCK_BITS <= n <= MAX_BLOCK_BITS:
        raise ParameterError(f"block size must be in [1, {MAX_BLOCK_BITS}] bits")
    if size < 1:
        raise ParameterError("pad size must be at least 1")
    state = KeystreamState(seed, TAG_QPP_PAD)
    return PermutationPad(
        n, (Permutation(n, _shuffle_table(state, 1 << n)) for _ in range(size))
    )


def blocks_from_bytes(data: bytes, n: int) -> list:
    """Split data into n-bit blocks, most-significant bit first."""
    if (8 * len(data)) % n:
        raise ParameterError("data length is not a whole number of blocks")
    if n == 8:
        return list(data)
    blocks = []
    acc = 0
    acc_bits = 0
    for byte in data:
        acc = (acc << 8) | byte
        acc_bits += 8
        while acc_bits >= n:
            acc_bits -= n
            blocks.append(acc >> acc_bits)
            acc &= (1 << acc_bits) - 1
    return blocks


def bytes_from_blocks(blocks, n: int) -> bytes:
    """Pack n-bit blocks back into bytes (inverse of blocks_from_bytes)."""
    if n == 8:
        return bytes(blocks)
    if (n * len(blocks)) % 8:
        raise ParameterError("block count does not fill whole bytes")
    out = bytearray()
    acc = 0
    acc_bits = 0
    for b in blocks:
        acc = (acc << n) | b
        acc_bits += n
        while acc_bits >= 8:
            acc_bits -= 8
            out.append(acc >> acc_bits)
            acc &= (1 << acc_bits) - 1
    return bytes(out)


def _cipher_blocks(pad, blocks, prerand, dispatch, mode, decrypt):
    size = pad.size
    sequential = mode == MODE_SEQUENTIAL
    if decrypt:
        tables = [p._inverse_table for p in pad.perms]
    else:
        tables = [p.table for p in pad.perms]
    n = pad.n
    out = []
    append = out.append
    for t, block in enumerate(blocks):
        # One mask and one dispatch draw per block, in this order, on both
        # the encrypt and decrypt side.
        r = prerand.next_bits(n)
        i = t % size if sequential else dispatch.next_index(size)
        if decrypt:
            append(tables[i][block] ^ r)
        else:
            append(tables[i][block ^ r])
    return out


def encrypt_stream(
    pad: PermutationPad, seed: bytes, plaintext: bytes, mode: str = MODE_RANDOM
) -> bytes:
    """Encrypt block-aligned plaintext; output length equals input length.

    Per block: XOR with the next n prerandomization bits, pick a pad
    permutation from the dispatch stream (or round-robin in sequential
    mode), and substitute through its table.
    """
    if mode not in _MODES:
        raise ParameterError(f"unknown dispatch mode {mode!r}")
    if (8 * len(plaintext)) % pad.n:
        raise ParameterError("plaintext is not a whole number of blocks")
    prerand = KeystreamState(seed, TAG_QPP_PRERAND)
    dispatch = KeystreamState(seed, TAG_QPP_DISPATCH)
    blocks = blocks_from_bytes(plaintext, pad.n)
    return bytes_from_blocks(
        _cipher_blocks(pad, blocks, prerand, dispatch, mode, decrypt=False), pad.n
    )


def decrypt_stream(
    pad: PermutationPad, seed: bytes, ciphertext: bytes, mode: str = MODE_RANDOM
) -> bytes:
    """Exact inverse of encrypt_stream under the same pad, seed, and mode."""
    if mode not in _MODES:
        raise ParameterError(f"unknown dispatch mode {mode!r}")
    if (8 * len(ciphertext)) % pad.n:
        raise FormatError("ciphertext is not a whole number of blocks")
    prerand = KeystreamState(seed, TAG_QPP_PRERAND)
    dispatch = KeystreamState(seed, TAG_QPP_DISPATCH)
    blocks = blocks_from_bytes(ciphertext, pad.n)
    return bytes_from_blocks(
        _cipher_blocks(pad, blocks, prerand, dispatch, mode, decrypt=True), pad.n
    )


def pad_entropy(n: int, size: int, kind: str = "matrix") -> float:
    """Key-space entropy of a pad, in bits.

    Matrix pads draw each table from all (2**n)! permutations; affine pads
    only from the 2**(2n-1) odd-multiplier maps, hence the collapse.
    """
    if not MIN_BLOCK_BITS <= n <= MAX_BLOCK_BITS or size < 1:
        raise ParameterError("invalid pad shape")
    if kind == "matrix":
        return size * math.fsum(math.log2(k) for k in range(2, (1 << n) + 1))
    if kind == "arithmetic":
        return float(size * (2 * n - 1))
    raise ParameterError(f"unknown pad kind {kind!r}")

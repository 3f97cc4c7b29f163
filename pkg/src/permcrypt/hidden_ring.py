"""Modular-multiplicative permutations over hidden rings.

The operator multiplies by a secret value modulo a secret modulus.  It is
additive- and scalar-homomorphic, which is what lets polynomial coefficients
be encrypted elementwise while evaluations still decrypt; keeping the
modulus secret is what blocks the ratio-cancellation attack that kills the
public-modulus variant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import GenerationError, ParameterError
from .ring_arith import WideUint, inv_mod, mul_mod

_COPRIME_RETRIES = 256


@dataclass(frozen=True)
class RingOperator:
    """Coprime (multiplier, modulus) pair with the inverse precomputed.

    The modulus is a true `bits`-bit value (top bit set), so the bit size
    quoted in security estimates is literal.
    """

    multiplier: WideUint
    modulus: WideUint
    multiplier_inv: WideUint
    bits: int

    @classmethod
    def create(cls, multiplier: int, modulus: int) -> "RingOperator":
        if modulus < 2:
            raise ParameterError("modulus must exceed 1")
        if not 0 < multiplier < modulus:
            raise ParameterError("multiplier must lie in [1, modulus)")
        if math.gcd(multiplier, modulus) != 1:
            raise ParameterError("multiplier and modulus must be coprime")
        return cls(
            multiplier=WideUint(multiplier),
            modulus=WideUint(modulus),
            multiplier_inv=inv_mod(multiplier, modulus),
            bits=modulus.bit_length(),
        )

    def apply(self, a: int) -> WideUint:
        """multiplier * a mod modulus."""
        return mul_mod(self.multiplier, a, self.modulus)

    def invert(self, c: int) -> WideUint:
        """Inverse of apply: multiplier_inv * c mod modulus."""
        return mul_mod(self.multiplier_inv, c, self.modulus)


def new_operator(rng, bits: int) -> RingOperator:
    """Sample a fresh operator with a `bits`-bit modulus.

    The modulus is uniform over the top half of the range (so its bit
    length is exact) and the multiplier uniform over [1, modulus) with
    non-coprime draws rejected.
    """
    if bits < 8:
        raise ParameterError("ring size below 8 bits is not supported")
    half = 1 << (bits - 1)
    modulus = half + rng.next_index(half)
    for _ in range(_COPRIME_RETRIES):
        multiplier = 1 + rng.next_index(modulus - 1)
        if math.gcd(multiplier, modulus) == 1:
            return RingOperator.create(multiplier, modulus)
    raise GenerationError("could not draw a coprime multiplier")


def encrypt_coefficients(op: RingOperator, coeffs, prime: int) -> list:
    """Map field coefficients into the hidden ring, elementwise.

    Rejects rings too small to keep an encrypted polynomial evaluation
    decryptable: 2**bits must hold prime**2 per term.
    """
    coeffs = list(coeffs)
    if any(not 0 <= c < prime for c in coeffs):
        raise ParameterError("coefficients must lie in [0, prime)")
    if (1 << op.bits) < prime * prime * len(coeffs):
        raise ParameterError(
            "ring too small: need bits >= 2*log2(prime) + log2(term count)"
        )
    return [op.apply(c) for c in coeffs]


def count_coprime_pairs(bits: int) -> int:
    """Exhaustively count valid (multiplier, modulus) pairs at small sizes.

    Counts both operators of a key (hence the factor two); this is the
    desk-scale ground truth the closed-form attack estimate is checked
    against.  Cost grows as 4**bits, so keep bits small.
    """
    if not 2 <= bits <= 14:
        raise ParameterError("exhaustive count only supported for 2..14 bits")
    total = 0
    for modulus in range(1 << (bits - 1), 1 << bits):
        total += sum(1 for r in range(1, modulus) if math.gcd(r, modulus) == 1)
    return 2 * total

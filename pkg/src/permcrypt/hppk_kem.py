"""Key encapsulation from homomorphically encrypted polynomial keys.

Key generation multiplies two secret univariate factors into a shared
multivariate base polynomial, then hides the two coefficient matrices
inside separate hidden rings.  Encapsulation evaluates both public
polynomials at a secret point with fresh noise; decapsulation strips the
rings, cancels the common base, and solves the linear factor for the
secret.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DecapsulationError, GenerationError, ParameterError
from .hidden_ring import RingOperator, encrypt_coefficients, new_operator
from .keystream import SystemEntropy
from .ring_arith import WideUint

# Largest prime below 2**bits for every shipped field width, pinned so key
# material and test vectors stay stable across builds.  A regeneration test
# re-derives each entry with an independent primality oracle.
PRIMES_BY_BITS = {
    32: 4294967291,
    48: 281474976710597,
    64: 18446744073709551557,
    96: 79228162514264337593543950319,
    128: 340282366920938463463374607431768211297,
}

KEM_FIELD_BITS = {"I": 32, "III": 48, "V": 64}
LEVELS = ("I", "III", "V")

_RESAMPLE_LIMIT = 64


@dataclass(frozen=True)
class KemParams:
    """Parameter set shared by the KEM and signature schemes.

    `base_order` is the secret point's maximum power in the base
    polynomial, `factor_order` the degree of the two secret factors, and
    `noise_count` the number of noise variables.  The hidden rings hold
    `ring_bits` bits and the verification radix is 2**shift_bits.
    """

    prime: int
    base_order: int
    factor_order: int
    noise_count: int
    ring_bits: int
    shift_bits: int
    level: str | None = None
    hash_bytes: int = 32

    def __post_init__(self):
        if self.prime < 2:
            raise ParameterError("prime must be at least 2")
        if min(self.base_order, self.factor_order, self.noise_count) < 1:
            raise ParameterError("polynomial orders and noise count must be >= 1")
        if (1 << self.ring_bits) < self.prime**2 * self.terms:
            raise ParameterError(
                "ring_bits too small for decryptable evaluations"
            )
        if self.shift_bits < self.ring_bits + 32:
            raise ParameterError("shift_bits must be at least ring_bits + 32")
        if self.level is not None and self.level not in LEVELS:
            raise ParameterError(f"unknown security level {self.level!r}")

    @property
    def field_bits(self) -> int:
        return self.prime.bit_length()

    @property
    def rows(self) -> int:
        """Row count of the public matrices: powers 0..base+factor order."""
        return self.base_order + self.factor_order + 1

    @property
    def terms(self) -> int:
        return self.rows * self.noise_count


def kem_params(level: str, noise_count: int = 2) -> KemParams:
    """Shipped KEM configuration for a security level (noise_count 2 or 3)."""
    if level not in LEVELS:
        raise ParameterError(f"unknown security level {level!r}")
    if noise_count not in (2, 3):
        raise ParameterError("shipped KEM configurations use 2 or 3 noise variables")
    bits = KEM_FIELD_BITS[level]
    ring_bits = 2 * bits + 8
    return KemParams(
        prime=PRIMES_BY_BITS[bits],
        base_order=1,
        factor_order=1,
        noise_count=noise_count,
        ring_bits=ring_bits,
        shift_bits=ring_bits + 32,
        level=level,
        hash_bytes=32,
    )


@dataclass(frozen=True)
class KemPrivateKey:
    """Secret factors plus the two ring operators that hide the public key."""

    numer_coeffs: tuple
    denom_coeffs: tuple
    ring1: RingOperator
    ring2: RingOperator


@dataclass(frozen=True)
class KemPublicKey:
    """Encrypted coefficient matrices, rows x noise_count, entries < 2**ring_bits."""

    numer_matrix: tuple
    denom_matrix: tuple


@dataclass(frozen=True)
class KemCiphertext:
    """Plain-integer evaluations of the two public polynomials."""

    numer_eval: WideUint
    denom_eval: WideUint


def _sample_factor(rng, prime: int, order: int) -> tuple:
    # Low-order coefficients first; the leading one is drawn nonzero.
    coeffs = [rng.next_index(prime) for _ in range(order)]
    coeffs.append(1 + rng.next_index(prime - 1))
    return tuple(coeffs)


def _proportional(f, h, prime: int) -> bool:
    # f and h are scalar multiples iff every 2x2 cross minor vanishes.
    for i in range(len(f)):
        for j in range(i + 1, len(f)):
            if (f[i] * h[j] - f[j] * h[i]) % prime:
                return False
    return True


def _sample_base(rng, params: KemParams) -> list:
    rows = params.base_order + 1
    base = [
        [rng.next_index(params.prime) for _ in range(params.noise_count)]
        for _ in range(rows)
    ]
    for j in range(params.noise_count):
        for _ in range(_RESAMPLE_LIMIT):
            if any(base[i][j] for i in range(rows)):
                break
            for i in range(rows):
                base[i][j] = rng.next_index(params.prime)
        else:
            raise GenerationError("could not draw a nonzero base column")
    return base


def _factor_times_base(factor, base, params: KemParams) -> list:
    """Coefficient matrix of factor(x) * base(x, u), reduced mod the prime."""
    p = params.prime
    out = [[0] * params.noise_count for _ in range(params.rows)]
    for k, fk in enumerate(factor):
        for i in range(params.base_order + 1):
            for j in range(params.noise_count):
                out[k + i][j] = (out[k + i][j] + fk * base[i][j]) % p
    return out


def _encrypt_matrix(op: RingOperator, plain, params: KemParams) -> tuple:
    flat = [plain[i][j] for i in range(params.rows) for j in range(params.noise_count)]
    enc = encrypt_coefficients(op, flat, params.prime)
    it = iter(enc)
    return tuple(
        tuple(next(it) for _ in range(params.noise_count)) for _ in range(params.rows)
    )


def keygen(params: KemParams, rng=None):
    """Generate a key pair.  Returns (private_key, public_key).

    Degenerate draws (proportional factors, an all-zero base column) are
    resampled internally; the resample budget is bounded so a broken
    entropy source fails loudly instead of looping.
    """
    rng = rng if rng is not None else SystemEntropy()
    numer = _sample_factor(rng, params.prime, params.factor_order)
    for _ in range(_RESAMPLE_LIMIT):
        denom = _sample_factor(rng, params.prime, params.factor_order)
        if not _proportional(numer, denom, params.prime):
            break
    else:
        raise GenerationError("could not draw independent secret factors")
    base = _sample_base(rng, params)
    ring1 = new_operator(rng, params.ring_bits)
    ring2 = new_operator(rng, params.ring_bits)
    pk = KemPublicKey(
        numer_matrix=_encrypt_matrix(ring1, _factor_times_base(numer, base, params), params),
        denom_matrix=_encrypt_matrix(ring2, _factor_times_base(denom, base, params), params),
    )
    return KemPrivateKey(numer, denom, ring1, ring2), pk


def ciphertext_bound(params: KemParams) -> int:
    """Strict upper bound on either ciphertext evaluation."""
    return params.terms * (1 << params.ring_bits) * params.prime


def _evaluate(pk: KemPublicKey, params: KemParams, secret: int, noise) -> KemCiphertext:
    p = params.prime
    powers = [1]
    for _ in range(params.rows - 1):
        powers.append(powers[-1] * secret % p)
    numer_eval = 0
    denom_eval = 0
    for i in range(params.rows):
        nrow = pk.numer_matrix[i]
        drow = pk.denom_matrix[i]
        for j in range(params.noise_count):
            # Monomials are reduced in the field; the outer sums are plain
            # integers so the ring layer can be stripped exactly.
            xij = powers[i] * noise[j] % p
            numer_eval += nrow[j] * xij
            denom_eval += drow[j] * xij
    return KemCiphertext(WideUint(numer_eval), WideUint(denom_eval))


def encapsulate(pk: KemPublicKey, params: KemParams, rng=None):
    """Encapsulate a fresh secret.  Returns (secret, ciphertext).

    The secret is uniform over the field; the noise values are uniform
    nonzero so the ciphertext never collapses to zero.
    """
    rng = rng if rng is not None else SystemEntropy()
    secret = rng.next_index(params.prime)
    noise = [1 + rng.next_index(params.prime - 1) for _ in range(params.noise_count)]
    return secret, _evaluate(pk, params, secret, noise)


def decapsulate(sk: KemPrivateKey, ct: KemCiphertext, params: KemParams) -> int:
    """Recover the encapsulated secret.

    Strips each ring (the plain evaluations are smaller than the moduli,
    so the lift is exact), then solves factor(x) = k * other_factor(x) in
    cross-multiplied form, which also covers the pole where the
    denominator factor vanishes at the secret point.
    """
    if params.factor_order != 1:
        raise ParameterError("secret extraction is implemented for linear factors")
    p = params.prime
    r1, r2 = sk.ring1, sk.ring2
    numer_lift = r1.invert(int(ct.numer_eval) % r1.modulus) % p
    denom_lift = r2.invert(int(ct.denom_eval) % r2.modulus) % p
    f0, f1 = sk.numer_coeffs
    h0, h1 = sk.denom_coeffs
    denominator = (f1 * denom_lift - h1 * numer_lift) % p
    if denominator == 0:
        raise DecapsulationError("degenerate ciphertext: base polynomial vanished")
    numerator = (h0 * numer_lift - f0 * denom_lift) % p
    return numerator * pow(denominator, -1, p) % p


def attack_complexity(ring_bits: int) -> float:
    """log2 of the coprime-pair search space for both hidden rings."""
    if ring_bits < 2:
        raise ParameterError("ring size must be at least 2 bits")
    return 2 * ring_bits + math.log2(9 / (2 * math.pi**2))

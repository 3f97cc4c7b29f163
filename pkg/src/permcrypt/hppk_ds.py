"""Digital signatures verified without the hidden rings.

Signing blinds the two secret factors, evaluated at the message hash, back
through the inverse ring operators.  The verification key carries the
public matrices folded down by a Barrett-style split: residues mod the
field prime plus precomputed radix quotients.  A verifier can then check
the cross-multiplied polynomial identity while the ring moduli stay
secret; it never touches the private key or the rings.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import FormatError, GenerationError, ParameterError, SigningError
from .hppk_kem import (
    LEVELS,
    PRIMES_BY_BITS,
    KemParams,
    KemPrivateKey,
    KemPublicKey,
    keygen,
)
from .keystream import SystemEntropy, hash_to_field
from .ring_arith import WideUint

DS_FIELD_BITS = {"I": 64, "III": 96, "V": 128}
_HASH_BYTES = {"I": 32, "III": 48, "V": 64}

_SELF_CHECK_LIMIT = 64


def ds_params(level: str) -> KemParams:
    """Shipped signature configuration: one noise variable, linear factors."""
    if level not in LEVELS:
        raise ParameterError(f"unknown security level {level!r}")
    bits = DS_FIELD_BITS[level]
    ring_bits = 2 * bits + 8
    return KemParams(
        prime=PRIMES_BY_BITS[bits],
        base_order=1,
        factor_order=1,
        noise_count=1,
        ring_bits=ring_bits,
        shift_bits=ring_bits + 32,
        level=level,
        hash_bytes=_HASH_BYTES[level],
    )


@dataclass(frozen=True)
class Signature:
    """Blinded factor evaluations; both values are nonzero by construction."""

    numer_tag: WideUint
    denom_tag: WideUint

    def __post_init__(self):
        if self.numer_tag == 0 or self.denom_tag == 0:
            raise ParameterError("signature values must be nonzero")


@dataclass(frozen=True)
class DsVerificationKey:
    """Ring-free image of the public key.

    For each public matrix entry: its residue times the blinding scalar mod
    the prime, and its radix quotient against the hidden modulus.  The two
    scalar residues stand in for the moduli themselves.  `shift_bits` is
    serialized with the key so verifiers need no parameter lookup.
    """

    numer_resid: tuple
    denom_resid: tuple
    numer_quot: tuple
    denom_quot: tuple
    ring1_resid: int
    ring2_resid: int
    shift_bits: int


def derive_verification_key(
    sk: KemPrivateKey, pk: KemPublicKey, blind: int, params: KemParams
) -> DsVerificationKey:
    """Fold the public matrices into the verification key with a known blind."""
    if not 0 < blind < params.prime:
        raise ParameterError("blinding scalar must be a nonzero field element")
    p = params.prime
    radix = 1 << params.shift_bits
    s1, s2 = int(sk.ring1.modulus), int(sk.ring2.modulus)

    def resid(matrix):
        return tuple(tuple(blind * v % p for v in row) for row in matrix)

    def quot(matrix, modulus):
        return tuple(
            tuple(WideUint(radix * v // modulus) for v in row) for row in matrix
        )

    return DsVerificationKey(
        numer_resid=resid(pk.numer_matrix),
        denom_resid=resid(pk.denom_matrix),
        numer_quot=quot(pk.numer_matrix, s1),
        denom_quot=quot(pk.denom_matrix, s2),
        ring1_resid=blind * s1 % p,
        ring2_resid=blind * s2 % p,
        shift_bits=params.shift_bits,
    )


def ds_keygen(params: KemParams, rng=None):
    """Generate the full key triple (private, encapsulation, verification).

    One private key serves both decapsulation and signing; the blinding
    scalar is folded into the verification key and not retained.
    """
    rng = rng if rng is not None else SystemEntropy()
    sk, pk = keygen(params, rng)
    blind = 1 + rng.next_index(params.prime - 1)
    return sk, pk, derive_verification_key(sk, pk, blind, params)


def _eval_factor(coeffs, x: int, p: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


def sign(
    sk: KemPrivateKey,
    params: KemParams,
    message: bytes,
    rng=None,
    vk: DsVerificationKey | None = None,
) -> Signature:
    """Sign a message with a fresh blinding scalar per attempt.

    When the verification key is supplied the signer self-checks each
    candidate and redraws the scalar on the rare radix-quotient mismatch,
    so released signatures verify deterministically.
    """
    rng = rng if rng is not None else SystemEntropy()
    p = params.prime
    x = hash_to_field(message, p, params.hash_bytes)
    fx = _eval_factor(sk.numer_coeffs, x, p)
    hx = _eval_factor(sk.denom_coeffs, x, p)
    if fx == 0 or hx == 0:
        # No scalar can rescue a vanished factor; the message is unsignable
        # under this key (probability about 2/prime).
        raise SigningError("message hash is a root of a secret factor")
    for _ in range(_SELF_CHECK_LIMIT):
        alpha = 1 + rng.next_index(p - 1)
        sig = Signature(
            numer_tag=sk.ring2.invert(alpha * fx % p),
            denom_tag=sk.ring1.invert(alpha * hx % p),
        )
        if vk is None or verify(vk, params, message, sig):
            return sig
    raise GenerationError("signer self-check kept failing")


def _check_shape(matrix, params: KemParams, what: str):
    if len(matrix) != params.rows or any(
        len(row) != params.noise_count for row in matrix
    ):
        raise FormatError(f"{what} has the wrong shape for these parameters")


def verify(
    vk: DsVerificationKey, params: KemParams, message: bytes, sig: Signature
) -> bool:
    """Check a signature; True on accept.

    Malformed inputs (wrong shapes, out-of-range values) raise FormatError
    so callers can distinguish garbage from a cryptographic reject.
    """
    for matrix, name in (
        (vk.numer_resid, "numer_resid"),
        (vk.denom_resid, "denom_resid"),
        (vk.numer_quot, "numer_quot"),
        (vk.denom_quot, "denom_quot"),
    ):
        _check_shape(matrix, params, name)
    if vk.shift_bits < params.ring_bits + 32:
        raise FormatError("verification key radix shift is too small")
    limit = 1 << params.ring_bits
    f_tag, h_tag = int(sig.numer_tag), int(sig.denom_tag)
    if not 0 < f_tag < limit or not 0 < h_tag < limit:
        raise FormatError("signature values out of range")

    p = params.prime
    shift = vk.shift_bits
    x = hash_to_field(message, p, params.hash_bytes)
    for j in range(params.noise_count):
        lhs = 0
        rhs = 0
        xpow = 1
        for i in range(params.rows):
            v = (f_tag * vk.denom_resid[i][j]
                 - vk.ring2_resid * (f_tag * vk.denom_quot[i][j] >> shift)) % p
            u = (h_tag * vk.numer_resid[i][j]
                 - vk.ring1_resid * (h_tag * vk.numer_quot[i][j] >> shift)) % p
            lhs = (lhs + v * xpow) % p
            rhs = (rhs + u * xpow) % p
            xpow = xpow * x % p
        if lhs != rhs:
            return False
    return True

"""Permutation-based cryptography: a pad cipher over n-bit blocks plus
hidden-ring public-key schemes for key encapsulation and signatures.

Prototype quality: no constant-time guarantees, no authenticated
encryption, encapsulation is IND-CPA only.
"""

from .errors import (
    CapacityError,
    DecapsulationError,
    FormatError,
    GenerationError,
    NotInvertibleError,
    ParameterError,
    PermcryptError,
    SigningError,
)
from .hidden_ring import RingOperator, count_coprime_pairs, encrypt_coefficients, new_operator
from .hppk_ds import DsVerificationKey, Signature, ds_keygen, ds_params, sign, verify
from .hppk_kem import (
    KemCiphertext,
    KemParams,
    KemPrivateKey,
    KemPublicKey,
    attack_complexity,
    decapsulate,
    encapsulate,
    kem_params,
    keygen,
)
from .keystream import KeystreamState, SystemEntropy, hash_to_field
from .qpp import (
    AffinePermutation,
    Permutation,
    PermutationPad,
    decrypt_stream,
    encrypt_stream,
    generate_pad,
    pad_entropy,
)
from .ring_arith import (
    BarrettContext,
    WideUint,
    barrett_mu,
    barrett_reduce,
    gcd,
    inv_mod,
    mul_mod,
)

__version__ = "0.1.0"

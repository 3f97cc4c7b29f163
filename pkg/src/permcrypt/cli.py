"""Command-line interface: key lifecycle, file encryption, KATs, reports.

Exit codes: 0 success, 1 cryptographic reject (failed verify/decapsulation
or a failed KAT run), 2 usage or format error.
"""

from __future__ import annotations

import argparse
import secrets
import sys
from pathlib import Path

from . import codec
from .errors import FormatError, ParameterError, PermcryptError
from .hppk_ds import ds_keygen, ds_params, sign, verify
from .hppk_kem import attack_complexity, decapsulate, encapsulate
from .keystream import (
    TAG_HPPK_HASH,
    TAG_HPPK_KEYGEN,
    TAG_HPPK_U,
    KeystreamState,
    SystemEntropy,
)
from .qpp import MODE_RANDOM, MODE_SEQUENTIAL, decrypt_stream, encrypt_stream, generate_pad, pad_entropy

_SEED_BYTES = 32


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="permcrypt",
        description="Permutation-pad cipher and hidden-ring KEM/signature tool",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_seed_flags(p):
        p.add_argument("--seed-hex", metavar="HEX",
                       help="deterministic seed (test only; requires --unsafe-seed)")
        p.add_argument("--unsafe-seed", action="store_true",
                       help="acknowledge that a fixed seed is unsafe outside tests")

    p = sub.add_parser("keygen", help="generate the key triple (sk, pk, vk)")
    p.add_argument("--level", choices=("I", "III", "V"), default="III")
    p.add_argument("--sk", required=True, help="private key output path")
    p.add_argument("--pk", required=True, help="encapsulation public key output path")
    p.add_argument("--vk", required=True, help="verification public key output path")
    add_seed_flags(p)

    p = sub.add_parser("encaps", help="encapsulate a fresh shared secret")
    p.add_argument("--pk", required=True)
    p.add_argument("--out", required=True, help="ciphertext output path")
    p.add_argument("--ss", required=True, help="shared secret output path")
    add_seed_flags(p)

    p = sub.add_parser("decaps", help="decapsulate a ciphertext")
    p.add_argument("--sk", required=True)
    p.add_argument("--in", dest="infile", required=True, help="ciphertext path")
    p.add_argument("--out", required=True, help="shared secret output path")

    p = sub.add_parser("sign", help="sign a message file")
    p.add_argument("--sk", required=True)
    p.add_argument("--vk", help="verification key; enables the signer self-check")
    p.add_argument("--in", dest="infile", required=True, help="message path")
    p.add_argument("--out", required=True, help="signature output path")
    add_seed_flags(p)

    p = sub.add_parser("verify", help="verify a signature over a message file")
    p.add_argument("--vk", required=True)
    p.add_argument("--in", dest="infile", required=True, help="message path")
    p.add_argument("--sig", required=True, help="signature path")

    p = sub.add_parser("qpp-keygen", help="generate a permutation pad")
    p.add_argument("--out", required=True, help="pad output path")
    p.add_argument("--n", type=int, default=8, help="block size in bits")
    p.add_argument("--M", type=int, default=64, help="number of pad permutations")
    add_seed_flags(p)

    p = sub.add_parser("qpp-encrypt", help="encrypt a file with a pad")
    p.add_argument("--pad", required=True)
    p.add_argument("--key-hex", required=True, metavar="HEX",
                   help="shared session key driving the keystream")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=(MODE_RANDOM, MODE_SEQUENTIAL), default=MODE_RANDOM)

    p = sub.add_parser("qpp-decrypt", help="decrypt a pad-encrypted file")
    p.add_argument("--pad", required=True)
    p.add_argument("--key-hex", required=True, metavar="HEX")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("kat", help="emit or check known-answer-test files")
    kat_sub = p.add_subparsers(dest="kat_command", required=True)
    pe = kat_sub.add_parser("emit")
    pe.add_argument("--out", required=True, help="output directory")
    pe.add_argument("--config", default="all",
                    choices=("all", *codec.KAT_CONFIGS), help="configuration label")
    pe.add_argument("--count", type=int, default=25)
    add_seed_flags(pe)
    pc = kat_sub.add_parser("check")
    pc.add_argument("--in", dest="infile", required=True, help=".kat file or directory")

    p = sub.add_parser("info", help="entropy and attack-complexity figures")
    info_sub = p.add_subparsers(dest="info_command", required=True)
    pe = info_sub.add_parser("entropy")
    pe.add_argument("--n", type=int, required=True)
    pe.add_argument("--M", type=int, required=True)
    pe.add_argument("--kind", choices=("matrix", "arithmetic"), default="matrix")
    pc = info_sub.add_parser("complexity")
    pc.add_argument("--L", type=int, required=True)

    return parser


def _seed_material(args) -> bytes:
    if args.seed_hex is None:
        return secrets.token_bytes(_SEED_BYTES)
    if not args.unsafe_seed:
        raise ParameterError("--seed-hex is test-only; pass --unsafe-seed to use it")
    try:
        return bytes.fromhex(args.seed_hex)
    except ValueError:
        raise ParameterError("--seed-hex is not valid hex") from None


def _entropy(args, tag: bytes):
    if args.seed_hex is None:
        return SystemEntropy()
    return KeystreamState(_seed_material(args), tag)


def _cmd_keygen(args) -> int:
    params = ds_params(args.level)
    sk, pk, vk = ds_keygen(params, _entropy(args, TAG_HPPK_KEYGEN))
    Path(args.sk).write_bytes(codec.encode_kem_private(sk, params))
    Path(args.pk).write_bytes(codec.encode_kem_public(pk, params))
    Path(args.vk).write_bytes(codec.encode_verification_key(vk, params))
    return 0


def _cmd_encaps(args) -> int:
    pk, params = codec.decode_kem_public(Path(args.pk).read_bytes())
    secret, ct = encapsulate(pk, params, _entropy(args, TAG_HPPK_U))
    Path(args.out).write_bytes(codec.encode_kem_ciphertext(ct, params))
    Path(args.ss).write_bytes(codec.encode_secret(secret, params))
    return 0


def _cmd_decaps(args) -> int:
    sk, params = codec.decode_kem_private(Path(args.sk).read_bytes())
    ct, ct_params = codec.decode_kem_ciphertext(Path(args.infile).read_bytes())
    if ct_params != params:
        raise FormatError("key and ciphertext parameter sets differ")
    secret = decapsulate(sk, ct, params)
    Path(args.out).write_bytes(codec.encode_secret(secret, params))
    return 0


def _cmd_sign(args) -> int:
    sk, params = codec.decode_kem_private(Path(args.sk).read_bytes())
    vk = None
    if args.vk is not None:
        vk, vk_params = codec.decode_verification_key(Path(args.vk).read_bytes())
        if vk_params != params:
            raise FormatError("key and verification key parameter sets differ")
    message = Path(args.infile).read_bytes()
    sig = sign(sk, params, message, _entropy(args, TAG_HPPK_HASH), vk=vk)
    Path(args.out).write_bytes(codec.encode_signature(sig, params))
    return 0


def _cmd_verify(args) -> int:
    vk, params = codec.decode_verification_key(Path(args.vk).read_bytes())
    sig, sig_params = codec.decode_signature(Path(args.sig).read_bytes())
    if sig_params != params:
        raise FormatError("signature and verification key parameter sets differ")
    message = Path(args.infile).read_bytes()
    if verify(vk, params, message, sig):
        print("signature accepted")
        return 0
    print("signature rejected", file=sys.stderr)
    return 1


def _cmd_qpp_keygen(args) -> int:
    pad = generate_pad(_seed_material(args), args.n, args.M)
    Path(args.out).write_bytes(codec.encode_pad(pad))
    return 0


def _session_key(args) -> bytes:
    try:
        key = bytes.fromhex(args.key_hex)
    except ValueError:
        raise ParameterError("--key-hex is not valid hex") from None
    if not key:
        raise ParameterError("--key-hex must not be empty")
    return key


def _cmd_qpp_encrypt(args) -> int:
    pad = codec.decode_pad(Path(args.pad).read_bytes())
    padded = codec.pad_bits(Path(args.infile).read_bytes(), pad.n)
    body = encrypt_stream(pad, _session_key(args), padded, args.mode)
    Path(args.out).write_bytes(codec.encode_qpp_stream(body, pad.n, pad.size, args.mode))
    return 0


def _cmd_qpp_decrypt(args) -> int:
    pad = codec.decode_pad(Path(args.pad).read_bytes())
    body, n, pad_size, mode = codec.decode_qpp_stream(Path(args.infile).read_bytes())
    if (n, pad_size) != (pad.n, pad.size):
        raise FormatError("stream was produced with a different pad shape")
    padded = decrypt_stream(pad, _session_key(args), body, mode)
    Path(args.out).write_bytes(codec.unpad_bits(padded, n))
    return 0


def _cmd_kat(args) -> int:
    if args.kat_command == "emit":
        seed = _seed_material(args)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        labels = list(codec.KAT_CONFIGS) if args.config == "all" else [args.config]
        for label in labels:
            path = out_dir / f"{label}.kat"
            path.write_text(codec.emit_kat(seed, label, args.count))
            print(f"wrote {path}")
        return 0

    path = Path(args.infile)
    files = sorted(path.glob("*.kat")) if path.is_dir() else [path]
    if not files:
        raise ParameterError(f"no .kat files under {path}")
    failed = False
    for file in files:
        report = codec.check_kat(file.read_text())
        if report.ok:
            print(f"{report.label}: ok ({report.total} vectors)")
        else:
            failed = True
            for count, name in report.failures:
                print(f"{report.label}: FAIL at count={count} field={name}",
                      file=sys.stderr)
    return 1 if failed else 0


def _cmd_info(args) -> int:
    if args.info_command == "entropy":
        print(round(pad_entropy(args.n, args.M, args.kind)))
    else:
        print(f"{attack_complexity(args.L):.2f}")
    return 0


_COMMANDS = {
    "keygen": _cmd_keygen,
    "encaps": _cmd_encaps,
    "decaps": _cmd_decaps,
    "sign": _cmd_sign,
    "verify": _cmd_verify,
    "qpp-keygen": _cmd_qpp_keygen,
    "qpp-encrypt": _cmd_qpp_encrypt,
    "qpp-decrypt": _cmd_qpp_decrypt,
    "kat": _cmd_kat,
    "info": _cmd_info,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return _COMMANDS[args.command](args)
    except (FormatError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PermcryptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

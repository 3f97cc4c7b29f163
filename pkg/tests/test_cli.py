import pytest

from permcrypt import codec
from permcrypt.cli import main
from permcrypt.hppk_ds import ds_keygen, ds_params
from permcrypt.keystream import TAG_HPPK_KEYGEN, KeystreamState
from permcrypt.qpp import generate_pad


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def triple(tmp_path):
    paths = {name: tmp_path / f"{name}.bin" for name in ("sk", "pk", "vk")}
    code = run("keygen", "--level", "I",
               "--sk", paths["sk"], "--pk", paths["pk"], "--vk", paths["vk"],
               "--seed-hex", "aa" * 32, "--unsafe-seed")
    assert code == 0
    return paths


# --- key lifecycle ----------------------------------------------------------


def test_keygen_encaps_decaps_pipeline(tmp_path, triple):
    ct = tmp_path / "ct.bin"
    ss1 = tmp_path / "ss1.bin"
    ss2 = tmp_path / "ss2.bin"
    assert run("encaps", "--pk", triple["pk"], "--out", ct, "--ss", ss1) == 0
    assert run("decaps", "--sk", triple["sk"], "--in", ct, "--out", ss2) == 0
    assert ss1.read_bytes() == ss2.read_bytes()
    assert len(ss1.read_bytes()) == 8  # 64-bit field at the level-I DS row


def test_sign_verify_round_trip(tmp_path, triple):
    msg = tmp_path / "msg.txt"
    sig = tmp_path / "sig.bin"
    msg.write_bytes(b"a contract worth signing")
    assert run("sign", "--sk", triple["sk"], "--vk", triple["vk"],
               "--in", msg, "--out", sig) == 0
    assert run("verify", "--vk", triple["vk"], "--in", msg, "--sig", sig) == 0


def test_verify_rejects_tampering_with_exit_1(tmp_path, triple, capsys):
    msg = tmp_path / "msg.txt"
    sig = tmp_path / "sig.bin"
    msg.write_bytes(b"pay alice 10 coins")
    assert run("sign", "--sk", triple["sk"], "--in", msg, "--out", sig) == 0
    msg.write_bytes(b"pay mallory 10 coins")
    assert run("verify", "--vk", triple["vk"], "--in", msg, "--sig", sig) == 1
    assert "signature rejected" in capsys.readouterr().err


def test_keygen_matches_library_under_same_seed(tmp_path, triple):
    params = ds_params("I")
    rng = KeystreamState(bytes.fromhex("aa" * 32), TAG_HPPK_KEYGEN)
    sk, pk, vk = ds_keygen(params, rng)
    assert triple["sk"].read_bytes() == codec.encode_kem_private(sk, params)
    assert triple["pk"].read_bytes() == codec.encode_kem_public(pk, params)
    assert triple["vk"].read_bytes() == codec.encode_verification_key(vk, params)


def test_seed_requires_unsafe_acknowledgement(tmp_path, capsys):
    code = run("keygen", "--level", "I",
               "--sk", tmp_path / "sk", "--pk", tmp_path / "pk",
               "--vk", tmp_path / "vk", "--seed-hex", "00")
    assert code == 2
    assert "--unsafe-seed" in capsys.readouterr().err


def test_garbage_key_file_is_a_format_error(tmp_path, capsys):
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"not a key at all")
    assert run("encaps", "--pk", bad, "--out", tmp_path / "ct",
               "--ss", tmp_path / "ss") == 2
    assert "error:" in capsys.readouterr().err


def test_missing_file_is_a_usage_error(tmp_path):
    assert run("decaps", "--sk", tmp_path / "absent.bin",
               "--in", tmp_path / "ct", "--out", tmp_path / "ss") == 2


def test_unknown_subcommand_is_usage_error():
    assert run("frobnicate") == 2


# --- pad encryption ---------------------------------------------------------


@pytest.mark.parametrize("mode", ["random", "sequential"])
def test_qpp_file_round_trip(tmp_path, mode):
    pad = tmp_path / "pad.bin"
    src = tmp_path / "in.dat"
    enc = tmp_path / "out.enc"
    dec = tmp_path / "out.dec"
    src.write_bytes(b"files of arbitrary length survive the trip" * 7 + b"!")
    assert run("qpp-keygen", "--out", pad, "--n", 8, "--M", 16,
               "--seed-hex", "beef", "--unsafe-seed") == 0
    assert run("qpp-encrypt", "--pad", pad, "--key-hex", "c0ffee",
               "--in", src, "--out", enc, "--mode", mode) == 0
    assert enc.read_bytes() != src.read_bytes()
    assert run("qpp-decrypt", "--pad", pad, "--key-hex", "c0ffee",
               "--in", enc, "--out", dec) == 0
    assert dec.read_bytes() == src.read_bytes()


def test_qpp_pad_matches_library_under_same_seed(tmp_path):
    pad_path = tmp_path / "pad.bin"
    assert run("qpp-keygen", "--out", pad_path, "--n", 4, "--M", 8,
               "--seed-hex", "beef", "--unsafe-seed") == 0
    assert pad_path.read_bytes() == codec.encode_pad(
        generate_pad(bytes.fromhex("beef"), 4, 8)
    )


def test_qpp_decrypt_with_mismatched_pad_fails(tmp_path):
    pad_a = tmp_path / "a.pad"
    pad_b = tmp_path / "b.pad"
    src = tmp_path / "in.dat"
    enc = tmp_path / "out.enc"
    src.write_bytes(b"payload")
    run("qpp-keygen", "--out", pad_a, "--n", 8, "--M", 4,
        "--seed-hex", "01", "--unsafe-seed")
    run("qpp-keygen", "--out", pad_b, "--n", 4, "--M", 4,
        "--seed-hex", "02", "--unsafe-seed")
    run("qpp-encrypt", "--pad", pad_a, "--key-hex", "aa", "--in", src, "--out", enc)
    assert run("qpp-decrypt", "--pad", pad_b, "--key-hex", "aa",
               "--in", enc, "--out", tmp_path / "out.dec") == 2


def test_qpp_wrong_session_key_garbles_or_fails(tmp_path):
    pad = tmp_path / "pad.bin"
    src = tmp_path / "in.dat"
    enc = tmp_path / "out.enc"
    dec = tmp_path / "out.dec"
    src.write_bytes(b"sensitive bytes here")
    run("qpp-keygen", "--out", pad, "--n", 8, "--M", 8,
        "--seed-hex", "03", "--unsafe-seed")
    run("qpp-encrypt", "--pad", pad, "--key-hex", "aa", "--in", src, "--out", enc)
    code = run("qpp-decrypt", "--pad", pad, "--key-hex", "bb",
               "--in", enc, "--out", dec)
    assert code == 2 or dec.read_bytes() != src.read_bytes()


# --- KATs and info ----------------------------------------------------------


def test_kat_emit_and_check(tmp_path):
    out = tmp_path / "kats"
    assert run("kat", "emit", "--out", out, "--config", "KEM-I-m2",
               "--count", 2, "--seed-hex", "1234", "--unsafe-seed") == 0
    assert run("kat", "check", "--in", out) == 0


def test_kat_check_flags_corruption(tmp_path, capsys):
    out = tmp_path / "kats"
    run("kat", "emit", "--out", out, "--config", "DS-I", "--count", 2,
        "--seed-hex", "5678", "--unsafe-seed")
    path = out / "DS-I.kat"
    text = path.read_text()
    sig_line = next(l for l in text.splitlines() if l.startswith("sig = "))
    value = sig_line.split(" = ")[1]
    swap = "0" if value[0] != "0" else "f"
    path.write_text(text.replace(sig_line, f"sig = {swap}{value[1:]}", 1))
    assert run("kat", "check", "--in", path) == 1
    assert "field=sig" in capsys.readouterr().err


def test_info_entropy_prints_rounded_bits(capsys):
    assert run("info", "entropy", "--n", 8, "--M", 64) == 0
    assert capsys.readouterr().out.strip() == "107776"
    assert run("info", "entropy", "--n", 8, "--M", 1, "--kind", "arithmetic") == 0
    assert capsys.readouterr().out.strip() == "15"


def test_info_complexity_prints_log2_operations(capsys):
    assert run("info", "complexity", "--L", 72) == 0
    assert capsys.readouterr().out.strip() == "142.87"

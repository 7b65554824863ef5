import csv
import io
import json
import os
import stat

import pytest

from pmkrsa import cli

SEED = "ab" * 32


def run(argv):
    try:
        return cli.main([str(a) for a in argv])
    except SystemExit as exc:
        return exc.code


@pytest.fixture(scope="module")
def keydir(tmp_path_factory):
    d = tmp_path_factory.mktemp("keys")
    assert run(["keygen", "--bits", 512, "--keys", 4, "--out", d, "--seed", SEED]) == 0
    return d


def roundtrip(tmp_path, keydir, data, *extra):
    src, enc, dec = tmp_path / "in.bin", tmp_path / "c.pmk1", tmp_path / "out.bin"
    src.write_bytes(data)
    assert run(["encrypt", "--key", keydir / "pmkrsa.pub", "--in", src, "--out", enc, *extra]) == 0
    assert run(["decrypt", "--key", keydir / "pmkrsa.key", "--in", enc, "--out", dec]) == 0
    return dec.read_bytes()


def test_keygen_files(keydir, capsys):
    mode = stat.S_IMODE(os.stat(keydir / "pmkrsa.key").st_mode)
    assert mode == 0o600
    assert (keydir / "pmkrsa.pub").read_bytes()[:4] == b"PMKK"


def test_keygen_output(tmp_path, capsys):
    assert run(["keygen", "--bits", 512, "--keys", 2, "--out", tmp_path, "--seed", SEED, "--json"]) == 0
    out, err = capsys.readouterr()
    doc = json.loads(out)
    assert len(doc["rows"]) == 2 and doc["rows"][0]["e"] == 65537
    assert "private" in err


def test_seeded_keygen_is_reproducible(tmp_path, keydir):
    assert run(["keygen", "--bits", 512, "--keys", 4, "--out", tmp_path, "--seed", SEED, "--threads", 2]) == 0
    assert (tmp_path / "pmkrsa.key").read_bytes() == (keydir / "pmkrsa.key").read_bytes()


def test_keygen_multiprime(tmp_path):
    assert run(["keygen", "--bits", 1024, "--keys", 1, "--variant", "multiprime:3",
                "--out", tmp_path, "--seed", SEED]) == 0
    assert roundtrip(tmp_path, tmp_path, b"three primes") == b"three primes"


@pytest.mark.parametrize("size", [0, 1, 31, 1000])
def test_roundtrip(tmp_path, keydir, size):
    data = os.urandom(size)
    assert roundtrip(tmp_path, keydir, data) == data


def test_roundtrip_one_mib(tmp_path, keydir):
    data = os.urandom(1 << 20)
    assert roundtrip(tmp_path, keydir, data, "--payload-bytes", 62) == data


def test_seeded_encrypt_is_reproducible(tmp_path, keydir):
    src = tmp_path / "in"
    src.write_bytes(b"hello" * 50)
    outs = []
    for name in ("a", "b"):
        assert run(["encrypt", "--key", keydir / "pmkrsa.pub", "--in", src,
                    "--out", tmp_path / name, "--seed", SEED]) == 0
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]


def test_decrypt_variants(tmp_path, keydir):
    src, enc = tmp_path / "in", tmp_path / "enc"
    src.write_bytes(b"variant check" * 9)
    run(["encrypt", "--key", keydir / "pmkrsa.pub", "--in", src, "--out", enc])
    for variant in ("pmkrsa", "crt", "rsa"):
        out = tmp_path / variant
        assert run(["decrypt", "--key", keydir / "pmkrsa.key", "--in", enc, "--out", out,
                    "--variant", variant]) == 0
        assert out.read_bytes() == src.read_bytes()


def test_wrong_key_exit_7(tmp_path, keydir):
    other = tmp_path / "other"
    other.mkdir()
    run(["keygen", "--bits", 512, "--keys", 4, "--out", other, "--seed", "cd" * 32])
    src, enc, out = tmp_path / "in", tmp_path / "enc", tmp_path / "out"
    src.write_bytes(b"top secret" * 30)
    run(["encrypt", "--key", keydir / "pmkrsa.pub", "--in", src, "--out", enc])
    assert run(["decrypt", "--key", other / "pmkrsa.key", "--in", enc, "--out", out]) == 7
    assert not out.exists()
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".out")]


def test_error_exit_codes(tmp_path, keydir, capsys):
    src, enc = tmp_path / "in", tmp_path / "enc"
    src.write_bytes(b"data")
    run(["encrypt", "--key", keydir / "pmkrsa.pub", "--in", src, "--out", enc])
    key = keydir / "pmkrsa.key"

    bad_key = tmp_path / "bad.key"
    bad_key.write_bytes(b"PMKK\x01\x01garbage")
    assert run(["decrypt", "--key", bad_key, "--in", enc, "--out", tmp_path / "o"]) == 5
    # a public key where a private one is required
    assert run(["decrypt", "--key", keydir / "pmkrsa.pub", "--in", enc, "--out", tmp_path / "o"]) == 5

    trunc = tmp_path / "trunc"
    trunc.write_bytes(enc.read_bytes()[:-3])
    assert run(["decrypt", "--key", key, "--in", trunc, "--out", tmp_path / "o"]) == 6

    assert run(["decrypt", "--key", key, "--in", tmp_path / "missing", "--out", tmp_path / "o"]) == 4
    assert run(["keygen", "--bits", 512, "--out", tmp_path / "nowhere"]) == 4
    assert run(["keygen", "--bits", 1000, "--out", tmp_path]) == 2
    assert run(["keygen", "--bits", 512, "--variant", "rsa", "--out", tmp_path]) == 3
    assert run(["encrypt", "--key", keydir / "pmkrsa.pub", "--in", src, "--out", tmp_path / "o",
                "--payload-bytes", 500]) == 3
    assert run(["encrypt", "--key", keydir / "pmkrsa.pub", "--in", src, "--out", tmp_path / "o",
                "--seed", "nothex"]) == 3
    assert run(["frobnicate"]) == 2
    capsys.readouterr()


def test_threads_env(tmp_path, keydir, monkeypatch):
    monkeypatch.setenv("PMKRSA_THREADS", "2")
    assert roundtrip(tmp_path, keydir, b"env threads" * 40) == b"env threads" * 40
    monkeypatch.setenv("PMKRSA_THREADS", "-4")
    src = tmp_path / "in.bin"
    assert run(["encrypt", "--key", keydir / "pmkrsa.pub", "--in", src, "--out", tmp_path / "x"]) == 3


def test_selftest(capsys):
    assert run(["selftest"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 10
    assert run(["selftest", "--json"]) == 0
    assert all(r["pass"] for r in json.loads(capsys.readouterr().out)["results"])


def test_selftest_corrupted(tmp_path, capsys):
    from importlib import resources

    doc = json.loads(resources.files("pmkrsa").joinpath("vectors.json").read_text())
    doc["vectors"][2]["expect"] = 2791
    bad = tmp_path / "vectors.json"
    bad.write_text(json.dumps(doc))
    assert run(["selftest", "--vectors", bad]) == 8
    assert doc["vectors"][2]["id"] in capsys.readouterr().err

    bad.write_text("{not json")
    assert run(["selftest", "--vectors", bad]) == 8
    assert str(bad) in capsys.readouterr().err


def test_bench_csv(tmp_path, capsys):
    out = tmp_path / "b.csv"
    assert run(["bench", "--variant", "pmkrsa", "--variant", "crt", "--bits", 512, "--size", 300,
                "--keys", 2, "--reps", 3, "--out", out, "--seed", SEED]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 6 and {r["variant"] for r in rows} == {"pmkrsa", "crt"}
    assert out.read_text().startswith("variant,bits")


def test_bench_check(capsys):
    code = run(["bench", "--bits", 512, "--bits", 1024, "--size", 2000, "--keys", 2,
                "--reps", 3, "--phases", "encrypt", "decrypt", "--payload-bytes", 30, "--json",
                "--seed", SEED])
    doc = json.loads(capsys.readouterr().out)
    assert "trend" not in doc and code == 0
    code = run(["bench", "--bits", 512, "--bits", 1024, "--size", 2000, "--keys", 2,
                "--reps", 3, "--phases", "decrypt", "--payload-bytes", 30, "--json", "--check"])
    doc = json.loads(capsys.readouterr().out)
    assert code in (0, 9)
    assert ("violation" in doc["trend"]) == (code == 9)


def test_bench_kernels(capsys):
    assert run(["bench", "--kernels", "--bits", 512, "--reps", 3, "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["kernels"][0]["bits"] == 512

"""Known-answer vectors for the arithmetic, RSA baselines and the scheme."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from pmkrsa import core
from pmkrsa.errors import SelfTestFailed
from pmkrsa.keystore import KeyPair
from pmkrsa.modmath import from_mont, mod_inv, mod_pow, mont_mul, mont_new, to_mont
from pmkrsa.rsa_variants import (
    CrtPrivate,
    MultiPrimeKey,
    crt_combine,
    crt_decrypt,
    multiprime_decrypt,
    rsa_decrypt,
    rsa_encrypt,
)


def _check_mod_inv(v):
    return mod_inv(v["a"], v["N"]) == v["expect"]


def _check_mod_pow(v):
    return mod_pow(v["x"], v["e"], v["N"]) == v["expect"]


def _check_mont(v):
    ctx = mont_new(v["N"], limb_bits=v["limb_bits"])
    a_hat, b_hat = to_mont(ctx, v["a"]), to_mont(ctx, v["b"])
    prod_hat = mont_mul(ctx, a_hat, b_hat)
    return (ctx.n_prime, a_hat, b_hat, prod_hat, from_mont(ctx, prod_hat)) == (
        v["n_prime"], v["a_hat"], v["b_hat"], v["product_hat"], v["expect"])


def _check_rsa(v):
    key = KeyPair(N=v["N"], e=v["e"], bits=v["N"].bit_length(), d=v["d"])
    return rsa_encrypt(v["m"], key) == v["c"] and rsa_decrypt(v["c"], key) == v["m"]


def _check_crt(v):
    crt = CrtPrivate.from_primes(v["p"], v["q"], v["d"])
    fields = (crt.d_p, crt.d_q, crt.q_inv)
    return fields == (v["d_p"], v["d_q"], v["q_inv"]) and \
        crt_decrypt(v["c"], crt, v["p"] * v["q"]) == v["expect"]


def _check_crt_combine(v):
    return crt_combine(v["residues"], v["moduli"]) == v["expect"]


def _check_multiprime(v):
    key = MultiPrimeKey.from_primes(v["primes"], v["e"], v["d"])
    return rsa_encrypt(v["m"], key) == v["c"] and multiprime_decrypt(v["c"], key) == v["m"]


def _check_pmkrsa_cell(v):
    key = KeyPair(N=v["N"], e=v["e"], bits=v["N"].bit_length(), d=v["d"], primes=(v["p"], v["q"]))
    c_star, c_r = core.encrypt_cell(v["m"], v["r"], key)
    return (c_star, c_r) == (v["c_star"], v["c_r"]) and \
        core.decrypt_cell(c_star, c_r, key) == v["m"] and \
        core.decrypt_cell(c_star, c_r, key, use_crt=False) == v["m"]


CHECKS = {
    "mod_inv": _check_mod_inv,
    "mod_pow": _check_mod_pow,
    "mont": _check_mont,
    "rsa": _check_rsa,
    "crt": _check_crt,
    "crt_combine": _check_crt_combine,
    "multiprime": _check_multiprime,
    "pmkrsa_cell": _check_pmkrsa_cell,
}


def load_vectors(path=None):
    try:
        if path is None:
            text = resources.files("pmkrsa").joinpath("vectors.json").read_text()
            name = "vectors.json"
        else:
            text = Path(path).read_text()
            name = str(path)
        doc = json.loads(text)
        vectors = doc["vectors"]
        if not isinstance(vectors, list):
            raise TypeError("'vectors' is not a list")
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise SelfTestFailed([f"{name if path is None else path} ({exc})"]) from exc
    return vectors


def run_selftest(path=None, strict=True):
    """List of (vector id, passed) pairs.

    With ``strict`` any failing vector raises :class:`SelfTestFailed`.
    """
    results = []
    for n, v in enumerate(load_vectors(path)):
        vid = v.get("id", f"#{n}") if isinstance(v, dict) else f"#{n}"
        try:
            ok = bool(CHECKS[v["kind"]](v))
        except Exception:
            ok = False
        results.append((vid, ok))
    failed = [vid for vid, ok in results if not ok]
    if failed and strict:
        raise SelfTestFailed(failed)
    return results

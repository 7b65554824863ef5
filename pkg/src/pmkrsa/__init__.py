"""Parallelized multi-key RSA with per-cell blinding.

Research and benchmarking code: the arithmetic is not constant time and the
key files are not password protected. Do not use it to protect real data.
"""
from pmkrsa._backend import NAME as BACKEND
from pmkrsa.container import parse_container, write_container
from pmkrsa.core import CipherPack, chunk, decrypt, encrypt
from pmkrsa.keystore import KeyBundle, KeyPair, gen_bundle, gen_keypair
from pmkrsa.primegen import Drbg, OSEntropy

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CipherPack",
    "Drbg",
    "KeyBundle",
    "KeyPair",
    "OSEntropy",
    "chunk",
    "decrypt",
    "encrypt",
    "gen_bundle",
    "gen_keypair",
    "parse_container",
    "write_container",
]

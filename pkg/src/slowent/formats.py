"""On-disk formats: the WORDS v1 text format and canonical JSON helpers.

Canonical JSON (sorted keys, compact separators, trailing newline) backs the
byte-identical-replay contract; arbitrary-precision integers and exact
rationals are carried as decimal / "p/q" strings.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from .words import Alphabet, Word


def dump_canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_frac(s) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        if "/" in s:
            num, den = s.split("/")
            return Fraction(int(num), int(den))
        return Fraction(int(s))
    raise ValueError(f"cannot parse rational from {s!r}")


def write_words(path, words: list[Word], *, stage: int | None = None) -> None:
    """Write a word list in WORDS v1: header then one word per line."""
    if not words:
        raise ValueError("empty word list")
    sigma = words[0].alphabet.size
    k = len(words[0])
    for w in words:
        if w.alphabet.size != sigma or len(w) != k:
            raise ValueError("words must share alphabet size and length")
    header = f"WORDS v1 sigma={sigma} k={k} N={len(words)}"
    if stage is not None:
        header += f" stage={stage}"
    lines = [header]
    lines.extend(" ".join(str(s) for s in w.symbols) for w in words)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_words(path) -> tuple[list[Word], dict]:
    """Read WORDS v1; returns the words and the parsed header fields."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("WORDS v1 "):
        raise ValueError(f"{path}: not a WORDS v1 file")
    fields = {}
    for tok in lines[0].split()[2:]:
        key, val = tok.split("=")
        fields[key] = int(val)
    sigma, k, n = fields["sigma"], fields["k"], fields["N"]
    alphabet = Alphabet(sigma)
    words = []
    for line in lines[1:]:
        if not line.strip():
            continue
        syms = tuple(int(t) for t in line.split())
        if len(syms) != k:
            raise ValueError(f"{path}: word length {len(syms)} != k={k}")
        words.append(Word(syms, alphabet))
    if len(words) != n:
        raise ValueError(f"{path}: found {len(words)} words, header says N={n}")
    return words, fields

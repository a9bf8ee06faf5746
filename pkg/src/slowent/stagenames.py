"""Symbolic tower names: the circular operator and stage-name combinatorics.

The circular operator turns k stage-n names of length q into one stage-(n+1)
name of length k*l*q^2, interleaving marker-spacer blocks b^(q-j_i) ... e^(j_i)
with j_i = p^(-1) i mod q. Untwisted stages assign names via a verified word
collection (one tuple per new tower index); twisted stages concatenate the
collection into a single assignment over stripe indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .sampler import WordCollection
from .words import Alphabet, Word, overlap_distance


def modular_inverse(p: int, q: int) -> int:
    if math.gcd(p, q) != 1:
        raise ValueError(f"gcd({p}, {q}) != 1: no modular inverse")
    return pow(p, -1, q)


def circular_operator(words: list[Word], q: int, p: int, l: int) -> Word:
    """Interleave k names of length q into one name of length k*l*q^2.

    The output is prod_{i<q} prod_{j<k} b^(q - j_i) w_j^(l-1) e^(j_i) with
    j_i = p^(-1) i mod q taken in [0, q). The alphabet must reserve b and e.
    """
    if not words:
        raise ValueError("need at least one word")
    alphabet = words[0].alphabet
    if alphabet.b is None or alphabet.e is None:
        raise ValueError("alphabet must reserve the marker spacers b and e")
    k = len(words)
    for w in words:
        if len(w) != q:
            raise ValueError(f"every word must have length q={q}")
        if w.alphabet != alphabet:
            raise ValueError("words over different alphabets")
    if l < 1 or q < 1:
        raise ValueError("q and l must be positive")
    inv = modular_inverse(p, q)
    out = np.empty(k * l * q * q, dtype=np.int32)
    arrays = [w.to_array() for w in words]
    pos = 0
    for i in range(q):
        j_i = (inv * i) % q
        for j in range(k):
            out[pos : pos + q - j_i] = alphabet.b
            pos += q - j_i
            for _ in range(l - 1):
                out[pos : pos + q] = arrays[j]
                pos += q
            out[pos : pos + j_i] = alphabet.e
            pos += j_i
    assert pos == out.size
    return Word(tuple(int(x) for x in out), alphabet)


def spacer_counts(name: Word) -> tuple[int, int]:
    """(b_count, e_count) of a name over an alphabet with reserved markers."""
    arr = name.to_array()
    return int((arr == name.alphabet.b).sum()), int((arr == name.alphabet.e).sum())


@dataclass(frozen=True)
class StageNames:
    """Tower-base names at one stage plus the combinatorics that built them."""

    stage: int
    names: tuple[Word, ...]
    s_prev: int
    q: int
    combinatorics: tuple[tuple[int, ...], ...]  # tuple (j_0..j_(k-1)) per new index

    def __post_init__(self):
        if not self.names:
            raise ValueError("no names")
        lengths = {len(w) for w in self.names}
        if len(lengths) != 1:
            raise ValueError("names must share one length")

    @property
    def count(self) -> int:
        return len(self.names)

    @property
    def name_length(self) -> int:
        return len(self.names[0])


def base_names(s0: int, q1: int) -> StageNames:
    """Default stage-0 names: s0 distinct constant words of length q1.

    The alphabet reserves b = s0 and e = s0 + 1 above the tower symbols.
    """
    alphabet = Alphabet(s0 + 2, b=s0, e=s0 + 1)
    names = tuple(Word((s,) * q1, alphabet) for s in range(s0))
    return StageNames(0, names, s_prev=s0, q=q1,
                      combinatorics=tuple((s,) for s in range(s0)))


def stage_names_untwisted(
    prev: StageNames, collection: WordCollection, k: int, l: int, q: int, p: int,
    s_new: int | None = None,
) -> StageNames:
    """Build the next stage's names from a verified collection.

    Tuple s* of the new stage is the s*-th collection word; the new name is
    the circular operator applied to the corresponding previous names. The
    collection must be exactly uniform (each previous index k/s_prev times,
    the strong-uniformity requirement) and pairwise distinct (injectivity).
    """
    s_prev = prev.count
    if s_new is None:
        s_new = len(collection.theta)
    if len(collection.theta) < s_new:
        raise ValueError(f"collection holds {len(collection.theta)} words < s_n = {s_new}")
    if collection.params.alphabet.size != s_prev:
        raise ValueError("collection alphabet must be the previous stage indices")
    if collection.params.k != k:
        raise ValueError(f"collection word length {collection.params.k} != k_n = {k}")
    if prev.name_length != q:
        raise ValueError(f"previous names have length {prev.name_length} != q_n = {q}")
    if k % s_prev != 0:
        raise ValueError("k_n must be a multiple of s_(n-1)")
    target = k // s_prev
    words = collection.theta[:s_new]
    for idx, w in enumerate(words):
        counts = np.bincount(w.to_array(), minlength=s_prev)
        if not (counts == target).all():
            raise ValueError(
                f"requirement R2 violated: word {idx} is not exactly uniform"
            )
    if len({w.symbols for w in words}) != len(words):
        raise ValueError("requirement R3 violated: collection words are not distinct")
    names = []
    for w in words:
        seq = [prev.names[sym] for sym in w.symbols]
        names.append(circular_operator(seq, q=q, p=p, l=l))
    return StageNames(
        prev.stage + 1, tuple(names), s_prev=s_prev, q=q,
        combinatorics=tuple(w.symbols for w in words),
    )


@dataclass(frozen=True)
class TwistedAssignment:
    """Stripe-to-rectangle assignment from a concatenated word collection."""

    psi: tuple[int, ...]  # length k = r * |Theta|
    r: int
    codomain: int  # assignment values lie in [0, codomain)

    @property
    def k(self) -> int:
        return len(self.psi)

    def rectangle(self, i: int, j: int, block: int, s: int) -> tuple[int, int, int]:
        """Image rectangle index triple for stripe (i, j).

        block is the previous-stage stride r_(n-1) l_(n-1) q_(n-1); the triple
        is (i + psi(j)*block, floor(j/s), j mod s).
        """
        if not 0 <= j < self.k:
            raise ValueError(f"stripe index j={j} outside [0, {self.k})")
        return (i + self.psi[j] * block, j // s, j % s)


def twisted_assignment(collection: WordCollection, r: int, k: int | None = None) -> TwistedAssignment:
    """Concatenate the collection words into the assignment psi of length r*|Theta|."""
    if collection.params.k != r:
        raise ValueError(f"collection words have length {collection.params.k}, need r={r}")
    total = r * len(collection.theta)
    if k is not None and k != total:
        raise ValueError(f"k = {k} != r * |Theta| = {total}")
    psi = []
    for w in collection.theta:
        psi.extend(w.symbols)
    return TwistedAssignment(tuple(psi), r, collection.params.alphabet.size)


@dataclass(frozen=True)
class SeparationStats:
    """Pairwise overlap-distance statistics over a shift grid."""

    pair_count: int
    min_distance: Fraction
    mean_distance: Fraction
    min_witness: tuple[tuple[int, int], int]  # (pair, t)
    min_t0_distance: Fraction | None
    names: int

    def cover_certificate(self, radius: Fraction) -> int | None:
        """Names needed at this strict ball radius, or None if not certified.

        Balls centered at realized names of radius <= the minimum pairwise
        t=0 distance hold at most one name each; arbitrary centers need
        radius <= half of it. Returns the name count when certified.
        """
        if self.min_t0_distance is None:
            return None
        if Fraction(radius) <= self.min_t0_distance / 2:
            return self.names
        return None

    def cover_certificate_centered(self, radius: Fraction) -> int | None:
        """Certificate for covers whose centers are the realized names."""
        if self.min_t0_distance is None:
            return None
        if Fraction(radius) <= self.min_t0_distance:
            return self.names
        return None


def separation_stats(
    names: StageNames | list[Word],
    shift_grid: list[int],
    min_overlap: int,
) -> SeparationStats:
    """Overlap distances for every unordered pair (self pairs at t >= 1).

    Records min/mean/min-witness over grid shifts whose overlap is at least
    ``min_overlap``, plus the t=0 pairwise minimum backing the ball-count
    certificate.
    """
    words = list(names.names) if isinstance(names, StageNames) else list(names)
    if len(words) < 2:
        raise ValueError("need at least two names")
    length = len(words[0])
    mat = np.stack([w.to_array() for w in words])
    n = len(words)
    total = Fraction(0)
    count = 0
    best: Fraction | None = None
    best_wit = None
    t0_best: Fraction | None = None
    for a in range(n):
        for b in range(a, n):
            for t in shift_grid:
                if a == b and t == 0:
                    continue
                if not 0 <= t < length or length - t < min_overlap:
                    continue
                mism = int((mat[a, t:] != mat[b, : length - t]).sum())
                d = Fraction(mism, length - t)
                total += d
                count += 1
                if best is None or d < best:
                    best, best_wit = d, ((a, b), t)
                if t == 0 and (t0_best is None or d < t0_best):
                    t0_best = d
    if count == 0:
        raise ValueError("no qualifying (pair, shift) probes")
    return SeparationStats(
        pair_count=count,
        min_distance=best,
        mean_distance=total / count,
        min_witness=best_wit,
        min_t0_distance=t0_best,
        names=n,
    )

"""Alphabets, finite words, the normalized Hamming metric, and ball counts.

Distances are exact rationals (fractions.Fraction); the analytic ball-count
bounds are floats evaluated with math.log/exp (accurate to ~1 ulp per term).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

DEFAULT_ENUM_CAP = 10**7


class EnumerationCapError(ValueError):
    """Raised when exhaustive ball enumeration would exceed the cap."""


@dataclass(frozen=True)
class Alphabet:
    """Finite alphabet of symbol ids 0..size-1, with optional reserved spacers.

    ``b`` and ``e`` are the marker spacers used by tower-name words; ``spacer``
    is the plain spacer symbol of coding words.
    """

    size: int
    b: int | None = None
    e: int | None = None
    spacer: int | None = None

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("alphabet size must be >= 1")
        reserved = [r for r in (self.b, self.e, self.spacer) if r is not None]
        if len(set(reserved)) != len(reserved):
            raise ValueError("reserved symbols must be distinct")
        for r in reserved:
            if not 0 <= r < self.size:
                raise ValueError("reserved symbol id out of range")


@dataclass(frozen=True)
class Word:
    """Immutable word over an alphabet; symbols are validated ids."""

    symbols: tuple[int, ...]
    alphabet: Alphabet

    def __post_init__(self):
        for s in self.symbols:
            if not 0 <= s < self.alphabet.size:
                raise ValueError(f"symbol {s} outside alphabet of size {self.alphabet.size}")

    def __len__(self) -> int:
        return len(self.symbols)

    def to_array(self) -> np.ndarray:
        return np.asarray(self.symbols, dtype=np.int32)


@dataclass(frozen=True)
class IndexInterval:
    """Half-open index interval [start, start+length)."""

    start: int
    length: int

    def __post_init__(self):
        if self.start < 0:
            raise ValueError("start must be nonnegative")
        if self.length < 1:
            raise ValueError("length must be positive")


def word(symbols, alphabet: Alphabet) -> Word:
    return Word(tuple(int(s) for s in symbols), alphabet)


def hamming_distance(w: Word, w2: Word) -> Fraction:
    """Normalized Hamming distance between equal-length words.

    Returns (1/n) * #{i : w_i != w2_i} as an exact rational.
    """
    if w.alphabet != w2.alphabet:
        raise ValueError("words over different alphabets")
    n = len(w)
    if n == 0 or len(w2) == 0:
        raise ValueError("words must be nonempty")
    if n != len(w2):
        raise ValueError(f"length mismatch: {n} vs {len(w2)}")
    mism = sum(1 for a, b in zip(w.symbols, w2.symbols) if a != b)
    return Fraction(mism, n)


def overlap_distance(w: Word, w2: Word, t: int) -> tuple[IndexInterval, Fraction]:
    """Hamming distance on the overlap of ``w`` and ``w2`` shifted left by ``t``.

    Position i of ``w`` (for i in [t, k)) is compared against position i-t of
    ``w2``. Returns the overlap interval [t, k) and the restricted distance.
    """
    if w.alphabet != w2.alphabet:
        raise ValueError("words over different alphabets")
    k = len(w)
    if len(w2) != k:
        raise ValueError(f"length mismatch: {k} vs {len(w2)}")
    if not 0 <= t < k:
        raise ValueError(f"shift t={t} outside [0, {k})")
    n = k - t
    mism = sum(1 for i in range(t, k) if w.symbols[i] != w2.symbols[i - t])
    return IndexInterval(t, n), Fraction(mism, n)


def restricted_distance(w: Word, w2: Word, t: int, start: int, length: int) -> Fraction:
    """Distance of w[start:start+length] vs the t-shifted w2, exact.

    ``start`` is in w-coordinates and must satisfy t <= start and
    start+length <= len(w). Used to replay verification witnesses.
    """
    k = len(w)
    if not (t <= start and start + length <= k):
        raise ValueError("interval outside the overlap")
    mism = sum(1 for i in range(start, start + length) if w.symbols[i] != w2.symbols[i - t])
    return Fraction(mism, length)


def enumerate_ball(w: Word, eps: Fraction, cap: int = DEFAULT_ENUM_CAP) -> int:
    """Exact count of words w2 with hamming_distance(w, w2) < eps, by exhaustion.

    The ball is strict (d < eps), matching the covering-ball definition.
    Raises EnumerationCapError when |Sigma|^n exceeds ``cap``; callers should
    then use ball_bound instead.
    """
    n = len(w)
    if n == 0:
        raise ValueError("empty word")
    sigma = w.alphabet.size
    total = sigma**n
    if total > cap:
        raise EnumerationCapError(
            f"|Sigma|^n = {total} exceeds cap {cap}; use ball_bound for an upper bound"
        )
    eps = Fraction(eps)
    target = w.to_array()
    count = 0
    chunk = 1 << 18
    # enumerate words as mixed-radix digit rows, in chunks
    for lo in range(0, total, chunk):
        hi = min(lo + chunk, total)
        idx = np.arange(lo, hi, dtype=np.int64)
        digits = np.empty((hi - lo, n), dtype=np.int32)
        rem = idx
        for pos in range(n - 1, -1, -1):
            digits[:, pos] = rem % sigma
            rem = rem // sigma
        mism = (digits != target[None, :]).sum(axis=1)
        # d < eps  <=>  mism * eps.den < eps.num * n
        count += int((mism * eps.denominator < eps.numerator * n).sum())
    return count


@dataclass(frozen=True)
class BallBound:
    bound: float
    simplified: float | None  # |Sigma|^{9 eps n} when applicable, else None


def ball_bound(n: int, sigma_size: int, eps: Fraction) -> BallBound:
    """Closed-form upper bound for the strict eps-Hamming ball cardinality.

    exp(n(2e log s - (1-e) log(1-2e) - 3e log e)) for e in (0, 1/10); the
    simplified bound s^{9 e n} is attached when e >= 1/s and log s >= 1.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if sigma_size < 2:
        raise ValueError("alphabet size must be >= 2")
    e = Fraction(eps)
    if not Fraction(0) < e < Fraction(1, 10):
        raise ValueError(f"eps must lie in (0, 1/10), got {e}")
    ef = float(e)
    exponent = n * (
        2 * ef * math.log(sigma_size)
        - (1 - ef) * math.log(1 - 2 * ef)
        - 3 * ef * math.log(ef)
    )
    try:
        bound = math.exp(exponent)
    except OverflowError:
        bound = math.inf
    simplified = None
    if e >= Fraction(1, sigma_size) and math.log(sigma_size) >= 1:
        try:
            simplified = math.exp(9 * ef * n * math.log(sigma_size))
        except OverflowError:
            simplified = math.inf
    return BallBound(bound, simplified)


def q_bound(n: int, k: int) -> float:
    """Ball-count bound for alphabet size (n+1)^6 at radius 2/1000, length k.

    exp(k(24 e log(n+1) - (1-2e) log(1-4e) - 6e log(2e))) with e = 1/1000;
    term by term this is ball_bound with |Sigma| = (n+1)^6 and radius 2e.
    """
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    e = 1.0 / 1000.0
    exponent = k * (
        24 * e * math.log(n + 1)
        - (1 - 2 * e) * math.log(1 - 4 * e)
        - 6 * e * math.log(2 * e)
    )
    try:
        return math.exp(exponent)
    except OverflowError:
        return math.inf


def exact_ball_count(length: int, sigma_size: int, radius: Fraction) -> int:
    """Exact strict-radius ball cardinality via the binomial sum.

    #{w2 : d(w, w2) < radius} = sum_{m < radius*length} C(length, m)(s-1)^m,
    independent of the center word.
    """
    r = Fraction(radius)
    # m < r*length  <=>  m <= ceil(r*length) - 1 (strict also when r*length is integral)
    limit = -((-r.numerator * length) // r.denominator) - 1
    count = 0
    for m in range(0, min(limit, length) + 1):
        count += math.comb(length, m) * (sigma_size - 1) ** m
    return max(count, 0)

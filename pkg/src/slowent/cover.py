"""Coded distributions and Hamming covering numbers.

A coded distribution assigns exact rational masses to the distinct length-n
words realized by a system; covers are families of strict-radius Hamming balls
centered at realized words whose union mass exceeds the target. The greedy
solver is deterministic (largest uncovered mass, ties to the lexicographically
smallest center); the exact solver searches center subsets for instances of
at most 24 atoms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .formats import frac_str
from .growth import ScalingFunction

EXACT_ATOM_CAP = 24
WINDOW_CAP = 200_000


@dataclass(frozen=True)
class CodedDistribution:
    """Masses attached to distinct realized n-words; unaccounted mass is the
    measure of windows whose continuation the stage does not determine."""

    length: int
    atoms: tuple[tuple[tuple[int, ...], Fraction], ...]
    accounted_mass: Fraction

    def __post_init__(self):
        words = [w for w, _ in self.atoms]
        if len(set(words)) != len(words):
            raise ValueError("atom words must be distinct")
        for w, m in self.atoms:
            if len(w) != self.length:
                raise ValueError("atom length mismatch")
            if m <= 0:
                raise ValueError("atom masses must be positive")
        total = sum((m for _, m in self.atoms), Fraction(0))
        if total != self.accounted_mass:
            raise ValueError("masses must sum to the accounted mass")
        if self.accounted_mass > 1:
            raise ValueError("accounted mass exceeds 1")

    @staticmethod
    def from_masses(length: int, masses: dict) -> "CodedDistribution":
        atoms = tuple(sorted((tuple(w), Fraction(m)) for w, m in masses.items()))
        total = sum((m for _, m in atoms), Fraction(0))
        return CodedDistribution(length, atoms, total)

    @property
    def unaccounted_mass(self) -> Fraction:
        return 1 - self.accounted_mass

    def word_matrix(self) -> np.ndarray:
        return np.asarray([w for w, _ in self.atoms], dtype=np.int32)

    def to_dict(self) -> dict:
        return {
            "length": self.length,
            "atoms": [
                {"word": " ".join(str(s) for s in w), "mass": frac_str(m)}
                for w, m in self.atoms
            ],
            "accounted_mass": frac_str(self.accounted_mass),
        }


def coded_distribution(source, partition_stage: int, n: int,
                       window_cap: int = WINDOW_CAP) -> CodedDistribution:
    """Distribution of length-n windows realized by a source.

    Rank-two systems contribute sliding windows over both tower codings,
    weighted by base width; windows running past a tower top are unaccounted.
    Stage names contribute cyclic windows, each of mass 1/(names * length).
    """
    from .cutstack import RankTwoSystem, coding_words
    from .stagenames import StageNames

    if n < 1:
        raise ValueError("window length must be positive")
    masses: dict[tuple[int, ...], Fraction] = {}
    if isinstance(source, RankTwoSystem):
        words = coding_words(source, partition_stage)
        total = source.total_mass
        towers = (
            (words.v1, source.tower1.width, source.tower1.height),
            (words.v2, source.tower2.width, source.tower2.height),
        )
        if n > max(t[2] for t in towers):
            raise ValueError(f"window length {n} beyond the determinable horizon")
        slots = sum(max(h - n + 1, 0) for _, _, h in towers)
        if slots > window_cap:
            raise ValueError(f"{slots} windows exceed the cap {window_cap}")
        for coding, width, h in towers:
            for level in range(0, h - n + 1):
                w = tuple(int(x) for x in coding.window(level, n))
                masses[w] = masses.get(w, Fraction(0)) + width / total
        atoms = tuple(sorted(masses.items()))
        accounted = sum((m for _, m in atoms), Fraction(0))
        return CodedDistribution(n, atoms, accounted)
    if isinstance(source, StageNames):
        q_len = source.name_length
        if n > q_len:
            raise ValueError(f"window length {n} beyond the name length {q_len}")
        if source.count * q_len > window_cap:
            raise ValueError("window count exceeds the cap")
        unit = Fraction(1, source.count * q_len)
        for nm in source.names:
            doubled = nm.symbols + nm.symbols
            for off in range(q_len):
                w = doubled[off : off + n]
                masses[w] = masses.get(w, Fraction(0)) + unit
        return CodedDistribution.from_masses(n, masses)
    raise TypeError(f"unsupported source {type(source).__name__}")


def substring_distribution(words, L: int, gamma: Fraction) -> CodedDistribution:
    """Distribution of the L-substrings occurring in prefixes [0, (1-gamma)k).

    Every window start inside the prefix weighs equally; when L exceeds the
    prefix the whole words are used (the only realized length-L strings).
    """
    gamma = Fraction(gamma)
    seqs = [w.symbols if hasattr(w, "symbols") else tuple(w) for w in words]
    k = len(seqs[0])
    if L > k:
        raise ValueError(f"substring length {L} exceeds word length {k}")
    prefix_end = math.floor((1 - gamma) * k)
    starts = range(0, prefix_end - L + 1) if prefix_end - L >= 0 else range(0, 1)
    total = len(seqs) * len(starts)
    masses: dict[tuple[int, ...], Fraction] = {}
    for s in seqs:
        for i in starts:
            w = s[i : i + L]
            masses[w] = masses.get(w, Fraction(0)) + Fraction(1, total)
    return CodedDistribution.from_masses(L, masses)


@dataclass(frozen=True)
class CoverReport:
    eps: Fraction  # ball radius (strict)
    S: int
    centers: tuple[tuple[int, ...], ...]
    covered_mass: Fraction
    mass_target: Fraction  # cover must exceed this mass
    method: str  # "greedy" or "exact"

    def to_dict(self) -> dict:
        return {
            "eps": frac_str(self.eps),
            "S": self.S,
            "centers": [" ".join(str(s) for s in c) for c in self.centers],
            "covered_mass": frac_str(self.covered_mass),
            "mass_target": frac_str(self.mass_target),
            "method": self.method,
        }

    def self_verify(self, dist: CodedDistribution) -> bool:
        """Recompute ball membership and mass from scratch."""
        L = dist.length
        covered = Fraction(0)
        for w, m in dist.atoms:
            hit = False
            for c in self.centers:
                mism = sum(1 for a, b in zip(w, c) if a != b)
                if Fraction(mism, L) < self.eps:
                    hit = True
                    break
            if hit:
                covered += m
        return covered == self.covered_mass and covered > self.mass_target


def _ball_matrix(dist: CodedDistribution, radius: Fraction) -> np.ndarray:
    """ball[i, j] = atom j lies strictly within radius of atom i."""
    mat = dist.word_matrix()
    L = dist.length
    r = Fraction(radius)
    mism = (mat[:, None, :] != mat[None, :, :]).sum(axis=2)
    return mism * r.denominator < r.numerator * L


def _resolve_targets(dist, eps, radius, mass_target):
    radius = Fraction(eps if radius is None else radius)
    target = (1 - Fraction(eps)) if mass_target is None else Fraction(mass_target)
    if not dist.accounted_mass > target:
        raise ValueError(
            f"accounted mass {dist.accounted_mass} cannot certify a cover "
            f"beyond {target} of the space"
        )
    return radius, target


def greedy_cover(dist: CodedDistribution, eps: Fraction,
                 radius: Fraction | None = None,
                 mass_target: Fraction | None = None) -> CoverReport:
    """Largest-uncovered-mass-first cover; deterministic tie-breaks.

    By default the ball radius and the mass threshold are coupled through eps
    (balls of radius eps, mass beyond 1 - eps); pass ``radius`` and
    ``mass_target`` to decouple them.
    """
    radius, target = _resolve_targets(dist, eps, radius, mass_target)
    ball = _ball_matrix(dist, radius)
    exact_masses = [m for _, m in dist.atoms]
    words = [w for w, _ in dist.atoms]
    n_atoms = len(words)
    covered = np.zeros(n_atoms, dtype=bool)
    covered_mass = Fraction(0)
    centers = []
    while covered_mass <= target:
        best_i = None
        best_gain = None
        for i in range(n_atoms):
            gain = sum(
                (exact_masses[j] for j in range(n_atoms) if ball[i, j] and not covered[j]),
                Fraction(0),
            )
            if best_gain is None or gain > best_gain or (
                gain == best_gain and words[i] < words[best_i]
            ):
                best_i, best_gain = i, gain
        if best_gain == 0:
            raise AssertionError("greedy stalled below the mass target")
        centers.append(words[best_i])
        for j in range(n_atoms):
            if ball[best_i, j] and not covered[j]:
                covered[j] = True
                covered_mass += exact_masses[j]
    return CoverReport(radius, len(centers), tuple(centers), covered_mass, target, "greedy")


def exact_cover_small(dist: CodedDistribution, eps: Fraction,
                      radius: Fraction | None = None,
                      mass_target: Fraction | None = None,
                      atom_cap: int = EXACT_ATOM_CAP) -> CoverReport:
    """Minimum-cardinality cover by exhaustive center-subset search (<= 24 atoms)."""
    if len(dist.atoms) > atom_cap:
        raise ValueError(f"{len(dist.atoms)} atoms exceed the exact-search cap {atom_cap}")
    radius, target = _resolve_targets(dist, eps, radius, mass_target)
    ball = _ball_matrix(dist, radius)
    n_atoms = len(dist.atoms)
    exact_masses = [m for _, m in dist.atoms]
    words = [w for w, _ in dist.atoms]
    ball_masks = []
    for i in range(n_atoms):
        msk = 0
        for j in range(n_atoms):
            if ball[i, j]:
                msk |= 1 << j
        ball_masks.append(msk)

    def mask_mass(msk: int) -> Fraction:
        out = Fraction(0)
        j = 0
        while msk:
            if msk & 1:
                out += exact_masses[j]
            msk >>= 1
            j += 1
        return out

    greedy = greedy_cover(dist, eps, radius=radius, mass_target=target)

    # candidate centers: drop balls strictly contained in another ball
    cands = sorted(range(n_atoms), key=lambda i: (-mask_mass(ball_masks[i]), words[i]))
    kept = []
    for i in cands:
        if any(
            ball_masks[i] | ball_masks[j] == ball_masks[j] and ball_masks[i] != ball_masks[j]
            for j in kept
        ) or any(ball_masks[i] == ball_masks[j] for j in kept):
            continue
        kept.append(i)
    gains = [mask_mass(ball_masks[i]) for i in kept]
    suffix_max = list(gains)
    for i in range(len(suffix_max) - 2, -1, -1):
        suffix_max[i] = max(suffix_max[i], suffix_max[i + 1])

    best: dict = {"count": greedy.S, "centers": None}

    def descend(idx: int, covered: int, mass: Fraction, chosen: tuple[int, ...]):
        if mass > target:
            if len(chosen) < best["count"] or best["centers"] is None:
                best["count"] = len(chosen)
                best["centers"] = chosen
            return
        if idx == len(kept) or len(chosen) + 1 > best["count"]:
            return
        need = target - mass
        # every further ball adds at most suffix_max[idx]
        lb = int(-((-need.numerator * suffix_max[idx].denominator)
                   // (need.denominator * suffix_max[idx].numerator)))
        if len(chosen) + max(lb, 1) > best["count"]:
            return
        i = kept[idx]
        new = ball_masks[i] & ~covered
        if new:
            descend(idx + 1, covered | ball_masks[i], mass + mask_mass(new),
                    chosen + (i,))
        descend(idx + 1, covered, mass, chosen)

    descend(0, 0, Fraction(0), ())
    if best["centers"] is None:
        # the greedy solution is optimal; reuse it
        return CoverReport(radius, greedy.S, greedy.centers, greedy.covered_mass,
                           target, "exact")
    chosen = best["centers"]
    msk = 0
    for i in chosen:
        msk |= ball_masks[i]
    return CoverReport(
        radius, len(chosen), tuple(words[i] for i in chosen), mask_mass(msk),
        target, "exact",
    )


@dataclass(frozen=True)
class ProfilePoint:
    t: Fraction
    min_ratio: float
    max_ratio: float


@dataclass(frozen=True)
class SlowEntropyProfile:
    """Finite-sample S(n)/a_n(t) ratios; an empirical diagnostic, not a limit."""

    points: tuple[ProfilePoint, ...]
    threshold: Fraction
    t_star: Fraction  # largest grid t with min ratio above the threshold

    note = "min/max over sampled lengths stand in for liminf/limsup"

    def to_dict(self) -> dict:
        return {
            "points": [
                {"t": frac_str(p.t), "min_ratio": p.min_ratio, "max_ratio": p.max_ratio}
                for p in self.points
            ],
            "threshold": frac_str(self.threshold),
            "t_star": frac_str(self.t_star),
            "note": self.note,
        }


def slow_entropy_profile(s_values, scale: ScalingFunction, t_grid,
                         threshold: Fraction = Fraction(1, 100)) -> SlowEntropyProfile:
    """Ratios S(n)/a_n(t) over the sampled lengths for each t in the grid."""
    s_values = [(int(n), int(s)) for n, s in s_values]
    if len(s_values) < 2:
        raise ValueError("need at least two sampled lengths")
    points = []
    t_star = Fraction(0)
    for t in t_grid:
        t = Fraction(t)
        ratios = [s / float(scale.value(n, t)) for n, s in s_values]
        pt = ProfilePoint(t, min(ratios), max(ratios))
        points.append(pt)
        if pt.min_ratio > float(threshold) and t > t_star:
            t_star = t
    return SlowEntropyProfile(tuple(points), Fraction(threshold), t_star)

"""Rank-two cutting and stacking with exact rational bookkeeping.

Each stage cuts the short tower's base into weighted columns, adds staircase
spacers (k*H_prev levels on column k), restacks the columns to a common height
H = prod(h1 + i*H_prev), exchanges mass with the tall tower through word-driven
concatenations, and tracks tower codings over a reference partition as
structured block words. All widths and masses are exact rationals; total
measure grows by exactly the spacer mass added.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .blockwords import BlockWord, Cat, Iota, Pow, Run, from_dict as bw_from_dict, \
    periodic_hamming
from .formats import frac_str, parse_frac

SPACER = 0


class CutStackError(ValueError):
    pass


@dataclass(frozen=True)
class Profile:
    """Construction constants; desk profiles declare their relaxations.

    The paper profile uses C_n = (n+1)^6 cuts, g floor (n+2)^10 K_{n,0},
    height-ratio floor (n+1)^21, and the split window (1/100, 1/75); desk
    profiles shrink the cut counts and widen the window so stages stay
    materializable, which is recorded in ``relaxations``.
    """

    name: str
    kind: str  # "desk" or "paper"
    initial_heights: tuple[int, int]
    initial_widths: tuple[Fraction, Fraction]
    cut_count_const: int | None = None  # None: (n+1)^6
    e_word_count: int | None = None  # None: from the scaling family
    g_floor_const: int | None = None  # None: (n+2)^10 K_{n,0}
    split_window: tuple[Fraction, Fraction] = (Fraction(1, 100), Fraction(1, 75))
    eps: Fraction = Fraction(1, 1000)
    track_codings: bool = True
    assert_paper_bounds: bool = False
    effective_index: int | None = None  # n_eff for alignment certificates
    relaxations: tuple[str, ...] = ()
    t_exponents: tuple[Fraction, ...] = tuple(Fraction(i) for i in range(1, 9))

    def __post_init__(self):
        h1, h2 = self.initial_heights
        if h1 < 1 or h2 < 1:
            raise CutStackError("initial heights must be positive")
        w1, w2 = self.initial_widths
        if w1 <= 0 or w2 <= 0:
            raise CutStackError("initial widths must be positive")
        if self.kind not in ("desk", "paper"):
            raise CutStackError("profile kind must be desk or paper")

    def cut_count(self, n: int) -> int:
        return self.cut_count_const if self.cut_count_const else (n + 1) ** 6

    def g_floor(self, n: int) -> int:
        if self.g_floor_const:
            return self.g_floor_const
        from .growth import GrowthSequence
        from .sampler import k0_estimate

        k0 = k0_estimate(
            GrowthSequence(exponent=Fraction(1)), (n + 1) ** 6,
            Fraction(1, 1000), Fraction(1, (n + 1) ** 12),
        )
        return (n + 2) ** 10 * k0

    def height_ratio_floor(self, n: int) -> int:
        return 1 if self.kind == "desk" else (n + 1) ** 21

    def t_exponent(self, n: int) -> Fraction:
        if n <= len(self.t_exponents):
            return self.t_exponents[n - 1]
        return Fraction(n)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "initial_heights": [str(h) for h in self.initial_heights],
            "initial_widths": [frac_str(w) for w in self.initial_widths],
            "cut_count_const": self.cut_count_const,
            "e_word_count": self.e_word_count,
            "g_floor_const": self.g_floor_const,
            "split_window": [frac_str(x) for x in self.split_window],
            "eps": frac_str(self.eps),
            "track_codings": self.track_codings,
            "assert_paper_bounds": self.assert_paper_bounds,
            "effective_index": self.effective_index,
            "relaxations": list(self.relaxations),
        }

    @staticmethod
    def from_dict(d: dict) -> "Profile":
        return Profile(
            name=d["name"], kind=d["kind"],
            initial_heights=(int(d["initial_heights"][0]), int(d["initial_heights"][1])),
            initial_widths=(parse_frac(d["initial_widths"][0]),
                            parse_frac(d["initial_widths"][1])),
            cut_count_const=d.get("cut_count_const"),
            e_word_count=d.get("e_word_count"),
            g_floor_const=d.get("g_floor_const"),
            split_window=(parse_frac(d["split_window"][0]), parse_frac(d["split_window"][1])),
            eps=parse_frac(d["eps"]),
            track_codings=d["track_codings"],
            assert_paper_bounds=d["assert_paper_bounds"],
            effective_index=d.get("effective_index"),
            relaxations=tuple(d.get("relaxations", ())),
        )

    @staticmethod
    def paper() -> "Profile":
        return Profile(
            name="paper", kind="paper",
            initial_heights=(2**21, 2**70),
            initial_widths=(Fraction(1, 2**21), Fraction(1, 2**70)),
            assert_paper_bounds=True,
        )

    @staticmethod
    def desk(cuts: int, heights: tuple[int, int] | None = None,
             widths: tuple[Fraction, Fraction] | None = None,
             e_words: int | None = None, name: str | None = None,
             effective_index: int | None = None,
             split_window: tuple[Fraction, Fraction] = (Fraction(0), Fraction(1)),
             track_codings: bool = True) -> "Profile":
        if heights is None:
            heights = {1: (1, 2), 2: (1, 24)}.get(cuts)
            if heights is None:
                raise CutStackError("desk profile needs explicit heights for this cut count")
        if widths is None:
            widths = (Fraction(1), Fraction(1, 2 * heights[1]))
        if e_words is None:
            e_words = 1 if cuts == 1 else 2
        return Profile(
            name=name or f"desk-C{cuts}", kind="desk",
            initial_heights=heights, initial_widths=widths,
            cut_count_const=cuts, e_word_count=e_words, g_floor_const=1,
            split_window=split_window,
            effective_index=effective_index,
            relaxations=(
                "cut count held constant",
                "split window widened",
                "g floor lowered to 1",
                "R constrained only to the structural multiple",
                "stage words drawn exactly uniform without the full sampler",
            ),
            track_codings=track_codings,
        )


@dataclass(frozen=True)
class Tower:
    width: Fraction
    height: int
    coding: BlockWord | None

    def __post_init__(self):
        if self.width <= 0 or self.height < 1:
            raise CutStackError("tower needs positive width and height")
        if self.coding is not None and self.coding.length != self.height:
            raise CutStackError("coding length must equal the tower height")

    @property
    def mass(self) -> Fraction:
        return self.width * self.height

    def to_dict(self, literal_cap: int = 10_000) -> dict:
        d = {"width": frac_str(self.width), "height": str(self.height)}
        if self.coding is not None:
            d["coding"] = self.coding.to_dict()
            if self.coding.length <= literal_cap:
                d["coding_literal"] = " ".join(
                    str(int(s)) for s in self.coding.materialize()
                )
        return d

    @staticmethod
    def from_dict(d: dict) -> "Tower":
        coding = bw_from_dict(d["coding"]) if "coding" in d else None
        return Tower(parse_frac(d["width"]), int(d["height"]), coding)


def product_height(h1: int, h_prev: int, cuts: int) -> int:
    """H = prod_{i=0}^{2*cuts-1} (h1 + i*h_prev)."""
    out = 1
    for i in range(2 * cuts):
        out *= h1 + i * h_prev
    return out


def _log_big(x: int) -> float:
    """Natural log of a positive bigint without float overflow."""
    if x < 2**53:
        return math.log(x)
    shift = x.bit_length() - 53
    return math.log(x >> shift) + shift * math.log(2)


def stage_tau(n: int, H: int, t_exp: Fraction, cap: int = 10_000) -> int:
    """Smallest tau >= n with Q_{n,k} * ((k+1)H)^{t_n} < (n+1)^{6k} for k >= tau.

    The left side grows like exp(c1 k) with c1 ~ 0.024 log(n+1) while the right
    grows like exp(6 log(n+1) k), so the ratio decays; scanned with floats.
    """
    log_h = _log_big(H)
    last_bad = n - 1
    k = max(n, 1)
    clean = 0
    while k <= cap:
        e = 1.0 / 1000.0
        log_q = k * (
            24 * e * math.log(n + 1)
            - (1 - 2 * e) * math.log(1 - 4 * e)
            - 6 * e * math.log(2 * e)
        )
        lhs = log_q + float(t_exp) * (math.log(k + 1) + log_h)
        rhs = 6 * k * math.log(n + 1)
        if lhs >= rhs:
            last_bad = k
            clean = 0
        else:
            clean += 1
            if clean >= 8 and k > 2 * (last_bad + 1):
                break
        k += 1
    else:
        raise CutStackError("tau condition never stabilized within the scan cap")
    return max(n, last_bad + 1)


@dataclass(frozen=True)
class RankTwoSystem:
    n: int
    tower1: Tower
    tower2: Tower
    H_prev: int
    H: int
    tau: int | None
    spacer_ledger: tuple[Fraction, ...]
    profile: Profile
    reference_stage: int
    mass_history: tuple[tuple[Fraction, Fraction], ...]
    invariant_report: dict = field(default_factory=dict)

    @property
    def total_mass(self) -> Fraction:
        return self.tower1.mass + self.tower2.mass

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "tower1": self.tower1.to_dict(),
            "tower2": self.tower2.to_dict(),
            "H_prev": str(self.H_prev),
            "H": str(self.H),
            "tau": self.tau,
            "spacer_ledger": [frac_str(x) for x in self.spacer_ledger],
            "profile": self.profile.to_dict(),
            "reference_stage": self.reference_stage,
            "mass_history": [[frac_str(a), frac_str(b)] for a, b in self.mass_history],
            "invariant_report": {k: bool(v) if isinstance(v, (bool, np.bool_)) else v
                                 for k, v in self.invariant_report.items()},
        }

    @staticmethod
    def from_dict(d: dict) -> "RankTwoSystem":
        return RankTwoSystem(
            n=int(d["n"]),
            tower1=Tower.from_dict(d["tower1"]),
            tower2=Tower.from_dict(d["tower2"]),
            H_prev=int(d["H_prev"]),
            H=int(d["H"]),
            tau=d.get("tau"),
            spacer_ledger=tuple(parse_frac(x) for x in d["spacer_ledger"]),
            profile=Profile.from_dict(d["profile"]),
            reference_stage=int(d["reference_stage"]),
            mass_history=tuple((parse_frac(a), parse_frac(b)) for a, b in d["mass_history"]),
            invariant_report=dict(d.get("invariant_report", {})),
        )


def init_system(profile: Profile) -> RankTwoSystem:
    """Stage-1 system; H_0 = 1 always.

    Only H_0 | h^(1) is enforced here; the remaining inequalities of the
    inductive hypothesis block are evaluated into the invariant report (the
    paper's own stage-1 seed violates several of them).
    """
    h1, h2 = profile.initial_heights
    w1, w2 = profile.initial_widths
    h_prev = 1
    if h1 % h_prev != 0:
        raise CutStackError("h^(1) must be a multiple of H_prev")
    cuts = profile.cut_count(1)
    H = product_height(h1, h_prev, cuts)
    coding1 = coding2 = None
    if profile.track_codings:
        coding1 = Iota(1, h1)
        coding2 = Iota(h1 + 1, h2)
    t1 = Tower(w1, h1, coding1)
    t2 = Tower(w2, h2, coding2)
    report = {
        "H_divides_h2": h2 % H == 0,
        "height_ratio_floor": h1 >= profile.height_ratio_floor(1) * h_prev,
        "mass_ratio_in_window": Fraction(1, 3) * t2.mass < t1.mass < Fraction(31, 10) * t2.mass,
    }
    if profile.assert_paper_bounds and not report["mass_ratio_in_window"]:
        raise CutStackError("paper profile requires the initial mass ratio window")
    tau = stage_tau(1, H, profile.t_exponent(1)) if H.bit_length() < 10**6 else None
    return RankTwoSystem(
        n=1, tower1=t1, tower2=t2, H_prev=h_prev, H=H, tau=tau,
        spacer_ledger=(), profile=profile, reference_stage=1,
        mass_history=((t1.mass, t2.mass),), invariant_report=report,
    )


def step_weights(h1: int, H_prev: int, C: int) -> tuple[list[Fraction], list[Fraction]]:
    """Reciprocal-height column weights; alpha over [0, C), beta over [C, 2C)."""
    if h1 < 1 or H_prev < 1 or C < 1:
        raise CutStackError("h1, H_prev, C must be positive")
    s1 = sum(Fraction(1, h1 + i * H_prev) for i in range(C))
    s2 = sum(Fraction(1, h1 + j * H_prev) for j in range(C, 2 * C))
    alpha = [Fraction(1, h1 + k * H_prev) / s1 for k in range(C)]
    beta = [Fraction(1, h1 + j * H_prev) / s2 for j in range(C, 2 * C)]
    assert sum(alpha) == 1 and sum(beta) == 1
    return alpha, beta


def _multinomial_count(length: int, symbols: int) -> int:
    """Number of exactly uniform words of this length over this many symbols."""
    per = length // symbols
    out = math.factorial(length)
    for _ in range(symbols):
        out //= math.factorial(per)
    return out


def _uniform_distinct_words(count: int, length: int, symbols: int, rng) -> list[tuple[int, ...]]:
    """Seeded exactly-uniform pairwise-distinct words over symbols 0..symbols-1."""
    if length % symbols != 0:
        raise CutStackError("word length must be a multiple of the alphabet size")
    if _multinomial_count(length, symbols) < count:
        raise CutStackError(
            f"only {_multinomial_count(length, symbols)} uniform words of "
            f"length {length} over {symbols} symbols; need {count}"
        )
    base = np.repeat(np.arange(symbols, dtype=np.int32), length // symbols)
    seen = set()
    out = []
    attempts = 0
    while len(out) < count:
        w = tuple(int(x) for x in rng.permutation(base))
        attempts += 1
        if w not in seen:
            seen.add(w)
            out.append(w)
        if attempts > 64 * count + 64:
            raise CutStackError("could not draw distinct uniform words")
    return out


def _smooth_divisor(x: int, cap: int) -> int:
    """Largest divisor of x built from small primes, bounded by cap."""
    d = 1
    for p in (2, 3, 5, 7, 11, 13):
        while x % p == 0 and d * p <= cap:
            d *= p
            x //= p
    return d


@dataclass(frozen=True)
class StageTrace:
    n: int
    g: int
    R: int
    N_e: int
    split_mass: Fraction  # mu(B^(1,2))
    spacer_mass: Fraction
    a_words: tuple[tuple[int, ...], ...]
    e_cores: tuple[tuple[int, ...], ...]
    widths: dict
    seed: int
    window_relaxed: bool

    def to_dict(self) -> dict:
        return {
            "n": self.n, "g": self.g, "R": str(self.R), "N_e": self.N_e,
            "split_mass": frac_str(self.split_mass),
            "spacer_mass": frac_str(self.spacer_mass),
            "a_words": [list(w) for w in self.a_words],
            "e_cores": [list(c) for c in self.e_cores],
            "widths": {k: frac_str(v) for k, v in self.widths.items()},
            "seed": self.seed,
            "window_relaxed": self.window_relaxed,
        }


def advance_stage(sys: RankTwoSystem, seed: int) -> tuple[RankTwoSystem, StageTrace]:
    """Execute one construction stage; deterministic in (system, seed)."""
    profile = sys.profile
    n = sys.n
    C = profile.cut_count(n)
    C_next = profile.cut_count(n + 1)
    h1, w1 = sys.tower1.height, sys.tower1.width
    h2, w2 = sys.tower2.height, sys.tower2.width
    H_prev, H = sys.H_prev, sys.H
    if h1 % H_prev != 0:
        raise CutStackError(f"stage {n}: H_prev does not divide h^(1)")
    if h2 % H != 0:
        raise CutStackError(
            f"stage {n}: H does not divide h^(2) "
            f"(initial heights must keep the divisibility chain)"
        )

    alpha, beta = step_weights(h1, H_prev, C)
    s1 = sum(Fraction(1, h1 + i * H_prev) for i in range(C))
    s2 = sum(Fraction(1, h1 + j * H_prev) for j in range(C, 2 * C))

    # smallest admissible g: the split equation fixes mu(B^(1,2)) once g is
    # chosen; it must land inside the profile window and leave B^(1,1) nonempty,
    # and g*C distinct uniform words over C symbols must exist
    lo, hi = profile.split_window
    g = max(1, profile.g_floor(n))
    split = None
    while True:
        x = Fraction(g * g) * C * H * w2 * s2
        if x >= w1 or x >= hi * w1:
            break
        if x > lo * w1 and _multinomial_count(g * C, C) >= g * C:
            split = x
            break
        g += 1
    if split is None:
        raise CutStackError(
            f"stage {n}: no admissible g with the split mass inside "
            f"({lo}, {hi}) * mu(B^(1)); desk profiles may widen the window"
        )
    mu_b12 = split
    mu_b11 = w1 - mu_b12

    spacer_mass = sum(
        k * H_prev * alpha[k] * mu_b11 for k in range(1, C)
    ) + sum(
        j * H_prev * beta[j - C] * mu_b12 for j in range(C, 2 * C)
    )

    heights = [h1 + k * H_prev for k in range(2 * C)]
    track = profile.track_codings
    v1 = sys.tower1.coding
    v2 = sys.tower2.coding
    z_words = []
    w_words = []
    if track:
        for k in range(2 * C):
            z = v1 if k == 0 else Cat((v1, Run(SPACER, k * H_prev)))
            z_words.append(z)
            w_words.append(Pow(z, H // heights[k]) if H // heights[k] > 1 else z)

    d_width_low = mu_b11 / (s1 * H)  # D^(k), k < C: equal widths
    d_width_high = mu_b12 / (s2 * H)  # D^(j), j >= C
    assert d_width_high == Fraction(g * g) * C * w2

    rng_a = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, n, 0])))
    a_words = _uniform_distinct_words(g * C, g * C, C, rng_a)
    a_words = tuple(tuple(sym + C for sym in w) for w in a_words)  # symbols C..2C-1

    h1_new = h2 + (g * C) ** 2 * H
    v1_new = None
    if track:
        parts = [v2]
        for aw in a_words:
            parts.extend(w_words[sym] for sym in aw)
        v1_new = Cat(tuple(parts))
    tower1_new = Tower(w2, h1_new, v1_new)

    H_new = product_height(h1_new, H, C_next)
    R = C * H_new  # smallest structural multiple; paper floors are infeasible here
    N_e = profile.e_word_count
    if N_e is None:
        raise CutStackError("paper-profile E-word counts exceed any desk budget")
    core_len = C * _smooth_divisor(R // C, max(2, 1024 // C))
    if _multinomial_count(core_len, C) < N_e:
        raise CutStackError(
            f"stage {n}: core length {core_len} cannot host {N_e} distinct uniform words"
        )
    rng_e = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, n, 1])))
    e_cores = tuple(_uniform_distinct_words(N_e, core_len, C, rng_e))

    h2_new = N_e * R * H
    v2_new = None
    if track:
        blocks = []
        for core in e_cores:
            block = Cat(tuple(w_words[sym] for sym in core))
            reps = R // core_len
            blocks.append(Pow(block, reps) if reps > 1 else block)
        v2_new = Cat(tuple(blocks))
    w2_new = d_width_low * C / (N_e * R)
    tower2_new = Tower(w2_new, h2_new, v2_new)

    # exact conservation: new total = old total + spacer mass
    new_total = tower1_new.mass + tower2_new.mass
    if new_total != sys.total_mass + spacer_mass:
        raise AssertionError("mass conservation failed")
    if h1_new % H != 0 or h2_new % H_new != 0:
        raise AssertionError("divisibility chain broken")

    if profile.assert_paper_bounds:
        if not spacer_mass < sys.tower1.mass / (n + 1) ** 14:
            raise CutStackError(f"stage {n}: spacer mass exceeds the paper bound")
        if not Fraction(98, 100) * sys.tower1.mass <= tower2_new.mass:
            raise CutStackError(f"stage {n}: exchange lower bound violated")

    tau = None
    if H_new.bit_length() < 10**6:
        tau = stage_tau(n + 1, H_new, profile.t_exponent(n + 1))
    report = {
        "H_divides_h2": True,
        "height_ratio_floor": h1_new >= profile.height_ratio_floor(n + 1) * H,
        "mass_ratio_in_window": Fraction(1, 3) * tower2_new.mass
        < tower1_new.mass
        < Fraction(31, 10) * tower2_new.mass,
    }
    trace = StageTrace(
        n=n, g=g, R=R, N_e=N_e, split_mass=mu_b12, spacer_mass=spacer_mass,
        a_words=a_words, e_cores=e_cores,
        widths={
            "tower1": tower1_new.width, "tower2": tower2_new.width,
            "D_low": d_width_low, "D_high": d_width_high,
            "B11": mu_b11, "B12": mu_b12,
        },
        seed=seed,
        window_relaxed=profile.split_window != (Fraction(1, 100), Fraction(1, 75)),
    )
    nxt = RankTwoSystem(
        n=n + 1, tower1=tower1_new, tower2=tower2_new, H_prev=H, H=H_new, tau=tau,
        spacer_ledger=sys.spacer_ledger + (spacer_mass,), profile=profile,
        reference_stage=sys.reference_stage,
        mass_history=sys.mass_history + ((tower1_new.mass, tower2_new.mass),),
        invariant_report=report,
    )
    return nxt, trace


@dataclass(frozen=True)
class StageWords:
    """Stage codings: v1, v2 and the staircase block words z^(k), w^(k)."""

    v1: BlockWord
    v2: BlockWord
    z: tuple[BlockWord, ...]
    w: tuple[BlockWord, ...]
    h1: int
    h2: int
    H: int
    H_prev: int

    @property
    def periods(self) -> tuple[int, ...]:
        return tuple(self.h1 + k * self.H_prev for k in range(len(self.z)))


def coding_words(sys: RankTwoSystem, reference_stage: int) -> StageWords:
    """Stage words over the reference partition's level labels plus spacer 0."""
    if sys.profile.track_codings and reference_stage == sys.reference_stage:
        v1 = sys.tower1.coding
        v2 = sys.tower2.coding
    elif reference_stage == sys.n:
        # identity labeling of the current towers
        h1, h2 = sys.tower1.height, sys.tower2.height
        v1 = Iota(1, h1)
        v2 = Iota(h1 + 1, h2)
    else:
        raise CutStackError(
            f"reference stage {reference_stage} not tracked (tracked: "
            f"{sys.reference_stage if sys.profile.track_codings else 'none'}, "
            f"current: {sys.n})"
        )
    C = sys.profile.cut_count(sys.n)
    h1 = sys.tower1.height
    zs = []
    ws = []
    for k in range(2 * C):
        p = h1 + k * sys.H_prev
        z = v1 if k == 0 else Cat((v1, Run(SPACER, k * sys.H_prev)))
        zs.append(z)
        reps = sys.H // p
        assert sys.H % p == 0
        ws.append(Pow(z, reps) if reps > 1 else z)
    return StageWords(
        v1=v1, v2=v2, z=tuple(zs), w=tuple(ws),
        h1=h1, h2=sys.tower2.height, H=sys.H, H_prev=sys.H_prev,
    )


def w_pair_distance(words: StageWords, i: int, j: int) -> Fraction:
    """Exact Hamming distance d_H(w^(i), w^(j)); the pair must be distinct."""
    if i == j:
        raise ValueError("the alignment bound concerns distinct towers only (i != j)")
    zi = words.z[i].materialize()
    zj = words.z[j].materialize()
    return periodic_hamming(zi, zj, words.H)


def realigned_at(words: StageWords, i: int, j: int, m: int) -> bool:
    """w^(i) and w^(j) are realigned at m iff both z-periods divide m*H_prev."""
    pi, pj = words.periods[i], words.periods[j]
    shift = m * words.H_prev
    return shift % pi == 0 and shift % pj == 0


@dataclass
class AlignmentReport:
    n_eff: int
    alpha: Fraction | None
    alpha_t_range: tuple[int, int]
    certificate: dict
    certified: bool
    pair_bound: Fraction | None
    pairs: list  # (i, j, distance, meets_bound)
    cross_distances: list  # (t, distance) for v1 vs shifted v2
    products: dict  # informational (1 - c/m^2)^5 products

    def all_pairs_pass(self) -> bool:
        return all(ok for (_, _, _, ok) in self.pairs)


def hypothesis_certificate(h1: int, H_prev: int, C: int, n_eff: int) -> dict:
    """The two proof inequalities that force the (1-6/n^2)^2 conclusion factor.

    realignment density: 1/(n_eff-1)^6 + 4 C H_prev / h1 <= 6/n_eff^2;
    aligned proportion: 4 C H_prev / (h1 + 2 C H_prev) <= 6/n_eff^2.
    """
    if n_eff < 2:
        return {"certified": False, "reason": "n_eff must be at least 2"}
    target = Fraction(6, n_eff**2)
    c1 = Fraction(1, (n_eff - 1) ** 6) + Fraction(4 * C * H_prev, h1)
    c2 = Fraction(4 * C * H_prev, h1 + 2 * C * H_prev)
    return {
        "certified": c1 <= target and c2 <= target,
        "realignment_term": c1,
        "aligned_term": c2,
        "target": target,
    }


def check_alignment_lemmas(
    words: StageWords,
    sys: RankTwoSystem,
    n_eff: int | None = None,
    cross_shift_grid: list[int] | None = None,
    realign_grid: list[int] | None = None,
) -> AlignmentReport:
    """Measure alpha, check the pairwise w-distance bound, and evaluate the
    realignment predicates; outcomes are report entries (assert in callers).
    """
    if n_eff is None:
        n_eff = sys.profile.effective_index or sys.n
    h1, H_prev = words.h1, words.H_prev
    C = len(words.z) // 2
    cert = hypothesis_certificate(h1, H_prev, C, n_eff)

    v1 = words.v1.materialize()
    t_hi = ((n_eff - 1) ** 6 - 1) * (h1 // H_prev) // (n_eff - 1) ** 6
    alpha = None
    if t_hi >= 1:
        alpha = Fraction(1)
        for t in range(1, t_hi + 1):
            shift = t * H_prev
            if shift >= h1:
                break
            mism = int((v1[shift:] != v1[: h1 - shift]).sum())
            d = Fraction(mism, h1 - shift)
            if d < alpha:
                alpha = d

    bound = None
    pairs = []
    if alpha is not None:
        bound = (1 - Fraction(6, n_eff**2)) ** 2 * alpha
        for i in range(2 * C):
            for j in range(i + 1, 2 * C):
                d = w_pair_distance(words, i, j)
                pairs.append((i, j, d, d >= bound))

    cross = []
    if cross_shift_grid:
        v2 = words.v2.materialize()
        h2 = words.h2
        for t in cross_shift_grid:
            shift = t * H_prev
            if not 1 <= shift <= h2 - h1:
                continue
            mism = int((v1 != v2[shift : shift + h1]).sum())
            cross.append((t, Fraction(mism, h1)))

    if realign_grid is None:
        realign_grid = []
    realign = {
        (i, j, m): realigned_at(words, i, j, m)
        for m in realign_grid
        for i in range(2 * C)
        for j in range(i + 1, 2 * C)
    }

    products = {}
    for c in (600, 1600):
        prod = Fraction(1)
        vacuous = False
        for m in range(n_eff, 2 * n_eff + 1):
            term = 1 - Fraction(c, m * m)
            if term <= 0:
                vacuous = True
                break
            prod *= term**5
        products[str(c)] = None if vacuous else prod

    report = AlignmentReport(
        n_eff=n_eff,
        alpha=alpha,
        alpha_t_range=(1, t_hi),
        certificate={k: v for k, v in cert.items()},
        certified=bool(cert.get("certified")),
        pair_bound=bound,
        pairs=pairs,
        cross_distances=cross,
        products=products,
    )
    report.certificate["realignments"] = {f"{i},{j},{m}": v for (i, j, m), v in realign.items()}
    return report


@dataclass(frozen=True)
class MassReport:
    stages: tuple[int, ...]
    ledger: tuple[Fraction, ...]
    totals: tuple[Fraction, ...]
    ratios: tuple[Fraction, ...]
    ratio_window_ok: tuple[bool, ...]
    exchange_ok: tuple[bool, ...]
    spacer_bound_ok: tuple[bool, ...]

    def to_dict(self) -> dict:
        return {
            "stages": list(self.stages),
            "ledger": [frac_str(x) for x in self.ledger],
            "totals": [frac_str(x) for x in self.totals],
            "ratios": [frac_str(x) for x in self.ratios],
            "ratio_window_ok": list(self.ratio_window_ok),
            "exchange_ok": list(self.exchange_ok),
            "spacer_bound_ok": list(self.spacer_bound_ok),
        }


def mass_report(sys: RankTwoSystem) -> MassReport:
    """Exact per-stage accounting with the paper bounds evaluated per stage."""
    hist = sys.mass_history
    totals = []
    ratios = []
    window_ok = []
    exchange_ok = []
    spacer_ok = []
    running = hist[0][0] + hist[0][1]
    totals.append(running)
    ratios.append(hist[0][0] / hist[0][1])
    window_ok.append(Fraction(1, 3) < ratios[-1] < Fraction(31, 10))
    for idx, entry in enumerate(sys.spacer_ledger):
        m1_prev, m2_prev = hist[idx]
        m1, m2 = hist[idx + 1]
        running += entry
        totals.append(running)
        assert running == m1 + m2
        ratios.append(m1 / m2)
        window_ok.append(Fraction(1, 3) < ratios[-1] < Fraction(31, 10))
        exchange_ok.append(Fraction(98, 100) * m1_prev <= m2)
        n = idx + 1
        spacer_ok.append(entry < m1_prev / (n + 1) ** 14)
    if sys.profile.assert_paper_bounds and not all(window_ok):
        raise CutStackError("paper profile mass-ratio window violated")
    return MassReport(
        stages=tuple(range(1, len(hist) + 1)),
        ledger=sys.spacer_ledger,
        totals=tuple(totals),
        ratios=tuple(ratios),
        ratio_window_ok=tuple(window_ok),
        exchange_ok=tuple(exchange_ok),
        spacer_bound_ok=tuple(spacer_ok),
    )


# ---------------------------------------------------------------------------
# rank-two systems without spacers


@dataclass(frozen=True)
class NoSpacerSystem:
    """Two towers exhausting the space; the transfer map is an exact interval
    exchange from the concatenated tops onto the concatenated bases."""

    heights: tuple[int, int]
    widths: tuple[Fraction, Fraction]
    plan: tuple[tuple[int, int, Fraction], ...]  # (from_tower, to_tower, width)

    @property
    def total(self) -> Fraction:
        return self.widths[0] * self.heights[0] + self.widths[1] * self.heights[1]


def default_exchange_plan(w1: Fraction, w2: Fraction) -> tuple[tuple[int, int, Fraction], ...]:
    """Order-preserving exchange [top1, top2] -> [base2, base1]."""
    plan = []
    tops = [(0, w1), (1, w2)] if w1 > 0 else [(1, w2)]
    bases = [(1, w2), (0, w1)] if w1 > 0 else [(1, w2)]
    bi = 0
    remaining = bases[0][1]
    for src, width in tops:
        left = width
        while left > 0:
            take = min(left, remaining)
            if take > 0:
                plan.append((src, bases[bi][0], take))
            left -= take
            remaining -= take
            if remaining == 0 and bi + 1 < len(bases):
                bi += 1
                remaining = bases[bi][1]
    return tuple(plan)


def nospacer_system(
    h1: int, h2: int, widths: tuple[Fraction, Fraction],
    cut_plan=None,
) -> NoSpacerSystem:
    w1, w2 = Fraction(widths[0]), Fraction(widths[1])
    if w1 < 0 or w2 <= 0 or h2 < 1 or (w1 > 0 and h1 < 1):
        raise CutStackError("invalid no-spacer tower dimensions")
    if cut_plan is None:
        cut_plan = default_exchange_plan(w1, w2)
    plan = tuple((int(a), int(b), Fraction(w)) for a, b, w in cut_plan)
    for a, b, w in plan:
        if a not in (0, 1) or b not in (0, 1):
            raise CutStackError("plan adds spacers: destinations must be tower bases")
        if w <= 0:
            raise CutStackError("plan widths must be positive")
    for tower, width in ((0, w1), (1, w2)):
        out = sum(w for a, _, w in plan if a == tower)
        into = sum(w for _, b, w in plan if b == tower)
        if out != width or into != width:
            raise CutStackError(
                "plan adds spacers: top and base widths must balance exactly"
            )
    return NoSpacerSystem((h1, h2), (w1, w2), plan)


def nospacer_distribution(system: NoSpacerSystem, n: int):
    """Exact length-n coded distribution by orbit simulation on intervals.

    Levels are laid out contiguously; the partition labels every level of both
    towers. The full mass is accounted (the exchange is a bijection).
    """
    from .cover import CodedDistribution

    h1, h2 = system.heights
    w1, w2 = system.widths
    if n < 1:
        raise CutStackError("window length must be positive")
    if n > max(h1 if w1 > 0 else 0, h2):
        raise CutStackError("window length beyond the determinable horizon")
    # level intervals: tower 0 at [l*w1, (l+1)*w1), tower 1 offset by h1*w1
    off2 = w1 * h1
    total = system.total

    def label(x: Fraction) -> int:
        if x < off2:
            return 1 + int(x / w1)
        return 1 + h1 + int((x - off2) / w2)

    def level_bounds(sym: int) -> tuple[Fraction, Fraction]:
        if sym <= h1:
            lo = (sym - 1) * w1
            return lo, lo + w1
        lo = off2 + (sym - 1 - h1) * w2
        return lo, lo + w2

    # T as ordered pieces (lo, hi, shift)
    pieces = []
    for tower, (w, h, base_off) in enumerate(((w1, h1, Fraction(0)), (w2, h2, off2))):
        if w == 0:
            continue
        top_lo = base_off + (h - 1) * w
        for lvl in range(h - 1):
            lo = base_off + lvl * w
            pieces.append((lo, lo + w, w))
    # top pieces from the plan, consumed in order along each top
    top_pos = {0: (h1 - 1) * w1 if w1 > 0 else Fraction(0), 1: off2 + (h2 - 1) * w2}
    base_pos = {0: Fraction(0), 1: off2}
    for src, dst, w in system.plan:
        lo = top_pos[src]
        dst_lo = base_pos[dst]
        pieces.append((lo, lo + w, dst_lo - lo))
        top_pos[src] = lo + w
        base_pos[dst] = dst_lo + w
    pieces.sort()

    def apply_map(lo: Fraction, hi: Fraction):
        """Split [lo, hi) along map pieces; yields (lo, hi, image_lo)."""
        for plo, phi, shift in pieces:
            a = max(lo, plo)
            b = min(hi, phi)
            if a < b:
                yield a, b, a + shift

    atoms = []  # (orig_width, cur_lo, word)
    for sym in range(1, h1 + h2 + 1):
        if sym <= h1 and w1 == 0:
            continue
        lo, hi = level_bounds(sym)
        atoms.append((hi - lo, lo, hi, (sym,)))
    for _ in range(n - 1):
        new_atoms = []
        for width, lo, hi, word_ in atoms:
            for a, b, img in apply_map(lo, hi):
                new_atoms.append((b - a, img, img + (b - a), word_ + (label(img),)))
        atoms = new_atoms
    masses: dict[tuple[int, ...], Fraction] = {}
    for width, _, _, word_ in atoms:
        masses[word_] = masses.get(word_, Fraction(0)) + width / total
    return CodedDistribution.from_masses(n, masses)


def nospacer_baseline(h1: int, h2: int, widths, eps: Fraction, cut_plan=None):
    """Covering-number certificate for a no-spacer rank-two system.

    Builds the system, codes windows of length floor(eps^2 h2), and covers to
    mass 1 - 4 eps^2 with strict eps^2 balls; the certificate compares the
    cover size against the linear budget h1 + h2.
    """
    from .cover import exact_cover_small, greedy_cover

    eps = Fraction(eps)
    system = nospacer_system(h1, h2, widths, cut_plan)
    x = eps * eps * h2
    n = max(1, x.numerator // x.denominator)  # clamp tiny instances to one symbol
    dist = nospacer_distribution(system, n)
    radius = eps * eps
    target = 1 - 4 * eps * eps
    try:
        report = exact_cover_small(dist, radius, mass_target=target)
    except ValueError:
        report = greedy_cover(dist, radius, mass_target=target)
    return {
        "system": system,
        "window": n,
        "distribution": dist,
        "cover": report,
        "bound": h1 + h2,
        "within_bound": report.S <= h1 + h2,
    }

"""Stage parameter schedules for conjugation-built tower transformations.

Six schedule kinds share the arithmetic skeleton q_{n+1} = k_n l_n q_n^2 and
alpha_{n+1} = alpha_n + 1/(k_n l_n q_n^2); each kind adds its own closed forms
and divisibility clauses. Paper-faithful values overflow any practical budget
by stage 2 or 3, so per-stage overrides supply small values while the
validator enforces every magnitude-free structural clause exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .formats import parse_frac
from .growth import ScalingFunction, floor_rational_power

KINDS = (
    "rigid_upper",
    "rigid_lower",
    "rigid_lower_inf",
    "cyclic_upper",
    "cyclic_lower",
    "cyclic_inf",
    "custom",
)
UNTWISTED = ("rigid_upper", "rigid_lower", "rigid_lower_inf")
CYCLIC = ("cyclic_upper", "cyclic_lower", "cyclic_inf")
MAX_POW_BITS = 10**7


class ScheduleError(ValueError):
    """A schedule clause failed; the message names the stage and clause."""


@dataclass(frozen=True)
class StageParams:
    n: int
    q: int
    p: int
    k: int
    l: int
    s: int
    r: int | None = None
    m: int | None = None  # factored-form cofactor: k = r * m for cyclic kinds

    def __post_init__(self):
        for name in ("q", "k", "l", "s"):
            if getattr(self, name) < 1:
                raise ScheduleError(f"stage {self.n}: {name} must be positive")
        if math.gcd(self.p, self.q) != 1:
            raise ScheduleError(f"stage {self.n}: gcd(p, q) != 1")

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.p, self.q)

    def to_dict(self) -> dict:
        d = {
            "n": self.n, "q": str(self.q), "p": str(self.p), "k": str(self.k),
            "l": str(self.l), "s": str(self.s),
        }
        if self.r is not None:
            d["r"] = str(self.r)
        if self.m is not None:
            d["m"] = str(self.m)
        return d

    @staticmethod
    def from_dict(d: dict) -> "StageParams":
        return StageParams(
            n=int(d["n"]), q=int(d["q"]), p=int(d["p"]), k=int(d["k"]),
            l=int(d["l"]), s=int(d["s"]),
            r=None if "r" not in d else int(d["r"]),
            m=None if "m" not in d else int(d["m"]),
        )


@dataclass(frozen=True)
class AbcSchedule:
    kind: str
    u: Fraction | None  # None is the infinite-value sentinel
    eps_seq: tuple[Fraction, ...]
    stages: tuple[StageParams, ...]
    s0: int
    k0: int | None = None
    r0: int | None = None

    def stage(self, n: int) -> StageParams:
        for st in self.stages:
            if st.n == n:
                return st
        raise ScheduleError(f"stage {n} not in schedule")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "u": "inf" if self.u is None else f"{self.u.numerator}/{self.u.denominator}",
            "eps_seq": [f"{e.numerator}/{e.denominator}" for e in self.eps_seq],
            "stages": [st.to_dict() for st in self.stages],
            "s0": str(self.s0),
            "k0": None if self.k0 is None else str(self.k0),
            "r0": None if self.r0 is None else str(self.r0),
        }

    @staticmethod
    def from_dict(d: dict) -> "AbcSchedule":
        return AbcSchedule(
            kind=d["kind"],
            u=None if d["u"] == "inf" else parse_frac(d["u"]),
            eps_seq=tuple(parse_frac(e) for e in d["eps_seq"]),
            stages=tuple(StageParams.from_dict(s) for s in d["stages"]),
            s0=int(d["s0"]),
            k0=None if d.get("k0") is None else int(d["k0"]),
            r0=None if d.get("r0") is None else int(d["r0"]),
        )


def default_eps_seq(n_max: int) -> tuple[Fraction, ...]:
    """eps_n = 2^-(n+1); the finite products stay above 1/2."""
    return tuple(Fraction(1, 2 ** (n + 1)) for n in range(1, n_max + 1))


def _guard_pow(base: int, exp: int, stage: int, clause: str) -> int:
    if base > 1 and exp * math.log2(base) > MAX_POW_BITS:
        raise ScheduleError(
            f"stage {stage}: {clause} needs {base}^{exp} "
            f"(over the bit budget; supply an override)"
        )
    return base**exp


def _floor_mul_pow(coeff: Fraction, base: int, exp: Fraction, stage: int, clause: str) -> int:
    """floor(coeff * base^exp) exactly, with a bit-budget guard."""
    exp = Fraction(exp)
    if base > 1 and float(exp) * math.log2(base) > MAX_POW_BITS:
        raise ScheduleError(
            f"stage {stage}: {clause} needs {base}^{float(exp):.1f} "
            f"(over the bit budget; supply an override)"
        )
    if exp.denominator == 1:
        v = coeff * Fraction(base) ** exp.numerator
        return v.numerator // v.denominator
    d = exp.denominator
    inner = coeff**d * Fraction(base) ** exp.numerator
    return floor_rational_power(inner, Fraction(1, d))


def _require_multiple(x: int, m: int, stage: int, clause: str) -> None:
    if m > 0 and x % m != 0:
        raise ScheduleError(f"stage {stage}: {clause} ({x} not a multiple of {m})")


def _smallest_common_multiple(*mods: int, at_least: int = 1) -> int:
    l = 1
    for m in mods:
        l = l * m // math.gcd(l, m)
    mult = max(1, -(-at_least // l))
    return l * mult


def build_schedule(
    kind: str,
    u: Fraction | None,
    seeds: dict,
    n_max: int,
    overrides: dict[int, dict] | None = None,
    eps_seq: tuple[Fraction, ...] | None = None,
    scale: ScalingFunction | None = None,
    u_seq: tuple[Fraction, ...] | None = None,
    s_seq: tuple[int, ...] | None = None,
) -> AbcSchedule:
    """Emit stages 1..n_max for the given kind.

    seeds: {"q1", "p1", "s0"} plus "k0" (rigid_lower and cyclic kinds) and
    "r0" (cyclic kinds). overrides maps a stage index to explicit values for
    any of k, l, s, r, m; values the kind computes are validated against the
    divisibility clauses either way and never rounded silently.

    Infinite-value kinds (rigid_lower_inf, cyclic_inf) take the scaling family
    through ``scale`` with the increasing exponent grid ``u_seq``; cyclic kinds
    take the predeclared tower counts through ``s_seq``.
    """
    if kind not in KINDS:
        raise ScheduleError(f"unknown schedule kind {kind!r}")
    if kind in ("rigid_upper", "rigid_lower", "cyclic_upper", "cyclic_lower"):
        if u is None:
            raise ScheduleError(f"{kind} needs a finite target value u")
        u = Fraction(u)
        if u <= 0:
            raise ScheduleError("u must be positive")
    overrides = overrides or {}
    if eps_seq is None:
        eps_seq = default_eps_seq(n_max)
    eps_seq = tuple(Fraction(e) for e in eps_seq)
    if len(eps_seq) < n_max:
        raise ScheduleError("eps_seq shorter than n_max")
    prod = Fraction(1)
    for e in eps_seq[:n_max]:
        prod *= 1 - e
    if not prod > Fraction(1, 2):
        raise ScheduleError("prod(1 - eps_n) must exceed 1/2 over the listed stages")
    if kind in ("rigid_lower_inf", "cyclic_inf"):
        if scale is None:
            scale = ScalingFunction()
        if u_seq is None:
            raise ScheduleError(f"{kind} needs the increasing exponent grid u_seq")
        u_seq = tuple(Fraction(x) for x in u_seq)
        if any(b <= a for a, b in zip(u_seq, u_seq[1:])):
            raise ScheduleError("u_seq must be strictly increasing")
        if kind == "rigid_lower_inf":
            _check_u_growth(scale, u_seq)
    if kind in CYCLIC:
        if s_seq is None:
            raise ScheduleError(f"{kind} needs the predeclared s_seq")
        s_seq = tuple(int(x) for x in s_seq)
        if len(s_seq) < n_max:
            raise ScheduleError("s_seq shorter than n_max")

    q = int(seeds["q1"])
    p = int(seeds["p1"])
    s_prev = int(seeds["s0"])
    k_prev = int(seeds.get("k0", 0) or 0)
    r_prev = int(seeds.get("r0", 0) or 0)
    stages: list[StageParams] = []

    for n in range(1, n_max + 1):
        e_n = eps_seq[n - 1]
        ov = overrides.get(n, {})
        r_n = ov.get("r")
        m_n = ov.get("m")
        k_n = ov.get("k")
        l_n = ov.get("l")
        s_n = ov.get("s")

        if kind == "rigid_upper":
            if k_n is None:
                raise ScheduleError(f"stage {n}: rigid_upper needs a k override (k from K_0)")
            _require_multiple(k_n, s_prev, n, "k_n must be a multiple of s_(n-1)")
            if l_n is None:
                l_n = _floor_mul_pow(8 / e_n, k_n, Fraction(q) / u, n, "l_n = floor(8/eps k^(q/u))")
            if s_n is None:
                qn_pow = _guard_pow(k_n, q, n, "s_n needs k_n^(q_n)")
                s_n = (
                    _floor_mul_pow(Fraction(8) / e_n * qn_pow, q, 2 * Fraction(u), n,
                                   "s_n = floor(8/eps k^q q^(2u)) s_(n-1)")
                    * s_prev
                )
        elif kind == "rigid_lower":
            if l_n is None:
                if k_prev < 1:
                    raise ScheduleError(f"stage {n}: rigid_lower needs seeds k0")
                l_n = _floor_mul_pow(6 / e_n, max(k_prev, 1), Fraction(n - 1), n,
                                     "l_n = floor(6/eps k_(n-1)^(n-1))")
            if k_n is None:
                raise ScheduleError(f"stage {n}: rigid_lower needs a k override (k from K_0)")
            _require_multiple(k_n, s_prev, n, "k_n must be a multiple of s_(n-1)")
            if s_n is None:
                s_n = _floor_mul_pow(Fraction(1), k_n * k_prev, n * Fraction(u), n,
                                     "s_n = floor((k_n k_(n-1))^(n u))")
        elif kind == "rigid_lower_inf":
            l_n = n * n if l_n is None else l_n
            if k_n is None:
                raise ScheduleError(f"stage {n}: rigid_lower_inf needs a k override")
            _require_multiple(k_n, s_prev, n, "k_n must be a multiple of s_(n-1)")
            if s_n is None:
                l_next = (n + 1) * (n + 1)
                idx = k_n * l_next * q
                v = scale.value(idx, u_seq[n])
                s_n = v.numerator // v.denominator if isinstance(v, Fraction) else math.floor(v)
        elif kind == "cyclic_upper":
            s_n = s_seq[n - 1] if s_n is None else s_n
            if r_n is None:
                floor_r = _frac_ceil(12 / e_n)
                r_n = _smallest_common_multiple(max(k_prev, 1), s_n, at_least=floor_r)
            if m_n is None:
                m_n = _floor_mul_pow(Fraction(1), r_n, Fraction(q) * u, n,
                                     "m_n = floor(r^(q u))")
            k_n = r_n * m_n
            if l_n is None:
                l_n = _guard_pow(r_n, q, n, "l_n = r^q")
        elif kind == "cyclic_lower":
            s_n = s_seq[n - 1] if s_n is None else s_n
            if l_n is None:
                if r_prev < 1:
                    raise ScheduleError(f"stage {n}: cyclic_lower needs seeds r0")
                l_n = _floor_mul_pow(6 / e_n, max(r_prev, 1), n * (1 - u) / u, n,
                                     "l_n = floor(r_(n-1)^(n(1-u)/u) 6/eps)")
            if r_n is None:
                floor_r = max(_frac_ceil(4 / e_n), r_prev + 1)
                r_n = _smallest_common_multiple(max(k_prev, 1), s_n, at_least=floor_r)
            k_n = _guard_pow(r_prev, n, n, "k_n needs r_(n-1)^n") * _guard_pow(
                r_n, n + 1, n, "k_n needs r_n^(n+1)"
            )
        elif kind == "cyclic_inf":
            s_n = s_seq[n - 1] if s_n is None else s_n
            l_n = n * n if l_n is None else l_n
            if r_n is None:
                floor_r = _frac_ceil(6 / e_n)
                r_n = _smallest_common_multiple(max(k_prev, 1), s_n, at_least=floor_r)
            if m_n is None:
                idx = r_n * l_n * q
                v = scale.value(idx, u_seq[n - 1])
                m_n = v.numerator // v.denominator if isinstance(v, Fraction) else math.floor(v)
            k_n = r_n * m_n
        elif kind == "custom":
            if k_n is None or l_n is None or s_n is None:
                raise ScheduleError(f"stage {n}: custom kind needs k, l, s overrides")

        stage = StageParams(n=n, q=q, p=p, k=k_n, l=l_n, s=s_n, r=r_n, m=m_n)
        _validate_stage(kind, stage, s_prev, k_prev, r_prev)
        stages.append(stage)
        q_next = k_n * l_n * q * q
        p = p * (k_n * l_n * q) + 1
        q = q_next
        s_prev, k_prev, r_prev = s_n, k_n, (r_n if r_n is not None else r_prev)

    sched = AbcSchedule(
        kind=kind,
        u=None if u is None else Fraction(u),
        eps_seq=eps_seq[:n_max],
        stages=tuple(stages),
        s0=int(seeds["s0"]),
        k0=int(seeds["k0"]) if "k0" in seeds else None,
        r0=int(seeds["r0"]) if "r0" in seeds else None,
    )
    validate_schedule(sched)
    return sched


def _frac_ceil(x: Fraction) -> int:
    x = Fraction(x)
    return -((-x.numerator) // x.denominator)


def _check_u_growth(scale: ScalingFunction, u_seq, grid: int = 64) -> None:
    """Finite-grid check of a_m(u_n) >= a_(m^2)(u_(n-1)) for consecutive u's."""
    for u_prev, u_next in zip(u_seq, u_seq[1:]):
        for m in range(2, grid + 1):
            if scale.value(m, u_next) < scale.value(m * m, u_prev):
                raise ScheduleError(
                    f"u growth condition fails at m={m}: a_m({u_next}) < a_(m^2)({u_prev})"
                )


def _validate_stage(kind, st: StageParams, s_prev: int, k_prev: int, r_prev: int) -> None:
    n = st.n
    if kind in UNTWISTED:
        _require_multiple(st.s, s_prev, n, "s_n must be a multiple of s_(n-1)")
        _require_multiple(st.k, s_prev, n, "k_n must be a multiple of s_(n-1)")
    if kind in CYCLIC:
        if st.r is None:
            raise ScheduleError(f"stage {n}: cyclic kinds need r_n")
        _require_multiple(st.s, s_prev, n, "s_n must be a multiple of s_(n-1)")
        if k_prev:
            _require_multiple(st.r, k_prev, n, "r_n must be a multiple of k_(n-1)")
        _require_multiple(st.r, st.s, n, "r_n must be a multiple of s_n")
        if kind in ("cyclic_upper", "cyclic_inf"):
            if st.m is None or st.k != st.r * st.m:
                raise ScheduleError(f"stage {n}: k_n must have the factored form r_n * m_n")
        if kind == "cyclic_lower":
            if r_prev and st.k != r_prev**n * st.r ** (n + 1):
                raise ScheduleError(
                    f"stage {n}: k_n must equal r_(n-1)^n * r_n^(n+1)"
                )
            if r_prev and not r_prev < st.r:
                raise ScheduleError(f"stage {n}: r_n must exceed r_(n-1)")


def validate_schedule(sched: AbcSchedule) -> None:
    """Recheck every structural clause of a schedule, overridden or not."""
    prod = Fraction(1)
    for e in sched.eps_seq:
        prod *= 1 - Fraction(e)
    if not prod > Fraction(1, 2):
        raise ScheduleError("prod(1 - eps_n) must exceed 1/2 over the listed stages")
    s_prev = sched.s0
    k_prev = sched.k0 or 0
    r_prev = sched.r0 or 0
    prev: StageParams | None = None
    for st in sched.stages:
        if prev is not None:
            expect_q = prev.k * prev.l * prev.q * prev.q
            if st.q != expect_q:
                raise ScheduleError(
                    f"stage {st.n}: q recurrence broken ({st.q} != k l q^2 = {expect_q})"
                )
            if st.alpha - prev.alpha != Fraction(1, expect_q):
                raise ScheduleError(f"stage {st.n}: alpha increment != 1/(k l q^2)")
        _validate_stage(sched.kind if sched.kind != "custom" else "custom",
                        st, s_prev, k_prev, r_prev)
        s_prev, k_prev = st.s, st.k
        r_prev = st.r if st.r is not None else r_prev
        prev = st


@dataclass(frozen=True)
class SafeDomainBound:
    """Measure lower bounds for the safe domains between stages n and m."""

    n: int
    horizon: int
    single_stage: tuple[Fraction, ...]  # 1 - 2/l_m for m = n..horizon
    measure_lower_bound: Fraction  # 1 - sum 2/l_m, clamped at 0


def safe_domain_bound(sched: AbcSchedule, n: int, horizon: int) -> SafeDomainBound:
    """1 - sum_{m=n}^{horizon} 2/l_m (clamped at 0) plus the per-stage bounds."""
    ns = [st.n for st in sched.stages]
    if n not in ns or horizon not in ns or n > horizon:
        raise ScheduleError(f"stage range [{n}, {horizon}] not in schedule")
    singles = []
    total = Fraction(1)
    for st in sched.stages:
        if n <= st.n <= horizon:
            singles.append(1 - Fraction(2, st.l))
            total -= Fraction(2, st.l)
    return SafeDomainBound(n, horizon, tuple(singles), max(total, Fraction(0)))

"""Randomized word collections with verified Hamming separation.

Builds collections Theta of N exactly-uniform length-k words over an alphabet
of at least 4 symbols and verifies, with exact integer arithmetic:

  (1) exact uniformity: every symbol occurs k/|Sigma| times in every word;
  (2) every overlap subinterval of length >= gamma*k, at every admissible
      shift (including self-shifts), has distance >= 1 - 1/|Sigma| - gamma*|Sigma|;
  (3) every subinterval with length in [beta, gamma*k), at shifts below
      (1-2*gamma)*k, has distance >= eps;
  (4) each length-L window of each word, for L in [tau, beta), is eps-close to
      at most a 2/b_L proportion of the L-substrings of the other words'
      prefixes, pooled over the other words.

All reported distances are exact rationals with replayable witnesses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .growth import GrowthSequence
from .words import Alphabet, Word, exact_ball_count, restricted_distance

EXHAUSTIVE_PROBE_CAP = 10**11  # above N^2 k^3 probes, verification auto-samples
DEFAULT_RETRY_BUDGET = 64
DEFAULT_SAMPLED_PROBES = 100_000


class SamplerError(RuntimeError):
    """Raised when sampling exhausts its retry budget; carries the best report."""

    def __init__(self, message, best_report=None):
        super().__init__(message)
        self.best_report = best_report


class WindowThresholdError(ValueError):
    """Raised when the proof window is empty (L3_min >= L4_max)."""


def chernoff_bounds(n: int, p: Fraction, delta: Fraction) -> tuple[float, float]:
    """Large-deviation bounds for n Bernoulli(p) trials at slack delta.

    Returns (two_sided, upper_tail) = (exp(-n d^2/4), exp(-(d^2/(2+d)) n p)).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    p = Fraction(p)
    d = Fraction(delta)
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0,1]")
    if d <= 0:
        raise ValueError("delta must be positive")
    two_sided = math.exp(-float(Fraction(n) * d * d / 4))
    upper_tail = math.exp(-float(d * d / (2 + d) * n * p))
    return two_sided, upper_tail


@dataclass(frozen=True)
class SamplerParams:
    """Construction parameters; sigma is the endstring repair budget fraction."""

    alphabet: Alphabet
    k: int
    N: int
    eps: Fraction
    gamma: Fraction
    b: GrowthSequence
    sigma: Fraction | None = None
    draw_mode: str = "uniform_shuffle"  # or "iid_repair"
    retry_budget: int = DEFAULT_RETRY_BUDGET

    def __post_init__(self):
        if self.alphabet.size < 4:
            raise ValueError("alphabet must have at least 4 symbols")
        if self.k < 1 or self.k % self.alphabet.size != 0:
            raise ValueError("k must be a positive multiple of the alphabet size")
        e = Fraction(self.eps)
        if not Fraction(0) < e <= Fraction(1, 10):
            raise ValueError("eps must lie in (0, 1/10]")
        g = Fraction(self.gamma)
        if not Fraction(0) < g < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if self.N < 1:
            raise ValueError("N must be positive")
        bk = self.b.value(self.k)
        if not self.N <= bk:
            raise ValueError(f"N={self.N} exceeds b_k={bk}")
        if self.sigma is None:
            object.__setattr__(self, "sigma", g * g / 3 * Fraction(999_999, 1_000_000))
        elif not Fraction(self.sigma) < g * g / 3:
            raise ValueError("sigma must be < gamma^2/3")
        if self.draw_mode not in ("uniform_shuffle", "iid_repair"):
            raise ValueError(f"unknown draw_mode {self.draw_mode!r}")

    @property
    def p_match(self) -> Fraction:
        return Fraction(1, self.alphabet.size)

    @property
    def substantial_bound(self) -> Fraction:
        return 1 - Fraction(1, self.alphabet.size) - Fraction(self.gamma) * self.alphabet.size


def _frac_floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def _frac_ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def tau_threshold(b: GrowthSequence, sigma_size: int, eps: Fraction) -> int:
    """Smallest tau with b_L / |Sigma|^{(1-18 eps) L} < 1 for all L >= tau.

    Exact rational-power comparisons, certified past the analytic crossover of
    the polynomial closed form; table sequences are checked on their full range
    (values beyond the table are the caller's responsibility).
    """
    e = Fraction(eps)
    if 18 * e >= 1:
        raise ValueError("18*eps >= 1 makes the bound vacuous")
    if sigma_size < 2:
        raise ValueError("alphabet size must be >= 2")
    c = 1 - 18 * e

    def ok(L: int) -> bool:
        return b.lt_power(L, sigma_size, c * L)

    if b.kind == "polynomial":
        # log(b_L) - cL log(s) is decreasing once exponent/(L+offset) < c log(s);
        # scan until the condition holds past that crossover, then it holds forever
        crossover = int(float(b.exponent) / (float(c) * math.log(sigma_size))) + 1 - b.offset
        crossover = max(crossover, 1)
        last_bad = 0
        L = 1
        while True:
            good = ok(L)
            if not good:
                last_bad = L
            if L > crossover and good:
                break
            L += 1
            if L > 10**7:
                raise ValueError("tau condition never satisfied within the scan cap")
        return last_bad + 1
    last_bad = 0
    for L in range(1, b.max_n + 1):
        if not ok(L):
            last_bad = L
    return last_bad + 1  # checked on the table range only


def tau_exact(b: GrowthSequence, sigma_size: int, eps: Fraction) -> int:
    """Smallest tau with b_L * N_L / |Sigma|^L < 1 for all L >= tau.

    N_L is the exact count of words strictly 2*eps-close to a fixed word; this
    is the general form of the threshold condition (tau_threshold implements
    its closed-form estimate). Certified by scanning past the analytic
    crossover of log b_L + log N_L - L log|Sigma|, which is negative and
    decreasing there since the ball-entropy rate at radius 2*eps < 1 - 1/|Sigma|
    stays below log|Sigma|.
    """
    r = 2 * Fraction(eps)
    if r >= 1 - Fraction(1, sigma_size):
        raise ValueError("radius 2*eps too large: balls exhaust the space")
    rf = float(r)
    h = 0.0
    if 0 < rf < 1:
        h = -(1 - rf) * math.log(1 - rf) - rf * math.log(rf) + rf * math.log(sigma_size - 1)
    c = math.log(sigma_size) - h
    if c <= 0:
        raise ValueError("no decay margin at radius 2*eps")

    def ok(L: int) -> bool:
        n_l = exact_ball_count(L, sigma_size, r)
        bv = b.value(L)
        if isinstance(bv, Fraction):
            return bv * n_l < Fraction(sigma_size) ** L
        return b.log_value(L) + math.log(n_l) < L * math.log(sigma_size)

    def analytic_log_bound(L: int) -> float:
        # b_L * N_L / s^L <= exp of this; decreasing once past the crossover below
        return b.log_value(L) + math.log(L + 1) + h * L - L * math.log(sigma_size)

    if b.kind == "polynomial":
        crossover = max(1, math.ceil((float(b.exponent) + 1.0) / c))
        last_bad = 0
        L = 1
        while True:
            if not ok(L):
                last_bad = L
            if L > crossover and analytic_log_bound(L) < 0 and ok(L):
                break
            L += 1
            if L > 10**6:
                raise ValueError("tau condition never satisfied within the scan cap")
        return last_bad + 1
    last_bad = 0
    for L in range(1, b.max_n + 1):
        if not ok(L):
            last_bad = L
    return last_bad + 1  # checked on the table range only


@dataclass(frozen=True)
class WindowThresholds:
    L3_min: int
    L4_max: int

    @property
    def beta(self) -> int:
        return self.L4_max + 1


def window_thresholds(params: SamplerParams) -> WindowThresholds:
    """Window thresholds for the intermediate/short length split.

    L3_min = ceil(8 (ln b_k + ln k)/(1-eps-p)) + 1 and L4_max is the largest
    L <= gamma*k with b_L < (1-eps-p) b_k k / (40 (ln b_k + ln k)^2), falling
    back to floor(sqrt(k)) when b outgrows every polynomial.
    """
    k = params.k
    p = params.p_match
    e = Fraction(params.eps)
    denom = float(1 - e - p)
    log_bk = params.b.log_value(k)
    logs = log_bk + math.log(k)
    l3 = math.ceil(8.0 * logs / denom) + 1
    log_rhs = math.log(denom) + log_bk + math.log(k) - math.log(40.0) - 2.0 * math.log(logs)
    l_cap = _frac_floor(Fraction(params.gamma) * k)
    l4 = None
    for L in range(l_cap, 0, -1):
        if params.b.log_value(L) < log_rhs:
            l4 = L
            break
    if l4 is None:
        l4 = math.isqrt(k)
    if l3 >= l4:
        raise WindowThresholdError(
            f"k={k} too small for requested growth sequence (L3_min={l3} >= L4_max={l4})"
        )
    return WindowThresholds(l3, l4)


def _round_mult(x: int, m: int) -> int:
    """Smallest multiple of m that is >= x."""
    return ((x + m - 1) // m) * m


def k0_estimate(
    b: GrowthSequence,
    sigma_size: int,
    eps: Fraction,
    gamma: Fraction,
    cap: int = 10**12,
) -> int:
    """Smallest k (multiple of |Sigma|) where the union failure bound is < 1/2.

    Sums the requirement bound 3 k^3 b_k^2 |Sigma|^2 exp(-sigma^2/4)^{gamma k},
    the intermediate-window term N^2 k^3 exp(-(1-eps-p)/2 L3_min), and the
    short-window term N k^2 exp(-N k/(4 b_L L)) maximized over L (attained at
    L4_max since b is increasing); N = b_k and sigma = gamma^2/3 (shaved).
    Found by exponential + binary search on the eventually monotone log bound.
    """
    if sigma_size < 4:
        raise ValueError("alphabet must have at least 4 symbols")
    g = Fraction(gamma)
    e = Fraction(eps)
    sig = float(g * g / 3 * Fraction(999_999, 1_000_000))
    p = Fraction(1, sigma_size)
    alphabet = Alphabet(sigma_size)

    def log_failure(k: int) -> float:
        k = _round_mult(k, sigma_size)
        log_bk = b.log_value(k)
        t1 = (
            math.log(3) + 3 * math.log(k) + 2 * log_bk + 2 * math.log(sigma_size)
            - (sig * sig / 4) * float(g) * k
        )
        try:
            wt = window_thresholds(
                SamplerParams(alphabet=alphabet, k=k, N=1, eps=e, gamma=g, b=b)
            )
        except (WindowThresholdError, ValueError):
            return math.inf
        t2 = 2 * log_bk + 3 * math.log(k) - float((1 - e - p) / 2) * wt.L3_min
        # the short-window term is largest at the top of the length family; cap
        # the family at sqrt(k) (the fallback window), else the term cannot
        # decay at all for polynomial b with L4_max ~ gamma*k
        l4 = min(wt.L4_max, math.isqrt(k))
        t3 = log_bk + 2 * math.log(k) - math.exp(
            log_bk + math.log(k) - math.log(4.0) - b.log_value(l4) - math.log(l4)
        )
        terms = [t1, t2, t3]
        m = max(terms)
        return m + math.log(sum(math.exp(t - m) for t in terms))

    target = math.log(0.5)
    lo, hi = None, None
    k = sigma_size
    best = math.inf
    while k <= cap:
        v = log_failure(k)
        best = min(best, v)
        if v < target:
            hi = k
            break
        lo = k
        k *= 2
    if hi is None:
        raise ValueError(
            f"no k <= cap {cap} achieves the failure bound < 1/2 "
            f"(best log-bound {best:.3f})"
        )
    if lo is None:
        return sigma_size
    while hi - lo > sigma_size:
        mid = _round_mult((lo + hi) // 2, sigma_size)
        if mid <= lo or mid >= hi:
            break
        if log_failure(mid) < target:
            hi = mid
        else:
            lo = mid
    k = _round_mult(hi, sigma_size)
    while k - sigma_size > lo and log_failure(k - sigma_size) < target:
        k -= sigma_size
    return k


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class DistanceWitness:
    """A (pair, shift, interval) probe; start is in w-coordinates."""

    pair: tuple[int, int]
    t: int
    start: int
    length: int
    distance: Fraction


@dataclass(frozen=True)
class ProportionWitness:
    """Pooled short-window count for (word, start, length) against all others."""

    word: int
    t: int
    length: int
    count: int
    observations: int

    @property
    def proportion(self) -> Fraction:
        return Fraction(self.count, self.observations)


@dataclass
class VerificationReport:
    uniformity_ok: bool
    substantial_min_distance: Fraction | None = None
    substantial_witness: DistanceWitness | None = None
    substantial_ok: bool | None = None
    intermediate_min_distance: Fraction | None = None
    intermediate_witness: DistanceWitness | None = None
    intermediate_ok: bool | None = None
    short_substring_worst_proportion: Fraction | None = None
    short_substring_witness: ProportionWitness | None = None
    short_substring_ok: bool | None = None
    short_substring_worst_proportion_2eps: Fraction | None = None
    mode: str = "exhaustive"
    probes: int | None = None
    seed: int | None = None
    tau: int | None = None
    beta: int | None = None
    beta_fallback: bool = False
    checked_properties: tuple[int, ...] = (1, 2, 3, 4)
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        checks = [self.uniformity_ok if 1 in self.checked_properties else True]
        if 2 in self.checked_properties:
            checks.append(bool(self.substantial_ok))
        if 3 in self.checked_properties:
            checks.append(self.intermediate_ok is not False)
        if 4 in self.checked_properties:
            checks.append(self.short_substring_ok is not False)
        return all(checks)

    def to_dict(self) -> dict:
        def dwit(w):
            if w is None:
                return None
            return {
                "pair": list(w.pair), "t": w.t, "start": w.start,
                "length": w.length, "distance": str(w.distance),
            }

        def pwit(w):
            if w is None:
                return None
            return {
                "word": w.word, "t": w.t, "length": w.length,
                "count": w.count, "observations": w.observations,
            }

        frac = lambda x: None if x is None else str(x)
        return {
            "uniformity_ok": self.uniformity_ok,
            "substantial_min_distance": frac(self.substantial_min_distance),
            "substantial_witness": dwit(self.substantial_witness),
            "substantial_ok": self.substantial_ok,
            "intermediate_min_distance": frac(self.intermediate_min_distance),
            "intermediate_witness": dwit(self.intermediate_witness),
            "intermediate_ok": self.intermediate_ok,
            "short_substring_worst_proportion": frac(self.short_substring_worst_proportion),
            "short_substring_witness": pwit(self.short_substring_witness),
            "short_substring_ok": self.short_substring_ok,
            "short_substring_worst_proportion_2eps": frac(
                self.short_substring_worst_proportion_2eps
            ),
            "mode": self.mode,
            "probes": self.probes,
            "seed": self.seed,
            "tau": self.tau,
            "beta": self.beta,
            "beta_fallback": self.beta_fallback,
            "checked_properties": list(self.checked_properties),
            "failures": list(self.failures),
            "passed": self.passed,
        }


@dataclass(frozen=True)
class WordCollection:
    theta: list[Word]
    tau: int
    beta: int
    params: SamplerParams
    report: VerificationReport

    def __post_init__(self):
        if len(self.theta) != self.params.N:
            raise ValueError("collection cardinality differs from params.N")
        if len({w.symbols for w in self.theta}) != len(self.theta):
            raise ValueError("collection words must be distinct")
        if not self.tau <= self.beta:
            raise ValueError("tau must be <= beta")


def _pair_jobs(n: int, tmax_distinct: int, tmax_self: int):
    """Ordered (a, b, t_lo, t_hi) jobs covering every pairwise comparison once."""
    jobs = []
    for a in range(n):
        for b in range(n):
            if a == b:
                if tmax_self >= 1:
                    jobs.append((a, b, 1, tmax_self))
            elif a < b:
                if tmax_distinct >= 0:
                    jobs.append((a, b, 0, tmax_distinct))
            else:
                if tmax_distinct >= 1:
                    jobs.append((a, b, 1, tmax_distinct))
    return jobs


class _WindowScanner:
    """Exact window-distance scans over one word matrix.

    Windows with average below a rational threshold num/den are located with
    the integer transform R[x] = den*P[x] - num*x: the window [s, e) has
    average < num/den exactly when R[e] < R[s]. All arithmetic stays in int32
    (den and num are small; prefixes are bounded by k).
    """

    def __init__(self, mat: np.ndarray):
        self.mat = np.ascontiguousarray(mat, dtype=np.int16)
        self.k = mat.shape[1]
        self._masks: dict = {}
        self._pads: dict = {}

    def _padded(self, a: int, t_hi: int) -> np.ndarray:
        key = (a, t_hi)
        pad = self._pads.get(key)
        if pad is None:
            pad = np.concatenate(
                [self.mat[a], np.full(max(t_hi, 1), -1, dtype=self.mat.dtype)]
            )
            self._pads[key] = pad
        return pad

    def _triangle(self, t_lo: int, t_hi: int) -> np.ndarray:
        """Cached mask[t - t_lo, x] = (x < k - t)."""
        key = ("tri", t_lo, t_hi)
        m = self._masks.get(key)
        if m is None:
            ts = np.arange(t_lo, t_hi + 1)
            m = np.arange(self.k)[None, :] < (self.k - ts)[:, None]
            self._masks[key] = m
        return m

    def _ecols(self, t_lo: int, t_hi: int, off: int, width: int) -> np.ndarray:
        """Cached mask over window ends: e <= n_t, e = off + column."""
        key = ("e", t_lo, t_hi, off, width)
        m = self._masks.get(key)
        if m is None:
            ts = np.arange(t_lo, t_hi + 1)
            m = np.arange(off, off + width)[None, :] <= (self.k - ts)[:, None]
            self._masks[key] = m
        return m

    def _rows(self, a: int, b: int, t_lo: int, t_hi: int):
        """Mismatch matrix M[t - t_lo, x] = (w_a[x+t] != w_b[x]), zero padded."""
        sw = np.lib.stride_tricks.sliding_window_view(self._padded(a, t_hi), self.k)
        m = sw[t_lo : t_hi + 1] != self.mat[b][None, :]
        m &= self._triangle(t_lo, t_hi)
        return np.arange(t_lo, t_hi + 1), m

    def _prefix(self, m: np.ndarray) -> np.ndarray:
        p = np.zeros((m.shape[0], self.k + 1), dtype=np.int32)
        np.cumsum(m, axis=1, out=p[:, 1:])
        return p

    def scan(self, jobs, lmin: int, lmax: int | None, num: int, den: int,
             fail_fast: bool, track_lmin_min: bool):
        """Find windows (length in [lmin, lmax or overlap]) with average < num/den.

        Returns (ok, violations, lmin_candidate): the candidate is the exact
        minimum over length-lmin windows only (None when not tracked).
        """
        k = self.k
        if max(den * k, abs(num) * k) >= 2**30:
            raise ValueError("threshold denominator too large for int32 scan")
        ok = True
        violations: list[DistanceWitness] = []
        cand: tuple[Fraction, DistanceWitness] | None = None
        numx = (num * np.arange(k + 1)).astype(np.int32)
        big = np.int32(2**30)
        for a, b, t_lo, t_hi in jobs:
            ts, m = self._rows(a, b, t_lo, t_hi)
            n_t = k - ts
            p = self._prefix(m)
            r = p * np.int32(den)
            r -= numx[None, :]
            viol = None
            if lmax is None:
                cm = np.minimum.accumulate(r, axis=1)
                v = r[:, lmin:] < cm[:, :-lmin]
                v &= self._ecols(t_lo, t_hi, lmin, k + 1 - lmin)
                viol = v
            else:
                parts = []
                w = lmax - lmin + 1
                if lmax < k + 1:
                    sw = np.lib.stride_tricks.sliding_window_view(r, w, axis=1).min(axis=-1)
                    v1 = r[:, lmax:] < sw[:, : k + 1 - lmax]
                    v1 &= self._ecols(t_lo, t_hi, lmax, k + 1 - lmax)
                    parts.append(("hi", v1))
                if lmax > lmin:
                    cm = np.minimum.accumulate(r, axis=1)
                    v2 = r[:, lmin:lmax] < cm[:, : lmax - lmin]
                    v2 &= self._ecols(t_lo, t_hi, lmin, lmax - lmin)
                    parts.append(("lo", v2))
                viol = parts
            hits = self._collect_hits(viol, lmin, lmax, p, ts, (a, b), num, den)
            if hits:
                ok = False
                violations.extend(hits)
                if fail_fast:
                    return ok, violations, cand
            if track_lmin_min:
                d = p[:, lmin:] - p[:, :-lmin]
                np.putmask(d, ~self._ecols(t_lo, t_hi, lmin, k + 1 - lmin), big)
                flat = int(np.argmin(d))
                ri, ci = divmod(flat, d.shape[1])
                if d[ri, ci] != big:
                    val = Fraction(int(d[ri, ci]), lmin)
                    if cand is None or val < cand[0]:
                        t = int(ts[ri])
                        cand = (val, DistanceWitness((a, b), t, t + ci, lmin, val))
        return ok, violations, cand

    def _collect_hits(self, viol, lmin, lmax, p, ts, pair, num, den, cap=4):
        hits = []
        if viol is None:
            return hits
        if isinstance(viol, np.ndarray):
            groups = [("plain", viol)]
        else:
            groups = viol
        for tag, v in groups:
            if not v.any():
                continue
            rows, cols = np.nonzero(v)
            off = lmin if (lmax is None or tag == "lo") else lmax
            hi = lmax
            for ri, ci in zip(rows[:cap], cols[:cap]):
                t = int(ts[ri])
                e = int(ci + off)
                hits.append(self._locate(p[ri], t, e, lmin, hi, num, den, pair))
        return hits

    def _locate(self, prow, t, e, lmin, lmax, num, den, pair):
        hi_len = e if lmax is None else min(e, lmax)
        for L in range(lmin, hi_len + 1):
            s = e - L
            if s < 0:
                break
            mism = int(prow[e] - prow[s])
            if mism * den < num * L:
                return DistanceWitness(pair, t, t + s, L, Fraction(mism, L))
        raise AssertionError("violation vanished on relocation")

    def row_min(self, a, b, t, lmin, lmax, pair):
        """Exact min over windows of length [lmin, min(2*lmin-1, lmax, n_t)] in one row."""
        k = self.k
        ts, m = self._rows(a, b, t, t)
        p = self._prefix(m)
        n_t = k - t
        hi = 2 * lmin - 1 if lmax is None else min(2 * lmin - 1, lmax)
        hi = min(hi, n_t)
        best = None
        for L in range(lmin, hi + 1):
            d = p[0, L : n_t + 1] - p[0, : n_t + 1 - L]
            if d.size == 0:
                continue
            ci = int(np.argmin(d))
            val = Fraction(int(d[ci]), L)
            if best is None or val < best[0]:
                best = (val, DistanceWitness(pair, t, t + ci, L, val))
        return best


def _exact_family_min(scanner, jobs, lmin, lmax, start: tuple[Fraction, DistanceWitness]):
    """Lower a candidate minimum until no window in the family beats it.

    The true family minimum is attained at a length < 2*lmin (longer windows
    split into two >= lmin halves, one no better), so refining candidates via
    row_min over [lmin, 2*lmin) converges to the exact minimum.
    """
    best = start
    for _ in range(64):
        c = best[0]
        ok, viols, _ = scanner.scan(
            jobs, lmin, lmax, c.numerator, c.denominator,
            fail_fast=False, track_lmin_min=False,
        )
        if ok:
            return best
        improved = best
        for wit in viols:
            cand = scanner.row_min(wit.pair[0], wit.pair[1], wit.t, lmin, lmax, wit.pair)
            if cand is not None and cand[0] < improved[0]:
                improved = cand
            if wit.distance < improved[0]:
                improved = (wit.distance, wit)
        if improved[0] >= best[0]:
            return best
        best = improved
    return best


def verify_collection(
    theta: list[Word],
    params: SamplerParams,
    tau: int,
    beta: int,
    mode: str = "auto",
    properties: tuple[int, ...] = (1, 2, 3, 4),
    fail_fast: bool = False,
    probes: int = DEFAULT_SAMPLED_PROBES,
    seed: int | None = None,
    growth_override: GrowthSequence | None = None,
) -> VerificationReport:
    """Check the collection properties; failures become report entries.

    mode "auto" runs exhaustively up to N^2 k^3 = 1e11 probes and switches to
    seeded sampling above. ``growth_override`` substitutes a smaller growth
    sequence c (c_n <= b_n) in the short-substring thresholds; ``tau`` is then
    expected to be the threshold computed from c.
    """
    k = params.k
    sigma = params.alphabet.size
    n = len(theta)
    for w in theta:
        if len(w) != k or w.alphabet.size != sigma:
            raise ValueError("all words must have length k over the params alphabet")
    if mode == "auto":
        mode = "exhaustive" if n * n * k**3 <= EXHAUSTIVE_PROBE_CAP else "sampled"
    if mode not in ("exhaustive", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "sampled" and seed is None:
        raise ValueError("sampled mode requires a seed (it is logged in the report)")

    mat = np.stack([w.to_array() for w in theta])
    g = Fraction(params.gamma)
    e = Fraction(params.eps)
    report = VerificationReport(
        uniformity_ok=True, mode=mode, tau=tau, beta=beta,
        checked_properties=tuple(properties),
        probes=probes if mode == "sampled" else None,
        seed=seed if mode == "sampled" else None,
    )

    if 1 in properties:
        target = k // sigma
        counts = np.stack([np.bincount(row, minlength=sigma) for row in mat])
        report.uniformity_ok = bool((counts == target).all())
        if not report.uniformity_ok:
            bad = int(np.nonzero((counts != target).any(axis=1))[0][0])
            report.failures.append(f"word {bad} is not exactly uniform")
            if fail_fast:
                return report

    scanner = _WindowScanner(mat)
    rng = None
    if mode == "sampled":
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 0xA11CE])))

    if 2 in properties:
        bound = params.substantial_bound
        lmin = _frac_ceil(g * k)
        t_distinct = _frac_ceil((1 - g) * k) - 1
        t_self = _frac_floor((1 - g) * k)
        if mode == "exhaustive":
            jobs = _pair_jobs(n, t_distinct, t_self)
            ok, viols, cand = scanner.scan(
                jobs, lmin, None, bound.numerator, bound.denominator,
                fail_fast=fail_fast, track_lmin_min=not fail_fast,
            )
            mind, wit = (None, None)
            if fail_fast and viols:
                mind, wit = viols[0].distance, viols[0]
            elif cand is not None:
                mind, wit = _exact_family_min(scanner, jobs, lmin, None, cand)
        else:
            ok, viols, mind, wit = _sampled_pairwise(
                mat, rng, probes, lmin, None, t_distinct, t_self, bound
            )
        report.substantial_ok = ok
        report.substantial_min_distance = mind
        report.substantial_witness = wit
        if not ok:
            report.failures.append(
                f"substantial separation below {bound}: {viols[0]}"
            )
            if fail_fast:
                return report

    if 3 in properties:
        lmin3, lmax3 = beta, _frac_ceil(g * k) - 1
        t_distinct = _frac_ceil((1 - 2 * g) * k) - 1
        t_self = _frac_floor((1 - 2 * g) * k)
        if lmin3 > lmax3 or t_distinct < 0:
            report.intermediate_ok = True  # empty family at this scale
        else:
            if mode == "exhaustive":
                jobs = _pair_jobs(n, t_distinct, t_self)
                ok, viols, cand = scanner.scan(
                    jobs, lmin3, lmax3, e.numerator, e.denominator,
                    fail_fast=fail_fast, track_lmin_min=not fail_fast,
                )
                mind, wit = (None, None)
                if fail_fast and viols:
                    mind, wit = viols[0].distance, viols[0]
                elif cand is not None:
                    mind, wit = _exact_family_min(scanner, jobs, lmin3, lmax3, cand)
            else:
                ok, viols, mind, wit = _sampled_pairwise(
                    mat, rng, probes, lmin3, lmax3, t_distinct, t_self, e
                )
            report.intermediate_ok = ok
            report.intermediate_min_distance = mind
            report.intermediate_witness = wit
            if not ok:
                report.failures.append(f"intermediate separation below {e}: {viols[0]}")
                if fail_fast:
                    return report

    if 4 in properties:
        if n < 2 or tau > beta - 1:
            report.short_substring_ok = True
        else:
            bseq = growth_override if growth_override is not None else params.b
            if mode == "exhaustive":
                res = _short_exhaustive(mat, k, tau, beta, g, e, bseq, fail_fast)
            else:
                res = _short_sampled(mat, k, tau, beta, g, e, bseq, rng,
                                     max(64, probes // 500))
            report.short_substring_ok = res["ok"]
            report.short_substring_worst_proportion = res["worst"]
            report.short_substring_witness = res["witness"]
            report.short_substring_worst_proportion_2eps = res["worst_2eps"]
            if not res["ok"]:
                report.failures.append(
                    f"short-substring closeness over 2/b_L: {res['witness']}"
                )
    return report


def _sampled_pairwise(mat, rng, probes, lmin, lmax, tmax_distinct, tmax_self, bound):
    n, k = mat.shape
    num, den = bound.numerator, bound.denominator
    worst = None
    worst_wit = None
    ok = True
    for _ in range(probes):
        a = int(rng.integers(n))
        b = int(rng.integers(n))
        t_lo, t_hi = (1, tmax_self) if a == b else (0, tmax_distinct)
        if t_hi < t_lo:
            continue
        t = int(rng.integers(t_lo, t_hi + 1))
        n_t = k - t
        hi_len = n_t if lmax is None else min(lmax, n_t)
        if hi_len < lmin:
            continue
        L = int(rng.integers(lmin, hi_len + 1))
        s = int(rng.integers(0, n_t - L + 1))
        mism = int((mat[a, t + s : t + s + L] != mat[b, s : s + L]).sum())
        d = Fraction(mism, L)
        if worst is None or d < worst:
            worst = d
            worst_wit = DistanceWitness((a, b), t, t + s, L, d)
        if mism * den < num * L:
            ok = False
    return ok, ([worst_wit] if not ok else []), worst, worst_wit


def _growth_bounds(bseq: GrowthSequence, L: int) -> tuple[Fraction, Fraction]:
    """Exact enclosing rational bounds for b_L (tight when b_L is rational)."""
    v = bseq.value(L)
    if isinstance(v, Fraction):
        return v, v
    lo = Fraction(bseq.floor_value(L))
    return lo, lo + 1


def _short_exhaustive(mat, k, tau, beta, gamma, eps, bseq, fail_fast):
    n = mat.shape[0]
    num, den = Fraction(eps).numerator, Fraction(eps).denominator
    tmax = _frac_ceil((1 - 2 * gamma) * k) - 1
    prefix_end = _frac_floor((1 - gamma) * k)
    ls = [L for L in range(tau, beta) if L <= prefix_end and tmax + L <= k]
    if tmax < 0 or not ls:
        return {"ok": True, "worst": None, "witness": None, "worst_2eps": None}
    counts = {L: np.zeros((n, tmax + 1), dtype=np.int64) for L in ls}
    counts2 = {L: np.zeros((n, tmax + 1), dtype=np.int64) for L in ls}
    d_lo = -tmax
    d_hi = prefix_end - min(ls)
    dgrid = np.arange(d_lo, d_hi + 1)
    pad_lo = max(0, -d_lo)
    tgrid = np.arange(tmax + 1)
    xvalid = None
    # mism < r*L with integer mism means mism <= ceil(r*L) - 1
    thr = {L: -((-num * L) // den) - 1 for L in ls}
    thr2 = {L: -((-2 * num * L) // den) - 1 for L in ls}
    valid_l = {
        L: (dgrid[:, None] >= -tgrid[None, :])
        & (dgrid[:, None] <= (prefix_end - L) - tgrid[None, :])
        for L in ls
        if prefix_end - L >= 0
    }
    mat16 = np.ascontiguousarray(mat, dtype=np.int16)
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            wb = mat16[b]
            bp = np.concatenate([
                np.full(pad_lo, -1, dtype=wb.dtype),
                wb,
                np.full(max(d_hi, 0) + 1, -2, dtype=wb.dtype),
            ])
            sw = np.lib.stride_tricks.sliding_window_view(bp, k)
            md = sw[: dgrid.size] != mat16[a][None, :]
            if xvalid is None:
                idx = dgrid[:, None] + pad_lo + np.arange(k)[None, :]
                xvalid = (idx >= pad_lo) & (idx < pad_lo + k)
            md &= xvalid
            pd = np.zeros((md.shape[0], k + 1), dtype=np.int32)
            np.cumsum(md, axis=1, out=pd[:, 1:])
            for L in ls:
                if L not in valid_l:
                    continue
                s = pd[:, L : tmax + 1 + L] - pd[:, : tmax + 1]
                valid = valid_l[L]
                counts[L][a] += ((s <= thr[L]) & valid).sum(axis=0)
                counts2[L][a] += ((s <= thr2[L]) & valid).sum(axis=0)
    ok = True
    worst_margin = None
    worst = None
    worst_wit = None
    worst2 = None
    for L in ls:
        obs = (n - 1) * _frac_floor((1 - gamma) * k / L)
        if obs <= 0:
            continue
        b_lo, b_hi = _growth_bounds(bseq, L)
        for a in range(n):
            c = int(counts[L][a].max())
            t_at = int(counts[L][a].argmax())
            margin = Fraction(c) * b_hi / (2 * obs)  # >1 means violation
            if worst_margin is None or margin > worst_margin:
                worst_margin = margin
                worst = Fraction(c, obs)
                worst_wit = ProportionWitness(a, t_at, L, c, obs)
            if Fraction(c) * b_hi > 2 * obs:
                ok = False
            c2 = int(counts2[L][a].max())
            p2 = Fraction(c2, obs)
            if worst2 is None or p2 > worst2:
                worst2 = p2
        if not ok and fail_fast:
            break
    return {"ok": ok, "worst": worst, "witness": worst_wit, "worst_2eps": worst2}


def _short_sampled(mat, k, tau, beta, gamma, eps, bseq, rng, triples):
    n = mat.shape[0]
    num, den = Fraction(eps).numerator, Fraction(eps).denominator
    tmax = _frac_ceil((1 - 2 * gamma) * k) - 1
    prefix_end = _frac_floor((1 - gamma) * k)
    ls = [L for L in range(tau, beta) if L <= prefix_end and tmax + L <= k]
    if tmax < 0 or not ls:
        return {"ok": True, "worst": None, "witness": None, "worst_2eps": None}
    ok = True
    worst_margin = None
    worst = None
    worst_wit = None
    worst2 = None
    for _ in range(triples):
        a = int(rng.integers(n))
        L = int(ls[int(rng.integers(len(ls)))])
        t = int(rng.integers(0, tmax + 1))
        target = mat[a, t : t + L]
        imax = prefix_end - L
        if imax < 0:
            continue
        count = 0
        count2 = 0
        for b in range(n):
            if b == a:
                continue
            sw = np.lib.stride_tricks.sliding_window_view(mat[b, :prefix_end], L)
            mism = (sw != target[None, :]).sum(axis=1)
            count += int((mism * den < num * L).sum())
            count2 += int((mism * den < 2 * num * L).sum())
        obs = (n - 1) * _frac_floor((1 - gamma) * k / L)
        if obs <= 0:
            continue
        b_lo, b_hi = _growth_bounds(bseq, L)
        margin = Fraction(count) * b_hi / (2 * obs)
        if worst_margin is None or margin > worst_margin:
            worst_margin = margin
            worst = Fraction(count, obs)
            worst_wit = ProportionWitness(a, t, L, count, obs)
        if Fraction(count) * b_hi > 2 * obs:
            ok = False
        p2 = Fraction(count2, obs)
        if worst2 is None or p2 > worst2:
            worst2 = p2
    return {"ok": ok, "worst": worst, "witness": worst_wit, "worst_2eps": worst2}


def replay_distance_witness(theta: list[Word], wit: DistanceWitness) -> Fraction:
    """Recompute a distance witness from scratch; must reproduce it exactly."""
    a, b = wit.pair
    return restricted_distance(theta[a], theta[b], wit.t, wit.start, wit.length)


def replay_proportion_witness(
    theta: list[Word], wit: ProportionWitness, params: SamplerParams
) -> int:
    """Recompute a pooled short-window count from scratch."""
    k = params.k
    g = Fraction(params.gamma)
    e = Fraction(params.eps)
    prefix_end = _frac_floor((1 - g) * k)
    target = theta[wit.word].symbols[wit.t : wit.t + wit.length]
    count = 0
    for b, w in enumerate(theta):
        if b == wit.word:
            continue
        for i in range(0, prefix_end - wit.length + 1):
            seg = w.symbols[i : i + wit.length]
            mism = sum(1 for x, y in zip(seg, target) if x != y)
            if Fraction(mism, wit.length) < e:
                count += 1
    return count


# ---------------------------------------------------------------------------
# sampling


def _draw_uniform_shuffle(params: SamplerParams, rng) -> list[Word] | None:
    sigma = params.alphabet.size
    base = np.repeat(np.arange(sigma, dtype=np.int32), params.k // sigma)
    seen = set()
    out = []
    for _ in range(params.N):
        for _attempt in range(16):
            w = tuple(int(x) for x in rng.permutation(base))
            if w not in seen:
                seen.add(w)
                out.append(Word(w, params.alphabet))
                break
        else:
            return None
    return out


def _draw_iid_repair(params: SamplerParams, rng) -> list[Word] | None:
    sigma = params.alphabet.size
    k = params.k
    target = k // sigma
    budget = _frac_ceil(Fraction(params.sigma) * k)
    seen = set()
    out = []
    for _ in range(params.N):
        syms = rng.integers(0, sigma, size=k).astype(np.int32)
        counts = np.bincount(syms, minlength=sigma)
        for pos in range(k - budget, k):
            if (counts == target).all():
                break
            s = int(syms[pos])
            if counts[s] > target:
                under = np.nonzero(counts < target)[0]
                if under.size == 0:
                    break
                repl = int(under[0])
                syms[pos] = repl
                counts[s] -= 1
                counts[repl] += 1
        if not (counts == target).all():
            return None  # repair budget too small for this draw
        w = tuple(int(x) for x in syms)
        if w in seen:
            return None
        seen.add(w)
        out.append(Word(w, params.alphabet))
    return out


def collection_thresholds(params: SamplerParams) -> tuple[int, int, bool]:
    """(tau, beta, beta_fallback) for the params, with documented fallbacks.

    tau uses the closed form when its hypotheses hold (18*eps < 1 and
    2*eps >= 1/|Sigma|), otherwise the exact ball-count condition. beta falls
    back to ceil(gamma*k) when the proof window is empty at this scale, which
    empties the intermediate length family and extends the short one.
    """
    e = Fraction(params.eps)
    if 18 * e < 1 and 2 * e >= Fraction(1, params.alphabet.size):
        tau = tau_threshold(params.b, params.alphabet.size, e)
    else:
        tau = tau_exact(params.b, params.alphabet.size, e)
    try:
        beta = window_thresholds(params).beta
        fallback = False
    except WindowThresholdError:
        beta = _frac_ceil(Fraction(params.gamma) * params.k)
        fallback = True
    beta = max(beta, tau)
    return tau, beta, fallback


def sample_collection(params: SamplerParams, seed: int) -> WordCollection:
    """Draw and verify a collection; resample up to the retry budget.

    Pure function of (params, seed): retry r uses the derived seed (seed, r).
    Raises SamplerError with the best failing report when the budget runs out.
    """
    sigma = params.alphabet.size
    if sigma**params.k < params.N:
        raise ValueError(
            f"N={params.N} exceeds |Sigma|^k = {sigma}**{params.k}: pigeonhole"
        )
    tau, beta, beta_fallback = collection_thresholds(params)
    draw = _draw_uniform_shuffle if params.draw_mode == "uniform_shuffle" else _draw_iid_repair
    best_report = None
    best_min = None
    for retry in range(params.retry_budget):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, retry])))
        theta = draw(params, rng)
        if theta is None:
            continue
        quick = verify_collection(
            theta, params, tau, beta, mode="auto", fail_fast=True,
            seed=seed, probes=DEFAULT_SAMPLED_PROBES,
        )
        if not quick.passed:
            quick.beta_fallback = beta_fallback
            d = quick.substantial_min_distance
            if d is not None and (best_min is None or d > best_min):
                best_min = d
                best_report = quick
            elif best_report is None:
                best_report = quick
            continue
        report = verify_collection(
            theta, params, tau, beta, mode="auto", seed=seed,
            probes=DEFAULT_SAMPLED_PROBES,
        )
        report.beta_fallback = beta_fallback
        if report.passed:
            return WordCollection(theta, tau, beta, params, report)
        if best_report is None:
            best_report = report
    raise SamplerError(
        f"no passing collection within {params.retry_budget} retries", best_report
    )

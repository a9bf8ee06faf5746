"""Growth sequences b_n and scaling families a_n(t).

The supported closed form is polynomial, b_n = coeff * (scale*(n+offset))^exponent
with a rational exponent; its subexponential growth (log b_n / n -> 0) is
automatic. Explicit tables are supported with a monotonicity check and are
flagged beyond their range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction


def _ipow_root(x: int, r: int) -> int:
    """Floor of the r-th root of a nonnegative integer (exact)."""
    if x < 0:
        raise ValueError("negative radicand")
    if x == 0 or r == 1:
        return x
    guess = int(round(x ** (1.0 / r))) if x.bit_length() < 900 else 1 << (x.bit_length() // r + 1)
    guess = max(guess, 1)
    while True:
        # Newton step on f(g) = g^r - x
        nxt = ((r - 1) * guess + x // guess ** (r - 1)) // r
        if nxt >= guess:
            break
        guess = nxt
    while guess**r > x:
        guess -= 1
    while (guess + 1) ** r <= x:
        guess += 1
    return guess


def floor_rational_power(base: Fraction, exp: Fraction) -> int:
    """floor(base^exp) for base > 0 rational and exp >= 0 rational, exact.

    Uses integer r-th roots: floor((p/q)^{a/b}) = r with r^b q^a <= p^a < (r+1)^b q^a.
    """
    base = Fraction(base)
    exp = Fraction(exp)
    if base <= 0:
        raise ValueError("base must be positive")
    if exp < 0:
        raise ValueError("negative exponent unsupported")
    a, b = exp.numerator, exp.denominator
    p, q = base.numerator, base.denominator
    num = p**a
    den = q**a
    if b == 1:
        return num // den
    # floor of the b-th root of num/den
    r = _ipow_root(num // den, b)
    while (r + 1) ** b * den <= num:
        r += 1
    while r**b * den > num:
        r -= 1
    return r


def pow_lt(base: Fraction, exp: Fraction, rhs_base: Fraction, rhs_exp: Fraction) -> bool:
    """Exact comparison base^exp < rhs_base^rhs_exp (all positive rationals)."""
    base, rhs_base = Fraction(base), Fraction(rhs_base)
    exp, rhs_exp = Fraction(exp), Fraction(rhs_exp)
    d = exp.denominator * rhs_exp.denominator
    le = exp.numerator * rhs_exp.denominator  # exp*d
    re = rhs_exp.numerator * exp.denominator  # rhs_exp*d
    lhs = base**le
    rhs = rhs_base**re
    return lhs < rhs


@dataclass(frozen=True)
class GrowthSequence:
    """Increasing sequence b_n with certified subexponential growth.

    kind "polynomial": b_n = coeff * (scale*(n+offset))^exponent.
    kind "table": explicit values for n = 1..len(table).
    """

    kind: str = "polynomial"
    coeff: Fraction = Fraction(1)
    exponent: Fraction = Fraction(1)
    scale: int = 1
    offset: int = 0
    table: tuple = ()

    def __post_init__(self):
        if self.kind == "polynomial":
            if self.exponent < 0 or self.coeff <= 0 or self.scale < 1:
                raise ValueError("polynomial growth needs coeff > 0, exponent >= 0, scale >= 1")
        elif self.kind == "table":
            vals = [Fraction(v) for v in self.table]
            if not vals:
                raise ValueError("empty table")
            if any(b < a for a, b in zip(vals, vals[1:])):
                raise ValueError("table must be nondecreasing")
        else:
            raise ValueError(f"unknown growth kind {self.kind!r}")

    @property
    def max_n(self) -> int | None:
        return len(self.table) if self.kind == "table" else None

    def value(self, n: int) -> Fraction | float:
        """b_n; exact Fraction when the exponent is an integer."""
        if n < 1:
            raise ValueError("n must be >= 1")
        if self.kind == "table":
            if n > len(self.table):
                raise ValueError(f"table growth sequence defined only up to n={len(self.table)}")
            return Fraction(self.table[n - 1])
        x = Fraction(self.scale * (n + self.offset))
        if self.exponent.denominator == 1:
            return self.coeff * x ** self.exponent.numerator
        return float(self.coeff) * float(x) ** float(self.exponent)

    def floor_value(self, n: int) -> int:
        """floor(b_n), exact for polynomial kinds with rational exponents."""
        if self.kind == "table":
            v = self.value(n)
            return v.numerator // v.denominator
        base = Fraction(self.scale * (n + self.offset))
        if self.exponent.denominator == 1:
            v = self.coeff * base ** self.exponent.numerator
            return v.numerator // v.denominator
        # floor(coeff * base^{a/b}) = floor((coeff^b * base^a)^{1/b})
        b = self.exponent.denominator
        inner = self.coeff**b * base ** self.exponent.numerator
        return floor_rational_power(inner, Fraction(1, b))

    def log_value(self, n: int) -> float:
        """log b_n as a float (for union-bound arithmetic)."""
        if self.kind == "table":
            return math.log(float(self.value(n)))
        return math.log(float(self.coeff)) + float(self.exponent) * math.log(
            self.scale * (n + self.offset)
        )

    def lt_power(self, n: int, rhs_base: int, rhs_exp: Fraction) -> bool:
        """Exact test b_n < rhs_base^rhs_exp."""
        if self.kind == "table":
            v = self.value(n)
            return pow_lt(v, Fraction(1), Fraction(rhs_base), rhs_exp)
        base = Fraction(self.scale * (n + self.offset))
        # coeff * base^e < R^re  <=>  coeff^d * base^{e d} < R^{re d}, d common denom
        e, re = self.exponent, Fraction(rhs_exp)
        d = e.denominator * re.denominator
        lhs = self.coeff**d * base ** (e.numerator * re.denominator)
        rhs = Fraction(rhs_base) ** (re.numerator * e.denominator)
        return lhs < rhs

    def decreasing_beyond(self) -> int | None:
        """Index past which log b_n - c*n is decreasing for every c > 0 slope check.

        For the polynomial kind the ratio b_n / base^{cn} has derivative sign
        determined by exponent/(n+offset) - c*log(base); callers compare at a
        concrete c. Returns None for tables (no analytic certificate).
        """
        if self.kind != "polynomial":
            return None
        return max(1, self.offset + 1)


@dataclass(frozen=True)
class ScalingFunction:
    """Family t -> (n -> a_n(t)), increasing in n and nondecreasing in t.

    kind "polynomial": a_n(t) = n^t. kind "table": per-t tables.
    """

    kind: str = "polynomial"
    tables: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("polynomial", "table"):
            raise ValueError(f"unknown scaling kind {self.kind!r}")

    def value(self, n: int, t: Fraction) -> Fraction | float:
        if n < 1:
            raise ValueError("n must be >= 1")
        t = Fraction(t)
        if self.kind == "polynomial":
            if t.denominator == 1:
                return Fraction(n) ** t.numerator
            return float(n) ** float(t)
        table = self.tables.get(t)
        if table is None:
            raise ValueError(f"no table for t={t}")
        if n > len(table):
            raise ValueError(f"table defined only up to n={len(table)}")
        return Fraction(table[n - 1])

    def growth_at(self, t: Fraction, scale: int = 1, offset: int = 0) -> GrowthSequence:
        """The growth sequence b_k = a_{scale*(k+offset)}(t)."""
        if self.kind != "polynomial":
            raise ValueError("growth_at supported for the polynomial family only")
        return GrowthSequence(
            kind="polynomial", coeff=Fraction(1), exponent=Fraction(t), scale=scale, offset=offset
        )

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from slowent.blockwords import (
    Cat,
    Lit,
    MaterializeCapError,
    Pow,
    Run,
    from_dict,
    has_period,
    lit,
    periodic_hamming,
)


def build_random(rng, depth=0):
    kind = rng.choice(["lit", "run", "cat", "pow"]) if depth < 3 else rng.choice(["lit", "run"])
    if kind == "lit":
        return lit([rng.randrange(4) for _ in range(rng.randint(1, 6))])
    if kind == "run":
        return Run(rng.randrange(4), rng.randint(1, 5))
    if kind == "cat":
        return Cat(tuple(build_random(rng, depth + 1) for _ in range(rng.randint(1, 3))))
    return Pow(build_random(rng, depth + 1), rng.randint(1, 4))


def test_random_nodes_match_reference():
    rng = random.Random(1)
    for _ in range(100):
        bw = build_random(rng)
        arr = bw.materialize()
        assert arr.size == bw.length
        # reference expansion
        ref = []

        def expand(node):
            if isinstance(node, Lit):
                ref.extend(node.symbols)
            elif isinstance(node, Run):
                ref.extend([node.symbol] * node.count)
            elif isinstance(node, Cat):
                for p in node.parts:
                    expand(p)
            else:
                for _ in range(node.reps):
                    expand(node.base)

        expand(bw)
        assert list(arr) == ref
        # windows and point lookups agree
        for _ in range(5):
            i = rng.randrange(bw.length)
            assert bw.symbol_at(i) == ref[i]
            n = rng.randint(1, bw.length - i)
            assert list(bw.window(i, n)) == ref[i : i + n]
        # counts agree
        counts = bw.counts()
        for s in set(ref):
            assert counts[s] == ref.count(s)
        # serialization round-trips
        assert from_dict(bw.to_dict()).to_dict() == bw.to_dict()


def test_bigint_lengths():
    base = lit([0, 1, 2])
    huge = Pow(base, 10**30)
    assert huge.length == 3 * 10**30
    assert huge.symbol_at(10**30 * 3 - 1) == 2
    assert list(huge.window(3 * 10**15, 5)) == [0, 1, 2, 0, 1]
    with pytest.raises(MaterializeCapError):
        huge.materialize()
    assert huge.counts() == {0: 10**30, 1: 10**30, 2: 10**30}


def test_periodic_hamming_matches_bruteforce():
    rng = random.Random(3)
    for _ in range(30):
        p1 = rng.randint(1, 8)
        p2 = rng.randint(1, 8)
        z1 = np.array([rng.randrange(3) for _ in range(p1)])
        z2 = np.array([rng.randrange(3) for _ in range(p2)])
        lcm = p1 * p2 // math.gcd(p1, p2)
        total = lcm * rng.randint(1, 4)
        got = periodic_hamming(z1, z2, total)
        mism = sum(1 for t in range(total) if z1[t % p1] != z2[t % p2])
        assert got == Fraction(mism, total)


def test_periodic_hamming_requires_lcm_divisor():
    with pytest.raises(ValueError):
        periodic_hamming(np.array([0, 1]), np.array([0, 1, 2]), 8)


def test_has_period():
    w = Pow(lit([0, 1, 2]), 100)
    assert has_period(w, 3)
    assert has_period(w, 6)
    assert not has_period(w, 2)
    big = Pow(lit(list(range(50))), 10**9)
    assert has_period(big, 50)
    assert not has_period(big, 49)

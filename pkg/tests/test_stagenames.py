import random
from fractions import Fraction

import numpy as np
import pytest

from slowent.growth import GrowthSequence
from slowent.sampler import SamplerParams, sample_collection
from slowent.stagenames import (
    base_names,
    circular_operator,
    modular_inverse,
    separation_stats,
    spacer_counts,
    stage_names_untwisted,
    twisted_assignment,
)
from slowent.words import Alphabet, Word, hamming_distance, word

AB = Alphabet(4, b=2, e=3)  # symbols {0,1}, markers b=2, e=3


def test_degenerate_single_factor():
    w = word([0], Alphabet(3, b=1, e=2))
    out = circular_operator([w], q=1, p=1, l=1)
    # factor b^(1-0) w^0 e^0 = "b"
    assert out.symbols == (1,)


def test_manual_expansion_q2():
    w0 = word([0, 1], AB)
    out = circular_operator([w0], q=2, p=1, l=2)
    b, e = 2, 3
    assert out.symbols == (b, b, 0, 1, b, 0, 1, e)
    assert len(out) == 1 * 2 * 4


def test_q3_p2_counts():
    w0 = word([0, 1, 0], AB)
    w1 = word([1, 1, 0], AB)
    out = circular_operator([w0, w1], q=3, p=2, l=1)
    bc, ec = spacer_counts(out)
    assert len(out) == 2 * 1 * 9
    assert bc == 12  # k * sum(q - j_i) with j = (0, 2, 1)
    assert ec == 6


def test_random_lengths_and_spacer_counts():
    rng = random.Random(0)
    for _ in range(100):
        q = rng.randint(1, 20)
        p = rng.choice([x for x in range(1, q + 1) if np.gcd(x, q) == 1])
        k = rng.randint(1, 10)
        l = rng.randint(1, 10)
        alph = Alphabet(4, b=2, e=3)
        words = [word([rng.randrange(2) for _ in range(q)], alph) for _ in range(k)]
        out = circular_operator(words, q=q, p=p, l=l)
        assert len(out) == k * l * q * q
        bc, ec = spacer_counts(out)
        assert bc == k * q * (q + 1) // 2
        assert ec == k * q * (q - 1) // 2


def test_gcd_requirement():
    w0 = word([0, 1, 0, 1], AB)
    with pytest.raises(ValueError):
        circular_operator([w0], q=4, p=2, l=1)
    with pytest.raises(ValueError):
        modular_inverse(2, 4)


def test_base_names_default():
    prev = base_names(4, q1=2)
    assert prev.count == 4
    assert all(len(w) == 2 for w in prev.names)
    assert prev.names[2].symbols == (2, 2)


def small_collection(k=40, n=4, seed=5, gamma=Fraction(1, 4)):
    params = SamplerParams(
        alphabet=Alphabet(4), k=k, N=n, eps=Fraction(1, 20), gamma=gamma,
        b=GrowthSequence(exponent=Fraction(2)),
    )
    return sample_collection(params, seed=seed)


def test_stage_names_untwisted_shapes():
    prev = base_names(4, q1=2)
    col = small_collection()
    names = stage_names_untwisted(prev, col, k=40, l=4, q=2, p=1)
    assert names.count == 4
    assert names.name_length == 40 * 4 * 4
    # spacer fraction of each name is exactly 1/l
    for nm in names.names:
        bc, ec = spacer_counts(nm)
        assert Fraction(bc + ec, len(nm)) == Fraction(1, 4)


def test_stage_names_single_prev_symbol():
    # s_prev = 1: all tuples constant 0, every name equals the same operator image
    prev = base_names(1, q1=2)
    alph1 = Alphabet(4)
    # collection over a 1-letter alphabet is impossible through the sampler;
    # build the degenerate tuple directly through the operator
    w = prev.names[0]
    out = circular_operator([w] * 6, q=2, p=1, l=3)
    assert len(out) == 6 * 3 * 4


def test_stage_names_rejects_nonuniform():
    prev = base_names(4, q1=2)
    col = small_collection()
    # corrupt: replace a word with a nonuniform one
    bad = list(col.theta)
    bad[0] = word([0] * 40, Alphabet(4))
    object.__setattr__(col, "theta", bad)
    with pytest.raises(ValueError, match="R2"):
        stage_names_untwisted(prev, col, k=40, l=4, q=2, p=1)


def test_stage_names_rejects_duplicates():
    prev = base_names(4, q1=2)
    col = small_collection()
    bad = list(col.theta)
    bad[1] = bad[0]
    object.__setattr__(col, "theta", bad)
    with pytest.raises(ValueError, match="R3"):
        stage_names_untwisted(prev, col, k=40, l=4, q=2, p=1)


def test_names_distinct_when_collection_distinct():
    prev = base_names(4, q1=2)
    col = small_collection(seed=9)
    names = stage_names_untwisted(prev, col, k=40, l=4, q=2, p=1)
    assert len({w.symbols for w in names.names}) == names.count


def test_twisted_assignment():
    col = small_collection(k=40, n=4)
    tw = twisted_assignment(col, r=40)
    assert tw.k == 160
    assert tw.psi[:40] == col.theta[0].symbols
    assert all(0 <= v < 4 for v in tw.psi)
    # image formula: first index i + psi(j)*block
    i, j, block, s = 0, 0, 10, 8
    tri = tw.rectangle(i, j, block, s)
    assert tri == (tw.psi[0] * 10, 0, 0)
    assert tw.rectangle(3, 17, 10, 8) == (3 + tw.psi[17] * 10, 2, 1)


def test_twisted_assignment_length_mismatch():
    col = small_collection(k=40, n=4)
    with pytest.raises(ValueError):
        twisted_assignment(col, r=40, k=200)


def test_separation_stats_duplicates():
    w = word([0, 1, 2, 3] * 5, Alphabet(4))
    stats = separation_stats([w, w], shift_grid=[0], min_overlap=10)
    assert stats.min_distance == 0


def test_separation_stats_full_mismatch():
    a = word([0] * 12, Alphabet(2))
    b = word([1] * 12, Alphabet(2))
    stats = separation_stats([a, b], shift_grid=[0], min_overlap=6)
    assert stats.min_distance == 1
    assert stats.min_t0_distance == 1
    assert stats.cover_certificate(Fraction(1, 2)) == 2
    assert stats.cover_certificate_centered(Fraction(99, 100)) == 2
    assert stats.cover_certificate(Fraction(3, 4)) is None


def test_separation_stats_matches_overlap_distance():
    rng = random.Random(2)
    alph = Alphabet(4)
    ws = [word([rng.randrange(4) for _ in range(30)], alph) for _ in range(3)]
    stats = separation_stats(ws, shift_grid=list(range(0, 10)), min_overlap=5)
    (a, b), t = stats.min_witness
    from slowent.words import overlap_distance

    _, d = overlap_distance(ws[a], ws[b], t)
    assert d == stats.min_distance

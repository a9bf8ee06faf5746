import json
from fractions import Fraction

import pytest

from slowent.blockwords import Pow, has_period, periodic_hamming
from slowent.cutstack import (
    CutStackError,
    Profile,
    RankTwoSystem,
    advance_stage,
    check_alignment_lemmas,
    coding_words,
    default_exchange_plan,
    hypothesis_certificate,
    init_system,
    mass_report,
    nospacer_baseline,
    nospacer_distribution,
    nospacer_system,
    product_height,
    realigned_at,
    step_weights,
    w_pair_distance,
)
from slowent.formats import dump_canonical_json, sha256_hex


def advance_chain(profile, stages, seed=11):
    sys = init_system(profile)
    systems = [sys]
    traces = []
    for _ in range(stages - 1):
        sys, tr = advance_stage(sys, seed)
        systems.append(sys)
        traces.append(tr)
    return systems, traces


# --- profiles and init --------------------------------------------------------


def test_paper_profile_init():
    sys = init_system(Profile.paper())
    assert sys.tower1.height == 2**21
    assert sys.tower2.height == 2**70
    assert sys.tower1.width == Fraction(1, 2**21)
    assert sys.tower2.width == Fraction(1, 2**70)
    assert sys.H_prev == 1
    assert sys.H == product_height(2**21, 1, 64)
    # the paper's stage-1 seed does not satisfy the full hypothesis block
    assert sys.invariant_report["H_divides_h2"] is False
    assert sys.invariant_report["mass_ratio_in_window"] is True


def test_desk_profile_init_valid():
    sys = init_system(Profile.desk(1))
    assert (sys.tower1.height, sys.tower2.height) == (1, 2)
    assert sys.H == 2
    assert sys.invariant_report["H_divides_h2"]


def test_desk_heights_4_24_init_and_divisibility():
    # heights (4, 24) init fine; H = 4*5 = 20 does not divide 24, so advancing
    # with the chain intact is refused
    prof = Profile.desk(1, heights=(4, 24), widths=(Fraction(1, 4), Fraction(1, 24)))
    sys = init_system(prof)
    assert sys.H == 20
    assert not sys.invariant_report["H_divides_h2"]
    with pytest.raises(CutStackError, match="divisibility"):
        advance_stage(sys, seed=0)


# --- step weights --------------------------------------------------------------


def test_step_weights_single_cut():
    alpha, beta = step_weights(4, 1, 1)
    assert alpha == [Fraction(1)]
    assert beta == [Fraction(1)]


def test_step_weights_example():
    alpha, beta = step_weights(4, 2, 2)
    assert alpha == [Fraction(3, 5), Fraction(2, 5)]
    assert beta == [Fraction(5, 9), Fraction(4, 9)]


def test_step_weights_normalized_random():
    import random

    rng = random.Random(0)
    for _ in range(20):
        h1 = rng.randint(1, 50)
        hp = rng.randint(1, 10)
        c = rng.randint(1, 6)
        alpha, beta = step_weights(h1, hp, c)
        assert sum(alpha) == 1 and sum(beta) == 1


# --- advancing desk stages ------------------------------------------------------


def test_advance_c1_hand_expansion():
    # with h1=1, H_prev=1: H = 1*2 = 2, w^(0) = v1^2, w^(1) = v1 0
    systems, traces = advance_chain(Profile.desk(1), 2)
    words = coding_words(systems[0], 1)
    assert list(words.w[0].materialize()) == [1, 1]
    assert list(words.w[1].materialize()) == [1, 0]
    s2 = systems[1]
    assert s2.tower1.height == 2 + 2  # h2 + (gC)^2 H
    assert list(s2.tower1.coding.materialize()) == [2, 3, 1, 0]


def test_advance_spec_example_w_words():
    # desk C=1, h1=4, H_prev=1: H = 20, w^(0) = v1^5, w^(1) = (v1 0)^4
    prof = Profile.desk(1, heights=(4, 20), widths=(Fraction(1, 4), Fraction(1, 20)))
    sys = init_system(prof)
    words = coding_words(sys, 1)
    assert sys.H == 20
    v1 = list(range(1, 5))
    assert list(words.w[0].materialize()) == v1 * 5
    assert list(words.w[1].materialize()) == (v1 + [0]) * 4
    assert words.w[0].length == 20 and words.w[1].length == 20


@pytest.mark.parametrize("cuts", [1, 2])
def test_three_stages_skeleton(cuts):
    systems, traces = advance_chain(Profile.desk(cuts), 3)
    # mass conservation vs the spacer ledger, exactly
    for prev, nxt, tr in zip(systems, systems[1:], traces):
        assert nxt.total_mass == prev.total_mass + tr.spacer_mass
    # divisibility chain at every stage
    for prev, nxt in zip(systems, systems[1:]):
        assert nxt.H % prev.H == 0  # H_(n-1) | H_n since H_prev | h1
        assert nxt.tower1.height % nxt.H_prev == 0
        assert nxt.tower2.height % nxt.H == 0
    # w-words: length H_n with exact period h1 + k H_(n-1)
    for sysm in systems[:-1]:
        words = coding_words(sysm, 1)
        for k, w in enumerate(words.w):
            assert w.length == sysm.H
            assert has_period(w, words.periods[k])


def test_replay_determinism_hash_identical():
    a, _ = advance_chain(Profile.desk(2), 3, seed=5)
    b, _ = advance_chain(Profile.desk(2), 3, seed=5)
    ha = sha256_hex(dump_canonical_json(a[-1].to_dict()).encode())
    hb = sha256_hex(dump_canonical_json(b[-1].to_dict()).encode())
    assert ha == hb
    c, _ = advance_chain(Profile.desk(2), 3, seed=6)
    hc = sha256_hex(dump_canonical_json(c[-1].to_dict()).encode())
    assert hc != ha


def test_system_serialization_roundtrip():
    systems, _ = advance_chain(Profile.desk(1), 3)
    blob = dump_canonical_json(systems[-1].to_dict())
    back = RankTwoSystem.from_dict(json.loads(blob))
    assert dump_canonical_json(back.to_dict()) == blob


def test_stage_words_periodicity_structural():
    systems, _ = advance_chain(Profile.desk(2), 2)
    words = coding_words(systems[1], 1)
    for k, w in enumerate(words.w):
        assert w.length == systems[1].H
        assert isinstance(w, Pow) or w.length == words.periods[k]
        assert has_period(w, words.periods[k])


def test_trace_and_mass_report():
    systems, traces = advance_chain(Profile.desk(2), 3)
    rep = mass_report(systems[-1])
    assert rep.ledger == systems[-1].spacer_ledger
    assert rep.totals[-1] == systems[-1].total_mass
    for tr in traces:
        assert tr.g == 1
        assert tr.widths["D_high"] == Fraction(tr.g * tr.g) * 2 * systems[0].tower2.width \
            or tr.n > 1  # widths evolve; only stage 1 is against the seed tower


def test_zero_spacer_variant_ledger():
    # C=1 puts all alpha mass on k=0; only the j=1 column adds spacers, so a
    # one-column plan with empty B12 is impossible; instead check the ledger
    # arithmetic: spacer mass equals H_prev * mu(W^(1)) for C=1
    systems, traces = advance_chain(Profile.desk(1), 2)
    tr = traces[0]
    assert tr.spacer_mass == 1 * systems[0].H_prev * tr.widths["B12"]


def test_coding_words_reference_handling():
    systems, _ = advance_chain(Profile.desk(1), 2)
    sys2 = systems[1]
    w_ref = coding_words(sys2, 1)
    assert w_ref.v1.length == sys2.tower1.height
    w_self = coding_words(sys2, 2)
    assert list(w_self.v1.materialize()) == list(range(1, sys2.tower1.height + 1))
    with pytest.raises(CutStackError, match="not tracked"):
        coding_words(sys2, 7)


def test_untracked_codings():
    prof = Profile.desk(1, track_codings=False)
    sys = init_system(prof)
    assert sys.tower1.coding is None
    w_self = coding_words(sys, 1)  # identity labels still available
    assert w_self.v1.length == 1


# --- alignment lemma machinery ---------------------------------------------------


def medium_system():
    prof = Profile.desk(
        2, heights=(10**4, 5 * 10**4),
        widths=(Fraction(1, 10**4), Fraction(1, 10**5)),
        e_words=2, name="medium", effective_index=50,
    )
    return init_system(prof)


def test_hypothesis_certificate_medium():
    cert = hypothesis_certificate(10**4, 1, 2, 50)
    assert cert["certified"]
    bad = hypothesis_certificate(100, 1, 2, 50)
    assert not bad["certified"]


def test_w_pair_distance_rejects_equal_indices():
    sys = medium_system()
    words = coding_words(sys, 1)
    with pytest.raises(ValueError, match="i != j"):
        w_pair_distance(words, 1, 1)


def test_realignment_predicate_small():
    prof = Profile.desk(1, heights=(4, 20), widths=(Fraction(1, 4), Fraction(1, 20)))
    sys = init_system(prof)
    words = coding_words(sys, 1)
    # periods p_0 = 4, p_1 = 5, H_prev = 1: realigned at m iff 20 | m
    for m in range(0, 41):
        expect = m % 4 == 0 and m % 5 == 0
        assert realigned_at(words, 0, 1, m) == expect


def test_w_pair_distance_matches_bruteforce():
    prof = Profile.desk(1, heights=(4, 20), widths=(Fraction(1, 4), Fraction(1, 20)))
    sys = init_system(prof)
    words = coding_words(sys, 1)
    d = w_pair_distance(words, 0, 1)
    w0 = list(words.w[0].materialize())
    w1 = list(words.w[1].materialize())
    mism = sum(1 for a, b in zip(w0, w1) if a != b)
    assert d == Fraction(mism, 20)


def test_alignment_report_medium_profile():
    sys = medium_system()
    words = coding_words(sys, 1)
    rep = check_alignment_lemmas(
        words, sys, cross_shift_grid=[1, 5, 1000], realign_grid=[0, 7]
    )
    assert rep.certified
    assert rep.alpha == 1  # identity coding: every self-shift fully mismatches
    assert rep.pair_bound == (1 - Fraction(6, 2500)) ** 2
    assert rep.all_pairs_pass()
    for t, d in rep.cross_distances:
        assert d == 1  # tower levels never collide with shifted tower-2 levels
    assert rep.products["600"] is not None


# --- no-spacer baseline -----------------------------------------------------------


def test_nospacer_plan_balance():
    plan = default_exchange_plan(Fraction(1, 2), Fraction(1, 3))
    tot_out = {0: Fraction(0), 1: Fraction(0)}
    tot_in = {0: Fraction(0), 1: Fraction(0)}
    for a, b, w in plan:
        tot_out[a] += w
        tot_in[b] += w
    assert tot_out == {0: Fraction(1, 2), 1: Fraction(1, 3)}
    assert tot_in == {0: Fraction(1, 2), 1: Fraction(1, 3)}


def test_nospacer_rejects_spacer_plans():
    with pytest.raises(CutStackError, match="spacers"):
        nospacer_system(3, 5, (Fraction(1, 3), Fraction(1, 5)),
                        cut_plan=[(0, 1, Fraction(1, 3)), (1, 1, Fraction(1, 10))])


def test_nospacer_distribution_masses():
    system = nospacer_system(2, 3, (Fraction(1, 4), Fraction(1, 6)))
    dist = nospacer_distribution(system, 2)
    assert dist.accounted_mass == 1  # the exchange map is complete
    assert all(len(w) == 2 for w, _ in dist.atoms)


def test_nospacer_baseline_small_instance():
    # floor(eps^2 h2) = 0 clamps to a single-symbol window
    out = nospacer_baseline(3, 5, (Fraction(1, 6), Fraction(1, 10)), Fraction(1, 4))
    assert out["window"] == 1
    assert out["cover"].S <= 8
    assert out["within_bound"]


def test_nospacer_doubling_keeps_linear_bound():
    for h1, h2 in ((30, 50), (60, 100)):
        out = nospacer_baseline(
            h1, h2, (Fraction(1, 2 * h1), Fraction(1, 2 * h2)), Fraction(1, 4)
        )
        assert out["cover"].S <= h1 + h2
        assert out["cover"].self_verify(out["distribution"])


def test_nospacer_single_tower():
    out = nospacer_baseline(0, 50, (Fraction(0), Fraction(1, 50)), Fraction(1, 4))
    assert out["cover"].S <= 50
    assert out["within_bound"]

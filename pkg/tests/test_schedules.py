from fractions import Fraction

import pytest

from slowent.formats import dump_canonical_json
from slowent.growth import ScalingFunction
from slowent.schedules import (
    AbcSchedule,
    ScheduleError,
    StageParams,
    build_schedule,
    default_eps_seq,
    safe_domain_bound,
    validate_schedule,
)

HALF = (Fraction(1, 8), Fraction(1, 16), Fraction(1, 32), Fraction(1, 64))


def toy_rigid_upper(n_max=1, eps_seq=None):
    return build_schedule(
        "rigid_upper",
        u=Fraction(1),
        seeds={"q1": 2, "p1": 1, "s0": 2},
        n_max=n_max,
        overrides={1: {"k": 4}, 2: {"k": 4096, "l": 64, "s": 8192}, 3: {"k": 8192, "l": 16, "s": 16384}},
        eps_seq=eps_seq or (Fraction(1, 4),) + HALF,
    )


def test_rigid_upper_closed_forms_at_half_eps():
    # u=1, eps=1/2, q=2, k=4, s_prev=2: s = floor(16*4^2*2^2)*2, l = floor(16*4^2)
    from slowent.schedules import _floor_mul_pow, _guard_pow

    e = Fraction(1, 2)
    u = Fraction(1)
    q, k, s_prev = 2, 4, 2
    l = _floor_mul_pow(8 / e, k, Fraction(q) / u, 1, "l")
    s = _floor_mul_pow(Fraction(8) / e * _guard_pow(k, q, 1, "s"), q, 2 * u, 1, "s") * s_prev
    assert l == 256
    assert s == 2048
    assert k * l * q * q == 4096  # q_2


def test_rigid_upper_stage1_quarter_eps():
    sched = toy_rigid_upper()
    st = sched.stage(1)
    assert st.l == 512  # floor(32*4^2)
    assert st.s == 4096  # floor(32*16*4) * 2
    assert st.k == 4 and st.q == 2


def test_q_recurrence_and_alpha_increment():
    sched = toy_rigid_upper(n_max=3)
    for a, b in zip(sched.stages, sched.stages[1:]):
        assert b.q == a.k * a.l * a.q * a.q
        assert b.alpha - a.alpha == Fraction(1, a.k * a.l * a.q * a.q)
    assert sched.stage(2).q == 4 * 512 * 4


def test_override_divisibility_enforced():
    with pytest.raises(ScheduleError, match="multiple of s_"):
        build_schedule(
            "rigid_upper", Fraction(1), {"q1": 2, "p1": 1, "s0": 2}, 1,
            overrides={1: {"k": 5}}, eps_seq=(Fraction(1, 4),),
        )


def test_rigid_lower_three_stages():
    sched = build_schedule(
        "rigid_lower", Fraction(1), {"q1": 2, "p1": 1, "s0": 1, "k0": 2}, 3,
        overrides={1: {"k": 4}, 2: {"k": 8}, 3: {"k": 1024}},
        eps_seq=(Fraction(1, 4), Fraction(1, 8), Fraction(1, 16)),
    )
    st1, st2, st3 = sched.stages
    assert st1.l == 24  # floor(24 * 2^0)
    assert st1.s == 8  # floor((4*2)^1)
    assert st2.l == 192  # floor(48 * 4)
    assert st2.s == (8 * 4) ** 2
    assert st3.s % st2.s == 0
    validate_schedule(sched)


def test_rigid_lower_indivisible_s_errors():
    # fractional u makes floor((k_n k_(n-1))^(n u)) land off the s_(n-1) grid:
    # s_1 = floor(27^(1/3)) = 3, then floor((6*27)^(2/3)) = 29 with 3 not | 29
    with pytest.raises(ScheduleError, match="s_n must be a multiple"):
        build_schedule(
            "rigid_lower", Fraction(1, 3), {"q1": 2, "p1": 1, "s0": 1, "k0": 1}, 2,
            overrides={1: {"k": 27}, 2: {"k": 6}},
            eps_seq=(Fraction(1, 4), Fraction(1, 8)),
        )


def test_rigid_lower_inf_uses_predeclared_l():
    sched = build_schedule(
        "rigid_lower_inf", None, {"q1": 2, "p1": 1, "s0": 1}, 2,
        overrides={1: {"k": 4}, 2: {"k": 2 ** 20}},
        eps_seq=(Fraction(1, 4), Fraction(1, 8)),
        scale=ScalingFunction(),
        u_seq=(Fraction(2), Fraction(4), Fraction(8)),
    )
    assert sched.stage(1).l == 1
    assert sched.stage(2).l == 4
    # s_1 = floor(a_(k_1 l_2 q_1)(u_2)) = (4*4*2)^4
    assert sched.stage(1).s == 32**4


def test_u_growth_grid_check():
    with pytest.raises(ScheduleError, match="u growth"):
        build_schedule(
            "rigid_lower_inf", None, {"q1": 2, "p1": 1, "s0": 1}, 1,
            overrides={1: {"k": 4}},
            eps_seq=(Fraction(1, 4),),
            scale=ScalingFunction(),
            u_seq=(Fraction(2), Fraction(3)),  # 3 < 2*2 fails a_m(u2) >= a_(m^2)(u1)
        )


def test_cyclic_upper_factored_form():
    sched = build_schedule(
        "cyclic_upper", Fraction(1), {"q1": 2, "p1": 1, "s0": 1, "k0": 2, "r0": 1}, 3,
        overrides={2: {"m": 5, "l": 64}, 3: {"m": 7, "l": 1024}},
        eps_seq=(Fraction(1, 4), Fraction(1, 8), Fraction(1, 16)),
        s_seq=(2, 4, 8),
    )
    for st in sched.stages:
        assert st.k == st.r * st.m
        assert st.r % st.s == 0
    st1 = sched.stage(1)
    assert st1.r == 48  # smallest multiple of lcm(k0, s1) >= 12/eps_1
    assert st1.m == st1.r ** (st1.q * 1)  # k/r = floor(r^(q u)) exactly
    assert st1.l == st1.r**st1.q
    validate_schedule(sched)


def test_cyclic_lower_three_stages():
    sched = build_schedule(
        "cyclic_lower", Fraction(1, 2), {"q1": 2, "p1": 1, "s0": 1, "k0": 2, "r0": 2}, 3,
        eps_seq=(Fraction(1, 4), Fraction(1, 8), Fraction(1, 16)),
        s_seq=(2, 4, 8),
    )
    r_prev = 2
    for st in sched.stages:
        assert st.k == r_prev ** st.n * st.r ** (st.n + 1)
        assert st.r > r_prev
        r_prev = st.r
    # l_1 = floor(r0^(1*(1-u)/u) * 6/eps_1) = floor(2 * 24)
    assert sched.stage(1).l == 48
    validate_schedule(sched)


def test_cyclic_inf_three_stages():
    sched = build_schedule(
        "cyclic_inf", None, {"q1": 2, "p1": 1, "s0": 1, "k0": 2, "r0": 1}, 3,
        eps_seq=(Fraction(1, 4), Fraction(1, 8), Fraction(1, 16)),
        s_seq=(2, 4, 8),
        scale=ScalingFunction(),
        u_seq=(Fraction(1), Fraction(2), Fraction(3)),
    )
    for st in sched.stages:
        assert st.k == st.r * st.m
        assert st.l == st.n * st.n
    # m_1 = floor(a_(r l q)(u_1)) = (24*1*2)^1
    assert sched.stage(1).m == 48
    validate_schedule(sched)


def test_eps_product_certificate():
    with pytest.raises(ScheduleError, match="1/2"):
        build_schedule(
            "rigid_upper", Fraction(1), {"q1": 2, "p1": 1, "s0": 2}, 1,
            overrides={1: {"k": 4}}, eps_seq=(Fraction(3, 4),),
        )


def test_serialization_roundtrip_bit_identical():
    sched = toy_rigid_upper(n_max=3)
    blob = dump_canonical_json(sched.to_dict())
    back = AbcSchedule.from_dict(__import__("json").loads(blob))
    assert dump_canonical_json(back.to_dict()) == blob
    assert back == sched


def test_safe_domain_bounds():
    # l_m = m^2 for stages 2..4
    stages = []
    q, p = 2, 1
    for n in range(1, 5):
        stages.append(StageParams(n=n, q=q, p=p, k=2, l=n * n, s=1))
        p = p * (2 * n * n * q) + 1
        q = 2 * n * n * q * q
    sched = AbcSchedule(
        kind="custom", u=None, eps_seq=default_eps_seq(4), stages=tuple(stages), s0=1
    )
    got = safe_domain_bound(sched, 2, 4)
    assert got.measure_lower_bound == 1 - 2 * (
        Fraction(1, 4) + Fraction(1, 9) + Fraction(1, 16)
    )
    assert got.single_stage == (
        1 - Fraction(2, 4), 1 - Fraction(2, 9), 1 - Fraction(2, 16)
    )
    single = safe_domain_bound(sched, 3, 3)
    assert single.measure_lower_bound == 1 - Fraction(2, 9)


def test_safe_domain_monotone_in_l():
    stages = []
    q, p = 2, 1
    for n in range(1, 4):
        l = 10 ** (n + 1)
        stages.append(StageParams(n=n, q=q, p=p, k=2, l=l, s=1))
        p = p * (2 * l * q) + 1
        q = 2 * l * q * q
    sched = AbcSchedule(kind="custom", u=None, eps_seq=default_eps_seq(3),
                        stages=tuple(stages), s0=1)
    bounds = [safe_domain_bound(sched, n, 3).measure_lower_bound for n in (1, 2, 3)]
    assert bounds[0] < bounds[1] < bounds[2]


def test_safe_domain_range_errors():
    sched = toy_rigid_upper(n_max=2)
    with pytest.raises(ScheduleError):
        safe_domain_bound(sched, 1, 5)

import itertools

import numpy as np
import pytest

from omega_forge.core import SftSystem
from omega_forge.covers import refines
from omega_forge.errors import CertificateError, NotChainTransitiveError, NotInjectiveError, SftNotTransitiveError
from omega_forge.fixedpoint import to_fixed
from omega_forge.realization import (
    OrbitBuildState,
    Task,
    admissible_words,
    assemble_realization,
    build_orbit,
    complete_to_bijection,
    extend_by_loop,
    is_x_U_loop,
    orbit_from_json,
    orbit_to_json,
    plan_tasks,
    realize,
    realize_sft,
)

from conftest import cycle, discrete_system, grid


def test_plan_cycle_single_stage():
    schedule, tasks = plan_tasks(cycle(4), 0, "0.5", "0.5")
    assert len(schedule.covers) == 1
    first = list(itertools.islice(tasks, 12))
    assert all(t.kind == "visit" for t in first)
    assert [t.point for t in first] == [0, 1, 2, 3] * 3


def test_plan_rotation_schedule():
    schedule, tasks = plan_tasks(grid(256, "rotation", "0.6180339887"), 0, "1/8", "1/64")
    assert list(schedule.scales) == [to_fixed(s) for s in ("1/8", "1/32", "1/64")]
    for a, b in zip(schedule.covers, schedule.covers[1:]):
        assert refines(b, a)
    kinds = [t.kind for t in itertools.islice(tasks, 200)]
    assert kinds.index("refine") == len(schedule.targets[0])


def test_plan_not_transitive():
    with pytest.raises(NotChainTransitiveError) as err:
        plan_tasks(discrete_system([0, 1]), 0, "0.5", "0.5")
    assert err.value.witness == (0, 1)


def test_extend_visit_and_refine():
    sys = cycle(5)
    schedule, _ = plan_tasks(sys, 0, "0.5", "0.25")
    state = OrbitBuildState(schedule, 0)
    extend_by_loop(state, Task("visit", 0, None, 3, 3))
    assert state.s == [0, 1, 2, 3, 4]
    assert is_x_U_loop(state.cover, 0, state.s)
    extend_by_loop(state, Task("refine", 1))
    assert state.s == [0, 1, 2, 3, 4] and state.stage == 1 and state.stage_start == [0, 5]


def test_visit_containing_base_still_loops():
    sys = grid(32, "identity")
    schedule, _ = plan_tasks(sys, 0, "1/8", "1/8")
    state = OrbitBuildState(schedule, 0)
    extend_by_loop(state, Task("visit", 0, None, 0, 0))
    # chain base -> base has at least one step, so the block holds two points
    assert len(state.s) >= 2
    assert is_x_U_loop(state.cover, 0, state.s)


def test_cycle_orbit_is_true_orbit():
    xi, schedule = build_orbit(cycle(4), 0, "0.5", "0.5", 20)
    assert xi.tolist() == [i % 4 for i in range(20)]


def test_loops_in_log_are_loops(rotation_realization):
    r = rotation_realization
    sched = r.schedule
    for rec in sched.loops[:: max(1, len(sched.loops) // 300)]:
        if rec.end > r.K:
            continue
        assert is_x_U_loop(sched.covers[rec.stage], 0, r.orbit[rec.start : rec.end].tolist())


def test_rotation_visits_and_certificates(rotation_realization):
    r = rotation_realization
    sched = r.schedule
    start = sched.stage_start[-1]
    tail = r.orbit[start:]
    for member, _ in sched.targets[-1]:
        hits = member.contains_many(r.base, r.base.ground)[tail].sum()
        assert hits >= 10
    assert all(c.bad == 0 for c in r.certificates())
    assert all(o == 0 for _, _, o, _ in r.tail_containment())


def test_identity_tail_dense():
    sys = grid(64, "identity")
    r = realize(sys, 0, "1/8", "1/64", 20_000)
    tail = np.unique(r.orbit[r.schedule.stage_start[-1] :])
    pts = sys.ground[tail][:, 0]
    gaps = [min(abs(int(x) - int(p)) for p in pts) for x in sys.ground[:, 0]]
    assert max(gaps) <= 2 * to_fixed("1/64")


def test_assembled_map():
    sys = cycle(3)
    r = realize(sys, 0, "0.5", "0.5", 9)
    assert r.g(("col", 4)) == ("col", 5)
    assert r.g(("inf", 2)) == ("inf", 0)
    with pytest.raises(ValueError):
        r.g(("col", 8))


def test_assembly_rejects_bad_orbit():
    sys = cycle(4)
    xi, schedule = build_orbit(sys, 0, "0.5", "0.5", 12)
    bad = xi.copy()
    bad[5], bad[6] = bad[6], bad[5]
    with pytest.raises(CertificateError) as err:
        assemble_realization(sys, bad, schedule)
    assert err.value.index == 4
    assert assemble_realization(sys, bad, schedule, check=False).certificates()[0].first_bad == 4


def test_empty_stage_starts_monotone():
    sys = grid(64, "identity")
    xi, schedule = build_orbit(sys, 0, "1/8", "1/64", 3)
    starts = list(schedule.stage_start)
    assert starts == sorted(starts)


def test_determinism():
    sys = grid(64, "tent")
    a, _ = build_orbit(sys, 3, "1/8", "1/32", 5000)
    b, _ = build_orbit(sys, 3, "1/8", "1/32", 5000)
    assert a.tobytes() == b.tobytes()


def test_export_round_trip():
    sys = grid(32, "rotation", "0.25", periodic=True)
    r = realize(sys, 0, "1/8", "1/32", 2000)
    doc = orbit_to_json(r, 0)
    back = orbit_from_json(doc, check=True)
    assert np.array_equal(back.orbit, r.orbit)
    assert back.schedule.stage_start == r.schedule.stage_start


def test_completion_rotation():
    sys = grid(256, "rotation", "0.6180339887", periodic=True)
    r = realize(sys, 0, "1/8", "1/64", 5000)
    c = complete_to_bijection(r, tail_length=8)
    assert c.is_permutation() and c.interior_identity()
    assert c.g(("-inf", None)) == ("-inf", None)
    assert c.g(("tail", -1)) == ("col", 0)
    assert c.g(("tail", -8)) == ("tail", -7)
    assert c.g_inverse(("col", 0)) == ("tail", -1)
    x = 17
    assert c.g_inverse(c.g(("inf", x))) == ("inf", x)


def test_completion_tent_witness():
    sys = grid(256, "tent")
    r = realize(sys, 0, "1/8", "1/64", 500)
    with pytest.raises(NotInjectiveError) as err:
        complete_to_bijection(r)
    a, b = err.value.witness
    assert a != b and sys.snapped_map()[a] == sys.snapped_map()[b]


def test_completion_interval_rotation_not_injective():
    sys = grid(256, "rotation", "0.6180339887")
    r = realize(sys, 0, "1/8", "1/64", 500)
    with pytest.raises(NotInjectiveError) as err:
        complete_to_bijection(r)
    assert err.value.witness == (0, 256)


def test_sft_full_shift():
    w = realize_sft(SftSystem([[1, 1], [1, 1]]), 2, 100)
    counts = w.counts(2)
    assert len(w.word) == 100
    assert all(counts[bytes(p)] > 0 for p in itertools.product([0, 1], repeat=2))


def test_sft_golden_mean_language():
    gm = SftSystem([[1, 1], [1, 0]])
    words = admissible_words(gm, 3)
    assert ["".join(map(str, x)) for x in words[3]] == ["000", "001", "010", "100", "101"]
    w = realize_sft(gm, 3, 1000)
    assert w.forbidden_factors() == 0
    counts = w.counts(3)
    assert all(counts[bytes(x)] > 0 for x in words[3])


def test_sft_single_symbol():
    w = realize_sft(SftSystem([[1]]), 4, 50)
    assert set(w.word.tolist()) == {0}


def test_sft_not_transitive():
    with pytest.raises(SftNotTransitiveError) as err:
        realize_sft(SftSystem([[1, 1], [0, 1]]), 2, 10)
    assert err.value.witness == (1, 0)

from decimal import Decimal

import numpy as np
import pytest

from omega_forge.chains import is_chain_transitive
from omega_forge.core import FiniteSystem, random_finite_system
from omega_forge.fixedpoint import from_raw, to_fixed
from omega_forge.omega import (
    hausdorff_distance,
    is_cyclic_permutation,
    omega_limit_exact,
    omega_tail_approx,
    verify_realization,
)
from omega_forge.realization import assemble_realization, realize

from conftest import cycle, discrete_system


def intersection_oracle(f, x, depth):
    """``∩_{n<depth} {f^m(x) : n <= m < 2*depth}`` evaluated directly."""
    orbit = [x]
    for _ in range(2 * depth):
        orbit.append(f[orbit[-1]])
    out = None
    for n in range(depth):
        tail = set(orbit[n : 2 * depth])
        out = tail if out is None else out & tail
    return out


def test_cycle_omega():
    assert omega_limit_exact(cycle(5), 3).sorted() == [0, 1, 2, 3, 4]


def test_absorbing_point():
    sys = discrete_system([max(i - 1, 0) for i in range(8)])
    assert omega_limit_exact(sys, 5).sorted() == [0]


def test_random_functional_graphs_match_intersection():
    rng = np.random.default_rng(21)
    for _ in range(100):
        n = int(rng.integers(1, 61))
        f = rng.integers(0, n, size=n).tolist()
        sys = discrete_system(f)
        x = int(rng.integers(n))
        om = omega_limit_exact(sys, x)
        assert set(om.points) == intersection_oracle(f, x, n + 1)
        assert is_cyclic_permutation(f, om.points)
        assert {f[p] for p in om.points} == set(om.points)


def test_omega_out_of_range():
    with pytest.raises(ValueError):
        omega_limit_exact(cycle(3), 3)


def test_hausdorff_examples():
    assert hausdorff_distance([0, "0.5"], [0, "0.5"]) == 0
    assert hausdorff_distance([0], [1]) == 1
    assert hausdorff_distance([("0", "0"), ("1", "0")], [("0", "0.25")]) == Decimal(1)
    with pytest.raises(ValueError):
        hausdorff_distance([], [1])


def naive_hausdorff(A, B):
    a = [as_rat(p) for p in A]
    b = [as_rat(p) for p in B]
    d = lambda p, q: max(abs(u - v) for u, v in zip(p, q))
    return max(max(min(d(p, q) for q in b) for p in a), max(min(d(p, q) for p in a) for q in b))


def as_rat(p):
    from fractions import Fraction

    return tuple(Fraction(v) for v in (p if isinstance(p, tuple) else (p,)))


def test_hausdorff_random_vs_double_loop():
    rng = np.random.default_rng(4)
    for _ in range(30):
        A = [tuple(f"{v}/1000" for v in rng.integers(0, 1000, 2)) for _ in range(20)]
        B = [tuple(f"{v}/1000" for v in rng.integers(0, 1000, 2)) for _ in range(20)]
        assert to_fixed(hausdorff_distance(A, B)) == to_fixed(naive_hausdorff(A, B))


def test_hausdorff_is_metric():
    rng = np.random.default_rng(9)
    sys = random_finite_system(25, rng)
    sets = [rng.choice(25, size=int(rng.integers(1, 8)), replace=False).tolist() for _ in range(30)]
    for A, B, C in zip(sets, sets[1:], sets[2:]):
        ab = hausdorff_distance(A, B, sys)
        assert ab == hausdorff_distance(B, A, sys)
        assert hausdorff_distance(A, A, sys) == 0
        assert ab <= hausdorff_distance(A, C, sys) + hausdorff_distance(C, B, sys)
        assert (ab == 0) == (set(A) == set(B))


def test_omega_chain_transitive():
    rng = np.random.default_rng(30)
    for _ in range(30):
        sys = random_finite_system(20, rng)
        om = omega_limit_exact(sys, int(rng.integers(20)))
        pts = sorted(om.points)
        sub = FiniteSystem(sys.dist[np.ix_(pts, pts)], [pts.index(int(sys.f[p])) for p in pts])
        assert is_chain_transitive(sub, from_raw(1))


def test_tail_cycle_realization():
    r = realize(cycle(6), 0, "0.5", "0.5", 200)
    assert omega_tail_approx(r, 50).sorted() == list(range(6))
    assert omega_tail_approx(r, 199).sorted() == [int(r.orbit[199])]
    with pytest.raises(ValueError):
        omega_tail_approx(r, 200)


def test_tail_antitone(rotation_realization):
    r = rotation_realization
    prev = None
    for N in (0, 1000, 10_000, 50_000, 99_999):
        cur = set(omega_tail_approx(r, N).points)
        if prev is not None:
            assert cur <= prev
        prev = cur


def test_rotation_report(rotation_realization):
    r = rotation_realization
    rep = verify_realization(r, 10_000, tolerance="2/256", min_visits=10)
    assert rep["pass"], rep
    assert Decimal(rep["checks"]["hausdorff"]["distance"]) <= Decimal(2) / 256
    assert rep["checks"]["continuity"]["final_good_fraction"] == 1.0


def test_cycle_report():
    r = realize(cycle(5), 0, "0.5", "0.5", 500)
    rep = verify_realization(r, 100)
    assert rep["pass"] and rep["checks"]["hausdorff"]["distance"] == "0"


def test_corrupted_report():
    r = realize(cycle(5), 0, "0.5", "0.5", 500)
    o = r.orbit.copy()
    o[100], o[102] = o[102], o[100]
    bad = assemble_realization(r.base, o, r.schedule, check=False)
    rep = verify_realization(bad, 100)
    assert not rep["pass"]
    assert rep["checks"]["continuity"]["first_bad"] == 99


def test_report_bad_N():
    r = realize(cycle(3), 0, "0.5", "0.5", 30)
    rep = verify_realization(r, 30)
    assert not rep["pass"] and "error" in rep["checks"]["hausdorff"]

import json

import numpy as np
import pytest

from omega_forge.core import (
    FiniteSystem,
    GridSystem,
    OuterSet,
    SftSystem,
    enumerate_basis,
    load_system,
    random_finite_system,
    system_to_json,
    trace,
    validate_system,
)
from omega_forge.errors import SubResolutionError, ValidationError
from omega_forge.fixedpoint import SCALE, to_fixed

from conftest import discrete_system, grid


def test_discrete_three_points_valid():
    assert validate_system(discrete_system([0, 1, 2])).ok


def test_triangle_violation_witness():
    sys = FiniteSystem.from_decimals([["0", "1", "5"], ["1", "0", "1"], ["5", "1", "0"]], [0, 1, 2])
    rep = validate_system(sys)
    assert not rep.ok
    tri = [v for v in rep.violations if v.code == "triangle"]
    assert tri and tri[0].witness == (0, 2, 1)


def test_sft_without_outgoing_edge():
    rep = validate_system(SftSystem([[0, 1], [0, 0]]))
    assert [v.witness for v in rep.violations if v.code == "no_outgoing"] == [(1,)]


def test_validation_never_raises_on_junk():
    rep = validate_system(FiniteSystem(np.array([[0, -1], [2, 0]], dtype=np.int64), [0, 7]))
    codes = {v.code for v in rep.violations}
    assert {"map", "positivity", "symmetry"} <= codes
    with pytest.raises(ValidationError):
        load_system({"type": "finite", "n": 2, "dist": [["0", "1"], ["1", "0"]], "f": [0, 5]})


def test_grid_map_values_checked():
    table = np.array([[0], [SCALE // 2], [2 * SCALE]], dtype=np.int64)
    rep = validate_system(GridSystem(1, 2, "table", 0, table))
    assert any(v.code == "map_value" for v in rep.violations)


def test_basis_discrete_singletons():
    sys = discrete_system([0, 1, 2, 3])
    balls = enumerate_basis(sys, "0.5")
    assert len(balls) == 4
    assert [np.nonzero(trace(sys, b))[0].tolist() for b in balls] == [[0], [1], [2], [3]]


def test_basis_small_grid_centers():
    sys = grid(4, "identity")
    balls = enumerate_basis(sys, "1/4")
    assert [b.center for b in balls] == [(to_fixed(c),) for c in ("0", "0.25", "0.5", "0.75", "1")]


def test_basis_m256_covers_every_point():
    sys = grid(256, "identity")
    eps = to_fixed("1/64")
    balls = enumerate_basis(sys, "1/64")
    assert len(balls) == 129
    centers = [b.center[0] for b in balls]
    # every grid point within eps of some center, and no ball wider than 2 eps
    for i in range(257):
        x = i * SCALE // 256
        assert min(abs(x - c) for c in centers) <= eps
    for b in balls:
        pts = sys.ground[trace(sys, b)][:, 0]
        assert pts.max() - pts.min() <= 2 * eps


def test_basis_deterministic_and_complements():
    sys = grid(32, "tent")
    assert enumerate_basis(sys, "1/8") == enumerate_basis(sys, "1/8")
    both = enumerate_basis(sys, "1/8", complements=True)
    assert isinstance(both[1], OuterSet)
    ball, outer = trace(sys, both[0]), trace(sys, both[1])
    assert not (ball & outer).any()


def test_sub_resolution():
    with pytest.raises(SubResolutionError):
        enumerate_basis(grid(64, "identity"), "1/128")
    with pytest.raises(SubResolutionError):
        enumerate_basis(discrete_system([0, 1]), "0")


def test_open_ball_is_closed_eps_ball():
    sys = grid(8, "identity")
    b = enumerate_basis(sys, "1/4")[0]
    assert np.nonzero(trace(sys, b))[0].tolist() == [0, 1, 2]


def test_maps_exact():
    tent = grid(4, "tent")
    assert tent.images[:, 0].tolist() == [0, SCALE // 2, SCALE, SCALE // 2, 0]
    rot = grid(4, "rotation", "0.5", periodic=True)
    assert rot.n == 4
    assert rot.snapped_map().tolist() == [2, 3, 0, 1]
    dbl = grid(4, "doubling")
    assert dbl.snapped_map().tolist() == [0, 2, 0, 2, 0]


def test_snap_tie_goes_to_smaller():
    sys = grid(4, "identity")
    assert sys.snap((SCALE // 8,)) == 0
    assert sys.snap((SCALE // 8 + 1,)) == 1


def test_periodic_distance_wraps():
    sys = grid(8, "identity", periodic=True)
    assert sys.distance(sys.ground[0], sys.ground[7]) == SCALE // 8


@pytest.mark.parametrize(
    "doc",
    [
        {"type": "finite", "n": 2, "dist": [["0", "0.5"], ["0.5", "0"]], "f": [1, 0]},
        {"type": "grid", "dim": 1, "m": 256, "map": {"name": "rotation", "alpha": "0.6180339887"}},
        {"type": "grid", "dim": 2, "m": 4, "map": {"name": "tent"}, "periodic": False},
        {"type": "sft", "k": 2, "adjacency": [[1, 1], [1, 0]]},
    ],
)
def test_json_round_trip(doc):
    sys = load_system(json.dumps(doc))
    again = load_system(system_to_json(sys))
    assert system_to_json(again) == system_to_json(sys)


def test_random_system_is_metric():
    rng = np.random.default_rng(3)
    for n in (1, 2, 10, 40):
        assert validate_system(random_finite_system(n, rng)).ok


def test_two_dimensional_grid():
    sys = grid(4, "identity")
    sq = GridSystem(2, 4, "tent", 0)
    assert sq.n == 25
    assert len(enumerate_basis(sq, "1/4")) == 25
    assert sq.id_from_coords(["0.25", "0.5"]) == 1 * 5 + 2
    assert sys.id_from_coords("0.3") == 1

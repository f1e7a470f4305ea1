"""The compiled and pure-Python kernels must agree exactly."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from omega_forge import kernels

py = kernels.backend("python")
try:
    cy = kernels.backend("cython")
except ImportError:  # extension not built
    cy = None

needs_ext = pytest.mark.skipif(cy is None, reason="compiled kernels not built")


def random_graph(rng, n, p):
    adj = rng.random((n, n)) < p
    rows = [np.nonzero(r)[0] for r in adj]
    ptr = np.concatenate([[0], np.cumsum([len(r) for r in rows])]).astype(np.int64)
    idx = np.concatenate(rows).astype(np.int64) if n else np.zeros(0, np.int64)
    return adj, ptr, idx


def scc_oracle(adj):
    n = len(adj)
    reach = adj.copy() | np.eye(n, dtype=bool)
    for k in range(n):
        reach |= reach[:, [k]] & reach[[k], :]
    return reach & reach.T


@pytest.mark.parametrize("mod", [py, pytest.param(cy, marks=needs_ext)], ids=["python", "cython"])
@pytest.mark.parametrize("seed", range(5))
def test_scc_matches_reachability(mod, seed):
    rng = np.random.default_rng(seed)
    adj, ptr, idx = random_graph(rng, 30, 0.06)
    labels = np.asarray(mod.scc_labels(ptr, idx))
    same = labels[:, None] == labels[None, :]
    assert (same == scc_oracle(adj)).all()


@needs_ext
@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 25), st.floats(0.0, 0.4))
def test_backends_agree(seed, n, p):
    rng = np.random.default_rng(seed)
    adj, ptr, idx = random_graph(rng, n, p)
    assert np.array_equal(py.scc_labels(ptr, idx), cy.scc_labels(ptr, idx))
    t = int(rng.integers(n))
    assert np.array_equal(py.bfs_toward(ptr, idx, t), cy.bfs_toward(ptr, idx, t))

    dist = rng.integers(0, 50, size=(n, n)).astype(np.int64)
    dist = np.minimum(dist, dist.T)
    rows = rng.integers(0, n, size=7).astype(np.int64)
    a = py.dense_within(dist, rows, 20)
    b = cy.dense_within(dist, rows, 20)
    assert all(np.array_equal(u, v) for u, v in zip(a, b))

    pts = rng.integers(0, 1000, size=(n, 2)).astype(np.int64)
    q = rng.integers(0, 1000, size=(5, 2)).astype(np.int64)
    for period in (0, 1000):
        a = py.sup_within(pts, q, 120, period)
        b = cy.sup_within(pts, q, 120, period)
        assert all(np.array_equal(u, v) for u, v in zip(a, b))
        assert py.directed_hausdorff_sup(pts, q, period) == cy.directed_hausdorff_sup(pts, q, period)

    ids_a = np.arange(n, dtype=np.int64)
    ids_b = rows
    assert py.directed_hausdorff_dense(dist, ids_a, ids_b) == cy.directed_hausdorff_dense(dist, ids_a, ids_b)

    good = (rng.random((n, n)) < 0.7).astype(np.uint8)
    orbit = rng.integers(0, n, size=60).astype(np.int64)
    assert tuple(py.pair_certificate(orbit, good, 3)) == tuple(cy.pair_certificate(orbit, good, 3))


def test_pair_certificate_reports_first_bad():
    good = np.ones((3, 3), dtype=np.uint8)
    good[2, 0] = 0
    orbit = np.array([0, 1, 2, 0, 2, 0], dtype=np.int64)
    assert kernels.pair_certificate(orbit, good, 0) == (2, 2)
    assert kernels.pair_certificate(orbit, good, 3) == (1, 4)


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")
    with pytest.raises(ValueError):
        kernels.backend("fortran")

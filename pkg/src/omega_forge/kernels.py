"""Backend selection for the hot kernels.

The compiled ``_ckernels`` extension is used when importable; otherwise the
pure-Python ``_pykernels`` module.  Set ``OMEGA_FORGE_PURE_PYTHON=1`` to force
the fallback.  Both backends take contiguous int64 (uint8 for masks) arrays.
"""
import os

import numpy as np

from . import _pykernels

try:
    if os.environ.get("OMEGA_FORGE_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from . import _ckernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"

INT64_MAX = np.iinfo(np.int64).max


def backend(name=None):
    """Return the kernel module for ``name`` ("cython" / "python"), default active."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


def i64(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def dense_within(dist, rows, eps):
    return _impl.dense_within(i64(dist), i64(rows), int(eps))


def sup_within(points, queries, eps, period=0):
    return _impl.sup_within(i64(points), i64(queries), int(eps), int(period))


def scc_labels(indptr, indices):
    return _impl.scc_labels(i64(indptr), i64(indices))


def bfs_toward(rev_indptr, rev_indices, target):
    return _impl.bfs_toward(i64(rev_indptr), i64(rev_indices), int(target))


def directed_hausdorff_sup(a, b, period=0):
    return int(_impl.directed_hausdorff_sup(i64(a), i64(b), int(period)))


def directed_hausdorff_dense(dist, a_ids, b_ids):
    return int(_impl.directed_hausdorff_dense(i64(dist), i64(a_ids), i64(b_ids)))


def pair_certificate(orbit, good, start=0):
    bad, first = _impl.pair_certificate(
        i64(orbit), np.ascontiguousarray(good, dtype=np.uint8), int(start)
    )
    return int(bad), int(first)

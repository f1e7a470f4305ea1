"""Omega-limit sets, Hausdorff distance and realization verification."""
from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

import numpy as np

from . import kernels
from .chains import build_chain_graph
from .core import FiniteSystem, GridSystem
from .fixedpoint import fmt, from_raw, to_decimal, to_fixed


@dataclass(frozen=True)
class OmegaSet:
    points: frozenset
    mode: str = "exact"
    N: int | None = None
    tolerance: int | None = None

    def __len__(self):
        return len(self.points)

    def __contains__(self, p):
        return p in self.points

    def sorted(self):
        return sorted(self.points)


def omega_limit_exact(sys: FiniteSystem, x: int) -> OmegaSet:
    """The cycle the orbit of ``x`` eventually enters."""
    f = sys.f.tolist()
    if not 0 <= x < len(f):
        raise ValueError(f"point {x} out of range")
    first_seen = {}
    path = []
    while x not in first_seen:
        first_seen[x] = len(path)
        path.append(x)
        x = f[x]
    return OmegaSet(frozenset(path[first_seen[x] :]))


def is_cyclic_permutation(f, points) -> bool:
    """``f`` maps ``points`` onto itself as a single cycle."""
    pts = set(points)
    if not pts:
        return False
    start = next(iter(sorted(pts)))
    x, seen = start, set()
    while True:
        if x not in pts or x in seen:
            return False
        seen.add(x)
        x = int(f[x])
        if x == start:
            return seen == pts


def omega_tail_approx(r, N: int) -> OmegaSet:
    """Orbit values from index ``N`` on, tagged with the final cover scale."""
    if not 0 <= N < r.K:
        raise ValueError(f"N = {N} out of range for an orbit of length {r.K}")
    # orbit entries are ground ids already, so snapping is the identity here
    pts = frozenset(np.unique(r.orbit[N:]).tolist())
    return OmegaSet(pts, "tail", N, r.schedule.scales[-1])


def _coords(points):
    rows = []
    for p in points:
        vals = p if isinstance(p, (tuple, list)) else (p,)
        rows.append([to_fixed(v) for v in vals])
    return np.asarray(rows, dtype=np.int64)


def hausdorff_raw(A, B, metric=None) -> int:
    A, B = list(A), list(B)
    if not A or not B:
        raise ValueError("Hausdorff distance needs two non-empty sets")
    if isinstance(metric, FiniteSystem):
        a, b = np.asarray(A, dtype=np.int64), np.asarray(B, dtype=np.int64)
        return max(
            kernels.directed_hausdorff_dense(metric.dist, a, b),
            kernels.directed_hausdorff_dense(metric.dist, b, a),
        )
    if isinstance(metric, GridSystem):
        a = metric.ground[np.asarray(A, dtype=np.int64)]
        b = metric.ground[np.asarray(B, dtype=np.int64)]
        period = metric.period
    elif metric is None:
        a, b, period = _coords(A), _coords(B), 0
    else:
        raise TypeError(f"unsupported metric {metric!r}")
    return max(kernels.directed_hausdorff_sup(a, b, period), kernels.directed_hausdorff_sup(b, a, period))


def hausdorff_distance(A, B, metric=None) -> Decimal:
    """Hausdorff distance between finite point sets.

    With a system as ``metric`` the sets hold ground ids; without one they hold
    decimal-like scalars or coordinate tuples under the sup metric.
    """
    return to_decimal(hausdorff_raw(A, B, metric))


def verify_realization(r, N: int, tolerance=None, min_visits: int = 1) -> dict:
    """Pass/fail report for a realized orbit, with margins.

    Checks: visits to every final-scale basis ball after the last stage start,
    tail containment and the good-pair certificate per stage, Hausdorff
    distance between the tail and X, and chain transitivity of the tail set at
    every schedule scale.  Never raises on a failing orbit.
    """
    sys, sched = r.base, r.schedule
    tol = to_fixed(tolerance) if tolerance is not None else 2 * sched.scales[-1]
    checks = {}

    last = len(sched.stage_start) - 1
    start = sched.stage_start[last]
    reached_final = last == sched.last
    targets = sched.targets[sched.last]
    counts = []
    for member, _ in targets:
        mask = np.asarray(member.contains_many(sys, sys.ground), dtype=bool)
        counts.append(int(mask[r.orbit[start:]].sum()))
    completed = [0] * len(targets)
    for loop in sched.loops:
        if loop.stage == sched.last and loop.level == sched.last and loop.visit_index < r.K:
            completed[loop.target_index] += 1
    short = [j for j, (c, t) in enumerate(zip(counts, completed)) if c < max(t, min_visits)]
    checks["visits"] = {
        "pass": reached_final and not short,
        "stage": last,
        "targets": len(targets),
        "min_visits": min(counts) if counts else 0,
        "required": min_visits,
        "short_targets": short[:20],
    }

    contain = r.tail_containment()
    checks["tail_containment"] = {
        "pass": all(c[2] == 0 for c in contain),
        "stages": [{"stage": k, "start": s, "outside": o, "first_outside": f} for k, s, o, f in contain],
    }

    certs = r.certificates()
    final = certs[-1]
    checks["continuity"] = {
        "pass": all(c.bad == 0 for c in certs),
        "stages": [c._asdict() for c in certs],
        "first_bad": min((c.first_bad for c in certs if c.bad), default=-1),
        "final_good_fraction": 1.0 if final.pairs == 0 else (final.pairs - final.bad) / final.pairs,
    }

    try:
        tail = omega_tail_approx(r, N)
    except ValueError as exc:
        checks["hausdorff"] = {"pass": False, "error": str(exc)}
        checks["chain_transitive"] = {"pass": False, "error": str(exc)}
    else:
        dist = hausdorff_raw(tail.points, range(sys.n), sys)
        checks["hausdorff"] = {
            "pass": dist <= tol,
            "distance": fmt(dist),
            "tolerance": fmt(tol),
            "tail_size": len(tail),
        }
        verdicts = []
        for eps in sched.scales:
            g = build_chain_graph(sys, from_raw(eps), nodes=tail.points)
            verdicts.append({"epsilon": fmt(eps), "transitive": g.is_strongly_transitive()})
        checks["chain_transitive"] = {"pass": all(v["transitive"] for v in verdicts), "scales": verdicts}

    return {
        "pass": all(c["pass"] for c in checks.values()),
        "checks": checks,
        "params": {"N": N, "K": r.K, "tolerance": fmt(tol), "min_visits": min_visits},
    }

"""System representations, validation, basis enumeration and JSON I/O.

Three kinds of system share one duck-typed surface used by the rest of the
package:

* :class:`FiniteSystem`: ids ``0..n-1`` with an explicit metric and map.
* :class:`GridSystem`: the ``(m+1)^d`` grid of ``[0,1]^d`` (or the ``m^d``
  torus grid when ``periodic``) under the sup metric, with a built-in or
  tabulated map evaluated exactly in fixed point.
* :class:`SftSystem`: a shift of finite type given by its 0/1 transition matrix.

Metric systems expose ``n``, ``ground`` (ambient coordinates of the ground
points), ``images`` (un-snapped ambient images), ``within``, ``dist_many`` and
``snap``.  Ambient points of a finite system are ids; of a grid, int64
coordinate rows.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from pathlib import Path
from typing import Union

import numpy as np

from . import kernels
from .errors import SubResolutionError, ValidationError
from .fixedpoint import SCALE, as_fraction, fmt, to_fixed

BUILTIN_MAPS = ("identity", "tent", "doubling", "rotation")


# --------------------------------------------------------------------------
# systems


@dataclass(frozen=True, eq=False)
class FiniteSystem:
    """A finite metric space with a self-map.  ``dist`` holds raw fixed-point values."""

    dist: np.ndarray
    f: np.ndarray

    kind = "finite"
    resolution = 0

    def __post_init__(self):
        dist = np.array(self.dist, dtype=np.int64)
        f = np.array(self.f, dtype=np.int64).reshape(-1)
        dist.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "f", f)

    @classmethod
    def from_decimals(cls, dist, f):
        """Build from decimal-like entries (``"0.5"``, ``"1/3"``, ints...)."""
        return cls(np.array([[to_fixed(v) for v in row] for row in dist], dtype=np.int64), f)

    @property
    def n(self) -> int:
        return int(self.f.shape[0])

    @property
    def ground(self):
        return np.arange(self.n, dtype=np.int64)

    @property
    def images(self):
        return self.f

    def image(self, i):
        return int(self.f[i])

    def snapped_map(self):
        return self.f

    def dist_many(self, p, pts):
        return self.dist[int(p), np.asarray(pts, dtype=np.int64)]

    def distance(self, a, b) -> int:
        return int(self.dist[int(a), int(b)])

    def within(self, queries, eps: int):
        """CSR of ground ids within ``eps`` (inclusive) of each query point."""
        return kernels.dense_within(self.dist, np.asarray(queries, dtype=np.int64), eps)

    def snap(self, p) -> int:
        return int(p)

    def ground_point(self, i):
        return int(i)

    def check_scale(self, eps: int):
        if eps <= 0:
            raise SubResolutionError("scale must be positive")

    def point_json(self, p):
        return int(p)

    def point_from_json(self, value):
        return int(value)


@dataclass(frozen=True, eq=False)
class GridSystem:
    """Resolution ``1/m`` grid of ``[0,1]^dim`` with the sup metric.

    ``map_name`` is one of ``identity``, ``tent``, ``doubling``, ``rotation`` (shift by
    ``alpha``, taken mod 1) or ``table``; a table gives the image of every grid point
    in id order as raw coordinates.  Built-in maps act coordinate-wise.
    """

    dim: int
    m: int
    map_name: str = "identity"
    alpha: int = 0
    table: np.ndarray | None = None
    periodic: bool = False

    kind = "grid"

    @property
    def side(self) -> int:
        return self.m if self.periodic else self.m + 1

    @property
    def n(self) -> int:
        return self.side ** self.dim

    @property
    def period(self) -> int:
        return SCALE if self.periodic else 0

    @property
    def resolution(self):
        return as_fraction(f"1/{self.m}")

    @cached_property
    def axis_values(self):
        return np.array([round(as_fraction(i) * SCALE / self.m) for i in range(self.side)], dtype=np.int64)

    @cached_property
    def ground(self):
        axes = [self.axis_values] * self.dim
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([a.reshape(-1) for a in mesh], axis=1).astype(np.int64)
        pts.setflags(write=False)
        return pts

    def _apply(self, v):
        name = self.map_name
        if name == "identity":
            out = v.copy()
        elif name == "tent":
            out = np.where(2 * v <= SCALE, 2 * v, 2 * SCALE - 2 * v)
        elif name == "doubling":
            out = (2 * v) % SCALE
        elif name == "rotation":
            out = (v + self.alpha) % SCALE
        else:
            raise ValueError(f"unknown map {name!r}")
        if self.periodic:
            out = out % SCALE
        return out

    @cached_property
    def images(self):
        if self.map_name == "table":
            out = np.array(self.table, dtype=np.int64).reshape(self.n, self.dim)
        else:
            out = self._apply(self.ground)
        out = np.ascontiguousarray(out, dtype=np.int64)
        out.setflags(write=False)
        return out

    def image(self, i):
        return tuple(int(v) for v in self.images[i])

    def ground_point(self, i):
        return tuple(int(v) for v in self.ground[i])

    def _axis_dist(self, a, b):
        d = np.abs(a - b)
        if self.periodic:
            d = np.minimum(d, SCALE - d)
        return d

    def dist_many(self, p, pts):
        p = np.asarray(p, dtype=np.int64).reshape(1, self.dim)
        pts = np.asarray(pts, dtype=np.int64).reshape(-1, self.dim)
        return self._axis_dist(pts, p).max(axis=1)

    def distance(self, a, b) -> int:
        return int(self.dist_many(a, [b])[0])

    def within(self, queries, eps: int):
        q = np.asarray(queries, dtype=np.int64).reshape(-1, self.dim)
        return kernels.sup_within(self.ground, q, eps, self.period)

    def _snap_axis(self, v: int) -> int:
        vals = self.axis_values
        lo = min(int(v) * self.m // SCALE, self.side - 1)
        cands = {lo, (lo + 1) % self.side if self.periodic else min(lo + 1, self.side - 1)}
        if lo > 0:
            cands.add(lo - 1)
        best = None
        for i in sorted(cands):
            d = abs(int(v) - int(vals[i]))
            if self.periodic:
                d = min(d, SCALE - d)
            if best is None or d < best[0]:
                best = (d, i)
        return best[1]

    def snap(self, p) -> int:
        """Nearest grid point, axis by axis; ties go to the smaller index."""
        idx = 0
        for v in np.asarray(p, dtype=np.int64).reshape(-1):
            idx = idx * self.side + self._snap_axis(int(v))
        return idx

    @cached_property
    def _snapped(self):
        out = np.array([self.snap(p) for p in self.images], dtype=np.int64)
        out.setflags(write=False)
        return out

    def snapped_map(self):
        return self._snapped

    def check_scale(self, eps: int):
        if eps <= 0:
            raise SubResolutionError("scale must be positive")
        if eps * self.m < SCALE:
            raise SubResolutionError(f"{fmt(eps)} < 1/{self.m}")

    def point_json(self, p):
        return [fmt(int(v)) for v in np.asarray(p).reshape(-1)]

    def point_from_json(self, value):
        vals = value if isinstance(value, list) else [value]
        return tuple(to_fixed(v) for v in vals)

    @cached_property
    def _index_of_point(self):
        return {tuple(int(v) for v in row): i for i, row in enumerate(self.ground)}

    def ground_id(self, p):
        """Id of the ground point with coordinates exactly ``p``, else None."""
        return self._index_of_point.get(tuple(int(v) for v in np.asarray(p).reshape(-1)))

    def id_from_coords(self, coords) -> int:
        """Id of the grid point nearest to decimal-like coordinates."""
        if not isinstance(coords, (list, tuple)):
            coords = [coords]
        return self.snap([to_fixed(c) for c in coords])


@dataclass(frozen=True, eq=False)
class SftSystem:
    """Shift of finite type on symbols ``0..k-1``; ``adjacency[a][b] = 1`` allows ``ab``."""

    adjacency: np.ndarray

    kind = "sft"

    def __post_init__(self):
        a = np.array(self.adjacency, dtype=np.int64)
        a.setflags(write=False)
        object.__setattr__(self, "adjacency", a)

    @property
    def k(self) -> int:
        return int(self.adjacency.shape[0])

    def successors(self, a):
        return [int(b) for b in np.nonzero(self.adjacency[a])[0]]


System = Union[FiniteSystem, GridSystem, SftSystem]
MetricSystem = Union[FiniteSystem, GridSystem]


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    code: str
    witness: tuple
    message: str


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code, witness, message):
        self.violations.append(Violation(code, tuple(witness), message))

    def to_json(self):
        return {
            "pass": self.ok,
            "violations": [
                {"code": v.code, "witness": list(v.witness), "message": v.message} for v in self.violations
            ],
        }


def _validate_finite(sys: FiniteSystem, rep: ValidationReport, limit: int):
    d = sys.dist
    n = sys.n
    if d.ndim != 2 or d.shape != (n, n):
        rep.add("shape", (), f"dist must be {n}x{n}, got {tuple(d.shape)}")
        return
    for i, fi in enumerate(sys.f.tolist()):
        if not 0 <= fi < n:
            rep.add("map", (i,), f"f({i}) = {fi} is not a valid id")
    for i in np.nonzero(np.diag(d) != 0)[0][:limit]:
        rep.add("diagonal", (int(i),), f"dist[{i}][{i}] != 0")
    off = ~np.eye(n, dtype=bool)
    for i, j in np.argwhere((d <= 0) & off)[:limit]:
        rep.add("positivity", (int(i), int(j)), f"dist[{i}][{j}] <= 0 for distinct points")
    for i, j in np.argwhere(d != d.T)[:limit]:
        if i < j:
            rep.add("symmetry", (int(i), int(j)), f"dist[{i}][{j}] != dist[{j}][{i}]")
    bad = []
    for k in range(n):
        via = d[:, k][:, None] + d[k, :][None, :]
        for i, j in np.argwhere(d > via):
            bad.append((int(i), int(j), k))
    for i, j, k in sorted(bad)[:limit]:
        rep.add(
            "triangle",
            (i, j, k),
            f"triangle at ({i},{j},{k}): dist[{i}][{j}] > dist[{i}][{k}] + dist[{k}][{j}]",
        )


def _validate_grid(sys: GridSystem, rep: ValidationReport, limit: int):
    if sys.dim < 1:
        rep.add("dimension", (sys.dim,), "dimension must be >= 1")
    if sys.m < 2:
        rep.add("resolution", (sys.m,), "m must be >= 2")
    if sys.map_name not in BUILTIN_MAPS + ("table",):
        rep.add("map_name", (), f"unknown map {sys.map_name!r}")
        return
    if not rep.ok:
        return
    if sys.map_name == "table":
        if sys.table is None or np.asarray(sys.table).size != sys.n * sys.dim:
            rep.add("shape", (), f"table must give {sys.n} points of dimension {sys.dim}")
            return
    img = sys.images
    hi = SCALE - 1 if sys.periodic else SCALE
    for i in np.nonzero(((img < 0) | (img > hi)).any(axis=1))[0][:limit]:
        rep.add("map_value", (int(i),), f"image of grid point {i} leaves the unit cube")


def _validate_sft(sys: SftSystem, rep: ValidationReport, limit: int):
    a = sys.adjacency
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        rep.add("shape", (), f"adjacency must be a non-empty square matrix, got {tuple(a.shape)}")
        return
    for i, j in np.argwhere((a != 0) & (a != 1))[:limit]:
        rep.add("entry", (int(i), int(j)), f"adjacency[{i}][{j}] must be 0 or 1")
    for s in np.nonzero(a.sum(axis=1) == 0)[0]:
        rep.add("no_outgoing", (int(s),), f"symbol {s} has no outgoing edge")
    for s in np.nonzero(a.sum(axis=0) == 0)[0]:
        rep.add("no_incoming", (int(s),), f"symbol {s} has no incoming edge")


def validate_system(sys: System, limit: int = 20) -> ValidationReport:
    """Check the invariants of ``sys``; never raises on bad data."""
    rep = ValidationReport()
    try:
        if isinstance(sys, FiniteSystem):
            _validate_finite(sys, rep, limit)
        elif isinstance(sys, GridSystem):
            _validate_grid(sys, rep, limit)
        elif isinstance(sys, SftSystem):
            _validate_sft(sys, rep, limit)
        else:
            rep.add("type", (), f"unsupported system type {type(sys).__name__}")
    except Exception as exc:  # malformed arrays and the like
        rep.add("malformed", (), f"{type(exc).__name__}: {exc}")
    return rep


def require_valid(sys: System) -> System:
    rep = validate_system(sys)
    if not rep.ok:
        raise ValidationError(rep)
    return sys


# --------------------------------------------------------------------------
# basis sets


@dataclass(frozen=True)
class Ball:
    """Open ball ``{p : d(center, p) < radius}``."""

    center: object
    radius: int
    id: int | None = None

    def contains_many(self, sys, pts):
        return sys.dist_many(self.center, pts) < self.radius


@dataclass(frozen=True)
class OuterSet:
    """Complement of the closed ball ``{p : d(center, p) <= radius}``."""

    center: object
    radius: int
    id: int | None = None

    def contains_many(self, sys, pts):
        return sys.dist_many(self.center, pts) > self.radius


@dataclass(frozen=True)
class PointSet:
    """Explicit set of ground ids.  Ambient points belong only if they are those grid points."""

    ids: frozenset
    id: int | None = None

    def contains_many(self, sys, pts):
        if isinstance(sys, FiniteSystem):
            return np.isin(np.asarray(pts, dtype=np.int64), np.fromiter(self.ids, dtype=np.int64))
        pts = np.asarray(pts, dtype=np.int64).reshape(-1, sys.dim)
        out = np.zeros(len(pts), dtype=bool)
        for r, p in enumerate(pts):
            gid = sys.ground_id(p)
            out[r] = gid is not None and gid in self.ids
        return out


@dataclass(frozen=True)
class Meet:
    """Intersection of basis sets."""

    parts: tuple
    id: int | None = None

    def contains_many(self, sys, pts):
        out = None
        for part in self.parts:
            m = part.contains_many(sys, pts)
            out = m if out is None else out & m
        return out


BasisSet = Union[Ball, OuterSet, PointSet, Meet]


def trace(sys: MetricSystem, member: BasisSet) -> np.ndarray:
    """Boolean mask over the ground set."""
    return np.asarray(member.contains_many(sys, sys.ground), dtype=bool)


def contains(sys: MetricSystem, member: BasisSet, p) -> bool:
    pts = np.asarray([p], dtype=np.int64) if isinstance(sys, FiniteSystem) else np.asarray(p).reshape(1, -1)
    return bool(member.contains_many(sys, pts)[0])


def grid_centers(sys: GridSystem, eps: int):
    """Center indices per axis: spacing ``max(h, eps/2)`` rounded down to whole grid steps."""
    step = max(1, (eps * sys.m) // (2 * SCALE))
    idx = list(range(0, sys.side, step))
    if not sys.periodic and idx[-1] != sys.side - 1:
        idx.append(sys.side - 1)
    return idx


def ball_radius(eps: int) -> int:
    # one quantum above eps: the open ball is the closed eps-ball on the fixed-point lattice
    return eps + 1


def enumerate_basis(sys: MetricSystem, eps, complements: bool = False) -> list:
    """Balls of diameter at most ``2*eps`` covering the ground set, in deterministic order.

    Finite systems get one ball per id; grids get an ``eps/2``-spaced net of centers
    in lexicographic order.  With ``complements`` each ball is followed by the
    complement of its closure.
    """
    eps = to_fixed(eps)
    sys.check_scale(eps)
    return basis_at(sys, eps, complements)


def basis_at(sys: MetricSystem, eps: int, complements: bool = False) -> list:
    """``enumerate_basis`` for a raw scale, without the resolution check."""
    r = ball_radius(eps)
    if isinstance(sys, FiniteSystem):
        centers = list(range(sys.n))
    else:
        axes = grid_centers(sys, eps)
        vals = sys.axis_values
        centers = [tuple(int(vals[i]) for i in combo) for combo in product(axes, repeat=sys.dim)]
    out = []
    for c in centers:
        out.append(Ball(c, r, id=len(out)))
        if complements:
            out.append(OuterSet(c, r, id=len(out)))
    return out


# --------------------------------------------------------------------------
# JSON


def _decimal_matrix(rows):
    return np.array([[to_fixed(v) for v in row] for row in rows], dtype=np.int64)


def system_from_json(doc: dict) -> System:
    """Build a system from its JSON description.  Does not validate."""
    kind = doc.get("type")
    if kind == "finite":
        n = int(doc["n"])
        sys = FiniteSystem(_decimal_matrix(doc["dist"]), [int(v) for v in doc["f"]])
        if sys.n != n:
            raise ValueError(f"n = {n} but f has {sys.n} entries")
        return sys
    if kind == "grid":
        map_doc = doc.get("map", {"name": "identity"})
        if isinstance(map_doc, str):
            map_doc = {"name": map_doc}
        name = map_doc.get("name")
        dim = int(doc.get("dim", 1))
        table = None
        if name == "table":
            values = map_doc["values"]
            table = np.array(
                [[to_fixed(v) for v in (row if isinstance(row, list) else [row])] for row in values],
                dtype=np.int64,
            )
        alpha = to_fixed(map_doc.get("alpha", 0)) if name == "rotation" else 0
        return GridSystem(dim, int(doc["m"]), name, alpha, table, bool(doc.get("periodic", False)))
    if kind == "sft":
        sys = SftSystem([[int(v) for v in row] for row in doc["adjacency"]])
        if "k" in doc and int(doc["k"]) != sys.k:
            raise ValueError(f"k = {doc['k']} but adjacency is {sys.k}x{sys.k}")
        return sys
    raise ValueError(f"unknown system type {kind!r}")


def system_to_json(sys: System) -> dict:
    if isinstance(sys, FiniteSystem):
        return {
            "type": "finite",
            "n": sys.n,
            "dist": [[fmt(v) for v in row] for row in sys.dist.tolist()],
            "f": sys.f.tolist(),
        }
    if isinstance(sys, GridSystem):
        map_doc = {"name": sys.map_name}
        if sys.map_name == "rotation":
            map_doc["alpha"] = fmt(sys.alpha)
        if sys.map_name == "table":
            map_doc["values"] = [[fmt(v) for v in row] for row in np.asarray(sys.table).tolist()]
        doc = {"type": "grid", "dim": sys.dim, "m": sys.m, "map": map_doc}
        if sys.periodic:
            doc["periodic"] = True
        return doc
    return {"type": "sft", "k": sys.k, "adjacency": sys.adjacency.tolist()}


def load_system(source, validate: bool = True) -> System:
    """Load from a path, a JSON string or an already-parsed dict."""
    if isinstance(source, dict):
        doc = source
    elif isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        doc = json.loads(Path(source).read_text(encoding="utf-8"))
    else:
        doc = json.loads(source)
    sys = system_from_json(doc)
    return require_valid(sys) if validate else sys


def random_finite_system(n: int, rng: np.random.Generator, max_weight: int = 10) -> FiniteSystem:
    """Random metric (shortest paths over positive integer weights, in units) and random map."""
    w = rng.integers(1, max_weight + 1, size=(n, n)).astype(np.int64)
    w = np.minimum(w, w.T)
    np.fill_diagonal(w, 0)
    for k in range(n):
        w = np.minimum(w, w[:, k][:, None] + w[k, :][None, :])
    f = rng.integers(0, n, size=n)
    return FiniteSystem(w * SCALE, f)

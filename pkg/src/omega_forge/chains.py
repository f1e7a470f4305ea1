"""Chain graphs, chain search and chain-component decomposition.

An edge ``x -> y`` of the chain graph is one admissible chain step: either
``d(f(x), y) <= eps`` (metric form) or ``f(x)`` and ``y`` share a member of a
nice cover (cover form).  Chain transitivity is strong connectivity of this
graph, with at least one step required for chains from a point to itself.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .covers import NiceCover
from .errors import NoChainError
from .fixedpoint import fmt, to_fixed


def _resolve_scale(sys, scale):
    if isinstance(scale, NiceCover):
        if scale.system is not sys:
            raise ValueError("cover belongs to a different system")
        return scale
    raw = to_fixed(scale)
    sys.check_scale(raw)
    return raw


def _sorted_csr(rows_ptr, rows_idx):
    """Sort and dedupe each CSR row, dropping negative (excluded) columns."""
    out = []
    ptr = [0]
    for i in range(len(rows_ptr) - 1):
        row = np.unique(rows_idx[rows_ptr[i] : rows_ptr[i + 1]])
        row = row[row >= 0]
        out.append(row)
        ptr.append(ptr[-1] + len(row))
    idx = np.concatenate(out) if out else np.zeros(0, dtype=np.int64)
    return np.asarray(ptr, dtype=np.int64), idx.astype(np.int64)


class ChainGraph:
    """Directed one-step chain relation over ``nodes`` (ground ids, ascending).

    Internally vertices are local positions into ``nodes``; the public methods
    take and return ground ids.
    """

    def __init__(self, system, scale, nodes, indptr, indices):
        self.system = system
        self.scale = scale
        self.nodes = np.asarray(nodes, dtype=np.int64)
        self.indptr = indptr
        self.indices = indices
        self._local = {int(g): i for i, g in enumerate(self.nodes.tolist())}
        self._toward = {}

    def __len__(self):
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return int(self.indptr[-1])

    def successors(self, x):
        i = self._local[int(x)]
        return self.nodes[self.indices[self.indptr[i] : self.indptr[i + 1]]].tolist()

    def has_edge(self, x, y) -> bool:
        i, j = self._local[int(x)], self._local.get(int(y))
        if j is None:
            return False
        row = self.indices[self.indptr[i] : self.indptr[i + 1]]
        k = np.searchsorted(row, j)
        return bool(k < len(row) and row[k] == j)

    def edges(self):
        out = []
        for i in range(len(self)):
            for j in self.indices[self.indptr[i] : self.indptr[i + 1]].tolist():
                out.append((int(self.nodes[i]), int(self.nodes[j])))
        return out

    @cached_property
    def _reverse(self):
        n = len(self)
        src = np.repeat(np.arange(n, dtype=np.int64), np.diff(self.indptr))
        order = np.lexsort((src, self.indices))
        rev_idx = src[order]
        counts = np.bincount(self.indices, minlength=n)
        rev_ptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        return rev_ptr, np.ascontiguousarray(rev_idx, dtype=np.int64)

    def _distances_to(self, j):
        d = self._toward.get(j)
        if d is None:
            rev_ptr, rev_idx = self._reverse
            d = kernels.bfs_toward(rev_ptr, rev_idx, j)
            self._toward[j] = d
        return d

    def chain(self, x, y) -> "Chain":
        """Shortest chain of at least one step from ``x`` to ``y``.

        Among equally short chains, each hop goes to the smallest id.
        """
        i, j = self._local.get(int(x)), self._local.get(int(y))
        if i is None or j is None:
            raise ValueError(f"point {x if i is None else y} is not a vertex of this chain graph")
        dist = self._distances_to(j)
        ptr, idx = self.indptr, self.indices
        succ = idx[ptr[i] : ptr[i + 1]]
        reach = succ[dist[succ] >= 0]
        if len(reach) == 0:
            raise NoChainError(x, y)
        cur = int(reach[np.argmin(dist[reach])])  # argmin takes the first, i.e. smallest id
        path = [i, cur]
        while cur != j:
            row = idx[ptr[cur] : ptr[cur + 1]]
            cur = int(row[np.nonzero(dist[row] == dist[cur] - 1)[0][0]])
            path.append(cur)
        return Chain(tuple(int(v) for v in self.nodes[path]), self.scale)

    @cached_property
    def scc_labels(self):
        return kernels.scc_labels(self.indptr, self.indices)

    def self_loop(self, i) -> bool:
        row = self.indices[self.indptr[i] : self.indptr[i + 1]]
        return bool(np.any(row == i))

    def is_strongly_transitive(self) -> bool:
        n = len(self)
        if n == 0:
            return False
        if n == 1:
            return self.self_loop(0)
        labels = self.scc_labels
        return bool((labels == labels[0]).all())

    def reachable_from(self, x):
        """Ground ids reachable from ``x`` in one or more steps."""
        i = self._local[int(x)]
        d = kernels.bfs_toward(self.indptr, self.indices, i)
        hit = d > 0
        if not hit[i]:
            rev_ptr, rev_idx = self._reverse
            preds = rev_idx[rev_ptr[i] : rev_ptr[i + 1]]
            hit[i] = self.self_loop(i) or bool(hit[preds].any())
        return set(self.nodes[hit].tolist())

    def transitivity_witness(self):
        """First pair ``(x, y)`` in id order with no chain from ``x`` to ``y``, or None."""
        every = set(self.nodes.tolist())
        for x in self.nodes.tolist():
            missing = every - self.reachable_from(x)
            if missing:
                return (x, min(missing))
        return None

    def to_dot(self, name: str = "chain") -> str:
        lines = [f"digraph {name} {{"]
        for x in self.nodes.tolist():
            lines.append(f"  {x};")
        for x, y in self.edges():
            lines.append(f"  {x} -> {y};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_chain_graph(sys, scale, nodes=None) -> ChainGraph:
    """Chain graph at a metric scale (decimal-like) or for a :class:`NiceCover`.

    ``nodes`` restricts the vertex set to a subset of ground ids.
    """
    scale = _resolve_scale(sys, scale)
    nodes = np.arange(sys.n, dtype=np.int64) if nodes is None else np.unique(np.asarray(list(nodes), dtype=np.int64))
    if isinstance(scale, NiceCover):
        adj = (scale.image_mask[nodes].astype(np.float32) @ scale.mask[nodes].T.astype(np.float32)) > 0.5
        rows = [np.nonzero(r)[0] for r in adj]
        ptr = np.concatenate([[0], np.cumsum([len(r) for r in rows])]).astype(np.int64)
        idx = np.concatenate(rows).astype(np.int64) if rows else np.zeros(0, dtype=np.int64)
        return ChainGraph(sys, scale, nodes, ptr, idx)
    ptr, idx = sys.within(np.asarray(sys.images)[nodes], scale)
    local = np.full(sys.n, -1, dtype=np.int64)
    local[nodes] = np.arange(len(nodes))
    ptr, idx = _sorted_csr(ptr, local[idx])
    return ChainGraph(sys, scale, nodes, ptr, idx)


@dataclass(frozen=True)
class Chain:
    points: tuple
    scale: object = None

    def __post_init__(self):
        if len(self.points) < 2:
            raise ValueError("a chain needs at least one step")

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def is_chain_transitive(sys, scale) -> bool:
    return build_chain_graph(sys, scale).is_strongly_transitive()


def find_chain(sys, scale, x, y) -> Chain:
    """Shortest chain from ``x`` to ``y``; raises :class:`NoChainError` if none exists."""
    graph = scale if isinstance(scale, ChainGraph) else build_chain_graph(sys, scale)
    return graph.chain(x, y)


def is_U_chain(sys, cover: NiceCover, chain) -> bool:
    """Each ``f(x_i)`` and ``x_{i+1}`` lie in a common member of ``cover``."""
    pts = list(chain)
    if not pts:
        raise ValueError("empty chain")
    for a, b in zip(pts, pts[1:]):
        if not (cover.image_mask[a] & cover.mask[b]).any():
            return False
    return True


def is_eps_chain(sys, eps, chain) -> bool:
    eps = to_fixed(eps)
    pts = list(chain)
    return all(int(sys.dist_many(sys.images[a], [sys.ground[b]])[0]) <= eps for a, b in zip(pts, pts[1:]))


@dataclass(frozen=True)
class ChainComponents:
    components: list
    transient: list
    graph: ChainGraph

    @property
    def transitive(self) -> bool:
        return self.graph.is_strongly_transitive()

    def to_json(self):
        return {"transitive": self.transitive, "components": self.components, "transient": self.transient}

    def quotient_dot(self, name: str = "components") -> str:
        """Condensation of the chain graph: one node per component or transient point."""
        cls = {}
        labels = []
        for c, comp in enumerate(self.components):
            labels.append((f"C{c}", " ".join(map(str, comp))))
            for x in comp:
                cls[x] = f"C{c}"
        for x in self.transient:
            cls[x] = f"t{x}"
            labels.append((f"t{x}", str(x)))
        arrows = sorted({(cls[x], cls[y]) for x, y in self.graph.edges() if cls[x] != cls[y]})
        lines = [f"digraph {name} {{"]
        lines += [f'  {node} [label="{text}"];' for node, text in labels]
        lines += [f"  {a} -> {b};" for a, b in arrows]
        lines.append("}")
        return "\n".join(lines) + "\n"


def chain_components(sys, scale) -> ChainComponents:
    """Chain-recurrent classes (components sorted by least id) and transient points."""
    graph = scale if isinstance(scale, ChainGraph) else build_chain_graph(sys, scale)
    labels = graph.scc_labels
    groups = {}
    for i, lab in enumerate(labels.tolist()):
        groups.setdefault(lab, []).append(i)
    comps, transient = [], []
    for members in groups.values():
        ids = sorted(int(graph.nodes[i]) for i in members)
        if len(members) > 1 or graph.self_loop(members[0]):
            comps.append(ids)
        else:
            transient.extend(ids)
    comps.sort(key=lambda c: c[0])
    return ChainComponents(comps, sorted(transient), graph)


def scale_label(scale) -> str:
    return repr(scale) if isinstance(scale, NiceCover) else fmt(scale)

"""Orbit synthesis: realize a chain-transitive system as an omega-limit set.

The orbit ``xi`` is grown one loop at a time from a fixed base point.  Each loop
is a chain base -> target -> base under the cover of the current stage, so
every consecutive pair is good for that cover; refine-tasks move to the next,
finer cover.  Orbit entries are column points ``(n, x_n)``: repeated ambient
values at different indices are different points, which keeps the sequence
injective without embedding tricks.

The assembled system is ``Y = {(n, x_n)} ∪ {∞} × X`` with ``g(n, x_n) =
(n+1, x_{n+1})`` and ``g(∞, x) = (∞, f(x))``.  On grids the limit copy uses
the snapped map so that it stays on the ground set.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field, replace
from functools import cached_property
from itertools import count
from typing import NamedTuple

import numpy as np

from . import kernels
from .chains import ChainGraph, build_chain_graph
from .core import SftSystem, require_valid
from .covers import NiceCover, _ball_cover, common_refinement, refines
from .errors import (
    CertificateError,
    LoopConstructionError,
    NoChainError,
    NotChainTransitiveError,
    NotInjectiveError,
    SftNotTransitiveError,
)
from .fixedpoint import fmt, to_fixed

SCALE_FACTOR = 4


class Task(NamedTuple):
    kind: str  # "visit" or "refine"
    level: int  # scale index of the target; for refine, the stage being entered
    target: object = None
    target_index: int = -1
    point: int = -1


class LoopRecord(NamedTuple):
    start: int
    end: int
    stage: int
    level: int
    target_index: int
    visit_index: int


@dataclass(frozen=True, eq=False)
class CoverSchedule:
    """Covers ``U_0, U_1, ...`` at scales ``eps_0 * 4**-k``, clamped at the floor.

    ``targets[k]`` lists the basis balls at scale ``k`` that meet X (the visit
    targets).  ``stage_start`` and ``loops`` are filled in by :func:`build_orbit`.
    """

    system: object
    scales: tuple
    covers: tuple
    targets: tuple
    stage_start: tuple = ()
    loops: tuple = ()

    @property
    def last(self) -> int:
        return len(self.scales) - 1

    @cached_property
    def graphs(self):
        return tuple(build_chain_graph(self.system, c) for c in self.covers)

    def to_json(self):
        return {
            "scales": [fmt(s) for s in self.scales],
            "stage_start": list(self.stage_start),
            "cover_sizes": [len(c) for c in self.covers],
        }


def schedule_scales(eps0: int, floor: int):
    if floor > eps0:
        raise ValueError("floor must not exceed the initial scale")
    scales = [eps0]
    while scales[-1] > floor:
        nxt = scales[-1] // SCALE_FACTOR
        scales.append(max(nxt, floor))
    return scales


def _target_point(sys, member, mask) -> int:
    ids = np.nonzero(mask)[0]
    centre = getattr(member, "center", None)
    if centre is not None:
        d = sys.dist_many(centre, sys.ground[ids])
        return int(ids[np.argmin(d)])
    return int(ids[0])


def make_schedule(sys, eps0, floor) -> CoverSchedule:
    eps0, floor = to_fixed(eps0), to_fixed(floor)
    sys.check_scale(floor)
    sys.check_scale(eps0)
    scales = schedule_scales(eps0, floor)
    covers, targets = [], []
    for k, eps in enumerate(scales):
        balls = _ball_cover(sys, eps)
        targets.append(tuple((m, _target_point(sys, m, balls.mask[:, j])) for j, m in enumerate(balls.members)))
        cover = balls
        if covers and not refines(cover, covers[-1]):
            cover = common_refinement(cover, covers[-1])
        covers.append(cover)
    return CoverSchedule(sys, tuple(scales), tuple(covers), tuple(targets))


def _task_stream(schedule: CoverSchedule):
    for k in range(schedule.last + 1):
        rounds = count() if k == schedule.last else range(1)
        for _ in rounds:
            for level in range(k + 1):
                for j, (member, point) in enumerate(schedule.targets[level]):
                    yield Task("visit", level, member, j, point)
        if k < schedule.last:
            yield Task("refine", k + 1)


def plan_tasks(sys, base_x, eps0, floor):
    """Cover schedule plus the (infinite) round-robin task stream.

    Stage ``k`` gets one round of visit-tasks over the targets of scales ``0..k``
    followed by a refine-task; the final stage repeats its round forever.
    Raises :class:`NotChainTransitiveError` with a witnessing pair if some stage
    cover admits no chain between two points.
    """
    if not isinstance(sys, SftSystem):
        require_valid(sys)
    if not 0 <= int(base_x) < sys.n:
        raise ValueError(f"base point {base_x} out of range")
    schedule = make_schedule(sys, eps0, floor)
    for k, graph in enumerate(schedule.graphs):
        witness = graph.transitivity_witness()
        if witness is not None:
            raise NotChainTransitiveError(fmt(schedule.scales[k]), witness)
    return schedule, _task_stream(schedule)


@dataclass
class OrbitBuildState:
    """The current condition: orbit so far ``s`` and the stage of its cover."""

    schedule: CoverSchedule
    base: int
    s: list = field(default_factory=list)
    stage: int = 0
    stage_start: list = field(default_factory=lambda: [0])
    log: list = field(default_factory=list)

    @property
    def cover(self) -> NiceCover:
        return self.schedule.covers[self.stage]

    @property
    def graph(self) -> ChainGraph:
        return self.schedule.graphs[self.stage]


def is_x_U_loop(cover: NiceCover, base: int, seq) -> bool:
    """``seq[0]`` shares a member with the base, consecutive pairs are good, and it returns good."""
    seq = list(seq)
    if not seq:
        return False
    if not (cover.mask[seq[0]] & cover.mask[base]).any():
        return False
    good = cover.good_matrix
    steps = zip(seq, seq[1:] + [base])
    return all(good[a, b] for a, b in steps)


def extend_by_loop(state: OrbitBuildState, task: Task) -> OrbitBuildState:
    """Apply one task in place and return the state.

    A visit-task appends the chain base -> target point -> base without its final
    return point; a refine-task switches to the next cover and records where the
    new stage starts.
    """
    if task.kind == "refine":
        if state.stage < state.schedule.last:
            state.stage += 1
            state.stage_start.append(len(state.s))
        return state
    try:
        out = state.graph.chain(state.base, task.point).points
        back = state.graph.chain(task.point, state.base).points
    except NoChainError as exc:
        raise LoopConstructionError(str(exc)) from exc
    block = list(out) + list(back[1:-1])
    if not is_x_U_loop(state.cover, state.base, block):
        raise LoopConstructionError(f"loop through {task.point} is not good for the stage cover")
    start = len(state.s)
    state.s.extend(block)
    state.log.append(LoopRecord(start, len(state.s), state.stage, task.level, task.target_index, start + len(out) - 1))
    return state


def build_orbit(sys, base_x, eps0, floor, K: int):
    """Greedy pass over the task stream until the orbit has ``K`` entries.

    Returns ``(xi, schedule)``; ``xi`` is an int64 array of ground ids.  The
    schedule carries the stage starts and the loop log.
    """
    if K < 1:
        raise ValueError("K must be positive")
    schedule, tasks = plan_tasks(sys, base_x, eps0, floor)
    state = OrbitBuildState(schedule, int(base_x))
    for task in tasks:
        if len(state.s) >= K:
            break
        extend_by_loop(state, task)
    xi = np.asarray(state.s[:K], dtype=np.int64)
    xi.setflags(write=False)
    starts = tuple(s for s in state.stage_start if s < K) or (0,)
    return xi, replace(schedule, stage_start=starts, loops=tuple(state.log))


# --------------------------------------------------------------------------
# assembled system


class StageCertificate(NamedTuple):
    stage: int
    start: int
    pairs: int
    bad: int
    first_bad: int


@dataclass(frozen=True, eq=False)
class RealizedSystem:
    base: object
    orbit: np.ndarray
    schedule: CoverSchedule

    @property
    def K(self) -> int:
        return len(self.orbit)

    def g(self, point):
        """Evaluate the assembled map on ``("col", n)`` or ``("inf", x)``."""
        tag, v = point
        if tag == "col":
            if not 0 <= v < self.K - 1:
                raise ValueError(f"column index {v} has no image inside the truncation")
            return ("col", v + 1)
        if tag == "inf":
            return ("inf", int(self.base.snapped_map()[v]))
        raise ValueError(f"unknown point {point!r}")

    def value(self, n: int) -> int:
        return int(self.orbit[n])

    def certificates(self):
        out = []
        for k, start in enumerate(self.schedule.stage_start):
            good = self.schedule.covers[k].good_matrix
            bad, first = kernels.pair_certificate(self.orbit, good, start)
            out.append(StageCertificate(k, start, max(self.K - 1 - start, 0), bad, first))
        return out

    def tail_containment(self):
        """Per stage: orbit entries from the stage start that fall outside every cover member."""
        out = []
        for k, start in enumerate(self.schedule.stage_start):
            covered = self.schedule.covers[k].mask.any(axis=1)
            outside = np.nonzero(~covered[self.orbit[start:]])[0]
            out.append((k, start, int(len(outside)), int(start + outside[0]) if len(outside) else -1))
        return out


def assemble_realization(sys, xi, schedule: CoverSchedule, check: bool = True) -> RealizedSystem:
    """Wrap an orbit as ``(Y, g)``; with ``check`` the certificates must hold."""
    xi = np.asarray(xi, dtype=np.int64)
    if xi.ndim != 1 or len(xi) == 0:
        raise ValueError("orbit must be a non-empty sequence of ground ids")
    if (xi < 0).any() or (xi >= sys.n).any():
        raise ValueError("orbit entry outside the ground set")
    starts = list(schedule.stage_start)
    if starts != sorted(starts):
        raise ValueError("stage starts must be non-decreasing")
    xi.setflags(write=False)
    r = RealizedSystem(sys, xi, schedule)
    if check:
        for cert in r.certificates():
            if cert.bad:
                raise CertificateError(cert.stage, cert.first_bad)
        for k, _, outside, first in r.tail_containment():
            if outside:
                raise CertificateError(k, first)
    return r


def realize(sys, base_x, eps0, floor, K: int) -> RealizedSystem:
    xi, schedule = build_orbit(sys, base_x, eps0, floor, K)
    return assemble_realization(sys, xi, schedule)


# --------------------------------------------------------------------------
# bijective completion


def injectivity_witness(fmap):
    """First colliding pair ``(a, b)``, ``a < b``, with equal images; None if injective."""
    seen = {}
    for a, y in enumerate(np.asarray(fmap).tolist()):
        if y in seen:
            return (seen[y], a), y
        seen[y] = a
    return None


@dataclass(frozen=True, eq=False)
class CompletedSystem:
    """Finite window of the two-sided completion.

    Window points are encoded as consecutive ints: backward tail ``-M..-1``,
    column ``0..K-1``, limit copy ``∞ × X`` and finally ``-∞``.  ``forward``
    closes the window by sending the last column point to ``-M`` so that the
    whole window map can be checked as a permutation.
    """

    realized: RealizedSystem
    M: int
    forward: np.ndarray
    backward: np.ndarray

    @property
    def K(self):
        return self.realized.K

    def encode(self, point) -> int:
        tag, v = point if isinstance(point, tuple) and len(point) == 2 else (point, None)
        if tag == "tail":
            if not -self.M <= v <= -1:
                raise ValueError(point)
            return self.M + v
        if tag == "col":
            return self.M + v
        if tag == "inf":
            return self.M + self.K + v
        if tag == "-inf":
            return self.M + self.K + self.realized.base.n
        raise ValueError(point)

    def decode(self, code: int):
        code = int(code)
        if code < self.M:
            return ("tail", code - self.M)
        if code < self.M + self.K:
            return ("col", code - self.M)
        if code < self.M + self.K + self.realized.base.n:
            return ("inf", code - self.M - self.K)
        return ("-inf", None)

    def g(self, point):
        return self.decode(self.forward[self.encode(point)])

    def g_inverse(self, point):
        return self.decode(self.backward[self.encode(point)])

    @property
    def wrap_source(self) -> int:
        return self.M + self.K - 1

    def is_permutation(self) -> bool:
        size = len(self.forward)
        return bool(np.array_equal(np.sort(self.forward), np.arange(size)))

    def interior_identity(self) -> bool:
        """``g(g^{-1}(p)) = p`` and ``g^{-1}(g(p)) = p`` away from the wrap edge."""
        size = len(self.forward)
        codes = np.arange(size)
        interior = (codes != self.wrap_source) & (codes != 0)
        fb = self.forward[self.backward[codes]] == codes
        bf = self.backward[self.forward[codes]] == codes
        return bool(fb[interior].all() and bf[interior].all())


def complete_to_bijection(r: RealizedSystem, tail_length: int = 16) -> CompletedSystem:
    """Prepend a backward tail and a fixed ``-∞`` so the window map is bijective.

    Requires the (snapped) base map to be injective; raises
    :class:`NotInjectiveError` with the first colliding pair otherwise.
    """
    fmap = np.asarray(r.base.snapped_map(), dtype=np.int64)
    hit = injectivity_witness(fmap)
    if hit is not None:
        raise NotInjectiveError(*hit)
    M, K, n = int(tail_length), r.K, r.base.n
    if M < 1:
        raise ValueError("tail_length must be positive")
    size = M + K + n + 1
    fwd = np.empty(size, dtype=np.int64)
    fwd[: M + K - 1] = np.arange(1, M + K)  # tail steps forward, -1 -> column 0, column shifts
    fwd[M + K - 1] = 0  # wrap: closes the window
    fwd[M + K : M + K + n] = M + K + fmap
    fwd[size - 1] = size - 1
    # backward map from its own case table; the window checks compare the two
    inv = np.full(n, -1, dtype=np.int64)
    inv[fmap] = np.arange(n)
    bwd = np.empty(size, dtype=np.int64)
    bwd[1 : M + K] = np.arange(0, M + K - 1)
    bwd[0] = M + K - 1
    bwd[M + K : M + K + n] = M + K + inv
    bwd[size - 1] = size - 1
    fwd.setflags(write=False)
    bwd.setflags(write=False)
    return CompletedSystem(r, M, fwd, bwd)


# --------------------------------------------------------------------------
# shifts of finite type


@dataclass(frozen=True, eq=False)
class SymbolicOrbit:
    sft: SftSystem
    word: np.ndarray
    L: int
    burn_in: int = 0

    def counts(self, length: int) -> Counter:
        return factor_counts(self.word, length)

    def min_occurrences(self) -> int:
        words = admissible_words(self.sft, self.L)
        best = None
        for length in range(1, self.L + 1):
            c = self.counts(length)
            for w in words[length]:
                v = c.get(bytes(w), 0)
                best = v if best is None else min(best, v)
        return best or 0

    def forbidden_factors(self) -> int:
        a = self.sft.adjacency
        w = self.word[self.burn_in :]
        return int((a[w[:-1], w[1:]] == 0).sum())


def factor_counts(word, length: int) -> Counter:
    data = bytes(np.asarray(word, dtype=np.uint8).tolist())
    return Counter(data[i : i + length] for i in range(len(data) - length + 1))


def admissible_words(sft: SftSystem, L: int):
    """``words[l]``: admissible words of length ``l`` in lexicographic order."""
    words = {1: [(a,) for a in range(sft.k)]}
    for length in range(2, L + 1):
        words[length] = [w + (b,) for w in words[length - 1] for b in sft.successors(w[-1])]
    return words


def _shortest_walk(sft: SftSystem, a: int, b: int):
    """Symbols strictly between ``a`` and ``b`` on a shortest walk of at least one step."""
    prev = {}
    queue = deque()
    for s in sft.successors(a):
        if s not in prev:
            prev[s] = None
            queue.append(s)
    while queue:
        u = queue.popleft()
        if u == b:
            mid = []
            while prev[u] is not None:
                u = prev[u]
                mid.append(u)
            return mid[::-1]
        for v in sft.successors(u):
            if v not in prev:
                prev[v] = u
                queue.append(v)
    return None


def realize_sft(sft: SftSystem, L: int, K: int) -> SymbolicOrbit:
    """Word of length ``K`` in which every admissible word of length ``<= L`` recurs.

    One cycle walks from symbol 0 to each admissible word in turn, spells it and
    walks back to 0; cycles repeat until the word is long enough.
    """
    require_valid(sft)
    if sft.k > 256:
        raise ValueError("at most 256 symbols are supported")
    for a in range(sft.k):
        for b in range(sft.k):
            if _shortest_walk(sft, a, b) is None:
                raise SftNotTransitiveError((a, b))
    base = 0
    cycle = []
    words = admissible_words(sft, L)
    for length in range(1, L + 1):
        for w in words[length]:
            cycle.extend(_shortest_walk(sft, base, w[0]))
            cycle.extend(w)
            cycle.extend(_shortest_walk(sft, w[-1], base))
            cycle.append(base)
    reps = -(-(K - 1) // len(cycle)) if K > 1 else 0
    word = np.asarray(([base] + cycle * reps)[:K], dtype=np.int64)
    word.setflags(write=False)
    return SymbolicOrbit(sft, word, L)


# --------------------------------------------------------------------------
# orbit export


def orbit_to_json(r: RealizedSystem, base_x: int) -> dict:
    """Export document: system, build parameters, orbit, schedule and certificates."""
    from .core import system_to_json

    sys, sched = r.base, r.schedule
    return {
        "system": system_to_json(sys),
        "params": {
            "base": int(base_x),
            "eps0": fmt(sched.scales[0]),
            "floor": fmt(sched.scales[-1]),
            "K": r.K,
        },
        "orbit": [[n, sys.point_json(sys.ground_point(int(x)))] for n, x in enumerate(r.orbit.tolist())],
        "schedule": sched.to_json(),
        "certificates": {
            "stages": [c._asdict() for c in r.certificates()],
            "tail_containment": [
                {"stage": k, "start": s, "outside": o, "first_outside": f} for k, s, o, f in r.tail_containment()
            ],
        },
    }


def orbit_from_json(doc: dict, check: bool = False) -> RealizedSystem:
    """Rebuild a :class:`RealizedSystem` from :func:`orbit_to_json` output.

    The cover schedule is recomputed from the stored parameters; the loop log
    is not part of the export.
    """
    from .core import GridSystem, system_from_json

    sys = require_valid(system_from_json(doc["system"]))
    params = doc["params"]
    ids = []
    for n, (idx, value) in enumerate(doc["orbit"]):
        if int(idx) != n:
            raise ValueError(f"orbit entry {n} carries index {idx}")
        if isinstance(sys, GridSystem):
            gid = sys.ground_id(sys.point_from_json(value))
            if gid is None:
                raise ValueError(f"orbit entry {n} is not a grid point")
        else:
            gid = sys.point_from_json(value)
        ids.append(gid)
    schedule = make_schedule(sys, params["eps0"], params["floor"])
    starts = tuple(int(s) for s in doc["schedule"]["stage_start"])
    if len(starts) > len(schedule.covers):
        raise ValueError("more stage starts than schedule stages")
    schedule = replace(schedule, stage_start=starts)
    return assemble_realization(sys, ids, schedule, check=check)


def orbit_csv(r: RealizedSystem) -> str:
    sys = r.base
    lines = ["n," + ",".join(f"x{i}" for i in range(getattr(sys, "dim", 1)))]
    for n, x in enumerate(r.orbit.tolist()):
        p = sys.point_json(sys.ground_point(x))
        vals = p if isinstance(p, list) else [p]
        lines.append(f"{n}," + ",".join(str(v) for v in vals))
    return "\n".join(lines) + "\n"

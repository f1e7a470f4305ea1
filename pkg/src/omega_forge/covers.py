"""Nice covers and the cover transformations used by the orbit construction.

Every predicate (refinement, stars, isolation) is decided exactly on the finite
ground set through boolean trace masks: ``mask[p, j]`` says whether ground point
``p`` lies in member ``j``.
"""
from __future__ import annotations

from functools import cached_property

import numpy as np

from .core import (
    Ball,
    FiniteSystem,
    Meet,
    OuterSet,
    PointSet,
    basis_at,
    contains,
    trace,
)
from .errors import IsolationError, StarRefinementError
from .fixedpoint import SCALE, fmt, to_fixed


def _bool_product(a, b):
    """Boolean matrix product through float32 BLAS (exact for counts < 2**24)."""
    return (a.astype(np.float32) @ b.astype(np.float32)) > 0.5


class NiceCover:
    """Finite family of basis sets, each meeting the ground set and jointly covering it.

    ``scale`` is the raw ball scale for covers produced by :func:`make_ball_cover`
    and ``None`` otherwise.
    """

    def __init__(self, system, members, scale=None, check=True):
        self.system = system
        self.members = tuple(members)
        self.scale = scale
        if not self.members:
            raise ValueError("a cover needs at least one member")
        mask = np.stack([trace(system, m) for m in self.members], axis=1)
        mask.setflags(write=False)
        self.mask = mask
        if check:
            empty = np.nonzero(~mask.any(axis=0))[0]
            if len(empty):
                raise ValueError(f"member {int(empty[0])} does not meet X")
            bare = np.nonzero(~mask.any(axis=1))[0]
            if len(bare):
                raise ValueError(f"point {int(bare[0])} is not covered")

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __repr__(self):
        scale = f", scale={fmt(self.scale)}" if self.scale is not None else ""
        return f"NiceCover({len(self)} members{scale})"

    @cached_property
    def image_mask(self):
        """``image_mask[p, j]``: the (un-snapped) image of ground point ``p`` lies in member ``j``."""
        img = self.system.images
        out = np.stack([np.asarray(m.contains_many(self.system, img), dtype=bool) for m in self.members], axis=1)
        out.setflags(write=False)
        return out

    @cached_property
    def transition(self):
        """``transition[a, b]``: ``f(A ∩ X)`` meets ``B``."""
        return _bool_product(self.mask.T, self.image_mask)

    @cached_property
    def good_matrix(self):
        """``good[y, z]`` for ground points: the pair ``(y, z)`` is good for this cover."""
        out = _bool_product(_bool_product(self.mask, self.transition), self.mask.T)
        return np.ascontiguousarray(out, dtype=np.uint8)

    def is_good(self, y, z) -> bool:
        return bool(self.good_matrix[y, z])

    def traces(self):
        return [frozenset(np.nonzero(self.mask[:, j])[0].tolist()) for j in range(len(self))]

    def members_containing(self, p):
        return [j for j in np.nonzero(self.mask[p])[0].tolist()]

    def to_json(self, ids: bool = False):
        if ids:
            return [sorted(t) for t in self.traces()]
        return [member_json(self.system, m) for m in self.members]


def member_json(sys, member):
    if isinstance(member, Ball):
        return {"center": sys.point_json(member.center), "radius": fmt(member.radius)}
    if isinstance(member, OuterSet):
        return {"outside": {"center": sys.point_json(member.center), "radius": fmt(member.radius)}}
    if isinstance(member, PointSet):
        return sorted(member.ids)
    if isinstance(member, Meet):
        return {"meet": [member_json(sys, p) for p in member.parts]}
    raise TypeError(member)


def make_ball_cover(sys, eps) -> NiceCover:
    """Nice cover by the basis balls at scale ``eps`` that meet the ground set."""
    eps = to_fixed(eps)
    sys.check_scale(eps)
    return _ball_cover(sys, eps)


def _ball_cover(sys, eps: int) -> NiceCover:
    members = [b for b in basis_at(sys, eps) if trace(sys, b).any()]
    return NiceCover(sys, members, scale=eps)


def _refines_masks(v_mask, u_mask) -> bool:
    outside = _bool_product(v_mask.T, ~u_mask)  # outside[i, j]: some point of V_i escapes U_j
    return bool((~outside).any(axis=1).all())


def refines(V: NiceCover, U: NiceCover) -> bool:
    """Every member of ``V`` is contained in some member of ``U`` (on the ground set)."""
    return _refines_masks(V.mask, U.mask)


def common_refinement(U: NiceCover, V: NiceCover) -> NiceCover:
    """All pairwise intersections that meet the ground set, ``U``-major order."""
    members = []
    for i, u in enumerate(U.members):
        hits = np.nonzero((U.mask[:, i][:, None] & V.mask).any(axis=0))[0]
        members.extend(Meet((u, V.members[j])) for j in hits.tolist())
    return NiceCover(U.system, members)


def star_masks(V: NiceCover):
    """Column ``j`` is the ground trace of ``st(V_j, V)``."""
    meets = _bool_product(V.mask.T, V.mask)
    return _bool_product(V.mask, meets)


def is_star_refinement(V: NiceCover, U: NiceCover) -> bool:
    return _refines_masks(star_masks(V), U.mask)


def _star_candidates(U: NiceCover):
    sys = U.system
    if isinstance(sys, FiniteSystem):
        # closed-ball traces only change at distance values; radius 0 gives singletons
        radii = sorted(set(sys.dist.reshape(-1).tolist()) | {0}, reverse=True)
        return radii
    h = -(-SCALE // sys.m)
    start = U.scale // 4 if U.scale is not None else SCALE // 4
    out = []
    r = start
    while r > h:
        out.append(r)
        r //= 2
    out.append(h)
    return out


def star_refine(U: NiceCover) -> NiceCover:
    """A ball cover whose stars each fit inside a member of ``U``, verified exhaustively.

    Grid covers try ``scale/4`` first and then halve down to the resolution floor;
    finite covers scan closed-ball radii downward, ending at singletons.
    """
    for r in _star_candidates(U):
        V = _ball_cover(U.system, r)
        if is_star_refinement(V, U):
            return V
    raise StarRefinementError(f"no ball cover down to 1/{U.system.m} star-refines the input")


def isolate_point(U: NiceCover, w: int, W) -> NiceCover:
    """Refinement of ``U`` in which exactly one member contains ``w``, that member inside ``W``.

    Picks a ball ``V`` around ``w`` inside ``W`` and a member of ``U``, a smaller ball
    ``V'`` with ``cl V' ⊆ V``, and returns ``{V} ∪ {M ∖ cl V' : M ∈ U}``.
    """
    sys = U.system
    w = int(w)
    wp = sys.ground_point(w)
    if not contains(sys, W, wp):
        raise ValueError(f"point {w} is not in W")
    dw = sys.dist_many(wp, sys.ground)
    w_trace = trace(sys, W)
    best = None
    for j in U.members_containing(w):
        allowed = U.mask[:, j] & w_trace
        r = int(dw[~allowed].min()) if (~allowed).any() else int(dw.max()) + 1
        if best is None or r > best:
            best = r
    floor = 2 if isinstance(sys, FiniteSystem) else max(2, -(-SCALE // sys.m))
    if best is None or best < floor:
        raise IsolationError(f"no ball around {w} fits inside W and a cover member")
    inner = best // 2
    V = Ball(wp, best)
    members = [V]
    cut = OuterSet(wp, inner)
    for m in U.members:
        piece = Meet((m, cut))
        if trace(sys, piece).any():
            members.append(piece)
    out = NiceCover(sys, members)
    holders = np.nonzero(out.mask[w])[0]
    if len(holders) != 1 or (out.mask[:, holders[0]] & ~w_trace).any() or not refines(out, U):
        raise IsolationError(f"construction around {w} did not isolate it")
    return out

import numpy as np
import pytest

from omega_forge.core import FiniteSystem, GridSystem, load_system
from omega_forge.fixedpoint import SCALE, to_fixed


def discrete_system(f, unit=1):
    """Discrete metric (all off-diagonal distances ``unit``) with map ``f``."""
    n = len(f)
    d = np.full((n, n), unit * SCALE, dtype=np.int64)
    np.fill_diagonal(d, 0)
    return FiniteSystem(d, list(f))


def cycle(n):
    return discrete_system([(i + 1) % n for i in range(n)])


def grid(m, name, alpha=None, periodic=False):
    return GridSystem(1, m, name, to_fixed(alpha) if alpha is not None else 0, None, periodic)


def edge_oracle(sys, eps_raw):
    """Chain-step relation by a plain double loop over ground points."""
    n = sys.n
    out = [[] for _ in range(n)]
    for x in range(n):
        fx = sys.images[x]
        for y in range(n):
            if sys.distance(fx, sys.ground[y]) <= eps_raw:
                out[x].append(y)
    return out


def reach_oracle(succ, x):
    """Points reachable from ``x`` in one or more steps (depth-first search)."""
    seen = set()
    stack = list(succ[x])
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        stack.extend(succ[u])
    return seen


def bfs_len(succ, x, y):
    """Steps in a shortest walk of length >= 1 from x to y, or None."""
    frontier, seen, steps = set(succ[x]), set(), 1
    while frontier:
        if y in frontier:
            return steps
        seen |= frontier
        frontier = {v for u in frontier for v in succ[u]} - seen
        steps += 1
    return None


@pytest.fixture(scope="session")
def rotation_realization():
    from omega_forge.realization import realize

    sys = load_system({"type": "grid", "dim": 1, "m": 256, "map": {"name": "rotation", "alpha": "0.6180339887"}})
    return realize(sys, 0, "1/8", "1/64", 100_000)


ACCEPTANCE_LINES = []


def record(criterion, ok, detail=""):
    """Register one acceptance verdict line; printed in the terminal summary."""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

"""Plain adjacency helpers over integer-keyed DAGs."""

from __future__ import annotations

from collections import defaultdict, deque
from collections.abc import Iterable, Mapping

Edge = tuple[int, int]


def adjacency(edges: Iterable[Edge]) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = defaultdict(set)
    for u, v in edges:
        adj[u].add(v)
    return adj


def reachable_from(adj: Mapping[int, Iterable[int]], start: int) -> set[int]:
    """All nodes reachable from ``start`` by at least one edge."""
    seen: set[int] = set()
    queue = deque(adj.get(start, ()))
    while queue:
        u = queue.popleft()
        if u in seen:
            continue
        seen.add(u)
        queue.extend(adj.get(u, ()))
    return seen


def find_cycle_node(nodes: Iterable[int], edges: Iterable[Edge]) -> int | None:
    """Return some node lying on a cycle, or None when the graph is acyclic."""
    nodes = set(nodes)
    edges = list(edges)
    for u, v in edges:
        nodes.add(u)
        nodes.add(v)
    indegree = {n: 0 for n in nodes}
    adj = adjacency(edges)
    for _, v in edges:
        indegree[v] += 1
    queue = deque(sorted(n for n, d in indegree.items() if d == 0))
    removed = 0
    while queue:
        u = queue.popleft()
        removed += 1
        for v in adj.get(u, ()):
            indegree[v] -= 1
            if indegree[v] == 0:
                queue.append(v)
    if removed == len(nodes):
        return None
    return min(n for n, d in indegree.items() if d > 0)


def has_path(adj: Mapping[int, Iterable[int]], src: int, dst: int, skip: Edge | None = None) -> bool:
    """True if ``dst`` is reachable from ``src``, optionally ignoring one edge."""
    stack = [src]
    seen = {src}
    while stack:
        u = stack.pop()
        for v in adj.get(u, ()):
            if skip is not None and (u, v) == skip:
                continue
            if v == dst:
                return True
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return False

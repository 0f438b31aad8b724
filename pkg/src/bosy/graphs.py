from __future__ import annotations

from typing import Callable, Hashable, Iterable


def strongly_connected_components(
    nodes: Iterable[Hashable], successors: Callable[[Hashable], Iterable[Hashable]]
) -> list[list[Hashable]]:
    """Tarjan's algorithm without recursion.

    Components are returned in reverse topological order (sinks first).
    """
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    result: list[list] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(successors(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(successors(nxt))))
                    advanced = True
                    break
                if nxt in on_stack and index[nxt] < low[node]:
                    low[node] = index[nxt]
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[node] < low[parent]:
                    low[parent] = low[node]
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                result.append(comp)
    return result


def reachable(roots: Iterable[Hashable], successors: Callable[[Hashable], Iterable[Hashable]]) -> set:
    seen = set(roots)
    todo = list(seen)
    while todo:
        node = todo.pop()
        for nxt in successors(node):
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return seen


def is_nontrivial(component: list, successors: Callable[[Hashable], Iterable[Hashable]]) -> bool:
    """A component lies on a cycle if it has several nodes or a self-loop."""
    if len(component) > 1:
        return True
    node = component[0]
    return any(nxt == node for nxt in successors(node))

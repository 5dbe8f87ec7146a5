"""
k-trees

Construction from creation orders, validation by simplicial elimination,
induced acyclic orientations, the clique tree over (k+1)-cliques, backbone
predicates, exhaustive enumeration for the oracle, and DOT / JSON export.

Vertices are the integers 1..n. An edge is a sorted pair (u, v), u < v.
"""

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from pydantic import ValidationError

from markov_ktree import config
from markov_ktree.errors import DataError, InfeasibleError, NotAKTreeError, OracleCapError
from markov_ktree.formats import CreationOrderFile
from markov_ktree.logger import get_logger

logger = get_logger("ktree")

Edge = Tuple[int, int]
Clique = Tuple[int, ...]
Step = Tuple[Clique, int]


def edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def ktree_edge_count(n: int, k: int) -> int:
    return k * (k - 1) // 2 + k * (n - k)


def backbone_edges(n: int) -> FrozenSet[Edge]:
    return frozenset((i, i + 1) for i in range(1, n))


@dataclass(frozen=True)
class CreationOrder:
    """
    C_k, then (C_i, X_i) steps. Each X_i is new and each C_i is a k-clique of the
    graph built so far; the vertices introduced are exactly 1..n.
    """
    k: int
    base: Clique
    steps: Tuple[Step, ...] = ()

    def __post_init__(self):
        base = tuple(sorted(self.base))
        steps = tuple((tuple(sorted(c)), int(x)) for c, x in self.steps)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "steps", steps)

        if self.k < 1:
            raise NotAKTreeError("k must be at least 1")
        if len(base) != self.k or len(set(base)) != self.k:
            raise NotAKTreeError(f"Base must hold {self.k} distinct vertices, got {base}")

        placed = set(base)
        adjacent = {edge(u, v) for u, v in combinations(base, 2)}
        for clique, x in steps:
            if x in placed:
                raise NotAKTreeError(f"Vertex {x} is introduced twice")
            if len(clique) != self.k or not set(clique) <= placed:
                raise NotAKTreeError(f"Step ({list(clique)}, {x}) attaches to unknown vertices")
            if any(edge(u, v) not in adjacent for u, v in combinations(clique, 2)):
                raise NotAKTreeError(f"Step ({list(clique)}, {x}) does not attach to a clique")
            adjacent.update(edge(c, x) for c in clique)
            placed.add(x)

        if placed != set(range(1, len(placed) + 1)):
            raise NotAKTreeError(f"Creation order must introduce vertices 1..{len(placed)}")

    @property
    def n(self) -> int:
        return self.k + len(self.steps)

    @property
    def vertices(self) -> Tuple[int, ...]:
        return self.base + tuple(x for _, x in self.steps)

    def to_json(self) -> dict:
        return CreationOrderFile(
            k=self.k,
            base=list(self.base),
            steps=[(list(c), x) for c, x in self.steps],
        ).model_dump()

    @classmethod
    def from_json(cls, payload: dict) -> "CreationOrder":
        try:
            parsed = CreationOrderFile(**payload)
        except (ValidationError, TypeError) as e:
            raise DataError(f"Invalid creation order: {e}")
        return cls(parsed.k, tuple(parsed.base), tuple((tuple(c), x) for c, x in parsed.steps))


@dataclass(frozen=True)
class KTree:
    """A k-tree on 1..n; `cliques` lists its (k+1)-cliques in creation order."""
    n: int
    k: int
    edges: FrozenSet[Edge]
    cliques: Tuple[Clique, ...] = field(default=(), compare=False)

    @property
    def canonical(self) -> Tuple[Edge, ...]:
        return tuple(sorted(self.edges))

    def has_edge(self, u: int, v: int) -> bool:
        return edge(u, v) in self.edges

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(1, self.n + 1))
        graph.add_edges_from(self.canonical)
        return graph


@dataclass(frozen=True)
class Orientation:
    """Parent sets pi(X) of an acyclic orientation; exactly one root."""
    parents: Dict[int, FrozenSet[int]]

    @property
    def root(self) -> int:
        return next(v for v in sorted(self.parents) if not self.parents[v])

    def parent_tuple(self, v: int) -> Tuple[int, ...]:
        return tuple(sorted(self.parents[v]))

    def arcs(self) -> List[Tuple[int, int]]:
        return sorted((p, v) for v, ps in self.parents.items() for p in ps)

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.parents)
        graph.add_edges_from(self.arcs())
        return graph


@dataclass(frozen=True)
class CliqueTree:
    """
    Rooted tree over the (k+1)-cliques. Node i is the clique of step i:
    `separators[i]` = C_i, `introduced[i]` = X_i; node 0 is the root.
    """
    nodes: Tuple[Clique, ...]
    parent: Tuple[int, ...]
    separators: Tuple[Clique, ...]
    introduced: Tuple[int, ...]

    @property
    def root(self) -> int:
        return 0

    @property
    def children(self) -> Tuple[Tuple[int, ...], ...]:
        kids: List[List[int]] = [[] for _ in self.nodes]
        for i, p in enumerate(self.parent):
            if p >= 0:
                kids[p].append(i)
        return tuple(tuple(c) for c in kids)

    def preorder(self) -> List[int]:
        """Parents before children; node indices increase along every root path."""
        return list(range(len(self.nodes)))

    def postorder(self) -> List[int]:
        return list(reversed(self.preorder()))


def build_from_order(order: CreationOrder) -> KTree:
    edges = {edge(u, v) for u, v in combinations(order.base, 2)}
    cliques = []
    for clique, x in order.steps:
        edges.update(edge(c, x) for c in clique)
        cliques.append(tuple(sorted(clique + (x,))))
    return KTree(order.n, order.k, frozenset(edges), tuple(cliques))


def _adjacency(edges: Iterable[Edge], n: int) -> Dict[int, set]:
    adj = {v: set() for v in range(1, n + 1)}
    for u, v in edges:
        if u == v or not (1 <= u <= n and 1 <= v <= n):
            raise NotAKTreeError(f"Edge ({u}, {v}) is not a simple edge on 1..{n}")
        adj[u].add(v)
        adj[v].add(u)
    return adj


def validate_ktree(edges: Iterable[Edge], n: int, k: int,
                   rng: Optional[np.random.Generator] = None) -> CreationOrder:
    """
    Recover a creation order by repeatedly removing a degree-k vertex whose
    neighbourhood is a clique. The lowest-indexed eligible vertex goes first
    unless `rng` is given, in which case the choice is random.
    """
    edges = {edge(u, v) for u, v in edges}
    if k < 1 or n < k:
        raise NotAKTreeError(f"No {k}-tree has {n} vertices")
    if len(edges) != ktree_edge_count(n, k):
        raise NotAKTreeError(
            f"A {k}-tree on {n} vertices has {ktree_edge_count(n, k)} edges, got {len(edges)}"
        )
    adj = _adjacency(edges, n)
    if not nx.is_connected(KTree(n, k, frozenset(edges)).to_networkx()):
        raise NotAKTreeError(f"Graph on 1..{n} is not connected")

    def simplicial(v: int) -> bool:
        return len(adj[v]) == k and all(b in adj[a] for a, b in combinations(adj[v], 2))

    remaining = set(adj)
    removals: List[Step] = []
    while len(remaining) > k:
        eligible = sorted(v for v in remaining if simplicial(v))
        if not eligible:
            raise NotAKTreeError(f"No simplicial degree-{k} vertex among {sorted(remaining)}")
        v = eligible[int(rng.integers(len(eligible)))] if rng is not None else eligible[0]
        removals.append((tuple(sorted(adj[v])), v))
        for u in adj[v]:
            adj[u].discard(v)
        remaining.discard(v)
        del adj[v]

    base = tuple(sorted(remaining))
    if any(b not in adj[a] for a, b in combinations(base, 2)):
        raise NotAKTreeError(f"Remaining vertices {base} are not a clique")
    return CreationOrder(k, base, tuple(reversed(removals)))


def orient(order: CreationOrder) -> Orientation:
    """Base edges point from lower to higher index; step edges point C_i -> X_i."""
    parents = {b: frozenset(order.base[:j]) for j, b in enumerate(order.base)}
    for clique, x in order.steps:
        parents[x] = frozenset(clique)
    return Orientation(parents)


def tree_decomposition(order: CreationOrder) -> CliqueTree:
    """Each clique points to the latest earlier clique containing its attachment set."""
    if not order.steps:
        raise InfeasibleError(f"A {order.k}-tree on {order.n} vertices has no (k+1)-cliques")
    nodes = [tuple(sorted(c + (x,))) for c, x in order.steps]
    parent = [-1]
    for i, (clique, _) in enumerate(order.steps[1:], start=1):
        members = set(clique)
        parent.append(next(j for j in range(i - 1, -1, -1) if members <= set(nodes[j])))
    return CliqueTree(
        nodes=tuple(nodes),
        parent=tuple(parent),
        separators=tuple(c for c, _ in order.steps),
        introduced=tuple(x for _, x in order.steps),
    )


def is_backbone_ktree(tree: KTree) -> bool:
    return all(tree.has_edge(i, i + 1) for i in range(1, tree.n))


def chain_order(n: int, k: int) -> CreationOrder:
    """C_{i-1} = {X_{i-k}, ..., X_{i-1}} for i = k+1..n."""
    if n < k:
        raise InfeasibleError(f"A {k}-th order chain needs at least {k} variables")
    steps = tuple((tuple(range(i - k, i)), i) for i in range(k + 1, n + 1))
    return CreationOrder(k, tuple(range(1, k + 1)), steps)


def markov_chain_ktree(n: int, k: int) -> KTree:
    return build_from_order(chain_order(n, k))


def separator_index(tree: KTree) -> Dict[Clique, List[Clique]]:
    """k-subset -> the (k+1)-cliques containing it, sorted."""
    index: Dict[Clique, List[Clique]] = {}
    for clique in sorted(tree.cliques):
        for sep in combinations(clique, tree.k):
            index.setdefault(sep, []).append(clique)
    return index


def reroot(tree: KTree, anchor: Sequence[int], first: int,
           index: Optional[Dict[Clique, List[Clique]]] = None) -> CreationOrder:
    """
    The creation order starting from (k+1)-clique `anchor` with `first` as its
    first step vertex. Every later parent set is forced by the k-tree.
    Pass `index` from separator_index when rerooting one tree many times.
    """
    anchor = tuple(sorted(anchor))
    if anchor not in set(tree.cliques):
        raise NotAKTreeError(f"{list(anchor)} is not a (k+1)-clique of the tree")
    if first not in anchor:
        raise NotAKTreeError(f"Vertex {first} is not in anchor {list(anchor)}")

    by_separator = index if index is not None else separator_index(tree)
    base = tuple(v for v in anchor if v != first)
    steps: List[Step] = [(base, first)]
    placed = set(anchor)
    queue = deque([anchor])
    while queue:
        clique = queue.popleft()
        for sep in combinations(clique, tree.k):
            for other in by_separator[sep]:
                (x,) = set(other) - set(sep)
                if x not in placed:
                    placed.add(x)
                    steps.append((sep, x))
                    queue.append(other)
    return CreationOrder(tree.k, base, tuple(steps))


def random_ktree(n: int, k: int, rng: np.random.Generator) -> KTree:
    """Attach vertices in random label order, each to a uniformly chosen k-clique."""
    labels = [int(v) + 1 for v in rng.permutation(n)]
    return build_from_order(_random_order(labels, k, rng, backbone=False))


def random_backbone_ktree(n: int, k: int, rng: np.random.Generator) -> KTree:
    """
    A random backbone k-tree among those buildable in index order: vertex i
    attaches to a random k-clique containing i - 1.
    """
    return build_from_order(_random_order(list(range(1, n + 1)), k, rng, backbone=True))


def _random_order(labels: List[int], k: int, rng: np.random.Generator, backbone: bool) -> CreationOrder:
    if len(labels) < k:
        raise InfeasibleError(f"A {k}-tree needs at least {k} vertices")
    base = tuple(sorted(labels[:k]))
    kcliques = [base]
    steps = []
    for prev, x in zip(labels[k - 1:], labels[k:]):
        choices = [c for c in kcliques if prev in c] if backbone else kcliques
        clique = choices[int(rng.integers(len(choices)))]
        steps.append((clique, x))
        kcliques.extend(tuple(sorted(set(clique) - {c} | {x})) for c in clique)
    return CreationOrder(k, base, tuple(steps))


def enumerate_all_ktrees(n: int, k: int, must_contain: Iterable[Edge] = (),
                         cap: Optional[int] = None) -> Iterator[KTree]:
    """
    Every distinct k-tree on 1..n containing `must_contain`, each exactly once.

    Depth-first over partial k-trees, deduplicated on (placed vertices, edges).
    A partial tree is dropped as soon as a required edge can no longer appear:
    an unplaced vertex's placed required-neighbours must fit in one k-clique.
    """
    cap = cap if cap is not None else config.oracle_cap(k)
    if n > cap:
        raise OracleCapError(f"Enumeration of {k}-trees is capped at n={cap}, got n={n}")
    if n < k:
        return

    required = {edge(u, v) for u, v in must_contain}
    required_adj = _adjacency(required, n)
    everything = frozenset(range(1, n + 1))

    def viable(placed: FrozenSet[int], edges: FrozenSet[Edge]) -> bool:
        for u in everything - placed:
            anchors = [v for v in required_adj[u] if v in placed]
            if len(anchors) > k:
                return False
            if any(edge(a, b) not in edges for a, b in combinations(anchors, 2)):
                return False
        return True

    seen = set()
    stack = []
    for base in combinations(range(1, n + 1), k):
        placed = frozenset(base)
        edges = frozenset(edge(u, v) for u, v in combinations(base, 2))
        key = (placed, edges)
        if key not in seen and viable(placed, edges):
            seen.add(key)
            stack.append((placed, edges, (base,), ()))

    emitted = 0
    while stack:
        placed, edges, kcliques, steps = stack.pop()
        if len(placed) == n:
            emitted += 1
            yield build_from_order(CreationOrder(k, kcliques[0], steps))
            continue
        for clique in kcliques:
            members = set(clique)
            for x in sorted(everything - placed):
                if not all(v in members for v in required_adj[x] if v in placed):
                    continue
                new_edges = edges | {edge(c, x) for c in clique}
                new_placed = placed | {x}
                key = (new_placed, new_edges)
                if key in seen or not viable(new_placed, new_edges):
                    continue
                seen.add(key)
                new_cliques = kcliques + tuple(tuple(sorted(members - {c} | {x})) for c in clique)
                stack.append((new_placed, new_edges, new_cliques, steps + ((clique, x),)))
    logger.debug(f"Enumerated {emitted} {k}-trees on {n} vertices ({len(seen)} partial states)")


def ktree_to_dot(tree: KTree, names: Optional[Sequence[str]] = None) -> str:
    """Undirected DOT; backbone edges are drawn bold."""
    names = list(names) if names else [f"X{v}" for v in range(1, tree.n + 1)]
    backbone = backbone_edges(tree.n)
    lines = [f"graph ktree_k{tree.k} {{", "  node [shape=circle];"]
    lines += [f'  {v} [label="{names[v - 1]}"];' for v in range(1, tree.n + 1)]
    for u, v in tree.canonical:
        style = " [style=bold]" if (u, v) in backbone else ""
        lines.append(f"  {u} -- {v}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def clique_tree_to_dot(ct: CliqueTree, names: Optional[Sequence[str]] = None) -> str:
    """Directed DOT with arcs from each child clique to its parent."""
    def label(clique: Clique) -> str:
        members = [names[v - 1] if names else f"X{v}" for v in clique]
        return "{" + ", ".join(members) + "}"

    lines = ["digraph clique_tree {", "  node [shape=box];"]
    lines += [f'  c{i} [label="{label(c)}"];' for i, c in enumerate(ct.nodes)]
    lines += [f"  c{i} -> c{p};" for i, p in enumerate(ct.parent) if p >= 0]
    lines.append("}")
    return "\n".join(lines) + "\n"

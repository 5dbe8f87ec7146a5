"""
Topology learners

Responsibility: find the k-tree (and creation order) maximizing Σ f(X, π(X)).

    - chow_liu: maximum spanning tree over pairwise MI (k = 1)
    - brute_force_mskt: exhaustive oracle over every k-tree containing a retained edge set
    - backbone_dp: exact dynamic program over backbone k-trees

For a generic score the objective ranges over (k-tree, orientation) pairs. An
orientation is fixed by the first (k+1)-clique and its first step vertex; the
base vertices are oriented by index. MI and edge-weight scores give every
orientation of a tree the same value.
"""

import json
import math
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from pydantic import ValidationError

from markov_ktree import config
from markov_ktree.constants import DEFAULT_PSEUDOCOUNT, SCORE_TOL, TIE_TOL
from markov_ktree.errors import DataError, InfeasibleError, ScopeError
from markov_ktree.formats import ScoreEntry, ScoreTableFile
from markov_ktree.infotheory import mutual_information
from markov_ktree.ktree import (
    Clique,
    CreationOrder,
    Edge,
    KTree,
    backbone_edges,
    build_from_order,
    edge,
    enumerate_all_ktrees,
    orient,
    reroot,
    separator_index,
    validate_ktree,
)
from markov_ktree.logger import get_logger
from markov_ktree.model import MarkovKTree, fit
from markov_ktree.tables import Distribution, local_table, source_variables

logger = get_logger("learn")


# Score functions

class ScoreFunction(ABC):
    """f(x, parents) for a variable and at most k parents; deterministic."""

    def __init__(self, n: int, k: int):
        self.n = n
        self.k = k

    def __call__(self, x: int, parents: Iterable[int]) -> float:
        parents = tuple(sorted(parents))
        if len(parents) > self.k:
            raise ScopeError(f"Score of X{x} queried with {len(parents)} parents, more than k={self.k}")
        return self.evaluate(x, parents)

    @abstractmethod
    def evaluate(self, x: int, parents: Tuple[int, ...]) -> float:
        ...

    def total(self, parents: Mapping[int, Iterable[int]]) -> float:
        """Σ f over an orientation given as parent sets."""
        return math.fsum(self(v, ps) for v, ps in sorted(parents.items()))

    def attach_scores(self, attach: np.ndarray) -> np.ndarray:
        """
        f(x, S) for every sorted row S of `attach` and every x outside it.

        Returns:
            (len(attach), n + 1) array indexed by row and x; entries for x in S are -inf
        """
        out = np.full((len(attach), self.n + 1), -np.inf)
        for i, row in enumerate(attach):
            parents = tuple(int(v) for v in row)
            for x in range(1, self.n + 1):
                if x not in parents:
                    out[i, x] = self.evaluate(x, parents)
        return out


class MutualInformationScore(ScoreFunction):
    """f(x, S) = I(X; S) from the (|S|+1)-variable marginal, memoized."""

    def __init__(self, source: Distribution, k: int, pseudocount: float = DEFAULT_PSEUDOCOUNT):
        variables = source_variables(source)
        if tuple(variables) != tuple(range(1, len(variables) + 1)):
            raise ScopeError(f"Data must cover variables 1..n, got {variables}")
        super().__init__(len(variables), k)
        self.source = source
        self.pseudocount = pseudocount
        self._memo: Dict[Tuple[int, Tuple[int, ...]], float] = {}

    def evaluate(self, x: int, parents: Tuple[int, ...]) -> float:
        key = (x, parents)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        if not parents:
            value = 0.0
        else:
            value = mutual_information(local_table(self.source, parents + (x,), self.pseudocount), x, parents)
        return self._memo.setdefault(key, value)


class EdgeWeightScore(ScoreFunction):
    """f(x, S) = Σ_{p in S} w[p, x] for an n x n weight matrix (row/column i is variable i + 1)."""

    def __init__(self, weights: np.ndarray, k: int):
        weights = np.asarray(weights, dtype=np.float64)
        if weights.ndim != 2 or weights.shape[0] != weights.shape[1]:
            raise DataError("Edge weights must be a square matrix")
        super().__init__(weights.shape[0], k)
        self.weights = weights

    def evaluate(self, x: int, parents: Tuple[int, ...]) -> float:
        return math.fsum(float(self.weights[p - 1, x - 1]) for p in parents)

    def attach_scores(self, attach: np.ndarray) -> np.ndarray:
        out = np.full((len(attach), self.n + 1), -np.inf)
        out[:, 1:] = self.weights[attach - 1].sum(axis=1)
        np.put_along_axis(out, attach, -np.inf, axis=1)
        return out


class TableScore(ScoreFunction):
    """Explicit values for (x, parent set) pairs; querying a missing pair is an error."""

    def __init__(self, n: int, k: int, entries: Mapping[Tuple[int, Tuple[int, ...]], float]):
        super().__init__(n, k)
        self.entries = {(x, tuple(sorted(ps))): float(f) for (x, ps), f in entries.items()}

    def evaluate(self, x: int, parents: Tuple[int, ...]) -> float:
        try:
            return self.entries[(x, parents)]
        except KeyError:
            raise DataError(f"Score table has no entry for X{x} with parents {list(parents)}")

    def to_json(self) -> dict:
        return ScoreTableFile(
            n=self.n,
            k=self.k,
            entries=[ScoreEntry(x=x, parents=list(ps), f=f) for (x, ps), f in sorted(self.entries.items())],
        ).model_dump()

    @classmethod
    def from_json(cls, payload: dict) -> "TableScore":
        try:
            parsed = ScoreTableFile(**payload)
        except (ValidationError, TypeError) as e:
            raise DataError(f"Invalid score table: {e}")
        return cls(parsed.n, parsed.k, {(e.x, tuple(e.parents)): e.f for e in parsed.entries})

    @classmethod
    def load(cls, path: Path) -> "TableScore":
        try:
            payload = json.loads(Path(path).read_text())
        except json.JSONDecodeError as e:
            raise DataError(f"Invalid score table file {path}: {e}")
        table = cls.from_json(payload)
        logger.info(f"Loaded {len(table.entries)} score entries (n={table.n}, k={table.k}) from {path}")
        return table


def random_score_table(n: int, k: int, rng: np.random.Generator) -> TableScore:
    """Uniform [0, 1) values for every (x, S) with |S| <= k."""
    entries = {}
    for x in range(1, n + 1):
        others = [v for v in range(1, n + 1) if v != x]
        for size in range(k + 1):
            for parents in combinations(others, size):
                entries[(x, parents)] = float(rng.random())
    return TableScore(n, k, entries)


def mi_score_adapter(source: Distribution, k: int,
                     pseudocount: float = DEFAULT_PSEUDOCOUNT) -> MutualInformationScore:
    return MutualInformationScore(source, k, pseudocount)


# Results

@dataclass(frozen=True)
class LearnStats:
    states_expanded: int
    wall_time: float


@dataclass(frozen=True)
class LearnResult:
    tree: KTree
    order: CreationOrder
    score: float
    stats: LearnStats = field(compare=False)

    @property
    def parents(self) -> Dict[int, FrozenSet[int]]:
        return orient(self.order).parents


def _result(order: CreationOrder, f: ScoreFunction, states: int, started: float) -> LearnResult:
    score = f.total(orient(order).parents)
    return LearnResult(build_from_order(order), order, score, LearnStats(states, time.perf_counter() - started))


# Chow-Liu

def chow_liu(pairwise_mi: np.ndarray) -> LearnResult:
    """Maximum-weight spanning tree under pairwise MI; ties go to earlier edges in lexicographic order."""
    started = time.perf_counter()
    mi = np.asarray(pairwise_mi, dtype=np.float64)
    if mi.ndim != 2 or mi.shape[0] != mi.shape[1]:
        raise DataError("Pairwise MI must be a square matrix")
    n = mi.shape[0]
    if n < 2:
        raise InfeasibleError("A spanning tree needs at least 2 variables")
    if not np.allclose(mi, mi.T) or np.any(np.diag(mi) != 0):
        raise DataError("Pairwise MI must be symmetric with a zero diagonal")

    graph = nx.Graph()
    graph.add_nodes_from(range(1, n + 1))
    for u, v in combinations(range(1, n + 1), 2):
        graph.add_edge(u, v, weight=float(mi[u - 1, v - 1]))
    spanning = nx.maximum_spanning_tree(graph, algorithm="kruskal")

    order = validate_ktree((edge(u, v) for u, v in spanning.edges()), n, 1)
    result = _result(order, EdgeWeightScore(mi, 1), n - 1, started)
    logger.info(f"Chow-Liu tree over {n} variables, score {result.score:.6f} bits")
    return result


# Exhaustive oracle

@dataclass(frozen=True)
class _CandidateFamily:
    """Every (tree, anchor, first) orientation as rows of indices into unique (x, parents) keys."""
    trees: Tuple[KTree, ...]
    orientations: Tuple[Tuple[int, Clique, int], ...]
    keys: Tuple[Tuple[int, Tuple[int, ...]], ...]
    index: np.ndarray


@lru_cache(maxsize=16)
def _candidate_family(n: int, k: int, retain: FrozenSet[Edge], cap: int) -> _CandidateFamily:
    trees = tuple(sorted(enumerate_all_ktrees(n, k, retain, cap), key=lambda t: t.canonical))
    key_ids: Dict[Tuple[int, Tuple[int, ...]], int] = {}
    orientations = []
    rows = []
    for t, tree in enumerate(trees):
        index = separator_index(tree)
        for anchor in sorted(tree.cliques):
            for first in anchor:
                orientation = orient(reroot(tree, anchor, first, index))
                rows.append([
                    key_ids.setdefault((v, orientation.parent_tuple(v)), len(key_ids))
                    for v in range(1, n + 1)
                ])
                orientations.append((t, anchor, first))
    keys = tuple(sorted(key_ids, key=key_ids.get))
    index = np.asarray(rows, dtype=np.int64).reshape(len(rows), n)
    logger.debug(f"Candidate family n={n} k={k}: {len(trees)} trees, {len(rows)} orientations")
    return _CandidateFamily(trees, tuple(orientations), keys, index)


def brute_force_mskt(n: int, k: int, f: ScoreFunction, retain: Iterable[Edge] = (),
                     cap: Optional[int] = None) -> LearnResult:
    """
    Exact maximizer of Σ f over every k-tree on 1..n containing `retain`.
    Ties go to the lexicographically smallest canonical edge list, then anchor, then first vertex.
    """
    started = time.perf_counter()
    if n <= k:
        raise InfeasibleError(f"No (k+1)-clique exists with n={n}, k={k}")
    retain = frozenset(edge(u, v) for u, v in retain)
    if any(u < 1 or v > n or u == v for u, v in retain):
        raise DataError(f"Retained edges must join distinct vertices of 1..{n}")

    family = _candidate_family(n, k, retain, cap if cap is not None else config.oracle_cap(k))
    if not family.trees:
        raise InfeasibleError(f"No {k}-tree on {n} vertices contains edges {sorted(retain)}")

    values = np.array([f(x, parents) for x, parents in family.keys])
    totals = values[family.index].sum(axis=1)
    best = totals.max()
    tied = np.flatnonzero(totals >= best - TIE_TOL)

    def tie_key(i: int):
        t, anchor, first = family.orientations[i]
        return family.trees[t].canonical, anchor, first

    t, anchor, first = family.orientations[min(tied, key=tie_key)]
    order = reroot(family.trees[t], anchor, first)
    result = _result(order, f, len(family.orientations), started)
    logger.info(f"Brute force over {len(family.trees)} {k}-trees on {n} vertices: score {result.score:.6f}")
    return result


# Backbone dynamic program

def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _submasks(mask: int) -> Iterator[int]:
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def _colex_rank(rows: np.ndarray, binom: np.ndarray) -> np.ndarray:
    """Position of each sorted row among the same-size subsets of 1..n in colex order."""
    rank = np.zeros(len(rows), dtype=np.int64)
    for i in range(rows.shape[1]):
        rank += binom[rows[:, i] - 1, i + 1]
    return rank


def _subsets(n: int, size: int, binom: np.ndarray) -> np.ndarray:
    rows = np.array(list(combinations(range(1, n + 1), size)), dtype=np.int64).reshape(-1, size)
    out = np.empty_like(rows)
    out[_colex_rank(rows, binom)] = rows
    return out


def _intervals(rows: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """First and last vertex of each positional interval; an empty interval has last < first."""
    count = len(rows)
    bounds = np.hstack([np.zeros((count, 1), dtype=np.int64), rows, np.full((count, 1), n + 1, dtype=np.int64)])
    return bounds[:, :-1] + 1, bounds[:, 1:] - 1


def _coverage(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Vertices flagged by every mask, per row; -1 where a mask flags an empty interval."""
    width = lo.shape[1]
    sizes = hi - lo + 1
    flags = (np.arange(1 << width)[:, None] >> np.arange(width)) & 1
    cover = sizes @ flags.T
    cover[(sizes == 0).astype(np.int64) @ flags.T > 0] = -1
    return cover


class _Levels:
    """Rows grouped by coverage, per mask."""

    def __init__(self, cover: np.ndarray):
        self.order = np.argsort(cover, axis=0, kind="stable")
        self.sorted = np.take_along_axis(cover, self.order, axis=0)

    def rows(self, mask: int, level: int) -> np.ndarray:
        column = self.sorted[:, mask]
        start, stop = np.searchsorted(column, [level, level + 1])
        return self.order[start:stop, mask]


def _merge_at(mask: int, i: int) -> int:
    """Clique intervals i and i+1 (both unset) become interval i once member i is dropped."""
    return (mask & ((1 << i) - 1)) | ((mask >> (i + 2)) << (i + 1))


def _split_at(mask: int, j: int) -> int:
    """Attachment interval j (unset) becomes clique intervals j and j+1 once x lands inside it."""
    return (mask & ((1 << j) - 1)) | ((mask >> (j + 1)) << (j + 2))


class BackboneDP:
    """
    Bottom-up tables over sorted (k+1)-cliques κ and k-sets S, each row keyed by
    its colex rank.

    A sorted clique cuts 1..n into k+2 positional intervals: before its first
    member, between consecutive members, and after its last. A k-set cuts it
    into k+1. Each component of the vertices below κ owns whole intervals.

    M[κ, α]: best Σ f over the vertices of the intervals flagged in α, all
    placed below κ. H[S, β]: best Σ f over the vertices of S's flagged
    intervals as one component hanging from S through its first vertex x,
    which continues below κ' = S ∪ {x}.

    M expands the component owning α's lowest interval. It hangs from
    S = κ \\ {y} for a y bounding none of its intervals (that backbone edge
    could never be created otherwise), so its intervals are intervals of S:

        M[κ, α] = max over y and owned of H[S, owned] + M[κ, α \\ owned]
        H[S, β] = max over x in β of f(x, S) + M[S ∪ {x}, β with x's interval split]

    Both tables fill one coverage level (vertices placed) at a time; every
    lookup lands on a lower level, or on H at the same level, which fills first.
    """

    def __init__(self, n: int, k: int, f: ScoreFunction):
        self.n = n
        self.k = k
        self.f = f
        self.binom = np.array([[math.comb(v, i) for i in range(k + 2)] for v in range(n + 1)], dtype=np.int64)
        self.cliques = _subsets(n, k + 1, self.binom)
        self.attach = _subsets(n, k, self.binom)
        self.clique_lo, self.clique_hi = _intervals(self.cliques, n)
        self.attach_lo, self.attach_hi = _intervals(self.attach, n)
        self.dropped = np.stack(
            [_colex_rank(np.delete(self.cliques, i, axis=1), self.binom) for i in range(k + 1)], axis=1
        )
        self.full_masks = (self.clique_hi >= self.clique_lo).astype(np.int64) @ (1 << np.arange(k + 2))

        self.M = np.full((len(self.cliques), 1 << (k + 2)), -np.inf)
        self.M[:, 0] = 0.0
        self.M_choice = np.full(self.M.shape, -1, dtype=np.int32)
        self.H = np.full((len(self.attach), 1 << (k + 1)), -np.inf)
        self.H_choice = np.zeros(self.H.shape, dtype=np.int32)
        self.scores: Optional[np.ndarray] = None
        self.states_expanded = 0
        self._splits: Dict[int, List[Tuple[int, int, int]]] = {}

    def splits(self, alpha: int) -> List[Tuple[int, int, int]]:
        """(member index y, owned mask over κ \\ {y}, sibling mask) for each way to expand α."""
        cached = self._splits.get(alpha)
        if cached is not None:
            return cached
        low = alpha & -alpha
        rest = alpha ^ low
        out = []
        for yi in range(self.k + 1):
            blocked = (1 << yi) | (1 << (yi + 1))
            if blocked & low:
                continue
            for sub in _submasks(rest & ~blocked):
                owned = sub | low
                out.append((yi, _merge_at(owned, yi), alpha & ~owned))
        self._splits[alpha] = out
        return out

    def run(self):
        self.scores = scores = self.f.attach_scores(self.attach)
        clique_levels = _Levels(_coverage(self.clique_lo, self.clique_hi))
        attach_levels = _Levels(_coverage(self.attach_lo, self.attach_hi))
        for level in range(1, self.n - self.k):
            for beta in range(1, 1 << (self.k + 1)):
                rows = attach_levels.rows(beta, level)
                if rows.size:
                    self._fill_attach(rows, beta, scores)
            for alpha in range(1, 1 << (self.k + 2)):
                rows = clique_levels.rows(alpha, level)
                if rows.size:
                    self._fill_clique(rows, alpha)
            logger.debug(f"Level {level} done, {self.states_expanded} states")

    def _fill_attach(self, rows: np.ndarray, beta: int, scores: np.ndarray):
        best = np.full(len(rows), -np.inf)
        choice = np.zeros(len(rows), dtype=np.int64)
        for j in _bits(beta):
            lo = self.attach_lo[rows, j]
            hi = self.attach_hi[rows, j]
            counts = hi - lo + 1
            starts = np.cumsum(counts) - counts
            owner = np.repeat(np.arange(len(rows)), counts)
            x = lo[owner] + np.arange(counts.sum()) - starts[owner]

            members = self.attach[rows[owner]]
            child = np.hstack([members[:, :j], x[:, None], members[:, j:]])
            child_mask = (
                _split_at(beta & ~(1 << j), j)
                + ((x > lo[owner]).astype(np.int64) << j)
                + ((x < hi[owner]).astype(np.int64) << (j + 1))
            )
            values = scores[rows[owner], x] + self.M[_colex_rank(child, self.binom), child_mask]

            top = np.maximum.reduceat(values, starts)
            positions = np.where(values == top[owner], np.arange(len(values)), len(values))
            first = np.minimum.reduceat(positions, starts)
            better = top > best
            best = np.where(better, top, best)
            choice = np.where(better, x[first], choice)
        self.H[rows, beta] = best
        self.H_choice[rows, beta] = choice

    def _fill_clique(self, rows: np.ndarray, alpha: int):
        best = np.full(len(rows), -np.inf)
        choice = np.full(len(rows), -1, dtype=np.int64)
        for c, (yi, owned, sibling) in enumerate(self.splits(alpha)):
            values = self.H[self.dropped[rows, yi], owned] + self.M[rows, sibling]
            better = values > best
            best = np.where(better, values, best)
            choice = np.where(better, c, choice)
        self.M[rows, alpha] = best
        self.M_choice[rows, alpha] = choice
        self.states_expanded += len(rows)

    def clique_id(self, clique: Clique) -> int:
        return int(_colex_rank(np.asarray([clique], dtype=np.int64), self.binom)[0])

    def steps(self, clique: int, alpha: int) -> List[Tuple[Clique, int]]:
        """Creation steps realizing M[clique, α], each step before the ones attached below it."""
        out: List[Tuple[Clique, int]] = []
        pending = [(clique, alpha)]
        while pending:
            clique, alpha = pending.pop()
            if alpha == 0:
                continue
            yi, beta, sibling = self.splits(alpha)[self.M_choice[clique, alpha]]
            s = int(self.dropped[clique, yi])
            x = int(self.H_choice[s, beta])
            members = tuple(int(v) for v in self.attach[s])
            out.append((members, x))
            pending.append((clique, sibling))

            j = sum(v < x for v in members)
            lo, hi = int(self.attach_lo[s, j]), int(self.attach_hi[s, j])
            child_mask = _split_at(beta & ~(1 << j), j) | (int(x > lo) << j) | (int(x < hi) << (j + 1))
            pending.append((self.clique_id(tuple(sorted(members + (x,)))), child_mask))
        return out


def _base_scores(f: ScoreFunction, attach: np.ndarray) -> np.ndarray:
    """Σ f(b_j, {b_1..b_{j-1}}) over each k-set, oriented by index."""
    out = np.empty(len(attach))
    for i, row in enumerate(attach):
        base = tuple(int(v) for v in row)
        out[i] = math.fsum(f.evaluate(b, base[:j]) for j, b in enumerate(base))
    return out


def backbone_dp(n: int, k: int, f: ScoreFunction) -> LearnResult:
    """
    The backbone k-tree (and orientation) maximizing Σ f, tried from every
    anchor (k+1)-clique and first vertex. Ties go to the lexicographically
    smallest anchor, then the earliest first vertex in it.
    """
    started = time.perf_counter()
    if n <= k:
        raise InfeasibleError(f"No (k+1)-clique exists with n={n}, k={k}")

    dp = BackboneDP(n, k, f)
    dp.run()

    cliques = np.arange(len(dp.cliques))
    below = dp.M[cliques, dp.full_masks]
    base = _base_scores(f, dp.attach)
    values = np.stack([
        base[dp.dropped[:, r]] + dp.scores[dp.dropped[:, r], dp.cliques[:, r]] + below
        for r in range(k + 1)
    ], axis=1)
    best = values.max()
    if best == -math.inf:
        raise InfeasibleError(f"No backbone {k}-tree on {n} vertices")

    rows, firsts = np.nonzero(values == best)
    pick = np.lexsort([firsts] + [dp.cliques[rows, i] for i in range(k, -1, -1)])[0]
    anchor_id, r = int(rows[pick]), int(firsts[pick])
    anchor = tuple(int(v) for v in dp.cliques[anchor_id])
    first = anchor[r]
    base_clique = anchor[:r] + anchor[r + 1:]

    order = CreationOrder(k, base_clique, tuple(
        [(base_clique, first)] + dp.steps(anchor_id, int(dp.full_masks[anchor_id]))
    ))
    result = _result(order, f, dp.states_expanded, started)
    if abs(result.score - best) > SCORE_TOL:
        logger.warning(f"Recomputed score {result.score} differs from DP value {best}")
    logger.info(
        f"Backbone DP n={n} k={k}: score {result.score:.6f}, "
        f"{result.stats.states_expanded} states in {result.stats.wall_time:.2f}s"
    )
    return result


def dp_state_bound(n: int, k: int) -> int:
    return math.comb(n, k + 1) * 2 ** (k + 2)


# End-to-end and oracle cross-check

def learn_markov_backbone_ktree(data: Distribution, k: int, pseudocount: float = DEFAULT_PSEUDOCOUNT,
                                names: Sequence[str] = ()) -> MarkovKTree:
    """Backbone DP under MI scores, then fit the CPTs on the same data."""
    n = len(source_variables(data))
    if n <= k:
        raise InfeasibleError(f"Need more than k={k} variables, got {n}")
    result = backbone_dp(n, k, mi_score_adapter(data, k, pseudocount))
    return fit(result.tree, result.order, data, pseudocount, names)


@dataclass(frozen=True)
class OracleTrial:
    n: int
    k: int
    trial: int
    dp_score: float
    brute_score: float

    @property
    def match(self) -> bool:
        return abs(self.dp_score - self.brute_score) <= SCORE_TOL

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "trial": self.trial,
            "dp": self.dp_score,
            "brute": self.brute_score,
            "match": self.match,
        }


def oracle_check(n_values: Sequence[int], k_values: Sequence[int], trials: int, seed: int,
                 cap: Optional[int] = None) -> List[OracleTrial]:
    """backbone_dp against brute_force_mskt(retain = backbone) on random score tables."""
    rng = np.random.default_rng(seed)
    records = []
    for k in k_values:
        for n in n_values:
            if n <= k:
                continue
            for trial in range(trials):
                f = random_score_table(n, k, rng)
                dp = backbone_dp(n, k, f)
                brute = brute_force_mskt(n, k, f, backbone_edges(n), cap)
                record = OracleTrial(n, k, trial, dp.score, brute.score)
                if not record.match:
                    logger.error(f"Oracle mismatch n={n} k={k} trial={trial}: dp={dp.score} brute={brute.score}")
                records.append(record)
    return records

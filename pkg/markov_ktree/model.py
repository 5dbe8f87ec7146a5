"""
Markov k-tree model

Responsibility: the factorized joint Π P(X | π(X)) over a k-tree orientation,
its fitting from a joint or from samples, the Δ score, the KL decomposition
report, amended-graph scoring, order-invariance checks, forward sampling and
the JSON model format.
"""

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from pydantic import ValidationError

from markov_ktree.constants import (
    DEFAULT_INVARIANCE_TRIALS,
    DEFAULT_PSEUDOCOUNT,
    DEFAULT_SEED,
    IDENTITY_TOL,
    ORDER_SAMPLING_ATTEMPTS,
    POINTWISE_TOL,
)
from markov_ktree.errors import DataError, NotAKTreeError, ScopeError
from markov_ktree.formats import CptEntry, ModelFile
from markov_ktree.infotheory import Bits, Divergence, entropy, kl_divergence, mutual_information
from markov_ktree.ktree import (
    CreationOrder,
    Edge,
    KTree,
    Orientation,
    build_from_order,
    edge,
    orient,
    validate_ktree,
)
from markov_ktree.logger import get_logger
from markov_ktree.tables import (
    ConditionalTable,
    Distribution,
    JointTable,
    SampleSet,
    broadcast_to_scope,
    conditional,
    local_table,
    marginalize,
    source_variables,
)

logger = get_logger("model")

Assignment = Union[Mapping[int, int], Sequence[int]]


@dataclass(frozen=True, eq=False)
class MarkovKTree:
    """A k-tree, one of its creation orders, and a CPT per variable over (sorted parents, var)."""
    tree: KTree
    order: CreationOrder
    orientation: Orientation
    cpts: Dict[int, ConditionalTable]
    names: Tuple[str, ...] = ()

    def __post_init__(self):
        if orient(self.order).parents != self.orientation.parents:
            raise NotAKTreeError("Orientation does not match the creation order")
        if build_from_order(self.order).edges != self.tree.edges:
            raise NotAKTreeError("Creation order does not build the model's k-tree")
        if sorted(self.cpts) != list(range(1, self.tree.n + 1)):
            raise ScopeError(f"Model needs one CPT for each of 1..{self.tree.n}")
        for v, cpt in self.cpts.items():
            if cpt.target != v or cpt.given != self.orientation.parent_tuple(v):
                raise ScopeError(f"CPT of X{v} is over {cpt.scope}, expected parents {self.orientation.parent_tuple(v)}")
        names = tuple(self.names) or tuple(f"X{v}" for v in range(1, self.tree.n + 1))
        object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return self.tree.n

    @property
    def k(self) -> int:
        return self.tree.k

    @property
    def cardinalities(self) -> Dict[int, int]:
        return {v: cpt.probs.shape[-1] for v, cpt in self.cpts.items()}

    @property
    def topological_order(self) -> Tuple[int, ...]:
        return self.order.vertices


@dataclass(frozen=True)
class Amendment:
    """Kept edges A of a k-tree and the parent sets π_Â they induce from an orientation."""
    kept: FrozenSet[Edge]
    parents: Dict[int, FrozenSet[int]] = field(compare=False)


@dataclass(frozen=True)
class DivergenceReport:
    kl: Divergence
    delta: Bits
    sum_marginal_entropy: Bits
    joint_entropy: Bits
    terms: Dict[int, Bits]

    @property
    def residual(self) -> Optional[float]:
        """kl + delta - ΣH(X_i) + H(X); None when kl is infinite."""
        if not self.kl.finite:
            return None
        return self.kl.bits + self.delta - self.sum_marginal_entropy + self.joint_entropy

    @property
    def identity_holds(self) -> bool:
        residual = self.residual
        return residual is not None and abs(residual) <= IDENTITY_TOL

    def to_dict(self) -> dict:
        return {
            "kl": self.kl.bits if self.kl.finite else None,
            "kl_infinite": self.kl.support_violation,
            "delta": self.delta,
            "sum_marginal_entropy": self.sum_marginal_entropy,
            "joint_entropy": self.joint_entropy,
            "residual": self.residual,
            "terms": {str(v): t for v, t in sorted(self.terms.items())},
        }


def _check_covers(dist: Distribution, n: int):
    variables = source_variables(dist)
    if tuple(variables) != tuple(range(1, n + 1)):
        raise ScopeError(f"Distribution is over {variables}, expected variables 1..{n}")


def fit(tree: KTree, order: CreationOrder, dist: Distribution,
        pseudocount: float = DEFAULT_PSEUDOCOUNT, names: Sequence[str] = ()) -> MarkovKTree:
    """
    Estimate P(X | π(X)) for every variable under the orientation of `order`.
    Exact marginals of a joint, or smoothed empirical tables from samples.
    """
    _check_covers(dist, tree.n)
    orientation = orient(order)
    cpts = {}
    for v in range(1, tree.n + 1):
        parents = orientation.parent_tuple(v)
        table = local_table(dist, parents + (v,), pseudocount)
        cpts[v] = conditional(table, v, parents)
    if not names and isinstance(dist, SampleSet):
        names = dist.names
    return MarkovKTree(tree, order, orientation, cpts, tuple(names))


def _as_states(m: MarkovKTree, assignment: Assignment) -> Tuple[int, ...]:
    if isinstance(assignment, Mapping):
        missing = [v for v in range(1, m.n + 1) if v not in assignment]
        if missing:
            raise DataError(f"Assignment is missing variables {missing}")
        states = tuple(int(assignment[v]) for v in range(1, m.n + 1))
    else:
        states = tuple(int(s) for s in assignment)
        if len(states) != m.n:
            raise DataError(f"Assignment has {len(states)} states for {m.n} variables")
    cards = m.cardinalities
    for v, s in zip(range(1, m.n + 1), states):
        if not 0 <= s < cards[v]:
            raise DataError(f"State {s} of X{v} is outside [0, {cards[v]})")
    return states


def joint_log2_probability(m: MarkovKTree, assignment: Assignment) -> float:
    states = _as_states(m, assignment)
    total = 0.0
    for v, cpt in m.cpts.items():
        p = cpt.probs[tuple(states[u - 1] for u in cpt.scope)]
        if p <= 0:
            return -math.inf
        total += math.log2(p)
    return total


def joint_probability(m: MarkovKTree, assignment: Assignment) -> float:
    return 2.0 ** joint_log2_probability(m, assignment)


def joint_table(m: MarkovKTree) -> JointTable:
    """The full model joint over 1..n (desk scale only)."""
    scope = tuple(range(1, m.n + 1))
    cards = m.cardinalities
    probs = np.ones(tuple(cards[v] for v in scope))
    for cpt in m.cpts.values():
        probs = probs * broadcast_to_scope(cpt.probs, cpt.scope, scope)
    return JointTable(scope, probs)


def _check_orientation(tree: KTree, orientation: Orientation):
    parents = orientation.parents
    arcs = {edge(p, v) for v, ps in parents.items() for p in ps}
    if sorted(parents) != list(range(1, tree.n + 1)) or arcs != set(tree.edges):
        raise NotAKTreeError("Orientation does not cover exactly the tree's edges")
    if not nx.is_directed_acyclic_graph(orientation.to_networkx()):
        raise NotAKTreeError("Orientation has a directed cycle")


def delta_terms(tree: KTree, orientation: Orientation, dist: Distribution,
                pseudocount: float = DEFAULT_PSEUDOCOUNT) -> Dict[int, Bits]:
    """I(X; π(X)) for every variable; the root contributes 0."""
    _check_covers(dist, tree.n)
    _check_orientation(tree, orientation)
    return _mi_terms(orientation.parents, dist, pseudocount)


def _mi_terms(parents: Mapping[int, FrozenSet[int]], dist: Distribution, pseudocount: float) -> Dict[int, Bits]:
    terms = {}
    for v in sorted(parents):
        ps = tuple(sorted(parents[v]))
        if not ps:
            terms[v] = 0.0
            continue
        terms[v] = mutual_information(local_table(dist, ps + (v,), pseudocount), v, ps)
    return terms


def delta_score(tree: KTree, orientation: Orientation, dist: Distribution,
                pseudocount: float = DEFAULT_PSEUDOCOUNT) -> Bits:
    return math.fsum(delta_terms(tree, orientation, dist, pseudocount).values())


def divergence_report(dist: JointTable, m: MarkovKTree) -> DivergenceReport:
    """KL(dist || model) next to the quantities of kl = -Δ + ΣH(X_i) - H(X)."""
    if not isinstance(dist, JointTable):
        raise DataError("A divergence report needs a full joint distribution")
    _check_covers(dist, m.n)
    terms = delta_terms(m.tree, m.orientation, dist)
    report = DivergenceReport(
        kl=kl_divergence(dist, joint_table(m)),
        delta=math.fsum(terms.values()),
        sum_marginal_entropy=math.fsum(entropy(marginalize(dist, {v})) for v in range(1, m.n + 1)),
        joint_entropy=entropy(dist),
        terms=terms,
    )
    if report.kl.support_violation:
        logger.warning("Distribution is positive where the model is zero: KL is infinite")
    elif not report.identity_holds:
        logger.warning(f"KL identity residual {report.residual:.3g} exceeds {IDENTITY_TOL}")
    return report


def joints_agree(a: JointTable, b: JointTable, tol: float = POINTWISE_TOL) -> bool:
    """Same zero pattern, and log-probabilities within `tol` where both are positive."""
    pa = a.flat
    pb = np.transpose(b.probs, [b.axis(v) for v in a.scope]).reshape(-1)
    if not np.array_equal(pa == 0, pb == 0):
        return False
    positive = pa > 0
    return bool(np.all(np.abs(np.log(pa[positive]) - np.log(pb[positive])) <= tol))


def distinct_orders(tree: KTree, count: int, rng: np.random.Generator) -> List[CreationOrder]:
    """Up to `count` distinct creation orders of one tree from randomized elimination."""
    orders = {}
    first = validate_ktree(tree.edges, tree.n, tree.k)
    orders[(first.base, first.steps)] = first
    for _ in range(ORDER_SAMPLING_ATTEMPTS * count):
        if len(orders) >= count:
            break
        order = validate_ktree(tree.edges, tree.n, tree.k, rng=rng)
        orders.setdefault((order.base, order.steps), order)
    return list(orders.values())[:count]


def order_invariance_check(tree: KTree, dist: Distribution, trials: int = DEFAULT_INVARIANCE_TRIALS,
                           rng: Optional[np.random.Generator] = None,
                           pseudocount: float = DEFAULT_PSEUDOCOUNT) -> bool:
    """Fit the same tree under `trials` creation orders and compare the joints pointwise."""
    if trials < 2:
        raise DataError("An invariance check needs at least 2 creation orders")
    rng = rng if rng is not None else np.random.default_rng(DEFAULT_SEED)
    orders = distinct_orders(tree, trials, rng)
    if len(orders) < trials:
        logger.warning(f"Tree admits only {len(orders)} sampled creation orders, wanted {trials}")

    reference = joint_table(fit(tree, orders[0], dist, pseudocount))
    for order in orders[1:]:
        if not joints_agree(reference, joint_table(fit(tree, order, dist, pseudocount))):
            logger.info(f"Joint differs under creation order with base {order.base}")
            return False
    return True


def amend(tree: KTree, orientation: Orientation, kept: Iterable[Edge]) -> Amendment:
    kept = frozenset(edge(u, v) for u, v in kept)
    outside = kept - tree.edges
    if outside:
        raise NotAKTreeError(f"Amendment keeps edges {sorted(outside)} that are not in the tree")
    parents = {
        v: frozenset(p for p in ps if edge(p, v) in kept)
        for v, ps in orientation.parents.items()
    }
    return Amendment(kept, parents)


def amended_delta(tree: KTree, orientation: Orientation, amendment: Amendment, dist: Distribution,
                  penalty: float = 0.0, pseudocount: float = DEFAULT_PSEUDOCOUNT) -> Bits:
    """
    Σ I(X; π_Â(X)) - penalty * |A|.

    With penalty 0 keeping every edge is always optimal, so the penalty is what
    makes sparser amendments competitive.
    """
    if penalty < 0:
        raise DataError("Amendment penalty must be nonnegative")
    _check_covers(dist, tree.n)
    _check_orientation(tree, orientation)
    derived = amend(tree, orientation, amendment.kept)
    return math.fsum(_mi_terms(derived.parents, dist, pseudocount).values()) - penalty * len(derived.kept)


def sample(m: MarkovKTree, count: int, rng: np.random.Generator) -> SampleSet:
    """Forward sampling along the creation order."""
    data = np.zeros((count, m.n), dtype=np.int64)
    for v in m.topological_order:
        cpt = m.cpts[v]
        size = cpt.probs.shape[-1]
        if cpt.given:
            rows = cpt.probs[tuple(data[:, u - 1] for u in cpt.given)]
        else:
            rows = np.broadcast_to(cpt.probs, (count, size))
        cumulative = np.cumsum(rows, axis=-1)
        draws = rng.random(count)[:, None]
        data[:, v - 1] = np.minimum((draws >= cumulative).sum(axis=-1), size - 1)
    return SampleSet(data, m.cardinalities, m.names)


def model_to_json(m: MarkovKTree) -> dict:
    cards = m.cardinalities
    return ModelFile(
        k=m.k,
        n=m.n,
        names=list(m.names),
        cardinalities=[cards[v] for v in range(1, m.n + 1)],
        order=m.order.to_json(),
        cpts=[
            CptEntry(var=v, parents=list(cpt.given), table=[float(p) for p in cpt.probs.reshape(-1)])
            for v, cpt in sorted(m.cpts.items())
        ],
    ).model_dump()


def model_from_json(payload: dict) -> MarkovKTree:
    try:
        parsed = ModelFile(**payload)
    except (ValidationError, TypeError) as e:
        raise DataError(f"Invalid model: {e}")
    order = CreationOrder.from_json(parsed.order.model_dump())
    if order.k != parsed.k or order.n != parsed.n:
        raise DataError("Model header disagrees with its creation order")

    cpts = {}
    for entry in parsed.cpts:
        shape = tuple(parsed.cardinalities[u - 1] for u in entry.parents + [entry.var])
        if len(entry.table) != int(np.prod(shape)):
            raise DataError(f"CPT of X{entry.var} has {len(entry.table)} entries, expected shape {shape}")
        cpts[entry.var] = ConditionalTable(entry.var, tuple(entry.parents), np.asarray(entry.table).reshape(shape))
    return MarkovKTree(build_from_order(order), order, orient(order), cpts, tuple(parsed.names or ()))


def save_model(m: MarkovKTree, path: Path):
    Path(path).write_text(json.dumps(model_to_json(m), indent=2) + "\n")
    logger.info(f"Saved {m.k}-tree model over {m.n} variables to {path}")


def load_model(path: Path) -> MarkovKTree:
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise DataError(f"Invalid model file {path}: {e}")
    return model_from_json(payload)


def all_assignments(cardinalities: Mapping[int, int]) -> Iterable[Tuple[int, ...]]:
    """Every full assignment over 1..n in row-major order."""
    return itertools.product(*(range(cardinalities[v]) for v in sorted(cardinalities)))

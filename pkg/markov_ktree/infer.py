"""
Exact inference

Responsibility: marginals, evidence probabilities and most probable
explanations on a fitted Markov k-tree by message passing over its clique tree.

Clique i carries P(X_i | C_i); the root clique also carries the factors of the
base variables. Every message eliminates exactly one variable. All arithmetic
is in natural-log space; results are reported in bits.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Tuple

import numpy as np
from scipy.special import logsumexp

from markov_ktree.constants import TIE_TOL
from markov_ktree.errors import DataError, ZeroProbabilityEvidenceError
from markov_ktree.ktree import Clique, CliqueTree, tree_decomposition
from markov_ktree.logger import get_logger
from markov_ktree.model import MarkovKTree
from markov_ktree.tables import JointTable, broadcast_to_scope

logger = get_logger("infer")

Evidence = Mapping[int, int]


@dataclass(frozen=True)
class Message:
    source: int
    target: int
    scope: Clique
    log_table: np.ndarray


@dataclass(frozen=True)
class Calibration:
    """Clique beliefs (unnormalized, natural log) after both passes."""
    clique_tree: CliqueTree
    beliefs: Tuple[np.ndarray, ...]
    log_z: float
    upward: Tuple[Message, ...]
    downward: Tuple[Message, ...]


def check_evidence(m: MarkovKTree, evidence: Evidence) -> Dict[int, int]:
    cards = m.cardinalities
    checked = {}
    for v, s in evidence.items():
        v, s = int(v), int(s)
        if v not in cards:
            raise DataError(f"Evidence names unknown variable {v}")
        if not 0 <= s < cards[v]:
            raise DataError(f"Evidence state {s} of X{v} is outside [0, {cards[v]})")
        checked[v] = s
    return checked


def _log(probs: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(probs)


def _potentials(m: MarkovKTree, ct: CliqueTree, evidence: Dict[int, int]) -> List[np.ndarray]:
    cards = m.cardinalities
    potentials = []
    for i, node in enumerate(ct.nodes):
        pot = np.zeros(tuple(cards[v] for v in node))
        owned = [ct.introduced[i]] + (list(m.order.base) if i == ct.root else [])
        for v in owned:
            cpt = m.cpts[v]
            pot = pot + broadcast_to_scope(_log(cpt.probs), cpt.scope, node)
        for v, s in evidence.items():
            if v in node:
                indicator = np.full(cards[v], -np.inf)
                indicator[s] = 0.0
                pot = pot + broadcast_to_scope(indicator, (v,), node)
        potentials.append(pot)
    return potentials


def _collect(ct: CliqueTree, potentials: List[np.ndarray], maximize: bool):
    """Leaf-to-root pass; returns the messages and the root table."""
    children = ct.children
    up: Dict[int, Message] = {}
    root_table = None
    for i in ct.postorder():
        node = ct.nodes[i]
        table = potentials[i]
        for c in children[i]:
            table = table + broadcast_to_scope(up[c].log_table, up[c].scope, node)
        if i == ct.root:
            root_table = table
            continue
        axis = node.index(ct.introduced[i])
        reduced = table.max(axis=axis) if maximize else logsumexp(table, axis=axis)
        up[i] = Message(i, ct.parent[i], ct.separators[i], reduced)
    return up, root_table


def calibrate(m: MarkovKTree, evidence: Evidence) -> Calibration:
    """Sum-product in both directions over the clique tree."""
    evidence = check_evidence(m, evidence)
    ct = tree_decomposition(m.order)
    potentials = _potentials(m, ct, evidence)
    up, root_table = _collect(ct, potentials, maximize=False)
    log_z = float(logsumexp(root_table))

    children = ct.children
    down: Dict[int, Message] = {}
    beliefs: List[np.ndarray] = [None] * len(ct.nodes)
    for i in ct.preorder():
        node = ct.nodes[i]
        local = potentials[i]
        if i != ct.root:
            local = local + broadcast_to_scope(down[i].log_table, down[i].scope, node)
        incoming = {c: broadcast_to_scope(up[c].log_table, up[c].scope, node) for c in children[i]}
        beliefs[i] = local + sum(incoming.values(), np.zeros(()))
        for c in children[i]:
            others = local + sum((t for d, t in incoming.items() if d != c), np.zeros(()))
            drop = tuple(a for a, v in enumerate(node) if v not in ct.separators[c])
            down[c] = Message(i, c, ct.separators[c], logsumexp(others, axis=drop))

    return Calibration(
        clique_tree=ct,
        beliefs=tuple(beliefs),
        log_z=log_z,
        upward=tuple(up[i] for i in sorted(up)),
        downward=tuple(down[i] for i in sorted(down)),
    )


def marginal(m: MarkovKTree, x: int, evidence: Evidence = None) -> JointTable:
    """P(x | evidence), renormalized."""
    evidence = dict(evidence or {})
    if x in evidence:
        raise DataError(f"X{x} is fixed by the evidence")
    if x not in m.cardinalities:
        raise DataError(f"Unknown variable {x}")

    cal = calibrate(m, evidence)
    if cal.log_z == -math.inf:
        raise ZeroProbabilityEvidenceError(f"Evidence {evidence} has probability zero")
    i = next(j for j, node in enumerate(cal.clique_tree.nodes) if x in node)
    node = cal.clique_tree.nodes[i]
    others = tuple(a for a, v in enumerate(node) if v != x)
    log_px = logsumexp(cal.beliefs[i], axis=others) if others else cal.beliefs[i]
    probs = np.exp(log_px - logsumexp(log_px))
    return JointTable((x,), probs / probs.sum())


def evidence_probability(m: MarkovKTree, evidence: Evidence = None) -> float:
    """log2 P(evidence); -inf when the evidence is impossible."""
    evidence = check_evidence(m, evidence or {})
    if not evidence:
        return 0.0
    ct = tree_decomposition(m.order)
    _, root_table = _collect(ct, _potentials(m, ct, evidence), maximize=False)
    return float(logsumexp(root_table)) / math.log(2)


def _max_log(m: MarkovKTree, ct: CliqueTree, evidence: Dict[int, int]) -> float:
    _, root_table = _collect(ct, _potentials(m, ct, evidence), maximize=True)
    return float(root_table.max())


def mpe(m: MarkovKTree, evidence: Evidence = None) -> Tuple[Tuple[int, ...], float]:
    """
    The most probable completion of the evidence and its log2 joint probability.

    Ties go to the lexicographically smallest assignment: variables are fixed
    in index order, each to its smallest state whose max-product value still
    reaches the optimum.
    """
    evidence = check_evidence(m, evidence or {})
    ct = tree_decomposition(m.order)
    best = _max_log(m, ct, evidence)
    if best == -math.inf:
        raise ZeroProbabilityEvidenceError(f"Evidence {evidence} has probability zero")

    slack = TIE_TOL * max(1.0, abs(best))
    fixed = dict(evidence)
    for v in range(1, m.n + 1):
        if v in fixed:
            continue
        card = m.cardinalities[v]
        for s in range(card):
            if s == card - 1 or _max_log(m, ct, {**fixed, v: s}) >= best - slack:
                fixed[v] = s
                break

    assignment = tuple(fixed[v] for v in range(1, m.n + 1))
    return assignment, _max_log(m, ct, fixed) / math.log(2)

"""
Information measures in bits

Entropy, KL divergence and the set-valued mutual information I(X; C) used to
score every vertex / parent-set pair. Conventions: 0 log 0 = 0, and
p log(p / 0) = +inf, reported through `Divergence.support_violation`.
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from markov_ktree.errors import ScopeError
from markov_ktree.tables import (
    Distribution,
    JointTable,
    SampleSet,
    local_table,
    marginalize,
    reorder,
    source_variables,
)

Bits = float


@dataclass(frozen=True)
class Divergence:
    """KL divergence in bits; `support_violation` marks p > 0 where q = 0."""
    bits: Bits
    support_violation: bool = False

    @property
    def finite(self) -> bool:
        return not self.support_violation


def entropy(table: JointTable) -> Bits:
    p = table.flat
    p = p[p > 0]
    return max(0.0, float(-np.sum(p * np.log2(p))))


def kl_divergence(p: JointTable, q: JointTable) -> Divergence:
    if set(p.scope) != set(q.scope):
        raise ScopeError(f"KL needs identical scopes, got {p.scope} and {q.scope}")
    q_probs = reorder(q, p.scope).reshape(-1)
    p_probs = p.flat
    if q_probs.shape != p_probs.shape:
        raise ScopeError("KL operands disagree on cardinalities")

    support = p_probs > 0
    if np.any(q_probs[support] == 0):
        return Divergence(math.inf, support_violation=True)
    ratio = p_probs[support] / q_probs[support]
    return Divergence(max(0.0, float(np.sum(p_probs[support] * np.log2(ratio)))))


def mutual_information(joint: JointTable, x: int, c: Sequence[int]) -> Bits:
    """
    I(X; C) = D_KL(P(X, C) || P(X) P(C)), from marginals of `joint`.

    An empty C gives 0. If X itself is in C the result is H(X).
    """
    c = tuple(c)
    outside = ({x} | set(c)) - set(joint.scope)
    if outside:
        raise ScopeError(f"Variables {sorted(outside)} are not in scope {joint.scope}")
    if not c:
        return 0.0
    if x in c:
        return entropy(marginalize(joint, {x}))

    table = marginalize(joint, {x} | set(c))
    arr = reorder(table, (x,) + c)
    px = arr.sum(axis=tuple(range(1, arr.ndim)))
    pc = arr.sum(axis=0)
    independent = np.multiply.outer(px, pc)
    support = arr > 0
    value = np.sum(arr[support] * np.log2(arr[support] / independent[support]))
    return max(0.0, float(value))


def conditional_entropy(joint: JointTable, x: int, c: Sequence[int]) -> Bits:
    """H(X | C) = H(X, C) - H(C)."""
    c = tuple(c)
    if not c:
        return entropy(marginalize(joint, {x}))
    return max(0.0, entropy(marginalize(joint, {x} | set(c))) - entropy(marginalize(joint, c)))


def pairwise_mi_matrix(source: Distribution, pseudocount: float = 0.0) -> np.ndarray:
    """Symmetric n x n matrix of I(X_i; X_j) with a zero diagonal; row i is variable i + 1."""
    variables = source_variables(source)
    n = len(variables)
    mi = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            pair = local_table(source, (variables[i], variables[j]), pseudocount)
            mi[i, j] = mi[j, i] = mutual_information(pair, variables[i], (variables[j],))
    return mi


def independence_noise_floor(samples: SampleSet, x: int, c: Sequence[int]) -> Bits:
    """First-order expected plug-in MI under independence: (r_x - 1)(r_C - 1) / (2 N ln 2)."""
    if not c or samples.count == 0:
        return 0.0
    r_x = samples.cardinalities[x]
    r_c = int(np.prod([samples.cardinalities[v] for v in c]))
    return (r_x - 1) * (r_c - 1) / (2.0 * samples.count * math.log(2))

"""
Bounded tree-width Markov networks over k-trees.

Learns the backbone k-tree maximizing Σ I(X; π(X)), fits its conditional
tables, and answers exact queries over its clique tree.
"""

from markov_ktree.infer import evidence_probability, marginal, mpe
from markov_ktree.ktree import (
    CreationOrder,
    KTree,
    build_from_order,
    enumerate_all_ktrees,
    is_backbone_ktree,
    markov_chain_ktree,
    orient,
    tree_decomposition,
    validate_ktree,
)
from markov_ktree.learn import (
    backbone_dp,
    brute_force_mskt,
    chow_liu,
    learn_markov_backbone_ktree,
    mi_score_adapter,
)
from markov_ktree.model import MarkovKTree, delta_score, divergence_report, fit, joint_probability
from markov_ktree.tables import JointTable, SampleSet, empirical_joint, load_joint_json, load_samples_csv

__version__ = "1.0.0"

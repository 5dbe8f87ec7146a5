"""
Reporter Stage

Responsibility: Summarize the learned structure as one JSON-ready dict:
the optimal score, Δ with its per-vertex MI terms, the penalized Δ, the
independence noise floor for sampled data, and the exact divergence report
when the input is a full joint.
"""

import math

from markov_ktree.infotheory import independence_noise_floor
from markov_ktree.learn import dp_state_bound
from markov_ktree.logger import get_logger
from markov_ktree.model import amend, amended_delta, delta_terms, divergence_report
from markov_ktree.state import LearnState
from markov_ktree.tables import JointTable, SampleSet

logger = get_logger("reporter")


def reporter_stage(state: LearnState) -> LearnState:
    """
    Build the learn report.

    Args:
        state: Workflow state after search (and fit, when there is data)

    Returns:
        Updated state with report populated
    """
    result = state["result"]
    names = state["names"]
    report = {
        "command": "learn",
        "kind": state["kind"],
        "n": state["n"],
        "k": state["k"],
        "score": result.score,
        "edges": [list(e) for e in result.tree.canonical],
        "order": result.order.to_json(),
        "states_expanded": result.stats.states_expanded,
        "state_bound": dp_state_bound(state["n"], state["k"]),
    }

    model = state["model"]
    data = state["data"]
    if model is not None:
        terms = delta_terms(model.tree, model.orientation, data, state["pseudocount"])
        kept = amend(model.tree, model.orientation, model.tree.edges)
        report["delta"] = math.fsum(terms.values())
        report["terms"] = {names[v - 1]: bits for v, bits in sorted(terms.items())}
        report["penalty"] = state["penalty"]
        report["penalized_delta"] = amended_delta(
            model.tree, model.orientation, kept, data, state["penalty"], state["pseudocount"]
        )

        if isinstance(data, SampleSet):
            report["samples"] = data.count
            report["sampling_noise_bits"] = math.fsum(
                independence_noise_floor(data, v, model.orientation.parent_tuple(v))
                for v in range(1, model.n + 1)
            )
        elif isinstance(data, JointTable):
            report["divergence"] = divergence_report(data, model).to_dict()

    state["report"] = report
    logger.info(f"Report ready: score {result.score:.6f} over {len(report['edges'])} edges")
    return state

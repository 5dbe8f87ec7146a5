"""
Ingest Stage

Responsibility: Load the run input (CSV samples, JSON joint or JSON score
table) and decide whether a spanning k-tree can exist at all.
Backbone order is the column order of the input.
"""

import time
from pathlib import Path

from markov_ktree.errors import DataError
from markov_ktree.learn import TableScore
from markov_ktree.logger import get_logger
from markov_ktree.state import LearnState
from markov_ktree.tables import load_joint_json, load_samples_csv

logger = get_logger("ingest")


def ingest_stage(state: LearnState) -> LearnState:
    """
    Load the input named in the state.

    Args:
        state: Workflow state with input_path, kind and k

    Returns:
        Updated state with data or score_table, n, names and infeasible
    """
    started = time.perf_counter()
    path = Path(state["input_path"])
    kind = state["kind"]

    if kind == "csv-samples":
        samples = load_samples_csv(path)
        state["data"] = samples
        state["n"] = samples.n
        state["names"] = list(samples.names)
    elif kind == "json-joint":
        joint, names = load_joint_json(path)
        state["data"] = joint
        state["n"] = len(joint.scope)
        state["names"] = list(names)
    elif kind == "json-score-table":
        table = TableScore.load(path)
        state["score_table"] = table
        state["n"] = table.n
        state["names"] = [f"X{v}" for v in range(1, table.n + 1)]
    else:
        raise DataError(f"Unknown input kind: {kind}")

    if state["n"] <= state["k"]:
        state["infeasible"] = True
        state["errors"].append(f"n={state['n']} is not above k={state['k']}")

    state["timings"]["ingest"] = time.perf_counter() - started
    logger.info(f"Ingested {kind} over {state['n']} variables")
    return state

"""
Fitter Stage

Responsibility: Estimate the conditional tables of the learned k-tree from
the same data the search was scored on.
"""

import time

from markov_ktree.logger import get_logger
from markov_ktree.model import fit
from markov_ktree.state import LearnState

logger = get_logger("fitter")


def fitter_stage(state: LearnState) -> LearnState:
    started = time.perf_counter()
    result = state["result"]
    state["model"] = fit(result.tree, result.order, state["data"], state["pseudocount"], state["names"])
    state["timings"]["fit"] = time.perf_counter() - started
    logger.info(f"Fitted {state['n']} conditional tables")
    return state

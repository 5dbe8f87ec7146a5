"""
Searcher Stage

Responsibility: Run the backbone dynamic program for the optimal backbone
k-tree under the stage's score function.
"""

from markov_ktree.learn import backbone_dp
from markov_ktree.logger import get_logger
from markov_ktree.state import LearnState

logger = get_logger("searcher")


def searcher_stage(state: LearnState) -> LearnState:
    """
    Args:
        state: Workflow state with n, k and score_fn

    Returns:
        Updated state with result (LearnResult) and its wall time
    """
    result = backbone_dp(state["n"], state["k"], state["score_fn"])
    state["result"] = result
    state["timings"]["search"] = result.stats.wall_time
    logger.info(f"Best backbone {state['k']}-tree scores {result.score:.6f} ({result.stats.states_expanded} states)")
    return state

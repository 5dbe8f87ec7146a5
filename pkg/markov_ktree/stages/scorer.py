"""
Scorer Stage

Responsibility: Provide the score f(X, parents) the search maximizes:
mutual information from the data, or the loaded score table.
"""

from markov_ktree.errors import DataError
from markov_ktree.learn import mi_score_adapter
from markov_ktree.logger import get_logger
from markov_ktree.state import LearnState

logger = get_logger("scorer")


def scorer_stage(state: LearnState) -> LearnState:
    table = state["score_table"]
    if table is not None:
        if table.k != state["k"]:
            raise DataError(f"Score table was built for k={table.k}, run asks for k={state['k']}")
        state["score_fn"] = table
        logger.info(f"Scoring with a table of {len(table.entries)} entries")
    else:
        state["score_fn"] = mi_score_adapter(state["data"], state["k"], state["pseudocount"])
        logger.info(f"Scoring with mutual information (pseudocount {state['pseudocount']})")
    return state

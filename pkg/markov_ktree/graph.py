"""
LangGraph Workflow Definition

This module wires the learn stages into a workflow.
Stages coordinate through shared state and conditional routing.
"""

from langgraph.graph import StateGraph, END

from markov_ktree.logger import get_logger
from markov_ktree.stages.fitter import fitter_stage
from markov_ktree.stages.ingest import ingest_stage
from markov_ktree.stages.reporter import reporter_stage
from markov_ktree.stages.scorer import scorer_stage
from markov_ktree.stages.searcher import searcher_stage
from markov_ktree.state import LearnState

logger = get_logger("graph")


def route_after_ingest(state: LearnState) -> str:
    """
    Stop early when no spanning k-tree exists (n <= k).

    Args:
        state: Current workflow state

    Returns:
        Next node name ("end" when infeasible, "scorer" to continue)
    """
    if state["infeasible"]:
        logger.warning(f"n={state['n']} variables with k={state['k']}: no (k+1)-clique, stopping")
        return "end"
    return "scorer"


def route_after_search(state: LearnState) -> str:
    """
    Score tables carry no data to fit, so they skip straight to the report.

    Returns:
        Next node name ("fitter" or "reporter")
    """
    if state["data"] is None:
        logger.info("No data behind the score table; skipping the fit")
        return "reporter"
    return "fitter"


def create_workflow():
    """
    Create and compile the learn workflow.

    Workflow structure:
    1. Ingest → loads the input
    2. [Conditional] If n <= k → END
    3. Scorer → MI score or loaded table
    4. Searcher → backbone DP
    5. [Conditional] If there is data → Fitter, else Reporter
    6. Reporter → END

    Returns:
        Compiled LangGraph workflow
    """
    workflow = StateGraph(LearnState)

    workflow.add_node("ingest", ingest_stage)
    workflow.add_node("scorer", scorer_stage)
    workflow.add_node("searcher", searcher_stage)
    workflow.add_node("fitter", fitter_stage)
    workflow.add_node("reporter", reporter_stage)

    workflow.set_entry_point("ingest")

    workflow.add_conditional_edges(
        "ingest",
        route_after_ingest,
        {
            "end": END,
            "scorer": "scorer"
        }
    )
    workflow.add_edge("scorer", "searcher")
    workflow.add_conditional_edges(
        "searcher",
        route_after_search,
        {
            "fitter": "fitter",
            "reporter": "reporter"
        }
    )
    workflow.add_edge("fitter", "reporter")
    workflow.add_edge("reporter", END)

    app = workflow.compile()
    logger.debug("Learn workflow compiled: ingest → [n > k?] → scorer → searcher → [data?] → fitter → reporter")
    return app


# Create the compiled workflow (singleton)
learn_app = create_workflow()

"""
LangGraph State Schema for the learn pipeline

This module defines the shared state that flows between stages.
Each stage reads from and writes to this state.
"""

from typing import Any, Dict, List, Optional, TypedDict


class LearnState(TypedDict):
    """
    Shared state for the learn workflow.

    State flows through stages:
    1. Input path → Ingest (samples, joint or score table)
    2. Data → Scorer (score function)
    3. Score function → Searcher (backbone DP result)
    4. Result + data → Fitter (Markov k-tree model)
    5. Everything → Reporter (JSON report)
    """

    # Run inputs
    input_path: str
    kind: str  # "csv-samples" | "json-joint" | "json-score-table"
    k: int
    pseudocount: float
    penalty: float  # λ per kept edge in the penalized Δ

    # Ingest outputs
    data: Optional[Any]  # SampleSet or JointTable
    score_table: Optional[Any]  # TableScore
    n: int
    names: List[str]
    infeasible: bool

    # Scorer / Searcher outputs
    score_fn: Optional[Any]  # ScoreFunction
    result: Optional[Any]  # LearnResult

    # Fitter outputs
    model: Optional[Any]  # MarkovKTree

    # Reporter outputs
    report: Dict[str, Any]

    # Metadata
    errors: List[str]
    timings: Dict[str, float]  # seconds per stage


def create_initial_state(
    input_path: str,
    kind: str,
    k: int,
    pseudocount: float = 0.0,
    penalty: float = 0.0
) -> LearnState:
    """
    Create initial state from a run configuration.

    Args:
        input_path: CSV samples, JSON joint or JSON score table
        kind: Which of the three the input is
        k: Tree width of the learned model
        pseudocount: Additive smoothing for empirical tables
        penalty: Per-edge penalty λ reported next to Δ

    Returns:
        LearnState with inputs populated
    """
    return LearnState(
        # Run inputs
        input_path=input_path,
        kind=kind,
        k=k,
        pseudocount=pseudocount,
        penalty=penalty,

        # Initialize empty stage outputs
        data=None,
        score_table=None,
        n=0,
        names=[],
        infeasible=False,
        score_fn=None,
        result=None,
        model=None,
        report={},

        # Initialize metadata
        errors=[],
        timings={}
    )

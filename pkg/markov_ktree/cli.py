"""
Markov k-tree command line

Subcommands: learn, score, infer, oracle-check, export-dot.
Reports go to stdout as JSON lines; logs go to stderr (level from KTREE_LOG).

Exit codes: 0 ok, 1 unexpected failure or oracle mismatch, 2 malformed input
or refused cap, 3 infeasible (n <= k), 4 zero-probability evidence.
"""

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from markov_ktree import config
from markov_ktree.constants import (
    CLIQUE_TREE_DOT_FILENAME,
    DEFAULT_ORACLE_MAX_N,
    DEFAULT_ORACLE_TRIALS,
    DEFAULT_SEED,
    KTREE_DOT_FILENAME,
    MODEL_FILENAME,
    REPORT_FILENAME,
)
from markov_ktree.errors import DataError, InfeasibleError, KTreeError, OracleCapError, ZeroProbabilityEvidenceError
from markov_ktree.formats import InferenceQuery
from markov_ktree.graph import learn_app
from markov_ktree.infer import evidence_probability, marginal, mpe
from markov_ktree.ktree import clique_tree_to_dot, ktree_to_dot, tree_decomposition
from markov_ktree.learn import oracle_check
from markov_ktree.logger import get_logger
from markov_ktree.model import MarkovKTree, amend, amended_delta, divergence_report, load_model, save_model
from markov_ktree.state import create_initial_state
from markov_ktree.tables import load_joint_json

logger = get_logger("cli")

InputKind = Literal["csv-samples", "json-joint", "json-score-table"]


class RunConfig(BaseModel):
    """Validated options of one CLI invocation."""
    command: Literal["learn", "score", "infer", "oracle-check", "export-dot"]
    k: Optional[int] = Field(default=None, ge=1, description="Tree width")
    input: Optional[Path] = Field(default=None, description="Samples CSV, joint JSON or score-table JSON")
    kind: Optional[InputKind] = Field(default=None, description="Input kind; inferred from the file when omitted")
    pseudocount: float = Field(default=0.0, ge=0, description="Additive smoothing for empirical tables")
    penalty: float = Field(default=0.0, ge=0, description="Per-edge penalty λ")
    oracle_cap: Optional[int] = Field(default=None, ge=2, description="Lowered brute-force vertex cap")
    seed: int = Field(default=DEFAULT_SEED, description="Seed for every randomized choice")
    out: Path = Field(default=Path("."), description="Output directory")
    model: Optional[Path] = Field(default=None, description="Model JSON written by learn")
    query: Optional[str] = Field(default=None, description="Inference query as JSON text or a path to one")
    trials: int = Field(default=DEFAULT_ORACLE_TRIALS, ge=1)
    max_n: int = Field(default=DEFAULT_ORACLE_MAX_N, ge=2)
    timings: bool = Field(default=False, description="Add wall times to the learn report")

    @field_validator('input', 'model')
    def validate_readable(cls, v):
        if v is not None and not v.is_file():
            raise ValueError(f'{v} is not a readable file')
        return v

    @model_validator(mode='after')
    def infer_kind(self):
        if self.input is not None and self.kind is None:
            self.kind = _guess_kind(self.input)
        return self

    class Config:
        json_schema_extra = {
            "example": {
                "command": "learn",
                "k": 2,
                "input": "samples.csv",
                "kind": "csv-samples",
                "pseudocount": 0.0,
                "seed": 0,
                "out": "out"
            }
        }


def _guess_kind(path: Path) -> str:
    if path.suffix.lower() == ".csv":
        return "csv-samples"
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError:
        raise ValueError(f'{path} is neither CSV nor JSON')
    return "json-score-table" if isinstance(payload, dict) and "entries" in payload else "json-joint"


def _emit(payload: dict) -> str:
    line = json.dumps(payload)
    print(line)
    return line


def _require(value, flag: str, command: str):
    if value is None:
        raise DataError(f"{command} needs {flag}")
    return value


def cmd_learn(cfg: RunConfig) -> int:
    """Learn the optimal backbone k-tree; write model JSON, DOT and the report."""
    k = _require(cfg.k, "--k", "learn")
    path = _require(cfg.input, "--input", "learn")
    state = create_initial_state(str(path), cfg.kind, k, cfg.pseudocount, cfg.penalty)

    final = learn_app.invoke(state)
    if final["infeasible"]:
        raise InfeasibleError("; ".join(final["errors"]))

    cfg.out.mkdir(parents=True, exist_ok=True)
    report = dict(final["report"])
    if cfg.timings:
        report["timings"] = final["timings"]

    model: Optional[MarkovKTree] = final["model"]
    if model is not None:
        save_model(model, cfg.out / MODEL_FILENAME)
    (cfg.out / KTREE_DOT_FILENAME).write_text(ktree_to_dot(final["result"].tree, final["names"]))
    line = _emit(report)
    (cfg.out / REPORT_FILENAME).write_text(line + "\n")
    return 0


def cmd_score(cfg: RunConfig) -> int:
    """Divergence report of a saved model against an exact joint."""
    model = load_model(_require(cfg.model, "--model", "score"))
    path = _require(cfg.input, "--input", "score")
    if cfg.kind != "json-joint":
        raise DataError("score needs a json-joint input")
    joint, _ = load_joint_json(path)

    report = divergence_report(joint, model)
    payload = {"command": "score", **report.to_dict()}
    payload["penalty"] = cfg.penalty
    payload["penalized_delta"] = amended_delta(
        model.tree, model.orientation, amend(model.tree, model.orientation, model.tree.edges), joint, cfg.penalty
    )
    _emit(payload)
    return 0


def _parse_evidence(model: MarkovKTree, raw: Dict[str, int]) -> Dict[int, int]:
    evidence = {}
    for key, state in raw.items():
        if key.isdigit():
            evidence[int(key)] = state
        elif key in model.names:
            evidence[model.names.index(key) + 1] = state
        else:
            raise DataError(f"Evidence names unknown variable {key!r}")
    return evidence


def _load_query(text: str) -> InferenceQuery:
    try:
        payload = json.loads(text if text.lstrip().startswith("{") else Path(text).read_text())
        return InferenceQuery(**payload)
    except (OSError, json.JSONDecodeError, ValidationError, TypeError) as e:
        raise DataError(f"Invalid query: {e}")


def cmd_infer(cfg: RunConfig) -> int:
    """Answer one marginal, MPE or evidence query on a saved model."""
    model = load_model(_require(cfg.model, "--model", "infer"))
    query = _load_query(_require(cfg.query, "--query", "infer"))
    evidence = _parse_evidence(model, query.evidence)

    if query.type == "marginal":
        table = marginal(model, query.var, evidence)
        result = [float(p) for p in table.flat]
        log2p = evidence_probability(model, evidence)
    elif query.type == "mpe":
        assignment, log2p = mpe(model, evidence)
        result = {name: state for name, state in zip(model.names, assignment)}
    else:
        log2p = evidence_probability(model, evidence)
        if log2p == -math.inf:
            raise ZeroProbabilityEvidenceError(f"Evidence {evidence} has probability zero")
        result = 2.0 ** log2p

    _emit({"command": "infer", "query": query.model_dump(), "result": result, "log2p": log2p})
    return 0


def cmd_oracle_check(cfg: RunConfig) -> int:
    """backbone_dp against brute force on random score tables; exit 0 iff every trial matches."""
    k_values = [cfg.k] if cfg.k is not None else [1, 2]
    for k in k_values:
        limit = config.oracle_cap(k)
        if cfg.oracle_cap is not None and cfg.oracle_cap > limit:
            raise OracleCapError(f"Refusing oracle cap {cfg.oracle_cap} for k={k}: the limit is {limit}")
        cap = cfg.oracle_cap if cfg.oracle_cap is not None else limit
        if cfg.max_n > cap:
            raise OracleCapError(f"Refusing --max-n {cfg.max_n} for k={k}: the cap is {cap}")

    records = oracle_check(range(3, cfg.max_n + 1), k_values, cfg.trials, cfg.seed, cfg.oracle_cap)
    for record in records:
        _emit({"command": "oracle-check", **record.to_dict()})
    failed = sum(not r.match for r in records)
    _emit({
        "command": "oracle-check",
        "summary": True,
        "k": k_values,
        "max_n": cfg.max_n,
        "trials": len(records),
        "passed": len(records) - failed,
        "failed": failed,
        "ok": failed == 0,
    })
    return 0 if failed == 0 else 1


def cmd_export_dot(cfg: RunConfig) -> int:
    """DOT of a saved model's k-tree and of its clique tree."""
    model = load_model(_require(cfg.model, "--model", "export-dot"))
    cfg.out.mkdir(parents=True, exist_ok=True)
    files: List[str] = []
    (cfg.out / KTREE_DOT_FILENAME).write_text(ktree_to_dot(model.tree, model.names))
    files.append(KTREE_DOT_FILENAME)
    if model.order.steps:
        (cfg.out / CLIQUE_TREE_DOT_FILENAME).write_text(clique_tree_to_dot(tree_decomposition(model.order), model.names))
        files.append(CLIQUE_TREE_DOT_FILENAME)
    _emit({"command": "export-dot", "files": files})
    return 0


COMMANDS = {
    "learn": cmd_learn,
    "score": cmd_score,
    "infer": cmd_infer,
    "oracle-check": cmd_oracle_check,
    "export-dot": cmd_export_dot,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized choices")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")

    parser = argparse.ArgumentParser(prog="markov_ktree", description="Bounded tree-width Markov k-tree learning")
    sub = parser.add_subparsers(dest="command", required=True)

    learn = sub.add_parser("learn", parents=[common], help="learn the optimal backbone k-tree")
    learn.add_argument("--k", type=int, required=True)
    learn.add_argument("--input", type=Path, required=True)
    learn.add_argument("--kind", choices=["csv-samples", "json-joint", "json-score-table"])
    learn.add_argument("--pseudocount", type=float, default=0.0)
    learn.add_argument("--lambda", dest="penalty", type=float, default=0.0, help="per-edge penalty")
    learn.add_argument("--timings", action="store_true", help="add wall times to the report")

    score = sub.add_parser("score", parents=[common], help="divergence report against an exact joint")
    score.add_argument("--model", type=Path, required=True)
    score.add_argument("--input", type=Path, required=True)
    score.add_argument("--kind", choices=["json-joint"])
    score.add_argument("--lambda", dest="penalty", type=float, default=0.0, help="per-edge penalty")

    infer = sub.add_parser("infer", parents=[common], help="marginal, MPE or evidence query")
    infer.add_argument("--model", type=Path, required=True)
    infer.add_argument("--query", required=True, help="query JSON text or file")

    oracle = sub.add_parser("oracle-check", parents=[common], help="backbone DP vs brute force")
    oracle.add_argument("--k", type=int, help="tree width (default: 1 and 2)")
    oracle.add_argument("--trials", type=int, default=DEFAULT_ORACLE_TRIALS)
    oracle.add_argument("--max-n", dest="max_n", type=int, default=DEFAULT_ORACLE_MAX_N)
    oracle.add_argument("--oracle-cap", dest="oracle_cap", type=int)

    dot = sub.add_parser("export-dot", parents=[common], help="DOT of a model's k-tree and clique tree")
    dot.add_argument("--model", type=Path, required=True)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(**vars(args))
    except ValidationError as e:
        logger.error(f"Invalid arguments: {e}")
        return 2

    try:
        return COMMANDS[cfg.command](cfg)
    except KTreeError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except Exception as e:
        logger.exception(f"Unexpected failure: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())

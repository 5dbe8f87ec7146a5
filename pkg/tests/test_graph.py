import json

import numpy as np

from markov_ktree.graph import learn_app, route_after_ingest, route_after_search
from markov_ktree.ktree import is_backbone_ktree
from markov_ktree.learn import random_score_table
from markov_ktree.state import create_initial_state


def test_initial_state_is_empty():
    state = create_initial_state("data.csv", "csv-samples", 2, pseudocount=0.5)
    assert state["k"] == 2 and state["pseudocount"] == 0.5 and state["penalty"] == 0.0
    assert state["data"] is None and state["result"] is None and state["model"] is None
    assert state["errors"] == [] and state["timings"] == {} and not state["infeasible"]


def test_routes():
    state = create_initial_state("data.csv", "csv-samples", 2)
    assert route_after_ingest(state) == "scorer"
    state["infeasible"] = True
    assert route_after_ingest(state) == "end"
    assert route_after_search(state) == "reporter"
    state["data"] = object()
    assert route_after_search(state) == "fitter"


def test_samples_run_through_every_stage(fixtures_dir):
    final = learn_app.invoke(create_initial_state(str(fixtures_dir / "chain_samples.csv"), "csv-samples", 2))
    assert is_backbone_ktree(final["result"].tree)
    assert final["model"].names == ("A", "B", "C", "D", "E")
    assert final["report"]["score"] == final["result"].score
    assert set(final["timings"]) == {"ingest", "search", "fit"}


def test_infeasible_run_stops_after_ingest(fixtures_dir):
    final = learn_app.invoke(create_initial_state(str(fixtures_dir / "xor_joint.json"), "json-joint", 3))
    assert final["infeasible"]
    assert final["result"] is None and final["report"] == {}
    assert final["errors"] == ["n=3 is not above k=3"]


def test_score_table_run_has_no_model(tmp_path):
    path = tmp_path / "scores.json"
    path.write_text(json.dumps(random_score_table(6, 2, np.random.default_rng(1)).to_json()))
    final = learn_app.invoke(create_initial_state(str(path), "json-score-table", 2))
    assert final["model"] is None
    assert final["report"]["n"] == 6
    assert "fit" not in final["timings"]

import os
from pathlib import Path

import pytest

import ctxpref

SCENARIOS = Path(os.environ.get("CTXPREF_SCENARIO_DIR", Path(__file__).resolve().parents[2] / "scenarios"))


def graph():
    return ctxpref.WorldGraph((SCENARIOS / "parking.graph").read_text())


def test_parse_and_print():
    f = ctxpref.parse("(g2) & (g2 -> F p010)")
    assert str(f) == "g2 & (g2 -> F p010)"
    assert f == ctxpref.Formula("g2 & (g2 -> F p010)")
    assert f.atoms() == {"g2", "p010"}
    assert str(ctxpref.parse("!F p").nnf()) == "G !p"


def test_parse_error_carries_offset():
    with pytest.raises(ctxpref.ParseError, match="offset 5"):
        ctxpref.parse("g2 & ")
    with pytest.raises(ValueError):
        ctxpref.parse("")


def test_prover():
    assert not ctxpref.is_satisfiable("G !g3 & g3")
    assert ctxpref.is_satisfiable(ctxpref.parse("g2 & (g2 -> F p010)"))
    assert ctxpref.is_valid("G p -> F p")
    assert not ctxpref.is_valid("F p -> G p")
    tree = ctxpref.truth_tree("g1 & ((g1 -> F p018) | (g1 -> F p015))")
    assert "1.[a]: p018" in tree and "1.[b]: p015" in tree
    assert ctxpref.truth_tree("p", "dot").startswith("digraph")
    assert ctxpref.open_consequences("g2 & (g2 -> F p010)") == [(2, {"p010"})]


def test_graph_operations():
    g = graph()
    assert len(g) == 39
    assert ("g1", "G") in g.nodes()
    h = g.car_enters("c1", "g2").car_moves("c1", "r05").car_moves("c1", "p010")
    assert h.occupant("p010") == "c1"
    assert not h.is_free("p010")
    assert h.check_invariants() is None
    assert g.is_free("p010")
    with pytest.raises(ctxpref.GraphError):
        g.car_moves("c9", "p010")
    parts, border = ctxpref.split(g, 3)
    assert len(parts) == 3 and border
    assert ctxpref.glue(parts) == g


def test_mine():
    rows = ["user,node,timestamp"]
    minute = 0
    for _ in range(3):
        for node in ["g2", "r05", "p010", "r05", "g2"]:
            rows.append(f"idKR55,{node},2014-01-20T09:{minute:02d}:00")
            minute += 1
    store = ctxpref.mine("\n".join(rows) + "\n", graph())
    assert ("idKR55", "g2 -> F p010", 3) in store
    assert ("idKR55", "G !g1", 1) in store


def test_simulate_preference():
    out = ctxpref.simulate((SCENARIOS / "preference.scn").read_text())
    assert out["decisions"][-1]["summary"] == "suggest p018 (Preferred, r=7)"
    assert ("idKR55", "g2 -> F p018", 7) in out["store"]
    assert out["stats"]["trips"] == 9
    assert out["report"].startswith("seed: 0\n")
    nearest = ctxpref.simulate((SCENARIOS / "preference_full.scn").read_text(), fallback_nearest=True)
    assert nearest["decisions"][-1]["rationale"] == "NearestFree"


def test_generate_round_trip():
    text = ctxpref.generate(graph(), seed=3, users=2, trips=2)
    assert text == ctxpref.generate(graph(), seed=3, users=2, trips=2)
    out = ctxpref.simulate(text)
    assert out["stats"]["trips"] == 4
    with pytest.raises(ctxpref.ScenarioError):
        ctxpref.generate(graph(), users=0)

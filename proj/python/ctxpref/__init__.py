"""Temporal preference reasoning for parking.

Formulas use ``F`` (eventually) and ``G`` (always) over propositional atoms,
for example ``g2 & (g2 -> F p010)``.
"""

from ._core import (
    AgentError,
    Formula,
    GraphError,
    KnowledgeError,
    ParseError,
    ScenarioError,
    WorldGraph,
    generate,
    glue,
    is_satisfiable,
    is_valid,
    mine,
    open_consequences,
    parse,
    print_formula,
    simulate,
    split,
    truth_tree,
)

__all__ = [
    "AgentError",
    "Formula",
    "GraphError",
    "KnowledgeError",
    "ParseError",
    "ScenarioError",
    "WorldGraph",
    "generate",
    "glue",
    "is_satisfiable",
    "is_valid",
    "mine",
    "open_consequences",
    "parse",
    "print_formula",
    "simulate",
    "split",
    "truth_tree",
]

"""Exemplify timed specifications over bounded signals.

Compose a specification automaton with per-signal bounding automata, explore
the resulting parametric zone graph, and emit concrete parameter valuations
together with positive and negative example runs as piecewise-linear traces.
"""

from .automata import FREE, Automaton, ComposeError, Edge, Network, compose, is_strongly_deterministic
from .exemplify import ExemplifyResult, TaggedRun, exemplify, exemplify_run
from .io import ModelError, emit_model, emit_plot, emit_trace, parse_model, read_trace
from .poly import DimInterval, Polyhedron, PolyError, Space, cmp_atom, frac, point_in_difference
from .semantics import (
    Budget,
    ConcreteRun,
    ConcreteState,
    RunStep,
    SymbolicRun,
    SymbolicState,
    Verdict,
    ZoneGraph,
    explore_bfs,
    initial_symbolic_state,
    pick_symb_run,
    succ,
    validate_run,
)

__version__ = "0.1.0"

__all__ = [
    "FREE", "Automaton", "ComposeError", "Edge", "Network", "compose", "is_strongly_deterministic",
    "ExemplifyResult", "TaggedRun", "exemplify", "exemplify_run",
    "ModelError", "emit_model", "emit_plot", "emit_trace", "parse_model", "read_trace",
    "DimInterval", "Polyhedron", "PolyError", "Space", "cmp_atom", "frac", "point_in_difference",
    "Budget", "ConcreteRun", "ConcreteState", "RunStep", "SymbolicRun", "SymbolicState",
    "Verdict", "ZoneGraph", "explore_bfs", "initial_symbolic_state", "pick_symb_run",
    "succ", "validate_run",
    "__version__",
]

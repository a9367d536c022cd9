"""Concrete and symbolic semantics of constant-rate automata.

The concrete side validates alternating state/step sequences against the
automaton (the oracle every produced run is judged by).  The symbolic side
builds the zone graph: locations paired with exact constraint sets over
variables, parameters and an injected absolute-time dimension, explored
breadth-first with on-the-fly deduplication.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .automata import Automaton, Loc
from .poly import Polyhedron, PolyError, Space, cmp_atom, frac

# Absolute-time dimension: injected here, rate 1 everywhere, never updated,
# and hidden from every user-facing artifact.
T_ABS = "t_abs"


@dataclass(frozen=True)
class ConcreteState:
    location: Loc
    values: Mapping[str, Fraction]


@dataclass(frozen=True)
class RunStep:
    edge_id: int
    duration: Fraction


@dataclass
class ConcreteRun:
    """Alternating states and (edge, duration) steps, plus the parameter
    valuation the run is to be judged under."""

    pval: dict[str, Fraction]
    states: list[ConcreteState]
    steps: list[RunStep]

    def __post_init__(self):
        if len(self.states) != len(self.steps) + 1:
            raise ValueError("run must start and end with a state")


@dataclass(frozen=True)
class Verdict:
    positive: bool
    fail_index: int | None = None
    reason: str | None = None  # init | invariant | guard | update | flow


@dataclass(frozen=True)
class Budget:
    max_depth: int = 50
    max_states: int = 10000

    def __post_init__(self):
        if self.max_depth < 1 or self.max_states < 1:
            raise ValueError("budgets must be at least 1")


class SymbolicState:
    """A location with its reachable constraint set (zone)."""

    def __init__(self, location: Loc, zone: Polyhedron):
        self.location = location
        self.zone = zone
        self._no_time: Polyhedron | None = None
        self._params: Polyhedron | None = None

    @property
    def zone_without_time(self) -> Polyhedron:
        if self._no_time is None:
            self._no_time = self.zone.eliminate([T_ABS]).normal_form()
        return self._no_time

    @property
    def param_shadow(self) -> Polyhedron:
        if self._params is None:
            self._params = self.zone.project_params().minimized()
        return self._params

    def __repr__(self):
        return f"SymbolicState({self.location!r}, {self.zone!r})"


@dataclass
class ZoneGraph:
    states: list[SymbolicState] = field(default_factory=list)
    edges: list[tuple[int, int, int]] = field(default_factory=list)  # (src, edge_id, dst)
    depth: list[int] = field(default_factory=list)
    init: int = 0
    exhausted: bool = False  # budget ran out before the frontier emptied


@dataclass
class SymbolicRun:
    states: list[SymbolicState]
    edge_ids: list[int]

    def __len__(self) -> int:
        return len(self.edge_ids)

    def state_at(self, k: int) -> SymbolicState:
        return self.states[k]

    def edge_at(self, k: int) -> int:
        return self.edge_ids[k]


class _Ctx:
    """Per-automaton cache: zone space and polyhedra rebased onto it."""

    def __init__(self, a: Automaton):
        if T_ABS in a.space.names:
            raise ValueError(f"{T_ABS!r} is reserved for the absolute-time dimension")
        self.space = a.space.extended(T_ABS)
        self.invariant = {loc: a.invariant[loc].rebased(self.space) for loc in a.locations}
        self.guard = [e.guard.rebased(self.space) for e in a.edges]
        self.flow = {}
        for loc in a.locations:
            rates = {v: a.flow[loc][v] for v in a.variables}
            bad = [v for v, r in rates.items() if not isinstance(r, Fraction)]
            if bad:
                raise ValueError(f"non-constant rate for {bad} in {loc!r}; compose the network first")
            rates[T_ABS] = Fraction(1)
            self.flow[loc] = rates
        self.out_edges: dict[Loc, list[int]] = {loc: [] for loc in a.locations}
        for i, e in enumerate(a.edges):
            self.out_edges[e.source].append(i)
        self.init_atoms = []
        for v, (lo, lc, hi, hc) in a.init_box.items():
            self.init_atoms.append(cmp_atom({v: 1}, ">=" if lc else ">", lo))
            self.init_atoms.append(cmp_atom({v: 1}, "<=" if hc else "<", hi))
        self.init_atoms.append(cmp_atom({T_ABS: 1}, "=", 0))
        for p in a.params:
            self.init_atoms.append(cmp_atom({p: 1}, ">=", 0))


def _context(a: Automaton) -> _Ctx:
    ctx = a.__dict__.get("_sem_ctx")
    if ctx is None:
        ctx = _Ctx(a)
        a.__dict__["_sem_ctx"] = ctx
    return ctx


def zone_space(a: Automaton) -> Space:
    return _context(a).space


def initial_values(a: Automaton) -> Polyhedron:
    """Initial variable box with time pinned to 0 and parameters nonnegative."""
    ctx = _context(a)
    return Polyhedron(ctx.space, ctx.init_atoms)


def initial_symbolic_state(a: Automaton) -> SymbolicState:
    ctx = _context(a)
    zone = initial_values(a).time_elapse(ctx.flow[a.initial]) & ctx.invariant[a.initial]
    if not zone.is_satisfiable():
        raise ValueError("initial values violate the initial location's invariant")
    return SymbolicState(a.initial, zone.minimized())


def succ(a: Automaton, s: SymbolicState, edge_id: int) -> SymbolicState | None:
    """Successor zone across one edge, or None when it is empty."""
    ctx = _context(a)
    e = a.edges[edge_id]
    if e.source != s.location:
        raise ValueError("edge does not leave the state's location")
    z = s.zone & ctx.guard[edge_id]
    if not z.is_satisfiable():
        return None
    z = z.update({v: frac(val) for v, val in e.updates.items()})
    z = z & ctx.invariant[e.target]
    z = z.time_elapse(ctx.flow[e.target]) & ctx.invariant[e.target]
    if not z.is_satisfiable():
        return None
    return SymbolicState(e.target, z)


def explore_bfs(
    a: Automaton,
    targets: Iterable[Loc],
    budget: Budget = Budget(),
    max_hits: int = 1,
) -> tuple[ZoneGraph, list[int]]:
    """Layered exploration of the zone graph until `max_hits` target states
    are stored or the budget runs out.

    A freshly computed state is discarded when an already-stored state has
    the same location and the same zone once the absolute-time dimension is
    eliminated; the edge into the stored twin is still recorded.  Zones are
    compared through their canonical normal form, which equal sets share in
    all but contrived cases.  Returns the graph and the indices of target
    states in discovery order.
    """
    ctx = _context(a)
    target_set = set(targets)
    zg = ZoneGraph()
    zg.states.append(initial_symbolic_state(a))
    zg.depth.append(0)
    first = zg.states[0]
    seen: dict[tuple, int] = {(first.location, first.zone_without_time.canon_key): 0}
    hits: list[int] = []
    if first.location in target_set:
        hits.append(0)
        if len(hits) >= max_hits:
            return zg, hits
    queue: deque[int] = deque([0])
    while queue:
        i = queue.popleft()
        if zg.depth[i] >= budget.max_depth:
            zg.exhausted = True
            continue
        for eid in ctx.out_edges[zg.states[i].location]:
            t = succ(a, zg.states[i], eid)
            if t is None:
                continue
            key = (t.location, t.zone_without_time.canon_key)
            dup = seen.get(key)
            if dup is not None:
                zg.edges.append((i, eid, dup))
                continue
            if len(zg.states) >= budget.max_states:
                zg.exhausted = True
                return zg, hits
            t.zone = t.zone.minimized()  # only stored states pay for slimming
            zg.states.append(t)
            zg.depth.append(zg.depth[i] + 1)
            j = len(zg.states) - 1
            seen[key] = j
            zg.edges.append((i, eid, j))
            queue.append(j)
            if t.location in target_set:
                hits.append(j)
                if len(hits) >= max_hits:
                    return zg, hits
    return zg, hits


def _incoming(zg: ZoneGraph) -> dict[int, list[tuple[int, int]]]:
    into: dict[int, list[tuple[int, int]]] = {}
    for src, eid, dst in zg.edges:
        into.setdefault(dst, []).append((src, eid))
    return into


def pick_symb_run(zg: ZoneGraph, target: int) -> SymbolicRun:
    """Shortest (fewest edges) run from the initial state to `target`,
    reconstructed backwards; ties go to the earliest stored edge."""
    into = _incoming(zg)
    cur = target
    edge_ids: list[int] = []
    indices = [target]
    while cur != zg.init:
        step = next((se for se in into.get(cur, ()) if zg.depth[se[0]] == zg.depth[cur] - 1), None)
        if step is None:
            raise ValueError("target is not reachable in the stored graph")
        src, eid = step
        edge_ids.append(eid)
        indices.append(src)
        cur = src
    indices.reverse()
    edge_ids.reverse()
    return SymbolicRun([zg.states[i] for i in indices], edge_ids)


def shortest_runs(zg: ZoneGraph, target: int, limit: int) -> Iterator[SymbolicRun]:
    """All shortest runs to `target`, ordered by the backward tie-break
    sequence (the first yielded run equals pick_symb_run's)."""
    into = _incoming(zg)
    count = 0

    def walk(cur: int, suffix_edges: list[int], suffix_states: list[int]) -> Iterator[tuple[list[int], list[int]]]:
        if cur == zg.init:
            yield suffix_edges, suffix_states
            return
        for src, eid in into.get(cur, ()):
            if zg.depth[src] == zg.depth[cur] - 1:
                yield from walk(src, suffix_edges + [eid], suffix_states + [src])

    for edges_rev, states_rev in walk(target, [], [target]):
        yield SymbolicRun([zg.states[i] for i in reversed(states_rev)], list(reversed(edges_rev)))
        count += 1
        if count >= limit:
            return


def _in_init_box(a: Automaton, values: Mapping[str, Fraction]) -> bool:
    for v, (lo, lc, hi, hc) in a.init_box.items():
        x = values[v]
        if x < lo or (x == lo and not lc) or x > hi or (x == hi and not hc):
            return False
    return True


def validate_run(a: Automaton, run: ConcreteRun) -> Verdict:
    """Decide whether `run` belongs to the concrete semantics of `a` under
    its parameter valuation.

    Checks, in order: the first state sits in the initial box and invariant;
    every delay keeps the state inside the (convex) invariant, which the two
    segment endpoints witness; every discrete step satisfies the valuated
    guard, applies exactly the edge's updates, and leaves untouched
    variables to the flow-determined value.  The verdict carries the first
    failing step index and the reason.
    """
    for p in a.params:
        if p not in run.pval:
            raise ValueError(f"run valuation misses parameter {p!r}")
        if frac(run.pval[p]) < 0:
            raise ValueError(f"parameter {p!r} must be nonnegative")
    for st in run.states:
        if set(st.values) != set(a.variables):
            raise ValueError("state valuation does not match the automaton's variables")

    inv_at = {loc: a.invariant[loc].fix_params(run.pval) for loc in a.locations}
    visited = {st.location for st in run.states}
    for loc in visited:
        for v in a.variables:
            if not isinstance(a.flow[loc].get(v), Fraction):
                raise ValueError(f"rate of {v!r} in {loc!r} is not constant; compose the network first")

    first = run.states[0]
    if first.location != a.initial:
        raise ValueError("run does not start in the initial location")
    if not _in_init_box(a, first.values):
        return Verdict(False, 0, "init")
    if not inv_at[first.location].contains_point(first.values):
        return Verdict(False, 0, "invariant")

    for k, step in enumerate(run.steps):
        try:
            e = a.edges[step.edge_id]
        except IndexError:
            raise ValueError(f"dangling edge id {step.edge_id} at step {k}") from None
        pre, post = run.states[k], run.states[k + 1]
        if e.source != pre.location or e.target != post.location:
            raise ValueError(f"edge {step.edge_id} does not connect the states at step {k}")
        d = frac(step.duration)
        if d < 0:
            raise ValueError(f"negative duration at step {k}")
        flow = a.flow[pre.location]
        at_edge = {v: pre.values[v] + flow[v] * d for v in a.variables}
        if not inv_at[pre.location].contains_point(at_edge):
            return Verdict(False, k, "invariant")
        guard = a.edges[step.edge_id].guard.fix_params(run.pval)
        if not guard.contains_point(at_edge):
            return Verdict(False, k, "guard")
        for v in a.variables:
            if v in e.updates:
                if post.values[v] != frac(e.updates[v]):
                    return Verdict(False, k, "update")
            elif post.values[v] != at_edge[v]:
                return Verdict(False, k, "flow")
        if not inv_at[post.location].contains_point(post.values):
            return Verdict(False, k + 1, "invariant")
    return Verdict(True)

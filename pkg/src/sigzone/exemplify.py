"""Concrete run production: one positive run per symbolic run, plus up to
two negative runs (one under a different parameter valuation, one under the
same), all judged by the concrete-semantics oracle.

Positive runs are rebuilt backwards from a point exhibited in the final
zone: cancel the continuous drift, fire the edge backwards, repeat.
Negative runs splice a positive prefix with a suffix that replays the
remaining edges from a valuation known to be stuck.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .automata import Automaton
from .poly import Polyhedron, cmp_atom, frac, point_in_difference, point_poly
from .semantics import (
    T_ABS,
    Budget,
    ConcreteRun,
    ConcreteState,
    RunStep,
    SymbolicRun,
    SymbolicState,
    Verdict,
    _context,
    explore_bfs,
    initial_values,
    pick_symb_run,
    shortest_runs,
    validate_run,
)

Valuation = dict[str, Fraction]

POSITIVE = "positive"
NEG_PARAM = "negative-different-pval"
NEG_VAR = "negative-same-pval"


@dataclass
class TaggedRun:
    tag: str  # POSITIVE | NEG_PARAM | NEG_VAR
    run: ConcreteRun
    verdict: Verdict
    deadlock_index: int | None = None


@dataclass
class ExemplifyResult:
    symbolic_run: SymbolicRun
    runs: list[TaggedRun]

    @property
    def positive(self) -> TaggedRun:
        return next(t for t in self.runs if t.tag == POSITIVE)


def duration_between(earlier: Mapping[str, Fraction], later: Mapping[str, Fraction]) -> Fraction:
    """Elapsed time between two absolute-time-carrying valuations."""
    d = later[T_ABS] - earlier[T_ABS]
    if d < 0:
        raise AssertionError("time went backwards during reconstruction")
    return d


def delay_predecessor(
    source: Polyhedron,
    flow: Mapping[str, Fraction],
    invariant: Polyhedron,
    point: Valuation,
) -> Valuation:
    """A point of `source` from which `point` is reached by pure delay.

    Intersects the backward drift cone of the point with the location's
    invariant and the set the location was entered through (the initial
    values, or the update image of the incoming edge).
    """
    sp = source.space
    pre = point_poly(sp, point).time_past(flow) & invariant.rebased(sp) & source
    if not pre.is_satisfiable():
        raise AssertionError("no delay predecessor; zone construction is broken")
    return pre.pick_point()


def edge_predecessor(zone: Polyhedron, guard: Polyhedron, updates: Mapping[str, Fraction], point: Valuation) -> Valuation:
    """A point of `zone` satisfying `guard` that reaches `point` across the
    edge in zero time (updated dimensions are freed, the rest stay pinned)."""
    sp = zone.space
    pinned = point_poly(sp, {d: v for d, v in point.items() if d not in updates})
    pre = pinned & zone & guard.rebased(sp)
    if not pre.is_satisfiable():
        raise AssertionError("no discrete predecessor; zone construction is broken")
    return pre.pick_point()


def _entry_source(a: Automaton, srun: SymbolicRun, k: int) -> Polyhedron:
    """The set location k was entered through: initial values for k = 0,
    otherwise the update image of the preceding zone through its guard."""
    ctx = _context(a)
    if k == 0:
        return initial_values(a)
    prev = srun.state_at(k - 1)
    e = a.edges[srun.edge_at(k - 1)]
    taken = prev.zone & ctx.guard[srun.edge_at(k - 1)]
    return taken.update({v: frac(val) for v, val in e.updates.items()})


def _prefix_entries(a: Automaton, srun: SymbolicRun, i: int, final: Valuation) -> list[Valuation]:
    """Entry-point valuations for positions 0..i, reconstructed backwards
    from `final`, a point of stateAt(i)'s zone (parameters included)."""
    ctx = _context(a)
    loc_i = srun.state_at(i).location
    entries = [delay_predecessor(_entry_source(a, srun, i), ctx.flow[loc_i], ctx.invariant[loc_i], final)]
    for k in range(i - 1, -1, -1):
        eid = srun.edge_at(k)
        e = a.edges[eid]
        at_edge = edge_predecessor(
            srun.state_at(k).zone,
            ctx.guard[eid],
            {v: frac(val) for v, val in e.updates.items()},
            entries[0],
        )
        loc_k = srun.state_at(k).location
        entry = delay_predecessor(_entry_source(a, srun, k), ctx.flow[loc_k], ctx.invariant[loc_k], at_edge)
        entries.insert(0, entry)
    return entries


def _strip(a: Automaton, vals: Mapping[str, Fraction]) -> dict[str, Fraction]:
    return {v: vals[v] for v in a.variables}


def _pval_of(a: Automaton, vals: Mapping[str, Fraction]) -> Valuation:
    return {p: vals[p] for p in a.params}


def _materialize(a: Automaton, srun: SymbolicRun, entries: list[Valuation], pval: Valuation) -> ConcreteRun:
    states = [ConcreteState(srun.state_at(k).location, _strip(a, v)) for k, v in enumerate(entries)]
    steps = [
        RunStep(srun.edge_at(k), duration_between(entries[k], entries[k + 1]))
        for k in range(len(entries) - 1)
    ]
    return ConcreteRun(dict(pval), states, steps)


def positive_prefix(a: Automaton, srun: SymbolicRun, i: int, final: Valuation) -> ConcreteRun:
    """Concrete positive run along srun up to position i, ending at an entry
    point from which `final` is reachable by delay."""
    entries = _prefix_entries(a, srun, i, final)
    return _materialize(a, srun, entries, _pval_of(a, final))


def negative_suffix(
    a: Automaton, srun: SymbolicRun, i: int, j: int, start: Valuation
) -> tuple[list[ConcreteState], list[RunStep]]:
    """Replay edges i..j-1 from `start` with unit durations, incrementing
    every variable by the number of edges taken so far.  The fragment is not
    meant to follow the flows: its first valuation cannot take the next edge,
    so the oracle rejects the spliced run."""
    vars_ = _strip(a, start)
    states = [ConcreteState(srun.state_at(i).location, dict(vars_))]
    steps = []
    for k in range(i, j):
        steps.append(RunStep(srun.edge_at(k), Fraction(1)))
        bumped = {v: vars_[v] + (k - i + 1) for v in vars_}
        states.append(ConcreteState(srun.state_at(k + 1).location, bumped))
    return states, steps


def find_param_deadlock(srun: SymbolicRun) -> tuple[Valuation, int, SymbolicState] | None:
    """First position whose parameter shadow strictly shrinks across the next
    edge, with a parameter valuation that is lost there."""
    for i in range(len(srun)):
        pval = point_in_difference(srun.state_at(i).param_shadow, srun.state_at(i + 1).param_shadow)
        if pval is not None:
            return pval, i, srun.state_at(i)
    return None


def find_var_deadlock(a: Automaton, srun: SymbolicRun, pval: Valuation) -> tuple[Valuation, int, SymbolicState] | None:
    """First position holding a variable valuation (under `pval`) that cannot
    satisfy the next edge's guard no matter how long it delays."""
    ctx = _context(a)
    for i in range(len(srun)):
        st = srun.state_at(i)
        eid = srun.edge_at(i)
        reach_guard = (ctx.guard[eid].time_past(ctx.flow[st.location]) & ctx.invariant[st.location]).fix_params(pval)
        stuck = point_in_difference(st.zone.fix_params(pval), reach_guard)
        if stuck is not None:
            return stuck, i, st
    return None


def _pin_params(zone: Polyhedron, pval: Valuation) -> Polyhedron:
    return zone.with_atoms(cmp_atom({p: 1}, "=", v) for p, v in pval.items())


def _spliced_negative(
    a: Automaton, srun: SymbolicRun, i: int, stuck_full: Valuation
) -> ConcreteRun:
    """Positive prefix to position i, then the literal suffix.  The first
    suffix duration is the delay from the prefix's entry point to the stuck
    valuation, so the oracle fails exactly at the deadlocked edge."""
    pval = _pval_of(a, stuck_full)
    entries = _prefix_entries(a, srun, i, stuck_full)
    pref = _materialize(a, srun, entries, pval)
    suf_states, suf_steps = negative_suffix(a, srun, i, len(srun), stuck_full)
    delta = duration_between(entries[-1], stuck_full)
    states = pref.states + suf_states[1:]
    steps = pref.steps + [RunStep(srun.edge_at(i), delta)] + suf_steps[1:]
    return ConcreteRun(dict(pval), states, steps)


def exemplify_run(a: Automaton, srun: SymbolicRun) -> ExemplifyResult:
    """Up to three concrete runs for one symbolic run: a positive one, a
    negative one under a lost parameter valuation, and a negative one under
    the positive run's own valuation."""
    final_zone = srun.state_at(len(srun)).zone
    w = final_zone.pick_point()
    pval = _pval_of(a, w)
    pos = positive_prefix(a, srun, len(srun), w)
    out = [TaggedRun(POSITIVE, pos, validate_run(a, pos))]

    pd = find_param_deadlock(srun)
    if pd is not None:
        bad_pval, i, state = pd
        w_i = _pin_params(state.zone, bad_pval).pick_point()
        run = _spliced_negative(a, srun, i, w_i)
        out.append(TaggedRun(NEG_PARAM, run, validate_run(a, run), deadlock_index=i))

    vd = find_var_deadlock(a, srun, pval)
    if vd is not None:
        stuck, i, _state = vd
        full = dict(stuck)
        full.update(pval)
        run = _spliced_negative(a, srun, i, full)
        out.append(TaggedRun(NEG_VAR, run, validate_run(a, run), deadlock_index=i))

    return ExemplifyResult(srun, out)


def exemplify(
    a: Automaton,
    targets,
    budget: Budget = Budget(),
    attempts: int = 6,
) -> list[ExemplifyResult]:
    """Explore until up to `attempts` target states are stored, then turn
    each shortest symbolic run into concrete runs.  When fewer target states
    exist, alternative shortest paths (in tie-break order) fill the gap.
    Edge words are pairwise distinct by construction.  Empty when no target
    is reached within the budget."""
    if attempts < 1:
        raise ValueError("attempts must be at least 1")
    zg, hits = explore_bfs(a, targets, budget, max_hits=attempts)
    sruns = [pick_symb_run(zg, h) for h in hits]
    if len(sruns) < attempts:
        for h in hits:
            for alt_idx, alt in enumerate(shortest_runs(zg, h, attempts + 1)):
                if alt_idx == 0:
                    continue  # the primary run again
                sruns.append(alt)
                if len(sruns) >= attempts:
                    break
            if len(sruns) >= attempts:
                break
    return [exemplify_run(a, r) for r in sruns[:attempts]]

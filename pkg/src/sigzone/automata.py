"""Model syntax: clock/signal automata, well-formedness checks, and the
synchronized product that turns a specification plus its signal bounders
into a single constant-rate automaton.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .poly import Polyhedron, Space, frac


class ComposeError(ValueError):
    pass


class _FreeRate:
    """Rate left unconstrained by a component (resolved during composition)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "FREE"


FREE = _FreeRate()

Rate = Fraction | _FreeRate
Loc = str | tuple[str, ...]

# (lower, lower_closed, upper, upper_closed) for an initial interval
InitInterval = tuple[Fraction, bool, Fraction, bool]


@dataclass(frozen=True)
class Edge:
    source: Loc
    target: Loc
    guard: Polyhedron
    action: str
    updates: Mapping[str, Fraction] = field(default_factory=dict)


@dataclass
class Automaton:
    name: str
    kind: str  # "ptas" | "sba" | "plma"
    locations: tuple[Loc, ...]
    initial: Loc
    accepting: frozenset[Loc]
    clocks: tuple[str, ...]
    signals: tuple[str, ...]
    params: tuple[str, ...]
    init_box: dict[str, InitInterval]
    invariant: dict[Loc, Polyhedron]
    flow: dict[Loc, dict[str, Rate]]
    edges: list[Edge]

    @property
    def variables(self) -> tuple[str, ...]:
        return self.clocks + self.signals

    @property
    def space(self) -> Space:
        return Space.make(params=self.params, variables=self.variables)

    @property
    def alphabet(self) -> frozenset[str]:
        return frozenset(e.action for e in self.edges)

    def out_edges(self, loc: Loc) -> list[int]:
        return [i for i, e in enumerate(self.edges) if e.source == loc]


@dataclass
class Network:
    """A specification automaton, one bounder per specification signal,
    and the locations whose reachability the specification asks for."""

    spec: Automaton
    bounders: list[Automaton]
    targets: tuple[str, ...] = ()


def _mixed_atom_violations(a: Automaton, poly: Polyhedron, where: str) -> list[str]:
    out = []
    clocks, signals = set(a.clocks), set(a.signals)
    for atom in poly.atoms:
        dims = set(atom.lhs.dims())
        if dims & clocks and dims & signals:
            out.append(f"{where}: atom '{atom}' mixes a clock and a signal")
    return out


def validate_ptas(a: Automaton) -> list[str]:
    """Check the specification-automaton rules; violations are data, not errors.

    Clocks must tick at rate 1 everywhere, signal rates stay unconstrained,
    no edge may update a signal, and no single atom may relate a clock to a
    signal.
    """
    out = []
    for loc in a.locations:
        for c in a.clocks:
            if a.flow[loc].get(c) != Fraction(1):
                out.append(f"clock {c!r} has rate {a.flow[loc].get(c)!r} in location {loc!r}")
        for s in a.signals:
            if a.flow[loc].get(s) is not FREE:
                out.append(f"signal {s!r} has a fixed rate in location {loc!r}")
        out.extend(_mixed_atom_violations(a, a.invariant[loc], f"invariant of {loc!r}"))
    for i, e in enumerate(a.edges):
        for v in e.updates:
            if v in a.signals:
                out.append(f"edge #{i} ({e.source!r} -> {e.target!r}) updates signal {v!r}")
        out.extend(_mixed_atom_violations(a, e.guard, f"guard of edge #{i}"))
    return out


def validate_sba(a: Automaton) -> list[str]:
    """Check the signal-bounder rules: parameter-free, a single signal with a
    constant rate in every location, and no signal updates (extra rate-1
    clocks are permitted)."""
    out = []
    if a.params:
        out.append(f"bounder uses parameters {list(a.params)}")
    if len(a.signals) != 1:
        out.append(f"bounder must own exactly one signal, has {list(a.signals)}")
    for loc in a.locations:
        for s in a.signals:
            r = a.flow[loc].get(s)
            if not isinstance(r, Fraction):
                out.append(f"signal {s!r} has no constant rate in location {loc!r}")
        for c in a.clocks:
            if a.flow[loc].get(c) != Fraction(1):
                out.append(f"clock {c!r} has rate {a.flow[loc].get(c)!r} in location {loc!r}")
    for i, e in enumerate(a.edges):
        for v in e.updates:
            if v in a.signals:
                out.append(f"edge #{i} ({e.source!r} -> {e.target!r}) updates signal {v!r}")
    return out


def constant_flow_violations(a: Automaton) -> list[str]:
    """Empty iff every variable has a constant rational rate in every location."""
    out = []
    for loc in a.locations:
        for v in a.variables:
            if not isinstance(a.flow[loc].get(v), Fraction):
                out.append(f"variable {v!r} has non-constant rate in location {loc!r}")
    return out


def is_strongly_deterministic(a: Automaton) -> bool:
    seen = set()
    for e in a.edges:
        key = (e.source, e.action)
        if key in seen:
            return False
        seen.add(key)
    return True


def _merged_dims(components: list[Automaton]) -> tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]:
    params: list[str] = []
    clocks: list[str] = []
    signals: list[str] = []
    for c in components:
        for p in c.params:
            if p not in params:
                params.append(p)
        for x in c.clocks:
            if x not in clocks:
                clocks.append(x)
        for s in c.signals:
            if s not in signals:
                signals.append(s)
    return tuple(params), tuple(clocks), tuple(signals)


def compose(net: Network) -> Automaton:
    """Synchronized product of the specification with its bounders.

    An action synchronizes across exactly the components whose alphabet
    contains it; actions known to a single component interleave.  Composed
    invariants are conjunctions, composed flows the unique constant among
    the component flows (an unconstrained rate defers to any constant), and
    a composed location is accepting iff its specification coordinate is.
    """
    for s in net.spec.signals:
        if all(isinstance(net.spec.flow[loc].get(s), Fraction) for loc in net.spec.locations):
            continue  # the spec itself fixes the rate everywhere
        owners = [b for b in net.bounders if s in b.signals]
        if len(owners) != 1:
            raise ComposeError(f"signal {s!r} must be bounded by exactly one automaton, found {len(owners)}")
    for s, group in itertools.groupby(sorted(s for b in net.bounders for s in b.signals)):
        if len(list(group)) > 1:
            raise ComposeError(f"signal {s!r} is bounded by several automata")

    if not net.bounders:
        bad = constant_flow_violations(net.spec)
        if bad:
            raise ComposeError("specification alone is not constant-rate: " + "; ".join(bad))
        return net.spec

    components = [net.spec] + list(net.bounders)
    params, clocks, signals = _merged_dims(components)
    space = Space.make(params=params, variables=clocks + signals)

    counts: dict[str, int] = {}
    for c in components:
        for act in c.alphabet:
            counts[act] = counts.get(act, 0) + 1

    init_box: dict[str, InitInterval] = {}
    for c in components:
        for v, box in c.init_box.items():
            if v in init_box and init_box[v] != box:
                raise ComposeError(f"conflicting initial intervals for {v!r}")
            init_box.setdefault(v, box)

    locations = list(itertools.product(*(c.locations for c in components)))
    invariant: dict[Loc, Polyhedron] = {}
    flow: dict[Loc, dict[str, Rate]] = {}
    for loc in locations:
        inv = Polyhedron.universe(space)
        for c, li in zip(components, loc):
            inv = inv & c.invariant[li].rebased(space)
        invariant[loc] = inv
        rates: dict[str, Rate] = {}
        for v in clocks + signals:
            constants = set()
            declared = False
            for c, li in zip(components, loc):
                if v in c.variables:
                    declared = True
                    r = c.flow[li].get(v)
                    if isinstance(r, Fraction):
                        constants.add(r)
            assert declared
            if len(constants) > 1:
                raise ComposeError(f"conflicting rates {sorted(constants)} for {v!r} in location {loc!r}")
            if not constants:
                raise ComposeError(f"variable {v!r} keeps an unconstrained rate in location {loc!r}")
            rates[v] = constants.pop()
        flow[loc] = rates

    by_source: dict[tuple[int, Loc, str], list[Edge]] = {}
    for i, c in enumerate(components):
        for e in c.edges:
            by_source.setdefault((i, e.source, e.action), []).append(e)

    edges: list[Edge] = []
    for loc in locations:
        for i, c in enumerate(components):
            for e in c.edges:
                if e.source != loc[i] or counts[e.action] > 1:
                    continue
                target = tuple(e.target if j == i else lj for j, lj in enumerate(loc))
                edges.append(Edge(loc, target, e.guard.rebased(space), e.action, dict(e.updates)))
        shared_here = sorted({e.action for c, li in zip(components, loc) for e in c.edges
                              if e.source == li and counts[e.action] > 1})
        for act in shared_here:
            participants = [i for i, c in enumerate(components) if act in c.alphabet]
            choices = [by_source.get((i, loc[i], act), []) for i in participants]
            if any(not ch for ch in choices):
                continue
            for combo in itertools.product(*choices):
                target = list(loc)
                guard = Polyhedron.universe(space)
                updates: dict[str, Fraction] = {}
                for i, e in zip(participants, combo):
                    target[i] = e.target
                    guard = guard & e.guard.rebased(space)
                    for v, val in e.updates.items():
                        if v in updates and updates[v] != val:
                            raise ComposeError(f"edges on {act!r} update {v!r} to different values")
                        updates[v] = val
                edges.append(Edge(loc, tuple(target), guard, act, updates))

    return Automaton(
        name="||".join(c.name for c in components),
        kind="plma",
        locations=tuple(locations),
        initial=tuple(c.initial for c in components),
        accepting=frozenset(loc for loc in locations if loc[0] in net.spec.accepting),
        clocks=clocks,
        signals=signals,
        params=params,
        init_box=init_box,
        invariant=invariant,
        flow=flow,
        edges=edges,
    )


def make_automaton(
    name: str,
    kind: str,
    locations: Iterable[Loc],
    initial: Loc,
    edges: list[Edge],
    *,
    accepting: Iterable[Loc] = (),
    clocks: Iterable[str] = (),
    signals: Iterable[str] = (),
    params: Iterable[str] = (),
    init_box: Mapping[str, tuple] | None = None,
    invariant: Mapping[Loc, Polyhedron] | None = None,
    flow: Mapping[Loc, Mapping[str, Rate]] | None = None,
) -> Automaton:
    """Assemble an automaton, filling conventional defaults.

    Clocks default to rate 1 and initial value 0; specification signals
    default to an unconstrained rate, other signals to rate 0.  Omitted
    invariants are the universe.
    """
    locations = tuple(locations)
    clocks, signals, params = tuple(clocks), tuple(signals), tuple(params)
    space = Space.make(params=params, variables=clocks + signals)
    inv = {loc: Polyhedron.universe(space) for loc in locations}
    for loc, p in (invariant or {}).items():
        inv[loc] = p.rebased(space)
    rates: dict[Loc, dict[str, Rate]] = {}
    for loc in locations:
        given = dict((flow or {}).get(loc, {}))
        r: dict[str, Rate] = {}
        for c in clocks:
            r[c] = frac(given.pop(c)) if c in given else Fraction(1)
        for s in signals:
            if s in given:
                v = given.pop(s)
                r[s] = v if v is FREE else frac(v)
            else:
                r[s] = FREE if kind == "ptas" else Fraction(0)
        if given:
            raise ComposeError(f"flow for unknown variables {sorted(given)} in {loc!r}")
        rates[loc] = r
    box: dict[str, InitInterval] = {}
    for v, iv in (init_box or {}).items():
        lo, lc, hi, hc = iv
        box[v] = (frac(lo), bool(lc), frac(hi), bool(hc))
    for c in clocks:
        box.setdefault(c, (Fraction(0), True, Fraction(0), True))
    for s in signals:
        if s not in box:
            raise ComposeError(f"signal {s!r} lacks an initial interval")
    missing = [e for e in edges if e.source not in locations or e.target not in locations]
    if missing:
        raise ComposeError(f"edge endpoints not registered: {missing[0]}")
    return Automaton(
        name=name,
        kind=kind,
        locations=locations,
        initial=initial,
        accepting=frozenset(accepting),
        clocks=clocks,
        signals=signals,
        params=params,
        init_box=box,
        invariant=inv,
        flow=rates,
        edges=list(edges),
    )

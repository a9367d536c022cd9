"""Model files, trace documents, and plots.

The model grammar (one or more files, concatenated by the CLI):

    param <id>;
    clock <id> [= <rat>];
    signal <id> in [<rat>, <rat>];          # ( or ) for open ends
    automaton (ptas|sba|plma) <id> {
      loc <id> [accepting] [invariant <lin>] [flow { <id>: <rat|free>, ... }];
      edge <id> -> <id> [when <lin>] [sync <act>] [do { <id> := <rat>, ... }];
      init <id>;
    }
    target <loc>, ...;

where <lin> is a &&-joined list of comparisons between linear expressions
with rational coefficients, and <rat> accepts integers, exact decimals, and
num/den.  `#` starts a comment.  Specification automata use kind `ptas`,
signal bounders `sba`; `plma` admits any constant-rate automaton (raw
benchmarks, or bounders that update their signal, such as Boolean-predicate
encodings).  Parsing fails, with positions, on syntax errors, undeclared
identifiers, and kind-rule violations.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .automata import (
    FREE,
    Automaton,
    Edge,
    Network,
    constant_flow_violations,
    make_automaton,
    validate_ptas,
    validate_sba,
)
from .poly import Atom, LinTerm, Polyhedron, Rel, Space, cmp_atom, frac, term
from .semantics import ConcreteRun, ConcreteState, RunStep


class ModelError(ValueError):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        where = f"line {line}, col {col}: " if line is not None else ""
        super().__init__(where + msg)


def parse_rational(text: str) -> Fraction:
    """Exact rational from '3', '-2', '3.8' or '19/5'."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ModelError(f"bad rational {text!r}: {exc}") from None


# ---------------------------------------------------------------------------
# tokenizer

_TOKEN = re.compile(
    r"""(?P<ws>\s+|\#[^\n]*)
      | (?P<num>\d+(?:\.\d+)?)
      | (?P<id>[A-Za-z_]\w*)
      | (?P<sym>:=|->|<=|>=|&&|[{}()\[\],;:=<>+\-*/])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # num | id | sym | eof
    text: str
    line: int
    col: int


def _tokenize(src: str) -> list[_Tok]:
    out = []
    line, col, pos = 1, 1, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m:
            raise ModelError(f"unexpected character {src[pos]!r}", line, col)
        text = m.group(0)
        if m.lastgroup != "ws":
            out.append(_Tok(m.lastgroup, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    out.append(_Tok("eof", "", line, col))
    return out


# ---------------------------------------------------------------------------
# parser

_KINDS = ("ptas", "sba", "plma")


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0
        self.params: list[str] = []
        self.clocks: dict[str, Fraction] = {}  # initial value
        self.signals: dict[str, tuple[Fraction, bool, Fraction, bool]] = {}
        self.automata: list[Automaton] = []
        self.targets: list[str] = []

    # token plumbing -------------------------------------------------------

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        raise ModelError(msg, tok.line, tok.col)

    def expect(self, text: str) -> _Tok:
        t = self.next()
        if t.text != text:
            self.fail(f"expected {text!r}, found {t.text!r}", t)
        return t

    def ident(self, what: str = "identifier") -> str:
        t = self.next()
        if t.kind != "id":
            self.fail(f"expected {what}, found {t.text!r}", t)
        return t.text

    def at(self, text: str) -> bool:
        return self.peek().text == text

    def eat(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False

    # rationals and linear expressions --------------------------------------

    def rational(self) -> Fraction:
        sign = -1 if self.eat("-") else 1
        t = self.next()
        if t.kind != "num":
            self.fail("expected a number", t)
        val = parse_rational(t.text)
        if self.at("/"):
            self.next()
            den = self.next()
            if den.kind != "num" or "." in den.text:
                self.fail("expected an integer denominator", den)
            if int(den.text) == 0:
                self.fail("division by zero", den)
            val = val / parse_rational(den.text)
        return sign * val

    def _declared(self) -> set[str]:
        return set(self.params) | set(self.clocks) | set(self.signals)

    def _factor(self) -> LinTerm:
        t = self.next()
        if t.kind == "num":
            return term({}, parse_rational(t.text))
        if t.kind == "id":
            if t.text not in self._declared():
                self.fail(f"undeclared identifier {t.text!r}", t)
            return term({t.text: 1})
        if t.text == "(":
            e = self._expr()
            self.expect(")")
            return e
        if t.text == "-":
            return self._factor().negated()
        self.fail("expected a number, identifier or '('", t)

    def _product(self) -> LinTerm:
        acc = self._factor()
        while self.peek().text in ("*", "/"):
            op = self.next()
            if op.text == "/":
                den = self.next()
                if den.kind != "num":
                    self.fail("can only divide by a constant", den)
                d = parse_rational(den.text)
                if d == 0:
                    self.fail("division by zero", den)
                acc = acc.scaled(1 / d)
                continue
            rhs = self._factor()
            if acc.coeffs and rhs.coeffs:
                self.fail("nonlinear product of two variables", op)
            if rhs.coeffs:
                acc, rhs = rhs, acc
            acc = acc.scaled(rhs.const)
        return acc

    def _expr(self) -> LinTerm:
        acc = self._product().negated() if self.eat("-") else self._product()
        while self.peek().text in ("+", "-"):
            op = self.next().text
            rhs = self._product()
            acc = acc.plus(rhs if op == "+" else rhs.negated())
        return acc

    def constraint_atoms(self) -> list[Atom]:
        atoms = []
        while True:
            lhs = self._expr()
            op = self.next()
            if op.text not in ("<", "<=", "=", ">=", ">"):
                self.fail("expected a comparison", op)
            rhs = self._expr()
            atoms.append(cmp_atom(lhs, op.text, rhs))
            if not self.eat("&&"):
                return atoms

    # statements -------------------------------------------------------------

    def parse(self) -> Network:
        while self.peek().kind != "eof":
            t = self.peek()
            if t.text == "param":
                self.next()
                name = self._declare("param")
                if name not in self.params:
                    self.params.append(name)
                self.expect(";")
            elif t.text == "clock":
                self.next()
                tok = self.peek()
                name = self._declare("clock")
                init = self.rational() if self.eat("=") else Fraction(0)
                if name in self.clocks and self.clocks[name] != init:
                    self.fail(f"clock {name!r} redeclared with a different initial value", tok)
                self.clocks[name] = init
                self.expect(";")
            elif t.text == "signal":
                self.next()
                tok = self.peek()
                name = self._declare("signal")
                self.expect("in")
                lo_tok = self.next()
                if lo_tok.text not in ("[", "("):
                    self.fail("expected '[' or '('", lo_tok)
                lo = self.rational()
                self.expect(",")
                hi = self.rational()
                hi_tok = self.next()
                if hi_tok.text not in ("]", ")"):
                    self.fail("expected ']' or ')'", hi_tok)
                if lo > hi:
                    self.fail(f"empty initial interval for {name!r}", lo_tok)
                box = (lo, lo_tok.text == "[", hi, hi_tok.text == "]")
                if name in self.signals and self.signals[name] != box:
                    self.fail(f"signal {name!r} redeclared with a different interval", tok)
                self.signals[name] = box
                self.expect(";")
            elif t.text == "automaton":
                self._automaton()
            elif t.text == "target":
                self.next()
                self.targets.append(self.ident("location name"))
                while self.eat(","):
                    self.targets.append(self.ident("location name"))
                self.expect(";")
            else:
                self.fail(f"expected a declaration, automaton or target, found {t.text!r}", t)
        return self._finish()

    def _declare(self, kind: str) -> str:
        """Names may be re-declared across merged files, but only with the
        same kind (and, checked by the caller, the same initial data)."""
        tok = self.peek()
        name = self.ident()
        have = "param" if name in self.params else "clock" if name in self.clocks else "signal" if name in self.signals else None
        if have is not None and have != kind:
            self.fail(f"{name!r} is already declared as a {have}", tok)
        return name

    def _automaton(self):
        self.expect("automaton")
        kind_tok = self.next()
        if kind_tok.text not in _KINDS:
            self.fail(f"automaton kind must be one of {_KINDS}", kind_tok)
        kind = kind_tok.text
        name = self.ident("automaton name")
        self.expect("{")

        full_space = Space.make(params=self.params, variables=tuple(self.clocks) + tuple(self.signals))
        locations: list[str] = []
        accepting: list[str] = []
        invariant: dict[str, Polyhedron] = {}
        flows: dict[str, dict] = {}
        edges: list[tuple] = []
        initial: str | None = None
        used: set[str] = set()

        while not self.at("}"):
            t = self.peek()
            if t.text == "loc":
                self.next()
                ln = self.ident("location name")
                if ln in locations:
                    self.fail(f"duplicate location {ln!r}", t)
                locations.append(ln)
                if self.eat("accepting"):
                    accepting.append(ln)
                if self.eat("invariant"):
                    atoms = self.constraint_atoms()
                    invariant[ln] = Polyhedron(full_space, atoms)
                    used.update(d for a in atoms for d in a.lhs.dims())
                if self.eat("flow"):
                    self.expect("{")
                    fl = {}
                    while True:
                        var_tok = self.peek()
                        var = self.ident("variable name")
                        if var not in self.clocks and var not in self.signals:
                            self.fail(f"undeclared variable {var!r}", var_tok)
                        self.expect(":")
                        fl[var] = FREE if self.eat("free") else self.rational()
                        used.add(var)
                        if not self.eat(","):
                            break
                    self.expect("}")
                    flows[ln] = fl
                self.expect(";")
            elif t.text == "edge":
                self.next()
                src = self.ident("location name")
                self.expect("->")
                dst = self.ident("location name")
                guard_atoms: list[Atom] = []
                action = None
                updates: dict[str, Fraction] = {}
                if self.eat("when"):
                    guard_atoms = self.constraint_atoms()
                    used.update(d for a in guard_atoms for d in a.lhs.dims())
                if self.eat("sync"):
                    action = self.ident("action name")
                if self.eat("do"):
                    self.expect("{")
                    while True:
                        var_tok = self.peek()
                        var = self.ident("variable name")
                        if var not in self.clocks and var not in self.signals:
                            self.fail(f"undeclared variable {var!r}", var_tok)
                        self.expect(":=")
                        updates[var] = self.rational()
                        used.add(var)
                        if not self.eat(","):
                            break
                    self.expect("}")
                if action is None:
                    action = f"__{name}_e{len(edges)}"
                edges.append((t, src, dst, guard_atoms, action, updates))
                self.expect(";")
            elif t.text == "init":
                self.next()
                tok = self.peek()
                if initial is not None:
                    self.fail("duplicate init declaration", tok)
                initial = self.ident("location name")
                self.expect(";")
            else:
                self.fail(f"expected loc, edge or init, found {t.text!r}", t)
        self.expect("}")

        if not locations:
            self.fail(f"automaton {name!r} has no locations")
        if initial is None:
            self.fail(f"automaton {name!r} has no init declaration")
        if initial not in locations:
            self.fail(f"initial location {initial!r} is not declared in {name!r}")
        for tok, src, dst, *_ in edges:
            if src not in locations or dst not in locations:
                self.fail(f"edge endpoints {src!r} -> {dst!r} not declared", tok)

        used_params = tuple(p for p in self.params if p in used)
        clocks = tuple(c for c in self.clocks if c in used)
        signals = tuple(s for s in self.signals if s in used)
        space = Space.make(params=used_params, variables=clocks + signals)
        init_box = {c: (self.clocks[c], True, self.clocks[c], True) for c in clocks}
        init_box.update({s: self.signals[s] for s in signals})

        a = make_automaton(
            name, kind, locations, initial,
            [Edge(src, dst, Polyhedron(space, g), act, upd) for _, src, dst, g, act, upd in edges],
            accepting=accepting,
            clocks=clocks, signals=signals, params=used_params,
            init_box=init_box,
            invariant={ln: Polyhedron(space, p.atoms) for ln, p in invariant.items()},
            flow=flows,
        )
        self.automata.append(a)

    def _finish(self) -> Network:
        if not self.automata:
            raise ModelError("no automaton block found")
        spec = next((a for a in self.automata if a.kind == "ptas"), self.automata[0])
        extra_spec = [a for a in self.automata if a.kind == "ptas" and a is not spec]
        if extra_spec:
            raise ModelError(f"only one specification (ptas) block is allowed, found {1 + len(extra_spec)}")
        bounders = [a for a in self.automata if a is not spec]

        violations = []
        for a in self.automata:
            if a.kind == "ptas":
                violations += [f"{a.name}: {v}" for v in validate_ptas(a)]
            elif a.kind == "sba":
                violations += [f"{a.name}: {v}" for v in validate_sba(a)]
            else:
                violations += [f"{a.name}: {v}" for v in constant_flow_violations(a)]
        if violations:
            raise ModelError("model violates automaton-kind rules:\n  " + "\n  ".join(violations))

        for t in self.targets:
            if t not in spec.locations:
                raise ModelError(f"target {t!r} is not a location of the specification automaton")
        return Network(spec, bounders, tuple(self.targets))


def parse_model(text: str) -> Network:
    """Parse one merged model text into a specification-plus-bounders network."""
    return _Parser(text).parse()


def parse_constraint(text: str, space: Space) -> Polyhedron:
    """Parse a `<lin>` constraint over an existing space (handy in tests)."""
    p = _Parser("")
    p.params = list(space.parameters)
    for v in space.variables:
        p.clocks[v] = Fraction(0)
    p.toks = _tokenize(text)
    p.i = 0
    atoms = p.constraint_atoms()
    if p.peek().kind != "eof":
        p.fail("trailing input after constraint")
    return Polyhedron(space, atoms)


# ---------------------------------------------------------------------------
# model emission (canonical form; parse(emit(parse(t))) == parse(t))

def _fmt_q(q: Fraction) -> str:
    return str(q)


def _render_atom(a: Atom) -> str:
    c = a.canonical()
    parts = []
    for d, k in c.lhs.coeffs:
        mag = abs(k)
        piece = d if mag == 1 else f"{_fmt_q(mag)}*{d}"
        if not parts:
            parts.append(piece if k > 0 else f"-{piece}")
        else:
            parts.append(f"+ {piece}" if k > 0 else f"- {piece}")
    lhs = " ".join(parts)
    rhs = _fmt_q(-c.lhs.const)
    op = {Rel.LT: "<", Rel.LE: "<=", Rel.EQ: "="}[c.rel]
    return f"{lhs} {op} {rhs}"


def _render_lin(p: Polyhedron) -> str:
    return " && ".join(_render_atom(a) for a in p.atoms)


def emit_model(net: Network) -> str:
    """Serialize a network back to model-file syntax (stable, canonical)."""
    autos = [net.spec] + list(net.bounders)
    lines: list[str] = []
    seen: set[str] = set()
    for a in autos:
        for pname in a.params:
            if pname not in seen:
                seen.add(pname)
                lines.append(f"param {pname};")
    for a in autos:
        for c in a.clocks:
            if c not in seen:
                seen.add(c)
                lo = a.init_box[c][0]
                lines.append(f"clock {c};" if lo == 0 else f"clock {c} = {_fmt_q(lo)};")
    for a in autos:
        for s in a.signals:
            if s not in seen:
                seen.add(s)
                lo, lc, hi, hc = a.init_box[s]
                lines.append(f"signal {s} in {'[' if lc else '('}{_fmt_q(lo)},{_fmt_q(hi)}{']' if hc else ')'};")
    for a in autos:
        lines.append("")
        lines.append(f"automaton {a.kind} {a.name} {{")
        for loc in a.locations:
            bits = [f"  loc {loc}"]
            if loc in a.accepting:
                bits.append(" accepting")
            if a.invariant[loc].atoms:
                bits.append(f" invariant {_render_lin(a.invariant[loc])}")
            rates = []
            for c in a.clocks:
                if a.flow[loc][c] != 1:
                    rates.append(f"{c}: {_fmt_q(a.flow[loc][c])}")
            for s in a.signals:
                r = a.flow[loc][s]
                if a.kind != "ptas":
                    rates.append(f"{s}: {_fmt_q(r)}")
            if rates:
                bits.append(" flow { " + ", ".join(rates) + " }")
            lines.append("".join(bits) + ";")
        for e in a.edges:
            bits = [f"  edge {e.source} -> {e.target}"]
            if e.guard.atoms:
                bits.append(f" when {_render_lin(e.guard)}")
            bits.append(f" sync {e.action}")
            if e.updates:
                bits.append(" do { " + ", ".join(f"{v} := {_fmt_q(x)}" for v, x in e.updates.items()) + " }")
            lines.append("".join(bits) + ";")
        lines.append(f"  init {a.initial};")
        lines.append("}")
    if net.targets:
        lines.append("")
        lines.append("target " + ", ".join(net.targets) + ";")
    return "\n".join(lines) + "\n"


def network_eq(n1: Network, n2: Network) -> bool:
    """Structural equality with semantic comparison of guards/invariants."""

    def auto_eq(a: Automaton, b: Automaton) -> bool:
        if (a.kind, a.locations, a.initial, a.accepting) != (b.kind, b.locations, b.initial, b.accepting):
            return False
        if (a.clocks, a.signals, a.params, a.init_box) != (b.clocks, b.signals, b.params, b.init_box):
            return False
        if a.flow != b.flow or len(a.edges) != len(b.edges):
            return False
        if any(a.invariant[loc] != b.invariant[loc] for loc in a.locations):
            return False
        for e1, e2 in zip(a.edges, b.edges):
            if (e1.source, e1.target, e1.action, dict(e1.updates)) != (e2.source, e2.target, e2.action, dict(e2.updates)):
                return False
            if e1.guard != e2.guard:
                return False
        return True

    if len(n1.bounders) != len(n2.bounders) or n1.targets != n2.targets:
        return False
    return auto_eq(n1.spec, n2.spec) and all(auto_eq(x, y) for x, y in zip(n1.bounders, n2.bounders))


# ---------------------------------------------------------------------------
# trace documents

def _loc_list(loc) -> list[str]:
    return list(loc) if isinstance(loc, tuple) else [loc]


def emit_trace(
    run: ConcreteRun,
    verdict: str | None = None,
    model_hash: str = "",
    deadlock: Mapping[str, object] | None = None,
    a: Automaton | None = None,
) -> str:
    """Lossless JSON rendering of a run; rationals appear as num/den strings.

    With the automaton at hand, steps carry their action labels too."""
    steps = []
    for k, st in enumerate(run.states):
        entry: dict[str, object] = {
            "location": _loc_list(st.location),
            "values": {v: _fmt_q(st.values[v]) for v in sorted(st.values)},
        }
        if k < len(run.steps):
            entry["action"] = a.edges[run.steps[k].edge_id].action if a is not None else None
            entry["duration"] = _fmt_q(run.steps[k].duration)
            entry["edge"] = run.steps[k].edge_id
        steps.append(entry)
    doc: dict[str, object] = {
        "model": model_hash,
        "pval": {p: _fmt_q(run.pval[p]) for p in sorted(run.pval)},
        "verdict": verdict,
    }
    if deadlock is not None:
        doc["deadlock"] = dict(deadlock)
    doc["steps"] = steps
    return json.dumps(doc, indent=2) + "\n"


def read_trace(text: str) -> tuple[ConcreteRun, dict]:
    """Inverse of emit_trace; returns the run and the remaining metadata."""
    doc = json.loads(text)
    states = []
    steps = []
    for entry in doc["steps"]:
        loc = entry["location"]
        loc = loc[0] if len(loc) == 1 else tuple(loc)
        states.append(ConcreteState(loc, {v: Fraction(x) for v, x in entry["values"].items()}))
        if "duration" in entry:
            steps.append(RunStep(entry["edge"], Fraction(entry["duration"])))
    pval = {p: Fraction(x) for p, x in doc["pval"].items()}
    meta = {k: v for k, v in doc.items() if k != "steps"}
    return ConcreteRun(pval, states, steps), meta


# ---------------------------------------------------------------------------
# plots

def breakpoints(a: Automaton, run: ConcreteRun) -> dict[str, list[tuple[Fraction, Fraction]]]:
    """Per-variable polyline breakpoints of the piecewise-linear trajectory.

    For each step, the end-of-delay point under the location's flow and the
    entry point of the next state; consecutive duplicates are merged."""
    out: dict[str, list[tuple[Fraction, Fraction]]] = {v: [] for v in a.variables}

    def push(v, t, x):
        pts = out[v]
        if not pts or pts[-1] != (t, x):
            pts.append((t, x))

    tau = Fraction(0)
    for v in a.variables:
        push(v, tau, run.states[0].values[v])
    for k, step in enumerate(run.steps):
        st = run.states[k]
        flow = a.flow[st.location]
        t_edge = tau + step.duration
        for v in a.variables:
            push(v, t_edge, st.values[v] + flow[v] * step.duration)
            push(v, t_edge, run.states[k + 1].values[v])
        tau = t_edge
    return out


def _csv_rows(a: Automaton, run: ConcreteRun) -> list[tuple[Fraction, dict[str, Fraction]]]:
    rows: list[tuple[Fraction, dict[str, Fraction]]] = []

    def push(t, vals):
        if not rows or rows[-1] != (t, vals):
            rows.append((t, vals))

    tau = Fraction(0)
    push(tau, dict(run.states[0].values))
    for k, step in enumerate(run.steps):
        st = run.states[k]
        flow = a.flow[st.location]
        t_edge = tau + step.duration
        push(t_edge, {v: st.values[v] + flow[v] * step.duration for v in a.variables})
        push(t_edge, dict(run.states[k + 1].values))
        tau = t_edge
    return rows


def _fmt_float(x: Fraction) -> str:
    return f"{float(x):.6g}"


_PALETTE = ("#1b6ca8", "#c0392b", "#27813c", "#8e44ad", "#b9770e", "#148f77", "#7b241c", "#2e4053")


def emit_plot(a: Automaton, run: ConcreteRun, fmt: str = "svg") -> str:
    """Render the run's variable trajectories.

    csv: header `t,<var>...`, one row per breakpoint, rows duplicated at
    update discontinuities, values as exact rationals.  svg: one polyline
    per variable plus dashed action markers at discrete steps.
    """
    if fmt == "csv":
        rows = _csv_rows(a, run)
        head = ",".join(["t"] + list(a.variables))
        body = [",".join([_fmt_q(t)] + [_fmt_q(vals[v]) for v in a.variables]) for t, vals in rows]
        return "\n".join([head] + body) + "\n"
    if fmt != "svg":
        raise ValueError(f"unknown plot format {fmt!r}")

    pts = breakpoints(a, run)
    all_t = [t for series in pts.values() for t, _ in series]
    all_x = [x for series in pts.values() for _, x in series]
    t_hi = max(all_t) if max(all_t) > 0 else Fraction(1)
    x_lo, x_hi = min(all_x + [Fraction(0)]), max(all_x + [Fraction(0)])
    if x_lo == x_hi:
        x_hi = x_lo + 1
    width, height, m = 640, 360, 46

    def sx(t: Fraction) -> str:
        return _fmt_float(m + (t / t_hi) * (width - 2 * m))

    def sy(x: Fraction) -> str:
        return _fmt_float(height - m - ((x - x_lo) / (x_hi - x_lo)) * (height - 2 * m))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{sx(Fraction(0))}" y1="{sy(x_lo)}" x2="{sx(Fraction(0))}" y2="{sy(x_hi)}" stroke="black"/>',
        f'<line x1="{sx(Fraction(0))}" y1="{sy(Fraction(0))}" x2="{sx(t_hi)}" y2="{sy(Fraction(0))}" stroke="black"/>',
        f'<text x="{_fmt_float(Fraction(width - m + 6))}" y="{sy(Fraction(0))}" font-size="11">t</text>',
    ]
    tau = Fraction(0)
    for k, step in enumerate(run.steps):
        tau += step.duration
        act = a.edges[step.edge_id].action
        parts.append(
            f'<line x1="{sx(tau)}" y1="{sy(x_lo)}" x2="{sx(tau)}" y2="{sy(x_hi)}" '
            f'stroke="gray" stroke-dasharray="4 3"/>'
        )
        parts.append(f'<text x="{sx(tau)}" y="{_fmt_float(Fraction(m - 8))}" font-size="10" fill="gray">{act}</text>')
    for idx, v in enumerate(a.variables):
        color = _PALETTE[idx % len(_PALETTE)]
        coords = " ".join(f"{sx(t)},{sy(x)}" for t, x in pts[v])
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        last_t, last_x = pts[v][-1]
        parts.append(f'<text x="{sx(last_t)}" y="{sy(last_x)}" font-size="11" fill="{color}">{v}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

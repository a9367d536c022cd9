"""Exact kernel for parametric linear constraints.

A constraint set is a conjunction of linear atoms (strict or non-strict
inequalities, or equalities) with rational coefficients over named
dimensions.  Sets may be topologically open, and every operation is exact:
no floating point anywhere.  Dimensions are split into plain variables and
parameters; only variables drift under time elapse / time past.

Variable elimination is Fourier-Motzkin with the usual strictness rule:
a bound obtained by combining at least one strict bound is strict.
Equalities are eliminated by substitution, which is both exact and cheap.

Internally constraints are integer rows: each atom is rescaled to coprime
integer coefficients held in a dense vector aligned with the dimension
registry.  Every elimination step compacts parallel rows into a single
bound pair per direction, which keeps intermediate systems small; the
rational `Atom` view is derived on demand.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping

Valuation = Mapping[str, Fraction]


class PolyError(ValueError):
    pass


def frac(x) -> Fraction:
    """Coerce ints, Fractions and strings ('3.8', '19/5') to Fraction.

    Floats are rejected: they would silently introduce inexact values.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise PolyError(f"refusing float {x!r}: pass a string or Fraction")
    return Fraction(x)


class Rel(Enum):
    LT = "<"
    LE = "<="
    EQ = "="


@dataclass(frozen=True)
class LinTerm:
    """sum(coeff * dim) + const; zero coefficients are never stored."""

    coeffs: tuple[tuple[str, Fraction], ...]
    const: Fraction

    def coeff(self, dim: str) -> Fraction:
        for d, c in self.coeffs:
            if d == dim:
                return c
        return Fraction(0)

    def dims(self) -> tuple[str, ...]:
        return tuple(d for d, _ in self.coeffs)

    def plus(self, other: "LinTerm") -> "LinTerm":
        acc = dict(self.coeffs)
        for d, c in other.coeffs:
            acc[d] = acc.get(d, Fraction(0)) + c
        return term(acc, self.const + other.const)

    def scaled(self, k: Fraction) -> "LinTerm":
        if k == 0:
            return LinTerm((), self.const * 0)
        return LinTerm(tuple((d, c * k) for d, c in self.coeffs), self.const * k)

    def negated(self) -> "LinTerm":
        return self.scaled(Fraction(-1))

    def subst(self, dim: str, replacement: "LinTerm") -> "LinTerm":
        """Replace `dim` by the given term."""
        a = self.coeff(dim)
        if a == 0:
            return self
        rest = term({d: c for d, c in self.coeffs if d != dim}, self.const)
        return rest.plus(replacement.scaled(a))

    def value_at(self, vals: Valuation) -> Fraction:
        total = self.const
        for d, c in self.coeffs:
            total += c * vals[d]
        return total

    def __str__(self) -> str:
        parts = []
        for d, c in self.coeffs:
            if c == 1:
                parts.append(f"+ {d}")
            elif c == -1:
                parts.append(f"- {d}")
            elif c < 0:
                parts.append(f"- {-c}*{d}")
            else:
                parts.append(f"+ {c}*{d}")
        if self.const != 0 or not parts:
            parts.append(f"+ {self.const}" if self.const >= 0 else f"- {-self.const}")
        out = " ".join(parts)
        return out[2:] if out.startswith("+ ") else "-" + out[2:] if out.startswith("- ") else out


def term(coeffs: Mapping[str, Fraction | int | str] | None = None, const=0) -> LinTerm:
    """Build a LinTerm, dropping zero coefficients; deterministic dim order."""
    items = []
    if coeffs:
        for d in sorted(coeffs):
            c = frac(coeffs[d])
            if c != 0:
                items.append((d, c))
    return LinTerm(tuple(items), frac(const))


@dataclass(frozen=True)
class Atom:
    """A single constraint `lhs rel 0`."""

    lhs: LinTerm
    rel: Rel

    def holds_at(self, vals: Valuation) -> bool:
        v = self.lhs.value_at(vals)
        if self.rel is Rel.LT:
            return v < 0
        if self.rel is Rel.LE:
            return v <= 0
        return v == 0

    def negations(self) -> tuple["Atom", ...]:
        """Atoms whose union is the complement of this atom.

        not (t <= 0) is t > 0; not (t < 0) is t >= 0; not (t = 0) splits
        into t < 0 then t > 0, in that order.
        """
        if self.rel is Rel.LE:
            return (Atom(self.lhs.negated(), Rel.LT),)
        if self.rel is Rel.LT:
            return (Atom(self.lhs.negated(), Rel.LE),)
        return (Atom(self.lhs, Rel.LT), Atom(self.lhs.negated(), Rel.LT))

    def canonical(self) -> "Atom":
        """Scale to coprime integer coefficients (sign-normalized for EQ)."""
        den = self.lhs.const.denominator
        for _, c in self.lhs.coeffs:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = [c.numerator * (den // c.denominator) for _, c in self.lhs.coeffs]
        const = self.lhs.const.numerator * (den // self.lhs.const.denominator)
        g = 0
        for n in ints:
            g = gcd(g, n)
        g = gcd(g, const) or 1
        if self.rel is Rel.EQ and ints and ints[0] < 0:
            g = -g
        coeffs = tuple((d, Fraction(n // g)) for (d, _), n in zip(self.lhs.coeffs, ints))
        return Atom(LinTerm(coeffs, Fraction(const // g)), self.rel)

    def __str__(self) -> str:
        return f"{self.lhs} {self.rel.value} 0"


def cmp_atom(lhs, op: str, rhs=0) -> Atom:
    """Build an atom from `lhs op rhs`; op in {<, <=, =, >=, >}.

    lhs/rhs accept LinTerm, a coefficient mapping, or a rational constant.
    Greater-than forms are normalized by negating the difference.
    """
    left = lhs if isinstance(lhs, LinTerm) else term(lhs) if isinstance(lhs, Mapping) else term({}, lhs)
    right = rhs if isinstance(rhs, LinTerm) else term(rhs) if isinstance(rhs, Mapping) else term({}, rhs)
    diff = left.plus(right.negated())
    if op == "<":
        return Atom(diff, Rel.LT)
    if op == "<=":
        return Atom(diff, Rel.LE)
    if op in ("=", "=="):
        return Atom(diff, Rel.EQ)
    if op == ">":
        return Atom(diff.negated(), Rel.LT)
    if op == ">=":
        return Atom(diff.negated(), Rel.LE)
    raise PolyError(f"unknown relation {op!r}")


class Space:
    """Ordered dimension registry; `params` marks the parameter dimensions.

    The order of `names` is the order point exhibition walks dimensions,
    so engine callers register parameters first.
    """

    __slots__ = ("names", "params", "index")

    def __init__(self, names: Iterable[str], params: Iterable[str] = ()):
        self.names = tuple(names)
        self.params = frozenset(params)
        if len(set(self.names)) != len(self.names):
            raise PolyError("duplicate dimension names")
        if not self.params <= set(self.names):
            raise PolyError("parameter not registered as a dimension")
        self.index = {d: i for i, d in enumerate(self.names)}

    @staticmethod
    def make(params: Iterable[str] = (), variables: Iterable[str] = ()) -> "Space":
        ps, vs = tuple(params), tuple(variables)
        return Space(ps + vs, ps)

    def __eq__(self, other):
        if not isinstance(other, Space):
            return NotImplemented
        return self.names == other.names and self.params == other.params

    def __hash__(self):
        return hash((self.names, self.params))

    def __repr__(self):
        return f"Space({self.names!r}, params={sorted(self.params)!r})"

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(n for n in self.names if n not in self.params)

    @property
    def parameters(self) -> tuple[str, ...]:
        return tuple(n for n in self.names if n in self.params)

    def without(self, dims: Iterable[str]) -> "Space":
        drop = set(dims)
        return Space(tuple(n for n in self.names if n not in drop), self.params - drop)

    def extended(self, name: str, param: bool = False) -> "Space":
        return Space(self.names + (name,), self.params | {name} if param else self.params)


@dataclass(frozen=True)
class DimInterval:
    """Exact one-dimensional shadow of a constraint set.

    `lower`/`upper` of None mean unbounded; the attained flags are False
    whenever the corresponding bound is infinite or strict.
    """

    lower: Fraction | None
    lower_attained: bool
    upper: Fraction | None
    upper_attained: bool


# ---------------------------------------------------------------------------
# integer row engine
#
# A row is (rel, vec, const) with rel in {_EQ, _LE, _LT}, vec a dense tuple
# of ints aligned with the space's dimension order, and const an int: the
# atom scaled by the lcm of its denominators and reduced by the gcd.

_EQ, _LE, _LT = 0, 1, 2
_REL_OF = {Rel.EQ: _EQ, Rel.LE: _LE, Rel.LT: _LT}
_REL_BACK = {_EQ: Rel.EQ, _LE: Rel.LE, _LT: Rel.LT}

Row = tuple  # (rel, vec, const)


def _false_row(width: int) -> Row:
    return (_LE, (0,) * width, 1)  # 1 <= 0


def _atom_to_row(a: Atom, space: Space) -> Row:
    den = a.lhs.const.denominator
    for _, c in a.lhs.coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    vec = [0] * len(space.names)
    g = 0
    for d, c in a.lhs.coeffs:
        i = space.index.get(d)
        if i is None:
            raise PolyError(f"atom mentions unregistered dimension {d!r}")
        n = c.numerator * (den // c.denominator)
        vec[i] = n
        g = gcd(g, n)
    const = a.lhs.const.numerator * (den // a.lhs.const.denominator)
    g = gcd(g, const)
    if g > 1:
        vec = [n // g for n in vec]
        const //= g
    return (_REL_OF[a.rel], tuple(vec), const)


def _row_to_atom(row: Row, space: Space) -> Atom:
    rel, vec, const = row
    coeffs = tuple((space.names[i], Fraction(n)) for i, n in enumerate(vec) if n)
    return Atom(LinTerm(coeffs, Fraction(const)), _REL_BACK[rel])


def _row_add(a: Row, ka: int, b: Row, kb: int, rel: int) -> Row:
    """ka*a + kb*b with the given relation; the multiplier of an inequality
    row must be positive (equalities may take any sign)."""
    vec = tuple(x * ka + y * kb for x, y in zip(a[1], b[1]))
    const = a[2] * ka + b[2] * kb
    g = 0
    for n in vec:
        g = gcd(g, n)
    g = gcd(g, const)
    if g > 1:
        vec = tuple(n // g for n in vec)
        const //= g
    return (rel, vec, const)


def _row_negations(row: Row) -> tuple[Row, ...]:
    rel, vec, const = row
    flipped = tuple(-n for n in vec)
    if rel == _LE:
        return ((_LT, flipped, -const),)
    if rel == _LT:
        return ((_LE, flipped, -const),)
    return ((_LT, vec, const), (_LT, flipped, -const))


def _compact(rows: Iterable[Row]):
    """Merge parallel rows into one bound pair per direction.

    Each row `W.x + c rel 0` is normalized so W is coprime with a positive
    leading coefficient (flipping the inequality when the sign is
    adjusted); rows sharing a direction tighten one lower/upper bound pair,
    held as raw num/den integer pairs compared by cross-multiplication.
    Returns the compacted rows, or None when the set is detectably empty.
    """
    # per direction: [lo_n, lo_d, lo_strict, hi_n, hi_d, hi_strict]
    table: dict[tuple, list] = {}
    order: list[tuple] = []
    for rel, vec, const in rows:
        g = 0
        lead = 0
        for n in vec:
            if n:
                if lead == 0:
                    lead = n
                g = gcd(g, n)
        if lead == 0:
            if const > 0 or (const == 0 and rel == _LT) or (const != 0 and rel == _EQ):
                return None
            continue
        if lead < 0:
            g = -g
        key = vec if g == 1 else tuple(n // g for n in vec)
        bn, bd = (-const, g) if g > 0 else (const, -g)
        ent = table.get(key)
        if ent is None:
            ent = table[key] = [None, 1, False, None, 1, False]
            order.append(key)
        strict = rel == _LT
        if rel == _EQ or g > 0:  # upper bound on key.x
            if ent[3] is None:
                ent[3], ent[4], ent[5] = bn, bd, strict
            else:
                lhs, rhs = bn * ent[4], ent[3] * bd
                if lhs < rhs:
                    ent[3], ent[4], ent[5] = bn, bd, strict
                elif lhs == rhs:
                    ent[5] = ent[5] or strict
        if rel == _EQ or g < 0:  # lower bound
            if ent[0] is None:
                ent[0], ent[1], ent[2] = bn, bd, strict
            else:
                lhs, rhs = bn * ent[1], ent[0] * bd
                if lhs > rhs:
                    ent[0], ent[1], ent[2] = bn, bd, strict
                elif lhs == rhs:
                    ent[2] = ent[2] or strict
    out: list[Row] = []
    for key in order:
        ln, ld, ls, hn, hd, hs = table[key]
        if ln is not None and hn is not None:
            lhs, rhs = ln * hd, hn * ld
            if lhs > rhs or (lhs == rhs and (ls or hs)):
                return None
            if lhs == rhs:
                g2 = gcd(ln, ld) or 1
                n, dn = ln // g2, ld // g2
                out.append((_EQ, tuple(c * dn for c in key), -n))
                continue
        if ln is not None:
            g2 = gcd(ln, ld) or 1
            n, dn = ln // g2, ld // g2
            out.append((_LT if ls else _LE, tuple(-c * dn for c in key), n))
        if hn is not None:
            g2 = gcd(hn, hd) or 1
            n, dn = hn // g2, hd // g2
            out.append((_LT if hs else _LE, tuple(c * dn for c in key), -n))
    return tuple(out)


def _eliminate_idx(rows: Iterable[Row], i: int):
    """One Fourier-Motzkin step on column i; None when detectably empty."""
    rows = list(rows)
    got = _eliminate_idx_anc(rows, [(0, 0)] * len(rows), i)
    return None if got is None else got[0]


def _eliminate_idx_anc(rows: list[Row], meta: list[tuple[int, int]], i: int):
    """One Fourier-Motzkin step threading (ancestors, involved-columns)
    bitmask pairs: which original rows a derived row combines, and which
    eliminated columns took part in its derivation."""
    bit = 1 << i
    pivot = pivot_meta = None
    for r, m in zip(rows, meta):
        if r[0] == _EQ and r[1][i]:
            pivot, pivot_meta = r, m
            break
    out: list[Row] = []
    out_meta: list[tuple[int, int]] = []
    if pivot is not None:
        e = pivot[1][i]
        for r, m in zip(rows, meta):
            if r is pivot:
                continue
            a = r[1][i]
            if a == 0:
                out.append(r)
                out_meta.append(m)
            else:
                out.append(_row_add(r, e, pivot, -a, r[0]) if e > 0 else _row_add(r, -e, pivot, a, r[0]))
                out_meta.append((m[0] | pivot_meta[0], m[1] | pivot_meta[1] | bit))
        return _compact_anc(out, out_meta)

    lowers: list[tuple[Row, int, tuple[int, int]]] = []  # coeff < 0
    uppers: list[tuple[Row, int, tuple[int, int]]] = []  # coeff > 0
    for r, m in zip(rows, meta):
        c = r[1][i]
        if c == 0:
            out.append(r)
            out_meta.append(m)
        elif c > 0:
            uppers.append((r, c, m))
        else:
            lowers.append((r, c, m))
    for lo, cl, ml in lowers:
        for up, cu, mu in uppers:
            rel = _LT if (lo[0] == _LT or up[0] == _LT) else _LE
            out.append(_row_add(lo, cu, up, -cl, rel))
            out_meta.append((ml[0] | mu[0], ml[1] | mu[1] | bit))
    return _compact_anc(out, out_meta)


def _compact_anc(rows: list[Row], meta: list[tuple[int, int]]):
    """_compact threading (ancestors, involved) bitmask pairs (the
    tightening row's pair wins; a merged equality unions both sides)."""
    table: dict[tuple, list] = {}
    order: list[tuple] = []
    for (rel, vec, const), mask in zip(rows, meta):
        g = 0
        lead = 0
        for n in vec:
            if n:
                if lead == 0:
                    lead = n
                g = gcd(g, n)
        if lead == 0:
            if const > 0 or (const == 0 and rel == _LT) or (const != 0 and rel == _EQ):
                return None
            continue
        if lead < 0:
            g = -g
        key = vec if g == 1 else tuple(n // g for n in vec)
        bn, bd = (-const, g) if g > 0 else (const, -g)
        ent = table.get(key)
        if ent is None:
            ent = table[key] = [None, 1, False, (0, 0), None, 1, False, (0, 0)]
            order.append(key)
        strict = rel == _LT
        if rel == _EQ or g > 0:  # upper bound on key.x
            if ent[4] is None:
                ent[4], ent[5], ent[6], ent[7] = bn, bd, strict, mask
            else:
                lhs, rhs = bn * ent[5], ent[4] * bd
                if lhs < rhs:
                    ent[4], ent[5], ent[6], ent[7] = bn, bd, strict, mask
                elif lhs == rhs:
                    ent[6] = ent[6] or strict
                    if mask[0].bit_count() < ent[7][0].bit_count():
                        ent[7] = mask  # cheaper derivation of the same bound
        if rel == _EQ or g < 0:  # lower bound
            if ent[0] is None:
                ent[0], ent[1], ent[2], ent[3] = bn, bd, strict, mask
            else:
                lhs, rhs = bn * ent[1], ent[0] * bd
                if lhs > rhs:
                    ent[0], ent[1], ent[2], ent[3] = bn, bd, strict, mask
                elif lhs == rhs:
                    ent[2] = ent[2] or strict
                    if mask[0].bit_count() < ent[3][0].bit_count():
                        ent[3] = mask
    out: list[Row] = []
    out_meta: list[tuple[int, int]] = []
    for key in order:
        ln, ld, ls, lm, hn, hd, hs, hm = table[key]
        if ln is not None and hn is not None:
            lhs, rhs = ln * hd, hn * ld
            if lhs > rhs or (lhs == rhs and (ls or hs)):
                return None
            if lhs == rhs:
                g2 = gcd(ln, ld) or 1
                n, dn = ln // g2, ld // g2
                out.append((_EQ, tuple(c * dn for c in key), -n))
                out_meta.append((lm[0] | hm[0], lm[1] | hm[1]))
                continue
        if ln is not None:
            g2 = gcd(ln, ld) or 1
            n, dn = ln // g2, ld // g2
            out.append((_LT if ls else _LE, tuple(-c * dn for c in key), n))
            out_meta.append(lm)
        if hn is not None:
            g2 = gcd(hn, hd) or 1
            n, dn = hn // g2, hd // g2
            out.append((_LT if hs else _LE, tuple(c * dn for c in key), -n))
            out_meta.append(hm)
    return out, out_meta


def _pruned(work, meta):
    """Drop rows combining more original rows than involved eliminated
    columns plus one: such rows are redundant in the projection."""
    if any(a.bit_count() > v.bit_count() + 1 for a, v in meta):
        keep = [k for k, (a, v) in enumerate(meta) if a.bit_count() <= v.bit_count() + 1]
        work = [work[k] for k in keep]
        meta = [meta[k] for k in keep]
    return work, meta


def _project(rows, cols, width: int):
    """Eliminate the given columns in order with redundancy pruning;
    None when detectably empty."""
    work = list(rows)
    meta = [(1 << k, 0) for k in range(len(work))]
    for i in cols:
        got = _eliminate_idx_anc(work, meta, i)
        if got is None:
            return None
        work, meta = _pruned(*got)
    return tuple(work)


def _pick_idx(rows, width: int) -> int | None:
    """Next column to eliminate: one pinned by an equality if possible,
    otherwise the one whose combination step creates the fewest pairs."""
    ups = [0] * width
    los = [0] * width
    for rel, vec, _ in rows:
        for i, n in enumerate(vec):
            if n:
                if rel == _EQ:
                    return i
                if n > 0:
                    ups[i] += 1
                else:
                    los[i] += 1
    best = None
    best_cost = None
    for i in range(width):
        if ups[i] or los[i]:
            cost = ups[i] * los[i]
            if best_cost is None or cost < best_cost:
                best, best_cost = i, cost
    return best


def _row_sat(rows, width: int) -> bool:
    if rows is None:
        return False
    for rel, vec, const in rows:
        if not any(vec) and (const > 0 or (const == 0 and rel == _LT) or (const != 0 and rel == _EQ)):
            return False
    work = list(rows)
    meta = [(1 << k, 0) for k in range(len(work))]
    while True:
        i = _pick_idx(work, width)
        if i is None:
            return True
        got = _eliminate_idx_anc(work, meta, i)
        if got is None:
            return False
        work, meta = _pruned(*got)


def _rows_sat_with(rows, extra: Row, width: int) -> bool:
    got = _compact(rows + (extra,))
    return got is not None and _row_sat(got, width)


class Polyhedron:
    """A possibly-open convex set given by a conjunction of atoms.

    Values are immutable; every operation builds a new polyhedron.  The
    empty atom tuple denotes the universe.  Equality is semantic (mutual
    inclusion), matching the set the constraints denote rather than their
    syntax; redundant atoms are permitted.
    """

    __slots__ = ("space", "rows", "_canon", "_sat_cache", "_atoms")

    def __init__(self, space: Space, atoms: Iterable[Atom] = (), _rows=None):
        self.space = space
        got = _rows if _rows is not None else _compact([_atom_to_row(a, space) for a in atoms])
        if got is None:
            got = (_false_row(len(space.names)),)
        self.rows: tuple[Row, ...] = got
        self._sat_cache: bool | None = False if got == (_false_row(len(space.names)),) else None
        self._canon: frozenset | None = None
        self._atoms: tuple[Atom, ...] | None = None

    @staticmethod
    def universe(space: Space) -> "Polyhedron":
        return Polyhedron(space, ())

    @staticmethod
    def _make(space: Space, rows) -> "Polyhedron":
        if rows is None:
            rows = (_false_row(len(space.names)),)
        return Polyhedron(space, _rows=rows)

    @property
    def canon_key(self) -> frozenset | None:
        """Normalized bound table; equal keys imply equal sets.  None for a
        detected-empty value."""
        if self._sat_cache is False:
            return None
        if self._canon is None:
            table: dict[tuple, list] = {}
            for rel, vec, const in self.rows:
                g = 0
                lead = 0
                for n in vec:
                    if n:
                        if lead == 0:
                            lead = n
                        g = gcd(g, n)
                if lead < 0:
                    g = -g
                key = vec if g == 1 else tuple(n // g for n in vec)
                bound = Fraction(-const, g)
                ent = table.setdefault(key, [None, False, None, False])
                strict = rel == _LT
                if rel == _EQ or g > 0:
                    ent[2], ent[3] = bound, strict
                if rel == _EQ or g < 0:
                    ent[0], ent[1] = bound, strict
            self._canon = frozenset((k, *v) for k, v in table.items())
        return self._canon

    @property
    def atoms(self) -> tuple[Atom, ...]:
        if self._atoms is None:
            self._atoms = tuple(_row_to_atom(r, self.space) for r in self.rows)
        return self._atoms

    # -- basic queries ----------------------------------------------------

    def is_satisfiable(self) -> bool:
        if self._sat_cache is None:
            self._sat_cache = _row_sat(self.rows, len(self.space.names))
        return self._sat_cache

    def contains_point(self, vals: Valuation) -> bool:
        point = [frac(vals[d]) for d in self.space.names]
        for rel, vec, const in self.rows:
            v = const + sum(p * n for p, n in zip(point, vec) if n)
            if (rel == _EQ and v != 0) or (rel == _LE and v > 0) or (rel == _LT and v >= 0):
                return False
        return True

    def includes(self, other: "Polyhedron") -> bool:
        """True iff every point of `other` lies in self."""
        if other.space != self.space:
            raise PolyError("dimension registries differ")
        if not other.is_satisfiable():
            return True
        width = len(self.space.names)
        for r in self.rows:
            for neg in _row_negations(r):
                if _rows_sat_with(other.rows, neg, width):
                    return False
        return True

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polyhedron):
            return NotImplemented
        if self.space != other.space:
            return False
        if self.canon_key is not None and self.canon_key == other.canon_key:
            return True  # identical normalized constraint tables
        return self.includes(other) and other.includes(self)

    def __le__(self, other: "Polyhedron") -> bool:
        return other.includes(self)

    __hash__ = None  # semantic equality; not hashable

    def __repr__(self) -> str:
        if not self.rows:
            return "Polyhedron(universe)"
        return "Polyhedron(" + " and ".join(str(a) for a in self.atoms) + ")"

    # -- constructors from this value --------------------------------------

    def conj(self, other: "Polyhedron") -> "Polyhedron":
        if other.space != self.space:
            raise PolyError("dimension registries differ")
        return Polyhedron._make(self.space, _compact(self.rows + other.rows))

    __and__ = conj

    def with_atoms(self, extra: Iterable[Atom]) -> "Polyhedron":
        more = tuple(_atom_to_row(a, self.space) for a in extra)
        return Polyhedron._make(self.space, _compact(self.rows + more))

    def rebased(self, space: Space) -> "Polyhedron":
        """Same atoms over a larger registry (kinds must agree)."""
        cols = []
        for d in self.space.names:
            if d not in space.index or (d in space.params) != (d in self.space.params):
                raise PolyError(f"cannot rebase: dimension {d!r} mismatch")
            cols.append(space.index[d])
        width = len(space.names)
        rows = []
        for rel, vec, const in self.rows:
            out = [0] * width
            for c, n in zip(cols, vec):
                out[c] = n
            rows.append((rel, tuple(out), const))
        return Polyhedron._make(space, tuple(rows))

    def _eliminated_rows(self, dims: Iterable[str]):
        for d in dims:
            if d not in self.space.index:
                raise PolyError(f"unknown dimension {d!r}")
        cols = sorted(self.space.index[d] for d in dims)
        return _project(self.rows, cols, len(self.space.names))

    def eliminate(self, dims: Iterable[str]) -> "Polyhedron":
        """Exact shadow after removing `dims` from the registry."""
        drop = set(dims)
        rows = self._eliminated_rows(drop)
        space = self.space.without(drop)
        keep = [self.space.index[d] for d in space.names]
        if rows is not None:
            rows = tuple((rel, tuple(vec[i] for i in keep), const) for rel, vec, const in rows)
        else:
            rows = (_false_row(len(space.names)),)
        return Polyhedron._make(space, rows)

    def project_params(self) -> "Polyhedron":
        """Shadow on the parameter dimensions only."""
        return self.eliminate(self.space.variables)

    def unconstrained(self, dims: Iterable[str]) -> "Polyhedron":
        """Forget all constraints on `dims`, keeping them registered."""
        rows = self._eliminated_rows(dims)
        return Polyhedron._make(self.space, rows)

    def _drift(self, flow: Valuation, sign: int) -> "Polyhedron":
        rates = {}
        for d, r in flow.items():
            if d in self.space.params:
                raise PolyError(f"parameter {d!r} cannot flow")
            if d not in self.space.index:
                raise PolyError(f"unknown dimension {d!r}")
            r = frac(r)
            if r != 0:
                rates[self.space.index[d]] = r
        # fresh delay column appended at the end
        rows = []
        for rel, vec, const in self.rows:
            shift = sum((n * rates[i] for i, n in enumerate(vec) if n and i in rates), Fraction(0))
            if shift == 0:
                rows.append((rel, vec + (0,), const))
            else:
                q = shift.denominator
                rows.append((rel, tuple(n * q for n in vec) + (sign * shift.numerator,), const * q))
        width = len(self.space.names)
        rows.append((_LE, (0,) * width + (-1,), 0))  # delay >= 0
        rows = _eliminate_idx(rows, width)
        if rows is not None:
            rows = tuple((rel, vec[:width], const) for rel, vec, const in rows)
        return Polyhedron._make(self.space, rows)

    def time_elapse(self, flow: Valuation) -> "Polyhedron":
        """Points reachable by letting variables drift forward under `flow`.

        Substitutes x := x - flow(x)*d with fresh d >= 0, then eliminates d.
        Dimensions absent from the map have rate 0.
        """
        return self._drift(flow, -1)

    def time_past(self, flow: Valuation) -> "Polyhedron":
        """Points from which this set is reachable by drifting under `flow`."""
        return self._drift(flow, +1)

    def update(self, assigns: Valuation) -> "Polyhedron":
        """Set each assigned variable to a constant (reset is the 0 case)."""
        for d in assigns:
            if d in self.space.params:
                raise PolyError(f"parameter {d!r} cannot be updated")
        rows = self._eliminated_rows(assigns)
        if rows is None:
            return Polyhedron._make(self.space, None)
        width = len(self.space.names)
        pins = []
        for d, v in assigns.items():
            v = frac(v)
            vec = [0] * width
            vec[self.space.index[d]] = v.denominator
            pins.append((_EQ, tuple(vec), -v.numerator))
        return Polyhedron._make(self.space, _compact(rows + tuple(pins)))

    def fix_params(self, pval: Valuation) -> "Polyhedron":
        """Substitute every parameter; result lives on the variables only."""
        missing = set(self.space.parameters) - set(pval)
        if missing:
            raise PolyError(f"valuation misses parameters {sorted(missing)}")
        values = {self.space.index[p]: frac(pval[p]) for p in self.space.parameters}
        keep = [self.space.index[d] for d in self.space.variables]
        rows = []
        for rel, vec, const in self.rows:
            extra = sum((vec[i] * v for i, v in values.items() if vec[i]), Fraction(0))
            kept = tuple(vec[i] for i in keep)
            if extra == 0:
                rows.append((rel, kept, const))
            else:
                q = extra.denominator
                rows.append((rel, tuple(n * q for n in kept), const * q + extra.numerator))
        return Polyhedron._make(Space(self.space.variables), _compact(rows))

    def minimized(self) -> "Polyhedron":
        """Drop atoms implied by the others (set unchanged, order kept)."""
        if not self.is_satisfiable():
            return Polyhedron._make(self.space, None)
        width = len(self.space.names)
        kept = list(self.rows)
        i = 0
        while i < len(kept):
            rest = tuple(kept[:i] + kept[i + 1 :])
            implied = all(
                not _rows_sat_with(rest, neg, width)
                for neg in _row_negations(kept[i])
            )
            if implied:
                kept.pop(i)
            else:
                i += 1
        return Polyhedron._make(self.space, _compact(kept))

    def normal_form(self) -> "Polyhedron":
        """Canonical irredundant representative of this set.

        The equality subsystem is brought to reduced integer echelon form,
        inequalities are reduced modulo it, parallel bounds merged, and
        implied rows dropped.  Two equal sets then carry identical row
        tables except in contrived cases (an equality only implied by three
        or more inequalities together), so `canon_key` equality is a
        reliable stand-in for semantic equality.
        """
        if not self.is_satisfiable():
            return Polyhedron._make(self.space, None)
        base = self.minimized()
        eqs = [r for r in base.rows if r[0] == _EQ]
        ineqs = [r for r in base.rows if r[0] != _EQ]
        pivots: list[tuple[int, Row]] = []  # (pivot column, row), ascending
        for r in eqs:
            cur = r
            for col, p in pivots:
                c = cur[1][col]
                if c:
                    cur = _row_add(cur, p[1][col], p, -c, _EQ)
            lead = next((i for i, n in enumerate(cur[1]) if n), None)
            if lead is None:
                continue  # dependent equality
            if cur[1][lead] < 0:
                cur = (_EQ, tuple(-n for n in cur[1]), -cur[2])
            pivots.append((lead, cur))
            pivots.sort(key=lambda cp: cp[0])
        for i in range(len(pivots)):
            col, row = pivots[i]
            for j in range(len(pivots)):
                if i == j:
                    continue
                cj, rj = pivots[j]
                c = rj[1][col]
                if c:
                    rj = _row_add(rj, row[1][col], row, -c, _EQ)
                    if rj[1][cj] < 0:
                        rj = (_EQ, tuple(-n for n in rj[1]), -rj[2])
                    pivots[j] = (cj, rj)
        reduced = []
        for r in ineqs:
            cur = r
            for col, p in pivots:
                c = cur[1][col]
                if c:
                    cur = _row_add(cur, p[1][col], p, -c, cur[0])
            reduced.append(cur)
        if not pivots:
            return base
        rows = _compact([p for _, p in pivots] + reduced)
        return Polyhedron._make(self.space, rows).minimized()

    # -- inspection ---------------------------------------------------------

    def interval(self, dim: str) -> DimInterval:
        """Exact projection of the set onto one dimension."""
        if dim not in self.space.index:
            raise PolyError(f"unknown dimension {dim!r}")
        if not self.is_satisfiable():
            raise PolyError("interval of an unsatisfiable constraint set")
        rows = self._eliminated_rows([d for d in self.space.names if d != dim])
        assert rows is not None  # satisfiable, so the shadow is too
        col = self.space.index[dim]
        lo: Fraction | None = None
        lo_at = False
        hi: Fraction | None = None
        hi_at = False
        for rel, vec, const in rows:
            c = vec[col]
            if c == 0:
                continue
            bound = Fraction(-const, c)
            attained = rel != _LT
            if rel == _EQ or c > 0:  # upper bound on dim
                if hi is None or bound < hi:
                    hi, hi_at = bound, attained
                elif bound == hi:
                    hi_at = hi_at and attained
            if rel == _EQ or c < 0:  # lower bound
                if lo is None or bound > lo:
                    lo, lo_at = bound, attained
                elif bound == lo:
                    lo_at = lo_at and attained
        return DimInterval(lo, lo_at, hi, hi_at)

    def pick_point(self) -> dict[str, Fraction]:
        """A concrete member, chosen to be human-friendly and deterministic.

        Dimensions are walked in registry order; after each choice the
        dimension is pinned before the next is examined.  Per dimension:
        unconstrained -> 1; a minimum of 0 with positive supremum -> 1,
        or half the supremum when it is at most 1; any other minimum is
        taken as-is; finite infimum with no supremum -> infimum + 1; no
        infimum -> min(1, supremum - 1); otherwise the midpoint.
        """
        if not self.is_satisfiable():
            raise PolyError("cannot pick a point of an unsatisfiable constraint set")
        vals: dict[str, Fraction] = {}
        cur = self
        width = len(self.space.names)
        for col, dim in enumerate(self.space.names):
            iv = cur.interval(dim)
            if iv.lower is None and iv.upper is None:
                v = Fraction(1)
            elif iv.lower_attained:
                if iv.lower == 0 and (iv.upper is None or iv.upper > 0):
                    if iv.upper is None or iv.upper > 1:
                        v = Fraction(1)
                    else:
                        v = iv.upper / 2
                else:
                    v = iv.lower
            elif iv.lower is not None and iv.upper is None:
                v = iv.lower + 1
            elif iv.lower is None:
                v = min(Fraction(1), iv.upper - 1)
            else:
                v = (iv.lower + iv.upper) / 2
            vals[dim] = v
            vec = [0] * width
            vec[col] = v.denominator
            cur = Polyhedron._make(self.space, _compact(cur.rows + ((_EQ, tuple(vec), -v.numerator),)))
        return vals


def point_poly(space: Space, vals: Valuation) -> Polyhedron:
    """The singleton polyhedron pinning every dimension in `vals`."""
    width = len(space.names)
    rows = []
    for d, v in vals.items():
        v = frac(v)
        vec = [0] * width
        vec[space.index[d]] = v.denominator
        rows.append((_EQ, tuple(vec), -v.numerator))
    return Polyhedron._make(space, _compact(rows))


def point_in_difference(a: Polyhedron, b: Polyhedron) -> dict[str, Fraction] | None:
    """A point of a \\ b, or None when a is included in b.

    b's atoms are tried in stored order; the first satisfiable piece
    a & not(atom) wins, which keeps the output reproducible.
    """
    if a.space != b.space:
        raise PolyError("dimension registries differ")
    for r in b.rows:
        for neg in _row_negations(r):
            piece = Polyhedron._make(a.space, _compact(a.rows + (neg,)))
            if piece.is_satisfiable():
                return piece.pick_point()
    return None

"""Type language for the combinator calculus.

Types classify meanings in a set-valued semantics.  ``In(s, t)`` marks a
meaning that still needs a contextual antecedent of type ``s`` (a pronoun
slot); ``Out(s, t)`` marks a meaning paired with produced discourse referents
of type ``s``.  Both are function-like and product-like respectively, but are
kept distinct from ``Arrow`` and ``Prod`` so composition cannot confuse them.
The truth type is not a separate constructor: sentences have surface type
``1`` and denote subsets of the one-point set.

Two isomorphisms are baked into the canonical form: a unit output is dropped
(``1 |x t`` collapses to ``t``) and a product output is unrolled into a spine
(``(a * b) |x t`` becomes ``a |x b |x t``).  Unification works modulo these,
which makes it finitary but multi-valued: a variable heading an output spine
may swallow any prefix of the spine it is matched against, so ``unify``
returns a set of substitutions rather than a single most general one.

Concrete syntax (all binary constructors associate to the right)::

    type  := in ('->' type)?
    in    := prod (('|>' | '|x') in)?
    prod  := atom ('*' prod)?
    atom  := 'e' | '1' | variable | '(' type ')'

Example: ``e |x e -> e |x e |x 1`` is the type of a function from an
entity-plus-referent to a truth value carrying two referents.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator


class TypeError_(Exception):
    """Base class for errors raised by the type layer."""


class TypeSyntaxError(TypeError_):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ShiftIndexError(TypeError_):
    """A shift family index exceeded the configured bound."""


@dataclass(frozen=True)
class Type:
    pass


@dataclass(frozen=True)
class Base(Type):
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Var(Type):
    id: int

    def __repr__(self) -> str:
        return var_name(self.id)


@dataclass(frozen=True)
class Arrow(Type):
    dom: Type
    cod: Type


@dataclass(frozen=True)
class In(Type):
    ante: Type
    body: Type


@dataclass(frozen=True)
class Out(Type):
    ref: Type
    body: Type


@dataclass(frozen=True)
class Prod(Type):
    left: Type
    right: Type


E = Base("e")
UNIT = Base("1")

Subst = dict[int, Type]


class VarSupply:
    """Monotone source of fresh type variables for one inference session."""

    def __init__(self, start: int = 0) -> None:
        self._counter = itertools.count(start)

    def fresh(self) -> Var:
        return Var(next(self._counter))


# ---------------------------------------------------------------------------
# Canonical form


def normalize(t: Type) -> Type:
    """Rewrite to canonical form: no unit and no product heads an output."""
    match t:
        case Arrow(dom, cod):
            return Arrow(normalize(dom), normalize(cod))
        case In(ante, body):
            return In(normalize(ante), normalize(body))
        case Prod(left, right):
            return Prod(normalize(left), normalize(right))
        case Out(ref, body):
            ref = normalize(ref)
            body = normalize(body)
            if ref == UNIT:
                return body
            if isinstance(ref, Prod):
                return normalize(Out(ref.left, Out(ref.right, body)))
            return Out(ref, body)
        case _:
            return t


def var_ids(t: Type) -> set[int]:
    match t:
        case Var(i):
            return {i}
        case Arrow(a, b) | In(a, b) | Out(a, b) | Prod(a, b):
            return var_ids(a) | var_ids(b)
        case _:
            return set()


def is_ground(t: Type) -> bool:
    return not var_ids(t)


def apply_subst(s: Subst, t: Type) -> Type:
    if not s:
        return t
    match t:
        case Var(i):
            return s.get(i, t)
        case Arrow(a, b):
            return Arrow(apply_subst(s, a), apply_subst(s, b))
        case In(a, b):
            return In(apply_subst(s, a), apply_subst(s, b))
        case Out(a, b):
            return Out(apply_subst(s, a), apply_subst(s, b))
        case Prod(a, b):
            return Prod(apply_subst(s, a), apply_subst(s, b))
        case _:
            return t


def subst_extend(s: Subst, v: int, t: Type) -> Subst | None:
    """Extend ``s`` with ``v -> t``, keeping it idempotent; None on occurs."""
    t = normalize(apply_subst(s, t))
    if t == Var(v):
        return s
    if v in var_ids(t):
        return None
    one = {v: t}
    out = {k: normalize(apply_subst(one, u)) for k, u in s.items()}
    out[v] = t
    return out


# ---------------------------------------------------------------------------
# Output spines


def out_spine(t: Type) -> tuple[list[Type], Type]:
    """Unfold ``a1 |x a2 |x ... |x tail`` into ([a1, a2, ...], tail)."""
    elems: list[Type] = []
    while isinstance(t, Out):
        elems.append(t.ref)
        t = t.body
    return elems, t


def respine(elems: list[Type], tail: Type) -> Type:
    for e in reversed(elems):
        tail = Out(e, tail)
    return tail


def prod_right(elems: list[Type]) -> Type:
    """Right-nested product of the given spine elements; unit if empty."""
    if not elems:
        return UNIT
    t = elems[-1]
    for e in reversed(elems[:-1]):
        t = Prod(e, t)
    return t


def out_arity(t: Type) -> int:
    """Number of spine slots a type occupies when it heads an output."""
    match t:
        case Base(name) if name == "1":
            return 0
        case Prod(a, b):
            return out_arity(a) + out_arity(b)
        case _:
            return 1


# ---------------------------------------------------------------------------
# Unification


def unify(a: Type, b: Type, rigid: frozenset[int] = frozenset()) -> list[Subst]:
    """All minimal substitutions making ``a`` and ``b`` canonically equal.

    Inputs must be canonical.  Variables listed in ``rigid`` act as
    constants.  Failure is the empty list.  When a flexible variable heads an
    output spine it is bound, in turn, to every prefix of the opposing spine
    (the unit for the empty prefix, a right-nested product otherwise) and the
    remainders are unified; this is finite and complete for the spine-headed
    patterns the combinator types produce.
    """
    sols = _solve([(a, b)], {}, rigid)
    relevant = var_ids(a) | var_ids(b)
    sols = [{k: v for k, v in s.items() if k in relevant} for s in sols]
    if len(sols) <= 1:
        return sols
    return _minimize(sols, relevant, rigid)


def _solve(pairs: list[tuple[Type, Type]], s: Subst, rigid: frozenset[int]) -> list[Subst]:
    if not pairs:
        return [s]
    a0, b0 = pairs[0]
    rest = pairs[1:]
    a = normalize(apply_subst(s, a0))
    b = normalize(apply_subst(s, b0))
    if a == b:
        return _solve(rest, s, rigid)

    if isinstance(a, Var) and a.id not in rigid and not isinstance(b, Out):
        s2 = subst_extend(s, a.id, b)
        return _solve(rest, s2, rigid) if s2 is not None else []
    if isinstance(b, Var) and b.id not in rigid and not isinstance(a, Out):
        s2 = subst_extend(s, b.id, a)
        return _solve(rest, s2, rigid) if s2 is not None else []

    if isinstance(a, Out) or isinstance(b, Out):
        return _solve_out(a, b, rest, s, rigid)

    match a, b:
        case (Arrow(a1, a2), Arrow(b1, b2)):
            return _solve([(a1, b1), (a2, b2)] + rest, s, rigid)
        case (In(a1, a2), In(b1, b2)):
            return _solve([(a1, b1), (a2, b2)] + rest, s, rigid)
        case (Prod(a1, a2), Prod(b1, b2)):
            return _solve([(a1, b1), (a2, b2)] + rest, s, rigid)
        case _:
            return []


def _solve_out(a: Type, b: Type, rest, s: Subst, rigid: frozenset[int]) -> list[Subst]:
    # A bare flexible variable against a spine binds to the whole spine.
    if isinstance(a, Var) and a.id not in rigid:
        s2 = subst_extend(s, a.id, b)
        return _solve(rest, s2, rigid) if s2 is not None else []
    if isinstance(b, Var) and b.id not in rigid:
        s2 = subst_extend(s, b.id, a)
        return _solve(rest, s2, rigid) if s2 is not None else []

    flex_a = isinstance(a, Out) and isinstance(a.ref, Var) and a.ref.id not in rigid
    flex_b = isinstance(b, Out) and isinstance(b.ref, Var) and b.ref.id not in rigid
    sols: list[Subst] = []
    if flex_a:
        sols += _enum_prefix(a.ref.id, a.body, b, rest, s, rigid)
    if flex_b:
        sols += _enum_prefix(b.ref.id, b.body, a, rest, s, rigid)
    if not flex_a and not flex_b:
        if isinstance(a, Out) and isinstance(b, Out):
            return _solve([(a.ref, b.ref), (a.body, b.body)] + rest, s, rigid)
        return []
    return sols


def _enum_prefix(v: int, tail: Type, other: Type, rest, s: Subst, rigid) -> list[Subst]:
    elems, sptail = out_spine(other)
    sols: list[Subst] = []
    for m in range(len(elems) + 1):
        s2 = subst_extend(s, v, prod_right(elems[:m]))
        if s2 is None:
            continue
        sols += _solve([(tail, respine(elems[m:], sptail))] + rest, s2, rigid)
    return sols


def roots_may_unify(a: Type, b: Type) -> bool:
    """Cheap necessary condition for unifiability, used to prune searches."""
    if isinstance(a, Var) or isinstance(b, Var):
        return True
    if isinstance(a, Out):
        return isinstance(a.ref, Var) or isinstance(b, Out)
    if isinstance(b, Out):
        return isinstance(b.ref, Var)
    if isinstance(a, Base) or isinstance(b, Base):
        return a == b
    return type(a) is type(b)


def _solution_key(s: Subst) -> str:
    return ";".join(f"{k}={format_type(v, rename=False)}" for k, v in sorted(s.items()))


def _instance_of(s1: Subst, s2: Subst, varset: set[int], rigid: frozenset[int]) -> bool:
    """True when ``s1`` refines ``s2``: some further substitution maps the
    instance produced by ``s2`` onto the one produced by ``s1``."""
    frozen = set(rigid)
    for v in varset:
        frozen |= var_ids(normalize(apply_subst(s1, Var(v))))
    pairs = [
        (normalize(apply_subst(s2, Var(v))), normalize(apply_subst(s1, Var(v))))
        for v in sorted(varset)
    ]
    return bool(_solve(pairs, {}, frozenset(frozen)))


def _minimize(sols: list[Subst], varset: set[int], rigid: frozenset[int]) -> list[Subst]:
    uniq: dict[str, Subst] = {}
    for s in sols:
        uniq.setdefault(_solution_key(s), s)
    items = sorted(uniq.items())
    keep: list[Subst] = []
    for key, s in items:
        dropped = False
        for key2, s2 in items:
            if key2 == key:
                continue
            if _instance_of(s, s2, varset, rigid):
                # Equivalent solutions keep the lexicographically first key.
                if not _instance_of(s2, s, varset, rigid) or key2 < key:
                    dropped = True
                    break
        if not dropped:
            keep.append(s)
    return keep


def alpha_equal(a: Type, b: Type) -> bool:
    """Equality of canonical types up to a bijective renaming of variables."""
    fwd: dict[int, int] = {}
    bwd: dict[int, int] = {}

    def go(x: Type, y: Type) -> bool:
        match x, y:
            case (Var(i), Var(j)):
                if fwd.setdefault(i, j) != j or bwd.setdefault(j, i) != i:
                    return False
                return True
            case (Base(m), Base(n)):
                return m == n
            case (Arrow(x1, x2), Arrow(y1, y2)):
                return go(x1, y1) and go(x2, y2)
            case (In(x1, x2), In(y1, y2)):
                return go(x1, y1) and go(x2, y2)
            case (Out(x1, x2), Out(y1, y2)):
                return go(x1, y1) and go(x2, y2)
            case (Prod(x1, x2), Prod(y1, y2)):
                return go(x1, y1) and go(x2, y2)
            case _:
                return False

    return go(normalize(a), normalize(b))


# ---------------------------------------------------------------------------
# Printing and parsing

VAR_LETTERS = "αβγστ"


def var_name(i: int) -> str:
    letter = VAR_LETTERS[i % len(VAR_LETTERS)]
    gen = i // len(VAR_LETTERS)
    return letter if gen == 0 else f"{letter}{gen}"


def canonical_renaming(t: Type) -> Subst:
    """Substitution renaming variables to 0,1,... in order of appearance."""
    order: list[int] = []

    def walk(x: Type) -> None:
        match x:
            case Var(i):
                if i not in order:
                    order.append(i)
            case Arrow(a, b) | In(a, b) | Out(a, b) | Prod(a, b):
                walk(a)
                walk(b)

    walk(t)
    return {v: Var(k) for k, v in enumerate(order)}


def format_type(t: Type, rename: bool = True) -> str:
    """Canonical printed form; with ``rename`` variables are relabelled."""
    t = normalize(t)
    if rename:
        t = apply_subst(canonical_renaming(t), t)

    def go(x: Type, level: int) -> str:
        match x:
            case Base(name):
                return name
            case Var(i):
                return var_name(i)
            case Arrow(a, b):
                text = f"{go(a, 1)} -> {go(b, 0)}"
                return f"({text})" if level > 0 else text
            case In(a, b):
                text = f"{go(a, 2)} |> {go(b, 1)}"
                return f"({text})" if level > 1 else text
            case Out(a, b):
                text = f"{go(a, 2)} |x {go(b, 1)}"
                return f"({text})" if level > 1 else text
            case Prod(a, b):
                text = f"{go(a, 3)} * {go(b, 2)}"
                return f"({text})" if level > 2 else text
        raise AssertionError(f"unhandled type {x!r}")

    return go(t, 0)


_TOKEN = re.compile(r"\s*(->|\|>|\|x|\*|\(|\)|1|[A-Za-zαβγστ][A-Za-z0-9_']*)")


def _tokenize_type(text: str) -> Iterator[tuple[str, int]]:
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip():
                raise TypeSyntaxError(f"unexpected character {text[pos:].strip()[0]!r}", pos)
            return
        yield m.group(1), m.start(1)
        pos = m.end()


def parse_type(text: str, supply: VarSupply | None = None) -> Type:
    """Parse the concrete type syntax.  Unknown identifiers become variables;
    occurrences of the same name share one variable."""
    tokens = list(_tokenize_type(text))
    names: dict[str, Var] = {}
    local = supply or VarSupply()
    pos = 0

    def peek() -> str | None:
        return tokens[pos][0] if pos < len(tokens) else None

    def take() -> tuple[str, int]:
        nonlocal pos
        if pos >= len(tokens):
            raise TypeSyntaxError("unexpected end of input", len(text))
        tok = tokens[pos]
        pos += 1
        return tok

    def atom() -> Type:
        tok, at = take()
        if tok == "(":
            t = arrow()
            closing, cat = take()
            if closing != ")":
                raise TypeSyntaxError("expected ')'", cat)
            return t
        if tok == "e":
            return E
        if tok == "1":
            return UNIT
        if tok in ("->", "|>", "|x", "*", ")"):
            raise TypeSyntaxError(f"unexpected {tok!r}", at)
        if tok not in names:
            names[tok] = local.fresh()
        return names[tok]

    def prod() -> Type:
        t = atom()
        if peek() == "*":
            take()
            return Prod(t, prod())
        return t

    def inout() -> Type:
        t = prod()
        if peek() in ("|>", "|x"):
            op, _ = take()
            rhs = inout()
            return In(t, rhs) if op == "|>" else Out(t, rhs)
        return t

    def arrow() -> Type:
        t = inout()
        if peek() == "->":
            take()
            return Arrow(t, arrow())
        return t

    t = arrow()
    if pos != len(tokens):
        raise TypeSyntaxError(f"trailing input {tokens[pos][0]!r}", tokens[pos][1])
    return t


# ---------------------------------------------------------------------------
# Shift families

SHIFT_BASES = ("gIn", "gOut", "z", "s")


def shift_type(base: str, i: int, j: int, supply: VarSupply,
               max_index: int | None = None) -> tuple[Type, int]:
    """Polymorphic type of an indexed shift, plus the id of its split
    variable (the referent block the base operation threads through).

    The base types are those of the four primitive operations; the indexed
    family applies the insertion action ``j`` times and the composition
    action ``i`` times, introducing a fresh pass-through variable each step.
    """
    if max_index is not None and (i > max_index or j > max_index):
        raise ShiftIndexError(f"{base}_{i}_{j} exceeds the index bound {max_index}")
    if base not in SHIFT_BASES:
        raise ValueError(f"unknown shift base {base!r}")
    alpha, sigma = supply.fresh(), supply.fresh()
    if base == "gIn":
        beta = supply.fresh()
        t: Type = Arrow(Arrow(alpha, beta), Arrow(In(sigma, alpha), In(sigma, beta)))
    elif base == "gOut":
        beta = supply.fresh()
        t = Arrow(Arrow(alpha, beta), Arrow(Out(sigma, alpha), Out(sigma, beta)))
    elif base == "z":
        beta, gamma = supply.fresh(), supply.fresh()
        t = Arrow(
            Arrow(alpha, Arrow(Out(sigma, beta), gamma)),
            Arrow(In(sigma, alpha), Arrow(Out(sigma, beta), gamma)),
        )
    else:  # s
        beta, gamma = supply.fresh(), supply.fresh()
        t = Arrow(
            Arrow(Out(sigma, beta), Arrow(alpha, gamma)),
            Arrow(Out(sigma, beta), Arrow(In(sigma, alpha), gamma)),
        )
    for _ in range(j):
        t = _insertion_step(t, supply)
    for _ in range(i):
        t = _composition_step(t, supply)
    return t, sigma.id


def _composition_step(t: Type, supply: VarSupply) -> Type:
    assert isinstance(t, Arrow)
    tau = supply.fresh()
    return Arrow(Arrow(tau, t.dom), Arrow(tau, t.cod))


def _insertion_step(t: Type, supply: VarSupply) -> Type:
    assert isinstance(t, Arrow) and isinstance(t.dom, Arrow) and isinstance(t.cod, Arrow)
    tau = supply.fresh()
    return Arrow(
        Arrow(t.dom.dom, Arrow(tau, t.dom.cod)),
        Arrow(t.cod.dom, Arrow(tau, t.cod.cod)),
    )

"""Combinator terms and type assignment.

Terms are variable-free: lexical constants, indexed shift constants, and
application, nothing else.  A shift constant ``gIn_i_j`` (likewise ``gOut``,
``z``, ``s``) is a first-class term so the derivation search can insert it
uniformly.  Because output-spine unification branches, a term does not have
one principal type; ``typecheck`` returns the finite set of canonical types
and ``elaborate`` additionally yields, per solution, a ground-annotated copy
of the term tree that the evaluator consumes.

Concrete syntax is prefix application with parentheses::

    term  := name | '(' term term+ ')'
    name  := shift | lexeme | abbreviation

``(f a b)`` associates as ``((f a) b)``.  Shifts are written ``gIn_1_0``
etc.; a bare ``gIn``/``gOut``/``z``/``s`` abbreviates indices 0,0.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping

from .types import (
    Arrow,
    Subst,
    Type,
    UNIT,
    Var,
    VarSupply,
    apply_subst,
    canonical_renaming,
    format_type,
    normalize,
    shift_type,
    unify,
    var_ids,
)

if TYPE_CHECKING:
    from .lexicon import Lexicon


class TermError(Exception):
    pass


class TermSyntaxError(TermError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownLexemeError(TermError):
    def __init__(self, name: str) -> None:
        super().__init__(f"unknown lexeme {name!r}")
        self.name = name


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Lex(Term):
    name: str


@dataclass(frozen=True)
class Shift(Term):
    base: str
    i: int
    j: int


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


_SHIFT_NAME = re.compile(r"^(gIn|gOut|z|s)(?:_(\d+)_(\d+))?$")
_TERM_TOKEN = re.compile(r"\s*(\(|\)|[^\s()]+)")


def parse_term(text: str, abbrevs: Mapping[str, Term] | None = None) -> Term:
    """Parse the prefix term syntax, expanding named abbreviations."""
    abbrevs = abbrevs or {}
    tokens: list[tuple[str, int]] = []
    pos = 0
    while pos < len(text):
        m = _TERM_TOKEN.match(text, pos)
        if m is None:
            break
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    if not tokens:
        raise TermSyntaxError("empty term", 0)

    idx = 0

    def take() -> tuple[str, int]:
        nonlocal idx
        if idx >= len(tokens):
            raise TermSyntaxError("unexpected end of input", len(text))
        tok = tokens[idx]
        idx += 1
        return tok

    def atom(tok: str, at: int) -> Term:
        if tok == ")":
            raise TermSyntaxError("unexpected ')'", at)
        m = _SHIFT_NAME.match(tok)
        if m is not None:
            i = int(m.group(2)) if m.group(2) is not None else 0
            j = int(m.group(3)) if m.group(3) is not None else 0
            return Shift(m.group(1), i, j)
        if tok in abbrevs:
            return abbrevs[tok]
        return Lex(tok)

    def group() -> Term:
        tok, at = take()
        if tok != "(":
            return atom(tok, at)
        items: list[Term] = []
        while True:
            if idx >= len(tokens):
                raise TermSyntaxError("unclosed '('", at)
            if tokens[idx][0] == ")":
                take()
                break
            items.append(group())
        if not items:
            raise TermSyntaxError("empty application", at)
        term = items[0]
        for arg in items[1:]:
            term = App(term, arg)
        return term

    term = group()
    if idx != len(tokens):
        raise TermSyntaxError(f"trailing input {tokens[idx][0]!r}", tokens[idx][1])
    return term


def format_term(t: Term) -> str:
    match t:
        case Lex(name):
            return name
        case Shift(base, i, j):
            return f"{base}_{i}_{j}"
        case App():
            parts = []
            while isinstance(t, App):
                parts.append(t.arg)
                t = t.fn
            parts.append(t)
            return "(" + " ".join(format_term(p) for p in reversed(parts)) + ")"
    raise AssertionError(f"unhandled term {t!r}")


def term_size(t: Term) -> int:
    match t:
        case App(fn, arg):
            return 1 + term_size(fn) + term_size(arg)
        case _:
            return 1


def shift_terms_in(t: Term) -> list[Shift]:
    match t:
        case Shift():
            return [t]
        case App(fn, arg):
            return shift_terms_in(fn) + shift_terms_in(arg)
        case _:
            return []


# ---------------------------------------------------------------------------
# Inference


@dataclass
class TypedNode:
    """One node of the inferred typing skeleton.

    ``ty`` is expressed over session-fresh variables; it becomes ground only
    after a solution substitution (plus unit-defaulting of leftovers) is
    applied.  Leaves record how their polymorphic source type was renamed so
    the evaluator can recover, per solution, which concrete types the
    entry's own variables received.
    """

    term: Term
    ty: Type
    children: tuple["TypedNode", ...] = ()
    renaming: dict[int, int] | None = None  # entry/shift var id -> fresh id


@dataclass
class Elaboration:
    """A typing solution resolved to ground annotations."""

    root: "ResolvedNode"
    ty: Type


@dataclass
class ResolvedNode:
    term: Term
    ty: Type
    children: tuple["ResolvedNode", ...] = ()
    bindings: dict[int, Type] | None = None  # entry/shift var id -> ground type


def infer(term: Term, lexicon: "Lexicon", supply: VarSupply | None = None,
          max_index: int | None = None) -> tuple[TypedNode, list[Subst]]:
    """Build the typing skeleton and all solution substitutions."""
    supply = supply or VarSupply()

    def go(t: Term) -> tuple[TypedNode, list[Subst]]:
        match t:
            case Lex(name):
                entry = lexicon.get(name)
                if entry is None:
                    raise UnknownLexemeError(name)
                ty, renaming = _instantiate(entry.polytype, supply)
                return TypedNode(t, ty, (), renaming), [{}]
            case Shift(base, i, j):
                ty, sigma = shift_type(base, i, j, supply, max_index=max_index)
                # The split variable is recorded under the stable key 0.
                return TypedNode(t, ty, (), {0: sigma}), [{}]
            case App(fn, arg):
                fnode, fsols = go(fn)
                anode, asols = go(arg)
                rho = supply.fresh()
                node = TypedNode(t, rho, (fnode, anode))
                sols: list[Subst] = []
                for sf in fsols:
                    for sa in asols:
                        merged = dict(sf)
                        merged.update(sa)
                        want = Arrow(normalize(apply_subst(merged, anode.ty)), rho)
                        have = normalize(apply_subst(merged, fnode.ty))
                        for u in unify(have, want):
                            combined = dict(merged)
                            for k, v in u.items():
                                combined[k] = v
                            # Re-close the substitution so it stays idempotent.
                            combined = {
                                k: normalize(apply_subst(combined, v))
                                for k, v in combined.items()
                            }
                            sols.append(combined)
                return node, sols
        raise AssertionError(f"unhandled term {t!r}")

    return go(term)


def _instantiate(polytype: Type, supply: VarSupply) -> tuple[Type, dict[int, int]]:
    renaming = {v: supply.fresh() for v in sorted(var_ids(polytype))}
    return apply_subst({k: v for k, v in renaming.items()}, polytype), {
        k: v.id for k, v in renaming.items()
    }


def typecheck(term: Term, lexicon: "Lexicon", max_index: int | None = None) -> list[Type]:
    """Every canonical type derivable for ``term``; empty iff ill-typed.

    Types are deduplicated up to variable renaming, minimized (a type that is
    a substitution instance of another derivable type is dropped), and
    returned in canonical printed order.
    """
    node, sols = infer(term, lexicon, max_index=max_index)
    seen: dict[str, Type] = {}
    for s in sols:
        ty = normalize(apply_subst(s, node.ty))
        ty = apply_subst(canonical_renaming(ty), ty)
        seen.setdefault(format_type(ty), ty)
    keep: list[Type] = []
    for key, ty in sorted(seen.items()):
        redundant = False
        for key2, other in seen.items():
            if key2 == key:
                continue
            if _type_instance_of(ty, other):
                if not _type_instance_of(other, ty) or key2 < key:
                    redundant = True
                    break
        if not redundant:
            keep.append(ty)
    return keep


def _type_instance_of(specific: Type, general: Type) -> bool:
    """True if ``specific`` is a substitution instance of ``general``
    (canonically, so the output-collapsing isomorphisms count)."""
    supply = VarSupply(max(var_ids(specific) | var_ids(general) | {-1}) + 1)
    renamed, _ = _instantiate(general, supply)
    return bool(unify(renamed, specific, rigid=frozenset(var_ids(specific))))


def elaborate(term: Term, lexicon: "Lexicon", target: Type | None = None,
              max_index: int | None = None) -> list[Elaboration]:
    """Ground-annotated typings of ``term``.

    Leftover free variables in a solution are defaulted to the unit type,
    which is always admissible because nothing constrains them.  With
    ``target`` given, only solutions whose result type unifies with it are
    kept (the unifier is applied, so the annotations match the target).
    """
    supply = VarSupply()
    node, sols = infer(term, lexicon, supply=supply, max_index=max_index)
    out: list[Elaboration] = []
    seen: set[str] = set()
    for s in sols:
        candidates = [s]
        if target is not None:
            root_ty = normalize(apply_subst(s, node.ty))
            fresh_target, _ = _instantiate(normalize(target), supply)
            candidates = []
            for u in unify(root_ty, fresh_target):
                merged = dict(s)
                for k, v in u.items():
                    merged[k] = v
                merged = {k: normalize(apply_subst(merged, v)) for k, v in merged.items()}
                candidates.append(merged)
        for cand in candidates:
            resolved = resolve_skeleton(node, cand)
            key = format_type(resolved.ty, rename=False) + "//" + _bindings_key(resolved)
            if key not in seen:
                seen.add(key)
                out.append(Elaboration(resolved, resolved.ty))
    return out


def _bindings_key(node: ResolvedNode) -> str:
    parts = []
    if node.bindings:
        parts.append(",".join(f"{k}:{format_type(v, rename=False)}"
                              for k, v in sorted(node.bindings.items())))
    for c in node.children:
        parts.append(_bindings_key(c))
    return "|".join(parts)


def resolve_skeleton(node: TypedNode, s: Subst) -> ResolvedNode:
    """Apply a solution substitution to a typing skeleton, defaulting any
    leftover variables to the unit type."""

    def ground(t: Type) -> Type:
        t = normalize(apply_subst(s, t))
        leftovers = {v: UNIT for v in var_ids(t)}
        return normalize(apply_subst(leftovers, t)) if leftovers else t

    def go(n: TypedNode) -> ResolvedNode:
        bindings = None
        if n.renaming is not None:
            bindings = {orig: ground(Var(fresh)) for orig, fresh in n.renaming.items()}
        return ResolvedNode(n.term, ground(n.ty), tuple(go(c) for c in n.children), bindings)

    return go(node)

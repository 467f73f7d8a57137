"""Type-directed interpretation of combinator terms over finite models.

Evaluation is call-by-value and set-valued throughout: a term denotes a
finite set of values and application takes images.  Shift constants denote
single closures built from their defining formulas; the indexed families are
produced by wrapping the base closure with the value-level composition and
insertion operators.  Closures that pattern-match a referent block (the
``(s, v)`` parameter shapes) are built against the block's ground type taken
from the occurrence's typing, since the block may occupy zero, one, or
several spine slots once its type variable is instantiated.

Observations make results comparable and printable: a sentence type yields a
truth value, residual pronoun slots yield a table over the universe, and
produced referents yield the set of referent tuples (paired with sub-tables
when pronoun slots remain as well).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .combinators import App, Elaboration, Lex, ResolvedNode, Shift, Term, elaborate
from .lexicon import Lexicon, denote
from .model import Model
from .types import Arrow, E, In, Out, Type, UNIT, alpha_equal, format_type, normalize
from .values import (
    Atom,
    Closure,
    EvalError,
    InternalTypeError,
    Pair,
    Value,
    ValueSet,
    apply_values,
    join_out,
    sigma_value,
    singleton,
    split_out,
)

__all__ = [
    "Observation",
    "UnsupportedTypeError",
    "WrongTypeError",
    "denote_shift",
    "eval_elaboration",
    "eval_resolved",
    "eval_term",
    "observe",
    "tabulate",
    "truth",
]


class WrongTypeError(EvalError):
    pass


class UnsupportedTypeError(WrongTypeError):
    pass


def _closure(v: Value) -> Closure:
    if not isinstance(v, Closure):
        raise InternalTypeError(f"expected a function value, got {v!r}")
    return v


# ---------------------------------------------------------------------------
# Shift denotations


def _base_shift(base: str, sigma: Type) -> Closure:
    if base == "gIn":
        # f, v, s |-> f(v(s))
        def g_in(f: Value) -> ValueSet:
            fc = _closure(f)

            def lift(v: Value) -> ValueSet:
                vc = _closure(v)
                return singleton(Closure(lambda s: apply_values(singleton(fc), vc(s))))

            return singleton(Closure(lift))

        return Closure(g_in)

    if base == "gOut":
        # f, (s, v) |-> (s, f(v))
        def g_out(f: Value) -> ValueSet:
            fc = _closure(f)

            def lift(p: Value) -> ValueSet:
                comps, v = split_out(p, sigma)
                return frozenset(join_out(comps, r) for r in fc(v))

            return singleton(Closure(lift))

        return Closure(g_out)

    if base == "z":
        # f, v, (s, u) |-> f(v(s))((s, u)): bind a produced referent into v.
        def bind(f: Value) -> ValueSet:
            fc = _closure(f)

            def with_input(v: Value) -> ValueSet:
                vc = _closure(v)

                def at(p: Value) -> ValueSet:
                    comps, _u = split_out(p, sigma)
                    fed = vc(sigma_value(sigma, comps))
                    return apply_values(apply_values(singleton(fc), fed), singleton(p))

                return singleton(Closure(at))

            return singleton(Closure(with_input))

        return Closure(bind)

    if base == "s":
        # f, (s, u), v |-> f((s, u))(v(s)): the mirror-image binder.
        def bind_back(f: Value) -> ValueSet:
            fc = _closure(f)

            def at(p: Value) -> ValueSet:
                comps, _u = split_out(p, sigma)
                applied = apply_values(singleton(fc), singleton(p))

                def with_input(v: Value) -> ValueSet:
                    vc = _closure(v)
                    return apply_values(applied, vc(sigma_value(sigma, comps)))

                return singleton(Closure(with_input))

            return singleton(Closure(at))

        return Closure(bind_back)

    raise ValueError(f"unknown shift base {base!r}")


def _compose_step(g: Closure) -> Closure:
    # g |-> (f, v |-> g(f(v)))
    def lift(f: Value) -> ValueSet:
        fc = _closure(f)
        return singleton(Closure(lambda v: apply_values(singleton(g), fc(v))))

    return Closure(lift)


def _insert_step(g: Closure) -> Closure:
    # g |-> (f, v', x |-> g(v |-> f(v)(x))(v'))
    def lift(f: Value) -> ValueSet:
        fc = _closure(f)

        def outer(vp: Value) -> ValueSet:
            def inner(x: Value) -> ValueSet:
                h = Closure(lambda v: apply_values(fc(v), singleton(x)))
                return apply_values(
                    apply_values(singleton(g), singleton(h)), singleton(vp))

            return singleton(Closure(inner))

        return singleton(Closure(outer))

    return Closure(lift)


def denote_shift(base: str, i: int, j: int, sigma: Type) -> ValueSet:
    g = _base_shift(base, normalize(sigma))
    for _ in range(j):
        g = _insert_step(g)
    for _ in range(i):
        g = _compose_step(g)
    return singleton(g)


# ---------------------------------------------------------------------------
# Term evaluation


def absorb(vs: ValueSet) -> ValueSet:
    """Collapse a set of function values into one pointwise-union closure.

    Denotations at function-like types (plain functions and pronoun-awaiting
    meanings) are kept as singletons: the nondeterminism lives in a
    function's results, not in a choice between functions.  This is what
    makes a phrase like an indefinite-containing predicate denote one
    function with the referent choice inside it, so that a quantifier over
    it sees every choice (universal force) and an empty restriction yields a
    constant-empty function (vacuous truth) rather than an empty set that
    silently falsifies the sentence.
    """
    if len(vs) == 1:
        return vs
    closures = tuple(vs)
    for c in closures:
        if not isinstance(c, Closure):
            raise InternalTypeError(f"cannot absorb non-function value {c!r}")

    def union(v: Value) -> ValueSet:
        out: set[Value] = set()
        for c in closures:
            out |= c(v)
        return frozenset(out)

    return singleton(Closure(union))


def eval_resolved(node: ResolvedNode, model: Model, lexicon: Lexicon) -> ValueSet:
    match node.term:
        case Lex(name):
            entry = lexicon.get(name)
            if entry is None:
                raise InternalTypeError(f"unresolvable lexeme {name!r}")
            return denote(entry, model, node.bindings)
        case Shift(base, i, j):
            sigma = (node.bindings or {}).get(0, UNIT)
            return denote_shift(base, i, j, sigma)
        case App():
            fn = eval_resolved(node.children[0], model, lexicon)
            arg = eval_resolved(node.children[1], model, lexicon)
            out = apply_values(fn, arg)
            if isinstance(node.ty, (Arrow, In)):
                out = absorb(out)
            return out
    raise AssertionError(f"unhandled term {node.term!r}")


def eval_term(term: Term, ty: Type, model: Model, lexicon: Lexicon) -> ValueSet:
    """Evaluate ``term`` at canonical type ``ty`` (which must be derivable)."""
    want = normalize(ty)
    for el in elaborate(term, lexicon, target=want):
        if alpha_equal(el.ty, want):
            return eval_resolved(el.root, model, lexicon)
    raise WrongTypeError(
        f"term {term!r} does not have type {format_type(want)}")


def eval_elaboration(el: Elaboration, model: Model, lexicon: Lexicon) -> ValueSet:
    return eval_resolved(el.root, model, lexicon)


def truth(vs: ValueSet, ty: Type) -> bool:
    """Truth at the sentence type: nonempty is true, empty is false."""
    if normalize(ty) != UNIT:
        raise WrongTypeError(
            f"truth is only defined at type 1, not {format_type(ty)}")
    return bool(vs)


# ---------------------------------------------------------------------------
# Observation


@dataclass(frozen=True)
class Observation:
    """A canonical, comparison-friendly view of a value set.

    ``outs`` counts produced-referent slots and ``ins`` pending pronoun
    slots, all of individual type.  Payloads:

    - no slots: ``truth``
    - pronoun slots only: ``table`` over tuples of individuals
    - referent slots only: ``outputs``, the set of referent tuples
    - both: ``entries``, referent tuples each paired with a sub-table
    """

    ty: str
    outs: int
    ins: int
    truth: bool | None = None
    table: tuple[tuple[tuple[str, ...], bool], ...] | None = None
    outputs: tuple[tuple[str, ...], ...] | None = None
    entries: tuple[tuple[tuple[str, ...], tuple[tuple[tuple[str, ...], bool], ...]], ...] | None = None

    def as_truth(self) -> bool:
        """Collapse to a truth value; referent slots are read existentially."""
        if self.truth is not None:
            return self.truth
        if self.outputs is not None:
            return bool(self.outputs)
        raise WrongTypeError(f"no truth reading at type {self.ty}")

    def as_table(self, model: Model | None = None) -> dict[tuple[str, ...], bool]:
        """Collapse to a pronoun table; referent slots are read existentially.

        With ``model`` given the table covers every argument tuple, so an
        empty value set yields an all-false table rather than no rows.
        """
        if self.table is not None:
            return dict(self.table)
        if self.entries is not None:
            out: dict[tuple[str, ...], bool] = {}
            if model is not None:
                for args in itertools.product(model.universe, repeat=self.ins):
                    out[args] = False
            for _refs, sub in self.entries:
                for args, tv in sub:
                    out[args] = out.get(args, False) or tv
            return out
        raise WrongTypeError(f"no table reading at type {self.ty}")

    def to_json(self) -> dict:
        data: dict = {"type": self.ty}
        if self.truth is not None:
            data["truth"] = self.truth
        if self.table is not None:
            data["table"] = [{"args": list(a), "truth": t} for a, t in self.table]
        if self.outputs is not None:
            data["outputs"] = [list(o) for o in self.outputs]
        if self.entries is not None:
            data["entries"] = [
                {"outputs": list(refs),
                 "table": [{"args": list(a), "truth": t} for a, t in sub]}
                for refs, sub in self.entries
            ]
        return data


def _residues(ty: Type) -> tuple[int, int]:
    """Count leading referent and pronoun slots; insist they are individuals
    over a sentence core."""
    t = normalize(ty)
    outs = 0
    while isinstance(t, Out):
        if t.ref != E:
            raise UnsupportedTypeError(f"cannot observe referents of type {format_type(t.ref)}")
        outs += 1
        t = t.body
    ins = 0
    while isinstance(t, In):
        if t.ante != E:
            raise UnsupportedTypeError(f"cannot observe inputs of type {format_type(t.ante)}")
        ins += 1
        t = t.body
    if t != UNIT:
        raise UnsupportedTypeError(f"cannot observe type {format_type(ty)}")
    return outs, ins


def _chain_table(vs: ValueSet, ins: int, model: Model):
    rows = []
    for args in itertools.product(model.universe, repeat=ins):
        current = vs
        for a in args:
            current = apply_values(current, singleton(Atom(a)))
        rows.append((args, bool(current)))
    return tuple(rows)


def _atom_name(v: Value) -> str:
    if not isinstance(v, Atom):
        raise InternalTypeError(f"expected an individual referent, got {v!r}")
    return v.name


def observe(vs: ValueSet, ty: Type, model: Model) -> Observation:
    """Expand a value set into its observable content at a reading type."""
    outs, ins = _residues(ty)
    shown = format_type(ty)
    if outs == 0 and ins == 0:
        return Observation(shown, 0, 0, truth=bool(vs))
    if outs == 0:
        return Observation(shown, 0, ins, table=_chain_table(vs, ins, model))
    refs_seen: set = set()
    for v in vs:
        comps: list[Value] = []
        for _ in range(outs):
            if not isinstance(v, Pair):
                raise InternalTypeError(f"expected a referent pair, got {v!r}")
            comps.append(v.first)
            v = v.second
        names = tuple(_atom_name(c) for c in comps)
        if ins == 0:
            refs_seen.add(names)
        else:
            refs_seen.add((names, _chain_table(singleton(v), ins, model)))
    if ins == 0:
        return Observation(shown, outs, 0, outputs=tuple(sorted(refs_seen)))
    return Observation(shown, outs, ins, entries=tuple(sorted(refs_seen)))


def probe_signature(vs: ValueSet, ty: Type, model: Model):
    """A hashable, order-insensitive digest of observable behaviour.

    Unlike ``observe`` this handles arbitrary interleavings of referent and
    pronoun slots over the sentence type, which is what extensional
    deduplication of derivations needs.  Raises ``UnsupportedTypeError``
    for residues that are not chains of individuals.
    """
    t = normalize(ty)
    if t == UNIT:
        return bool(vs)
    if isinstance(t, In) and t.ante == E:
        return (
            "in",
            tuple(
                probe_signature(apply_values(vs, singleton(Atom(a))), t.body, model)
                for a in model.universe
            ),
        )
    if isinstance(t, Out) and t.ref == E:
        seen = set()
        for v in vs:
            if not isinstance(v, Pair):
                raise InternalTypeError(f"expected a referent pair, got {v!r}")
            seen.add((_atom_name(v.first),
                      probe_signature(singleton(v.second), t.body, model)))
        return ("out", tuple(sorted(seen)))
    raise UnsupportedTypeError(f"cannot observe type {format_type(ty)}")


def tabulate(vs: ValueSet, ty: Type, model: Model) -> dict:
    """Truth table over pending pronoun slots, as a JSON-ready dict.

    Only the pure cases are supported here: the sentence type, or a chain of
    individual-type pronoun slots over it.  Use ``observe`` for readings
    that also carry produced referents.
    """
    t = normalize(ty)
    outs, ins = _residues(t)
    if outs:
        raise UnsupportedTypeError(
            f"tabulate does not handle produced referents; observe {format_type(t)} instead")
    obs = observe(vs, t, model)
    if ins == 0:
        return {"type": obs.ty, "truth": obs.truth}
    return {"type": obs.ty, "table": [{"args": list(a), "truth": b} for a, b in obs.table]}

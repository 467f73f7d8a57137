"""Lexical entries: names paired with polymorphic types and denotations.

The built-in core covers the function words the calculus needs: the
referent-introducing indefinite, the universal and negative quantifiers, the
subject relativizer, identity pronouns, and discourse concatenation.  Content
words (predicates and relations) are declared in a lexicon file and looked up
in whatever model evaluation runs against.

Quantifier denotations never enumerate a function space: the block of
referents a restrictor produces is read off the values it actually returns,
so evaluation stays polynomial in the size of the universe.

Lexicon file format: one declaration per line, ``pred <name>`` or
``rel <name>``, with ``#`` comments.  Built-ins cannot be redeclared.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

from .model import Model
from .types import Arrow, E, In, Out, Type, UNIT, Var, format_type
from .values import (
    Atom,
    Closure,
    EMPTY,
    InternalTypeError,
    Pair,
    STAR,
    TRUE,
    Value,
    ValueSet,
    join_out,
    singleton,
    split_out,
)


class LexiconError(Exception):
    pass


class DuplicateNameError(LexiconError):
    def __init__(self, name: str, line: int) -> None:
        super().__init__(f"duplicate declaration of {name!r} on line {line}")


class OverrideError(LexiconError):
    def __init__(self, name: str, line: int) -> None:
        super().__init__(f"cannot override built-in {name!r} on line {line}")


class LexiconParseError(LexiconError):
    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"{message} on line {line}")


@dataclass(frozen=True)
class LexEntry:
    name: str
    polytype: Type
    kind: str
    ref: str | None = None        # model predicate/relation name
    roles: dict[str, int] = field(default_factory=dict, compare=False)

    def describe(self) -> str:
        return f"{self.name} : {format_type(self.polytype)}"


# Role variables are fixed small ids local to each entry's polytype; they are
# renamed apart at every use during inference.
_S0, _S1, _S2 = Var(0), Var(1), Var(2)

_RESTRICTOR = Arrow(Out(E, E), Out(_S0, UNIT))  # takes entity-plus-self, keeps a block

INDEFINITE = LexEntry(
    "a", Arrow(_RESTRICTOR, Out(_S0, E)), "indefinite", roles={"out": 0})
INDEFINITE_BARE = LexEntry(
    "a", Arrow(Arrow(E, UNIT), E), "indefinite-bare")
UNIVERSAL = LexEntry(
    "every",
    Arrow(_RESTRICTOR, Arrow(Arrow(Out(_S0, E), Out(_S1, UNIT)), UNIT)),
    "universal", roles={"out": 0, "out2": 1})
NEGATIVE = LexEntry(
    "no",
    Arrow(_RESTRICTOR, Arrow(Arrow(Out(_S0, E), Out(_S1, UNIT)), UNIT)),
    "negative", roles={"out": 0, "out2": 1})
RELATIVE = LexEntry(
    "who",
    Arrow(
        Arrow(Out(_S1, E), Out(_S2, UNIT)),
        Arrow(
            Arrow(Out(_S0, E), Out(_S1, UNIT)),
            Arrow(Out(_S0, E), Out(_S2, UNIT)),
        ),
    ),
    "relative", roles={"s1": 0, "s2": 1, "s3": 2})
CONCAT = LexEntry("seq", Arrow(UNIT, Arrow(UNIT, UNIT)), "concat")


def _pronoun(name: str) -> LexEntry:
    return LexEntry(name, In(E, E), "pronoun")


def builtin_entries(bare_indefinite: bool = False) -> dict[str, LexEntry]:
    entries = [
        INDEFINITE_BARE if bare_indefinite else INDEFINITE,
        UNIVERSAL,
        NEGATIVE,
        RELATIVE,
        _pronoun("he"),
        _pronoun("she"),
        _pronoun("it"),
        CONCAT,
    ]
    return {e.name: e for e in entries}


@dataclass(frozen=True)
class Lexicon:
    entries: dict[str, LexEntry]

    def get(self, name: str) -> LexEntry | None:
        return self.entries.get(name)

    def lookup_surface(self, word: str) -> LexEntry | None:
        """Resolve a surface word: exact entry first, then object-case
        pronouns, then the bare present stripped of its final ``s``
        (``owns`` resolves to ``own``)."""
        entry = self.entries.get(word)
        if entry is None:
            entry = self.entries.get({"him": "he", "her": "she"}.get(word, word))
        if entry is None and word.endswith("s"):
            entry = self.entries.get(word[:-1])
        return entry

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def model_names(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        preds = tuple(sorted(e.ref for e in self.entries.values() if e.kind == "pred"))
        rels = tuple(sorted(e.ref for e in self.entries.values() if e.kind == "rel"))
        return preds, rels

    @staticmethod
    def core(bare_indefinite: bool = False) -> "Lexicon":
        return Lexicon(builtin_entries(bare_indefinite))

    def with_words(self, preds: list[str] = (), rels: list[str] = ()) -> "Lexicon":
        entries = dict(self.entries)
        for p in preds:
            entries[p] = LexEntry(p, Arrow(E, UNIT), "pred", ref=p)
        for r in rels:
            entries[r] = LexEntry(r, Arrow(E, Arrow(E, UNIT)), "rel", ref=r)
        return Lexicon(entries)


_NAME = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


def parse_lexicon(text: str, bare_indefinite: bool = False) -> Lexicon:
    entries = dict(builtin_entries(bare_indefinite))
    builtins = set(entries)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or parts[0] not in ("pred", "rel"):
            raise LexiconParseError(f"expected 'pred <name>' or 'rel <name>', got {line!r}", lineno)
        kind, name = parts
        if not _NAME.match(name):
            raise LexiconParseError(f"bad name {name!r}", lineno)
        if name in builtins:
            raise OverrideError(name, lineno)
        if name in entries:
            raise DuplicateNameError(name, lineno)
        if kind == "pred":
            entries[name] = LexEntry(name, Arrow(E, UNIT), "pred", ref=name)
        else:
            entries[name] = LexEntry(name, Arrow(E, Arrow(E, UNIT)), "rel", ref=name)
    return Lexicon(entries)


def load_lexicon(path: str, bare_indefinite: bool = False) -> Lexicon:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_lexicon(fh.read(), bare_indefinite)


def default_lexicon() -> Lexicon:
    """The shipped fixture lexicon (see data/donkey.lex)."""
    from importlib.resources import files

    return parse_lexicon(files("donkeykit.data").joinpath("donkey.lex").read_text())


# ---------------------------------------------------------------------------
# Denotations


def _as_closure(v: Value, role: str) -> Closure:
    if not isinstance(v, Closure):
        raise InternalTypeError(f"{role} argument is not a function value: {v!r}")
    return v


def _atom_name(v: Value) -> str:
    if not isinstance(v, Atom):
        raise InternalTypeError(f"expected an individual, got {v!r}")
    return v.name


def denote(entry: LexEntry, model: Model, bindings: dict[int, Type] | None = None) -> ValueSet:
    """The entry's value set over ``model``.

    ``bindings`` gives the ground types this occurrence's role variables
    received; they steer how referent blocks are split off result values.
    Unconstrained roles default to the unit (an empty block).
    """
    bindings = bindings or {}

    def role(name: str) -> Type:
        return bindings.get(entry.roles.get(name, -1), UNIT)

    if entry.kind == "pred":
        ext = model.pred(entry.ref)
        return singleton(Closure(lambda v: TRUE if _atom_name(v) in ext else EMPTY))

    if entry.kind == "rel":
        ext = model.rel(entry.ref)

        def first(obj: Value) -> ValueSet:
            o = _atom_name(obj)
            return singleton(Closure(lambda subj: TRUE if (_atom_name(subj), o) in ext else EMPTY))

        return singleton(Closure(first))

    if entry.kind == "pronoun":
        return singleton(Closure(lambda v: singleton(v)))

    if entry.kind == "concat":
        return singleton(Closure(lambda _a: singleton(Closure(lambda _b: TRUE))))

    if entry.kind == "indefinite-bare":
        def pick(p: Value) -> ValueSet:
            pc = _as_closure(p, "restrictor")
            return frozenset(
                Atom(name) for name in model.universe if pc(Atom(name))
            )

        return singleton(Closure(pick))

    if entry.kind == "indefinite":
        sigma = role("out")

        def pick_out(p: Value) -> ValueSet:
            pc = _as_closure(p, "restrictor")
            out: set[Value] = set()
            for name in model.universe:
                v = Atom(name)
                for r in pc(Pair(v, v)):
                    comps, _star = split_out(r, sigma)
                    out.add(join_out(comps, v))
            return frozenset(out)

        return singleton(Closure(pick_out))

    if entry.kind in ("universal", "negative"):
        sigma = role("out")
        negative = entry.kind == "negative"

        def with_restrictor(p: Value) -> ValueSet:
            pc = _as_closure(p, "restrictor")

            def with_scope(q: Value) -> ValueSet:
                qc = _as_closure(q, "scope")
                witnessed = False
                for name in model.universe:
                    v = Atom(name)
                    for r in pc(Pair(v, v)):
                        comps, _star = split_out(r, sigma)
                        if qc(join_out(comps, v)):
                            witnessed = True
                        elif not negative:
                            return EMPTY
                if negative:
                    return EMPTY if witnessed else TRUE
                return TRUE

            return singleton(Closure(with_scope))

        return singleton(Closure(with_restrictor))

    if entry.kind == "relative":
        s1, s2 = role("s1"), role("s2")

        def with_property(p: Value) -> ValueSet:
            pc = _as_closure(p, "relative clause")

            def with_noun(q: Value) -> ValueSet:
                qc = _as_closure(q, "head noun")

                def at(arg: Value) -> ValueSet:
                    _comps, v = split_out(arg, s1)
                    out: set[Value] = set()
                    for r in qc(arg):
                        comps2, _star = split_out(r, s2)
                        out |= pc(join_out(comps2, v))
                    return frozenset(out)

                return singleton(Closure(at))

            return singleton(Closure(with_noun))

        return singleton(Closure(with_property))

    raise LexiconError(f"no denotation for entry kind {entry.kind!r}")

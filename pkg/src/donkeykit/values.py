"""Semantic values for the set-valued interpreter.

Every phrase denotes a finite set of values (nondeterminism is the powerset
lifting), so application is the image of the argument set under the function
set: ``apply_values(f, x)`` is the union of ``c(v)`` for every closure ``c``
in ``f`` and value ``v`` in ``x``.  Truth values are the two subsets of the
one-point set: the empty set is false, ``{*}`` is true.

Values at output types are right-nested pairs that mirror the canonical
output spine; the helpers here split and rebuild such values against the
(ground) type of the referent block, including the degenerate cases where
the block is the unit (no pair at all) or a product (several spine slots).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

from .types import Prod, Type, UNIT, out_arity


class EvalError(Exception):
    pass


class InternalTypeError(EvalError):
    """An invariant violation: evaluation ran on a badly typed value."""


@dataclass(frozen=True)
class Value:
    pass


@dataclass(frozen=True)
class Atom(Value):
    name: str


class _Star(Value):
    _instance: "_Star | None" = None

    def __new__(cls) -> "_Star":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "*"


STAR = _Star()


@dataclass(frozen=True)
class Pair(Value):
    first: Value
    second: Value


_closure_serial = itertools.count()
closure_constructions = 0


class Closure(Value):
    """A single function value; equality and hashing are by identity.

    Extensional duplicates can therefore coexist inside a set, which is
    harmless: truth is only ever read off sets of pair-free values, where
    structural equality deduplicates.
    """

    __slots__ = ("fn", "serial")

    def __init__(self, fn: Callable[[Value], "ValueSet"]) -> None:
        global closure_constructions
        closure_constructions += 1
        self.fn = fn
        self.serial = next(_closure_serial)

    def __call__(self, v: Value) -> "ValueSet":
        return self.fn(v)

    def __eq__(self, other: object) -> bool:
        return self is other

    def __hash__(self) -> int:
        return hash(self.serial)

    def __repr__(self) -> str:
        return f"<closure #{self.serial}>"


ValueSet = frozenset

EMPTY: ValueSet = frozenset()
TRUE: ValueSet = frozenset({STAR})


def singleton(v: Value) -> ValueSet:
    return frozenset({v})


def apply_values(fs: ValueSet, xs: ValueSet) -> ValueSet:
    """Call-by-value nondeterministic application: the image of xs under fs."""
    out: set[Value] = set()
    for c in fs:
        if not isinstance(c, Closure):
            raise InternalTypeError(f"cannot apply non-function value {c!r}")
        for v in xs:
            out |= c(v)
    return frozenset(out)


def value_sort_key(v: Value):
    match v:
        case Atom(name):
            return (0, name)
        case _Star():
            return (1,)
        case Pair(a, b):
            return (2, value_sort_key(a), value_sort_key(b))
        case Closure():
            return (3, v.serial)
    raise AssertionError(f"unhandled value {v!r}")


def sorted_values(vs: ValueSet) -> list[Value]:
    return sorted(vs, key=value_sort_key)


def split_out(v: Value, sigma: Type) -> tuple[list[Value], Value]:
    """Peel the referent block of type ``sigma`` off an output-spine value."""
    comps: list[Value] = []
    for _ in range(out_arity(sigma)):
        if not isinstance(v, Pair):
            raise InternalTypeError(f"expected a pair while splitting {v!r}")
        comps.append(v.first)
        v = v.second
    return comps, v


def join_out(comps: list[Value], rest: Value) -> Value:
    for c in reversed(comps):
        rest = Pair(c, rest)
    return rest


def sigma_value(sigma: Type, comps: list[Value]) -> Value:
    """Reassemble spine components into a single value of type ``sigma``.

    Unit positions, which own no spine slot, are refilled with the star so
    the value mirrors the type's product shape exactly.
    """
    it = iter(comps)

    def build(t: Type) -> Value:
        if t == UNIT:
            return STAR
        if isinstance(t, Prod):
            first = build(t.left)
            return Pair(first, build(t.right))
        return next(it)

    out = build(sigma)
    leftover = list(it)
    if leftover:
        raise InternalTypeError(f"too many components for {sigma!r}: {leftover!r}")
    return out

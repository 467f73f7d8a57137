"""Finite first-order models: a universe plus predicate and relation extensions.

This module has no dependencies on the rest of the package so the brute-force
truth-condition checkers can be written against it without sharing any
evaluation machinery with the combinator engine.

JSON format::

    {"universe": ["u1", "u2"],
     "pred": {"man": ["u1"]},
     "rel": {"own": [["u1", "u2"]]}}
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field


class ModelError(Exception):
    pass


@dataclass(frozen=True)
class Model:
    universe: tuple[str, ...]
    predicates: dict[str, frozenset[str]] = field(default_factory=dict)
    relations: dict[str, frozenset[tuple[str, str]]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.universe:
            raise ModelError("universe must be nonempty")
        if len(set(self.universe)) != len(self.universe):
            raise ModelError("universe names must be unique")
        dom = set(self.universe)
        for name, ext in self.predicates.items():
            if not ext <= dom:
                raise ModelError(f"predicate {name!r} extension outside the universe")
        for name, ext in self.relations.items():
            for a, b in ext:
                if a not in dom or b not in dom:
                    raise ModelError(f"relation {name!r} extension outside the universe")

    def pred(self, name: str) -> frozenset[str]:
        if name not in self.predicates:
            raise MissingPredicateError(name)
        return self.predicates[name]

    def rel(self, name: str) -> frozenset[tuple[str, str]]:
        if name not in self.relations:
            raise MissingPredicateError(name)
        return self.relations[name]

    def to_json(self) -> dict:
        return {
            "universe": list(self.universe),
            "pred": {k: sorted(v) for k, v in sorted(self.predicates.items())},
            "rel": {k: [list(p) for p in sorted(v)] for k, v in sorted(self.relations.items())},
        }

    @staticmethod
    def from_json(data: dict) -> "Model":
        return Model(
            universe=tuple(data["universe"]),
            predicates={k: frozenset(v) for k, v in data.get("pred", {}).items()},
            relations={k: frozenset(tuple(p) for p in v) for k, v in data.get("rel", {}).items()},
        )


class MissingPredicateError(ModelError):
    def __init__(self, name: str) -> None:
        super().__init__(f"model does not define {name!r}")
        self.name = name


def load_model(path: str) -> Model:
    with open(path, "r", encoding="utf-8") as fh:
        return Model.from_json(json.load(fh))


def canonical_universe(size: int) -> tuple[str, ...]:
    return tuple(f"u{i + 1}" for i in range(size))


def random_model(preds: tuple[str, ...], rels: tuple[str, ...], size: int,
                 rng: random.Random) -> Model:
    universe = canonical_universe(size)
    predicates = {
        p: frozenset(u for u in universe if rng.getrandbits(1)) for p in preds
    }
    relations = {
        r: frozenset((a, b) for a in universe for b in universe if rng.getrandbits(1))
        for r in rels
    }
    return Model(universe, predicates, relations)

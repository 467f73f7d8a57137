"""Brute-force first-order truth conditions and model enumeration.

Each shipped sentence comes with a hand-written evaluator that quantifies
directly over a model's universe.  These share no code with the combinator
engine (this module depends only on the model structures), so agreement
between the two on exhaustive or randomized model suites is meaningful
evidence that the engine computes the intended truth conditions.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .model import Model, canonical_universe, random_model

Table = dict[tuple[str, ...], bool]


class OracleError(Exception):
    pass


class SizeOverflowError(OracleError):
    def __init__(self, total: int, cap: int) -> None:
        super().__init__(
            f"exhaustive enumeration would visit {total} models (cap {cap}); "
            "use random mode instead")
        self.total = total


class ShapeMismatchError(OracleError):
    pass


@dataclass(frozen=True)
class SentenceSpec:
    """A test sentence, its reading, and its independent truth condition.

    ``golden_term`` names the intended derivation among those the search
    produces for ``discourse``; the same type can host several pronoun
    resolutions, so the reading is pinned by term, not only by type.
    """

    id: str
    reading: str  # "truth" or "table"
    preds: tuple[str, ...]
    rels: tuple[str, ...]
    discourse: str
    target_type: str | None
    golden_term: str
    fo: Callable[[Model], bool | Table]
    description: str

    @property
    def signature(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        return self.preds, self.rels


def _fo_a_man_whistles_bound(m: Model) -> bool:
    man, witp, whistle = m.pred("man"), m.pred("witp"), m.pred("whistle")
    return any(x in man and x in witp and x in whistle for x in m.universe)


def _fo_a_man_whistles_free(m: Model) -> Table:
    man, witp, whistle = m.pred("man"), m.pred("witp"), m.pred("whistle")
    first = any(x in man and x in witp for x in m.universe)
    return {(y,): first and y in whistle for y in m.universe}


def _fo_donkey_universal(m: Model) -> bool:
    farmer, donkey = m.pred("farmer"), m.pred("donkey")
    own, beat = m.rel("own"), m.rel("beat")
    return all(
        (x, y) in beat
        for x in m.universe
        if x in farmer
        for y in m.universe
        if y in donkey and (x, y) in own
    )


def _fo_no_girl_walks_she_talks(m: Model) -> Table:
    girl, walk, talk = m.pred("girl"), m.pred("walk"), m.pred("talk")
    first = not any(x in girl and x in walk for x in m.universe)
    return {(y,): first and y in talk for y in m.universe}


def _fo_a_girl_walks_she_talks(m: Model) -> bool:
    girl, walk, talk = m.pred("girl"), m.pred("walk"), m.pred("talk")
    return any(x in girl and x in walk and x in talk for x in m.universe)


SENTENCE_SPECS: dict[str, SentenceSpec] = {
    spec.id: spec
    for spec in [
        SentenceSpec(
            "a-man-whistles-bound", "truth",
            ("man", "witp", "whistle"), (),
            "[[a man] [witp]] . [[he] [whistles]]",
            "e |x 1",
            "(z_0_0 (gOut_1_0 seq) (gIn_0_0 whistle he)"
            " (gOut_0_0 witp (a (gOut_0_0 man))))",
            _fo_a_man_whistles_bound,
            "two-sentence discourse, pronoun bound by the indefinite",
        ),
        SentenceSpec(
            "a-man-whistles-free", "table",
            ("man", "witp", "whistle"), (),
            "[[a man] [witp]] . [[he] [whistles]]",
            "e |x e |> 1",
            "(gOut_1_0 (gIn_0_1 seq) (gIn_0_0 whistle he)"
            " (gOut_0_0 witp (a (gOut_0_0 man))))",
            _fo_a_man_whistles_free,
            "same discourse, pronoun left free (tabulated per antecedent)",
        ),
        SentenceSpec(
            "donkey-universal", "truth",
            ("farmer", "donkey"), ("own", "beat"),
            "[[every [farmer [who [owns [a donkey]]]]] [beats it]]",
            "1",
            "(every (who (gOut_1_0 (gOut_0_1 own) (a (gOut_0_0 donkey)))"
            " (gOut_0_0 farmer)) (gOut_1_0 (z_0_0 (gOut_1_0 beat)) it))",
            _fo_donkey_universal,
            "donkey sentence, universal force over owned donkeys",
        ),
        SentenceSpec(
            "no-girl-walks-she-talks", "table",
            ("girl", "walk", "talk"), (),
            "[[no girl] [walks]] . [[she] [talks]]",
            "e |> 1",
            "(gIn_0_1 seq (gIn_0_0 talk she)"
            " (no (gOut_0_0 girl) (gOut_0_0 walk)))",
            _fo_no_girl_walks_she_talks,
            "negative quantifier leaves the follow-up pronoun undischarged",
        ),
        SentenceSpec(
            "a-girl-walks-she-talks", "truth",
            ("girl", "walk", "talk"), (),
            "[[a girl] [walks]] . [[she] [talks]]",
            "e |x 1",
            "(z_0_0 (gOut_1_0 seq) (gIn_0_0 talk she)"
            " (gOut_0_0 walk (a (gOut_0_0 girl))))",
            _fo_a_girl_walks_she_talks,
            "minimal pair: the indefinite does discharge the pronoun",
        ),
    ]
}


def fo_truth(spec: SentenceSpec, model: Model) -> bool | Table:
    """Evaluate the spec's hand-coded first-order condition."""
    return spec.fo(model)


# ---------------------------------------------------------------------------
# Model enumeration

EXHAUSTIVE_CAP = 10_000_000


def count_models(pred_count: int, rel_count: int, max_size: int) -> int:
    total = 0
    for k in range(1, max_size + 1):
        total += 2 ** (k * pred_count) * 2 ** (k * k * rel_count)
    return total


def _subsets(items: tuple[str, ...]) -> Iterator[frozenset]:
    for mask in range(2 ** len(items)):
        yield frozenset(x for i, x in enumerate(items) if mask >> i & 1)


def enumerate_models(
    preds: tuple[str, ...],
    rels: tuple[str, ...],
    max_size: int,
    random_count: int | None = None,
    seed: int = 0,
    cap: int = EXHAUSTIVE_CAP,
) -> Iterator[Model]:
    """Stream models over the signature.

    Exhaustive mode (``random_count`` None) yields every model over
    universes of size 1..max_size with canonical individual names, guarded
    by ``cap``.  Random mode yields ``random_count`` seeded models, all of
    size exactly ``max_size``; the stream is reproducible per seed.
    """
    if max_size < 1:
        raise OracleError("max_size must be at least 1")
    if random_count is not None:
        rng = random.Random(seed)
        for _ in range(random_count):
            yield random_model(preds, rels, max_size, rng)
        return
    total = count_models(len(preds), len(rels), max_size)
    if total > cap:
        raise SizeOverflowError(total, cap)
    for k in range(1, max_size + 1):
        universe = canonical_universe(k)
        pairs = tuple(itertools.product(universe, universe))
        pred_choices = [list(_subsets(universe)) for _ in preds]
        rel_choices = [
            [frozenset(c) for c in _subsets(pairs)] for _ in rels
        ]
        for pred_ext in itertools.product(*pred_choices):
            for rel_ext in itertools.product(*rel_choices):
                yield Model(
                    universe,
                    dict(zip(preds, pred_ext)),
                    dict(zip(rels, rel_ext)),
                )


# ---------------------------------------------------------------------------
# Engine-versus-oracle comparison


@dataclass(frozen=True)
class CompareReport:
    checked: int
    mismatch_count: int
    mismatches: tuple[dict, ...]  # capped sample, sorted by model
    vacuous: bool

    @property
    def passed(self) -> bool:
        return self.mismatch_count == 0 and not self.vacuous

    def to_json(self) -> dict:
        return {
            "checked": self.checked,
            "vacuous": self.vacuous,
            "mismatch_count": self.mismatch_count,
            "mismatches": list(self.mismatches),
        }


def _table_json(table: Table) -> list[dict]:
    return [
        {"args": list(args), "truth": truth}
        for args, truth in sorted(table.items())
    ]


def compare(
    spec: SentenceSpec,
    engine: Callable[[Model], bool | Table],
    models: Iterable[Model],
    limit_mismatches: int = 20,
) -> CompareReport:
    """Run engine and oracle over every model and report disagreements.

    ``engine`` maps a model to a truth value or to a full antecedent table,
    matching the spec's reading shape.
    """
    checked = 0
    mismatch_count = 0
    mismatches: list[dict] = []
    for model in models:
        checked += 1
        got = engine(model)
        want = spec.fo(model)
        if isinstance(want, dict) != isinstance(got, dict):
            raise ShapeMismatchError(
                f"engine produced {type(got).__name__}, oracle {type(want).__name__}")
        if got != want:
            mismatch_count += 1
            if len(mismatches) < limit_mismatches:
                mismatches.append({
                    "model": model.to_json(),
                    "engine": _table_json(got) if isinstance(got, dict) else got,
                    "oracle": _table_json(want) if isinstance(want, dict) else want,
                })
    ordered = tuple(sorted(mismatches, key=lambda m: str(sorted(m["model"].items()))))
    return CompareReport(checked, mismatch_count, ordered, checked == 0)

"""Wiring between the combinator engine and the first-order checkers.

A sentence spec names a discourse and a reading type; here we search for the
corresponding derivation, resolve it once, and produce a per-model evaluator
whose output shape (truth value or antecedent table) matches the spec, with
produced referents projected existentially.
"""

from __future__ import annotations

from typing import Callable, Iterable

from .combinators import format_term, parse_term
from .derivation import Derivation, SearchBounds, parse_discourse, search_derivations
from .evaluator import eval_resolved, observe
from .lexicon import Lexicon, default_lexicon
from .model import Model
from .oracle import CompareReport, SentenceSpec, Table, compare, enumerate_models
from .types import parse_type


class CheckError(Exception):
    pass


def engine_reading(
    spec: SentenceSpec,
    lexicon: Lexicon,
    bounds: SearchBounds = SearchBounds(),
) -> tuple[Derivation, Callable[[Model], bool | Table]]:
    """The spec's derivation plus a model-level evaluator for it.

    The search must actually find the spec's golden term: one surface type
    can host several pronoun resolutions, so selection is by term.
    """
    tree = parse_discourse(spec.discourse)
    target = parse_type(spec.target_type) if spec.target_type else None
    derivations = search_derivations(tree, lexicon, bounds, target=target, dedup=False)
    if not derivations:
        raise CheckError(
            f"no derivation of {spec.discourse!r} at type {spec.target_type!r}")
    want = format_term(parse_term(spec.golden_term))
    by_term = {format_term(d.term): d for d in derivations}
    derivation = by_term.get(want)
    if derivation is None:
        raise CheckError(
            f"search did not produce the expected reading {want} "
            f"for {spec.discourse!r}; found {sorted(by_term)}")
    resolved = derivation.resolved()

    def engine(model: Model) -> bool | Table:
        obs = observe(eval_resolved(resolved, model, lexicon), resolved.ty, model)
        return obs.as_table(model) if spec.reading == "table" else obs.as_truth()

    return derivation, engine


def run_check(
    spec: SentenceSpec,
    lexicon: Lexicon | None = None,
    bounds: SearchBounds = SearchBounds(),
    max_size: int = 2,
    random_count: int | None = None,
    seed: int = 0,
    models: Iterable[Model] | None = None,
) -> CompareReport:
    """Compare the engine against the spec's truth condition over a suite."""
    lexicon = lexicon or default_lexicon()
    _derivation, engine = engine_reading(spec, lexicon, bounds)
    if models is None:
        models = enumerate_models(
            spec.preds, spec.rels, max_size, random_count=random_count, seed=seed)
    return compare(spec, engine, models)

"""Bounded search over shift decorations of a bracketed sentence.

The search space at each binary node: either child may act as the applying
function, and each child may first be wrapped in a chain of indexed shift
constants (the combined chain length at one node is capped).  Every candidate
is kept only if it unifies, so ill-shaped decorations are pruned immediately.
Word-order effects enter only through the fixed bracketing and through the
argument order of the binding shifts, which is the mechanism behind the
crossover and accessibility predictions.

Discourses are folded into a single tree before searching: ``S1 . S2``
becomes ``[[seq S2] S1]``, since the concatenation constant takes the later
fragment first.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .combinators import (
    App,
    Lex,
    Shift,
    Term,
    TermSyntaxError,
    TypedNode,
    UnknownLexemeError,
    format_term,
    resolve_skeleton,
    shift_terms_in,
    term_size,
)
from .evaluator import UnsupportedTypeError, eval_resolved, probe_signature
from .lexicon import Lexicon
from .model import random_model
from .types import (
    Arrow,
    Base,
    In,
    Out,
    Prod,
    Subst,
    Type,
    VarSupply,
    apply_subst,
    canonical_renaming,
    format_type,
    normalize,
    roots_may_unify,
    shift_type,
    unify,
    var_ids,
)


class SearchError(Exception):
    pass


class SearchBudgetExceeded(SearchError):
    def __init__(self, budget: int) -> None:
        super().__init__(f"derivation search exceeded its budget of {budget} candidates")


@dataclass(frozen=True)
class Leaf:
    word: str


@dataclass(frozen=True)
class Node:
    left: "Leaf | Node"
    right: "Leaf | Node"


SyntaxTree = Leaf | Node


def leaves(tree: SyntaxTree) -> list[str]:
    match tree:
        case Leaf(word):
            return [word]
        case Node(left, right):
            return leaves(left) + leaves(right)
    raise AssertionError


def format_tree(tree: SyntaxTree) -> str:
    match tree:
        case Leaf(word):
            return word
        case Node(left, right):
            return f"[{format_tree(left)} {format_tree(right)}]"
    raise AssertionError


def parse_sentence(text: str) -> SyntaxTree:
    """Parse one bracketed sentence, e.g. ``[[a man] [witp]]``.

    Brackets hold one or two parts; single words need no brackets.
    """
    pos = 0

    def skip_ws() -> None:
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def part() -> SyntaxTree:
        nonlocal pos
        skip_ws()
        if pos >= len(text):
            raise TermSyntaxError("unexpected end of sentence", pos)
        if text[pos] == "[":
            open_at = pos
            pos += 1
            items: list[SyntaxTree] = []
            while True:
                skip_ws()
                if pos >= len(text):
                    raise TermSyntaxError("unclosed '['", open_at)
                if text[pos] == "]":
                    pos += 1
                    break
                items.append(part())
            if not items:
                raise TermSyntaxError("empty brackets", open_at)
            if len(items) > 2:
                raise TermSyntaxError("brackets must hold one or two parts", open_at)
            return items[0] if len(items) == 1 else Node(items[0], items[1])
        if text[pos] == "]":
            raise TermSyntaxError("unexpected ']'", pos)
        start = pos
        while pos < len(text) and not text[pos].isspace() and text[pos] not in "[]":
            pos += 1
        return Leaf(text[start:pos])

    tree = part()
    skip_ws()
    if pos != len(text):
        raise TermSyntaxError(f"trailing input {text[pos:]!r}", pos)
    return tree


def parse_discourse(text: str) -> SyntaxTree:
    """Parse ``.``-separated sentences and fold them with the concatenation
    constant, later fragment as the first argument."""
    pieces: list[str] = []
    depth = 0
    current: list[str] = []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "." and depth == 0:
            pieces.append("".join(current))
            current = []
        else:
            current.append(ch)
    pieces.append("".join(current))
    sentences = [p for p in (piece.strip() for piece in pieces) if p]
    if not sentences:
        raise TermSyntaxError("empty discourse", 0)
    trees = [parse_sentence(s) for s in sentences]
    acc = trees[0]
    for nxt in trees[1:]:
        acc = Node(Node(Leaf("seq"), nxt), acc)
    return acc


# ---------------------------------------------------------------------------
# Search


@dataclass(frozen=True)
class SearchBounds:
    max_index: int = 2
    max_shifts_per_node: int = 3
    allow_s: bool = False
    budget: int = 500_000


@dataclass(frozen=True)
class ReadingReport:
    residual_in: tuple[str, ...]
    residual_out: tuple[str, ...]
    z_count: int
    s_count: int

    @property
    def closed(self) -> bool:
        """No pending pronoun slots: the reading is truth-evaluable."""
        return not self.residual_in

    def to_json(self) -> dict:
        return {
            "residual_in": list(self.residual_in),
            "residual_out": list(self.residual_out),
            "z_count": self.z_count,
            "s_count": self.s_count,
        }


def classify_reading(ty: Type, term: Term) -> ReadingReport:
    t = normalize(ty)
    outs: list[str] = []
    ins: list[str] = []
    while isinstance(t, (In, Out)):
        if isinstance(t, Out):
            outs.append(format_type(t.ref))
            t = t.body
        else:
            ins.append(format_type(t.ante))
            t = t.body
    shifts = shift_terms_in(term)
    return ReadingReport(
        residual_in=tuple(ins),
        residual_out=tuple(outs),
        z_count=sum(1 for s in shifts if s.base == "z"),
        s_count=sum(1 for s in shifts if s.base == "s"),
    )


@dataclass(frozen=True)
class Derivation:
    tree: SyntaxTree
    term: Term
    ty: Type
    reading: ReadingReport = field(compare=False)
    skeleton: TypedNode | None = field(default=None, compare=False, repr=False)
    subst: Subst | None = field(default=None, compare=False, repr=False)

    @property
    def shift_count(self) -> int:
        return len(shift_terms_in(self.term))

    def resolved(self):
        """Ground-annotated term tree, ready for evaluation."""
        if self.skeleton is None:
            raise SearchError("derivation carries no typing skeleton")
        return resolve_skeleton(self.skeleton, self.subst or {})

    def to_json(self) -> dict:
        return {
            "term": format_term(self.term),
            "type": format_type(self.ty),
            "reading": self.reading.to_json(),
        }


def _compose(base: Subst, u: Subst) -> Subst:
    if not u:
        return base
    out = {k: normalize(apply_subst(u, v)) for k, v in base.items()}
    out.update(u)
    return out


def _contains_arrow(t: Type) -> bool:
    match t:
        case Arrow():
            return True
        case In(a, b) | Out(a, b) | Prod(a, b):
            return _contains_arrow(a) or _contains_arrow(b)
        case _:
            return False


def _chainable(polytype: Type) -> bool:
    """First-order function types: no argument position is itself a function."""
    t = polytype
    if not isinstance(t, Arrow):
        return False
    while isinstance(t, Arrow):
        if _contains_arrow(t.dom):
            return False
        t = t.cod
    return True


@dataclass
class _Sol:
    term: Term
    ty: Type
    shifts: int  # total shifts in the term, for representative choice
    theta: Subst
    ann: TypedNode
    # Split variables of output lifts in the term.  A gOut-family shift whose
    # referent block collapses to the unit is an extensional identity wrapper
    # (its type normalizes to the unshifted one), so such solutions are
    # pruned: the search always finds the unwrapped twin as well.
    gout_vars: tuple[int, ...] = ()

    def vacuous(self) -> bool:
        from .types import UNIT, Var

        for v in self.gout_vars:
            if normalize(apply_subst(self.theta, Var(v))) == UNIT:
                return True
        return False


class _Searcher:
    def __init__(self, lexicon: Lexicon, bounds: SearchBounds) -> None:
        self.lexicon = lexicon
        self.bounds = bounds
        self.supply = VarSupply()
        self.attempts = 0
        bases = ["gIn", "gOut", "z"] + (["s"] if bounds.allow_s else [])
        self.vocab = [
            (b, i, j)
            for b in bases
            for i in range(bounds.max_index + 1)
            for j in range(bounds.max_index + 1)
        ]

    def _spend(self, n: int = 1) -> None:
        self.attempts += n
        if self.attempts > self.bounds.budget:
            raise SearchBudgetExceeded(self.bounds.budget)

    def _dedup(self, sols: list[_Sol]) -> list[_Sol]:
        seen: dict[tuple[str, str], _Sol] = {}
        for sol in sols:
            key = (format_term(sol.term), format_type(sol.ty))
            old = seen.get(key)
            if old is None or sol.shifts < old.shifts:
                seen[key] = sol
        return list(seen.values())

    def _instance(self, specific: Type, general: Type) -> bool:
        fresh = apply_subst(
            {v: self.supply.fresh() for v in var_ids(general)}, general)
        return bool(unify(fresh, specific, rigid=frozenset(var_ids(specific))))

    def _minimize(self, sols: list[_Sol]) -> list[_Sol]:
        """Within one term, drop types that are instances of another type."""
        by_term: dict[str, list[_Sol]] = {}
        for sol in sols:
            by_term.setdefault(format_term(sol.term), []).append(sol)
        keep: list[_Sol] = []
        for group in by_term.values():
            if len(group) == 1:
                keep.extend(group)
                continue
            group = sorted(group, key=lambda s: format_type(s.ty))
            for idx, sol in enumerate(group):
                redundant = False
                for idx2, other in enumerate(group):
                    if idx == idx2:
                        continue
                    if self._instance(sol.ty, other.ty):
                        if not self._instance(other.ty, sol.ty) or idx2 < idx:
                            redundant = True
                            break
                if not redundant:
                    keep.append(sol)
        return keep

    def _chain_levels(self, sol: _Sol, depth: int) -> list[list[_Sol]]:
        """Variants of ``sol`` by number of added shift wraps, 0..depth."""
        levels = [[sol]]
        frontier = [sol]
        for _ in range(depth):
            nxt: list[_Sol] = []
            for cur in frontier:
                if not isinstance(cur.ty, (Arrow, Out)):
                    continue  # shift domains are function-shaped
                for base, i, j in self.vocab:
                    self._spend()
                    shift_ty, sigma = shift_type(base, i, j, self.supply)
                    assert isinstance(shift_ty, Arrow)
                    shift_term = Shift(base, i, j)
                    gout_vars = cur.gout_vars + ((sigma,) if base == "gOut" else ())
                    for u in unify(shift_ty.dom, cur.ty):
                        ann = TypedNode(
                            App(shift_term, cur.term),
                            shift_ty.cod,
                            (TypedNode(shift_term, shift_ty, (), {0: sigma}), cur.ann),
                        )
                        sol = _Sol(
                            App(shift_term, cur.term),
                            normalize(apply_subst(u, shift_ty.cod)),
                            cur.shifts + 1,
                            _compose(cur.theta, u),
                            ann,
                            gout_vars,
                        )
                        if not sol.vacuous():
                            nxt.append(sol)
            nxt = self._minimize(self._dedup(nxt))
            levels.append(nxt)
            frontier = nxt
        return levels

    def _child_levels(self, tree: SyntaxTree) -> list[list[_Sol]]:
        """Solutions of a child, stratified by shifts added at this node.

        Shift chains wrap first-order lexical functions only (predicates,
        relations, concatenation): a chainable leaf yields its decorated
        variants, everything else just its own solutions.  That is the
        decoration grammar the worked derivations instantiate; higher-order
        function words thread referents through their own polymorphic block
        variables instead of being lifted, and wrapping a composed phrase
        only reproduces meanings some leaf-decorated term already has.
        """
        cap = self.bounds.max_shifts_per_node
        if isinstance(tree, Leaf):
            [sol] = self.solutions(tree)
            entry = self.lexicon.lookup_surface(tree.word)
            if entry is not None and _chainable(entry.polytype):
                return self._chain_levels(sol, cap)
            levels: list[list[_Sol]] = [[sol]]
        else:
            levels = [self.solutions(tree)]
        levels.extend([] for _ in range(cap))
        return levels

    def solutions(self, tree: SyntaxTree) -> list[_Sol]:
        match tree:
            case Leaf(word):
                entry = self.lexicon.lookup_surface(word)
                if entry is None:
                    raise UnknownLexemeError(word)
                renaming = {v: self.supply.fresh() for v in var_ids(entry.polytype)}
                ty = normalize(apply_subst(renaming, entry.polytype))
                term = Lex(entry.name)
                ann = TypedNode(term, ty, (), {k: v.id for k, v in renaming.items()})
                return [_Sol(term, ty, 0, {}, ann)]
            case Node(left, right):
                llevels = self._child_levels(left)
                rlevels = self._child_levels(right)
                results: list[_Sol] = []
                cap = self.bounds.max_shifts_per_node
                for flevels, xlevels in ((llevels, rlevels), (rlevels, llevels)):
                    for local_f in range(cap + 1):
                        for fchain in flevels[local_f]:
                            if not isinstance(fchain.ty, (Arrow, Out)):
                                continue  # only function-shaped terms apply
                            for local_x in range(cap - local_f + 1):
                                for xchain in xlevels[local_x]:
                                    if isinstance(fchain.ty, Arrow) and not roots_may_unify(
                                            fchain.ty.dom, xchain.ty):
                                        continue
                                    self._spend()
                                    rho = self.supply.fresh()
                                    theta = {**fchain.theta, **xchain.theta}
                                    term = App(fchain.term, xchain.term)
                                    ann = TypedNode(term, rho, (fchain.ann, xchain.ann))
                                    gout_vars = fchain.gout_vars + xchain.gout_vars
                                    for u in unify(fchain.ty, Arrow(xchain.ty, rho)):
                                        sol = _Sol(
                                            term,
                                            normalize(apply_subst(u, rho)),
                                            fchain.shifts + xchain.shifts,
                                            _compose(theta, u),
                                            ann,
                                            gout_vars,
                                        )
                                        if not sol.vacuous():
                                            results.append(sol)
                return self._minimize(self._dedup(results))
        raise AssertionError


def search_derivations(
    tree: SyntaxTree,
    lexicon: Lexicon,
    bounds: SearchBounds = SearchBounds(),
    target: Type | None = None,
    dedup: bool = True,
) -> list[Derivation]:
    """All well-typed decorated readings of ``tree`` within ``bounds``.

    With ``target`` given, keep only solutions whose type unifies with it.
    With ``dedup``, collapse derivations that agree in type and in observable
    behaviour on a fixed probe-model suite, keeping the cheapest.
    """
    searcher = _Searcher(lexicon, bounds)
    sols = searcher.solutions(tree)
    out: list[Derivation] = []
    for sol in sols:
        ty = sol.ty
        theta = sol.theta
        if target is not None:
            want = apply_subst(
                {v: searcher.supply.fresh() for v in var_ids(target)},
                normalize(target))
            matches = unify(ty, want)
            if not matches:
                continue
            ty = normalize(apply_subst(matches[0], ty))
            theta = _compose(theta, matches[0])
        ty = apply_subst(canonical_renaming(ty), ty)
        out.append(Derivation(tree, sol.term, ty, classify_reading(ty, sol.term),
                              skeleton=sol.ann, subst=theta))
    out.sort(key=lambda d: (term_size(d.term), format_term(d.term), format_type(d.ty)))
    if dedup:
        out = dedup_derivations(out, lexicon)
    return out


_PROBE_SEED = 20_25
_PROBE_COUNT = 8
_PROBE_SIZE = 3


def _probe_models(lexicon: Lexicon):
    preds, rels = lexicon.model_names()
    rng = random.Random(_PROBE_SEED)
    return [random_model(preds, rels, _PROBE_SIZE, rng) for _ in range(_PROBE_COUNT)]


def _fingerprint(d: Derivation, lexicon: Lexicon, probes) -> tuple | None:
    """Observable behaviour on the probe suite; None when unobservable."""
    if d.skeleton is None:
        return None
    try:
        resolved = d.resolved()
        return tuple(
            probe_signature(eval_resolved(resolved, m, lexicon), resolved.ty, m)
            for m in probes
        )
    except UnsupportedTypeError:
        return None


def dedup_derivations(ds: list[Derivation], lexicon: Lexicon) -> list[Derivation]:
    """Collapse derivations with equal type and equal probe behaviour.

    The representative kept uses the fewest shifts (ties broken by term size
    and print order).  Derivations whose types cannot be observed on a model
    (residues that are not chains of individuals) are never collapsed.
    """
    if not ds:
        return []
    probes = _probe_models(lexicon)
    groups: dict[tuple, list[Derivation]] = {}
    order: list[tuple] = []
    for d in ds:
        fp = _fingerprint(d, lexicon, probes)
        key = (format_type(d.ty), fp) if fp is not None else (
            format_type(d.ty), format_term(d.term))
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(d)
    out = []
    for key in order:
        group = groups[key]
        group.sort(key=lambda d: (d.shift_count, term_size(d.term), format_term(d.term)))
        out.append(group[0])
    out.sort(key=lambda d: (term_size(d.term), format_term(d.term), format_type(d.ty)))
    return out

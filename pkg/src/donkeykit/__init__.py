"""donkeykit: a typed-combinator engine for dynamic-semantics readings.

Sentence meanings are nondeterministic, set-valued functions whose types
track pronoun slots (inputs) and produced discourse referents (outputs).
The package types and evaluates combinator terms over finite models,
searches shift decorations of bracketed sentences for all well-typed
readings, and cross-checks the engine against independent brute-force
first-order truth conditions.
"""

from .combinators import (
    App,
    Lex,
    Shift,
    Term,
    TermSyntaxError,
    UnknownLexemeError,
    elaborate,
    format_term,
    parse_term,
    typecheck,
)
from .derivation import (
    Derivation,
    Leaf,
    Node,
    ReadingReport,
    SearchBounds,
    SearchBudgetExceeded,
    classify_reading,
    dedup_derivations,
    parse_discourse,
    parse_sentence,
    search_derivations,
)
from .evaluator import (
    Observation,
    UnsupportedTypeError,
    WrongTypeError,
    eval_term,
    observe,
    tabulate,
    truth,
)
from .lexicon import (
    LexEntry,
    Lexicon,
    LexiconError,
    default_lexicon,
    denote,
    load_lexicon,
    parse_lexicon,
)
from .model import MissingPredicateError, Model, load_model
from .oracle import (
    SENTENCE_SPECS,
    CompareReport,
    SentenceSpec,
    SizeOverflowError,
    compare,
    count_models,
    enumerate_models,
    fo_truth,
)
from .checks import engine_reading, run_check
from .types import (
    Arrow,
    Base,
    E,
    In,
    Out,
    Prod,
    Type,
    TypeSyntaxError,
    UNIT,
    Var,
    VarSupply,
    alpha_equal,
    format_type,
    normalize,
    parse_type,
    shift_type,
    unify,
)
from .values import Atom, Closure, Pair, STAR, ValueSet, apply_values

__version__ = "0.1.0"

"""rulebench: traffic rules to Metric Temporal Logic, with a human in the loop.

The package covers the full workbench: an MTL parser and printer
(:mod:`rulebench.formula`, :mod:`rulebench.parser`), finite-trace semantics
for monitoring (:mod:`rulebench.semantics`), canonical forms and mismatch
classification (:mod:`rulebench.equivalence`), few-shot prompt rendering and
answer extraction (:mod:`rulebench.prompting`), provider access with a
deterministic replay backend (:mod:`rulebench.llm`), the majority-vote
translation pipeline (:mod:`rulebench.pipeline`), dataset scoring
(:mod:`rulebench.evaluation`), and the review store, HTTP service, and CLI
(:mod:`rulebench.store`, :mod:`rulebench.service`, :mod:`rulebench.cli`).
"""

from .equivalence import ErrorClass, SwapRule, canonicalize, classify_error, equivalent
from .evaluation import EvalReport, RuleRecord, load_dataset, render_report, score
from .formula import (
    And,
    Atom,
    Formula,
    Implies,
    Interval,
    Not,
    Or,
    Temporal,
    Until,
    collect_vocabulary,
    print_formula,
)
from .llm import ProviderSpec, SamplingConfig, complete
from .parser import ParseError, parse_atom, parse_formula
from .pipeline import TranslationCandidate, TranslationResult, translate
from .prompting import FewShotExample, PromptConfig, check_vocabulary, extract_candidate, render_prompt
from .semantics import Trace, Verdict, evaluate, monitor

__version__ = "0.1.0"

__all__ = [
    "And",
    "Atom",
    "ErrorClass",
    "EvalReport",
    "FewShotExample",
    "Formula",
    "Implies",
    "Interval",
    "Not",
    "Or",
    "ParseError",
    "PromptConfig",
    "ProviderSpec",
    "RuleRecord",
    "SamplingConfig",
    "SwapRule",
    "Temporal",
    "Trace",
    "TranslationCandidate",
    "TranslationResult",
    "Until",
    "Verdict",
    "canonicalize",
    "check_vocabulary",
    "classify_error",
    "collect_vocabulary",
    "complete",
    "equivalent",
    "evaluate",
    "extract_candidate",
    "load_dataset",
    "monitor",
    "parse_atom",
    "parse_formula",
    "print_formula",
    "render_prompt",
    "render_report",
    "score",
    "translate",
]

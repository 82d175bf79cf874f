"""Automatic generation and evaluation of morphological awareness items."""

from .errors import (
    ConfigurationError,
    CorpusFormatError,
    InsufficientPoolError,
    JudgeParseError,
    MorphgenError,
    RequestError,
    StepBindingError,
    TemplateError,
    TransportError,
    UndefinedCorrelationError,
    ValidationError,
)
from .items import (
    Item,
    MorphCategory,
    QuestionType,
    SkillFocus,
    TaskBand,
    recode_task_difficulty,
    recode_word_difficulty,
    validate_item,
)
from .corpus import (
    Corpus,
    SplitSpec,
    load_corpus,
    save_corpus,
    stratified_split,
    summarize,
)
from .prompts import GenerationSpec, StrategyId, render, select_exemplars
from .gateway import BackendConfig, HttpChatBackend, MockBackend, run_plan, run_plans
from .parsing import morph_checks, parse_item, serialize_item
from .metrics import MetricBackends, score_item
from .judge import RubricDimensions, RubricScore, judge_item
from .pipeline import RunConfig, RunManifest, run_batch
from .stats import spearman_rho

__version__ = "0.1.0"

__all__ = [
    "BackendConfig",
    "ConfigurationError",
    "Corpus",
    "CorpusFormatError",
    "GenerationSpec",
    "HttpChatBackend",
    "InsufficientPoolError",
    "Item",
    "JudgeParseError",
    "MetricBackends",
    "MockBackend",
    "MorphCategory",
    "MorphgenError",
    "QuestionType",
    "RequestError",
    "RubricDimensions",
    "RubricScore",
    "RunConfig",
    "RunManifest",
    "SkillFocus",
    "SplitSpec",
    "StepBindingError",
    "StrategyId",
    "TaskBand",
    "TemplateError",
    "TransportError",
    "UndefinedCorrelationError",
    "ValidationError",
    "judge_item",
    "load_corpus",
    "morph_checks",
    "parse_item",
    "recode_task_difficulty",
    "recode_word_difficulty",
    "render",
    "run_batch",
    "run_plan",
    "run_plans",
    "save_corpus",
    "score_item",
    "select_exemplars",
    "serialize_item",
    "spearman_rho",
    "stratified_split",
    "summarize",
    "validate_item",
]

"""Exception types shared across the package.

Everything raised on purpose derives from MorphgenError so callers can
catch one base class at pipeline boundaries.
"""


class MorphgenError(Exception):
    """Base class for all deliberate errors."""


class ValidationError(MorphgenError):
    """A value is outside its documented domain."""


class ConfigurationError(MorphgenError):
    """A config document or argument set is malformed or inconsistent."""


class CorpusFormatError(MorphgenError):
    """An input corpus file failed schema checks.

    Carries every bad record, not just the first one.
    """

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class UndefinedCorrelationError(MorphgenError):
    """A correlation is requested where one side has zero rank variance."""


class InsufficientPoolError(MorphgenError):
    """An exemplar pool is too small for the requested selection."""


class TemplateError(MorphgenError):
    """A prompt template is missing or left placeholders unresolved."""


class StepBindingError(MorphgenError):
    """A multi-step reply did not contain the value the next step needs."""


class TransportError(MorphgenError):
    """The HTTP transport failed after exhausting retries."""


class RequestError(MorphgenError):
    """The backend rejected a request with a non-retryable status."""

    def __init__(self, status: int, body_excerpt: str):
        self.status = status
        self.body_excerpt = body_excerpt
        super().__init__(f"backend returned {status}: {body_excerpt}")


class JudgeParseError(MorphgenError):
    """A judge reply stayed unparseable after the single re-ask."""

from ..errors import BadParametersError
from .base import WordGenerator, WordSource
from .const import ConstSource
from .explicit import ExplicitSource
from .gamma import GammaSource
from .periodic import PeriodicSource

SOURCES: list[WordSource] = [GammaSource(), PeriodicSource(), ConstSource(), ExplicitSource()]


def parse_source(text: "str | WordGenerator") -> WordGenerator:
    """Resolve a string like "gamma:0.5" or "periodic:1,3" to a word generator."""
    if isinstance(text, WordGenerator):
        return text
    for source in SOURCES:
        if source.can_handle(text):
            return source.build(text)
    raise BadParametersError(f"Unknown word generator {text!r}")


__all__ = [
    "ConstSource",
    "ExplicitSource",
    "GammaSource",
    "PeriodicSource",
    "WordGenerator",
    "WordSource",
    "parse_source",
]

from abc import ABC, abstractmethod
from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction

from ..words import Word


@dataclass
class WordGenerator:
    """A named infinite word; ``prefix(m)`` returns its first m letters."""
    label: str
    prefix_fn: Callable[[int], Word] = field(repr=False)
    gamma: Fraction | None = None
    # bound on |D(w(m)) - m * gamma| over all m, when known
    slack: int | None = None

    def prefix(self, m: int) -> Word:
        return self.prefix_fn(m)


class WordSource(ABC):
    """Base class for word-generator strings such as "gamma:0.5"."""

    prefix: str = ""

    def can_handle(self, text: str) -> bool:
        """Check if this source understands the given generator string."""
        return text.strip().lower().startswith(self.prefix + ":")

    def argument(self, text: str) -> str:
        return text.split(":", 1)[1].strip()

    @abstractmethod
    def build(self, text: str) -> WordGenerator:
        """Turn the text into a word generator."""
        pass

from fractions import Fraction

from ..errors import BadParametersError
from ..words import Word
from .base import WordGenerator, WordSource


class ConstSource(WordSource):
    """const:<letter>, the constant word a^m."""

    prefix = "const"

    def build(self, text: str) -> WordGenerator:
        arg = self.argument(text)
        if arg not in ("1", "2"):
            raise BadParametersError(f"Constant words use letter 1 or 2, got {arg!r}")
        letter = int(arg)
        gamma = Fraction(1 if letter == 1 else -1)
        return WordGenerator(f"const:{letter}", lambda m: Word.constant(letter, m), gamma, slack=0)

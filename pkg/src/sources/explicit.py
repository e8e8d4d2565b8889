from ..errors import BadParametersError
from ..words import Word
from .base import WordGenerator, WordSource


class ExplicitSource(WordSource):
    """word:<letters>, a fixed finite word; prefixes past its end are refused."""

    prefix = "word"

    def build(self, text: str) -> WordGenerator:
        word = Word.parse(self.argument(text))

        def prefix(m: int) -> Word:
            if m > len(word):
                raise BadParametersError(f"Word {word} has no prefix of length {m}")
            return word.prefix(m)

        return WordGenerator(f"word:{word}", prefix)

from functools import partial

from ..errors import BadParametersError
from ..words import periodic_gamma, periodic_word
from .base import WordGenerator, WordSource


class PeriodicSource(WordSource):
    """periodic:<p>,<q>, the word (1^p 2^(q-p)) repeated."""

    prefix = "periodic"

    def build(self, text: str) -> WordGenerator:
        try:
            p, q = (int(x) for x in self.argument(text).split(","))
        except ValueError as e:
            raise BadParametersError(f"Expected periodic:<p>,<q>, got {text!r}") from e
        gamma = periodic_gamma(p, q)
        return WordGenerator(f"periodic:{p},{q}", partial(periodic_word, p, q), gamma, slack=2 * q)

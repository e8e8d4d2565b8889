import logging

from ..words import GammaWord
from .base import WordGenerator, WordSource

logger = logging.getLogger(__name__)


class GammaSource(WordSource):
    """gamma:<value>, the greedy word whose digit averages approach gamma."""

    prefix = "gamma"

    def build(self, text: str) -> WordGenerator:
        word = GammaWord(self.argument(text))
        logger.debug(f"Gamma word source for gamma = {word.gamma}")
        return WordGenerator(f"gamma:{word.gamma}", word.prefix, word.gamma, slack=1)

"""Words over the alphabet {1, ..., k} that drive mixed substitution systems.

For the two-letter systems used here the digit sum D(w) counts +1 for every
letter 1 and -1 for every letter 2; D(w(m)) / m is what the gamma-words steer.
"""

import logging
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from fractions import Fraction

from .errors import BadParametersError, GammaOutOfRangeError, WordError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Word:
    letters: tuple[int, ...] = ()
    alphabet_size: int = 2

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(a) for a in self.letters))
        for a in self.letters:
            if not 1 <= a <= self.alphabet_size:
                raise WordError(f"Letter {a} outside alphabet 1..{self.alphabet_size}")

    @classmethod
    def parse(cls, text: str, alphabet_size: int = 2) -> "Word":
        """Parse the compact form, e.g. "112"; commas and spaces are ignored."""
        digits = [c for c in text if c not in ", "]
        if not all(c.isdigit() for c in digits):
            raise WordError(f"Cannot parse word {text!r}")
        return cls(tuple(int(c) for c in digits), alphabet_size)

    @classmethod
    def constant(cls, letter: int, m: int) -> "Word":
        return cls((letter,) * m)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __getitem__(self, index):
        return self.letters[index]

    def __add__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters, max(self.alphabet_size, other.alphabet_size))

    def __str__(self) -> str:
        return "".join(str(a) for a in self.letters)

    def prefix(self, m: int) -> "Word":
        return Word(self.letters[:m], self.alphabet_size)

    def is_suffix_of(self, other: "Word") -> bool:
        n = len(self.letters)
        return n <= len(other.letters) and (n == 0 or other.letters[-n:] == self.letters)


def digit_sum(w: Word | Iterable[int]) -> int:
    """D(w): +1 for each letter 1, -1 for each letter 2."""
    total = 0
    for a in w:
        if a == 1:
            total += 1
        elif a == 2:
            total -= 1
        else:
            raise WordError(f"Digit sums are defined over {{1, 2}}, got letter {a}")
    return total


def reverse(w: Word) -> Word:
    return Word(w.letters[::-1], w.alphabet_size)


def _exact_gamma(gamma) -> Fraction:
    if isinstance(gamma, str):
        value = Fraction(gamma.strip())
    else:
        # floats convert exactly, so the bound below needs no slack
        value = Fraction(gamma)
    if not -1 <= value <= 1:
        raise GammaOutOfRangeError(gamma)
    return value


class GammaWord:
    """Greedy infinite word whose running average of digits tracks gamma.

    Letter m+1 is 1 exactly when (m+1)*gamma - D(w(m)) >= 0; this keeps
    |gamma - D(w(m))/m| <= 1/m at every length and breaks ties toward letter 1.
    """

    def __init__(self, gamma):
        self.gamma = _exact_gamma(gamma)
        self._num = self.gamma.numerator
        self._den = self.gamma.denominator
        self._letters: list[int] = []
        self.running_sum = 0

    def extend_to(self, m: int) -> None:
        letters = self._letters
        num, den = self._num, self._den
        d = self.running_sum
        for length in range(len(letters) + 1, m + 1):
            if length * num - d * den >= 0:
                letters.append(1)
                d += 1
            else:
                letters.append(2)
                d -= 1
        self.running_sum = d

    def prefix(self, m: int) -> Word:
        self.extend_to(m)
        return Word(tuple(self._letters[:m]))

    def sums(self, m: int) -> list[int]:
        """D(w(1)), ..., D(w(m))."""
        self.extend_to(m)
        out = []
        d = 0
        for a in self._letters[:m]:
            d += 1 if a == 1 else -1
            out.append(d)
        return out


def gamma_word(gamma, m: int) -> Word:
    if m < 1:
        raise BadParametersError(f"Word length must be positive, got {m}")
    return GammaWord(gamma).prefix(m)


def approximation_error(gamma, w: Word) -> Fraction:
    """|gamma - D(w)/|w||, exactly."""
    return abs(_exact_gamma(gamma) - Fraction(digit_sum(w), len(w)))


def periodic_word(p: int, q: int, m: int) -> Word:
    """First m letters of (1^p 2^(q-p)) repeated."""
    if q < 1 or not 0 <= p <= q or m < 1:
        raise BadParametersError(f"Need 0 <= p <= q, q >= 1 and m >= 1; got p={p}, q={q}, m={m}")
    block = (1,) * p + (2,) * (q - p)
    return Word(tuple(block[i % q] for i in range(m)))


def periodic_gamma(p: int, q: int) -> Fraction:
    if q < 1 or not 0 <= p <= q:
        raise BadParametersError(f"Need 0 <= p <= q and q >= 1; got p={p}, q={q}")
    return Fraction(2 * p - q, q)


def all_words(m: int, alphabet_size: int = 2) -> Iterator[Word]:
    """Every word of length m in lexicographic order."""
    if m == 0:
        yield Word((), alphabet_size)
        return
    for head in all_words(m - 1, alphabet_size):
        for a in range(1, alphabet_size + 1):
            yield Word(head.letters + (a,), alphabet_size)


def suffixes(w: Word) -> list[Word]:
    """Non-empty suffixes, shortest first."""
    return [Word(w.letters[len(w) - n:], w.alphabet_size) for n in range(1, len(w) + 1)]

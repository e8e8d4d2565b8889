"""Substitution-matrix analysis: primitivity, Perron data, density, and the
spectral test for bounded-displacement equivalence to a lattice.

Two-by-two matrices whose discriminant is a perfect square are handled in exact
rational arithmetic; everything else goes through numpy with a tolerance band.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from .errors import NoConvergenceError, NotPrimitiveError, SpectralError

logger = logging.getLogger(__name__)

POWER_TOLERANCE = 1e-10
POWER_MAX_ITERATIONS = 10**4
BOUNDARY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class IntMatrix:
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        n = len(rows)
        if n == 0 or any(len(row) != n for row in rows):
            raise SpectralError("Matrix must be square and non-empty")
        if any(x < 0 for row in rows for x in row):
            raise SpectralError("Matrix entries must be non-negative")

    @classmethod
    def of(cls, data) -> "IntMatrix":
        if isinstance(data, IntMatrix):
            return data
        return cls(tuple(tuple(int(x) for x in row) for row in np.asarray(data).tolist()))

    @property
    def n(self) -> int:
        return len(self.entries)

    def array(self, dtype=np.int64) -> np.ndarray:
        return np.array(self.entries, dtype=dtype)

    def permuted(self, order: Sequence[int]) -> "IntMatrix":
        return IntMatrix(tuple(tuple(self.entries[i][j] for j in order) for i in order))


def primitivity_exponent(m) -> int | None:
    """Smallest k <= n^2 - 2n + 2 with M^k > 0 entrywise, or None."""
    m = IntMatrix.of(m)
    n = m.n
    bound = n * n - 2 * n + 2
    pattern = np.minimum(m.array(), 1)
    power = pattern.copy()
    for k in range(1, bound + 1):
        if np.all(power > 0):
            return k
        power = np.minimum(power @ pattern, 1)
    return None


def is_primitive(m) -> bool:
    return primitivity_exponent(m) is not None


@dataclass
class Eigenpair:
    eigenvalue: Fraction | complex | float
    modulus: Fraction | float
    has_nonzero_sum_eigenvector: bool
    eigenvector: tuple | None = None


@dataclass
class PerronData:
    lambda1: Fraction | float
    u1: tuple
    v1: tuple
    subdominant: list[Eigenpair] = field(default_factory=list)
    density: Fraction | float | None = None
    exact: bool = False
    left_check: bool = False
    repeated_eigenvalues: bool = False


def _integral_direction(vec: Sequence[Fraction]) -> tuple[int, ...]:
    """Scale a rational vector to coprime integers with its last non-zero entry positive."""
    denominators = math.lcm(*(Fraction(x).denominator for x in vec))
    ints = [int(Fraction(x) * denominators) for x in vec]
    g = math.gcd(*ints) or 1
    ints = [x // g for x in ints]
    for x in reversed(ints):
        if x != 0:
            if x < 0:
                ints = [-y for y in ints]
            break
    return tuple(ints)


def _exact_2x2(m: IntMatrix):
    (a, b), (c, d) = m.entries
    disc = (a - d) ** 2 + 4 * b * c
    root = math.isqrt(disc)
    if root * root != disc:
        return None
    lam1 = Fraction(a + d + root, 2)
    lam2 = Fraction(a + d - root, 2)
    # primitive 2x2 matrices have b, c > 0
    v1 = _integral_direction((Fraction(b), lam1 - a))
    v2 = _integral_direction((Fraction(b), lam2 - a))
    return lam1, v1, lam2, v2


def _power_iteration(a: np.ndarray) -> tuple[float, np.ndarray]:
    v = np.ones(a.shape[0], dtype=float)
    v /= np.linalg.norm(v, np.inf)
    for iteration in range(1, POWER_MAX_ITERATIONS + 1):
        w = a @ v
        w /= np.linalg.norm(w, np.inf)
        if np.linalg.norm(w - v, np.inf) < POWER_TOLERANCE:
            lam = float((a @ w) @ w / (w @ w))
            logger.debug(f"Power iteration converged after {iteration} steps")
            return lam, w
        v = w
    raise NoConvergenceError(POWER_MAX_ITERATIONS)


def _rank(x: np.ndarray) -> int:
    """Numerical rank relative to the largest singular value of x."""
    singular = np.linalg.svd(x, compute_uv=False)
    if not singular.size or singular[0] == 0:
        return 0
    return int(np.count_nonzero(singular > BOUNDARY_TOLERANCE * singular[0]))


def _has_nonzero_sum(a: np.ndarray, lam) -> bool:
    """Whether the lam-eigenspace leaves the hyperplane orthogonal to (1, ..., 1)."""
    n = a.shape[0]
    shifted = a.astype(complex) - lam * np.eye(n)
    shifted_rank = _rank(shifted)
    if shifted_rank == 0:
        return True
    # ones row at the scale of shifted
    scale = np.linalg.svd(shifted, compute_uv=False)[0]
    stacked = np.vstack([shifted, scale * np.ones((1, n))])
    return _rank(stacked) > shifted_rank


def perron_data(m, areas: Sequence, exact: bool = True) -> PerronData:
    """Leading eigenvalue, eigenvectors, subdominant spectrum and natural density.

    ``areas`` is the prototile-volume vector, used as u1; whether it really is a
    left eigenvector for lambda1 is recorded in ``left_check``.
    """
    m = IntMatrix.of(m)
    if len(areas) != m.n:
        raise SpectralError(f"Expected {m.n} areas, got {len(areas)}")
    if not is_primitive(m):
        raise NotPrimitiveError()

    u1 = tuple(Fraction(x) if not isinstance(x, float) else x for x in areas)

    if m.n == 1:
        lam = Fraction(m.entries[0][0])
        pd = PerronData(lambda1=lam, u1=u1, v1=(1,), exact=True)
    else:
        closed = _exact_2x2(m) if exact and m.n == 2 else None
        if closed is not None:
            lam1, v1, lam2, v2 = closed
            pd = PerronData(
                lambda1=lam1, u1=u1, v1=v1, exact=True,
                subdominant=[Eigenpair(lam2, abs(lam2), sum(v2) != 0, v2)],
            )
        else:
            pd = _numeric_perron(m, u1)

    pd.left_check = _left_check(m, pd)
    if not pd.left_check:
        logger.warning("Area vector is not a left eigenvector for the leading eigenvalue")
    pd.density = natural_density(pd)
    return pd


def _numeric_perron(m: IntMatrix, u1: tuple) -> PerronData:
    a = m.array(dtype=float)
    lam1, v1 = _power_iteration(a)
    residual = np.linalg.norm(a @ v1 - lam1 * v1, np.inf)
    if residual > 1e-8 * np.linalg.norm(v1, np.inf):
        raise NoConvergenceError(POWER_MAX_ITERATIONS)

    eigenvalues = np.linalg.eigvals(a)
    order = sorted(range(len(eigenvalues)), key=lambda i: -abs(eigenvalues[i]))
    eigenvalues = [eigenvalues[i] for i in order]
    # drop one copy of lambda1
    lead = min(range(len(eigenvalues)), key=lambda i: abs(eigenvalues[i] - lam1))
    rest = eigenvalues[:lead] + eigenvalues[lead + 1:]

    repeated = any(
        abs(x - y) <= BOUNDARY_TOLERANCE * max(1.0, lam1)
        for i, x in enumerate(eigenvalues)
        for y in eigenvalues[i + 1:]
    )
    if repeated:
        logger.warning("Repeated eigenvalues present; eigenvector data reported as computed")

    subdominant = []
    for lam in rest:
        value = complex(lam) if abs(lam.imag) > BOUNDARY_TOLERANCE else float(lam.real)
        subdominant.append(
            Eigenpair(value, float(abs(lam)), _has_nonzero_sum(a, lam))
        )
    return PerronData(
        lambda1=lam1,
        u1=u1,
        v1=tuple(float(x) for x in v1 / np.max(v1)),
        subdominant=subdominant,
        exact=False,
        repeated_eigenvalues=repeated,
    )


def _left_check(m: IntMatrix, pd: PerronData) -> bool:
    n = m.n
    row = [sum(pd.u1[i] * m.entries[i][j] for i in range(n)) for j in range(n)]
    target = [pd.lambda1 * x for x in pd.u1]
    if pd.exact and all(isinstance(x, Fraction) for x in pd.u1):
        return row == target
    return all(
        abs(float(x) - float(y)) <= 1e-8 * max(1.0, abs(float(y))) for x, y in zip(row, target)
    )


def natural_density(pd: PerronData) -> Fraction | float:
    """alpha = <1, v1> / <u1, v1>."""
    numerator = sum(pd.v1)
    denominator = sum(u * v for u, v in zip(pd.u1, pd.v1))
    if pd.exact and all(isinstance(x, Fraction) for x in pd.u1):
        return Fraction(numerator) / Fraction(denominator)
    return float(numerator) / float(denominator)


class Verdict(str, Enum):
    EQUIVALENT_TO_LATTICE = "EquivalentToLattice"
    NOT_EQUIVALENT_TO_LATTICE = "NotEquivalentToLattice"
    BOUNDARY = "Boundary"
    NO_APPLICABLE_EIGENVALUE = "NoApplicableEigenvalue"


@dataclass
class ClassifierReport:
    verdict: Verdict
    t: int | None
    lambda_t: Fraction | complex | float | None
    threshold: float
    perron: PerronData

    def as_dict(self) -> dict:
        pd = self.perron
        return {
            "verdict": self.verdict.value,
            "t": self.t,
            "lambda_t": _jsonable(self.lambda_t),
            "threshold": self.threshold,
            "lambda1": _jsonable(pd.lambda1),
            "u1": [_jsonable(x) for x in pd.u1],
            "v1": [_jsonable(x) for x in pd.v1],
            "subdominant": [
                {
                    "eigenvalue": _jsonable(e.eigenvalue),
                    "modulus": _jsonable(e.modulus),
                    "has_nonzero_sum_eigenvector": e.has_nonzero_sum_eigenvector,
                    "eigenvector": [_jsonable(x) for x in e.eigenvector] if e.eigenvector else None,
                }
                for e in pd.subdominant
            ],
            "density": _jsonable(pd.density),
            "exact": pd.exact,
            "left_check": pd.left_check,
            "repeated_eigenvalues": pd.repeated_eigenvalues,
        }


def _jsonable(x):
    if x is None or isinstance(x, (bool, int)):
        return x
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    return float(x)


def bd_lattice_classifier(m, areas: Sequence, d: int = 2, exact: bool = True) -> ClassifierReport:
    """Compare |lambda_t| against lambda1^((d-1)/d) for the first subdominant
    eigenvalue whose eigenspace holds a vector with non-zero coordinate sum."""
    pd = perron_data(m, areas, exact=exact)
    threshold = float(pd.lambda1) ** ((d - 1) / d)
    for t, pair in enumerate(pd.subdominant, start=2):
        if not pair.has_nonzero_sum_eigenvector:
            continue
        verdict = _compare(pair.modulus, pd.lambda1, d)
        logger.info(f"t = {t}, |lambda_t| = {float(pair.modulus):.6g}, threshold {threshold:.6g}: {verdict.value}")
        return ClassifierReport(verdict, t, pair.eigenvalue, threshold, pd)
    return ClassifierReport(Verdict.NO_APPLICABLE_EIGENVALUE, None, None, threshold, pd)


def _compare(modulus, lambda1, d: int) -> Verdict:
    if isinstance(modulus, Fraction) and isinstance(lambda1, Fraction):
        lhs = modulus ** d
        rhs = lambda1 ** (d - 1)
        if lhs == rhs:
            return Verdict.BOUNDARY
        return Verdict.NOT_EQUIVALENT_TO_LATTICE if lhs > rhs else Verdict.EQUIVALENT_TO_LATTICE
    ratio = float(modulus) / float(lambda1) ** ((d - 1) / d)
    if abs(ratio - 1) <= BOUNDARY_TOLERANCE:
        return Verdict.BOUNDARY
    return Verdict.NOT_EQUIVALENT_TO_LATTICE if ratio > 1 else Verdict.EQUIVALENT_TO_LATTICE

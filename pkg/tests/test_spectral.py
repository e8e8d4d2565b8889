from fractions import Fraction

import numpy as np
import pytest

from src.errors import NotPrimitiveError, SpectralError
from src.rules import areas, builtin, substitution_matrix
from src.spectral import (
    IntMatrix,
    Verdict,
    _has_nonzero_sum,
    bd_lattice_classifier,
    is_primitive,
    perron_data,
    primitivity_exponent,
)

STAIRCASE = [[6, 9], [1, 6]]


def test_staircase_perron_data_is_exact():
    pd = perron_data(STAIRCASE, [1, 3])
    assert pd.exact
    assert pd.lambda1 == 9
    assert pd.v1 == (3, 1)
    assert pd.left_check
    assert pd.density == Fraction(2, 3)
    (second,) = pd.subdominant
    assert second.eigenvalue == 3
    assert second.eigenvector == (-3, 1)
    assert second.has_nonzero_sum_eigenvector


def test_staircase_sits_on_the_boundary():
    report = bd_lattice_classifier(STAIRCASE, [1, 3])
    assert report.verdict is Verdict.BOUNDARY
    assert report.t == 2
    assert report.lambda_t == 3
    assert report.threshold == pytest.approx(3.0)


def test_builtin_rule_feeds_classifier():
    rule = builtin("sigma1")
    report = bd_lattice_classifier(substitution_matrix(rule), areas(rule))
    assert report.verdict is Verdict.BOUNDARY
    assert report.perron.density == Fraction(2, 3)


def test_numeric_path_agrees_with_exact_path():
    pd = perron_data(STAIRCASE, [1, 3], exact=False)
    assert not pd.exact
    assert pd.lambda1 == pytest.approx(9)
    assert pd.density == pytest.approx(2 / 3)
    assert pd.left_check
    assert bd_lattice_classifier(STAIRCASE, [1, 3], exact=False).verdict is Verdict.BOUNDARY


def test_left_check_failure_is_reported_not_raised():
    pd = perron_data([[6, 2], [2, 3]], [1, 2])
    assert pd.lambda1 == 7
    assert pd.v1 == (2, 1)
    assert not pd.left_check
    assert pd.density == Fraction(3, 4)
    assert bd_lattice_classifier([[6, 2], [2, 3]], [1, 2]).verdict is Verdict.EQUIVALENT_TO_LATTICE


def test_large_subdominant_eigenvalue():
    report = bd_lattice_classifier([[1, 2], [8, 1]], [1, 1])
    assert report.perron.lambda1 == 5
    assert report.lambda_t == -3
    assert report.verdict is Verdict.NOT_EQUIVALENT_TO_LATTICE


def test_irrational_spectrum_uses_numeric_path():
    report = bd_lattice_classifier([[1, 1], [1, 0]], [1, 1])
    assert not report.perron.exact
    assert report.perron.lambda1 == pytest.approx((1 + 5**0.5) / 2)
    assert report.verdict is Verdict.EQUIVALENT_TO_LATTICE


def test_zero_sum_eigenspaces_are_skipped():
    report = bd_lattice_classifier([[1, 1, 0], [0, 1, 1], [1, 0, 1]], [1, 1, 1])
    assert report.verdict is Verdict.NO_APPLICABLE_EIGENVALUE
    assert report.t is None
    assert report.perron.lambda1 == pytest.approx(2)
    assert report.perron.density == pytest.approx(1.0)
    assert not report.perron.repeated_eigenvalues
    assert all(not e.has_nonzero_sum_eigenvector for e in report.perron.subdominant)


def test_one_by_one_matrix():
    report = bd_lattice_classifier([[3]], [1])
    assert report.perron.lambda1 == 3
    assert report.perron.density == 1
    assert report.verdict is Verdict.NO_APPLICABLE_EIGENVALUE


def test_non_primitive_matrix_is_rejected():
    assert not is_primitive([[1, 1], [0, 1]])
    with pytest.raises(NotPrimitiveError):
        perron_data([[1, 1], [0, 1]], [1, 1])


@pytest.mark.parametrize(
    "matrix, exponent",
    [
        (STAIRCASE, 1),
        ([[0, 1], [1, 1]], 2),
        ([[0, 1, 0], [0, 0, 1], [1, 1, 0]], 5),
        ([[0, 1], [1, 0]], None),
    ],
)
def test_primitivity_exponent(matrix, exponent):
    assert primitivity_exponent(matrix) == exponent


def test_permuting_prototiles_changes_nothing_essential():
    swapped = IntMatrix.of(STAIRCASE).permuted([1, 0])
    assert swapped.entries == ((6, 1), (9, 6))
    pd = perron_data(swapped, [3, 1])
    assert pd.lambda1 == 9
    assert pd.v1 == (1, 3)
    assert pd.density == Fraction(2, 3)
    assert bd_lattice_classifier(swapped, [3, 1]).verdict is Verdict.BOUNDARY


def test_bad_input_is_rejected():
    with pytest.raises(SpectralError):
        perron_data(STAIRCASE, [1])
    with pytest.raises(SpectralError):
        IntMatrix.of([[1, -1], [1, 1]])
    with pytest.raises(SpectralError):
        IntMatrix(((1, 2),))


def test_report_serialises_exact_values():
    data = bd_lattice_classifier(STAIRCASE, [1, 3]).as_dict()
    assert data["verdict"] == "Boundary"
    assert data["lambda1"] == 9
    assert data["v1"] == [3, 1]
    assert data["density"] == "2/3"
    assert data["subdominant"][0]["eigenvector"] == [-3, 1]
    assert data["left_check"] is True


@pytest.mark.parametrize("scale", [1e-12, 1.0, 1e12])
def test_eigenvector_sum_test_is_scale_free(scale):
    a = scale * np.array([[2.0, 1.0], [1.0, 2.0]])
    assert _has_nonzero_sum(a, 3 * scale)
    assert not _has_nonzero_sum(a, scale)

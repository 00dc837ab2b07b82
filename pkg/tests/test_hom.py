import numpy as np
import pytest

from mqsptool.mqsp_errors import CapacityError, ShapeMismatchError
from mqsptool.mqsp_hom import (
    HomBivariate,
    NCHomPoly,
    check_hom_conditions,
    decompose_homogeneous,
    homogeneous_degree,
    nc_build_product,
    nc_check_conditions,
    nc_evaluate,
    random_sample_tuples,
    synthesize_homogeneous,
)
from mqsptool.mqsp_laurent import MatLaurent2
from mqsptool.mqsp_uni import UnitarySeq, evaluate_chain, random_sequence


def _chain_ab(seq, a, b):
    result = seq.mats[0]
    for mat in seq.mats[1:]:
        result = result @ np.diag([a, b]) @ mat
    return result


def test_homogeneous_product_matches_the_chain(rng):
    seq = random_sequence(4, rng)
    poly = synthesize_homogeneous(seq)
    assert poly.degree == 4
    a, b = np.exp(2j * np.pi * rng.random(2))
    assert poly.evaluate(a, b) == pytest.approx(_chain_ab(seq, a, b))


def test_reduction_is_the_univariate_product(rng):
    seq = random_sequence(3, rng)
    poly = synthesize_homogeneous(seq)
    t = np.exp(0.7j)
    # F(t^2, 1) / t^3 = U0 diag(t, 1/t) U1 ...
    assert poly.reduce().evaluate(t) == pytest.approx(evaluate_chain(seq, t))


def test_homogeneous_products_pass_the_conditions(rng):
    for degree in range(1, 6):
        report = check_hom_conditions(synthesize_homogeneous(random_sequence(degree, rng)))
        assert report.passed, report.failed_checks()


def test_non_homogeneous_polynomial_fails_condition_one():
    poly = MatLaurent2({(1, 0): np.diag([1, 0]), (0, 0): np.diag([0, 1])})
    assert homogeneous_degree(poly) is None
    report = check_hom_conditions(poly, degree=1)
    assert not report.checks["Condition1_Homogeneous"]


def test_wrong_determinant_fails_condition_three():
    # homogeneous and unitary on the torus, but det F = -ab
    poly = MatLaurent2({(1, 0): np.diag([1, 0]), (0, 1): np.diag([0, -1])})
    report = check_hom_conditions(poly)
    assert report.checks["Condition1_Homogeneous"]
    assert report.checks["Condition2_Unitary"]
    assert not report.checks["Condition3_Determinant"]


def test_determinant_check_follows_the_tolerance(rng):
    scaled = synthesize_homogeneous(random_sequence(2, rng)).to_laurent2().scale(1 + 5e-10)
    assert check_hom_conditions(scaled, tol=1e-8).passed
    report = check_hom_conditions(scaled, tol=1e-12)
    assert not report.checks["Condition3_Determinant"]
    assert report.residuals["Condition3_Determinant"] == pytest.approx(1e-9, rel=1e-3)


def test_homogeneous_round_trip(rng):
    worst = 0.0
    for degree in range(1, 11):
        poly = synthesize_homogeneous(random_sequence(degree, rng))
        seq = decompose_homogeneous(poly)
        assert seq.degree == degree
        worst = max(worst, synthesize_homogeneous(seq).to_laurent2().max_difference(poly.to_laurent2()))
    assert worst <= 1e-8


def test_padding_when_the_reduced_degree_drops():
    # X diag(a, b) X^dag = diag(b, a), so F = ab I and the reduced polynomial is constant
    x_gate = np.array([[0, 1j], [1j, 0]])
    seq = UnitarySeq((np.eye(2), x_gate, x_gate.conj().T))
    poly = synthesize_homogeneous(seq)
    decomposed = decompose_homogeneous(poly)
    assert decomposed.degree == 2
    assert synthesize_homogeneous(decomposed).to_laurent2().max_difference(poly.to_laurent2()) <= 1e-8


def test_from_laurent2_refuses_negative_exponents():
    with pytest.raises(ShapeMismatchError):
        HomBivariate.from_laurent2(MatLaurent2({(1, -1): np.eye(2)}))


def test_nc_product_matches_operator_chain(rng):
    seq = random_sequence(2, rng, size=3)
    poly = nc_build_product(seq, 3)
    assert poly.n == 3 and poly.degree == 2
    ops = random_sample_tuples(3, [2], 1, rng)[0]
    expected = np.kron(seq.mats[0], np.eye(2))
    block = np.zeros((6, 6), dtype=complex)
    for j in range(3):
        selector = np.zeros((3, 3))
        selector[j, j] = 1
        block += np.kron(selector, ops[j])
    for mat in seq.mats[1:]:
        expected = expected @ block @ np.kron(mat, np.eye(2))
    assert nc_evaluate(poly, ops) == pytest.approx(expected)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("degree", [1, 2, 3])
def test_nc_products_pass_the_conditions(rng, n, degree):
    poly = nc_build_product(random_sequence(degree, rng, size=n), n)
    samples = random_sample_tuples(n, [1, 2, 3], 10, rng)
    samples += random_sample_tuples(n, [1, 2, 3], 10, rng, unitary=False)
    report = nc_check_conditions(poly, samples)
    assert report.passed, report.failed_checks()
    assert report.details["samples"] == 60
    assert report.details["unitary_samples"] == 30


def test_perturbed_nc_coefficient_fails(rng):
    poly = nc_build_product(random_sequence(2, rng), 2)
    coeffs = dict(poly.coeffs)
    word = sorted(coeffs)[0]
    coeffs[word] = coeffs[word] + 0.1 * np.eye(2)
    report = nc_check_conditions(NCHomPoly(2, 2, coeffs))
    assert not report.passed
    assert report.details["invalid_samples"]


def test_nc_word_capacity(rng):
    with pytest.raises(CapacityError):
        nc_build_product(random_sequence(13, rng), 2)


def test_nc_json_round_trip(rng):
    poly = nc_build_product(random_sequence(2, rng), 2)
    restored = NCHomPoly.from_json(poly.to_json())
    assert set(restored.coeffs) == set(poly.coeffs)
    for word, mat in poly.coeffs.items():
        assert restored.coefficient(word) == pytest.approx(mat)


def test_nc_operator_shape_errors(rng):
    poly = nc_build_product(random_sequence(1, rng), 2)
    with pytest.raises(ShapeMismatchError):
        nc_evaluate(poly, [np.eye(2)])
    with pytest.raises(ShapeMismatchError):
        nc_evaluate(poly, [np.eye(2), np.eye(3)])

import numpy as np
import pytest

from mqsptool.mqsp_alt import (
    DecompositionCertificate,
    Method,
    Verdict,
    build_alt_product,
    check_binec,
    corner_test,
    decompose_dega1,
    decompose_even_projection,
)
from mqsptool.mqsp_errors import ProjectorIdentityError, ShapeMismatchError
from mqsptool.mqsp_laurent import MatLaurent1, MatLaurent2, identity, primitive
from mqsptool.mqsp_uni import UnitarySeq, evaluate_chain, random_sequence


def _random_word(rng, d_a, d_b):
    letters = ["a"] * d_a + ["b"] * d_b
    rng.shuffle(letters)
    return "".join(letters)


def _random_projector(rng):
    vec = rng.normal(size=2) + 1j * rng.normal(size=2)
    vec /= np.linalg.norm(vec)
    return np.outer(vec, vec.conj())


def test_alt_product_matches_the_chain(rng):
    seq = random_sequence(4, rng, assignment="abba")
    poly = build_alt_product(seq)
    assert (poly.deg_a, poly.deg_b) == (2, 2)
    a, b = np.exp(2j * np.pi * rng.random(2))
    assert poly.evaluate((a, b)) == pytest.approx(evaluate_chain(seq, {"a": a, "b": b}))


def test_alt_product_needs_a_valid_word(rng):
    with pytest.raises(ShapeMismatchError):
        build_alt_product(random_sequence(2, rng))
    with pytest.raises(ShapeMismatchError):
        build_alt_product(random_sequence(2, rng, assignment="ac"))


def test_alt_products_pass_the_necessary_conditions(rng):
    for word in ["a", "ab", "bba", "abab", "aabbb"]:
        seq = random_sequence(len(word), rng, assignment=word)
        report = check_binec(build_alt_product(seq), word.count("a"), word.count("b"))
        assert report.passed, (word, report.failed_checks())


def test_parity_violation_fails_property_three(rng):
    seq = random_sequence(3, rng, assignment="aab")
    report = check_binec(build_alt_product(seq), 3, 0)
    assert not report.checks["Property3_Parity"]
    assert not report.checks["Property1_Degree"]


def test_certificate_invariants():
    with pytest.raises(ValueError):
        DecompositionCertificate(Verdict.DECOMPOSABLE, Method.CONSTRUCTIVE)
    with pytest.raises(ValueError):
        DecompositionCertificate(Verdict.NOT_DECOMPOSABLE, Method.CORNER)
    negative = DecompositionCertificate(Verdict.NOT_DECOMPOSABLE, Method.PERMUTATION_SEARCH)
    assert negative.label == "not-decomposable-by-search"
    assert negative.to_json()["corner_products"] == []


def test_corner_test_is_inconclusive_on_products(rng):
    for word in ["ab", "abab", "aabb", "baab"]:
        poly = build_alt_product(random_sequence(len(word), rng, assignment=word))
        certificate = corner_test(poly)
        assert certificate.verdict is Verdict.INCONCLUSIVE
        assert certificate.obstruction is None


def test_random_products_never_trigger_the_obstruction(rng):
    for _ in range(200):
        d_a, d_b = (int(d) for d in rng.integers(1, 4, size=2))
        word = _random_word(rng, d_a, d_b)
        poly = build_alt_product(random_sequence(len(word), rng, assignment=word))
        report = check_binec(poly, d_a, d_b)
        assert report.passed, (word, report.failed_checks())
        assert corner_test(poly).verdict is Verdict.INCONCLUSIVE


def test_corner_test_needs_both_degrees():
    poly = identity(2)
    certificate = corner_test(poly)
    assert certificate.verdict is Verdict.INCONCLUSIVE
    assert "reason" in certificate.details


def test_corner_test_detects_both_nonzero_products():
    eye = np.eye(2) / 2
    poly = MatLaurent2({(1, 1): eye, (1, -1): eye, (-1, -1): eye})
    certificate = corner_test(poly)
    assert certificate.verdict is Verdict.NOT_DECOMPOSABLE
    assert certificate.method is Method.CORNER
    first, second = certificate.obstruction
    assert first == pytest.approx(np.eye(2) / 4)
    assert second == pytest.approx(np.eye(2) / 4)


def test_even_projection_round_trip(rng):
    for degree in range(1, 6):
        # Pi(b) = U K U^dag with U a product of primitives in b
        unitary = identity(1)
        for _ in range(degree):
            unitary = unitary * primitive(_random_projector(rng))
        kernel = _random_projector(rng)
        proj_poly = unitary.rmul(kernel) * unitary.adjoint()
        found, psi = decompose_even_projection(proj_poly)
        rebuilt = found.rmul(np.outer(psi, psi.conj())) * found.adjoint()
        assert rebuilt.max_difference(proj_poly) <= 1e-8


def test_even_projection_rejects_non_projectors():
    with pytest.raises(ProjectorIdentityError):
        decompose_even_projection(identity(1))
    with pytest.raises(ProjectorIdentityError):
        decompose_even_projection(MatLaurent1({1: np.diag([1, 0]), -1: np.diag([0, 1])}))


def test_dega1_round_trip(rng):
    worst = 0.0
    for _ in range(100):
        d_b = int(rng.integers(0, 7))
        word = _random_word(rng, 1, d_b)
        poly = build_alt_product(random_sequence(len(word), rng, assignment=word))
        seq = decompose_dega1(poly)
        assert seq.assignment.count("a") <= 1
        worst = max(worst, build_alt_product(seq).max_difference(poly))
    assert worst <= 1e-8


def test_dega1_swaps_when_b_has_degree_one(rng):
    poly = build_alt_product(random_sequence(4, rng, assignment="aaba"))
    seq = decompose_dega1(poly)
    assert seq.assignment.count("b") <= 1
    assert build_alt_product(seq).max_difference(poly) <= 1e-8


def test_dega1_univariate_inputs(rng):
    only_b = build_alt_product(random_sequence(3, rng, assignment="bbb"))
    seq = decompose_dega1(only_b)
    assert set(seq.assignment) == {"b"}
    assert build_alt_product(seq).max_difference(only_b) <= 1e-8

    only_a = build_alt_product(random_sequence(2, rng, assignment="aa"))
    seq = decompose_dega1(only_a)
    assert set(seq.assignment) == {"a"}
    assert build_alt_product(seq).max_difference(only_a) <= 1e-8


def test_decomposed_sequences_are_special_unitary(rng):
    poly = build_alt_product(random_sequence(3, rng, assignment="bab"))
    seq = decompose_dega1(poly)
    assert isinstance(seq, UnitarySeq)
    for mat in seq.mats:
        assert np.linalg.det(mat) == pytest.approx(1.0)

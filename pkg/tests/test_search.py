import numpy as np
import pytest

from mqsptool.mqsp_alt import Method, Verdict, build_alt_product, counterexample_f22
from mqsptool.mqsp_laurent import constant, primitive
from mqsptool.mqsp_search import (
    SearchConfig,
    SearchSpace,
    assignment_words,
    certify,
    defect_gradient,
    gradient_search,
    permutation_decompose,
    unitarity_defect,
)
from mqsptool.mqsp_uni import random_sequence


def _settings(**search):
    section = {
        "DA": 2,
        "DB": 2,
        "GRID_N": None,
        "LEARNING_RATE": 0.05,
        "MAX_ITER": 100,
        "THRESHOLD": 1e-12,
        "RESTARTS": 3,
        "SYMMETRIC": True,
    }
    section.update(search)
    return {"RANDOM_SEED": 7, "SEARCH": section}


def test_search_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(d_a=0, d_b=0)
    with pytest.raises(ValueError):
        SearchConfig(d_a=3, d_b=1, grid_n=2)
    with pytest.raises(ValueError):
        SearchConfig(learning_rate=0.0)
    with pytest.raises(ValueError):
        SearchConfig(restarts=0)


def test_search_config_from_settings():
    cfg = SearchConfig.from_settings(_settings(DA=3, DB=1))
    assert (cfg.d_a, cfg.d_b, cfg.grid_n) == (3, 1, 3)
    assert cfg.seed == 7 and cfg.restarts == 3
    assert SearchConfig.from_settings(_settings(GRID_N=5)).grid_n == 5


def test_symmetric_space_keeps_the_reflection_symmetry(rng):
    space = SearchSpace(2, 2)
    p, q = space.to_polynomials(rng.normal(size=space.nparams))
    assert p.reflect().max_difference(p) < 1e-14
    assert q.reflect().max_difference(q.scale(-1)) < 1e-14
    assert space.nparams < SearchSpace(2, 2, symmetric=False).nparams


def test_pack_inverts_to_polynomials(rng):
    for symmetric in (True, False):
        space = SearchSpace(2, 1, symmetric)
        theta = rng.normal(size=space.nparams)
        assert space.pack(*space.to_polynomials(theta)) == pytest.approx(theta)


def test_quadrature_is_exact_on_the_minimal_grid(rng):
    space = SearchSpace(2, 2, symmetric=False)
    p, q = space.to_polynomials(rng.normal(size=space.nparams) / 3)
    assert unitarity_defect(p, q, 2) == pytest.approx(unitarity_defect(p, q, 8), abs=1e-12)


def test_defect_needs_a_large_enough_grid(rng):
    space = SearchSpace(3, 1)
    p, q = space.to_polynomials(rng.normal(size=space.nparams))
    with pytest.raises(ValueError):
        unitarity_defect(p, q, 2)


@pytest.mark.parametrize("symmetric", [True, False])
def test_gradient_matches_finite_differences(rng, symmetric):
    space = SearchSpace(2, 2, symmetric)
    theta = rng.normal(size=space.nparams) / 3
    _, grad = space.objective(theta, 2, gradient=True)
    step = 1e-6
    numeric = np.zeros_like(theta)
    for index in range(space.nparams):
        shift = np.zeros_like(theta)
        shift[index] = step
        numeric[index] = (space.objective(theta + shift, 2) - space.objective(theta - shift, 2)) / (2 * step)
    assert np.max(np.abs(grad - numeric)) <= 1e-5 * max(1.0, np.max(np.abs(numeric)))
    p, q = space.to_polynomials(theta)
    assert defect_gradient(p, q, 2, symmetric) == pytest.approx(grad)


def test_assignment_words():
    words = assignment_words(2, 2)
    assert words == ["aabb", "abab", "abba", "baab", "baba", "bbaa"]
    assert assignment_words(1, 0) == ["a"]


def test_search_starting_at_a_product_converges_immediately(rng):
    poly = build_alt_product(random_sequence(4, rng, assignment="abab"))
    cfg = SearchConfig(symmetric=False, restarts=1, max_iter=10)
    candidates = gradient_search(cfg, rng, initial_pair=(poly.entry(0, 0), poly.entry(0, 1)))
    assert len(candidates) == 1
    assert candidates[0].iterations == 0
    assert candidates[0].polynomial.max_difference(poly) < 1e-8


def test_search_reports_only_converged_restarts():
    cfg = SearchConfig(restarts=2, max_iter=1, threshold=1e-30, seed=3)
    assert gradient_search(cfg) == []


def test_permutation_search_finds_the_word(rng):
    for word in ["abba", "baab", "aabb"]:
        poly = build_alt_product(random_sequence(4, rng, assignment=word))
        certificate = permutation_decompose(poly, 2, 2)
        assert certificate.verdict is Verdict.DECOMPOSABLE
        assert certificate.details["word"] == word
        assert build_alt_product(certificate.witness).max_difference(poly) <= 1e-6


def test_permutation_search_rejects_the_counterexample():
    certificate = permutation_decompose(counterexample_f22().to_float(), 2, 2)
    assert certificate.verdict is Verdict.NOT_DECOMPOSABLE
    assert certificate.label == "not-decomposable-by-search"
    assert certificate.details["words_tried"] == 6


def test_permutation_search_is_inconclusive_on_degree_mismatch(rng):
    poly = build_alt_product(random_sequence(3, rng, assignment="aba"))
    certificate = permutation_decompose(poly, 2, 2)
    assert certificate.verdict is Verdict.INCONCLUSIVE
    assert "reason" in certificate.details


def test_permutation_search_pads_a_cancelling_pair(su2):
    upper = np.diag([1.0, 0.0]).astype(complex)
    lower = np.eye(2, dtype=complex) - upper
    # F(t, t) = E0: the two factors cancel on the diagonal
    poly = constant(su2(), 2) * primitive(upper, 2, 0) * primitive(lower, 2, 1)
    certificate = permutation_decompose(poly, 1, 1)
    assert certificate.verdict is Verdict.DECOMPOSABLE
    assert certificate.details["padded"] is True
    assert certificate.details["word"] == "ab"
    assert build_alt_product(certificate.witness).max_difference(poly) <= 1e-8


def test_padded_search_without_a_match_is_inconclusive(su2):
    vec = su2()[:, 0]
    proj = np.outer(vec, vec.conj())
    poly = constant(su2(), 2) * primitive(proj, 2, 0) * primitive(np.eye(2) - proj, 2, 1)
    certificate = permutation_decompose(poly, 1, 1)
    assert certificate.verdict is Verdict.INCONCLUSIVE
    assert certificate.details["padded"] is True
    assert certificate.residuals["best_match"] > 1e-6


def test_certify_necessary_conditions():
    report, certificate = certify(counterexample_f22().polynomial, 2, 2)
    assert not report.passed
    assert certificate.method is Method.NECESSARY_CONDITIONS
    assert certificate.verdict is Verdict.NOT_DECOMPOSABLE


def test_certify_corner():
    report, certificate = certify(counterexample_f22().to_float(), 2, 2)
    assert report.passed
    assert certificate.method is Method.CORNER
    assert certificate.obstruction is not None


def test_certify_constructive(rng):
    poly = build_alt_product(random_sequence(4, rng, assignment="babb"))
    _, certificate = certify(poly, 1, 3)
    assert certificate.verdict is Verdict.DECOMPOSABLE
    assert certificate.method is Method.CONSTRUCTIVE
    assert certificate.residuals["round_trip"] <= 1e-8


def test_certify_falls_back_to_permutation_search(rng):
    poly = build_alt_product(random_sequence(4, rng, assignment="abab"))
    _, certificate = certify(poly, 2, 2)
    assert certificate.verdict is Verdict.DECOMPOSABLE
    assert certificate.method is Method.PERMUTATION_SEARCH
    assert certificate.details["word"] == "abab"

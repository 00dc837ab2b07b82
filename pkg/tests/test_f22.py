import math
from fractions import Fraction

import numpy as np
import pytest

from mqsptool.constants import F22_COEFFICIENTS
from mqsptool.mqsp_alt import (
    Method,
    Verdict,
    check_binec,
    corner_test,
    counterexample_f22,
    family_coefficients,
    solve_family,
    verify_f22_identities,
)
from mqsptool.mqsp_errors import IdentityCheckError
from mqsptool.mqsp_laurent import Backend

ROOT_SMALL = complex(85 / 37, -29 / 37)
ROOT_LARGE = complex(9, -10)


def test_identities_hold_exactly():
    report = verify_f22_identities()
    assert report.passed
    for check in ("Unitarity", "MatrixUnitarity", "Determinant"):
        assert report.residuals[check] == 0.0
    assert report.details["scale_rational"] == "6/25"
    assert report.details["scale_radicand"] == "37/493"


def test_corner_product_diagonals():
    report = verify_f22_identities()
    assert report.details["corner_diagonals"] == [
        ["72/10625+72/10625i", "72/10625-72/10625i"],
        ["72/3625+72/3625i", "72/3625-72/3625i"],
    ]


def test_corner_test_on_the_exact_polynomial():
    example = counterexample_f22()
    assert example.polynomial.backend is Backend.EXACT
    certificate = corner_test(example.polynomial, scale_squared=example.scale_squared)
    assert certificate.verdict is Verdict.NOT_DECOMPOSABLE
    assert certificate.method is Method.CORNER
    assert certificate.to_json()["corner_products"][0][0] == ["72/10625", "72/10625"]


def test_scaled_polynomial_is_special_unitary():
    example = counterexample_f22()
    assert example.scale == pytest.approx(6 / 25 * math.sqrt(37 / 493), abs=1e-12)
    report = check_binec(example.to_float(), 2, 2)
    assert report.passed, report.failed_checks()


def test_perturbed_coefficient_breaks_an_identity():
    coefficients = dict(F22_COEFFICIENTS)
    re, im = coefficients["E"]
    coefficients["E"] = (re + Fraction(1, 1000), im)
    with pytest.raises(IdentityCheckError) as err:
        verify_f22_identities(counterexample_f22(coefficients))
    assert err.value.identity in {"Unitarity", "MatrixUnitarity", "Determinant", "Normalization"}


def test_counterexample_belongs_to_the_family():
    family = family_coefficients(1 + 1j, 3.0, ROOT_SMALL)
    for name, (re, im) in F22_COEFFICIENTS.items():
        if name == "E":
            continue
        assert complex(family[name]) == pytest.approx(complex(float(re), float(im)), abs=1e-12)


def test_solver_finds_both_roots():
    members = solve_family(1 + 1j, 3)
    roots = [member.alpha1 for member in members]
    assert len(members) == 2
    for expected in (ROOT_SMALL, ROOT_LARGE):
        assert min(abs(root - expected) for root in roots) < 1e-9

    small = members[int(np.argmin([abs(root - ROOT_SMALL) for root in roots]))]
    assert abs(small.e_ratio - complex(692 / 111, -719 / 222)) < 1e-9
    assert abs(small.scale - 6 / 25 * math.sqrt(37 / 493)) < 1e-9
    assert small.line_residual() < 1e-9
    assert not small.degenerate
    assert small.gamma0 == pytest.approx(3j * (1 + 1j))


def test_root_with_a_parallel_line_is_kept_and_flagged():
    members = solve_family(1 + 1j, 3)
    large = members[int(np.argmin([abs(member.alpha1 - ROOT_LARGE) for member in members]))]
    assert large.coefficients["D"] == pytest.approx(19 / 3, abs=1e-9)
    assert large.parallel_lines == ("D",)
    assert large.degenerate
    document = large.to_json()
    assert document["degenerate"] is True
    assert document["parallel_lines"] == ["D"]


def test_family_members_are_certified_counterexamples():
    members = [member for member in solve_family(1 + 1j, 3) if not member.degenerate]
    assert members
    for member in members:
        poly = member.polynomial()
        report = check_binec(poly, 2, 2)
        assert report.passed, (member.alpha1, report.failed_checks())
        assert corner_test(poly).verdict is Verdict.NOT_DECOMPOSABLE


def test_family_member_json():
    member = solve_family(1 + 1j, 3)[0]
    document = member.to_json()
    assert document["k"] == 3.0
    assert list(document["coefficients"]) == list("ABCDEFGHI")
    assert document["line_residual"] < 1e-9
    assert document["degenerate"] is False


def test_solver_refuses_zero_parameters():
    with pytest.raises(ValueError):
        solve_family(0, 3)
    with pytest.raises(ValueError):
        solve_family(1 + 1j, 0)

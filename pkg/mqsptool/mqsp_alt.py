"""
Alternating bivariate QSP module

Products U0 diag(c1, 1/c1) U1 ... diag(cd, 1/cd) Ud where every signal slot
carries either a or b according to an assignment word. Holds the necessary
condition certificate, the corner-coefficient obstruction, the constructive
decomposition for degree at most one in a variable, the exact 2+2
counterexample, and the solver for the family it belongs to.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import repeat
from typing import Any, Mapping, Optional, Union

import numpy as np

from mqsptool.constants import (
    BI_GRID_MIN,
    BI_RANDOM_SAMPLES,
    CHECK_SEED,
    CORNER_TOL,
    F22_COEFFICIENTS,
    F22_SCALE_RADICAND,
    F22_SCALE_RATIONAL,
    FAMILY_DEDUP_TOL,
    FAMILY_GRID_RADIUS,
    FAMILY_GRID_SIZE,
    FAMILY_LINE_TOL,
    FAMILY_MAX_ITER,
    FAMILY_PARALLEL_TOL,
    PEEL_TOL,
    POLY_UNITARY_TOL,
    VARIABLES,
)
from mqsptool.mqsp_errors import DecompositionError, IdentityCheckError, ProjectorIdentityError, ShapeMismatchError
from mqsptool.mqsp_hom import bivariate_grid
from mqsptool.mqsp_laurent import (
    Backend,
    GaussianRational,
    MatLaurent1,
    MatLaurent2,
    Parity,
    ScalarLaurent1,
    ScalarLaurent2,
    constant,
    identity,
    matrix_to_json,
    primitive,
    signal,
    su2_from_pair,
)
from mqsptool.mqsp_report import CertificateReport
from mqsptool.mqsp_uni import (
    PrimDecomp,
    UnitarySeq,
    concat_sequences,
    decomposition_to_sequence,
    expected_parity,
    haah_decompose,
    su2_residuals,
)

logger = logging.getLogger("mqsp_logger")


class Verdict(str, Enum):
    DECOMPOSABLE = "decomposable"
    NOT_DECOMPOSABLE = "not-decomposable"
    INCONCLUSIVE = "inconclusive"


class Method(str, Enum):
    CORNER = "corner"
    CONSTRUCTIVE = "constructive"
    NECESSARY_CONDITIONS = "necessary-conditions"
    PERMUTATION_SEARCH = "permutation-search"


@dataclass
class DecompositionCertificate:
    """Verdict on product decomposability with its witness or obstruction.

    A witness is carried exactly when the verdict is decomposable; the corner
    products are carried exactly when the corner test proved the negative.
    """

    verdict: Verdict
    method: Method
    witness: Optional[UnitarySeq] = None
    obstruction: Optional[tuple[np.ndarray, np.ndarray]] = None
    residuals: dict[str, float] = field(default_factory=dict)
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.verdict = Verdict(self.verdict)
        self.method = Method(self.method)
        if (self.witness is not None) != (self.verdict is Verdict.DECOMPOSABLE):
            raise ValueError("a witness is required exactly for a decomposable verdict")
        corner_negative = self.verdict is Verdict.NOT_DECOMPOSABLE and self.method is Method.CORNER
        if (self.obstruction is not None) != corner_negative:
            raise ValueError("corner products are required exactly for a corner-test negative")

    @property
    def label(self) -> str:
        if self.verdict is Verdict.NOT_DECOMPOSABLE and self.method is Method.PERMUTATION_SEARCH:
            return "not-decomposable-by-search"
        return self.verdict.value

    def to_json(self) -> dict[str, Any]:
        corner_products = []
        if self.obstruction is not None:
            for product in self.obstruction:
                backend = Backend.EXACT if product.dtype == object else Backend.FLOAT
                corner_products.append(matrix_to_json(product, backend))
        return {
            "verdict": self.verdict.value,
            "label": self.label,
            "method": self.method.value,
            "corner_products": corner_products,
            "witness": self.witness.to_json() if self.witness is not None else None,
            "residuals": dict(self.residuals),
            "details": self.details,
        }


# ---------- synthesis and necessary conditions ----------


def _word_indices(seq: UnitarySeq) -> list[int]:
    if seq.assignment is None:
        raise ShapeMismatchError("an alternating product needs an assignment word")
    invalid = sorted(set(seq.assignment) - set(VARIABLES))
    if invalid:
        raise ShapeMismatchError(f"assignment word '{seq.assignment}' uses labels {invalid} outside {VARIABLES}")
    return [VARIABLES.index(label) for label in seq.assignment]


def build_alt_product(seq: UnitarySeq) -> MatLaurent2:
    """U0 diag(c1, 1/c1) U1 ... diag(cd, 1/cd) Ud with c_i from the assignment word"""
    if seq.size != 2:
        raise ShapeMismatchError("alternating products need 2x2 unitaries")
    signals = [signal(2, var) for var in range(len(VARIABLES))]
    product = constant(seq.mats[0], 2)
    for var, mat in zip(_word_indices(seq), seq.mats[1:]):
        product = (product * signals[var]).rmul(mat)
    return product


def bivariate_samples(d_a: int, d_b: int, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    rng = rng or np.random.default_rng(CHECK_SEED)
    return bivariate_grid(max(BI_GRID_MIN, 2 * max(d_a, d_b) + 1), BI_RANDOM_SAMPLES, rng)


def check_binec(poly: MatLaurent2, d_a: int, d_b: int, tol: float = POLY_UNITARY_TOL) -> CertificateReport:
    """Degree bounds, SU(2)-valuedness on the torus and the parity in each variable.

    Exact polynomials are checked through the identities F adjoint(F) = I and
    det F = 1; float polynomials at sampled torus pairs.
    """
    report = CertificateReport("binec")
    report.record("Property1_Degree", poly.deg_a <= d_a and poly.deg_b <= d_b)

    if poly.backend is Backend.EXACT:
        gram = poly * poly.adjoint()
        det = poly.det()
        unit = 0.0 if gram == identity(2, Backend.EXACT) else gram.max_difference(identity(2))
        det_res = 0.0 if det == ScalarLaurent2({(0, 0): 1}, Backend.EXACT) else det.max_difference(
            ScalarLaurent2({(0, 0): 1})
        )
        report.record("Property2_SU2", unit == 0.0 and det_res == 0.0, max(unit, det_res))
    else:
        unit, det_res = su2_residuals(poly, bivariate_samples(poly.deg_a, poly.deg_b))
        report.record("Property2_SU2", max(unit, det_res) <= tol, max(unit, det_res))
    report.residuals["unitarity"] = unit
    report.residuals["determinant"] = det_res

    parity_ok = poly.parities == (expected_parity(d_a), expected_parity(d_b))
    report.record("Property3_Parity", parity_ok)
    report.details.update(
        {
            "deg_a": poly.deg_a,
            "deg_b": poly.deg_b,
            "d_a": d_a,
            "d_b": d_b,
            "parity": [parity.value for parity in poly.parities],
            "backend": poly.backend.value,
        }
    )
    return report


# ---------- corner obstruction ----------


def _is_nonzero(product: np.ndarray, tol: float) -> bool:
    if product.dtype == object:
        return any(bool(x) for x in product.flat)
    return float(np.linalg.norm(product)) > tol


def corner_test(
    poly: MatLaurent2, tol: float = CORNER_TOL, scale_squared: Union[Fraction, float, None] = None
) -> DecompositionCertificate:
    """Products of the extreme corner coefficients; both nonzero rules out any product form.

    Args:
        poly: the bivariate polynomial
        tol: norm above which a float product counts as nonzero
        scale_squared: global factor applied to both products (for rescaled inputs)

    Returns:
        DecompositionCertificate: not-decomposable with the corner products, or inconclusive
    """
    d_a, d_b = poly.deg_a, poly.deg_b
    if d_a == 0 or d_b == 0:
        return DecompositionCertificate(
            Verdict.INCONCLUSIVE, Method.CORNER, details={"reason": "corner test needs both degrees >= 1"}
        )

    upper = poly.coefficient((d_a, d_b))
    mixed = poly.coefficient((d_a, -d_b))
    lower = poly.coefficient((-d_a, -d_b))
    first = upper @ np.conj(mixed).T
    second = mixed @ np.conj(lower).T
    if scale_squared is not None:
        factor = GaussianRational.coerce(scale_squared) if poly.backend is Backend.EXACT else float(scale_squared)
        first = first * factor
        second = second * factor

    residuals = {}
    if poly.backend is Backend.FLOAT:
        residuals = {"corner_first": float(np.linalg.norm(first)), "corner_second": float(np.linalg.norm(second))}
    if _is_nonzero(first, tol) and _is_nonzero(second, tol):
        logger.debug("corner products are both nonzero at degrees (%s, %s)", d_a, d_b)
        return DecompositionCertificate(
            Verdict.NOT_DECOMPOSABLE, Method.CORNER, obstruction=(first, second), residuals=residuals
        )
    return DecompositionCertificate(Verdict.INCONCLUSIVE, Method.CORNER, residuals=residuals)


# ---------- constructive decomposition ----------


def decompose_even_projection(proj_poly: MatLaurent1, tol: float = 1e-9) -> tuple[MatLaurent1, np.ndarray]:
    """U(b) and psi with Pi(b) = U(b) |psi><psi| U(b)^dag for an even rank-one projector polynomial.

    The leading coefficient factors as |psi><phi|; conjugating by E_S(b) with
    S = |phi><phi| lowers the degree by two. The constant left at the end is
    the projector onto psi.
    """
    poly = proj_poly.to_float()
    if poly.parity is not Parity.EVEN:
        raise ProjectorIdentityError("projector polynomial is not even")
    self_adjoint = poly.max_difference(poly.adjoint())
    idempotent = (poly * poly).max_difference(poly)
    trace = (poly.entry(0, 0) + poly.entry(1, 1)).max_difference(ScalarLaurent1({0: 1}))
    if max(self_adjoint, idempotent, trace) > tol:
        raise ProjectorIdentityError(
            f"not a rank-one projector polynomial (adjoint {self_adjoint:.2e}, "
            f"idempotent {idempotent:.2e}, trace {trace:.2e})"
        )

    factors = []
    step = 0
    while poly.degree > 0:
        step += 1
        degree = poly.degree
        _, _, right = np.linalg.svd(poly.coefficient(degree))
        phi = right[0].conj()
        frame = primitive(np.outer(phi, phi.conj()))
        poly, overflow = (frame * poly * frame.adjoint()).truncate(degree - 2)
        if overflow > PEEL_TOL:
            raise DecompositionError(f"degree did not drop by two from {degree} (overflow {overflow:.3e})", step)
        factors.append(frame)

    _, vecs = np.linalg.eigh(poly.coefficient(0))
    psi = vecs[:, -1]
    unitary = identity(1)
    for frame in factors:
        unitary = unitary * frame.adjoint()
    return unitary, psi


def _sequence_from_univariate(poly: MatLaurent1, label: str) -> UnitarySeq:
    dec = haah_decompose(poly)
    return decomposition_to_sequence(dec, label * dec.degree)


def decompose_dega1(poly: MatLaurent2, tol: float = 1e-9) -> UnitarySeq:
    """Product sequence for F with degree at most one in a (or in b, by swapping).

    F(a, b) = E0(b) E_Pi(b)(a) with E0(b) = F(1, b) and Pi(b) = E0(b)^dag M1(b);
    then Pi = U |psi><psi| U^dag gives F = E0 U E_K(a) U^dag with K = |psi><psi|.
    """
    poly = poly.to_float()
    if poly.deg_b == 0:
        return _sequence_from_univariate(poly.swap().slice_a(0), "a")
    if poly.deg_a == 0:
        return _sequence_from_univariate(poly.slice_a(0), "b")
    if poly.deg_a > 1:
        if poly.deg_b > 1:
            raise DecompositionError(f"needs degree <= 1 in a or b, got ({poly.deg_a}, {poly.deg_b})")
        swapped = decompose_dega1(poly.swap(), tol)
        word = swapped.assignment.translate(str.maketrans("ab", "ba"))
        return UnitarySeq(swapped.mats, word)

    e0 = poly.at_a(1)
    try:
        unitary, psi = decompose_even_projection(e0.adjoint() * poly.slice_a(1), tol)
    except DecompositionError as err:
        raise ProjectorIdentityError(f"Pi(b) = F(1, b)^dag M1(b): {err}", err.step) from err
    logger.debug("degree-one decomposition: E0 degree %s, U degree %s", e0.degree, unitary.degree)

    left = _sequence_from_univariate(e0 * unitary, "b")
    middle = decomposition_to_sequence(PrimDecomp(np.eye(2), (np.outer(psi, psi.conj()),)), "a")
    right = _sequence_from_univariate(unitary.adjoint(), "b")
    return concat_sequences(left, middle, right)


# ---------- the 2+2 counterexample ----------


def bracket_pair(
    values: Mapping[str, Any], backend: Union[Backend, str] = Backend.FLOAT
) -> tuple[ScalarLaurent2, ScalarLaurent2]:
    """P and Q with the even symmetric / antisymmetric coefficient pattern of degree (2, 2)"""
    c = values
    p_coeffs = {
        (2, 2): c["A"], (0, 2): c["B"], (-2, 2): c["C"],
        (2, 0): c["D"], (0, 0): c["E"], (-2, 0): c["D"],
        (-2, -2): c["A"], (0, -2): c["B"], (2, -2): c["C"],
    }
    q_coeffs = {
        (2, 2): c["F"], (0, 2): c["G"], (-2, 2): c["H"],
        (2, 0): c["I"], (-2, 0): -c["I"],
        (-2, -2): -c["F"], (0, -2): -c["G"], (2, -2): -c["H"],
    }
    return ScalarLaurent2(p_coeffs, backend), ScalarLaurent2(q_coeffs, backend)


@dataclass(frozen=True)
class Counterexample22:
    """Rescaled-rational pair with F = scale * [[P, Q], [-Q*(1/a, 1/b), P*(1/a, 1/b)]]

    scale = scale_rational * sqrt(scale_radicand), kept symbolic.
    """

    p: ScalarLaurent2
    q: ScalarLaurent2
    scale_rational: Fraction = F22_SCALE_RATIONAL
    scale_radicand: Fraction = F22_SCALE_RADICAND

    @property
    def polynomial(self) -> MatLaurent2:
        return su2_from_pair(self.p, self.q)

    @property
    def scale_squared(self) -> Fraction:
        return self.scale_rational**2 * self.scale_radicand

    @property
    def scale(self) -> float:
        return float(self.scale_rational) * math.sqrt(self.scale_radicand)

    def to_float(self) -> MatLaurent2:
        return self.polynomial.to_float().scale(self.scale)


def counterexample_f22(
    coefficients: Optional[Mapping[str, tuple[Fraction, Fraction]]] = None,
) -> Counterexample22:
    """The exact counterexample; coefficients override the bracketed values A..I."""
    values = {
        name: GaussianRational(re, im) for name, (re, im) in (coefficients or F22_COEFFICIENTS).items()
    }
    p, q = bracket_pair(values, Backend.EXACT)
    return Counterexample22(p, q)


def verify_f22_identities(example: Optional[Counterexample22] = None) -> CertificateReport:
    """Exact symmetry, unitarity and normalization identities of the counterexample.

    Raises:
        IdentityCheckError: on the first identity that does not hold
    """
    example = example or counterexample_f22()
    p, q = example.p, example.q
    inverse_scale = 1 / example.scale_squared
    report = CertificateReport("f22")

    report.record("SymmetryP", p.reflect() == p, 0.0)
    report.record("SymmetryQ", q.reflect() == -q, 0.0)

    target = ScalarLaurent2({(0, 0): inverse_scale}, Backend.EXACT)
    modulus = p * p.conj_coefficients() - q * q.conj_coefficients()
    report.record("Unitarity", modulus == target, modulus.max_difference(target))

    poly = example.polynomial
    gram = poly * poly.adjoint()
    gram_target = identity(2, Backend.EXACT).scale(inverse_scale)
    report.record("MatrixUnitarity", gram == gram_target, gram.max_difference(gram_target))
    det = poly.det()
    report.record("Determinant", det == target, det.max_difference(target))

    report.record("LeadingModuli", p.coefficient((2, 2)).abs2() == q.coefficient((2, 2)).abs2(), 0.0)
    total = sum((value.abs2() for value in p.coeffs.values()), Fraction(0))
    total += sum((value.abs2() for value in q.coeffs.values()), Fraction(0))
    report.record("Normalization", example.scale_squared * total == 1, abs(float(example.scale_squared * total) - 1))

    corner = corner_test(poly, scale_squared=example.scale_squared)
    report.record("CornerObstruction", corner.verdict is Verdict.NOT_DECOMPOSABLE)
    if corner.obstruction is not None:
        report.details["corner_products"] = [matrix_to_json(m, Backend.EXACT) for m in corner.obstruction]
        report.details["corner_diagonals"] = [[str(m[0, 0]), str(m[1, 1])] for m in corner.obstruction]
    report.details.update(
        {
            "scale_rational": str(example.scale_rational),
            "scale_radicand": str(example.scale_radicand),
            "scale": example.scale,
        }
    )

    failed = report.failed_checks()
    if failed:
        raise IdentityCheckError(failed[0], f"residual {report.residuals.get(failed[0], 'n/a')}")
    return report


# ---------- the counterexample family ----------


def family_coefficients(alpha0: complex, k: float, alpha1: Any) -> dict[str, Any]:
    """Bracketed coefficients with A = F = 1 (alpha1 may be an array)"""
    alpha1 = np.asarray(alpha1, dtype=complex)
    gamma0 = 1j * k * alpha0
    gamma1 = alpha1 / (1j * k)
    one = np.ones_like(alpha1)
    return {
        "A": one,
        "B": -(alpha0 + alpha1),
        "C": alpha0 * alpha1,
        "D": -(gamma0 + gamma1),
        "F": one,
        "G": -(alpha0 + np.conj(alpha1)),
        "H": alpha0 * np.conj(alpha1),
        "I": -(gamma0 + np.conj(gamma1)),
    }


def line_values(c: Mapping[str, Any]) -> tuple[Any, Any, Any, Any]:
    """Right-hand sides r, s, t, u of X E* + E X* for X = A, C, D, B"""

    def herm(x: Any, y: Any) -> Any:
        return np.real(x * np.conj(y) + y * np.conj(x))

    r = herm(c["G"], c["I"]) - herm(c["B"], c["D"])
    s = -(herm(c["G"], c["I"]) + herm(c["B"], c["D"]))
    t = -(herm(c["A"], c["B"]) + herm(c["B"], c["C"]) + herm(c["F"], c["G"]) + herm(c["G"], c["H"]))
    u = herm(c["I"], c["H"]) - herm(c["F"], c["I"]) - herm(c["A"], c["D"]) - herm(c["C"], c["D"])
    return r, s, t, u


def _consistency_residual(alpha0: complex, k: float, alpha1: np.ndarray) -> np.ndarray:
    """Real residuals (N, 2) of the two equations making the four lines concurrent"""
    c = family_coefficients(alpha0, k, alpha1)
    r, s, t, u = line_values(c)
    a, b, cc, d = c["A"], c["B"], c["C"], c["D"]
    x = (d * np.conj(a) - a * np.conj(d)) * (r * cc - s * a) - (r * d - t * a) * (np.conj(a) * cc - np.conj(cc) * a)
    y = (r * d - t * a) * (b - np.conj(b)) - (r * b - u * a) * (d - np.conj(d))
    return np.stack([x.imag, y.imag], axis=-1)


def _newton_batch(alpha0: complex, k: float, starts: np.ndarray, max_iter: int) -> tuple[np.ndarray, np.ndarray]:
    """Damped Newton in (Re alpha1, Im alpha1) from every start at once.

    Returns the end points and their residual norms scaled by (1 + |alpha1|^2)^2.
    """
    z = np.array(starts, dtype=complex)
    active = np.ones(z.shape, dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            if not active.any():
                break
            idx = np.flatnonzero(active)
            za = z[idx]
            res = _consistency_residual(alpha0, k, za)
            h = 1e-6 * (1.0 + np.abs(za))
            d_re = (
                _consistency_residual(alpha0, k, za + h) - _consistency_residual(alpha0, k, za - h)
            ) / (2 * h)[:, None]
            d_im = (
                _consistency_residual(alpha0, k, za + 1j * h) - _consistency_residual(alpha0, k, za - 1j * h)
            ) / (2 * h)[:, None]
            det = d_re[:, 0] * d_im[:, 1] - d_im[:, 0] * d_re[:, 1]
            singular = ~np.isfinite(det) | (np.abs(det) < 1e-300)
            det = np.where(singular, 1.0, det)
            step_re = (-res[:, 0] * d_im[:, 1] + res[:, 1] * d_im[:, 0]) / det
            step_im = (-res[:, 1] * d_re[:, 0] + res[:, 0] * d_re[:, 1]) / det
            step = np.where(singular, 0.0, step_re + 1j * step_im)

            norm0 = np.linalg.norm(res, axis=1)
            damping = np.ones(len(za))
            trial = za + step
            for _ in range(30):
                worse = ~(np.linalg.norm(_consistency_residual(alpha0, k, trial), axis=1) < norm0) & (norm0 > 0)
                if not worse.any():
                    break
                damping[worse] *= 0.5
                trial[worse] = za[worse] + damping[worse] * step[worse]

            z[idx] = trial
            moved = np.abs(damping * step)
            done = singular | ~np.isfinite(trial) | (moved <= 1e-15 * (1.0 + np.abs(trial)))
            active[idx[done]] = False

        norms = np.linalg.norm(_consistency_residual(alpha0, k, z), axis=1) / (1.0 + np.abs(z) ** 2) ** 2
    return z, np.where(np.isfinite(norms), norms, np.inf)


@dataclass(frozen=True)
class CounterexampleFamily:
    """One member of the (alpha0, k) family; coefficients are bracketed (A = F = 1).

    A member is degenerate when a line is parallel to the A line and the four
    lines do not meet: alpha1 solves the concurrency system but E is not pinned
    down, so `polynomial()` is not a counterexample.
    """

    alpha0: complex
    k: float
    alpha1: complex
    coefficients: Mapping[str, complex]
    scale: float
    parallel_lines: tuple[str, ...] = ()

    @property
    def degenerate(self) -> bool:
        return self.line_residual() > FAMILY_LINE_TOL * (1.0 + abs(self.alpha1) ** 2)

    @property
    def gamma0(self) -> complex:
        return 1j * self.k * self.alpha0

    @property
    def gamma1(self) -> complex:
        return self.alpha1 / (1j * self.k)

    @property
    def e_ratio(self) -> complex:
        return self.coefficients["E"] / self.coefficients["A"]

    def line_residual(self) -> float:
        """Worst mismatch of X E* + E X* against r, s, t, u over the four lines"""
        c = self.coefficients
        e = c["E"]
        worst = 0.0
        for name, value in zip(("A", "C", "D", "B"), line_values(c)):
            lhs = c[name] * np.conj(e) + e * np.conj(c[name])
            worst = max(worst, abs(lhs - value))
        return float(worst)

    def polynomial(self) -> MatLaurent2:
        p, q = bracket_pair(self.coefficients)
        return su2_from_pair(p, q).scale(self.scale)

    def to_json(self) -> dict[str, Any]:
        return {
            "alpha0": [self.alpha0.real, self.alpha0.imag],
            "k": self.k,
            "alpha1": [self.alpha1.real, self.alpha1.imag],
            "e_ratio": [self.e_ratio.real, self.e_ratio.imag],
            "scale": self.scale,
            "line_residual": self.line_residual(),
            "degenerate": self.degenerate,
            "parallel_lines": list(self.parallel_lines),
            "coefficients": {name: [value.real, value.imag] for name, value in self.coefficients.items()},
        }


def _family_member(alpha0: complex, k: float, alpha1: complex) -> CounterexampleFamily:
    coeffs = {name: complex(value) for name, value in family_coefficients(alpha0, k, alpha1).items()}
    r, s, t, u = (float(v) for v in line_values(coeffs))
    e_re = r / (2 * coeffs["A"].real)
    parallel = tuple(
        n for n in ("C", "D", "B") if abs(coeffs[n].imag) <= FAMILY_PARALLEL_TOL * max(1.0, abs(coeffs[n]))
    )
    # imaginary part from the line with the steepest direction
    name, value = max(zip(("C", "D", "B"), (s, t, u)), key=lambda pair: abs(coeffs[pair[0]].imag))
    x = coeffs[name]
    e_im = (value / 2 - x.real * e_re) / x.imag if name not in parallel else 0.0
    coeffs["E"] = complex(e_re, e_im)

    total = 2 * sum(abs(v) ** 2 for n, v in coeffs.items() if n != "E") + abs(coeffs["E"]) ** 2
    ordered = {n: coeffs[n] for n in "ABCDEFGHI"}
    return CounterexampleFamily(
        complex(alpha0), float(k), complex(alpha1), ordered, 1.0 / math.sqrt(total), parallel_lines=parallel
    )


def solve_family(
    alpha0: complex,
    k: float,
    grid_size: int = FAMILY_GRID_SIZE,
    radius: float = FAMILY_GRID_RADIUS,
    max_iter: int = FAMILY_MAX_ITER,
    workers: int = 1,
) -> list[CounterexampleFamily]:
    """All distinct family members found by multi-start Newton, sorted by |alpha1|.

    Args:
        alpha0: first root, nonzero
        k: real ratio parameter, nonzero
        grid_size: starts per axis of the square grid
        radius: half-width of the start grid
        max_iter: Newton iterations per start
        workers: processes sharing the start grid

    Returns:
        list[CounterexampleFamily]: empty when no start converges; degenerate
        members (lines not concurrent) are kept and flagged
    """
    alpha0 = complex(alpha0)
    k = float(k)
    if alpha0 == 0 or k == 0:
        raise ValueError("alpha0 and k must be nonzero")

    axis = np.linspace(-radius, radius, grid_size)
    starts = (axis[None, :] + 1j * axis[:, None]).ravel()
    if workers > 1:
        chunks = np.array_split(starts, workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_newton_batch, repeat(alpha0), repeat(k), chunks, repeat(max_iter)))
        roots = np.concatenate([part[0] for part in parts])
        norms = np.concatenate([part[1] for part in parts])
    else:
        roots, norms = _newton_batch(alpha0, k, starts, max_iter)
    logger.debug("family solver: %s starts, %s converged", len(starts), int(np.sum(norms < 1e-10)))

    distinct: list[complex] = []
    for root, norm in zip(roots, norms):
        if norm < 1e-10 and all(abs(root - kept) > FAMILY_DEDUP_TOL for kept in distinct):
            distinct.append(complex(root))

    members = []
    for root in sorted(distinct, key=abs):
        member = _family_member(alpha0, k, root)
        if member.degenerate:
            logger.warning(
                "alpha1 = %s: lines %s parallel to A, E not determined (line residual %.3e)",
                root,
                ",".join(member.parallel_lines) or "-",
                member.line_residual(),
            )
        members.append(member)
    return members

"""
Homogeneous multivariate QSP module

Commuting homogeneous bivariate products U0 diag(a, b) U1 ... diag(a, b) Ud,
their characterization and decomposition through the exponent map j -> 2j - d,
and the non-commuting n-variable products over words with their necessary
conditions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Any, Mapping, Optional, Sequence, Union

import numpy as np

from mqsptool.constants import (
    BI_GRID_MIN,
    BI_RANDOM_SAMPLES,
    CHECK_SEED,
    NC_DET_RTOL,
    NC_MAX_WORDS,
    NC_SAMPLE_DIMS,
    NC_SAMPLES_PER_DIM,
    PEEL_TOL,
    POLY_UNITARY_TOL,
    TAU_TRUNC,
    UNITARY_TOL,
)
from mqsptool.mqsp_errors import CapacityError, DecompositionError, ShapeMismatchError
from mqsptool.mqsp_laurent import MatLaurent1, MatLaurent2, ScalarLaurent2, matrix_from_json, matrix_to_json
from mqsptool.mqsp_report import CertificateReport, create_storage_table, storage_table_to_frame
from mqsptool.mqsp_uni import (
    UnitarySeq,
    decomposition_to_sequence,
    haah_decompose,
    pad_decomposition,
    random_special_unitary,
)

logger = logging.getLogger("mqsp_logger")

SELECT_A = np.diag([1.0, 0.0]).astype(complex)
SELECT_B = np.diag([0.0, 1.0]).astype(complex)


@dataclass(frozen=True)
class HomBivariate:
    """F(a, b) = sum_j C_j a^j b^(d-j)"""

    degree: int
    coeffs: Mapping[int, np.ndarray]

    def __post_init__(self) -> None:
        kept = {}
        for j, mat in self.coeffs.items():
            j = int(j)
            if not 0 <= j <= self.degree:
                raise ShapeMismatchError(f"exponent {j} of a is outside 0..{self.degree}")
            mat = np.array(mat, dtype=complex)
            if mat.shape != (2, 2):
                raise ShapeMismatchError(f"coefficient of a^{j} has shape {mat.shape}")
            if np.linalg.norm(mat) > TAU_TRUNC:
                mat.setflags(write=False)
                kept[j] = mat
        object.__setattr__(self, "coeffs", kept)

    def coefficient(self, j: int) -> np.ndarray:
        return self.coeffs.get(j, np.zeros((2, 2), dtype=complex))

    def evaluate(self, a: complex, b: complex) -> np.ndarray:
        total = np.zeros((2, 2), dtype=complex)
        for j, mat in self.coeffs.items():
            total += mat * a**j * b ** (self.degree - j)
        return total

    def to_laurent2(self) -> MatLaurent2:
        return MatLaurent2({(j, self.degree - j): mat for j, mat in self.coeffs.items()})

    @classmethod
    def from_laurent2(cls, poly: MatLaurent2) -> HomBivariate:
        degree = homogeneous_degree(poly)
        if degree is None:
            raise ShapeMismatchError("polynomial is not homogeneous in (a, b) with nonnegative exponents")
        return cls(degree, {key[0]: mat for key, mat in poly.to_float().coeffs.items()})

    def reduce(self) -> MatLaurent1:
        """F(a, b) / (ab)^(d/2) as a polynomial in t = sqrt(a/b): exponent j -> 2j - d"""
        return MatLaurent1({2 * j - self.degree: mat for j, mat in self.coeffs.items()})


def homogeneous_degree(poly: MatLaurent2) -> Optional[int]:
    """Common total degree of all monomials, or None when not homogeneous"""
    totals = {key[0] + key[1] for key in poly.coeffs}
    if any(min(key) < 0 for key in poly.coeffs) or len(totals) > 1:
        return None
    return totals.pop() if totals else 0


def bivariate_grid(size: int, extra: int, rng: np.random.Generator) -> np.ndarray:
    """size x size equispaced torus pairs plus extra random pairs, shape (N, 2)"""
    roots = np.exp(2j * np.pi * np.arange(size) / size)
    grid = np.array([(a, b) for a in roots for b in roots])
    random_pairs = np.exp(2j * np.pi * rng.random((extra, 2)))
    return np.concatenate([grid, random_pairs])


def check_hom_conditions(
    poly: Union[HomBivariate, MatLaurent2], degree: Optional[int] = None, tol: float = POLY_UNITARY_TOL
) -> CertificateReport:
    """Conditions (i)-(iii): homogeneity, unitarity on torus pairs, det F = (ab)^d.

    `tol` bounds both the sampled unitarity residual and the coefficient-wise
    determinant residual.
    """
    report = CertificateReport("homogeneous")
    laurent = poly.to_laurent2() if isinstance(poly, HomBivariate) else poly.to_float()

    found = poly.degree if isinstance(poly, HomBivariate) else homogeneous_degree(laurent)
    if degree is None:
        degree = found if found is not None else max((sum(key) for key in laurent.coeffs), default=0)
    report.record("Condition1_Homogeneous", found == degree)

    rng = np.random.default_rng(CHECK_SEED)
    points = bivariate_grid(max(BI_GRID_MIN, degree + 1), BI_RANDOM_SAMPLES, rng)
    if laurent.is_zero():
        unitarity = float(np.sqrt(2.0))
    else:
        values = laurent.evaluate_many(points)
        gram = values @ np.conj(np.transpose(values, (0, 2, 1)))
        unitarity = float(np.linalg.norm(gram - np.eye(2), axis=(1, 2)).max())
    report.record("Condition2_Unitary", unitarity <= tol, unitarity)

    target = ScalarLaurent2({(degree, degree): 1})
    det_residual = laurent.det().max_difference(target)
    report.record("Condition3_Determinant", det_residual <= tol, det_residual)

    report.details.update({"d": degree, "samples": len(points)})
    return report


def synthesize_homogeneous(seq: UnitarySeq) -> HomBivariate:
    """U0 diag(a, b) U1 ... diag(a, b) Ud"""
    if seq.size != 2:
        raise ShapeMismatchError("homogeneous bivariate products need 2x2 unitaries")
    coeffs: dict[int, np.ndarray] = {0: seq.mats[0]}
    for mat in seq.mats[1:]:
        stepped: dict[int, np.ndarray] = {}
        for j, coeff in coeffs.items():
            stepped[j + 1] = stepped.get(j + 1, 0) + coeff @ SELECT_A @ mat
            stepped[j] = stepped.get(j, 0) + coeff @ SELECT_B @ mat
        coeffs = stepped
    return HomBivariate(seq.degree, coeffs)


def decompose_homogeneous(poly: HomBivariate, peel_tol: float = PEEL_TOL) -> UnitarySeq:
    """U0..Ud reproducing F through the univariate decomposition of its reduction"""
    reduced = poly.reduce()
    try:
        dec = haah_decompose(reduced, peel_tol)
        dec = pad_decomposition(dec, poly.degree)
    except DecompositionError as err:
        raise type(err)(f"homogeneous degree {poly.degree}: {err}", err.step) from err
    logger.debug("homogeneous degree %s reduced to univariate degree %s", poly.degree, reduced.degree)
    return decomposition_to_sequence(dec)


# ---------- non-commuting products ----------

Word = tuple[int, ...]


@dataclass(frozen=True)
class NCHomPoly:
    """sum over words w in {1..n}^d of C_w (x) X_w1 ... X_wd"""

    n: int
    degree: int
    coeffs: Mapping[Word, np.ndarray]

    def __post_init__(self) -> None:
        kept = {}
        for word, mat in self.coeffs.items():
            word = tuple(int(j) for j in word)
            if len(word) != self.degree or any(not 1 <= j <= self.n for j in word):
                raise ShapeMismatchError(f"word {word} is not a length-{self.degree} word over 1..{self.n}")
            mat = np.array(mat, dtype=complex)
            if mat.shape != (self.n, self.n):
                raise ShapeMismatchError(f"coefficient of word {word} has shape {mat.shape}")
            if np.linalg.norm(mat) > TAU_TRUNC:
                mat.setflags(write=False)
                kept[word] = mat
        object.__setattr__(self, "coeffs", kept)

    def coefficient(self, word: Sequence[int]) -> np.ndarray:
        return self.coeffs.get(tuple(word), np.zeros((self.n, self.n), dtype=complex))

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "d": self.degree,
            "coeffs": [{"word": list(word), "m": matrix_to_json(self.coeffs[word])} for word in sorted(self.coeffs)],
        }

    @classmethod
    def from_json(cls, document: Mapping[str, Any]) -> NCHomPoly:
        size = int(document["n"])
        coeffs = {tuple(r["word"]): matrix_from_json(r["m"], size) for r in document["coeffs"]}
        return cls(size, int(document["d"]), coeffs)


def nc_build_product(seq: UnitarySeq, n: int) -> NCHomPoly:
    """Word expansion of U0 diag(x1..xn) U1 ... diag(x1..xn) Ud"""
    if seq.size != n:
        raise ShapeMismatchError(f"sequence holds {seq.size}x{seq.size} matrices, expected {n}x{n}")
    if n**seq.degree > NC_MAX_WORDS:
        raise CapacityError(f"{n}^{seq.degree} words exceed the dense limit of {NC_MAX_WORDS}")
    selectors = [np.diag(np.eye(n)[j]).astype(complex) for j in range(n)]
    coeffs: dict[Word, np.ndarray] = {(): seq.mats[0]}
    for mat in seq.mats[1:]:
        coeffs = {
            word + (j + 1,): coeff @ selectors[j] @ mat
            for word, coeff in coeffs.items()
            for j in range(n)
            if np.linalg.norm(coeff @ selectors[j]) > TAU_TRUNC
        }
    return NCHomPoly(n, seq.degree, coeffs)


def _check_operators(poly: NCHomPoly, ops: Sequence[np.ndarray]) -> list[np.ndarray]:
    if len(ops) != poly.n:
        raise ShapeMismatchError(f"expected {poly.n} operators, got {len(ops)}")
    ops = [np.atleast_2d(np.asarray(op, dtype=complex)) for op in ops]
    size = ops[0].shape[0]
    for index, op in enumerate(ops):
        if op.shape != (size, size):
            raise ShapeMismatchError(f"operator {index + 1} has shape {op.shape}, expected ({size}, {size})")
    return ops


def nc_evaluate(poly: NCHomPoly, ops: Sequence[np.ndarray]) -> np.ndarray:
    """sum_w C_w (x) (X_w1 ... X_wd)"""
    ops = _check_operators(poly, ops)
    size = ops[0].shape[0]
    eye = np.eye(size, dtype=complex)
    total = np.zeros((poly.n * size, poly.n * size), dtype=complex)
    for word, coeff in poly.coeffs.items():
        word_op = reduce(lambda acc, j: acc @ ops[j - 1], word, eye)
        total += np.kron(coeff, word_op)
    return total


def random_sample_tuples(
    n: int,
    dims: Sequence[int],
    count: int,
    rng: np.random.Generator,
    unitary: bool = True,
) -> list[tuple[np.ndarray, ...]]:
    """Operator tuples for the non-commuting checks; non-unitary tuples are U diag(r) V."""
    samples = []
    for size in dims:
        for _ in range(count):
            ops = []
            for _ in range(n):
                op = random_special_unitary(size, rng) if size > 1 else np.exp(2j * np.pi * rng.random((1, 1)))
                if not unitary:
                    stretch = np.diag(rng.uniform(0.5, 2.0, size))
                    right = random_special_unitary(size, rng) if size > 1 else np.ones((1, 1))
                    op = op @ stretch @ right
                ops.append(op)
            samples.append(tuple(ops))
    return samples


def _is_unitary(op: np.ndarray) -> bool:
    return float(np.linalg.norm(op.conj().T @ op - np.eye(op.shape[0]))) <= UNITARY_TOL


def nc_check_conditions(
    poly: NCHomPoly,
    samples: Optional[Sequence[Sequence[np.ndarray]]] = None,
    rng: Optional[np.random.Generator] = None,
) -> CertificateReport:
    """Necessary conditions i)-iii) at sample operator tuples (sampling, not proof)."""
    if samples is None:
        rng = rng or np.random.default_rng(CHECK_SEED)
        samples = random_sample_tuples(poly.n, NC_SAMPLE_DIMS, NC_SAMPLES_PER_DIM, rng)
        samples += random_sample_tuples(poly.n, NC_SAMPLE_DIMS, NC_SAMPLES_PER_DIM, rng, unitary=False)

    report = CertificateReport("noncommuting")
    structural = all(
        len(word) == poly.degree and mat.shape == (poly.n, poly.n) for word, mat in poly.coeffs.items()
    )
    report.record("Condition1_Homogeneous", structural)

    storage_table = create_storage_table(["Unitary", "Determinant"], ["Dimension", "UnitarySample", "DetResidual"])
    worst_unit = 0.0
    worst_det = 0.0
    for index, ops in enumerate(samples):
        ops = _check_operators(poly, ops)
        value = nc_evaluate(poly, ops)
        unitary_sample = all(_is_unitary(op) for op in ops)
        unit_ok = True
        if unitary_sample:
            unit = float(np.linalg.norm(value @ value.conj().T - np.eye(value.shape[0])))
            worst_unit = max(worst_unit, unit)
            unit_ok = unit <= POLY_UNITARY_TOL
        target = np.linalg.det(reduce(np.matmul, ops)) ** poly.degree
        det_residual = abs(np.linalg.det(value) - target) / max(1.0, abs(target))
        worst_det = max(worst_det, det_residual)

        storage_table["Sample"].append(index)
        storage_table["Dimension"].append(ops[0].shape[0])
        storage_table["UnitarySample"].append(unitary_sample)
        storage_table["DetResidual"].append(float(det_residual))
        storage_table["Check_Unitary"].append(unit_ok)
        storage_table["Check_Determinant"].append(bool(det_residual <= NC_DET_RTOL))

    results = storage_table_to_frame(storage_table)
    report.record("Condition2_Unitary", bool(results["Check_Unitary"].all()), worst_unit)
    report.record("Condition3_Determinant", bool(results["Check_Determinant"].all()), worst_det)
    report.details.update(
        {
            "n": poly.n,
            "d": poly.degree,
            "samples": len(results),
            "unitary_samples": int(results["UnitarySample"].sum()),
            "invalid_samples": results.loc[~results["SampleIsValid"], "Sample"].tolist(),
        }
    )
    return report

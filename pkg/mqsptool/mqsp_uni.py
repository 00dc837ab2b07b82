"""
Univariate QSP module

Builds products U0 diag(t, 1/t) U1 ... diag(t, 1/t) Ud, checks the three
necessary properties (degree, SU(2)-valuedness, parity), and computes the
unique primitive decomposition E0 E_P1(t) ... E_Pd(t) by peeling the leading
projector from the right.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence, Union

import numpy as np

from mqsptool.constants import (
    CHECK_SEED,
    HAAH_MAX_DEGREE,
    HAAH_WARN_DEGREE,
    PEEL_TOL,
    POLY_UNITARY_TOL,
    TAU_TRUNC,
    UNI_RANDOM_SAMPLES,
    UNITARY_TOL,
)
from mqsptool.mqsp_errors import DecompositionError, DegreeLimitError, NotUnitaryError, ShapeMismatchError
from mqsptool.mqsp_laurent import (
    MatLaurent,
    MatLaurent1,
    Parity,
    constant,
    laurent_to_json,
    matrix_from_json,
    matrix_to_json,
    primitive,
    signal,
)
from mqsptool.mqsp_report import CertificateReport

logger = logging.getLogger("mqsp_logger")

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)


def special_unitary_residual(matrix: np.ndarray) -> float:
    """max(||U^dag U - I||, |det U - 1|)"""
    matrix = np.asarray(matrix, dtype=complex)
    eye = np.eye(matrix.shape[0])
    return max(
        float(np.linalg.norm(matrix.conj().T @ matrix - eye)),
        abs(complex(np.linalg.det(matrix)) - 1.0),
    )


def nearest_special_unitary(matrix: np.ndarray) -> np.ndarray:
    """Polar projection onto SU(n)"""
    left, _, right = np.linalg.svd(np.asarray(matrix, dtype=complex))
    unitary = left @ right
    return unitary / np.linalg.det(unitary) ** (1.0 / unitary.shape[0])


@dataclass(frozen=True)
class UnitarySeq:
    """U0, ..., Ud, optionally with the variable carried by each signal slot."""

    mats: tuple[np.ndarray, ...]
    assignment: Optional[str] = None

    def __post_init__(self) -> None:
        mats = tuple(np.array(mat, dtype=complex) for mat in self.mats)
        if not mats:
            raise ShapeMismatchError("a unitary sequence needs at least one matrix")
        size = mats[0].shape[0]
        for index, mat in enumerate(mats):
            if mat.shape != (size, size):
                raise ShapeMismatchError(f"matrix {index} has shape {mat.shape}, expected ({size}, {size})")
            residual = special_unitary_residual(mat)
            if residual > UNITARY_TOL:
                raise NotUnitaryError(index, residual)
            mat.setflags(write=False)
        if self.assignment is not None and len(self.assignment) != len(mats) - 1:
            raise ShapeMismatchError(
                f"assignment word '{self.assignment}' has length {len(self.assignment)}, expected {len(mats) - 1}"
            )
        object.__setattr__(self, "mats", mats)

    @property
    def degree(self) -> int:
        return len(self.mats) - 1

    @property
    def size(self) -> int:
        return self.mats[0].shape[0]

    def to_json(self) -> dict[str, Any]:
        return {
            "size": self.size,
            "mats": [matrix_to_json(mat) for mat in self.mats],
            "assignment": self.assignment,
        }

    @classmethod
    def from_json(cls, document: Mapping[str, Any]) -> UnitarySeq:
        size = int(document.get("size", 2))
        mats = [matrix_from_json(entries, size) for entries in document["mats"]]
        return cls(tuple(mats), document.get("assignment"))


@dataclass(frozen=True)
class PrimDecomp:
    """E0 and the rank-one projectors of F = E0 E_P1(t) ... E_Pd(t)"""

    e0: np.ndarray
    projs: tuple[np.ndarray, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "e0", np.array(self.e0, dtype=complex))
        projs = tuple(np.array(proj, dtype=complex) for proj in self.projs)
        for index, proj in enumerate(projs):
            residual = max(
                float(np.linalg.norm(proj @ proj - proj)),
                float(np.linalg.norm(proj - proj.conj().T)),
                abs(np.trace(proj) - 1.0),
            )
            if residual > UNITARY_TOL:
                raise DecompositionError(f"projector {index} is not a rank-one orthogonal projector", index)
        object.__setattr__(self, "projs", projs)

    @property
    def degree(self) -> int:
        return len(self.projs)

    def to_json(self, residual: Optional[float] = None) -> dict[str, Any]:
        document: dict[str, Any] = {
            "e0": matrix_to_json(self.e0),
            "projs": [matrix_to_json(proj) for proj in self.projs],
        }
        if residual is not None:
            document["residual"] = residual
        return document


@dataclass(frozen=True)
class PhaseSeq:
    phis: tuple[float, ...]

    def __post_init__(self) -> None:
        phis = tuple(float(phi) for phi in self.phis)
        if not phis or not all(np.isfinite(phis)):
            raise ValueError("phases must be a non-empty list of finite reals")
        object.__setattr__(self, "phis", phis)


# ---------- random instances ----------


def random_su2(rng: np.random.Generator) -> np.ndarray:
    """Haar-random SU(2) element from a normalized Gaussian quaternion"""
    quat = rng.normal(size=4)
    quat /= np.linalg.norm(quat)
    alpha = complex(quat[0], quat[1])
    beta = complex(quat[2], quat[3])
    return np.array([[alpha, beta], [-beta.conjugate(), alpha.conjugate()]])


def random_special_unitary(size: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random SU(n) element via QR with phase correction"""
    if size == 2:
        return random_su2(rng)
    gauss = (rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))) / np.sqrt(2)
    q_mat, r_mat = np.linalg.qr(gauss)
    diag = np.diagonal(r_mat)
    unitary = q_mat * (diag / np.abs(diag))
    return unitary / np.linalg.det(unitary) ** (1.0 / size)


def random_sequence(
    degree: int, rng: np.random.Generator, size: int = 2, assignment: Optional[str] = None
) -> UnitarySeq:
    return UnitarySeq(tuple(random_special_unitary(size, rng) for _ in range(degree + 1)), assignment)


# ---------- synthesis ----------


def _require_size(seq: UnitarySeq, size: int) -> None:
    if seq.size != size:
        raise ShapeMismatchError(f"expected {size}x{size} unitaries, got {seq.size}x{seq.size}")


def build_product(seq: UnitarySeq) -> MatLaurent1:
    """U0 diag(t, 1/t) U1 ... diag(t, 1/t) Ud"""
    _require_size(seq, 2)
    signal_t = signal()
    product = constant(seq.mats[0])
    for mat in seq.mats[1:]:
        product = (product * signal_t).rmul(mat)
    return product


def evaluate_chain(seq: UnitarySeq, values: Union[complex, Mapping[str, complex]]) -> np.ndarray:
    """Direct matrix-chain evaluation of a sequence at signal values.

    Args:
        seq: the unitary sequence
        values: one value for every slot, or a map from assignment label to value

    Returns:
        np.ndarray: the evaluated product
    """
    result = seq.mats[0]
    for slot, mat in enumerate(seq.mats[1:]):
        value = values if not isinstance(values, Mapping) else values[seq.assignment[slot]]
        result = result @ np.diag([value, 1.0 / value]) @ mat
    return result


# ---------- necessary conditions ----------


def univariate_samples(degree: int, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """2*degree + 5 equispaced torus points plus random ones"""
    rng = rng or np.random.default_rng(CHECK_SEED)
    count = 2 * degree + 5
    grid = np.exp(2j * np.pi * np.arange(count) / count)
    extra = np.exp(2j * np.pi * rng.random(UNI_RANDOM_SAMPLES))
    return np.concatenate([grid, extra]).reshape(-1, 1)


def su2_residuals(poly: MatLaurent, points: np.ndarray) -> tuple[float, float]:
    """Worst ||F F^dag - I|| and |det F - 1| over the given torus points"""
    if poly.is_zero():
        return float(np.sqrt(2.0)), 1.0
    values = poly.evaluate_many(points)
    gram = values @ np.conj(np.transpose(values, (0, 2, 1)))
    unit = np.linalg.norm(gram - np.eye(2), axis=(1, 2)).max()
    det = np.abs(np.linalg.det(values) - 1.0).max()
    return float(unit), float(det)


def expected_parity(degree: int) -> Parity:
    return Parity.EVEN if degree % 2 == 0 else Parity.ODD


def validate_univariate(poly: MatLaurent1, degree: int, tol: float = POLY_UNITARY_TOL) -> CertificateReport:
    """Checks degree <= d, SU(2)-valuedness on torus samples, and parity d mod 2."""
    report = CertificateReport("univariate")
    report.record("Property1_Degree", poly.degree <= degree)

    unit, det = su2_residuals(poly, univariate_samples(poly.degree))
    report.record("Property2_SU2", max(unit, det) <= tol, max(unit, det))
    report.residuals["unitarity"] = unit
    report.residuals["determinant"] = det

    report.record("Property3_Parity", poly.parity is expected_parity(degree))
    report.details.update({"degree": poly.degree, "parity": poly.parity.value, "d": degree})
    return report


# ---------- decomposition ----------


def leading_projector(lead: np.ndarray) -> np.ndarray:
    """P = C^dag C / Tr(C^dag C), snapped to the nearest rank-one projector."""
    gram = lead.conj().T @ lead
    trace = float(np.real(np.trace(gram)))
    if trace < TAU_TRUNC:
        raise DecompositionError(f"leading coefficient trace {trace:.3e} is below truncation")
    proj = gram / trace
    if np.linalg.norm(proj @ proj - proj) > 1e-12:
        _, vecs = np.linalg.eigh(proj)
        top = vecs[:, -1:]
        proj = top @ top.conj().T
    return proj


def haah_decompose(poly: MatLaurent1, peel_tol: float = PEEL_TOL) -> PrimDecomp:
    """Unique decomposition F = E0 E_P1(t) ... E_Pd(t) of an SU(2)-valued, parity-pure F.

    Each step takes P_d from the leading coefficient, multiplies by the inverse
    primitive E_{P_d}(1/t) = E_{I-P_d}(t) and requires the two overflow
    coefficients at +-(d+1) to vanish.
    """
    poly = poly.to_float()
    degree = poly.degree
    if degree > HAAH_MAX_DEGREE:
        raise DegreeLimitError(f"degree {degree} exceeds the float limit {HAAH_MAX_DEGREE}")
    if degree > HAAH_WARN_DEGREE:
        logger.warning("Decomposing degree %s in double precision; expect reduced accuracy.", degree)
    if poly.parity is Parity.MIXED:
        raise DecompositionError("polynomial has mixed parity", 0)

    eye = np.eye(2, dtype=complex)
    peeled = []
    step = 0
    while degree > 0:
        step += 1
        proj = leading_projector(poly.coefficient(degree))
        poly, overflow = (poly * primitive(eye - proj)).truncate(degree - 1)
        if overflow > peel_tol:
            raise DecompositionError(f"degree did not drop below {degree} (overflow {overflow:.3e})", step)
        logger.debug("peel step %s: degree %s -> %s, overflow %.3e", step, degree, poly.degree, overflow)
        peeled.append(proj)
        degree = poly.degree

    e0 = poly.coefficient(0)
    if special_unitary_residual(e0) > max(peel_tol, UNITARY_TOL):
        raise DecompositionError("remaining constant is not special-unitary", step + 1)
    return PrimDecomp(e0, tuple(reversed(peeled)))


def rebuild(dec: PrimDecomp, var: int = 0, nvars: int = 1, assignment: Optional[Sequence[int]] = None) -> MatLaurent:
    """E0 times the primitives; assignment gives the variable index of every factor."""
    product = constant(dec.e0, nvars)
    for index, proj in enumerate(dec.projs):
        factor_var = assignment[index] if assignment is not None else var
        product = product * primitive(proj, nvars, factor_var)
    return product


def pad_decomposition(dec: PrimDecomp, degree: int) -> PrimDecomp:
    """Appends cancelling pairs E_P(t) E_{I-P}(t) = I until there are `degree` projectors."""
    missing = degree - dec.degree
    if missing < 0 or missing % 2:
        raise DecompositionError(f"cannot pad {dec.degree} projectors to {degree}")
    proj = dec.projs[-1] if dec.projs else np.diag([1.0, 0.0]).astype(complex)
    pair = (proj, np.eye(2, dtype=complex) - proj)
    return PrimDecomp(dec.e0, dec.projs + pair * (missing // 2))


def projector_frame(proj: np.ndarray) -> np.ndarray:
    """V in SU(2) with V diag(1, 0) V^dag = P"""
    _, vecs = np.linalg.eigh(proj)
    top = vecs[:, -1]
    top = top / np.linalg.norm(top)
    return np.array([[top[0], -np.conj(top[1])], [top[1], np.conj(top[0])]])


def decomposition_to_sequence(dec: PrimDecomp, assignment: Optional[str] = None) -> UnitarySeq:
    """Converts E0 E_P1 ... E_Pd into U0 diag(t, 1/t) U1 ... Ud (non-canonical gauge)."""
    e0 = nearest_special_unitary(dec.e0)
    if not dec.projs:
        return UnitarySeq((e0,), assignment)
    frames = [projector_frame(proj) for proj in dec.projs]
    mats = [e0 @ frames[0]]
    for left, right in zip(frames, frames[1:]):
        mats.append(left.conj().T @ right)
    mats.append(frames[-1].conj().T)
    return UnitarySeq(tuple(mats), assignment)


def concat_sequences(*seqs: UnitarySeq) -> UnitarySeq:
    """Joins sequences, fusing the last unitary of one with the first of the next."""
    mats = list(seqs[0].mats)
    word = seqs[0].assignment or ""
    for seq in seqs[1:]:
        mats[-1] = mats[-1] @ seq.mats[0]
        mats.extend(seq.mats[1:])
        word += seq.assignment or ""
    return UnitarySeq(tuple(nearest_special_unitary(mat) for mat in mats), word or None)


# ---------- structured X-rotation products ----------


def xrotation(phi: float) -> np.ndarray:
    """exp(i phi X)"""
    return np.cos(phi) * np.eye(2) + 1j * np.sin(phi) * PAULI_X


def build_xrotation_product(phases: PhaseSeq, tol: float = 1e-10) -> tuple[MatLaurent1, CertificateReport]:
    """Product with U_k = exp(i phi_k X) and the symmetry report of its entries P, Q.

    With F = [[P, Q], [-Q*(1/t), P*(1/t)]], the checked identities are
    P*(-t) = (-1)^d P(t) and Q*(-t) = (-1)^(d-1) Q(t), plus F(1/t) = X F(t) X.
    """
    seq = UnitarySeq(tuple(xrotation(phi) for phi in phases.phis))
    poly = build_product(seq)
    degree = seq.degree
    p_poly = poly.entry(0, 0)
    q_poly = poly.entry(0, 1)

    report = CertificateReport("xrotation")
    lower_left = poly.entry(1, 0).max_difference(-q_poly.reflect().conj_coefficients())
    lower_right = poly.entry(1, 1).max_difference(p_poly.reflect().conj_coefficients())
    report.record("RowConvention", max(lower_left, lower_right) <= tol, max(lower_left, lower_right))

    sym_p = p_poly.conj_coefficients().sign_flip(0).max_difference(p_poly.scale((-1) ** degree))
    report.record("SymmetryP", sym_p <= tol, sym_p)
    sym_q = q_poly.conj_coefficients().sign_flip(0).max_difference(q_poly.scale((-1) ** (degree - 1)))
    report.record("SymmetryQ", sym_q <= tol, sym_q)

    conj_x = poly.reflect().max_difference(poly.lmul(PAULI_X).rmul(PAULI_X))
    report.record("XConjugation", conj_x <= tol, conj_x)

    report.details.update({"d": degree, "P": laurent_to_json(p_poly), "Q": laurent_to_json(q_poly)})
    return poly, report



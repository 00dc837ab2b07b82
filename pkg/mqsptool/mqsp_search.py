"""
Search module

Numerical search for bivariate SU(2)-valued polynomials F = [[P, Q], ...] by
gradient descent on the torus-averaged unitarity defect, and the tests deciding
whether a found polynomial is an alternating product.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Mapping, Optional

import numpy as np

from mqsptool.constants import (
    CORNER_TOL,
    POLY_UNITARY_TOL,
    SEARCH_LEARNING_RATE,
    SEARCH_MATCH_TOL,
    SEARCH_MAX_ITER,
    SEARCH_RESTARTS,
    SEARCH_THRESHOLD,
    VARIABLES,
)
from mqsptool.mqsp_alt import (
    DecompositionCertificate,
    Method,
    Verdict,
    build_alt_product,
    check_binec,
    corner_test,
    decompose_dega1,
)
from mqsptool.mqsp_errors import DecompositionError
from mqsptool.mqsp_laurent import MatLaurent2, ScalarLaurent2, su2_from_pair
from mqsptool.mqsp_report import CertificateReport
from mqsptool.mqsp_uni import PrimDecomp, decomposition_to_sequence, haah_decompose, pad_decomposition, rebuild

logger = logging.getLogger("mqsp_logger")

# peeling tolerance for polynomials that are only unitary to descent precision
SEARCH_PEEL_TOL = 1e-3


@dataclass(frozen=True)
class SearchConfig:
    d_a: int = 2
    d_b: int = 2
    grid_n: int = 2
    learning_rate: float = SEARCH_LEARNING_RATE
    max_iter: int = SEARCH_MAX_ITER
    threshold: float = SEARCH_THRESHOLD
    restarts: int = SEARCH_RESTARTS
    seed: int = 0
    symmetric: bool = True

    def __post_init__(self) -> None:
        if self.d_a < 0 or self.d_b < 0 or self.d_a + self.d_b == 0:
            raise ValueError(f"degree bounds ({self.d_a}, {self.d_b}) must be nonnegative and not both zero")
        if self.grid_n < max(self.d_a, self.d_b, 1):
            raise ValueError(f"grid parameter N = {self.grid_n} is below max(d_a, d_b) = {max(self.d_a, self.d_b)}")
        if self.learning_rate <= 0 or self.threshold <= 0:
            raise ValueError("learning rate and threshold must be positive")
        if self.max_iter < 1 or self.restarts < 1:
            raise ValueError("max_iter and restarts must be positive")

    @classmethod
    def from_settings(cls, settings: Mapping[str, Any]) -> SearchConfig:
        """Typed search configuration from the SEARCH section of a config dict"""
        search = settings["SEARCH"]
        d_a = int(search["DA"])
        d_b = int(search["DB"])
        return cls(
            d_a=d_a,
            d_b=d_b,
            grid_n=int(search.get("GRID_N") or max(d_a, d_b)),
            learning_rate=float(search["LEARNING_RATE"]),
            max_iter=int(search["MAX_ITER"]),
            threshold=float(search["THRESHOLD"]),
            restarts=int(search["RESTARTS"]),
            seed=int(settings["RANDOM_SEED"]),
            symmetric=bool(search.get("SYMMETRIC", True)),
        )


class SearchSpace:
    """Real parameters theta mapped linearly onto the coefficients of P and Q.

    Exponents run over -d..d in steps of two in each variable. The symmetric
    space keeps P(1/a, 1/b) = P(a, b) and Q(1/a, 1/b) = -Q(a, b).
    """

    def __init__(self, d_a: int, d_b: int, symmetric: bool = True) -> None:
        self.d_a = d_a
        self.d_b = d_b
        self.symmetric = symmetric
        self.exps_a = np.arange(-d_a, d_a + 1, 2)
        self.exps_b = np.arange(-d_b, d_b + 1, 2)
        self.shape = (2, len(self.exps_a), len(self.exps_b))
        self.basis = self._build_basis()
        self._weights = np.sum(np.abs(self.basis) ** 2, axis=0)
        self._grids: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def _build_basis(self) -> np.ndarray:
        _, size_a, size_b = self.shape
        columns = []
        for block, sign in ((0, 1), (1, -1)):
            seen: set[tuple[int, int]] = set()
            for i in range(size_a):
                for j in range(size_b):
                    if (i, j) in seen:
                        continue
                    col = np.zeros(self.shape, dtype=complex)
                    col[block, i, j] += 1
                    if self.symmetric:
                        mirror = (size_a - 1 - i, size_b - 1 - j)
                        seen |= {(i, j), mirror}
                        col[(block,) + mirror] += sign
                        if not np.any(col):
                            continue
                    columns.append(col.ravel())
                    columns.append(1j * col.ravel())
        return np.stack(columns, axis=1)

    @property
    def nparams(self) -> int:
        return self.basis.shape[1]

    def unpack(self, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        dense = (self.basis @ theta).reshape(self.shape)
        return dense[0], dense[1]

    def pack(self, p: ScalarLaurent2, q: ScalarLaurent2) -> np.ndarray:
        """Parameters closest to (P, Q); coefficients outside the space are dropped."""
        dense = np.zeros(self.shape, dtype=complex)
        for block, poly in enumerate((p.to_float(), q.to_float())):
            for (ea, eb), value in poly.coeffs.items():
                i = np.flatnonzero(self.exps_a == ea)
                j = np.flatnonzero(self.exps_b == eb)
                if i.size and j.size:
                    dense[block, i[0], j[0]] = value
        return np.real(self.basis.conj().T @ dense.ravel()) / self._weights

    def to_polynomials(self, theta: np.ndarray) -> tuple[ScalarLaurent2, ScalarLaurent2]:
        pairs = []
        for dense in self.unpack(theta):
            coeffs = {
                (int(ea), int(eb)): dense[i, j]
                for i, ea in enumerate(self.exps_a)
                for j, eb in enumerate(self.exps_b)
            }
            pairs.append(ScalarLaurent2(coeffs))
        return pairs[0], pairs[1]

    def _vandermonde(self, grid_n: int) -> tuple[np.ndarray, np.ndarray]:
        if grid_n not in self._grids:
            count = 2 * grid_n + 1
            roots = np.exp(2j * np.pi * np.arange(count) / count)
            self._grids[grid_n] = (roots[:, None] ** self.exps_a[None, :], roots[:, None] ** self.exps_b[None, :])
        return self._grids[grid_n]

    def objective(self, theta: np.ndarray, grid_n: int, gradient: bool = False):
        """Quadrature value of the defect, and optionally its gradient in theta"""
        van_a, van_b = self._vandermonde(grid_n)
        p_dense, q_dense = self.unpack(theta)
        p_grid = van_a @ p_dense @ van_b.T
        q_grid = van_a @ q_dense @ van_b.T
        residual = 1.0 - np.abs(p_grid) ** 2 - np.abs(q_grid) ** 2
        value = float(np.mean(residual**2))
        if not gradient:
            return value
        count = residual.size
        grad_p = -4.0 * (van_a.conj().T @ (residual * p_grid) @ van_b.conj()) / count
        grad_q = -4.0 * (van_a.conj().T @ (residual * q_grid) @ van_b.conj()) / count
        coeff_grad = np.concatenate([grad_p.ravel(), grad_q.ravel()])
        return value, np.real(self.basis.conj().T @ coeff_grad)


def _grid_values(poly: ScalarLaurent2, roots: np.ndarray) -> np.ndarray:
    values = np.zeros((roots.size, roots.size), dtype=complex)
    for (ea, eb), coeff in poly.to_float().coeffs.items():
        values += coeff * np.outer(roots**ea, roots**eb)
    return values


def unitarity_defect(p: ScalarLaurent2, q: ScalarLaurent2, grid_n: int) -> float:
    """Torus average of (1 - |P|^2 - |Q|^2)^2 by the trapezoidal rule on (2N+1)^2 roots of unity.

    The rule is exact when both degrees are at most N and the parities are pure.
    """
    degree = max(p.degrees + q.degrees)
    if degree > grid_n:
        raise ValueError(f"degree {degree} exceeds the grid parameter N = {grid_n}")
    count = 2 * grid_n + 1
    roots = np.exp(2j * np.pi * np.arange(count) / count)
    residual = 1.0 - np.abs(_grid_values(p, roots)) ** 2 - np.abs(_grid_values(q, roots)) ** 2
    return float(np.mean(residual**2))


def defect_gradient(
    p: ScalarLaurent2,
    q: ScalarLaurent2,
    grid_n: int,
    symmetric: bool = True,
    degrees: Optional[tuple[int, int]] = None,
) -> np.ndarray:
    """Gradient of the quadrature defect with respect to the free real parameters of (P, Q)"""
    d_a, d_b = degrees or (max(p.degrees[0], q.degrees[0]), max(p.degrees[1], q.degrees[1]))
    space = SearchSpace(d_a, d_b, symmetric)
    _, grad = space.objective(space.pack(p, q), grid_n, gradient=True)
    return grad


@dataclass(frozen=True)
class SearchCandidate:
    restart: int
    objective: float
    iterations: int
    p: ScalarLaurent2
    q: ScalarLaurent2

    @property
    def polynomial(self) -> MatLaurent2:
        return su2_from_pair(self.p, self.q)


def _descend(space: SearchSpace, theta: np.ndarray, cfg: SearchConfig) -> tuple[np.ndarray, float, int]:
    """Gradient descent; the step is halved while the objective would increase."""
    value, grad = space.objective(theta, cfg.grid_n, gradient=True)
    iteration = 0
    while iteration < cfg.max_iter and value > cfg.threshold:
        iteration += 1
        step = cfg.learning_rate
        trial = theta - step * grad
        trial_value = space.objective(trial, cfg.grid_n)
        while trial_value > value and step > 1e-12:
            step *= 0.5
            trial = theta - step * grad
            trial_value = space.objective(trial, cfg.grid_n)
        if trial_value > value:
            break
        theta = trial
        value, grad = space.objective(theta, cfg.grid_n, gradient=True)
    return theta, value, iteration


def gradient_search(
    cfg: SearchConfig,
    rng: Optional[np.random.Generator] = None,
    initial_pair: Optional[tuple[ScalarLaurent2, ScalarLaurent2]] = None,
    max_candidates: Optional[int] = None,
) -> list[SearchCandidate]:
    """Converged candidates from cfg.restarts random starts.

    Args:
        cfg: search configuration
        rng: random stream (defaults to one seeded with cfg.seed)
        initial_pair: (P, Q) used as the first start instead of a random one
        max_candidates: stop once this many restarts have converged

    Returns:
        list[SearchCandidate]: candidates whose objective reached cfg.threshold
    """
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    space = SearchSpace(cfg.d_a, cfg.d_b, cfg.symmetric)
    candidates = []
    for restart in range(cfg.restarts):
        if restart == 0 and initial_pair is not None:
            theta = space.pack(*initial_pair)
        else:
            theta = rng.normal(0.0, 1.0 / np.sqrt(space.nparams), space.nparams)
        theta, value, iterations = _descend(space, theta, cfg)
        if value > cfg.threshold:
            logger.warning(
                "Restart %s did not converge: objective %.3e after %s iterations.", restart, value, iterations
            )
            continue
        logger.debug("restart %s converged in %s iterations (objective %.3e)", restart, iterations, value)
        p, q = space.to_polynomials(theta)
        candidates.append(SearchCandidate(restart, value, iterations, p, q))
        if max_candidates is not None and len(candidates) >= max_candidates:
            break
    return candidates


# ---------- decomposition tests ----------


def assignment_words(d_a: int, d_b: int) -> list[str]:
    """All distinct words with d_a letters a and d_b letters b, in lexicographic order"""
    length = d_a + d_b
    words = []
    for positions in combinations(range(length), d_a):
        letters = ["b"] * length
        for position in positions:
            letters[position] = "a"
        words.append("".join(letters))
    return sorted(words)


def _match_words(
    dec: PrimDecomp, poly: MatLaurent2, d_a: int, d_b: int, tol: float
) -> tuple[Optional[DecompositionCertificate], float, int]:
    """First word whose rebuilt product matches F, else the best mismatch over all words"""
    best = np.inf
    words = assignment_words(d_a, d_b)
    for tried, word in enumerate(words, start=1):
        rebuilt = rebuild(dec, nvars=2, assignment=[VARIABLES.index(label) for label in word])
        mismatch = rebuilt.max_difference(poly)
        best = min(best, mismatch)
        if mismatch <= tol:
            logger.debug("word %s matches after %s of %s words (mismatch %.3e)", word, tried, len(words), mismatch)
            return (
                DecompositionCertificate(
                    Verdict.DECOMPOSABLE,
                    Method.PERMUTATION_SEARCH,
                    witness=decomposition_to_sequence(dec, word),
                    residuals={"match": mismatch},
                    details={"word": word, "words_tried": tried},
                ),
                float(mismatch),
                tried,
            )
    return None, float(best), len(words)


def permutation_decompose(
    poly: MatLaurent2,
    d_a: int,
    d_b: int,
    tol: float = SEARCH_MATCH_TOL,
    peel_tol: float = SEARCH_PEEL_TOL,
) -> DecompositionCertificate:
    """Tries every assignment of the primitive factors of F(t, t) to the variables a and b.

    When F(t, t) has fewer factors than d_a + d_b by an even number, the
    decomposition is padded with cancelling pairs first. A padded search that
    finds no word is inconclusive, since the padding is one choice among many.
    """
    poly = poly.to_float()
    try:
        dec = haah_decompose(poly.diagonal(), peel_tol)
    except DecompositionError as err:
        return DecompositionCertificate(
            Verdict.INCONCLUSIVE, Method.PERMUTATION_SEARCH, details={"reason": f"F(t, t): {err}"}
        )

    found = dec.degree
    if found != d_a + d_b:
        try:
            dec = pad_decomposition(dec, d_a + d_b)
        except DecompositionError:
            return DecompositionCertificate(
                Verdict.INCONCLUSIVE,
                Method.PERMUTATION_SEARCH,
                details={"reason": f"F(t, t) has {found} primitive factors, expected {d_a + d_b}"},
            )
        logger.debug("F(t, t) has %s factors; padded to %s", found, d_a + d_b)

    certificate, best, tried = _match_words(dec, poly, d_a, d_b, tol)
    padded = dec.degree != found
    if certificate is not None:
        certificate.details["padded"] = padded
        return certificate
    if padded:
        return DecompositionCertificate(
            Verdict.INCONCLUSIVE,
            Method.PERMUTATION_SEARCH,
            residuals={"best_match": best},
            details={
                "reason": f"no word matches after padding {found} primitive factors to {d_a + d_b}",
                "words_tried": tried,
                "padded": True,
            },
        )
    return DecompositionCertificate(
        Verdict.NOT_DECOMPOSABLE,
        Method.PERMUTATION_SEARCH,
        residuals={"best_match": best},
        details={"words_tried": tried, "padded": False},
    )


def certify(
    poly: MatLaurent2,
    d_a: int,
    d_b: int,
    corner_tol: float = CORNER_TOL,
    match_tol: float = SEARCH_MATCH_TOL,
    round_trip_tol: float = 1e-8,
    unitary_tol: float = POLY_UNITARY_TOL,
) -> tuple[CertificateReport, DecompositionCertificate]:
    """Necessary conditions, corner test, constructive decomposition, then permutation search.

    The first conclusive verdict is returned together with the condition report.
    """
    report = check_binec(poly, d_a, d_b, unitary_tol)
    if not report.passed:
        return report, DecompositionCertificate(
            Verdict.NOT_DECOMPOSABLE, Method.NECESSARY_CONDITIONS, details={"failed": report.failed_checks()}
        )

    corner = corner_test(poly, corner_tol)
    if corner.verdict is Verdict.NOT_DECOMPOSABLE:
        return report, corner

    if min(poly.deg_a, poly.deg_b) <= 1:
        try:
            witness = decompose_dega1(poly)
        except DecompositionError as err:
            logger.debug("constructive decomposition failed: %s", err)
        else:
            mismatch = build_alt_product(witness).max_difference(poly)
            if mismatch <= round_trip_tol:
                return report, DecompositionCertificate(
                    Verdict.DECOMPOSABLE,
                    Method.CONSTRUCTIVE,
                    witness=witness,
                    residuals={"round_trip": mismatch},
                    details={"word": witness.assignment},
                )
            logger.debug("constructive decomposition rebuilt with mismatch %.3e", mismatch)

    return report, permutation_decompose(poly, d_a, d_b, match_tol)

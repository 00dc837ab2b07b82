"""
Laurent polynomial module

Sparse scalar- and 2x2 matrix-valued Laurent polynomials in one or two
variables. Coefficients are either double-precision complex numbers or exact
Gaussian rationals; the backend is carried by the polynomial.
"""

from __future__ import annotations

import logging
from enum import Enum
from fractions import Fraction
from types import MappingProxyType
from typing import Any, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from mqsptool.constants import TAU_TRUNC, TORUS_TOL
from mqsptool.mqsp_errors import (
    BackendMismatchError,
    NotOnTorusError,
    PolynomialFormatError,
    ShapeMismatchError,
    VariableCountError,
)

logger = logging.getLogger("mqsp_logger")

Key = tuple[int, ...]


class Backend(str, Enum):
    """Coefficient arithmetic"""

    FLOAT = "float"
    EXACT = "exact"


class Parity(str, Enum):
    """Exponent class of one variable"""

    EVEN = "even"
    ODD = "odd"
    MIXED = "mixed"


class GaussianRational:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: Union[int, Fraction, str] = 0, im: Union[int, Fraction, str] = 0) -> None:
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, value: Any) -> GaussianRational:
        """Converts ints, Fractions and integer-valued floats/complexes without loss."""
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction, np.integer)):
            return cls(int(value) if isinstance(value, np.integer) else value)
        if isinstance(value, (float, complex, np.floating, np.complexfloating)):
            value = complex(value)
            if value.real.is_integer() and value.imag.is_integer():
                return cls(int(value.real), int(value.imag))
        raise BackendMismatchError(f"cannot use {value!r} as an exact coefficient")

    @staticmethod
    def _other(value: Any) -> Optional[GaussianRational]:
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return GaussianRational(value)
        return None

    def __add__(self, other: Any) -> GaussianRational:
        o = self._other(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: Any) -> GaussianRational:
        o = self._other(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: Any) -> GaussianRational:
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: Any) -> GaussianRational:
        o = self._other(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> GaussianRational:
        o = self._other(other)
        if o is None:
            return NotImplemented
        norm = o.abs2()
        if norm == 0:
            raise ZeroDivisionError("division by an exact zero")
        return self * GaussianRational(o.re / norm, -o.im / norm)

    def __rtruediv__(self, other: Any) -> GaussianRational:
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, exponent: int) -> GaussianRational:
        if not isinstance(exponent, int):
            return NotImplemented
        base = self if exponent >= 0 else GaussianRational(1) / self
        result = GaussianRational(1)
        for _ in range(abs(exponent)):
            result = result * base
        return result

    def __neg__(self) -> GaussianRational:
        return GaussianRational(-self.re, -self.im)

    def __pos__(self) -> GaussianRational:
        return self

    def __eq__(self, other: Any) -> bool:
        o = self._other(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return complex(self) == complex(other)
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return self.re != 0 or self.im != 0

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def conjugate(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def to_json(self) -> list[str]:
        return [str(self.re), str(self.im)]

    @classmethod
    def from_json(cls, pair: Sequence[Any]) -> GaussianRational:
        re, im = pair
        return cls(Fraction(str(re)), Fraction(str(im)))

    def __repr__(self) -> str:
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self) -> str:
        sign = "-" if self.im < 0 else "+"
        return f"{self.re}{sign}{abs(self.im)}i"


CScalar = Union[complex, GaussianRational]


def _degree_parity(keys: Iterable[Key], nvars: int) -> tuple[tuple[int, ...], tuple[Parity, ...]]:
    """Per-variable max |exponent| and exponent class of a key set."""
    keys = list(keys)
    degrees = []
    parities = []
    for var in range(nvars):
        exps = [key[var] for key in keys]
        degrees.append(max((abs(e) for e in exps), default=0))
        classes = {e % 2 for e in exps}
        if classes == {1}:
            parities.append(Parity.ODD)
        elif len(classes) > 1:
            parities.append(Parity.MIXED)
        else:
            parities.append(Parity.EVEN)
    return tuple(degrees), tuple(parities)


class _SparseLaurent:
    """Finite map exponent tuple -> coefficient, immutable after construction."""

    nvars: int = 1

    def __init__(self, coeffs: Optional[Mapping[Any, Any]] = None, backend: Union[Backend, str] = Backend.FLOAT):
        self._backend = Backend(backend)
        store: dict[Key, Any] = {}
        for key, value in (coeffs or {}).items():
            norm_key = self._normalize_key(key)
            coerced = self._coerce_value(value)
            store[norm_key] = store[norm_key] + coerced if norm_key in store else coerced
        self._set_store(store)

    # ---------- construction helpers ----------

    def _set_store(self, store: dict[Key, Any]) -> None:
        kept = {}
        for key, value in store.items():
            if not self._negligible(value):
                kept[key] = self._freeze(value)
        self._coeffs = kept
        self._degrees, self._parities = _degree_parity(kept.keys(), self.nvars)

    def _new(self, store: dict[Key, Any], backend: Optional[Backend] = None):
        poly = object.__new__(type(self))
        poly._backend = backend or self._backend
        poly._set_store(store)
        return poly

    def _normalize_key(self, key: Any) -> Key:
        if isinstance(key, (int, np.integer)):
            key = (int(key),)
        key = tuple(int(k) for k in key)
        if len(key) != self.nvars:
            raise VariableCountError(f"exponent {key} does not match {self.nvars} variable(s)")
        return key

    def _coerce_value(self, value: Any) -> Any:
        raise NotImplementedError

    def _negligible(self, value: Any) -> bool:
        raise NotImplementedError

    def _freeze(self, value: Any) -> Any:
        return value

    def _zero(self) -> Any:
        raise NotImplementedError

    def _mul_values(self, left: Any, right: Any) -> Any:
        raise NotImplementedError

    def _conj_value(self, value: Any) -> Any:
        raise NotImplementedError

    # ---------- accessors ----------

    @property
    def backend(self) -> Backend:
        return self._backend

    @property
    def coeffs(self) -> Mapping[Key, Any]:
        return MappingProxyType(self._coeffs)

    @property
    def degrees(self) -> tuple[int, ...]:
        return self._degrees

    @property
    def parities(self) -> tuple[Parity, ...]:
        return self._parities

    def coefficient(self, key: Any) -> Any:
        """Stored coefficient, or zero when the key is absent"""
        return self._coeffs.get(self._normalize_key(key), self._zero())

    def is_zero(self) -> bool:
        return not self._coeffs

    def __len__(self) -> int:
        return len(self._coeffs)

    def __iter__(self):
        return iter(sorted(self._coeffs))

    # ---------- algebra ----------

    def _check_compatible(self, other: _SparseLaurent) -> None:
        if other.nvars != self.nvars:
            raise VariableCountError(f"cannot combine {self.nvars}- and {other.nvars}-variable polynomials")
        if other.backend != self.backend:
            raise BackendMismatchError(f"cannot combine {self.backend.value} and {other.backend.value} backends")

    def __add__(self, other: _SparseLaurent):
        if not isinstance(other, _SparseLaurent):
            return NotImplemented
        self._check_compatible(other)
        store = dict(self._coeffs)
        for key, value in other._coeffs.items():
            store[key] = store[key] + value if key in store else value
        return self._new(store)

    def __neg__(self):
        return self._new({key: -value for key, value in self._coeffs.items()})

    def __sub__(self, other: _SparseLaurent):
        if not isinstance(other, _SparseLaurent):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: Any):
        if isinstance(other, _SparseLaurent):
            return multiply(self, other)
        if np.ndim(other) != 0:
            return NotImplemented
        return self.scale(other)

    __array_ufunc__ = None  # keep numpy from broadcasting over polynomials

    def scale(self, factor: Any):
        """Multiplies every coefficient by a scalar"""
        if self._backend is Backend.EXACT:
            factor = GaussianRational.coerce(factor)
        return self._new({key: value * factor for key, value in self._coeffs.items()})

    def reflect(self):
        """Negates every exponent: f(t) -> f(1/t)"""
        return self._new({tuple(-k for k in key): value for key, value in self._coeffs.items()})

    def conj_coefficients(self):
        """Coefficient-wise complex conjugation (exponents unchanged)"""
        return self._new({key: self._conj_value(value) for key, value in self._coeffs.items()})

    def sign_flip(self, var: int):
        """f(.., c, ..) -> f(.., -c, ..) in variable var"""
        return self._new(
            {key: (-value if key[var] % 2 else value) for key, value in self._coeffs.items()}
        )

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, _SparseLaurent):
            return NotImplemented
        if other.nvars != self.nvars or set(self._coeffs) != set(other._coeffs):
            return False
        return all(np.all(self._coeffs[key] == other._coeffs[key]) for key in self._coeffs)

    __hash__ = None  # type: ignore[assignment]

    def max_difference(self, other: _SparseLaurent) -> float:
        """Largest coefficient-wise (Frobenius) distance, in float"""
        if other.nvars != self.nvars:
            raise VariableCountError("cannot compare polynomials in a different number of variables")
        left = self.to_float()._coeffs
        right = other.to_float()._coeffs
        worst = 0.0
        for key in set(left) | set(right):
            diff = left.get(key, self._zero_float()) - right.get(key, self._zero_float())
            worst = max(worst, float(np.linalg.norm(diff)))
        return worst

    def _zero_float(self) -> Any:
        raise NotImplementedError

    def to_float(self):
        """Float copy of this polynomial (identity for the float backend)"""
        if self._backend is Backend.FLOAT:
            return self
        return self._new({key: self._value_to_float(value) for key, value in self._coeffs.items()}, Backend.FLOAT)

    def _value_to_float(self, value: Any) -> Any:
        raise NotImplementedError

    # ---------- evaluation ----------

    def _monomial(self, key: Key, point: Sequence[Any]) -> Any:
        value = 1
        for exponent, coordinate in zip(key, point):
            value = value * coordinate**exponent
        return value

    def _check_point(self, point: Sequence[Any]) -> tuple[bool, tuple[Any, ...]]:
        """Returns (exact, normalized point); raises when off the torus."""
        if isinstance(point, (int, float, complex, GaussianRational, np.number)):
            point = (point,)
        point = tuple(point)
        if len(point) != self.nvars:
            raise VariableCountError(f"point {point} does not match {self.nvars} variable(s)")
        exact = self._backend is Backend.EXACT and all(isinstance(z, (GaussianRational, int)) for z in point)
        if exact:
            point = tuple(GaussianRational.coerce(z) for z in point)
            for z in point:
                if z.abs2() != 1:
                    raise NotOnTorusError(f"{z} is not on the unit circle")
            return True, point
        point = tuple(complex(z) for z in point)
        for z in point:
            if abs(abs(z) - 1.0) > TORUS_TOL:
                raise NotOnTorusError(f"|{z}| = {abs(z)} is not 1")
        return False, point

    def evaluate(self, point: Any) -> Any:
        """Sum of coefficient times monomial at a torus point"""
        exact, point = self._check_point(point)
        poly = self if exact else self.to_float()
        total = self._zero() if exact else self._zero_float()
        for key, value in poly._coeffs.items():
            total = total + value * self._monomial(key, point)
        return total

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        """Float evaluation at an (N, nvars) array of torus points."""
        points = np.asarray(points, dtype=complex).reshape(-1, self.nvars)
        if np.any(np.abs(np.abs(points) - 1.0) > TORUS_TOL):
            raise NotOnTorusError("evaluation grid contains a point off the unit circle")
        poly = self.to_float()
        total = np.zeros((points.shape[0],) + np.shape(self._zero_float()), dtype=complex)
        for key, value in poly._coeffs.items():
            mono = np.prod(points ** np.array(key), axis=1)
            total += np.multiply.outer(mono, value)
        return total

    # ---------- two-variable helpers ----------

    def _require_vars(self, nvars: int) -> None:
        if self.nvars != nvars:
            raise VariableCountError(f"operation needs a {nvars}-variable polynomial")

    def __repr__(self) -> str:
        terms = ", ".join(f"{key}: {value!r}" for key, value in sorted(self._coeffs.items()))
        return f"{type(self).__name__}({{{terms}}}, backend={self._backend.value!r})"


class ScalarLaurent(_SparseLaurent):
    """Scalar-valued Laurent polynomial"""

    def _coerce_value(self, value: Any) -> Any:
        if self._backend is Backend.EXACT:
            return GaussianRational.coerce(value)
        return complex(value)

    def _negligible(self, value: Any) -> bool:
        if self._backend is Backend.EXACT:
            return not value
        return abs(value) <= TAU_TRUNC

    def _zero(self) -> Any:
        return GaussianRational() if self._backend is Backend.EXACT else 0j

    def _zero_float(self) -> Any:
        return 0j

    def _mul_values(self, left: Any, right: Any) -> Any:
        return left * right

    def _conj_value(self, value: Any) -> Any:
        return value.conjugate()

    def _value_to_float(self, value: Any) -> Any:
        return complex(value)

    def adjoint(self) -> ScalarLaurent:
        """Conjugated coefficients with negated exponents"""
        return self.reflect().conj_coefficients()


class ScalarLaurent1(ScalarLaurent):
    nvars = 1


class ScalarLaurent2(ScalarLaurent):
    nvars = 2


class MatLaurent(_SparseLaurent):
    """2x2 matrix-valued Laurent polynomial"""

    size = 2

    def _coerce_value(self, value: Any) -> np.ndarray:
        if self._backend is Backend.EXACT:
            rows = [list(row) for row in value]
            matrix = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
            for i, row in enumerate(rows):
                for j, entry in enumerate(row):
                    matrix[i, j] = GaussianRational.coerce(entry)
        else:
            matrix = np.array(value, dtype=complex)
        if matrix.shape != (self.size, self.size):
            raise ShapeMismatchError(f"coefficient has shape {matrix.shape}, expected (2, 2)")
        return matrix

    def _negligible(self, value: np.ndarray) -> bool:
        if self._backend is Backend.EXACT:
            return not any(bool(x) for x in value.flat)
        return float(np.linalg.norm(value)) <= TAU_TRUNC

    def _freeze(self, value: np.ndarray) -> np.ndarray:
        value = np.array(value, dtype=value.dtype)
        value.setflags(write=False)
        return value

    def _zero(self) -> np.ndarray:
        if self._backend is Backend.EXACT:
            return exact_matrix([[0, 0], [0, 0]])
        return np.zeros((2, 2), dtype=complex)

    def _zero_float(self) -> np.ndarray:
        return np.zeros((2, 2), dtype=complex)

    def _mul_values(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        return left @ right

    def _conj_value(self, value: np.ndarray) -> np.ndarray:
        return np.conj(value)

    def _value_to_float(self, value: np.ndarray) -> np.ndarray:
        return np.array([[complex(x) for x in row] for row in value], dtype=complex)

    def adjoint(self) -> MatLaurent:
        """Conjugate-transposed coefficients with negated exponents"""
        return self._new({tuple(-k for k in key): np.conj(value).T for key, value in self._coeffs.items()})

    def lmul(self, matrix: Any) -> MatLaurent:
        """Constant matrix times polynomial"""
        matrix = self._coerce_value(matrix)
        return self._new({key: matrix @ value for key, value in self._coeffs.items()})

    def rmul(self, matrix: Any) -> MatLaurent:
        """Polynomial times constant matrix"""
        matrix = self._coerce_value(matrix)
        return self._new({key: value @ matrix for key, value in self._coeffs.items()})

    def entry(self, row: int, col: int) -> ScalarLaurent:
        """Scalar polynomial of one matrix entry"""
        scalar_type = ScalarLaurent1 if self.nvars == 1 else ScalarLaurent2
        return scalar_type({key: value[row, col] for key, value in self._coeffs.items()}, self._backend)

    def det(self) -> ScalarLaurent:
        """Determinant polynomial from coefficient convolutions"""
        return self.entry(0, 0) * self.entry(1, 1) - self.entry(0, 1) * self.entry(1, 0)

    def truncate(self, max_degree: int) -> tuple[MatLaurent, float]:
        """Drops keys with any |exponent| > max_degree; returns the largest dropped norm."""
        kept = {}
        dropped = 0.0
        for key, value in self._coeffs.items():
            if max(abs(k) for k in key) > max_degree:
                dropped = max(dropped, float(np.linalg.norm(self._value_to_float(value))))
            else:
                kept[key] = value
        return self._new(kept), dropped


class MatLaurent1(MatLaurent):
    """2x2 matrix Laurent polynomial in one variable t"""

    nvars = 1

    @property
    def degree(self) -> int:
        return self._degrees[0]

    @property
    def parity(self) -> Parity:
        return self._parities[0]

    def embed(self, var: int) -> MatLaurent2:
        """The same polynomial as a two-variable one in variable var"""
        return MatLaurent2(
            {((k[0], 0) if var == 0 else (0, k[0])): value for k, value in self._coeffs.items()}, self._backend
        )


class MatLaurent2(MatLaurent):
    """2x2 matrix Laurent polynomial in two commuting variables a, b"""

    nvars = 2

    @property
    def deg_a(self) -> int:
        return self._degrees[0]

    @property
    def deg_b(self) -> int:
        return self._degrees[1]

    def swap(self) -> MatLaurent2:
        """Exchanges the roles of a and b"""
        return self._new({(k[1], k[0]): value for k, value in self._coeffs.items()})

    def diagonal(self) -> MatLaurent1:
        """F(t, t)"""
        store: dict[Key, Any] = {}
        for key, value in self._coeffs.items():
            new_key = (key[0] + key[1],)
            store[new_key] = store[new_key] + value if new_key in store else value
        return _rebuild_as(MatLaurent1, store, self._backend)

    def slice_a(self, exponent: int) -> MatLaurent1:
        """Coefficient of a^exponent as a polynomial in b"""
        store = {(k[1],): value for k, value in self._coeffs.items() if k[0] == exponent}
        return _rebuild_as(MatLaurent1, store, self._backend)

    def at_a(self, value: Any) -> MatLaurent1:
        """F(value, b) for a unit-modulus constant value"""
        value = GaussianRational.coerce(value) if self._backend is Backend.EXACT else complex(value)
        store: dict[Key, Any] = {}
        for key, coeff in self._coeffs.items():
            term = coeff * value ** key[0]
            new_key = (key[1],)
            store[new_key] = store[new_key] + term if new_key in store else term
        return _rebuild_as(MatLaurent1, store, self._backend)


def _rebuild_as(cls: type, store: dict[Key, Any], backend: Backend):
    poly = object.__new__(cls)
    poly._backend = backend
    poly._set_store(store)
    return poly


def multiply(f: _SparseLaurent, g: _SparseLaurent):
    """Coefficient-wise convolution of two polynomials of the same kind."""
    f._check_compatible(g)
    if isinstance(f, MatLaurent) != isinstance(g, MatLaurent):
        raise ShapeMismatchError("cannot multiply a scalar and a matrix polynomial")
    store: dict[Key, Any] = {}
    for key_f, value_f in f._coeffs.items():
        for key_g, value_g in g._coeffs.items():
            key = tuple(x + y for x, y in zip(key_f, key_g))
            term = f._mul_values(value_f, value_g)
            store[key] = store[key] + term if key in store else term
    return f._new(store)


def adjoint(f: _SparseLaurent):
    return f.adjoint()


def evaluate(f: _SparseLaurent, point: Any):
    return f.evaluate(point)


def degree_parity(f: _SparseLaurent) -> tuple[tuple[int, ...], tuple[Parity, ...]]:
    """Per-variable degrees and parity flags (zero polynomial: degree 0, even)."""
    return f.degrees, f.parities


# ---------- constructors ----------


def exact_matrix(rows: Sequence[Sequence[Any]]) -> np.ndarray:
    """Object array of Gaussian rationals"""
    matrix = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, row in enumerate(rows):
        for j, entry in enumerate(row):
            matrix[i, j] = GaussianRational.coerce(entry)
    return matrix


def identity(nvars: int = 1, backend: Union[Backend, str] = Backend.FLOAT) -> MatLaurent:
    cls = MatLaurent1 if nvars == 1 else MatLaurent2
    return cls({(0,) * nvars: [[1, 0], [0, 1]]}, backend)


def constant(matrix: Any, nvars: int = 1, backend: Union[Backend, str] = Backend.FLOAT) -> MatLaurent:
    cls = MatLaurent1 if nvars == 1 else MatLaurent2
    return cls({(0,) * nvars: matrix}, backend)


def primitive(proj: Any, nvars: int = 1, var: int = 0, backend: Union[Backend, str] = Backend.FLOAT) -> MatLaurent:
    """E_P(c) = c P + c^-1 (I - P) in variable var"""
    backend = Backend(backend)
    proj = exact_matrix(proj) if backend is Backend.EXACT else np.asarray(proj, dtype=complex)
    eye = exact_matrix([[1, 0], [0, 1]]) if backend is Backend.EXACT else np.eye(2, dtype=complex)
    up = tuple(1 if i == var else 0 for i in range(nvars))
    down = tuple(-1 if i == var else 0 for i in range(nvars))
    cls = MatLaurent1 if nvars == 1 else MatLaurent2
    return cls({up: proj, down: eye - proj}, backend)


def signal(nvars: int = 1, var: int = 0, backend: Union[Backend, str] = Backend.FLOAT) -> MatLaurent:
    """diag(c, 1/c) in variable var"""
    return primitive([[1, 0], [0, 0]], nvars, var, backend)


def su2_from_pair(p: ScalarLaurent, q: ScalarLaurent) -> MatLaurent:
    """[[P, Q], [-Q*(1/c), P*(1/c)]] with coefficient-wise conjugation."""
    p._check_compatible(q)
    cls = MatLaurent1 if p.nvars == 1 else MatLaurent2
    zero = p._zero()
    keys = set(p.coeffs) | set(q.coeffs)
    keys |= {tuple(-k for k in key) for key in keys}
    store = {}
    for key in keys:
        mirror = tuple(-k for k in key)
        p_key = p.coeffs.get(key, zero)
        q_key = q.coeffs.get(key, zero)
        p_mirror = p.coeffs.get(mirror, zero)
        q_mirror = q.coeffs.get(mirror, zero)
        store[key] = [[p_key, q_key], [-q_mirror.conjugate(), p_mirror.conjugate()]]
    return cls(store, p.backend)


# ---------- JSON codec ----------


def scalar_to_json(value: Any, backend: Backend) -> list[Any]:
    if backend is Backend.EXACT:
        return GaussianRational.coerce(value).to_json()
    value = complex(value)
    return [value.real, value.imag]


def scalar_from_json(pair: Any, backend: Backend) -> CScalar:
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise ValueError(f"expected [re, im], got {pair!r}")
    if backend is Backend.EXACT:
        return GaussianRational.from_json(pair)
    return complex(float(pair[0]), float(pair[1]))


def matrix_to_json(matrix: Any, backend: Union[Backend, str] = Backend.FLOAT) -> list[list[Any]]:
    """Row-major list of [re, im] pairs"""
    backend = Backend(backend)
    return [scalar_to_json(x, backend) for x in np.asarray(matrix).flat]


def matrix_from_json(entries: Any, size: int = 2, backend: Union[Backend, str] = Backend.FLOAT) -> np.ndarray:
    backend = Backend(backend)
    if not isinstance(entries, list) or len(entries) != size * size:
        raise ValueError(f"expected {size * size} [re, im] entries")
    values = [scalar_from_json(pair, backend) for pair in entries]
    matrix = np.empty((size, size), dtype=object if backend is Backend.EXACT else complex)
    for index, value in enumerate(values):
        matrix[divmod(index, size)] = value
    return matrix


def laurent_to_json(f: _SparseLaurent) -> dict[str, Any]:
    """JSON document of a polynomial, coefficients in sorted exponent order"""
    records = []
    for key in sorted(f.coeffs):
        value = f.coeffs[key]
        if isinstance(f, MatLaurent):
            records.append({"e": list(key), "m": matrix_to_json(value, f.backend)})
        else:
            records.append({"e": list(key), "c": scalar_to_json(value, f.backend)})
    return {"vars": f.nvars, "backend": f.backend.value, "coeffs": records}


def laurent_from_json(document: Any) -> _SparseLaurent:
    """Parses a polynomial document; errors name the offending coefficient record."""
    if not isinstance(document, dict):
        raise PolynomialFormatError("polynomial document must be a JSON object")
    try:
        nvars = int(document["vars"])
        backend = Backend(document.get("backend", Backend.FLOAT.value))
        records = document["coeffs"]
    except (KeyError, TypeError, ValueError) as err:
        raise PolynomialFormatError(f"missing or invalid header field: {err}") from err
    if nvars not in (1, 2):
        raise PolynomialFormatError(f"vars must be 1 or 2, got {nvars}")
    if not isinstance(records, list):
        raise PolynomialFormatError("coeffs must be a list")
    scalar = bool(records) and all(isinstance(r, dict) and "c" in r and "m" not in r for r in records)
    store: dict[Key, Any] = {}
    for index, record in enumerate(records):
        try:
            key = tuple(int(e) for e in record["e"])
            if len(key) != nvars:
                raise ValueError(f"exponent {list(key)} has {len(key)} entries, expected {nvars}")
            value = scalar_from_json(record["c"], backend) if scalar else matrix_from_json(record["m"], 2, backend)
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as err:
            raise PolynomialFormatError(str(err), record=index) from err
        if key in store:
            raise PolynomialFormatError(f"duplicate exponent {list(key)}", record=index)
        store[key] = value
    if scalar:
        cls = ScalarLaurent1 if nvars == 1 else ScalarLaurent2
    else:
        cls = MatLaurent1 if nvars == 1 else MatLaurent2
    return cls(store, backend)

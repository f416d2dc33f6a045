"""Scalar special functions, sparse bivariate series and the small DFT solves.

Everything here is pure and works on plain Python complex numbers or numpy
arrays of dtype complex128.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "reciprocal_gamma",
    "vandermonde_matrix",
    "vandermonde_solve",
    "Poly1",
    "BiSeries",
    "eval_biseries",
    "CoeffTable",
    "series_log_ratio",
    "series_exp",
]

# Lanczos approximation, g = 7, 9 terms.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _sin_pi(z: complex) -> complex:
    # sin(pi z) with the integer part removed first, so zeros stay sharp.
    n = round(z.real)
    s = cmath.sin(math.pi * (z - n))
    return -s if n % 2 else s


def reciprocal_gamma(z: complex) -> complex:
    """Return ``1/Gamma(z)`` for complex ``z``.

    Lanczos approximation for ``Re z >= 1/2`` and the reflection formula
    ``1/Gamma(z) = sin(pi z) Gamma(1 - z) / pi`` otherwise.  The function is
    entire; exact non-positive integers return exactly 0.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        return 0j
    if z.real < 0.5:
        return _sin_pi(z) / (math.pi * reciprocal_gamma(1.0 - z))
    z = z - 1.0
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return cmath.exp(t - (z + 0.5) * cmath.log(t)) / (_SQRT_2PI * acc)


def vandermonde_matrix(k: int) -> np.ndarray:
    """``V[j, m] = exp(2 i pi m j / k)``."""
    idx = np.arange(k)
    return np.exp(2j * np.pi * np.outer(idx, idx) / k)


def vandermonde_solve(k: int, rhs: Sequence[complex]) -> np.ndarray:
    """Solve ``V x = rhs`` with ``V`` the k-point DFT matrix.

    Uses ``V^{-1} = conj(V) / k``, i.e. a forward FFT divided by k.
    """
    if k < 1:
        raise ValueError("k must be positive")
    rhs = np.asarray(rhs, dtype=complex)
    if rhs.shape != (k,):
        raise ValueError(f"expected {k} right-hand side entries, got {rhs.shape}")
    return np.fft.fft(rhs) / k


@dataclass(frozen=True)
class Poly1:
    """Univariate polynomial, ``coeffs[i]`` multiplies ``x**i``."""

    coeffs: tuple[complex, ...]

    def __init__(self, coeffs: Iterable[complex]):
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in coeffs))

    def degree(self) -> int:
        for i in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[i] != 0:
                return i
        return -1

    def __call__(self, x):
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def jet(self, order: int) -> "Poly1":
        return Poly1(self.coeffs[: order + 1])

    def reciprocal_jet(self, order: int) -> np.ndarray:
        """Taylor coefficients of ``1/P`` up to ``x**order``."""
        a = np.zeros(order + 1, dtype=complex)
        a[: min(len(self.coeffs), order + 1)] = self.coeffs[: order + 1]
        if a[0] == 0:
            raise ZeroDivisionError("P(0) = 0")
        b = np.zeros(order + 1, dtype=complex)
        b[0] = 1.0 / a[0]
        for n in range(1, order + 1):
            b[n] = -np.dot(a[1 : n + 1], b[n - 1 :: -1][:n]) / a[0]
        return b


@dataclass(frozen=True)
class BiSeries:
    """Sparse polynomial in (x, y): ``terms[(m, n)]`` multiplies ``x**m y**n``.

    Never truncated implicitly; callers that need a bound in ``y`` use
    :meth:`truncate`.
    """

    terms: Mapping[tuple[int, int], complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (m, n), c in dict(self.terms).items():
            if m < 0 or n < 0:
                raise ValueError(f"negative exponent in term {(m, n)}")
            c = complex(c)
            if c != 0:
                key = (int(m), int(n))
                clean[key] = clean.get(key, 0j) + c
        object.__setattr__(self, "terms", dict(sorted(clean.items())))
        # y-degree -> x polynomial coefficients, used by the vectorized evaluator
        rows: dict[int, np.ndarray] = {}
        for (m, n), c in clean.items():
            row = rows.get(n)
            if row is None or len(row) <= m:
                grown = np.zeros(m + 1, dtype=complex)
                if row is not None:
                    grown[: len(row)] = row
                row = grown
            row[m] += c
            rows[n] = row
        object.__setattr__(self, "_rows", rows)

    @classmethod
    def from_list(cls, rows: Iterable[Sequence[float]]) -> "BiSeries":
        """Build from ``[[m, n, re, im], ...]``."""
        terms: dict[tuple[int, int], complex] = {}
        for row in rows:
            m, n, re, im = row
            if int(m) != m or int(n) != n:
                raise ValueError(f"non-integer exponent in {row!r}")
            key = (int(m), int(n))
            terms[key] = terms.get(key, 0j) + complex(re, im)
        return cls(terms)

    def to_list(self) -> list[list[float]]:
        return [[m, n, c.real, c.imag] for (m, n), c in self.terms.items()]

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "BiSeries") -> "BiSeries":
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, 0j) + c
        return BiSeries(terms)

    def scale(self, a: complex) -> "BiSeries":
        return BiSeries({key: a * c for key, c in self.terms.items()})

    def shift_x(self, p: int) -> "BiSeries":
        """Multiply by ``x**p``."""
        return BiSeries({(m + p, n): c for (m, n), c in self.terms.items()})

    def truncate(self, y_order: int) -> "BiSeries":
        return BiSeries({(m, n): c for (m, n), c in self.terms.items() if n <= y_order})

    def pure_x(self) -> "BiSeries":
        return BiSeries({(m, n): c for (m, n), c in self.terms.items() if n == 0})

    def y_part(self) -> "BiSeries":
        return BiSeries({(m, n): c for (m, n), c in self.terms.items() if n > 0})

    def x_jet_at_y0(self, order: int) -> Poly1:
        """Coefficients of ``s(x, 0)`` up to ``x**order``."""
        coeffs = [0j] * (order + 1)
        for (m, n), c in self.terms.items():
            if n == 0 and m <= order:
                coeffs[m] += c
        return Poly1(coeffs)

    def y_degree(self) -> int:
        return max((n for _, n in self.terms), default=-1)

    def __call__(self, x, y):
        """Evaluate at scalar ``x`` and scalar-or-array ``y``."""
        if not self.terms:
            return np.zeros_like(y, dtype=complex) if np.ndim(y) else 0j
        rows = self._rows
        top = max(rows)
        acc = 0j
        for n in range(top, -1, -1):
            row = rows.get(n)
            a = 0j
            if row is not None:
                for c in row[::-1]:
                    a = a * x + c
            acc = acc * y + a
        return acc


def eval_biseries(s: BiSeries, x, y):
    """Exact finite sum of the stored monomials at ``(x, y)``."""
    return s(x, y)


@dataclass
class CoeffTable:
    """Per-sector Taylor coefficients ``entries[j, n - 1]`` for ``n = 1..D``.

    ``c0`` keeps the order-zero coefficients produced by a Cauchy extraction;
    they should vanish and are kept only as a consistency diagnostic.
    """

    k: int
    entries: np.ndarray
    c0: np.ndarray | None = None

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        if self.entries.ndim != 2 or self.entries.shape[0] != self.k:
            raise ValueError(f"entries must have shape (k, D), got {self.entries.shape}")
        if self.c0 is not None:
            self.c0 = np.asarray(self.c0, dtype=complex)

    @property
    def degree(self) -> int:
        return self.entries.shape[1]

    def __getitem__(self, key: tuple[int, int]) -> complex:
        j, n = key
        if not 1 <= n <= self.degree:
            raise IndexError(f"order {n} outside 1..{self.degree}")
        return complex(self.entries[j % self.k, n - 1])

    @classmethod
    def zeros(cls, k: int, D: int) -> "CoeffTable":
        return cls(k, np.zeros((k, D), dtype=complex))

    @classmethod
    def from_series(cls, k: int, series: Sequence[complex]) -> "CoeffTable":
        """Same series ``sum_n series[n-1] h**n`` in every sector."""
        row = np.asarray(series, dtype=complex)
        return cls(k, np.tile(row, (k, 1)))

    def truncate(self, D: int) -> "CoeffTable":
        return CoeffTable(self.k, self.entries[:, :D].copy())

    def __add__(self, other: "CoeffTable") -> "CoeffTable":
        return CoeffTable(self.k, self.entries + other.entries)

    def __sub__(self, other: "CoeffTable") -> "CoeffTable":
        return CoeffTable(self.k, self.entries - other.entries)

    def __mul__(self, a: complex) -> "CoeffTable":
        return CoeffTable(self.k, a * self.entries)

    __rmul__ = __mul__


def series_log_ratio(psi: Sequence[complex], D: int) -> np.ndarray:
    """Coefficients of ``log(psi(h) / h) - log(psi_1)`` at orders ``1..D``.

    ``psi[i]`` is the coefficient of ``h**(i + 1)``; missing orders are zero.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.size == 0 or psi[0] == 0:
        raise ValueError("not a diffeomorphism germ: psi'(0) = 0")
    q = np.zeros(D + 1, dtype=complex)
    avail = min(psi.size, D + 1)
    q[:avail] = psi[:avail] / psi[0]
    # log q with q(0) = 1: n l_n = n q_n - sum_{i<n} i l_i q_{n-i}
    logq = np.zeros(D + 1, dtype=complex)
    for n in range(1, D + 1):
        s = sum(i * logq[i] * q[n - i] for i in range(1, n))
        logq[n] = q[n] - s / n
    return logq[1:]


def series_exp(coeffs: Sequence[complex], D: int) -> np.ndarray:
    """Coefficients ``e_0..e_D`` of ``exp(sum_n coeffs[n-1] h**n)``."""
    a = np.zeros(D + 1, dtype=complex)
    c = np.asarray(coeffs, dtype=complex)[:D]
    a[1 : c.size + 1] = c
    e = np.zeros(D + 1, dtype=complex)
    e[0] = 1.0
    for n in range(1, D + 1):
        e[n] = sum(i * a[i] * e[n - i] for i in range(1, n + 1)) / n
    return e

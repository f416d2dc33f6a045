"""Normal forms realizing prescribed moduli, integrability test and holonomy.

Normal-form data are stored as coefficient arrays ``R[m, n-1]`` and
``G[m, n-1]`` (``m = 0..k-1``, ``n = 1..D``).  They stand for

    r(x, y) = sum_{m,n} R[m, n-1] x^(sigma n + s + m - 1) y^n
    1/U - 1/P = sum_{m,n} G[m, n-1] x^(sigma n + m + 1) y^n

so that the orbital payload ``x r`` carries the monomials
``x^(sigma n + s + m) y^n``.  The payload offset ``s`` is 1 for the shape
``R(x, x^sigma y)`` with ``deg R_n < k``; ``s = 0`` shifts every block down by
one power of ``x`` and needs ``sigma >= 1``.

Each block ``n`` solves a k x k system ``A_n z = b`` with
``A_n[j, m] = model_coeff(k, mu, sigma n + s + m, n, j)``, which factors as a
diagonal of roots of unity times the DFT matrix times the diagonal of model
coefficients at ``j = 0``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .algebra import BiSeries, CoeffTable, series_log_ratio, vandermonde_solve
from .geometry import FormalClass, sigma_for
from .leaf import DulacField
from .period import (
    MODULUS_ORIENTATION,
    Settings,
    model_coeff,
    monomial_periods,
    orbital_modulus,
)

__all__ = [
    "NormalFormData",
    "IntegrabilityVerdict",
    "ResonantIndexError",
    "block_solve",
    "realize_orbital",
    "realize_temporal",
    "integrability_test",
    "realize_holonomy",
    "roundtrip_check",
]


class ResonantIndexError(ArithmeticError):
    pass


@dataclass
class NormalFormData:
    formal: FormalClass
    R: np.ndarray
    G: np.ndarray | None = None
    payload_offset: int = 1

    def __post_init__(self):
        k = self.formal.k
        self.R = np.asarray(self.R, dtype=complex)
        if self.R.ndim != 2 or self.R.shape[0] != k:
            raise ValueError(f"R must have shape (k, D), got {self.R.shape}")
        if self.G is not None:
            self.G = np.asarray(self.G, dtype=complex)
            if self.G.ndim != 2 or self.G.shape[0] != k:
                raise ValueError(f"G must have shape (k, D), got {self.G.shape}")
        if self.payload_offset not in (0, 1):
            raise ValueError("payload_offset must be 0 or 1")
        if self.payload_offset == 0 and self.formal.sigma < 1:
            raise ValueError("payload_offset 0 needs sigma >= 1")

    @property
    def k(self) -> int:
        return self.formal.k

    @property
    def degree(self) -> int:
        return self.R.shape[1]

    def r_series(self, upto: int | None = None) -> BiSeries:
        """Dulac ``r`` built from blocks ``1..upto``."""
        return _r_series(self.formal, self.R, self.payload_offset, upto)

    def unit_excess(self) -> BiSeries | None:
        """``1/U - 1/P = x G(x, x^sigma y)``."""
        if self.G is None:
            return None
        k, sig = self.k, self.formal.sigma
        terms = {}
        for m in range(k):
            for n in range(1, self.G.shape[1] + 1):
                terms[(sig * n + m + 1, n)] = self.G[m, n - 1]
        return BiSeries(terms)

    def field(self) -> DulacField:
        return DulacField(self.formal, self.r_series(), unit_excess=self.unit_excess())

    def unit_series(self, order: int) -> BiSeries:
        """Taylor jet of ``U = P / (1 + x P G)`` in ``y`` up to ``y^order`` (constant P)."""
        if self.formal.P.degree() > 0:
            raise ValueError("unit jet only available for constant P")
        p = self.formal.P.coeffs[0]
        excess = self.unit_excess() or BiSeries()
        # U = 1 / (1/P + E) = P sum_s (-P E)^s
        out = BiSeries({(0, 0): p})
        power = BiSeries({(0, 0): 1.0})
        for _ in range(order):
            power = _mul(power, excess.scale(-p)).truncate(order)
            out = out + power.scale(p)
        return out

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "mu": [self.formal.mu.real, self.formal.mu.imag],
            "sigma": self.formal.sigma,
            "payload_offset": self.payload_offset,
            "R": _table_rows(self.R),
            "G": None if self.G is None else _table_rows(self.G),
        }


def _table_rows(a: np.ndarray) -> list:
    return [[m, n + 1, a[m, n].real, a[m, n].imag] for m in range(a.shape[0]) for n in range(a.shape[1])]


def _mul(a: BiSeries, b: BiSeries) -> BiSeries:
    terms: dict = {}
    for (m1, n1), c1 in a.terms.items():
        for (m2, n2), c2 in b.terms.items():
            key = (m1 + m2, n1 + n2)
            terms[key] = terms.get(key, 0j) + c1 * c2
    return BiSeries(terms)


def _r_series(formal: FormalClass, R: np.ndarray, s: int, upto: int | None) -> BiSeries:
    k, sig = formal.k, formal.sigma
    top = R.shape[1] if upto is None else min(upto, R.shape[1])
    terms = {}
    for m in range(k):
        for n in range(1, top + 1):
            terms[(sig * n + s + m - 1, n)] = R[m, n - 1]
    return BiSeries(terms)


@dataclass
class IntegrabilityVerdict:
    integrable_form: bool
    p: int | None
    alpha: np.ndarray | None
    residual: float
    tolerance: float

    def as_dict(self) -> dict:
        return {
            "integrable_form": self.integrable_form,
            "p": self.p,
            "alpha": None if self.alpha is None else [[a.real, a.imag] for a in self.alpha],
            "residual": self.residual,
            "tolerance": self.tolerance,
        }


def _block_factors(k: int, mu: complex, n: int, first: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal of model coefficients and the root-of-unity row factors."""
    diag = np.array([model_coeff(k, mu, first + m, n, 0) for m in range(k)])
    if np.any(diag == 0):
        raise ResonantIndexError(f"resonant index at order {n}: sigma + mu condition violated")
    rows = np.exp(2j * np.pi * first * np.arange(k) / k)
    return diag, rows


def block_solve(k: int, mu: complex, n: int, first: int, rhs) -> np.ndarray:
    """Solve ``sum_m model_coeff(k, mu, first + m, n, j) z_m = rhs_j`` for ``z``."""
    diag, rows = _block_factors(k, mu, n, first)
    return vandermonde_solve(k, np.asarray(rhs, dtype=complex) / rows) / diag


def _target_entries(target: CoeffTable, k: int, D: int) -> np.ndarray:
    if target.k != k:
        raise ValueError(f"target has {target.k} sectors, expected {k}")
    out = np.zeros((k, D), dtype=complex)
    top = min(D, target.degree)
    out[:, :top] = target.entries[:, :top]
    return out


def realize_orbital(
    k: int,
    mu: complex,
    target: CoeffTable,
    D: int | None = None,
    settings: Settings | None = None,
    payload_offset: int = 1,
    sigma: int | None = None,
) -> NormalFormData:
    """Normal form whose orbital modulus starts with ``target`` up to order D.

    Block ``n`` solves ``A_n R_n = alpha_n - d_n`` where ``d_n`` is the order-n
    modulus of the field truncated to blocks ``< n``.
    """
    settings = settings or Settings.normal_form_defaults()
    D = target.degree if D is None else D
    if D < 1:
        raise ValueError("degree must be at least 1")
    formal = FormalClass(k, mu, sigma_for(mu) if sigma is None else sigma)
    alpha = _target_entries(target, k, D)
    R = np.zeros((k, D), dtype=complex)
    nf = NormalFormData(formal, R, None, payload_offset)
    sig = formal.sigma
    for n in range(1, D + 1):
        rhs = alpha[:, n - 1].copy()
        if n >= 2 and np.any(R[:, : n - 1]):
            partial = DulacField(formal, nf.r_series(n - 1))
            d = orbital_modulus(partial, n, settings).entries[:, n - 1]
            rhs = rhs - d
        R[:, n - 1] = block_solve(k, formal.mu, n, sig * n + payload_offset, rhs)
    return nf


def realize_temporal(
    nf: NormalFormData,
    target: CoeffTable,
    D: int | None = None,
    settings: Settings | None = None,
) -> NormalFormData:
    """Fill ``nf.G`` so that the temporal modulus starts with ``target``.

    The system is linear: the periods of every basis monomial
    ``x^(sigma a + 1 + m) y^a`` along the orbital normal form are computed
    once, then the blocks are solved in increasing order.
    """
    settings = settings or Settings.normal_form_defaults()
    k, sig = nf.k, nf.formal.sigma
    D = target.degree if D is None else D
    if D < 1:
        raise ValueError("degree must be at least 1")
    f = _target_entries(target, k, D)
    base = DulacField(nf.formal, nf.r_series())
    G = np.zeros((k, D), dtype=complex)
    if not np.any(f):
        return NormalFormData(nf.formal, nf.R, G, nf.payload_offset)
    monos = [(sig * a + 1 + m, a) for a in range(1, D + 1) for m in range(k)]
    if base.R:
        per = monomial_periods(base, monos, D, settings)  # [j, mono, ell]
    else:
        per = None
    for n in range(1, D + 1):
        rhs = MODULUS_ORIENTATION * f[:, n - 1]
        if per is not None:
            for a in range(1, n):
                for m in range(k):
                    rhs = rhs - per[:, (a - 1) * k + m, n] * G[m, a - 1]
        G[:, n - 1] = block_solve(k, nf.formal.mu, n, sig * n + 1, rhs)
    return NormalFormData(nf.formal, nf.R, G, nf.payload_offset)


def integrability_test(target: CoeffTable, tol: float = 1e-8, circle_radius: float = 0.1) -> IntegrabilityVerdict:
    """Check whether every sector has the form ``(1/p) log(1 - alpha_j h^p)``.

    Order ``n`` is compared with absolute tolerance
    ``tol * (1/circle_radius)^n * max(1, |a|)``, the expected error growth of
    a Cauchy extraction on that circle.
    """
    D = target.degree
    if D < 2:
        raise ValueError("integrability test needs degree >= 2")
    a = target.entries
    scale = (1.0 / circle_radius) ** np.arange(1, D + 1)
    big = np.abs(a) > tol * scale
    if not big.any():
        return IntegrabilityVerdict(True, None, np.zeros(target.k, dtype=complex), float(np.max(np.abs(a))), tol)
    p = int(np.argmax(big.any(axis=0))) + 1
    alpha = -p * a[:, p - 1]
    recon = np.zeros_like(a)
    for s in range(1, D // p + 1):
        recon[:, p * s - 1] = -(alpha**s) / (p * s)
    dev = np.abs(a - recon)
    allowed = tol * scale * np.maximum(1.0, np.abs(recon))
    ok = bool(np.all(dev <= allowed))
    residual = float(np.max(dev / (scale * np.maximum(1.0, np.abs(recon)))))
    return IntegrabilityVerdict(ok, p, alpha, residual, tol)


def realize_holonomy(
    psi,
    D: int,
    settings: Settings | None = None,
    payload_offset: int = 1,
) -> tuple[complex, NormalFormData]:
    """Saddle-node (k = 1) whose weak holonomy is conjugate to ``psi``.

    ``psi[i]`` is the coefficient of ``h^(i+1)``.  The gluing of the two
    sectorial first integrals is ``H^1 = psi(H^0)``, so the log-ratio series of
    ``psi`` is the transition, and the reported modulus is its opposite.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.size == 0 or psi[0] == 0:
        raise ValueError("not a diffeomorphism: psi'(0) = 0")
    mu = cmath.log(psi[0]) / (2j * math.pi)
    if abs(mu.imag) < 1e-15 * max(1.0, abs(mu)):
        mu = complex(mu.real, 0.0)
    phi = series_log_ratio(psi, D)
    target = CoeffTable.from_series(1, MODULUS_ORIENTATION * phi)
    return mu, realize_orbital(1, mu, target, D, settings, payload_offset)


def roundtrip_check(
    k: int,
    mu: complex,
    target: CoeffTable,
    D: int | None = None,
    settings: Settings | None = None,
    payload_offset: int = 1,
) -> tuple[NormalFormData, np.ndarray]:
    """Realize ``target``, recompute the modulus, return ``|computed - target|`` per (j, n)."""
    settings = settings or Settings.normal_form_defaults()
    D = target.degree if D is None else D
    nf = realize_orbital(k, mu, target, D, settings, payload_offset)
    back = orbital_modulus(nf.field(), D, settings)
    return nf, np.abs(back.entries - _target_entries(target, k, D))

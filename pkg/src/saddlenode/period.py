"""Period operator: cycle integrals over asymptotic cycles and their Taylor data.

For a payload ``g`` and sector ``j`` the period is sampled on a circle of
initial conditions ``y_i`` above the base point ``x_j``:

    t_i = F^{j+1}(x_j, y_i) - F^j(x_j, y_i),    h_i = H^j(x_j, y_i),

and the coefficients of ``t`` as a series in ``h`` come from Cauchy's formula
(rectangle rule, five-point derivative of ``h`` along the circle).

Orientation
-----------
``period_samples`` uses the cycle orientation under which the model periods
equal :func:`model_coeff`.  The classification moduli returned by
:func:`orbital_modulus` and :func:`temporal_modulus` are read on the reversed
cycle (``MODULUS_ORIENTATION = -1``); with that choice the Bernoulli field
``x^2 d/dx + y (1 + x y) d/dy`` has orbital modulus ``log(1 - 2 i pi h)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .algebra import BiSeries, CoeffTable, reciprocal_gamma
from .geometry import SectorFrame, asymptotic_path, dogleg_path
from .leaf import (
    DulacField,
    Integrand,
    IntegratorConfig,
    LeafError,
    first_integral_value,
    integrate_leaf,
)

__all__ = [
    "MODULUS_ORIENTATION",
    "CauchyConfig",
    "Settings",
    "PeriodSamples",
    "FirstIntegralCollapsedError",
    "period_samples",
    "extract_coeffs",
    "model_coeff",
    "monomial_periods",
    "orbital_modulus",
    "temporal_modulus",
]

MODULUS_ORIENTATION = -1


class FirstIntegralCollapsedError(ArithmeticError):
    pass


@dataclass(frozen=True)
class CauchyConfig:
    circle_radius: float = 0.1
    circle_points: int = 1000

    def __post_init__(self):
        if not self.circle_radius > 0:
            raise ValueError("circle_radius must be positive")
        if self.circle_points < 8:
            raise ValueError("circle_points must be at least 8")

    def circle(self) -> np.ndarray:
        M = self.circle_points
        return self.circle_radius * np.exp(2j * np.pi * np.arange(M) / M)


@dataclass(frozen=True)
class Settings:
    """Everything numeric that shapes a period computation."""

    radius: float = 1.0
    beta: float | None = None
    path: str = "arc"
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    cauchy: CauchyConfig = field(default_factory=CauchyConfig)

    def __post_init__(self):
        if self.path not in ("arc", "dogleg"):
            raise ValueError(f"unknown path shape {self.path!r}")
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    @classmethod
    def modulus_defaults(cls) -> "Settings":
        """x0 = -5, RK4 step 1e-3, circle 0.1 with 1000 points."""
        return cls(radius=5.0, cauchy=CauchyConfig(0.1, 1000))

    @classmethod
    def normal_form_defaults(cls) -> "Settings":
        """x0 = -5, RK4 step 1e-3, circle 0.01 with 5000 points."""
        return cls(radius=5.0, cauchy=CauchyConfig(0.01, 5000))

    def with_(self, **changes) -> "Settings":
        integ = {k: changes.pop(k) for k in list(changes) if k in IntegratorConfig.__dataclass_fields__}
        cauchy = {k: changes.pop(k) for k in list(changes) if k in CauchyConfig.__dataclass_fields__}
        out = replace(self, **changes)
        if integ:
            out = replace(out, integrator=replace(out.integrator, **integ))
        if cauchy:
            out = replace(out, cauchy=replace(out.cauchy, **cauchy))
        return out

    def effective_beta(self, k: int) -> float:
        return SectorFrame(k, 0, self.radius, 1, self.beta).beta

    def as_dict(self, k: int | None = None) -> dict:
        return {
            "radius": self.radius,
            "beta": self.beta if k is None else self.effective_beta(k),
            "path": self.path,
            "step": self.integrator.step,
            "y_floor": self.integrator.y_floor,
            "eps_min": self.integrator.eps_min,
            "overflow": self.integrator.overflow,
            "tail_tol": self.integrator.tail_tol,
            "circle_radius": self.cauchy.circle_radius,
            "circle_points": self.cauchy.circle_points,
        }


@dataclass
class PeriodSamples:
    """``h[i] = H^j(x_j, y_i)`` and ``t[..., i]`` the period values (one row per payload)."""

    j: int
    h: np.ndarray
    t: np.ndarray


def _frames(k: int, j: int, settings: Settings) -> tuple[SectorFrame, SectorFrame]:
    a = SectorFrame(k, j, settings.radius, +1, settings.beta)
    b = SectorFrame(k, j + 1, settings.radius, -1, settings.beta)
    return a, b


def _path(frame: SectorFrame, settings: Settings):
    eps = settings.integrator.eps_min
    if settings.path == "dogleg":
        return dogleg_path(frame, eps)
    return asymptotic_path(frame, eps)


def period_samples(
    field: DulacField,
    j: int,
    g: Integrand | Sequence[Integrand],
    settings: Settings = Settings(),
) -> PeriodSamples:
    """Sample the period of ``g`` (or of several payloads at once) on sector ``j``.

    Both leaves start at the base point ``r exp(i(theta_j + pi/k))``; one
    descends inside sector ``j``, the other inside sector ``j + 1``.
    """
    single = not isinstance(g, (list, tuple))
    payloads = [g] if single else list(g)
    k = field.k
    ys = settings.cauchy.circle()
    fa, fb = _frames(k, j % k, settings)
    cfg = settings.integrator
    states = []
    for label, frame in (("j", fa), ("j+1", fb)):
        try:
            states.append(integrate_leaf(field, frame, ys, _path(frame, settings), payloads, cfg))
        except LeafError as exc:
            raise type(exc)(f"sector {j}, leaf in frame {label}: {exc}") from exc
    sa, sb = states
    h = first_integral_value(field, fa, ys, None, cfg, state=sa)
    t = sb.F - sa.F
    return PeriodSamples(j % k, h, t[0] if single else t)


def extract_coeffs(samples: PeriodSamples, n_max: int) -> np.ndarray:
    """Cauchy coefficients ``c_0..c_n_max`` of ``t`` as a power series in ``h``."""
    h = np.asarray(samples.h)
    M = h.size
    if M < 8:
        raise ValueError("need at least 8 samples on the circle")
    if np.min(np.abs(h)) < 1e-300:
        raise FirstIntegralCollapsedError(f"first integral collapsed on sector {samples.j}")
    dh = (np.roll(h, 2) - 8.0 * np.roll(h, 1) + 8.0 * np.roll(h, -1) - np.roll(h, -2)) / 12.0
    w = dh / h
    t = np.asarray(samples.t)
    out = np.empty(t.shape[:-1] + (n_max + 1,), dtype=complex)
    inv = 1.0 / h
    p = np.ones_like(h)
    for ell in range(n_max + 1):
        out[..., ell] = (t * (p * w)).sum(axis=-1) / (2j * math.pi)
        p = p * inv
    return out


def model_coeff(k: int, mu: complex, m: int, n: int, j: int = 0) -> complex:
    """Closed-form period coefficient of ``x^m y^n`` for the formal model."""
    if n < 1:
        raise ValueError("model coefficient not defined for n=0")
    a = (m + n * mu) / k
    rg = reciprocal_gamma(a)
    if rg == 0:
        return 0j
    delta = complex(math.cos(2 * math.pi * m * j / k), math.sin(2 * math.pi * m * j / k))
    return delta * 2j * math.pi * np.exp(a * math.log(n / k) + 1j * math.pi * a) / n * rg


def monomial_periods(
    field: DulacField,
    monomials: Sequence[tuple[int, int]],
    n_max: int,
    settings: Settings = Settings(),
) -> np.ndarray:
    """Period coefficients of each ``x^m y^n``: array ``[j, monomial, ell]``."""
    k = field.k
    payloads = [BiSeries({mn: 1.0}) for mn in monomials]
    out = np.empty((k, len(monomials), n_max + 1), dtype=complex)
    for j in range(k):
        out[j] = extract_coeffs(period_samples(field, j, payloads, settings), n_max)
    return out


def _modulus(field: DulacField, g, D: int, settings: Settings) -> CoeffTable:
    k = field.k
    if isinstance(g, BiSeries) and not g.y_part():
        return CoeffTable(k, np.zeros((k, D), dtype=complex), np.zeros(k, dtype=complex))
    rows = np.empty((k, D + 1), dtype=complex)
    for j in range(k):
        rows[j] = MODULUS_ORIENTATION * extract_coeffs(period_samples(field, j, g, settings), D)
    return CoeffTable(k, rows[:, 1:], rows[:, 0])


def orbital_modulus(field: DulacField, D: int, settings: Settings = Settings()) -> CoeffTable:
    """Orbital invariants: the periods of ``-x R``, orders 1..D per sector."""
    return _modulus(field, field.orbital_payload(), D, settings)


def temporal_modulus(field: DulacField, D: int, settings: Settings = Settings()) -> CoeffTable:
    """Temporal invariants: the periods of ``1/U - 1/P``, orders 1..D per sector."""
    if field.U is not None:
        u0 = field.U.x_jet_at_y0(max((m for m, _ in field.U.terms), default=0))
        coeffs = np.trim_zeros(np.asarray(u0.coeffs[::-1]), "f")
        if coeffs.size > 1 and np.any(np.abs(np.roots(coeffs)) <= settings.radius):
            raise LeafError("unit U vanished on domain: U(x, 0) has a zero inside |x| <= radius")
    return _modulus(field, field.temporal_payload(), D, settings)

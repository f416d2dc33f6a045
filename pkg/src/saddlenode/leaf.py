"""Leaves of a Dulac-form field, integrated along asymptotic paths.

A leaf over the x-plane solves

    dy/dx = y (1 + mu x^k + x R(x, y)) / x^(k+1)

and is followed from a base point down to ``x = 0`` with fixed-step RK4.

The stiff factor is removed before integrating: along a leaf

    y(x) = y0 exp(N(x) - (x^-k - x0^-k)/k + mu (log x - log x0)),
    dN/dx = R(x, y(x)) / x^k,

so the unknown is the normalizing integral ``N`` itself, whose right-hand side
carries a factor ``y`` and stays bounded all the way to 0.  On the formal model
``N = 0`` and the leaf is exact.  Sectorial primitives ``F`` of payloads
``g`` (``dF/dx = -g / x^(k+1)``) are extra RK4 components.

All samples of one call share the path, so ``y0`` may be a whole array of
initial conditions (the Cauchy circle) and every stage is a numpy operation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence, Union

import numpy as np

from .algebra import BiSeries, Poly1
from .geometry import Arc, FormalClass, PathPlan, Ray, SectorFrame

__all__ = [
    "DulacField",
    "IntegratorConfig",
    "LeafState",
    "LeafError",
    "LeafEscapeError",
    "NonIntegrablePayloadError",
    "leaf_rhs",
    "integrate_leaf",
    "first_integral_value",
]

Integrand = Union[BiSeries, Callable]


class LeafError(RuntimeError):
    pass


class LeafEscapeError(LeafError):
    pass


class NonIntegrablePayloadError(ValueError):
    pass


@dataclass(frozen=True)
class DulacField:
    """``U (x^(k+1) d/dx + y (1 + mu x^k + x R) d/dy)``.

    The unit is given either directly as ``U`` or, for normal forms, through
    the exact series ``unit_excess = 1/U - 1/P``.  When both are absent the
    unit is ``P`` itself.
    """

    formal: FormalClass
    R: BiSeries = field(default_factory=BiSeries)
    U: BiSeries | None = None
    unit_excess: BiSeries | None = None

    def __post_init__(self):
        if any(n == 0 for _, n in self.R.terms):
            raise ValueError("R must vanish on y = 0 (found a pure-x term)")
        if self.U is not None and self.unit_excess is not None:
            raise ValueError("give either U or unit_excess, not both")
        if self.U is not None and self.U(0.0, 0.0) == 0:
            raise ValueError("U(0, 0) must be non-zero")
        if self.unit_excess is not None:
            for m, n in self.unit_excess.terms:
                if n == 0 and m <= self.k:
                    raise ValueError("unit_excess(x, 0) must be O(x^(k+1))")

    @classmethod
    def from_series(cls, k: int, mu: complex, U: BiSeries | None = None, R: BiSeries | None = None,
                    sigma: int | None = None) -> "DulacField":
        """Dulac field whose formal temporal modulus is the k-jet of ``U(x, 0)``."""
        P = U.x_jet_at_y0(k) if U is not None else Poly1([1.0])
        return cls(FormalClass(k, mu, sigma, P), R if R is not None else BiSeries(), U)

    @property
    def k(self) -> int:
        return self.formal.k

    @property
    def mu(self) -> complex:
        return self.formal.mu

    def orbital_payload(self) -> BiSeries:
        """``-x R``, whose periods are the orbital invariants."""
        return self.R.shift_x(1).scale(-1.0)

    def temporal_payload(self) -> Integrand:
        """``1/U - 1/P`` minus its x-only part.

        The x-only part is holomorphic at 0 with a zero of order k+1, so it
        adds nothing to any cycle integral.
        """
        if self.unit_excess is not None:
            return self.unit_excess.y_part()
        if self.U is None:
            return BiSeries()
        U = self.U

        def excess(x, y):
            u = U(x, y)
            if np.any(np.abs(u) < 1e-300):
                raise LeafError("unit U vanished on domain")
            return 1.0 / u - 1.0 / U(x, 0.0)

        return excess


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 settings; ``step`` is the arc-length increment along the path."""

    step: float = 1e-3
    y_floor: float = 1e-40
    eps_min: float = 1e-3
    overflow: float = 1e6
    tail_tol: float = 1e-15
    chunk: int = 1024

    def __post_init__(self):
        for name in ("step", "y_floor", "eps_min", "overflow", "tail_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.chunk < 1:
            raise ValueError("chunk must be positive")


@dataclass
class LeafState:
    """End of an integration, plus the accumulated values at the start point.

    ``N`` and ``F`` are the values of the normalizing function and of the
    sectorial primitives at ``(x_start, y0)``.
    """

    x_start: complex
    y0: np.ndarray
    x: complex
    log_x: complex
    y: np.ndarray
    N: np.ndarray
    F: np.ndarray
    steps: int
    tail: float


def leaf_rhs(field: DulacField, x: complex, y):
    """``dy/dx`` of the leaf through ``(x, y)``."""
    if x == 0:
        raise ZeroDivisionError("singular point: x = 0")
    k = field.k
    xk = x**k
    return y * (1.0 + field.mu * xk + x * field.R(x, y)) / (x * xk)


class _Payload:
    """One integrand split into a quadrature part and a closed-form x-only part."""

    def __init__(self, g: Integrand, k: int):
        self.k = k
        self.pure: dict[int, complex] = {}
        if isinstance(g, BiSeries):
            for (m, n), c in g.terms.items():
                if n == 0:
                    if m <= k:
                        raise NonIntegrablePayloadError(
                            f"non-integrable payload: term x^{m} is not divisible by x^{k + 1}"
                        )
                    self.pure[m] = c
            self.func = g.y_part()
        elif callable(g):
            _check_callable(g, k)
            self.func = _without_x_part(g)
        else:
            raise TypeError(f"unsupported integrand {g!r}")

    def pure_primitive(self, x: complex) -> complex:
        # F(x) = integral from 0 to x of c t^(m-k-1) dt
        k = self.k
        return sum(c * x ** (m - k) / (m - k) for m, c in self.pure.items())


def _without_x_part(g):
    def h(x, y):
        return g(x, y) - g(x, 0.0)

    return h


def _check_callable(g, k: int) -> None:
    vals = []
    for eps in (1e-2, 1e-3):
        v = abs(complex(np.asarray(g(eps, 0.0)).ravel()[0]))
        vals.append(v / eps ** (k + 1))
    if vals[1] > 5.0 * vals[0] + 1e-6:
        raise NonIntegrablePayloadError(
            "non-integrable payload: g(x, 0) is not divisible by x^(k+1)"
        )


def _segment_nodes(seg, k: int, cfg: IntegratorConfig) -> Iterator[tuple[float, np.ndarray, np.ndarray, np.ndarray]]:
    """Yield chunks ``(du, x, dx/du, log x)`` sampled at ``2 n + 1`` half-step nodes."""
    h = cfg.step
    if isinstance(seg, Arc):
        L = seg.length
        n = max(1, math.ceil(L / h))
        du = L / n
        sgn = 1.0 if seg.end >= seg.start else -1.0
        for i0 in range(0, n, cfg.chunk):
            i1 = min(n, i0 + cfg.chunk)
            u = 0.5 * du * np.arange(2 * i0, 2 * i1 + 1)
            ang = seg.start + sgn * u / seg.radius
            x = seg.radius * np.exp(1j * ang)
            yield du, x, 1j * sgn * x / seg.radius, math.log(seg.radius) + 1j * ang
        return
    r0, r1 = seg.start, seg.end
    L = abs(r1 - r0)
    n = max(1, math.ceil(L / h))
    du = L / n
    sgn = 1.0 if r1 >= r0 else -1.0
    e = complex(math.cos(seg.angle), math.sin(seg.angle))
    for i0 in range(0, n, cfg.chunk):
        i1 = min(n, i0 + cfg.chunk)
        r = r0 + sgn * 0.5 * du * np.arange(2 * i0, 2 * i1 + 1)
        if i1 == n:
            r[-1] = r1
        yield du, r * e, np.full(r.shape, sgn * e), np.log(r) + 1j * seg.angle


def integrate_leaf(
    field: DulacField,
    frame: SectorFrame,
    y0,
    path: PathPlan,
    integrands: Sequence[Integrand] = (),
    config: IntegratorConfig = IntegratorConfig(),
) -> LeafState:
    """Follow the leaves through ``(x_base, y0)`` along ``path`` toward 0.

    Stops on the final ray once every ``|y|`` is below ``config.y_floor``
    (or at ``path.eps_min``).  Raises :class:`LeafEscapeError` when a leaf
    exceeds ``config.overflow``.
    """
    k, mu, R = field.k, field.mu, field.R
    y_init = np.array(y0, dtype=complex, ndmin=1)
    payloads = [_Payload(g, k) for g in integrands]
    P = len(payloads)
    N = np.zeros_like(y_init)
    F = np.zeros((P, y_init.size), dtype=complex)
    x_start = complex(path.start_radius * np.exp(1j * path.start_arg))
    if abs(x_start - frame.x_base) > 1e-9 * frame.r:
        raise ValueError("path does not start at the frame's base point")

    log_start = complex(math.log(path.start_radius), path.start_arg)
    inv_start = x_start ** (-k) / k

    def rhs(x, dxdu, scale, Nv):
        yv = y_init * np.exp(Nv) * scale
        inv = dxdu / x ** (k + 1)
        fN = R(x, yv) * (x * inv) if R else np.zeros_like(Nv)
        fF = [-(p.func(x, yv)) * inv for p in payloads]
        return fN, fF

    steps = 0
    last = len(path.segments) - 1
    x_cur, logx_cur = x_start, log_start
    y = y_init.copy()
    stopped = False
    for si, seg in enumerate(path.segments):
        for du, xs, ds, logs in _segment_nodes(seg, k, config):
            # the model leaf through (x_start, 1), evaluated at every node
            with np.errstate(under="ignore"):
                model = np.exp(inv_start - xs ** (-k) / k + mu * (logs - log_start))
            for i in range(0, xs.size - 1, 2):
                x0, xm, x1 = xs[i], xs[i + 1], xs[i + 2]
                d0, dm, d1 = ds[i], ds[i + 1], ds[i + 2]
                m0, mm, m1 = model[i], model[i + 1], model[i + 2]
                a_N, a_F = rhs(x0, d0, m0, N)
                b_N, b_F = rhs(xm, dm, mm, N + 0.5 * du * a_N)
                c_N, c_F = rhs(xm, dm, mm, N + 0.5 * du * b_N)
                e_N, e_F = rhs(x1, d1, m1, N + du * c_N)
                N = N + du / 6.0 * (a_N + 2.0 * b_N + 2.0 * c_N + e_N)
                for q in range(P):
                    F[q] += du / 6.0 * (a_F[q] + 2.0 * b_F[q] + 2.0 * c_F[q] + e_F[q])
                steps += 1
                x_cur, logx_cur = complex(x1), complex(logs[i + 2])
                y = y_init * np.exp(N) * m1
                ymax = np.max(np.abs(y))
                if not ymax <= config.overflow:
                    raise LeafEscapeError(
                        f"leaf escaped at x={x_cur:.6g} (|y|={ymax:.3g}, sample {int(np.argmax(np.abs(y)))}): "
                        "path not asymptotic for this initial condition"
                    )
                if si == last and ymax < config.y_floor:
                    stopped = True
                    break
            if stopped:
                break
        if stopped:
            break

    tail = _tail_estimate(field, payloads, x_cur, y)
    if tail > config.tail_tol:
        raise LeafError(
            f"leaf not decayed at |x|={abs(x_cur):.3g}: tail estimate {tail:.3g} exceeds "
            f"{config.tail_tol:.3g}; lower eps_min"
        )
    for q, p in enumerate(payloads):
        if p.pure:
            F[q] += p.pure_primitive(x_start)
    return LeafState(x_start, y_init, x_cur, logx_cur, y, N, F, steps, tail)


def _tail_estimate(field: DulacField, payloads, x: complex, y: np.ndarray) -> float:
    # For integrands linear in y the remaining integral to 0 is about q(x, y).
    vals = [np.max(np.abs(x * field.R(x, y))) if field.R else 0.0]
    vals += [np.max(np.abs(p.func(x, y))) for p in payloads]
    return float(max(vals))


def first_integral_value(
    field: DulacField,
    frame: SectorFrame,
    y0,
    path: PathPlan,
    config: IntegratorConfig = IntegratorConfig(),
    state: LeafState | None = None,
) -> np.ndarray:
    """Sectorial first integral ``H^j(x_base, y0)`` with the frame's log branch.

    ``H^j = y e^(2 i pi j mu / k) exp(x^-k / k - mu log x + N^j)``.
    Pass ``state`` to reuse an integration already done along ``path``.
    """
    if state is None:
        state = integrate_leaf(field, frame, y0, path, (), config)
    k, mu = field.k, field.mu
    xb = frame.x_base
    expo = 2j * math.pi * frame.j * mu / k + xb ** (-k) / k - mu * frame.log_base + state.N
    return state.y0 * np.exp(expo)

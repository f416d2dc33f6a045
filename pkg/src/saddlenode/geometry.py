"""Formal data, sector frames and the asymptotic paths used for integration."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Union

from .algebra import Poly1

__all__ = [
    "FormalClass",
    "sigma_for",
    "SectorFrame",
    "Arc",
    "Ray",
    "PathPlan",
    "base_point",
    "asymptotic_path",
    "dogleg_path",
    "DegeneratePathError",
]


class DegeneratePathError(ValueError):
    pass


def sigma_for(mu: complex) -> int:
    """Smallest shift making ``sigma + mu`` leave the closed negative half-line."""
    mu = complex(mu)
    if mu.imag != 0.0 or mu.real > 0.0:
        return 0
    return int(math.floor(-mu.real)) + 1


@dataclass(frozen=True)
class FormalClass:
    k: int
    mu: complex
    sigma: int | None = None
    P: Poly1 = field(default_factory=lambda: Poly1([1.0]))

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        object.__setattr__(self, "mu", complex(self.mu))
        if self.sigma is None:
            object.__setattr__(self, "sigma", sigma_for(self.mu))
        s = self.sigma + self.mu
        if self.sigma < 0 or (s.imag == 0.0 and s.real <= 0.0):
            raise ValueError(f"sigma + mu = {s} lies on the non-positive real axis")
        if self.P.degree() > self.k:
            raise ValueError(f"P has degree {self.P.degree()} > k = {self.k}")
        if self.P(0.0) == 0:
            raise ValueError("P(0) must be non-zero")


@dataclass(frozen=True)
class SectorFrame:
    """Sector ``j`` (not reduced mod k) with a base point on its boundary side.

    ``side = +1`` puts the base point at angle ``theta_j + pi/k`` (the saddle
    part shared with sector ``j + 1``), ``side = -1`` at ``theta_j - pi/k``.
    Angles are absolute and continuous: for k = 1 the frame ``j = 1`` has
    ``theta = 2 pi``, which is how the self-overlapping sector is unrolled.
    """

    k: int
    j: int
    r: float = 1.0
    side: int = 1
    beta: float | None = None

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("radius must be positive")
        if self.side not in (1, -1):
            raise ValueError("side must be +1 or -1")
        if self.beta is None:
            object.__setattr__(self, "beta", 0.3 * math.pi / (2 * self.k))
        if not 0 < self.beta < math.pi / (2 * self.k):
            raise ValueError("beta must lie in (0, pi/2k)")

    @property
    def theta(self) -> float:
        return 2.0 * math.pi * self.j / self.k

    @property
    def arg_base(self) -> float:
        return self.theta + self.side * math.pi / self.k

    @property
    def x_base(self) -> complex:
        return self.r * cmath.exp(1j * self.arg_base)

    @property
    def log_base(self) -> complex:
        return complex(math.log(self.r), self.arg_base)

    def contains_arg(self, arg: float, tol: float = 1e-12) -> bool:
        return abs(arg - self.theta) <= math.pi / self.k + self.beta + tol


def base_point(k: int, j: int, r: float) -> complex:
    """Base point ``r exp(i(theta_j + pi/k))`` in the saddle part of sector j."""
    if r <= 0:
        raise ValueError("radius must be positive")
    return SectorFrame(k, j, r).x_base


@dataclass(frozen=True)
class Arc:
    radius: float
    start: float
    end: float

    @property
    def length(self) -> float:
        return self.radius * abs(self.end - self.start)


@dataclass(frozen=True)
class Ray:
    angle: float
    start: float
    end: float

    @property
    def length(self) -> float:
        return abs(self.end - self.start)


Segment = Union[Arc, Ray]


@dataclass(frozen=True)
class PathPlan:
    """Arcs and rays traversed in order, ending on a ray that descends to 0.

    The last segment's ``end`` is the inner truncation radius ``eps_min``;
    integration may stop before reaching it.
    """

    segments: tuple[Segment, ...]
    eps_min: float

    def __post_init__(self):
        if not self.segments:
            raise DegeneratePathError("empty path")
        last = self.segments[-1]
        if not isinstance(last, Ray) or last.end >= last.start:
            raise DegeneratePathError("path must end on an inward ray")

    @property
    def start_arg(self) -> float:
        s = self.segments[0]
        return s.start if isinstance(s, Arc) else s.angle

    @property
    def start_radius(self) -> float:
        s = self.segments[0]
        return s.radius if isinstance(s, Arc) else s.start


def asymptotic_path(frame: SectorFrame, eps_min: float) -> PathPlan:
    """Arc at ``|x_base|`` from the base angle to ``theta_j``, then the ray to 0."""
    if eps_min <= 0 or eps_min >= frame.r:
        raise DegeneratePathError(
            f"degenerate path: eps_min={eps_min} must lie in (0, |x_base|={frame.r})"
        )
    return PathPlan(
        (Arc(frame.r, frame.arg_base, frame.theta), Ray(frame.theta, frame.r, eps_min)),
        eps_min,
    )


def dogleg_path(frame: SectorFrame, eps_min: float, inner: float = 0.6, split: float = 0.5) -> PathPlan:
    """Homotopic alternative: half the arc outside, a radial drop, the rest inside."""
    if not 0 < inner < 1 or not 0 < split < 1:
        raise ValueError("inner and split must lie in (0, 1)")
    r2 = inner * frame.r
    if eps_min >= r2:
        raise DegeneratePathError("eps_min must be below the inner arc radius")
    mid = frame.arg_base + split * (frame.theta - frame.arg_base)
    return PathPlan(
        (
            Arc(frame.r, frame.arg_base, mid),
            Ray(mid, frame.r, r2),
            Arc(r2, mid, frame.theta),
            Ray(frame.theta, r2, eps_min),
        ),
        eps_min,
    )

"""Geometry, coupling and the secular determinant of the honeycomb cell.

The lattice is an infinite honeycomb network in which each hexagon has two
antipodal edges of length ``a``, two of length ``b`` and two of length ``c``.
The Hamiltonian acts as -d^2/dx^2 on every edge, with a delta coupling at
each degree-3 vertex: the wavefunction is continuous and the sum of outgoing
derivatives equals ``alpha`` times the vertex value.

After the Floquet-Bloch reduction with phases (theta1, theta2), a positive
energy E = k^2 belongs to the spectrum iff the reduced 4x4 cell matrix is
singular for some phase pair.  This module evaluates that matrix both entry
by entry (:func:`assemble_m_matrix`) and through its closed-form determinant
(:func:`det_m_closed_form`), together with the scalar dispersion functions
used by the band engine.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

__all__ = [
    "DEFAULT_DIRICHLET_TOL",
    "DirichletPointError",
    "HexGeometry",
    "VertexCoupling",
    "EnergyPoint",
    "FloquetPhase",
    "SineTriple",
    "MMatrix",
    "reduce_mod_two_pi",
    "sin_reduced",
    "cos_reduced",
    "sine_triple",
    "dispersion",
    "dispersion_negative",
    "assemble_m_matrix",
    "det_m_closed_form",
]

DEFAULT_DIRICHLET_TOL = 1e-9

# Tail of 2*pi beyond the nearest double, for two-part angle reduction.
_TAU_LO = 2.4492935982947064e-16


def reduce_mod_two_pi(x: float) -> float:
    """Reduce ``x`` modulo 2*pi into [-pi, pi] with a two-part correction.

    ``math.remainder`` reduces against the *double* nearest 2*pi; the second
    step removes the accumulated tail ``n * (2*pi - float(2*pi))`` so large
    arguments keep close-to-full precision before hitting the trig kernels.
    """
    r = math.remainder(x, math.tau)
    n = round((x - r) / math.tau)
    return r - n * _TAU_LO


def sin_reduced(x: float) -> float:
    return math.sin(reduce_mod_two_pi(x))


def cos_reduced(x: float) -> float:
    return math.cos(reduce_mod_two_pi(x))


class DirichletPointError(ValueError):
    """Raised when an operation is evaluated at a point where sin(l*k)
    vanishes for one of the edge lengths, outside the closed form's domain."""

    def __init__(self, k: float, edges: tuple[str, ...]):
        self.k = k
        self.edges = edges
        super().__init__(
            f"k={k!r} is a Dirichlet point for edge(s) {', '.join(edges)}: "
            "sin(l*k) vanishes there"
        )


@dataclass(frozen=True)
class HexGeometry:
    """Edge lengths of the dilated honeycomb cell."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        for name, value in (("a", self.a), ("b", self.b), ("c", self.c)):
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"edge length {name}={value!r} must be finite and > 0")

    @property
    def ell_min(self) -> float:
        return min(self.a, self.b, self.c)

    @property
    def lengths(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)

    EDGE_NAMES = ("a", "b", "c")


@dataclass(frozen=True)
class VertexCoupling:
    """Delta-coupling strength at every vertex; alpha = 0 is Kirchhoff."""

    alpha: float

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise ValueError(f"alpha={self.alpha!r} must be finite")

    @property
    def is_kirchhoff(self) -> bool:
        return self.alpha == 0.0


@dataclass(frozen=True)
class EnergyPoint:
    """Spectral parameter on one of the three branches.

    ``positive`` carries k with E = k^2, ``negative`` carries kappa with
    E = -kappa^2, and ``zero`` is the single point E = 0.
    """

    branch: str
    param: float = 0.0

    _BRANCHES = ("positive", "zero", "negative")

    def __post_init__(self):
        if self.branch not in self._BRANCHES:
            raise ValueError(f"unknown branch {self.branch!r}")
        if self.branch != "zero" and not (math.isfinite(self.param) and self.param > 0):
            raise ValueError(f"branch parameter must be finite and > 0, got {self.param!r}")

    @classmethod
    def positive(cls, k: float) -> "EnergyPoint":
        return cls("positive", k)

    @classmethod
    def negative(cls, kappa: float) -> "EnergyPoint":
        return cls("negative", kappa)

    @classmethod
    def zero(cls) -> "EnergyPoint":
        return cls("zero", 0.0)

    @classmethod
    def from_energy(cls, energy: float) -> "EnergyPoint":
        if energy > 0:
            return cls.positive(math.sqrt(energy))
        if energy < 0:
            return cls.negative(math.sqrt(-energy))
        return cls.zero()

    @property
    def energy(self) -> float:
        if self.branch == "positive":
            return self.param * self.param
        if self.branch == "negative":
            return -self.param * self.param
        return 0.0

    @property
    def k(self) -> float:
        if self.branch != "positive":
            raise ValueError("k is defined on the positive branch only")
        return self.param

    @property
    def kappa(self) -> float:
        if self.branch != "negative":
            raise ValueError("kappa is defined on the negative branch only")
        return self.param


def _wrap_phase(x: float) -> float:
    """Wrap a real angle into (-pi, pi]."""
    r = math.remainder(x, math.tau)
    if r <= -math.pi:
        r += math.tau
    return r


@dataclass(frozen=True)
class FloquetPhase:
    """Pair of Bloch phases, each normalized into (-pi, pi]."""

    theta1: float
    theta2: float

    def __post_init__(self):
        object.__setattr__(self, "theta1", _wrap_phase(self.theta1))
        object.__setattr__(self, "theta2", _wrap_phase(self.theta2))


@dataclass(frozen=True)
class SineTriple:
    """sin(l*k) for the three edge lengths, with near-zero flags."""

    s_a: float
    s_b: float
    s_c: float
    vanish_a: bool
    vanish_b: bool
    vanish_c: bool

    @property
    def values(self) -> tuple[float, float, float]:
        return (self.s_a, self.s_b, self.s_c)

    @property
    def vanishing_edges(self) -> tuple[str, ...]:
        return tuple(
            name
            for name, flag in zip(("a", "b", "c"), (self.vanish_a, self.vanish_b, self.vanish_c))
            if flag
        )

    @property
    def any_vanish(self) -> bool:
        return self.vanish_a or self.vanish_b or self.vanish_c


@dataclass(frozen=True)
class MMatrix:
    """The reduced 4x4 cell matrix acting on (C2+, C2-, C3+, C3-)."""

    entries: tuple[tuple[complex, ...], ...] = field(repr=False)

    def __post_init__(self):
        if len(self.entries) != 4 or any(len(row) != 4 for row in self.entries):
            raise ValueError("MMatrix requires a 4x4 entry grid")


def sine_triple(
    geom: HexGeometry, k: float, dirichlet_tol: float = DEFAULT_DIRICHLET_TOL
) -> SineTriple:
    """Evaluate sin(l*k) on all three edges with scale-aware vanish flags.

    An edge is flagged when |sin(l*k)| <= dirichlet_tol * max(1, l*k), which
    guards against catastrophic cancellation at large arguments.
    """
    if not k > 0:
        raise ValueError(f"k must be > 0, got {k!r}")
    if not dirichlet_tol > 0:
        raise ValueError(f"dirichlet_tol must be > 0, got {dirichlet_tol!r}")
    values = []
    flags = []
    for ell in geom.lengths:
        x = ell * k
        s = sin_reduced(x)
        values.append(s)
        flags.append(abs(s) <= dirichlet_tol * max(1.0, x))
    return SineTriple(values[0], values[1], values[2], flags[0], flags[1], flags[2])


def dispersion(
    geom: HexGeometry,
    coupling: VertexCoupling,
    k: float,
    dirichlet_tol: float = DEFAULT_DIRICHLET_TOL,
) -> float:
    """cot(a*k) + cot(b*k) + cot(c*k) + alpha/k, the positive-branch dispersion.

    Raises :class:`DirichletPointError` when any sin(l*k) is flagged zero.
    """
    triple = sine_triple(geom, k, dirichlet_tol)
    if triple.any_vanish:
        raise DirichletPointError(k, triple.vanishing_edges)
    total = coupling.alpha / k
    for ell, s in zip(geom.lengths, triple.values):
        total += cos_reduced(ell * k) / s
    return total


def dispersion_negative(geom: HexGeometry, coupling: VertexCoupling, kappa: float) -> float:
    """coth(a*kappa) + coth(b*kappa) + coth(c*kappa) + alpha/kappa.

    The negative-branch dispersion at E = -kappa^2; sinh never vanishes for
    kappa > 0 so there are no excluded points.
    """
    if not kappa > 0:
        raise ValueError(f"kappa must be > 0, got {kappa!r}")
    total = coupling.alpha / kappa
    for ell in geom.lengths:
        total += 1.0 / math.tanh(ell * kappa)
    return total


def _check_sin_a(geom: HexGeometry, k: float, dirichlet_tol: float) -> float:
    if not k > 0:
        raise ValueError(f"k must be > 0, got {k!r}")
    s_a = sin_reduced(geom.a * k)
    if abs(s_a) <= dirichlet_tol * max(1.0, geom.a * k):
        raise DirichletPointError(k, ("a",))
    return s_a


def assemble_m_matrix(
    geom: HexGeometry,
    coupling: VertexCoupling,
    k: float,
    phase: FloquetPhase,
    dirichlet_tol: float = DEFAULT_DIRICHLET_TOL,
) -> MMatrix:
    """Assemble the reduced 4x4 cell matrix at (k, theta1, theta2).

    Rows encode, in order: value continuity between the two vertices, the
    Bloch-shifted continuity of the c-edge pair, and the two delta-coupling
    derivative conditions with the full-edge amplitudes already eliminated.
    The derivation divides by sin(a*k), so that sine must not vanish.
    """
    s_a = _check_sin_a(geom, k, dirichlet_tol)
    a, b, c = geom.lengths
    alpha_over_k = coupling.alpha / k
    t1, t2 = phase.theta1, phase.theta2

    def m3(sign: int) -> complex:
        return (
            -cmath.exp(-1j * sign * a * k) + cmath.exp(1j * (sign * b * k - t1))
        ) / s_a - alpha_over_k

    def m4(sign: int) -> complex:
        return (
            -cmath.exp(1j * (sign * a * k + sign * b * k - t1)) + 1.0
        ) / s_a - alpha_over_k * cmath.exp(1j * (sign * b * k - t1))

    rows = (
        (1.0 + 0j, 1.0 + 0j, -1.0 + 0j, -1.0 + 0j),
        (
            cmath.exp(1j * (b * k - t1)),
            cmath.exp(1j * (-b * k - t1)),
            -cmath.exp(1j * (c * k - t2)),
            -cmath.exp(1j * (-c * k - t2)),
        ),
        (m3(1), m3(-1), 1j, -1j),
        (
            m4(1),
            m4(-1),
            -1j * cmath.exp(1j * (c * k - t2)),
            1j * cmath.exp(1j * (-c * k - t2)),
        ),
    )
    return MMatrix(rows)


def det_m_closed_form(
    geom: HexGeometry,
    coupling: VertexCoupling,
    k: float,
    phase: FloquetPhase,
    dirichlet_tol: float = DEFAULT_DIRICHLET_TOL,
) -> complex:
    """Closed-form determinant of the reduced cell matrix.

    Equals ``-4 * B * exp(-i(theta1 + theta2)) / sin(a*k)`` where the real
    bracket ``B`` collects the trigonometric terms of the secular condition;
    the bracket is symmetric under (b <-> c, theta1 <-> theta2).
    """
    s_a = _check_sin_a(geom, k, dirichlet_tol)
    a, b, c = geom.lengths
    s_b = sin_reduced(b * k)
    s_c = sin_reduced(c * k)
    c_a = cos_reduced(a * k)
    c_b = cos_reduced(b * k)
    c_c = cos_reduced(c * k)
    g = coupling.alpha / k
    t1, t2 = phase.theta1, phase.theta2
    bracket = (
        2.0 * s_a * c_b * c_c
        + 2.0 * c_a * s_b * c_c
        + 2.0 * c_a * c_b * s_c
        - 3.0 * s_a * s_b * s_c
        - 2.0 * s_a * math.cos(t1 - t2)
        - 2.0 * s_c * math.cos(t1)
        - 2.0 * s_b * math.cos(t2)
        + 2.0 * g * (c_a * s_b * s_c + s_a * c_b * s_c + s_a * s_b * c_c)
        + g * g * s_a * s_b * s_c
    )
    return -4.0 * bracket * cmath.exp(-1j * (t1 + t2)) / s_a

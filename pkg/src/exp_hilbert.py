"""Exponential Hilbert series of a simplicial complex.

The coarse series sums x^a / a! over every multidegree a whose support is a
face; it has the closed form sum_F prod_{f in F} (e^{x_f} - 1).  Setting all
variables to t gives the fine series, a polynomial in e^t whose coefficient
list is the e-vector.  Exact work stays in Python ints; floats appear only
in the series evaluations.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .complex_core import FVector, SimplicialComplex, f_vector, faces, is_face

SERIES_TOLERANCE = 1e-9


@dataclass(frozen=True)
class EVector:
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.coeffs:
            raise ValueError("e-vector must contain at least E_0")

    @property
    def d(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class SeriesCheck:
    truncated: float
    closed_form: float
    error: float
    passed: bool


@lru_cache(maxsize=None)
def binomial(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    if k == 0 or k == n:
        return 1
    return binomial(n - 1, k - 1) + binomial(n - 1, k)


def e_vector(f: FVector) -> EVector:
    counts = f.counts
    d = len(counts) - 1
    coeffs = []
    for k in range(d + 1):
        coeffs.append(sum((-1) ** (i - k) * counts[i] * binomial(i, k) for i in range(k, d + 1)))
    return EVector(tuple(coeffs))


def f_from_e(e: EVector) -> FVector:
    """Invert e_vector; raises ValueError when e cannot come from a complex."""
    coeffs = e.coeffs
    d = len(coeffs) - 1
    counts = tuple(sum(binomial(k, i) * coeffs[k] for k in range(i, d + 1)) for i in range(d + 1))
    try:
        return FVector(counts)
    except ValueError as exc:
        raise ValueError(f"e-vector {list(coeffs)} does not arise from a simplicial complex: {exc}") from exc


def eval_coarse_exact(c: SimplicialComplex, r: Sequence[int]) -> int:
    levels = _check_levels(c, r)
    return sum(math.prod(levels[v - 1] - 1 for v in face) for face in faces(c))


def eval_fine_polynomial(c: SimplicialComplex, r: int) -> int:
    if isinstance(r, bool) or not isinstance(r, int) or r < 1:
        raise ValueError(f"level count must be a positive integer, got {r!r}")
    value = 0
    for coeff in reversed(e_vector(f_vector(c)).coeffs):
        value = value * r + coeff
    return value


def coarse_closed_form(c: SimplicialComplex, x: Sequence[float]) -> float:
    _check_point(c, x)
    return math.fsum(math.prod(math.expm1(x[v - 1]) for v in face) for face in faces(c))


def eval_fine_series(c: SimplicialComplex, t: float) -> float:
    coeffs = e_vector(f_vector(c)).coeffs
    return math.fsum(coeff * math.exp(k * t) for k, coeff in enumerate(coeffs))


def graded_component_dim(c: SimplicialComplex, a: Sequence[int]) -> int:
    """Dimension of the multidegree-a part of the Stanley-Reisner ring."""
    if len(a) != c.vertex_count or any(exponent < 0 for exponent in a):
        raise ValueError(f"multidegree must be {c.vertex_count} non-negative integers, got {list(a)}")
    support = [v + 1 for v, exponent in enumerate(a) if exponent > 0]
    return 1 if is_face(c, support) else 0


def truncated_coarse_series(c: SimplicialComplex, x: Sequence[float], total_degree: int) -> float:
    """Sum x^a / a! over multidegrees with |a| <= total_degree and face support.

    Terms are collected by total degree.  A multidegree with support exactly F
    is a product of one positive-degree term per vertex of F, so each face
    contributes the truncated product of its vertices' series without the
    constant term.  The result equals iterating every multidegree in graded
    order and keeping the terms where graded_component_dim(c, a) is 1.
    """
    _check_point(c, x)
    if total_degree < 0:
        raise ValueError(f"truncation degree must be non-negative, got {total_degree}")
    n = total_degree
    per_vertex = []
    for value in x:
        terms = np.zeros(n + 1)
        term = 1.0
        for k in range(1, n + 1):
            term = term * value / k
            terms[k] = term
        per_vertex.append(terms)

    graded = np.zeros(n + 1)
    for face in faces(c):
        poly = np.zeros(n + 1)
        poly[0] = 1.0
        for v in face:
            poly = np.convolve(poly, per_vertex[v - 1])[: n + 1]
        graded += poly
    return math.fsum(graded)


def series_check(
    c: SimplicialComplex,
    x: Sequence[float],
    total_degree: int,
    tolerance: float = SERIES_TOLERANCE,
) -> SeriesCheck:
    truncated = truncated_coarse_series(c, x, total_degree)
    closed = coarse_closed_form(c, x)
    error = abs(truncated - closed)
    return SeriesCheck(truncated=truncated, closed_form=closed, error=error, passed=error <= tolerance)


def is_dehn_sommerville(c: SimplicialComplex) -> bool:
    f = f_vector(c)
    e = e_vector(f)
    d = e.d
    return all(e.coeffs[i] == (-1) ** (d - i) * f.counts[i] for i in range(d + 1))


def _check_levels(c: SimplicialComplex, r: Sequence[int]) -> list[int]:
    levels = list(r)
    if len(levels) != c.vertex_count:
        raise ValueError(f"expected {c.vertex_count} level counts, got {len(levels)}")
    for value in levels:
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ValueError(f"level counts must be positive integers, got {value!r}")
    return levels


def _check_point(c: SimplicialComplex, x: Sequence[float]) -> None:
    if len(x) != c.vertex_count:
        raise ValueError(f"expected {c.vertex_count} coordinates, got {len(x)}")
    if not all(math.isfinite(value) for value in x):
        raise ValueError("series coordinates must be finite")

"""Rank, dimension and degrees of freedom of hierarchical log-linear models.

rank(A) = sum over faces F of prod_{f in F} (r_f - 1), read as the coarse
exponential Hilbert series at x_f = log r_f.  With constant levels it is a
polynomial in r whose coefficients are the e-vector; for Dehn-Sommerville
complexes the e-vector is the alternating f-vector.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import sympy

from .complex_core import SimplicialComplex, f_vector, faces, from_facets
from .config import DEFAULT_MAX_ENTRIES, DEFAULT_SIZE_CAP
from .exp_hilbert import (
    binomial,
    e_vector,
    eval_coarse_exact,
    eval_fine_polynomial,
    is_dehn_sommerville,
)
from .model_matrix import ModelSpec, RankMismatchError, verify_spec

METHOD_THEOREM1 = "theorem1"
METHOD_THEOREM2 = "theorem2"
METHOD_COROLLARY1 = "corollary1"
METHOD_DS = "ds_formula"

JSON_SAFE_INT = 2**53

R = sympy.Symbol("r", positive=True, integer=True)


class NotDehnSommervilleError(ValueError):
    """Raised when the alternating f-vector formula is requested for a non-DS complex."""


@dataclass
class RankReport:
    rank: int
    model_dimension: int
    degrees_of_freedom: int
    cell_count: int
    method: str = METHOD_THEOREM1
    methods_checked: list[str] = field(default_factory=list)
    ds_model: bool = False
    oracle_checked: bool = False
    oracle_rank: Optional[int] = None
    oracle_agrees: Optional[bool] = None
    ds_alternating_match: Optional[bool] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "rank": json_int(self.rank),
            "model_dimension": json_int(self.model_dimension),
            "degrees_of_freedom": json_int(self.degrees_of_freedom),
            "cell_count": json_int(self.cell_count),
            "method": self.method,
            "methods_checked": list(self.methods_checked),
            "ds_model": self.ds_model,
            "oracle_checked": self.oracle_checked,
            "oracle_rank": None if self.oracle_rank is None else json_int(self.oracle_rank),
            "oracle_agrees": self.oracle_agrees,
            "ds_alternating_match": self.ds_alternating_match,
        }


def json_int(value: int) -> Any:
    """Integers beyond 2^53 are emitted as decimal strings."""
    return str(value) if abs(value) > JSON_SAFE_INT else value


def rank_theorem1(spec: ModelSpec) -> int:
    return eval_coarse_exact(spec.complex, spec.levels)


def rank_theorem2(c: SimplicialComplex, r: int) -> int:
    """Double sum over the f-vector, without building the e-vector first."""
    _check_level(r)
    counts = f_vector(c).counts
    d = len(counts) - 1
    total = 0
    for k in range(d + 1):
        inner = sum((-1) ** (i - k) * counts[i] * binomial(i, k) for i in range(k, d + 1))
        total += inner * r**k
    return total


def rank_ds(c: SimplicialComplex, r: int) -> int:
    _check_level(r)
    if not is_dehn_sommerville(c):
        raise NotDehnSommervilleError(
            f"complex {[list(f) for f in c.facets]} does not satisfy the Dehn-Sommerville relations"
        )
    counts = f_vector(c).counts
    d = len(counts) - 1
    return sum((-1) ** (d - i) * counts[i] * r**i for i in range(d + 1))


def rank_polynomial(c: SimplicialComplex) -> sympy.Poly:
    coeffs = e_vector(f_vector(c)).coeffs
    return sympy.Poly(sum(coeff * R**k for k, coeff in enumerate(coeffs)), R, domain="ZZ")


def alternating_face_sum(spec: ModelSpec) -> int:
    """sum_F (-1)^(d - |F|) prod_{f in F} r_f, with d = dim + 1."""
    d = spec.complex.dimension + 1
    levels = spec.levels
    return sum((-1) ** (d - len(face)) * math.prod(levels[v - 1] for v in face) for face in faces(spec.complex))


def report(
    spec: ModelSpec,
    verify: bool = False,
    size_cap: int = DEFAULT_SIZE_CAP,
    max_entries: int = DEFAULT_MAX_ENTRIES,
) -> RankReport:
    c = spec.complex
    rank = rank_theorem1(spec)
    methods = [METHOD_THEOREM1]
    ds = is_dehn_sommerville(c)
    alternating_match: Optional[bool] = None

    r = spec.constant_level
    if r is not None:
        _expect_same(rank, eval_fine_polynomial(c, r), METHOD_THEOREM2)
        methods.append(METHOD_THEOREM2)
        _expect_same(rank, rank_theorem2(c, r), METHOD_COROLLARY1)
        methods.append(METHOD_COROLLARY1)
        if ds:
            _expect_same(rank, rank_ds(c, r), METHOD_DS)
            methods.append(METHOD_DS)
    elif ds:
        alternating_match = alternating_face_sum(spec) == rank

    cells = spec.cell_count
    dof = cells - rank
    if dof < 0:
        raise RankMismatchError(f"rank {rank} exceeds the number of cells {cells}")

    result = RankReport(
        rank=rank,
        model_dimension=rank - 1,
        degrees_of_freedom=dof,
        cell_count=cells,
        methods_checked=methods,
        ds_model=ds,
        ds_alternating_match=alternating_match,
    )
    if verify:
        verification = verify_spec(spec, size_cap=size_cap, max_entries=max_entries)
        result.oracle_checked = verification.verified
        result.oracle_rank = verification.oracle_rank
        result.oracle_agrees = verification.agree
    return result


def family_cyclic(m: int) -> SimplicialComplex:
    _check_family_bound("cyclic", m, 3)
    return from_facets(m, [(i, i % m + 1) for i in range(1, m + 1)])


def family_main_effect(m: int) -> SimplicialComplex:
    _check_family_bound("main-effect", m, 1)
    return from_facets(m, [(v,) for v in range(1, m + 1)])


def family_saturated(m: int) -> SimplicialComplex:
    _check_family_bound("saturated", m, 1)
    return from_facets(m, [tuple(range(1, m + 1))])


def family_simplex_boundary(m: int) -> SimplicialComplex:
    _check_family_bound("simplex-boundary", m, 2)
    return from_facets(m, itertools.combinations(range(1, m + 1), m - 1))


FAMILIES: dict[str, tuple[Callable[[int], SimplicialComplex], int]] = {
    "cyclic": (family_cyclic, 3),
    "main-effect": (family_main_effect, 1),
    "saturated": (family_saturated, 1),
    "simplex-boundary": (family_simplex_boundary, 2),
}


def family(name: str, m: int) -> SimplicialComplex:
    if name not in FAMILIES:
        raise ValueError(f"Unknown family: {name} (choose from {', '.join(FAMILIES)})")
    builder, _ = FAMILIES[name]
    return builder(m)


def _check_family_bound(name: str, m: int, minimum: int) -> None:
    if isinstance(m, bool) or not isinstance(m, int) or m < minimum:
        raise ValueError(f"family {name} needs m >= {minimum}, got {m!r}")


def _check_level(r: int) -> None:
    if isinstance(r, bool) or not isinstance(r, int) or r < 1:
        raise ValueError(f"level count must be a positive integer, got {r!r}")


def _expect_same(rank: int, other: int, method: str) -> None:
    if rank != other:
        raise RankMismatchError(f"{method} gives rank {other}, theorem1 gives {rank}")

"""Abstract simplicial complexes on the ground set [m] = {1, ..., m}.

Faces are sorted tuples of vertex labels.  Internally every face is also
encoded as an int bitmask (bit v-1 set for vertex v), which keeps subset
tests and downward closure cheap for any m.
"""

import itertools
import random
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from functools import lru_cache
from typing import Any

Face = tuple[int, ...]


class ComplexError(ValueError):
    """Raised when a facet list does not describe a valid complex on [m]."""


@dataclass(frozen=True)
class SimplicialComplex:
    vertex_count: int
    facets: tuple[Face, ...]

    def __post_init__(self) -> None:
        if self.vertex_count < 1:
            raise ComplexError(f"vertex count must be positive, got {self.vertex_count}")
        if self.facets != _canonical_facets(self.vertex_count, self.facets):
            raise ComplexError("facets must be given in canonical form; use from_facets()")

    @property
    def dimension(self) -> int:
        return max(len(facet) for facet in self.facets) - 1


@dataclass(frozen=True)
class FVector:
    """Face counts (f_-1, f_0, ..., f_dim); f_-1 sits at index 0."""

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.counts:
            raise ValueError("f-vector must contain at least f_-1")
        if self.counts[0] != 1:
            raise ValueError(f"f_-1 must be 1, got {self.counts[0]}")
        if any(value < 1 for value in self.counts):
            raise ValueError(f"f-vector entries must be positive: {list(self.counts)}")

    @property
    def dim(self) -> int:
        return len(self.counts) - 2

    def f(self, i: int) -> int:
        return self.counts[i + 1]


def from_facets(m: int, facet_candidates: Iterable[Iterable[int]]) -> SimplicialComplex:
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise ComplexError(f"vertex count must be a positive integer, got {m!r}")
    return SimplicialComplex(vertex_count=m, facets=_canonical_facets(m, facet_candidates))


def faces(c: SimplicialComplex) -> list[Face]:
    return [_unmask(mask) for mask in _sorted_masks(_face_masks(c))]


def f_vector(c: SimplicialComplex) -> FVector:
    counts = [0] * (c.dimension + 2)
    for mask in _face_masks(c):
        counts[_popcount(mask)] += 1
    return FVector(tuple(counts))


def minimal_nonfaces(c: SimplicialComplex) -> list[Face]:
    face_masks = _face_masks(c)
    found: set[int] = set()
    # Every minimal non-face is some face plus one vertex.
    for mask in face_masks:
        for v in range(c.vertex_count):
            bit = 1 << v
            if mask & bit:
                continue
            candidate = mask | bit
            if candidate in face_masks or candidate in found:
                continue
            if all((candidate & ~(1 << u)) in face_masks for u in _bits(candidate)):
                found.add(candidate)
    return [_unmask(mask) for mask in _sorted_masks(found)]


def is_face(c: SimplicialComplex, s: Iterable[int]) -> bool:
    mask = _mask(_check_labels(c.vertex_count, s))
    return any(mask & facet_mask == mask for facet_mask in _facet_masks(c))


def dimension(c: SimplicialComplex) -> int:
    return c.dimension


def with_facet(c: SimplicialComplex, s: Iterable[int]) -> SimplicialComplex:
    """Return the smallest complex containing c and the simplex s."""
    return from_facets(c.vertex_count, [*c.facets, tuple(s)])


def to_json(c: SimplicialComplex) -> dict[str, Any]:
    return {"m": c.vertex_count, "facets": [list(facet) for facet in c.facets]}


def complex_from_json(obj: dict[str, Any]) -> SimplicialComplex:
    if not isinstance(obj, dict):
        raise ComplexError("complex description must be a JSON object")
    if "m" not in obj or "facets" not in obj:
        raise ComplexError("complex description requires 'm' and 'facets'")
    facets = obj["facets"]
    if not isinstance(facets, list) or not all(isinstance(f, list) for f in facets):
        raise ComplexError("'facets' must be a list of integer lists")
    return from_facets(obj["m"], facets)


def enumerate_complexes(m: int) -> Iterator[SimplicialComplex]:
    """Yield every complex on [m] that contains all singletons.

    Faces are chosen level by level: a k-set may be added only when all of
    its (k-1)-subsets were chosen on the previous level.
    """
    if m < 1:
        raise ComplexError(f"vertex count must be positive, got {m}")
    base = frozenset([0, *(1 << v for v in range(m))])

    def extend(chosen: frozenset, size: int) -> Iterator[SimplicialComplex]:
        candidates = [
            mask
            for mask in (_mask(combo) for combo in itertools.combinations(range(1, m + 1), size))
            if all((mask & ~(1 << u)) in chosen for u in _bits(mask))
        ] if size <= m else []
        if not candidates:
            yield _complex_from_face_masks(m, chosen)
            return
        for keep in itertools.product((False, True), repeat=len(candidates)):
            level = [mask for mask, flag in zip(candidates, keep) if flag]
            if not level:
                yield _complex_from_face_masks(m, chosen)
            else:
                yield from extend(chosen | frozenset(level), size + 1)

    yield from extend(base, 2)


def random_complex(m: int, rng: random.Random, max_extra_facets: int = 4) -> SimplicialComplex:
    candidates: list[list[int]] = [[v] for v in range(1, m + 1)]
    if m >= 2:
        for _ in range(rng.randint(0, max_extra_facets)):
            size = rng.randint(2, m)
            candidates.append(rng.sample(range(1, m + 1), size))
    return from_facets(m, candidates)


def _canonical_facets(m: int, facet_candidates: Iterable[Iterable[int]]) -> tuple[Face, ...]:
    masks = {_mask(_check_labels(m, candidate)) for candidate in facet_candidates}
    maximal = [mask for mask in masks if not any(mask != other and mask & other == mask for other in masks)]
    covered = 0
    for mask in maximal:
        covered |= mask
    for v in range(1, m + 1):
        if not covered & (1 << (v - 1)):
            raise ComplexError(f"vertex {v} is not covered by any facet; pass isolated vertices as singletons")
    return tuple(sorted(_unmask(mask) for mask in maximal))


def _check_labels(m: int, s: Iterable[int]) -> Face:
    labels = []
    for label in s:
        if isinstance(label, bool) or not isinstance(label, int):
            raise ComplexError(f"vertex label must be an integer, got {label!r}")
        if not 1 <= label <= m:
            raise ComplexError(f"vertex label {label} out of range 1..{m}")
        labels.append(label)
    return tuple(sorted(set(labels)))


def _complex_from_face_masks(m: int, face_masks: Iterable[int]) -> SimplicialComplex:
    return from_facets(m, [_unmask(mask) for mask in face_masks])


@lru_cache(maxsize=512)
def _facet_masks(c: SimplicialComplex) -> tuple[int, ...]:
    return tuple(_mask(facet) for facet in c.facets)


@lru_cache(maxsize=512)
def _face_masks(c: SimplicialComplex) -> frozenset:
    seen: set[int] = set()
    for facet_mask in _facet_masks(c):
        # Enumerate all submasks of the facet.
        sub = facet_mask
        while True:
            seen.add(sub)
            if sub == 0:
                break
            sub = (sub - 1) & facet_mask
    return frozenset(seen)


def _sorted_masks(masks: Iterable[int]) -> list[int]:
    return sorted(masks, key=lambda mask: (_popcount(mask), _unmask(mask)))


def _mask(face: Iterable[int]) -> int:
    mask = 0
    for v in face:
        mask |= 1 << (v - 1)
    return mask


def _unmask(mask: int) -> Face:
    return tuple(u + 1 for u in _bits(mask))


def _bits(mask: int) -> list[int]:
    out = []
    position = 0
    while mask:
        if mask & 1:
            out.append(position)
        mask >>= 1
        position += 1
    return out


def _popcount(mask: int) -> int:
    return bin(mask).count("1")

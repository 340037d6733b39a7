"""Batch validation of the rank formula against the explicit matrix rank."""

import itertools
import logging
import random
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .complex_core import SimplicialComplex, enumerate_complexes, random_complex, to_json
from .config import DEFAULT_MAX_ENTRIES, DEFAULT_SIZE_CAP
from .model_matrix import ModelSpec, verify_spec
from .rank_engine import json_int

logger = logging.getLogger(__name__)

MAX_EXHAUSTIVE_M = 4
# Redraws per slot before a random sweep accepts a complex it already holds.
RANDOM_DRAW_ATTEMPTS = 64


@dataclass
class SweepCase:
    index: int
    complex: SimplicialComplex
    levels: tuple[int, ...]
    formula_rank: int
    oracle_rank: Optional[int]
    agree: Optional[bool]

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            **to_json(self.complex),
            "levels": list(self.levels),
            "formula_rank": json_int(self.formula_rank),
            "oracle_rank": None if self.oracle_rank is None else json_int(self.oracle_rank),
            "agree": self.agree,
        }


@dataclass
class SweepSummary:
    cases: list[SweepCase] = field(default_factory=list)

    @property
    def checked(self) -> int:
        return sum(1 for case in self.cases if case.agree is not None)

    @property
    def agreed(self) -> int:
        return sum(1 for case in self.cases if case.agree is True)

    @property
    def skipped(self) -> int:
        return sum(1 for case in self.cases if case.agree is None)

    @property
    def disagreements(self) -> list[SweepCase]:
        return [case for case in self.cases if case.agree is False]

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def by_vertex_count(self) -> list[dict[str, int]]:
        rows = []
        for m, group in itertools.groupby(
            sorted(self.cases, key=lambda case: case.complex.vertex_count),
            key=lambda case: case.complex.vertex_count,
        ):
            group = list(group)
            rows.append(
                {
                    "m": m,
                    "complexes": len({case.complex for case in group}),
                    "level_vectors": len({case.levels for case in group}),
                    "checked": sum(1 for case in group if case.agree is not None),
                    "skipped": sum(1 for case in group if case.agree is None),
                    "disagreements": sum(1 for case in group if case.agree is False),
                }
            )
        return rows

    def to_dict(self, include_cases: bool = False) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "cases": len(self.cases),
            "checked": self.checked,
            "agreed": self.agreed,
            "skipped": self.skipped,
            "disagreements": [case.to_dict() for case in self.disagreements],
            "by_m": self.by_vertex_count(),
            "ok": self.ok,
        }
        if include_cases:
            payload["case_list"] = [case.to_dict() for case in self.cases]
        return payload


def exhaustive_specs(max_m: int, level_set: Sequence[int], min_m: Optional[int] = None) -> list[ModelSpec]:
    if max_m > MAX_EXHAUSTIVE_M:
        raise ValueError(f"exhaustive sweep is limited to m <= {MAX_EXHAUSTIVE_M}, got {max_m}")
    low = max_m if min_m is None else min_m
    if low < 1 or low > max_m:
        raise ValueError(f"vertex range must satisfy 1 <= min_m <= max_m, got {low}..{max_m}")
    levels = _check_level_set(level_set)
    specs = []
    for m in range(low, max_m + 1):
        for complex_ in enumerate_complexes(m):
            for vector in itertools.product(levels, repeat=m):
                specs.append(ModelSpec(complex=complex_, levels=vector))
    return specs


def random_specs(count: int, ms: Sequence[int], level_set: Sequence[int], seed: int) -> list[ModelSpec]:
    if count < 0:
        raise ValueError(f"random case count must be non-negative, got {count}")
    if not ms or any(m < 1 for m in ms):
        raise ValueError(f"random vertex counts must be positive, got {list(ms)}")
    levels = _check_level_set(level_set)
    rng = random.Random(seed)
    seen: set[SimplicialComplex] = set()
    specs = []
    for i in range(count):
        m = ms[i % len(ms)]
        complex_ = random_complex(m, rng)
        for _ in range(RANDOM_DRAW_ATTEMPTS):
            if complex_ not in seen:
                break
            complex_ = random_complex(m, rng)
        seen.add(complex_)
        specs.append(ModelSpec(complex=complex_, levels=tuple(rng.choice(levels) for _ in range(m))))
    return specs


def run_specs(
    specs: Sequence[ModelSpec],
    size_cap: int = DEFAULT_SIZE_CAP,
    max_workers: int = 4,
    on_case: Optional[Callable[[SweepCase], None]] = None,
    max_entries: int = DEFAULT_MAX_ENTRIES,
) -> SweepSummary:
    """Verify every spec; cases come back in input order whatever the worker count."""
    if not specs:
        return SweepSummary()
    max_workers = max(1, min(max_workers, len(specs)))

    def _run_single(index: int, spec: ModelSpec) -> SweepCase:
        result = verify_spec(spec, size_cap=size_cap, max_entries=max_entries)
        return SweepCase(
            index=index,
            complex=spec.complex,
            levels=spec.levels,
            formula_rank=result.formula_rank,
            oracle_rank=result.oracle_rank,
            agree=result.agree,
        )

    cases: list[SweepCase] = []
    if max_workers == 1:
        for index, spec in enumerate(specs):
            case = _run_single(index, spec)
            cases.append(case)
            if on_case:
                on_case(case)
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            future_map = {executor.submit(_run_single, index, spec): index for index, spec in enumerate(specs)}
            for future in as_completed(future_map):
                case = future.result()
                cases.append(case)
                if on_case:
                    on_case(case)

    cases.sort(key=lambda case: case.index)
    summary = SweepSummary(cases=cases)
    for case in summary.disagreements:
        logger.warning(
            "Rank disagreement on %s with levels %s: formula %s, matrix %s",
            to_json(case.complex),
            case.levels,
            case.formula_rank,
            case.oracle_rank,
        )
    return summary


def run_exhaustive_sweep(
    max_m: int,
    level_set: Sequence[int],
    size_cap: int = DEFAULT_SIZE_CAP,
    max_workers: int = 4,
    on_case: Optional[Callable[[SweepCase], None]] = None,
    min_m: Optional[int] = None,
    max_entries: int = DEFAULT_MAX_ENTRIES,
) -> SweepSummary:
    return run_specs(
        exhaustive_specs(max_m, level_set, min_m=min_m), size_cap, max_workers, on_case, max_entries=max_entries
    )


def run_random_sweep(
    count: int,
    ms: Sequence[int],
    level_set: Sequence[int],
    seed: int,
    size_cap: int = DEFAULT_SIZE_CAP,
    max_workers: int = 4,
    on_case: Optional[Callable[[SweepCase], None]] = None,
    max_entries: int = DEFAULT_MAX_ENTRIES,
) -> SweepSummary:
    return run_specs(random_specs(count, ms, level_set, seed), size_cap, max_workers, on_case, max_entries=max_entries)


def _check_level_set(level_set: Sequence[int]) -> list[int]:
    levels = sorted(set(level_set))
    if not levels or any(isinstance(r, bool) or not isinstance(r, int) or r < 1 for r in levels):
        raise ValueError(f"level set must be non-empty positive integers, got {list(level_set)}")
    return levels

import itertools
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .complex_core import Face, SimplicialComplex
from .config import DEFAULT_MAX_ENTRIES, DEFAULT_SIZE_CAP
from .exp_hilbert import eval_coarse_exact

logger = logging.getLogger(__name__)

# Largest prime below 2^31: products of two residues still fit in int64.
MODULAR_PRIME = 2_147_483_647

# Rows of the long side multiplied per step when forming a Gram matrix.
GRAM_BLOCK_ENTRIES = 1 << 22

Cell = tuple[int, ...]


class SizeCapExceeded(ValueError):
    """Raised when the joint state space or the design matrix is larger than the configured caps."""


class RankMismatchError(RuntimeError):
    """Raised when two rank computations that must agree do not."""


@dataclass(frozen=True)
class ModelSpec:
    complex: SimplicialComplex
    levels: tuple[int, ...]

    def __post_init__(self) -> None:
        levels = tuple(self.levels)
        object.__setattr__(self, "levels", levels)
        if len(levels) != self.complex.vertex_count:
            raise ValueError(
                f"expected {self.complex.vertex_count} level counts, got {len(levels)}"
            )
        for value in levels:
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ValueError(f"level counts must be positive integers, got {value!r}")

    @classmethod
    def constant(cls, complex_: SimplicialComplex, r: int) -> "ModelSpec":
        return cls(complex=complex_, levels=(r,) * complex_.vertex_count)

    @property
    def cell_count(self) -> int:
        return math.prod(self.levels)

    @property
    def constant_level(self) -> Optional[int]:
        first = self.levels[0]
        return first if all(value == first for value in self.levels) else None


@dataclass
class DesignMatrix:
    entries: np.ndarray
    row_index: list[tuple[Face, Cell]]
    col_index: list[Cell]
    row_blocks: dict[Face, tuple[int, int]]

    @property
    def shape(self) -> tuple[int, int]:
        rows, cols = self.entries.shape
        return int(rows), int(cols)


@dataclass(frozen=True)
class VerificationResult:
    formula_rank: int
    oracle_rank: Optional[int]
    agree: Optional[bool]
    verified: bool


def build_design_matrix(
    spec: ModelSpec,
    size_cap: int = DEFAULT_SIZE_CAP,
    max_entries: int = DEFAULT_MAX_ENTRIES,
) -> DesignMatrix:
    """One row per (facet, marginal cell), one column per joint cell.

    Cells are 1-based and enumerated with the last coordinate varying fastest,
    both for the columns and for the marginal cells inside each facet block.
    """
    cols = spec.cell_count
    if cols > size_cap:
        raise SizeCapExceeded(f"joint state space has {cols} cells, above the size cap {size_cap}")

    rows = design_row_count(spec)
    if rows * cols > max_entries:
        raise SizeCapExceeded(
            f"design matrix would be {rows} x {cols}, above the entry budget {max_entries}"
        )

    levels = spec.levels
    m = len(levels)
    coords = np.indices(levels).reshape(m, -1)
    column_ids = np.arange(cols)

    blocks = []
    row_index: list[tuple[Face, Cell]] = []
    row_blocks: dict[Face, tuple[int, int]] = {}
    offset = 0
    for facet in spec.complex.facets:
        dims = [levels[v - 1] for v in facet]
        block_rows = math.prod(dims)
        marginal = np.ravel_multi_index(tuple(coords[v - 1] for v in facet), dims)
        block = np.zeros((block_rows, cols), dtype=np.uint8)
        block[marginal, column_ids] = 1
        blocks.append(block)
        row_index.extend((facet, cell) for cell in _cells(dims))
        row_blocks[facet] = (offset, offset + block_rows)
        offset += block_rows

    return DesignMatrix(
        entries=np.vstack(blocks),
        row_index=row_index,
        col_index=list(_cells(levels)),
        row_blocks=row_blocks,
    )


def design_row_count(spec: ModelSpec) -> int:
    return sum(math.prod(spec.levels[v - 1] for v in facet) for facet in spec.complex.facets)


def exact_rank(mat: DesignMatrix, cross_check: bool = True) -> int:
    reduced = gram_reduce(mat.entries)
    rank = bareiss_rank(reduced)
    if cross_check:
        residue_rank = modular_rank(reduced)
        if residue_rank != rank:
            raise RankMismatchError(
                f"fraction-free rank {rank} disagrees with rank {residue_rank} mod {MODULAR_PRIME}"
            )
    return rank


def gram_reduce(entries: np.ndarray) -> np.ndarray:
    """Square integer matrix on the smaller side with the same rank over Q.

    rank(A) = rank(A A^T) = rank(A^T A) for real A.  Entries of a 0/1 Gram
    matrix are counts bounded by the longer side, so the float64 product is
    exact.  The long side is consumed in blocks so only one float64 slice of
    the input is alive at a time.
    """
    rows, cols = entries.shape
    if rows == cols or rows == 0 or cols == 0:
        return np.asarray(entries, dtype=np.int64)
    tall = rows > cols
    side, length = (cols, rows) if tall else (rows, cols)
    step = max(1, GRAM_BLOCK_ENTRIES // side)
    product = np.zeros((side, side), dtype=np.float64)
    for start in range(0, length, step):
        block = entries[start : start + step] if tall else entries[:, start : start + step].T
        block = np.asarray(block, dtype=np.float64)
        product += block.T @ block
    return np.rint(product).astype(np.int64)


def bareiss_rank(entries: np.ndarray) -> int:
    """Rank over Q by fraction-free elimination on Python ints.

    Every entry below the pivot row stays an exact minor of the input, so
    the division by the previous pivot is exact.
    """
    work = np.array(np.asarray(entries).tolist(), dtype=object)
    if work.ndim != 2 or 0 in work.shape:
        return 0
    n_rows, n_cols = work.shape
    previous = 1
    rank = 0
    for col in range(n_cols):
        if rank == n_rows:
            break
        candidates = np.flatnonzero(work[rank:, col] != 0)
        if candidates.size == 0:
            continue
        pivot_row = rank + int(candidates[0])
        if pivot_row != rank:
            work[[rank, pivot_row]] = work[[pivot_row, rank]]
        pivot = work[rank, col]
        below = work[rank + 1 :, col + 1 :]
        work[rank + 1 :, col + 1 :] = (
            pivot * below - np.outer(work[rank + 1 :, col], work[rank, col + 1 :])
        ) // previous
        work[rank + 1 :, col] = 0
        previous = pivot
        rank += 1
    return rank


def modular_rank(entries: np.ndarray, prime: int = MODULAR_PRIME) -> int:
    work = np.array(entries, dtype=np.int64) % prime
    if work.ndim != 2 or 0 in work.shape:
        return 0
    n_rows, n_cols = work.shape
    rank = 0
    for col in range(n_cols):
        if rank == n_rows:
            break
        candidates = np.flatnonzero(work[rank:, col])
        if candidates.size == 0:
            continue
        pivot_row = rank + int(candidates[0])
        if pivot_row != rank:
            work[[rank, pivot_row]] = work[[pivot_row, rank]]
        inverse = pow(int(work[rank, col]), -1, prime)
        work[rank] = (work[rank] * inverse) % prime
        factors = work[rank + 1 :, col].copy()
        work[rank + 1 :] = (work[rank + 1 :] - np.outer(factors, work[rank]) % prime) % prime
        rank += 1
    return rank


def verify_spec(
    spec: ModelSpec,
    size_cap: int = DEFAULT_SIZE_CAP,
    max_entries: int = DEFAULT_MAX_ENTRIES,
) -> VerificationResult:
    formula = eval_coarse_exact(spec.complex, spec.levels)
    try:
        mat = build_design_matrix(spec, size_cap=size_cap, max_entries=max_entries)
    except SizeCapExceeded as exc:
        logger.warning("Matrix oracle skipped, formula value only: %s", exc)
        return VerificationResult(formula_rank=formula, oracle_rank=None, agree=None, verified=False)
    oracle = exact_rank(mat)
    return VerificationResult(formula_rank=formula, oracle_rank=oracle, agree=oracle == formula, verified=True)


def format_matrix_dump(mat: DesignMatrix) -> str:
    rows, cols = mat.shape
    lines = [f"{rows} {cols}"]
    lines.extend(" ".join(str(int(value)) for value in row) for row in mat.entries)
    return "\n".join(lines) + "\n"


def parse_matrix_dump(text: str) -> np.ndarray:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ValueError("empty matrix dump")
    try:
        rows, cols = (int(token) for token in lines[0].split())
    except ValueError as exc:
        raise ValueError(f"matrix dump header must be 'rows cols', got {lines[0]!r}") from exc
    body = lines[1:]
    if len(body) != rows:
        raise ValueError(f"matrix dump declares {rows} rows but has {len(body)}")
    entries = np.zeros((rows, cols), dtype=np.uint8)
    for i, line in enumerate(body):
        values = [int(token) for token in line.split()]
        if len(values) != cols or any(value not in (0, 1) for value in values):
            raise ValueError(f"matrix dump row {i + 1} must hold {cols} values in {{0,1}}")
        entries[i] = values
    return entries


def _cells(dims: Sequence[int]) -> itertools.product:
    return itertools.product(*(range(1, n + 1) for n in dims))

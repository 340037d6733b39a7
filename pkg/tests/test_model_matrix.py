import random

import numpy as np
import pytest

import src.model_matrix as model_matrix
from src.complex_core import from_facets
from src.model_matrix import (
    ModelSpec,
    RankMismatchError,
    SizeCapExceeded,
    bareiss_rank,
    build_design_matrix,
    exact_rank,
    format_matrix_dump,
    gram_reduce,
    modular_rank,
    parse_matrix_dump,
    verify_spec,
)
from src.rank_engine import family_cyclic, family_main_effect, family_saturated, family_simplex_boundary
from tests.helpers.brute_force import sympy_rank

MAIN_EFFECT_2x2_DUMP = "4 4\n1 1 0 0\n0 0 1 1\n1 0 1 0\n0 1 0 1\n"


def test_model_spec_validation(three_edge_complex):
    spec = ModelSpec.constant(three_edge_complex, 2)
    assert spec.levels == (2, 2, 2, 2)
    assert spec.cell_count == 16
    assert spec.constant_level == 2
    assert ModelSpec(three_edge_complex, [2, 3, 2, 2]).constant_level is None
    with pytest.raises(ValueError):
        ModelSpec(three_edge_complex, (2, 2, 2))
    with pytest.raises(ValueError):
        ModelSpec(three_edge_complex, (2, 2, 0, 2))


def test_single_variable_matrix_is_identity():
    mat = build_design_matrix(ModelSpec.constant(family_main_effect(1), 3))
    assert np.array_equal(mat.entries, np.eye(3, dtype=np.uint8))
    assert exact_rank(mat) == 3


def test_saturated_two_variables_is_identity():
    mat = build_design_matrix(ModelSpec(from_facets(2, [[1, 2]]), (2, 3)))
    assert mat.shape == (6, 6)
    assert np.array_equal(mat.entries.sum(axis=0), np.ones(6))
    assert np.array_equal(mat.entries.sum(axis=1), np.ones(6))
    assert np.array_equal(mat.entries, np.eye(6, dtype=np.uint8))


def test_three_edge_matrix_shape_and_rank(three_edge_complex):
    mat = build_design_matrix(ModelSpec.constant(three_edge_complex, 2))
    assert mat.shape == (12, 16)
    assert exact_rank(mat) == 8
    assert mat.row_index[0] == ((1, 2), (1, 1))
    assert mat.row_blocks[(1, 4)] == (4, 8)
    assert mat.col_index[:3] == [(1, 1, 1, 1), (1, 1, 1, 2), (1, 1, 2, 1)]


def test_simplex_boundary_matrix_rank():
    mat = build_design_matrix(ModelSpec.constant(family_simplex_boundary(4), 2))
    assert mat.shape == (32, 16)
    assert exact_rank(mat) == 15


def test_row_blocks_sum_to_ones_and_columns_count_facets():
    for c, levels in [
        (family_cyclic(4), (2, 3, 2, 1)),
        (from_facets(4, [[1, 2, 3], [3, 4]]), (3, 2, 2, 2)),
        (family_simplex_boundary(3), (2, 2, 3)),
    ]:
        mat = build_design_matrix(ModelSpec(c, levels))
        for start, stop in mat.row_blocks.values():
            assert np.array_equal(mat.entries[start:stop].sum(axis=0), np.ones(mat.shape[1]))
        assert np.all(mat.entries.sum(axis=0) == len(c.facets))


def test_size_cap_is_enforced():
    spec = ModelSpec.constant(family_saturated(3), 2)
    with pytest.raises(SizeCapExceeded, match="size cap 4"):
        build_design_matrix(spec, size_cap=4)
    assert issubclass(SizeCapExceeded, ValueError)


@pytest.mark.parametrize(
    "entries, expected",
    [
        ([[0, 0], [0, 0]], 0),
        ([[2, 4], [1, 2]], 1),
        ([[1, 2, 3], [4, 5, 6], [7, 8, 9]], 2),
        ([[1, 2, 3], [4, 5, 6], [7, 8, 10]], 3),
        ([[0, 1], [1, 0], [1, 1]], 2),
    ],
)
def test_bareiss_and_modular_rank(entries, expected):
    array = np.array(entries)
    assert bareiss_rank(array) == expected
    assert modular_rank(array) == expected


def test_empty_matrix_rank():
    assert bareiss_rank(np.zeros((0, 3), dtype=np.int64)) == 0
    assert modular_rank(np.zeros((0, 3), dtype=np.int64)) == 0


def test_gram_reduce_keeps_rank_and_squares_the_short_side(three_edge_complex):
    entries = build_design_matrix(ModelSpec.constant(three_edge_complex, 2)).entries
    reduced = gram_reduce(entries)
    assert reduced.shape == (12, 12)
    assert bareiss_rank(reduced) == sympy_rank(entries) == 8
    tall = gram_reduce(entries.T)
    assert tall.shape == (12, 12)


def test_gram_reduce_in_small_blocks_matches_full_product(monkeypatch):
    entries = build_design_matrix(ModelSpec.constant(family_cyclic(4), 3)).entries
    assert entries.shape == (36, 81)
    full = entries.astype(np.int64) @ entries.T.astype(np.int64)
    monkeypatch.setattr(model_matrix, "GRAM_BLOCK_ENTRIES", 5)
    assert np.array_equal(gram_reduce(entries), full)
    assert np.array_equal(gram_reduce(entries.T), full)


def test_entry_budget_is_enforced(three_edge_complex):
    spec = ModelSpec.constant(three_edge_complex, 2)
    with pytest.raises(SizeCapExceeded, match="12 x 16, above the entry budget 191"):
        build_design_matrix(spec, max_entries=191)
    assert build_design_matrix(spec, max_entries=192).shape == (12, 16)


def test_large_square_model_is_not_allocated(caplog):
    spec = ModelSpec.constant(family_saturated(16), 2)
    assert spec.cell_count <= model_matrix.DEFAULT_SIZE_CAP
    with pytest.raises(SizeCapExceeded, match="entry budget"):
        build_design_matrix(spec)
    result = verify_spec(spec)
    assert result.formula_rank == 2**16
    assert result.oracle_rank is None
    assert result.agree is None
    assert not result.verified
    assert "entry budget" in caplog.text


def test_exact_rank_matches_sympy_on_random_models():
    rng = random.Random(11)
    for _ in range(15):
        m = rng.randint(1, 3)
        facets = [[v] for v in range(1, m + 1)]
        for _ in range(rng.randint(0, 3)):
            facets.append(rng.sample(range(1, m + 1), rng.randint(1, m)))
        levels = tuple(rng.randint(1, 3) for _ in range(m))
        mat = build_design_matrix(ModelSpec(from_facets(m, facets), levels))
        assert exact_rank(mat) == sympy_rank(mat.entries)


def test_rank_is_invariant_under_permutations():
    mat = build_design_matrix(ModelSpec(family_cyclic(4), (2, 3, 2, 2)))
    rng = np.random.default_rng(5)
    base = bareiss_rank(mat.entries)
    for _ in range(5):
        shuffled = mat.entries[rng.permutation(mat.shape[0])][:, rng.permutation(mat.shape[1])]
        assert bareiss_rank(shuffled) == base
        assert bareiss_rank(gram_reduce(shuffled)) == base


def test_modular_disagreement_raises(monkeypatch, three_edge_complex):
    mat = build_design_matrix(ModelSpec.constant(three_edge_complex, 2))
    monkeypatch.setattr(model_matrix, "modular_rank", lambda entries, prime=model_matrix.MODULAR_PRIME: 7)
    with pytest.raises(RankMismatchError):
        exact_rank(mat)
    assert exact_rank(mat, cross_check=False) == 8


@pytest.mark.parametrize(
    "spec, expected",
    [
        (ModelSpec.constant(family_cyclic(5), 2), 11),
        (ModelSpec(family_saturated(3), (2, 3, 2)), 12),
        (ModelSpec.constant(family_main_effect(2), 2), 3),
        (ModelSpec(from_facets(3, [[1, 2], [2, 3]]), (1, 2, 3)), 6),
    ],
)
def test_verify_spec_examples(spec, expected):
    result = verify_spec(spec)
    assert result.verified
    assert result.formula_rank == expected
    assert result.oracle_rank == expected
    assert result.agree is True


def test_verify_spec_downgrades_above_size_cap(caplog):
    result = verify_spec(ModelSpec.constant(family_saturated(3), 2), size_cap=4)
    assert result.formula_rank == 8
    assert result.oracle_rank is None
    assert result.agree is None
    assert not result.verified
    assert "size cap" in caplog.text


def test_matrix_dump_golden():
    mat = build_design_matrix(ModelSpec.constant(family_main_effect(2), 2))
    text = format_matrix_dump(mat)
    assert text == MAIN_EFFECT_2x2_DUMP
    assert np.array_equal(parse_matrix_dump(text), mat.entries)


def test_matrix_dump_of_identity():
    mat = build_design_matrix(ModelSpec.constant(family_main_effect(1), 2))
    assert format_matrix_dump(mat) == "2 2\n1 0\n0 1\n"


@pytest.mark.parametrize(
    "text",
    ["", "2\n1 0\n0 1\n", "2 2\n1 0\n", "2 2\n1 0\n0 2\n", "2 2\n1 0 1\n0 1\n"],
)
def test_parse_matrix_dump_rejects_malformed(text):
    with pytest.raises(ValueError):
        parse_matrix_dump(text)

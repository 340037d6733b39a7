import json
from dataclasses import dataclass
from typing import Any, Optional, Union

import jsonschema

from .complex_core import SimplicialComplex, complex_from_json

MODEL_INPUT_SCHEMA = {
    "type": "object",
    "properties": {
        "m": {"type": "integer", "minimum": 1},
        "facets": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        },
        "levels": {
            "anyOf": [
                {"type": "array", "items": {"type": "integer", "minimum": 1}},
                {"type": "null"},
            ]
        },
        "names": {"type": "array", "items": {"type": "string"}},
    },
    "required": ["m", "facets"],
    "additionalProperties": False,
}

_INT_OR_DECIMAL = {"anyOf": [{"type": "integer"}, {"type": "string", "pattern": "^-?[0-9]+$"}]}

INFO_OUTPUT_SCHEMA = {
    "type": "object",
    "properties": {
        "m": {"type": "integer"},
        "facets": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "f_vector": {"type": "array", "items": _INT_OR_DECIMAL},
        "e_vector": {"type": "array", "items": _INT_OR_DECIMAL},
        "minimal_nonfaces": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "dehn_sommerville": {"type": "boolean"},
    },
    "required": ["m", "facets", "f_vector", "e_vector", "minimal_nonfaces", "dehn_sommerville"],
}

RANK_OUTPUT_SCHEMA = {
    "type": "object",
    "properties": {
        "m": {"type": "integer"},
        "facets": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "levels": {"type": "array", "items": {"type": "integer"}},
        "rank": _INT_OR_DECIMAL,
        "model_dimension": _INT_OR_DECIMAL,
        "degrees_of_freedom": _INT_OR_DECIMAL,
        "cell_count": _INT_OR_DECIMAL,
        "method": {"type": "string", "enum": ["theorem1", "theorem2", "corollary1", "ds_formula"]},
        "methods_checked": {"type": "array", "items": {"type": "string"}},
        "ds_model": {"type": "boolean"},
        "oracle_checked": {"type": "boolean"},
        "oracle_rank": {"anyOf": [_INT_OR_DECIMAL, {"type": "null"}]},
        "oracle_agrees": {"type": ["boolean", "null"]},
        "ds_alternating_match": {"type": ["boolean", "null"]},
    },
    "required": [
        "rank",
        "model_dimension",
        "degrees_of_freedom",
        "method",
        "ds_model",
        "oracle_checked",
    ],
}


@dataclass
class ModelInput:
    complex: SimplicialComplex
    levels: Optional[tuple[int, ...]]
    names: Optional[tuple[str, ...]] = None


def parse_model_input(raw: Union[str, dict[str, Any]]) -> ModelInput:
    """Parse and validate a model description; errors carry line or field diagnostics."""
    if isinstance(raw, str):
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ValueError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    else:
        data = raw

    errors = sorted(
        jsonschema.Draft7Validator(MODEL_INPUT_SCHEMA).iter_errors(data),
        key=lambda err: list(err.absolute_path),
    )
    if errors:
        first = errors[0]
        location = "/".join(str(part) for part in first.absolute_path) or "<root>"
        raise ValueError(f"invalid model input at '{location}': {first.message}")

    complex_ = complex_from_json(data)
    levels = data.get("levels")
    names = data.get("names")
    if levels is not None and len(levels) != complex_.vertex_count:
        raise ValueError(f"'levels' has {len(levels)} entries but m = {complex_.vertex_count}")
    if names is not None and len(names) != complex_.vertex_count:
        raise ValueError(f"'names' has {len(names)} entries but m = {complex_.vertex_count}")
    return ModelInput(
        complex=complex_,
        levels=None if levels is None else tuple(levels),
        names=None if names is None else tuple(names),
    )


def parse_facet_list(raw: str) -> list[list[int]]:
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid facet JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    errors = list(jsonschema.Draft7Validator(MODEL_INPUT_SCHEMA["properties"]["facets"]).iter_errors(data))
    if errors:
        location = "/".join(str(part) for part in errors[0].absolute_path) or "<root>"
        raise ValueError(f"invalid facets at '{location}': {errors[0].message}")
    return data

"""JSON schemas for the documents written by ``warpdens estimate`` and ``warpdens conditional``."""

import jsonschema

_NUMBERS = {"type": "array", "items": {"type": "number"}}

_BOUNDS = {
    "type": "object",
    "required": ["A", "B"],
    "properties": {"A": {"type": "number"}, "B": {"type": "number"}},
}

_FIT = {
    "type": "object",
    "required": ["J", "loglik", "aic", "coefficients"],
    "properties": {
        "J": {"type": "integer", "minimum": 1},
        "loglik": {"type": "number"},
        "initial_loglik": {"type": "number"},
        "aic": {"type": "number"},
        "coefficients": _NUMBERS,
        "converged": {"type": "boolean"},
    },
}

_META = {
    "type": "object",
    "required": ["seed", "config"],
    "properties": {"seed": {"type": "integer"}, "config": {"type": "object"}},
}

ESTIMATE_SCHEMA = {
    "type": "object",
    "required": ["grid", "pdf", "bounds", "fit", "meta"],
    "properties": {"grid": _NUMBERS, "pdf": _NUMBERS, "bounds": _BOUNDS, "fit": _FIT, "meta": _META},
}

CONDITIONAL_SCHEMA = {
    "type": "object",
    "required": ["locations", "meta"],
    "properties": {
        "locations": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["x0", "ok", "bounds"],
                "properties": {
                    "x0": _NUMBERS,
                    "ok": {"type": "boolean"},
                    "bounds": _BOUNDS,
                    "grid": _NUMBERS,
                    "pdf": _NUMBERS,
                    "fit": _FIT,
                    "error": {"type": "string"},
                },
                "if": {"properties": {"ok": {"const": True}}},
                "then": {"required": ["grid", "pdf", "fit"]},
                "else": {"required": ["error"]},
            },
        },
        "meta": _META,
    },
}


def validate_estimate(doc: dict) -> None:
    jsonschema.validate(doc, ESTIMATE_SCHEMA)


def validate_conditional(doc: dict) -> None:
    jsonschema.validate(doc, CONDITIONAL_SCHEMA)

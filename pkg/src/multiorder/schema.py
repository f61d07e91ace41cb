"""Versioned JSON schema for experiment configuration files."""

SCHEMA_VERSION = 1

EXPERIMENT_CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": "multiorder/experiment-config/v1",
    "title": "multiorder experiment configuration",
    "type": "object",
    "required": ["version", "seed", "experiments"],
    "additionalProperties": False,
    "properties": {
        "version": {"const": SCHEMA_VERSION},
        "seed": {"type": "integer", "minimum": 0},
        "output_dir": {"type": "string"},
        "threads": {"type": "integer", "minimum": 1},
        "strict_sampling": {"type": "boolean"},
        "experiments": {
            "type": "array",
            "minItems": 1,
            "items": {"$ref": "#/$defs/experiment"},
        },
    },
    "$defs": {
        "group": {
            "type": "object",
            "required": ["kind"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["int_line", "int_grid"]},
                "d": {"type": "integer", "minimum": 1},
            },
        },
        "process": {
            "oneOf": [
                {"$ref": "#/$defs/bernoulli"},
                {"$ref": "#/$defs/markov_line"},
                {"$ref": "#/$defs/periodic_overlay"},
            ]
        },
        "bernoulli": {
            "type": "object",
            "required": ["variant", "probs"],
            "additionalProperties": False,
            "properties": {
                "variant": {"const": "bernoulli"},
                "probs": {
                    "type": "array",
                    "minItems": 1,
                    "items": {"type": "number", "minimum": 0},
                },
                "alphabet": {"type": "array", "minItems": 1},
                "group": {"$ref": "#/$defs/group"},
            },
        },
        "markov_line": {
            "type": "object",
            "required": ["variant", "transition"],
            "additionalProperties": False,
            "properties": {
                "variant": {"const": "markov_line"},
                "transition": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "array",
                        "minItems": 1,
                        "items": {"type": "number", "minimum": 0},
                    },
                },
                "alphabet": {"type": "array", "minItems": 1},
            },
        },
        "periodic_overlay": {
            "type": "object",
            "required": ["variant", "base", "period"],
            "additionalProperties": False,
            "properties": {
                "variant": {"const": "periodic_overlay"},
                "base": {"$ref": "#/$defs/process"},
                "period": {
                    "type": "array",
                    "minItems": 1,
                    "items": {"type": "integer", "minimum": 1},
                },
            },
        },
        "tiling": {
            "type": "object",
            "required": ["name", "level"],
            "additionalProperties": False,
            "properties": {
                "name": {
                    "enum": ["dyadic_standard", "dyadic_alternating", "hilbert"]
                },
                "level": {"type": "integer", "minimum": 1},
            },
        },
        "params": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "j": {"type": "integer", "minimum": 0},
                "n": {"type": "integer", "minimum": 0},
                "gap": {"type": "integer", "minimum": 1},
                "orders": {"type": "integer", "minimum": 1},
                "samples": {"type": "integer", "minimum": 1},
                "bias": {"enum": ["plugin", "miller_madow"]},
            },
        },
        "experiment": {
            "type": "object",
            "required": ["name", "kind", "tiling", "process", "params"],
            "additionalProperties": False,
            "properties": {
                "name": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
                "kind": {
                    "enum": [
                        "mc_integral",
                        "block_entropy",
                        "cond_entropy",
                        "remote_past_mi",
                        "successor_consistency",
                    ]
                },
                "tiling": {"$ref": "#/$defs/tiling"},
                "process": {"$ref": "#/$defs/process"},
                "params": {"$ref": "#/$defs/params"},
            },
        },
    },
}

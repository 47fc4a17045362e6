"""JSON Schemas (draft 2020-12) for the reports written by the command line.

``SCHEMAS[command]`` describes the top-level object emitted by
``addlab <command> --format json``. Non-finite floats are written as null.
"""

_num = {"type": ["number", "null"]}
_bool = {"type": "boolean"}
_str = {"type": "string"}
_numlist = {"type": "array", "items": _num}
_opt_numlist = {"type": ["array", "null"], "items": _num}
_int = {"type": "integer"}


def _obj(props: dict, required=None) -> dict:
    return {
        "type": "object",
        "properties": props,
        "required": list(props) if required is None else required,
        "additionalProperties": False,
    }


_config = _obj({"restarts": _int, "max_iters": _int, "tol": _num, "seed": _int, "grid": _int})
_verdict = {"enum": ["NonAdditiveCertified", "AdditiveUpToSearch", "NumericalEvidenceOnly"]}
_matrix = {
    "type": "object",
    "properties": {"dim": _int, "rows": _int, "cols": _int, "re": _numlist, "im": _numlist},
    "required": ["dim", "re", "im"],
    "additionalProperties": False,
}

_gap_fields = {
    "function_spec": _str,
    "pair_spec": _str,
    "product_max": _num,
    "entangled_max": _num,
    "gap": _num,
    "witness_schmidt": _opt_numlist,
    "verdict": _verdict,
    "covariant": _bool,
    "product_exact": _bool,
    "converged": _bool,
}

SCHEMAS = {
    "spectrum": _obj({
        "command": {"const": "spectrum"},
        "schmidt": _numlist,
        "eigenvalues": {**_numlist, "minItems": 9, "maxItems": 9},
        "e_values": {**_numlist, "minItems": 6, "maxItems": 6},
        "g_values": {**_numlist, "minItems": 3, "maxItems": 3},
        "t": _num,
        "theta": _num,
    }),
    "optimize": _obj({
        "command": {"const": "optimize"},
        "mode": {"enum": ["product", "entangled", "schmidt", "maxeig"]},
        "function_spec": {"type": ["string", "null"]},
        "target_spec": _str,
        "config": _config,
        "value": _num,
        "argmax_re": _numlist,
        "argmax_im": _numlist,
        "schmidt": _opt_numlist,
        "restarts_agreeing": _int,
        "converged": _bool,
        "exact": _bool,
    }),
    "gap": _obj({"command": {"const": "gap"}, "config": _config, **_gap_fields}),
    "certify": _obj({
        "command": {"const": "certify"},
        "function_spec": _str,
        "lhs": _num,
        "rhs": _num,
        "non_additive": _bool,
    }),
    "kink-scan": _obj({
        "command": {"const": "kink-scan"},
        "pair_spec": _str,
        "config": _config,
        "grid": {
            "type": "array",
            "items": _obj({"x0": _num, "entangled_value": _num, "product_value": _num, "non_additive": _bool}),
        },
        "gamma_lower_bound": _num,
        "max_output_eigenvalue": _num,
        "max_output_eigenvalue_product": _num,
        "eigenvalue_argmax_schmidt": _opt_numlist,
        "lambda_bound": _num,
    }),
    "suite": _obj({
        "command": {"const": "suite"},
        "config": _config,
        "passed": _bool,
        "failures": _numlist,
        "rows": {
            "type": "array",
            "items": _obj({
                "lambda": _num,
                "value": _num,
                "product_value": _num,
                "gap": _num,
                "schmidt": _numlist,
                "vertex_distance": _num,
                "monotone": _bool,
                "passed": _bool,
            }),
        },
    }),
    "tensor-check": _obj({
        "command": {"const": "tensor-check"},
        "function_spec": {"type": ["string", "null"]},
        "mu": _opt_numlist,
        "seed": _int,
        "trials": _int,
        "max_error": _num,
        "passed": _bool,
        "violations": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"trial": _int, "function_spec": _str, "lhs": _num, "rhs": _num},
                "required": ["trial", "lhs", "rhs"],
                "additionalProperties": False,
            },
        },
    }),
    "convexity": _obj({
        "command": {"const": "convexity"},
        "function_spec": _str,
        "dim": _int,
        "samples": _int,
        "seed": _int,
        "passed": _bool,
        "worst_violation": _num,
        "witness": {"oneOf": [{"type": "null"}, _obj({"a": _matrix, "b": _matrix})]},
    }),
}

CSV_COLUMNS = {
    "spectrum": ["index", "eigenvalue", "kind"],
    "optimize": ["value", "restarts_agreeing", "converged", "exact", "schmidt"],
    "gap": list(_gap_fields),
    "certify": ["function_spec", "lhs", "rhs", "non_additive"],
    "kink-scan": ["x0", "entangled_value", "product_value", "non_additive"],
    "suite": ["lambda", "value", "product_value", "gap", "schmidt", "vertex_distance", "monotone", "passed"],
    "tensor-check": ["trials", "max_error", "passed"],
    "convexity": ["function_spec", "dim", "samples", "passed", "worst_violation"],
}

"""Canonical JSON encoding shared by fixtures, specs and reports.

Two requirements drive this module: identical inputs must yield
byte-identical output across runs, and every float must survive a
serialize/parse round trip exactly.  Keys are emitted sorted, floats with 17
significant digits, complex scalars as two-element ``[re, im]`` arrays and
complex matrices as row-major nested arrays of such pairs.
"""

import json
import math

import numpy as np

from .errors import SchemaError


def format_float(x: float) -> str:
    """17-significant-digit decimal form; round-trip exact for IEEE doubles."""
    if math.isnan(x) or math.isinf(x):
        raise ValueError("cannot serialize non-finite float %r" % x)
    return "%.17g" % x


def _write(obj, out):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        out.append("[%s,%s]" % (format_float(z.real), format_float(z.imag)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, np.ndarray):
        _write(obj.tolist(), out)
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _write(item, out)
        out.append("]")
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise TypeError("JSON object keys must be strings, got %r" % (key,))
            if i:
                out.append(",")
            out.append(json.dumps(key, ensure_ascii=True))
            out.append(":")
            _write(obj[key], out)
        out.append("}")
    else:
        raise TypeError("cannot serialize %r" % type(obj))


def dumps_canonical(obj) -> str:
    """Deterministic compact JSON text for ``obj``."""
    out: list[str] = []
    _write(obj, out)
    return "".join(out)


def encode_complex(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def encode_carray(a) -> list:
    """Nested row-major lists with ``[re, im]`` leaves for a complex array."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return encode_complex(a[()])
    return [encode_carray(row) for row in a]


def decode_complex(data, where: str = "value") -> complex:
    if (
        not isinstance(data, (list, tuple))
        or len(data) != 2
        or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in data)
    ):
        raise SchemaError("%s: expected a [re, im] pair, got %r" % (where, data))
    return complex(data[0], data[1])


def decode_carray(data, ndim: int, where: str = "value") -> np.ndarray:
    """Parse a nested complex array of known rank ``ndim``."""
    if ndim == 0:
        return np.asarray(decode_complex(data, where))
    if not isinstance(data, list):
        raise SchemaError("%s: expected an array, got %r" % (where, type(data).__name__))
    rows = [decode_carray(row, ndim - 1, where) for row in data]
    if rows and len({r.shape for r in rows}) > 1:
        raise SchemaError("%s: ragged array" % where)
    if not rows:
        return np.zeros((0,) * ndim, dtype=complex)
    return np.stack(rows)

"""RPC serialization: RPB-style keyword text and a JSON mirror.

Both encodings carry the RPC00B coefficient ordering; numeric values are
serialized with ``repr`` so a round trip is exact.  The key lists are
documented in docs/formats.md.
"""

import json

from .errors import RpcParseError
from .rpc import NUM_COEFFS, RpcModel

__all__ = ["read_rpc", "write_rpc_text", "write_rpc_json"]

_SCALAR_KEYS = (
    ("LINE_OFF", "line_off"),
    ("SAMP_OFF", "samp_off"),
    ("LAT_OFF", "lat_off"),
    ("LONG_OFF", "lon_off"),
    ("HEIGHT_OFF", "height_off"),
    ("LINE_SCALE", "line_scale"),
    ("SAMP_SCALE", "samp_scale"),
    ("LAT_SCALE", "lat_scale"),
    ("LONG_SCALE", "lon_scale"),
    ("HEIGHT_SCALE", "height_scale"),
)

_COEFF_KEYS = (
    ("LINE_NUM_COEFF", "line_num"),
    ("LINE_DEN_COEFF", "line_den"),
    ("SAMP_NUM_COEFF", "samp_num"),
    ("SAMP_DEN_COEFF", "samp_den"),
)

_JSON_COEFF_KEYS = {
    "line_num_coeff": "line_num",
    "line_den_coeff": "line_den",
    "samp_num_coeff": "samp_num",
    "samp_den_coeff": "samp_den",
}


def read_rpc(path):
    """Parse an RPC file (RPB keyword text or the JSON mirror) to a model.

    The format is sniffed from the content: a document starting with '{' is
    treated as JSON.  Missing keys are hard errors listing every absent key.

    Raises:
        RpcParseError: on any malformed input.
    """
    with open(path, "r", encoding="utf-8", errors="replace") as f:
        text = f.read()
    if text.lstrip().startswith("{"):
        return _parse_json(text, str(path))
    return _parse_text(text, str(path))


def _build_model(fields, path):
    try:
        return RpcModel(**fields)
    except ValueError as e:
        raise RpcParseError(f"{path}: {e}") from e


def _parse_text(text, path):
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip().rstrip(";")
        if not line or line.startswith("#"):
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            key, sep, rest = line.partition("=")
        if not sep:
            raise RpcParseError(f"{path}:{lineno}: expected 'KEY: value', got {line!r}")
        key = key.strip().upper()
        token = rest.split()[0] if rest.split() else ""
        if not _expected_text_key(key):
            continue  # foreign RPB fields (e.g. satId, errBias) are ignored
        try:
            values[key] = float(token)
        except ValueError:
            raise RpcParseError(
                f"{path}:{lineno}: non-numeric value {token!r} for {key}"
            ) from None

    missing = [k for k in _all_text_keys() if k not in values]
    if missing:
        raise RpcParseError(f"{path}: missing keys: {', '.join(missing)}")

    fields = {attr: values[key] for key, attr in _SCALAR_KEYS}
    for key, attr in _COEFF_KEYS:
        fields[attr] = [values[f"{key}_{i}"] for i in range(1, NUM_COEFFS + 1)]
    return _build_model(fields, path)


def _expected_text_key(key):
    if key in dict(_SCALAR_KEYS):
        return True
    base, _, idx = key.rpartition("_")
    return base in dict(_COEFF_KEYS) and idx.isdigit()


def _all_text_keys():
    for key, _ in _SCALAR_KEYS:
        yield key
    for key, _ in _COEFF_KEYS:
        for i in range(1, NUM_COEFFS + 1):
            yield f"{key}_{i}"


def _parse_json(text, path):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise RpcParseError(f"{path}: invalid JSON ({e})") from e
    if not isinstance(doc, dict):
        raise RpcParseError(f"{path}: JSON document must be an object")

    expected = [attr for _, attr in _SCALAR_KEYS] + list(_JSON_COEFF_KEYS)
    missing = [k for k in expected if k not in doc]
    if missing:
        raise RpcParseError(f"{path}: missing keys: {', '.join(missing)}")

    fields = {}
    for _, attr in _SCALAR_KEYS:
        v = doc[attr]
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise RpcParseError(f"{path}: {attr} must be a number, got {v!r}")
        fields[attr] = float(v)
    for key, attr in _JSON_COEFF_KEYS.items():
        coeffs = doc[key]
        if not isinstance(coeffs, list) or len(coeffs) != NUM_COEFFS:
            raise RpcParseError(f"{path}: {key} must be a list of {NUM_COEFFS} numbers")
        for v in coeffs:
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise RpcParseError(f"{path}: {key} contains non-numeric value {v!r}")
        fields[attr] = [float(v) for v in coeffs]
    return _build_model(fields, path)


def write_rpc_text(model, path):
    """Serialize a model to the RPB-style keyword text form."""
    lines = []
    for key, attr in _SCALAR_KEYS:
        lines.append(f"{key}: {getattr(model, attr)!r}")
    for key, attr in _COEFF_KEYS:
        for i, c in enumerate(getattr(model, attr), start=1):
            lines.append(f"{key}_{i}: {float(c)!r}")
    with open(path, "w", encoding="ascii") as f:
        f.write("\n".join(lines) + "\n")


def write_rpc_json(model, path):
    """Serialize a model to the JSON mirror format."""
    doc = {attr: getattr(model, attr) for _, attr in _SCALAR_KEYS}
    for key, attr in _JSON_COEFF_KEYS.items():
        doc[key] = [float(c) for c in getattr(model, attr)]
    with open(path, "w", encoding="ascii") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")

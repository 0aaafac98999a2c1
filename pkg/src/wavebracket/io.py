"""JSON and binary codecs for signals, filters and reports.

The JSON schemas here are the wire format of both the CLI and the service.
Grid payloads exist in two forms: inline JSON ([re, im] pairs in C order)
and a binary container (one JSON header line, then little-endian complex64
samples), distinguished by the "format" key / file suffix `.wbg`.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .bracket import FilterSeq
from .errors import UnknownName, Unsupported
from .signal import TIME, AnalyticSignal, GridSignal, Piece, TorusFunction

BINARY_MAGIC = "wbgrid-v1"


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, no whitespace drift."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _complex_pairs(values: np.ndarray) -> list:
    flat = np.asarray(values, dtype=complex).ravel()
    return [[float(v.real), float(v.imag)] for v in flat]


def _from_pairs(pairs, shape) -> np.ndarray:
    arr = np.array([complex(re, im) for re, im in pairs], dtype=complex)
    return arr.reshape(shape)


def piece_to_json(p: Piece) -> dict:
    out = {
        "lo": p.lo.tolist(),
        "hi": p.hi.tolist(),
        "shape": list(p.coeffs.shape),
        "coeffs": _complex_pairs(p.coeffs),
    }
    if p.freq is not None:
        out["freq"] = p.freq.tolist()
    return out


def piece_from_json(obj: dict) -> Piece:
    coeffs = _from_pairs(obj["coeffs"], obj["shape"])
    return Piece(obj["lo"], obj["hi"], coeffs, obj.get("freq"))


def signal_to_json(sig) -> dict:
    if isinstance(sig, AnalyticSignal):
        return {
            "kind": "analytic",
            "domain": sig.domain,
            "dim": sig.dim,
            "pieces": [piece_to_json(p) for p in sig.pieces],
        }
    if isinstance(sig, GridSignal):
        return {
            "kind": "grid",
            "domain": sig.domain,
            "dim": sig.dim,
            "half_width": sig.half_width.tolist(),
            "n_samples": list(sig.n_samples),
            "values": _complex_pairs(sig.values),
            "subsample_shift": sig.subsample_shift,
        }
    raise Unsupported(f"cannot serialize {type(sig).__name__}")


def signal_from_json(obj: dict):
    kind = obj.get("kind")
    if kind == "analytic":
        return AnalyticSignal([piece_from_json(p) for p in obj["pieces"]],
                              obj.get("domain", TIME))
    if kind == "grid":
        values = _from_pairs(obj["values"], obj["n_samples"])
        return GridSignal(obj["half_width"], values, obj.get("domain", TIME),
                          obj.get("subsample_shift", False))
    if kind == "builtin":
        return resolve_builtin_part(obj.get("name", ""), obj.get("part", "phi"),
                                    obj.get("dim", 1))
    raise UnknownName(f"unknown signal kind {kind!r}")


def resolve_builtin_part(name: str, part: str, dim: int = 1):
    from .filters import builtin

    sys = builtin(name, dim)
    if part == "phi":
        return sys.phi
    if part.startswith("psi"):
        idx = int(part[3:] or 0)
        if idx >= len(sys.psis):
            raise UnknownName(f"{name} has {len(sys.psis)} wavelets, no {part}")
        return sys.psis[idx]
    raise UnknownName(f"unknown builtin part {part!r}")


def torus_to_json(tf: TorusFunction) -> dict:
    return {
        "kind": "torus",
        "dim": tf.dim,
        "n_samples": list(tf.n_samples),
        "values": _complex_pairs(tf.values),
        "tail_estimate": tf.tail_estimate,
        "complete": tf.complete,
        "trunc_R": tf.trunc_used,
        "level": tf.level,
    }


def torus_from_json(obj: dict) -> TorusFunction:
    values = _from_pairs(obj["values"], obj["n_samples"])
    return TorusFunction(values, obj.get("tail_estimate", 0.0),
                         obj.get("complete", True), obj.get("trunc_R", 0),
                         obj.get("level"))


# ---------------------------------------------------------------------------
# binary grid container
# ---------------------------------------------------------------------------

def save_grid_binary(path, sig) -> None:
    """Binary container for grid or torus samples (complex64, C order)."""
    if isinstance(sig, TorusFunction):
        header = {
            "format": BINARY_MAGIC,
            "kind": "torus",
            "dim": sig.dim,
            "n_samples": list(sig.n_samples),
            "tail_estimate": sig.tail_estimate,
            "complete": sig.complete,
            "trunc_R": sig.trunc_used,
            "level": sig.level,
            "dtype": "complex64-le",
            "order": "C",
        }
        values = np.asarray(sig.values, dtype=complex)
    else:
        header = {
            "format": BINARY_MAGIC,
            "kind": "grid",
            "domain": sig.domain,
            "dim": sig.dim,
            "half_width": sig.half_width.tolist(),
            "n_samples": list(sig.n_samples),
            "dtype": "complex64-le",
            "order": "C",
        }
        values = sig.values
    payload = np.ascontiguousarray(values.astype("<c8"))
    with open(path, "wb") as fh:
        fh.write(dumps(header).encode("utf-8"))
        fh.write(payload.tobytes())


def load_grid_binary(path):
    with open(path, "rb") as fh:
        header_line = fh.readline()
        header = json.loads(header_line.decode("utf-8"))
        if header.get("format") != BINARY_MAGIC:
            raise Unsupported(f"not a {BINARY_MAGIC} container: {path}")
        count = int(np.prod(header["n_samples"]))
        raw = fh.read(count * 8)
        values = np.frombuffer(raw, dtype="<c8").reshape(header["n_samples"])
    if header.get("kind") == "torus":
        return TorusFunction(values.astype(complex), header["tail_estimate"],
                             header["complete"], header["trunc_R"],
                             header["level"])
    return GridSignal(header["half_width"], values.astype(complex),
                      header["domain"])


def save_signal(path, sig) -> None:
    """Dispatch on suffix: `.wbg` binary container, otherwise JSON."""
    path = Path(path)
    if path.suffix == ".wbg":
        if not isinstance(sig, (GridSignal, TorusFunction)):
            raise Unsupported("binary containers hold grid/torus samples only")
        save_grid_binary(path, sig)
        return
    if isinstance(sig, TorusFunction):
        path.write_text(dumps(torus_to_json(sig)))
        return
    path.write_text(dumps(signal_to_json(sig)))


def load_signal(path):
    path = Path(path)
    if path.suffix == ".wbg":
        return load_grid_binary(path)
    obj = json.loads(path.read_text())
    if obj.get("kind") == "torus":
        return torus_from_json(obj)
    return signal_from_json(obj)


def filter_seq_to_json(a: FilterSeq) -> dict:
    return a.to_json()


def filter_seq_from_json(obj: dict) -> FilterSeq:
    return FilterSeq.from_json(obj)


def write_csv(path, rows) -> None:
    lines = []
    for row in rows:
        lines.append(",".join(_csv_cell(x) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _csv_cell(x) -> str:
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, complex):
        return f"{x.real!r}{'+' if x.imag >= 0 else '-'}{abs(x.imag)!r}j"
    return str(x)

"""Network checkpoint files: JSON header line + raw little-endian float64 data.

Round trips are bit-exact. The header records the network kind and spec
dimensions so loaders can rebuild the layout and reject mismatches.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np

from .birnn import BiRnnSpec, birnn_layout
from .mlp import MlpSpec, mlp_layout
from .params import NetworkParams

__all__ = ["save_network", "load_network", "CheckpointError"]

_FORMAT = "agvfleet-net-v1"


class CheckpointError(RuntimeError):
    """Malformed or incompatible checkpoint file."""


def _spec_to_header(spec: MlpSpec | BiRnnSpec) -> dict:
    if isinstance(spec, MlpSpec):
        return {"kind": "mlp", **dataclasses.asdict(spec), "widths": list(spec.widths)}
    if isinstance(spec, BiRnnSpec):
        return {"kind": "birnn", **dataclasses.asdict(spec)}
    raise TypeError(f"unsupported spec type {type(spec)!r}")


def _spec_from_header(header: dict) -> MlpSpec | BiRnnSpec:
    kind = header.get("kind")
    fields = {k: v for k, v in header.items() if k != "kind"}
    if kind == "mlp":
        fields["widths"] = tuple(fields["widths"])
        return MlpSpec(**fields)
    if kind == "birnn":
        return BiRnnSpec(**fields)
    raise CheckpointError(f"unknown network kind {kind!r}")


def save_network(
    path: str | Path,
    spec: MlpSpec | BiRnnSpec,
    params: NetworkParams,
    seed: int = 0,
    step: int = 0,
) -> None:
    """Write one network: header line, newline, then the flat vector bytes."""
    header = {
        "format": _FORMAT,
        "spec": _spec_to_header(spec),
        "seed": seed,
        "step": step,
        "param_count": params.size,
        "dtype": "<f8",
    }
    payload = params.flat.astype("<f8", copy=False).tobytes()
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        fh.write(payload)


def load_network(path: str | Path) -> tuple[MlpSpec | BiRnnSpec, NetworkParams, dict]:
    """Read a network file back; returns (spec, params, header)."""
    raw = Path(path).read_bytes()
    newline = raw.find(b"\n")
    if newline < 0:
        raise CheckpointError(f"{path}: missing header line")
    try:
        header = json.loads(raw[:newline].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"{path}: unreadable header: {exc}") from exc
    if header.get("format") != _FORMAT:
        raise CheckpointError(f"{path}: unsupported format {header.get('format')!r}")
    spec = _spec_from_header(header["spec"])
    layout = mlp_layout(spec) if isinstance(spec, MlpSpec) else birnn_layout(spec)
    expected = header["param_count"]
    if layout.size != expected:
        raise CheckpointError(
            f"{path}: spec implies {layout.size} parameters, header says {expected}"
        )
    flat = np.frombuffer(raw[newline + 1 :], dtype="<f8").astype(np.float64)
    if flat.shape[0] != expected:
        raise CheckpointError(
            f"{path}: payload holds {flat.shape[0]} values, expected {expected}"
        )
    return spec, NetworkParams(layout, flat), header

"""JSON machine files.

Complex numbers are stored as ``[re, im]`` pairs; ``json`` writes floats with
the shortest repr that round-trips, so a parsed unitary is bit-identical to
the one written.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .machines import CloningMachine
from .tensor import unitarity_error

FORMAT_VERSION = 1
LOAD_ATOL = 1e-8


def _encode(a) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [a.real.item(), a.imag.item()]
    return [_encode(x) for x in a]


def _decode(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    # assign parts separately: re + 1j*im can flip the sign of a zero
    out = np.empty(arr.shape[:-1], dtype=complex)
    out.real = arr[..., 0]
    out.imag = arr[..., 1]
    return out


def _encode_params(params: dict) -> dict:
    out = {}
    for k, v in params.items():
        if isinstance(v, (list, tuple, np.ndarray)):
            out[k] = _encode(v)
        elif isinstance(v, complex):
            out[k] = [v.real, v.imag]
        else:
            out[k] = v
    return out


def _decode_params(variant: str, params: dict) -> dict:
    out = dict(params)
    if variant.startswith("prob"):
        out["psi0"] = _decode(params["psi0"]).tolist()
        out["psi1"] = _decode(params["psi1"]).tolist()
    return out


def to_dict(machine: CloningMachine) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "variant": machine.variant,
        "params": _encode_params(machine.params),
        "layout": list(machine.layout),
        "n_inputs": machine.n_inputs,
        "basis_conventions": machine.metadata.get("basis_conventions", {}),
        "metadata": {k: v for k, v in machine.metadata.items() if k != "basis_conventions"},
        "unitary": _encode(machine.unitary),
        "domain": [[_encode(i), _encode(o)] for i, o in machine.domain_spec],
    }
    if machine.success_projector is not None:
        doc["success_projector"] = _encode(machine.success_projector)
    return doc


def from_dict(doc: dict) -> CloningMachine:
    """Rebuild a machine, checking the format version and unitarity.

    Raises:
        ValueError: on an unknown version, malformed content, or a unitary
            that deviates from unitarity by more than 1e-8.
    """
    if doc.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported machine file version {doc.get('format_version')!r}")
    try:
        variant = doc["variant"]
        unitary = _decode(doc["unitary"])
        projector = doc.get("success_projector")
        machine = CloningMachine(
            variant=variant,
            params=_decode_params(variant, doc["params"]),
            layout=tuple(doc["layout"]),
            n_inputs=int(doc["n_inputs"]),
            unitary=unitary,
            domain_spec=tuple((_decode(i), _decode(o)) for i, o in doc.get("domain", [])),
            success_projector=None if projector is None else _decode(projector),
            metadata={"basis_conventions": doc.get("basis_conventions", {}), **doc.get("metadata", {})},
        )
    except (KeyError, IndexError, TypeError) as exc:
        raise ValueError(f"malformed machine file: {exc}") from exc
    err = unitarity_error(machine.unitary)
    if err > LOAD_ATOL:
        raise ValueError(f"machine file unitary fails validation: |U^dagger U - I| = {err:.3e}")
    return machine


def dumps(machine: CloningMachine) -> str:
    return json.dumps(to_dict(machine))


def loads(text: str) -> CloningMachine:
    return from_dict(json.loads(text))


def save(machine: CloningMachine, path) -> None:
    Path(path).write_text(dumps(machine))


def load(path) -> CloningMachine:
    return loads(Path(path).read_text())

"""Canonical artifact serialization shared by the CLI and the HTTP service.

Byte-identical JSON for identical inputs is a contract: sorted keys, fixed
separators, plain-python scalars only (numpy types are converted), no
timestamps inside artifacts. Manifests hash the full invocation config.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, float) and (obj != obj):  # NaN
        return None
    if obj is None or isinstance(obj, (str, int, float, bool)):
        return obj
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2,
                      separators=(",", ": "), ensure_ascii=False) + "\n"


def sha256_of(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


def write_artifact(path, obj) -> str:
    text = canonical_json(obj)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def explanation_artifact(kind: str, inputs: dict, values, metadata: dict) -> dict:
    """The uniform envelope every explainer result ships in."""
    return {
        "kind": kind,
        "inputs": to_jsonable(inputs),
        "values": to_jsonable(values),
        "metadata": to_jsonable(metadata),
    }


def versions() -> dict:
    import platform

    from . import __version__

    return {
        "package": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
    }


def manifest(command: str, config: dict, seed: int | None) -> dict:
    cfg = to_jsonable(config)
    return {
        "command": command,
        "config_hash": sha256_of(cfg),
        "config": cfg,
        "seed": seed,
        "versions": versions(),
    }

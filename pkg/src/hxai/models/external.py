"""Adapter scoring an external black-box model over a batch wire protocol.

Request: {"rows": [[...], ...], "schema": [feature names]} as JSON.
Response: {"scores": [...]} with one number per row.
Transports: HTTP POST to a URL, or a subprocess consuming one request per
line on stdin and answering one JSON line on stdout.
"""

from __future__ import annotations

import json
import shlex
import subprocess

import numpy as np

from ..errors import CodomainViolation, EndpointUnreachable, MalformedResponse
from ..tabular import MISSING, Dataset
from .base import TASKS, Predictor


def _wire_rows(dataset: Dataset) -> tuple[list[list], list[str]]:
    names = dataset.feature_names
    rows = []
    for i in range(dataset.n_rows):
        row = []
        for n in names:
            v = dataset.value(i, n)
            row.append(None if v is MISSING else v)
        rows.append(row)
    return rows, names


class ExternalModel(Predictor):
    provenance = "external"

    def __init__(self, descriptor: str, task: str, name: str = "external",
                 timeout: float = 30.0):
        if task not in TASKS:
            raise MalformedResponse(f"unknown task {task!r}")
        self.descriptor = descriptor
        self.task = task
        self.name = name
        self.timeout = timeout
        self._proc = None

    # --- transports ---------------------------------------------------------

    def _call_http(self, payload: dict) -> dict:
        import requests

        try:
            resp = requests.post(self.descriptor, json=payload, timeout=self.timeout)
        except requests.RequestException as exc:
            raise EndpointUnreachable(f"cannot reach {self.descriptor}: {exc}") from exc
        if resp.status_code != 200:
            raise MalformedResponse(f"endpoint returned HTTP {resp.status_code}")
        try:
            return resp.json()
        except ValueError as exc:
            raise MalformedResponse("endpoint response is not JSON") from exc

    def _call_subprocess(self, payload: dict) -> dict:
        if self._proc is None or self._proc.poll() is not None:
            argv = shlex.split(self.descriptor)
            try:
                self._proc = subprocess.Popen(
                    argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True
                )
            except OSError as exc:
                raise EndpointUnreachable(f"cannot spawn {argv!r}: {exc}") from exc
        try:
            self._proc.stdin.write(json.dumps(payload) + "\n")
            self._proc.stdin.flush()
            line = self._proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise EndpointUnreachable(f"subprocess model died: {exc}") from exc
        if not line:
            raise EndpointUnreachable("subprocess model closed its output")
        try:
            return json.loads(line)
        except ValueError as exc:
            raise MalformedResponse("subprocess response is not JSON") from exc

    def _call(self, payload: dict) -> dict:
        if self.descriptor.startswith(("http://", "https://")):
            return self._call_http(payload)
        return self._call_subprocess(payload)

    # --- contract -------------------------------------------------------------

    def predict(self, dataset: Dataset) -> np.ndarray:
        rows, names = _wire_rows(dataset)
        obj = self._call({"rows": rows, "schema": names})
        if not isinstance(obj, dict) or "scores" not in obj:
            raise MalformedResponse("response lacks a 'scores' field")
        scores = obj["scores"]
        if not isinstance(scores, list) or len(scores) != len(rows):
            raise MalformedResponse(
                f"expected {len(rows)} scores, got {len(scores) if isinstance(scores, list) else 'non-list'}"
            )
        try:
            arr = np.asarray([float(s) for s in scores], dtype=float)
        except (TypeError, ValueError) as exc:
            raise MalformedResponse("scores are not numbers") from exc
        if not np.isfinite(arr).all():
            raise MalformedResponse("scores contain non-finite values")
        if self.task == "binary_classification" and ((arr < 0) | (arr > 1)).any():
            bad = float(arr[(arr < 0) | (arr > 1)][0])
            raise CodomainViolation(f"classification score {bad} outside [0, 1]")
        return arr

    def close(self):
        if self._proc is not None and self._proc.poll() is None:
            self._proc.stdin.close()
            self._proc.terminate()
            self._proc.wait(timeout=5)
        self._proc = None

    def to_json(self) -> dict:
        return {"kind": "external", "name": self.name, "task": self.task,
                "descriptor": self.descriptor}

    @classmethod
    def from_json(cls, obj: dict) -> "ExternalModel":
        return cls(obj["descriptor"], obj["task"], name=obj.get("name", "external"))


def wrap_external(command_or_url: str, task: str, name: str = "external") -> ExternalModel:
    return ExternalModel(command_or_url, task, name=name)

"""Per-weight eigenform store: in-process memo backed by optional JSON files."""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path

import mpmath
import numpy as np

from .hecke import Eigenform, cusp_dim, eigenforms

SCHEMA_VERSION = 1


def _encode(forms: list[Eigenform], k: int, N: int, precision: int) -> dict:
    digits = int(precision * 0.30103) + 5
    return {
        "schema_version": SCHEMA_VERSION,
        "weight": k,
        "dim": len(forms),
        "precision": precision,
        "N": N,
        "forms": [
            {
                "index": f.index,
                "basis_coords": [mpmath.nstr(c, digits) for c in f.basis_coords],
                "lambda": [repr(float(v)) for v in f.dense[1:]],
                "prime_lambda": {
                    "primes": [int(p) for p in f.primes],
                    "values": [repr(float(v)) for v in f.prime_vals],
                },
                "error_bound": repr(f.error_bound),
            }
            for f in forms
        ],
    }


def _decode(doc: dict) -> list[Eigenform]:
    out = []
    k, N, prec = doc["weight"], doc["N"], doc["precision"]
    with mpmath.workprec(prec + 32):
        for item in doc["forms"]:
            dense = np.array([np.nan] + [float(v) for v in item["lambda"]])
            pl = item["prime_lambda"]
            out.append(
                Eigenform(
                    weight=k,
                    index=item["index"],
                    basis_coords=tuple(mpmath.mpf(c) for c in item["basis_coords"]),
                    precision=prec,
                    N=N,
                    dense=dense,
                    primes=np.array(pl["primes"], dtype=np.int64),
                    prime_vals=np.array([float(v) for v in pl["values"]]),
                    error_bound=float(item["error_bound"]),
                )
            )
    return out


class EigenStore:
    """Return eigenforms covering at least the requested ``N`` and precision.

    A cached entry is reused when its coverage and precision are at least
    the request; otherwise it is recomputed and replaced.
    """

    def __init__(self, directory: str | os.PathLike | None = None):
        self.directory = Path(directory) if directory else None
        self._mem: dict[int, tuple[int, int, list[Eigenform]]] = {}
        self._lock = threading.Lock()

    def path(self, k: int) -> Path | None:
        return self.directory / f"weight_{k:04d}.json" if self.directory else None

    def _load(self, k: int):
        p = self.path(k)
        if p is None or not p.exists():
            return None
        try:
            doc = json.loads(p.read_text())
        except (OSError, json.JSONDecodeError):
            return None
        if doc.get("schema_version") != SCHEMA_VERSION or doc.get("weight") != k:
            return None
        return doc["N"], doc["precision"], _decode(doc)

    def _save(self, k: int, N: int, precision: int, forms: list[Eigenform]) -> None:
        p = self.path(k)
        if p is None:
            return
        p.parent.mkdir(parents=True, exist_ok=True)
        tmp = p.with_suffix(".tmp")
        tmp.write_text(json.dumps(_encode(forms, k, N, precision)))
        os.replace(tmp, p)

    def get(self, k: int, N: int, precision: int = 128) -> list[Eigenform]:
        if cusp_dim(k) == 0:
            return []
        with self._lock:
            hit = self._mem.get(k)
            if hit is None:
                hit = self._load(k)
                if hit is not None:
                    self._mem[k] = hit
            if hit is not None and hit[0] >= N and hit[1] >= precision:
                return hit[2]
            forms = eigenforms(k, N, precision)
            N_eff = forms[0].N if forms else N
            self._mem[k] = (N_eff, precision, forms)
            self._save(k, N_eff, precision, forms)
            return forms


_DEFAULT: EigenStore | None = None


def default_store() -> EigenStore:
    """Process-wide store; honours the ``CACHE_DIR`` environment variable."""
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = EigenStore(os.environ.get("CACHE_DIR") or None)
    return _DEFAULT


def set_default_store(store: EigenStore) -> None:
    global _DEFAULT
    _DEFAULT = store

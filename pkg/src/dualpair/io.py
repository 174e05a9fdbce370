"""Versioned JSON point documents.

A document names a coupling, a model tag and the coordinates of one point::

    {"schemaVersion": 1, "coupling": {"n": 2, "x": 1.0}, "model": "P",
     "coordinates": {"q": [...], "p": [...]}}

Complex numbers are ``[re, im]`` pairs.  :func:`dumps` is canonical (sorted
keys, 17 significant digits), so ``dumps(loads(s)) == s`` for any ``s``
produced by :func:`dumps`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DocumentError
from .slices import LevelPoint
from .spaces import (
    CenterMassPointI,
    CenterMassPointII,
    Coupling,
    CoveringPoint1,
    CoveringPoint2,
    DualCompletedPoint,
    DualInteriorPoint,
    SutherlandPoint,
    canonicalize_sutherland,
)

SCHEMA_VERSION = 1
MODELS = ("P", "Phat", "PhatC", "CM-I", "CM-II", "P1-I", "P1-II", "P2-I", "P2-II", "Level")


# ---------------------------------------------------------------------------
# Canonical emitter
# ---------------------------------------------------------------------------


def _emit(obj) -> str:
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_emit(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_emit(v) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            raise DocumentError("non-finite number in document")
        # -0.0 would come back from JSON as the integer 0
        return format(v + 0.0, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    raise DocumentError(f"cannot serialise {type(obj).__name__}")


def canonical_json(obj) -> str:
    return _emit(obj) + "\n"


# ---------------------------------------------------------------------------
# Coordinate codecs
# ---------------------------------------------------------------------------


def _reals(a) -> list[float]:
    return [float(v) for v in np.ravel(a)]


def _cplx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _cplx_vec(a) -> list[list[float]]:
    return [_cplx(v) for v in np.ravel(a)]


def _cplx_mat(a) -> list[list[list[float]]]:
    return [_cplx_vec(row) for row in np.asarray(a)]


def _field(coords: dict, key: str):
    if key not in coords:
        raise DocumentError(f"missing coordinate {key!r}")
    return coords[key]


def _read_reals(coords, key, size=None) -> np.ndarray:
    a = np.asarray(_field(coords, key), dtype=float).ravel()
    if size is not None and a.size != size:
        raise DocumentError(f"{key!r} must have {size} entries, got {a.size}")
    return a


def _read_scalar(coords, key) -> float:
    v = _field(coords, key)
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise DocumentError(f"{key!r} must be a number")
    return float(v)


def _to_complex(a, key):
    a = np.asarray(a, dtype=float)
    if a.shape[-1:] != (2,):
        raise DocumentError(f"{key!r} must hold [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def _read_cplx(coords, key) -> complex:
    return complex(_to_complex(_field(coords, key), key))


def _read_cplx_vec(coords, key, size=None) -> np.ndarray:
    a = np.atleast_1d(_to_complex(_field(coords, key), key)).ravel()
    if size is not None and a.size != size:
        raise DocumentError(f"{key!r} must have {size} entries, got {a.size}")
    return a


def _rel_I(coords, n):
    return CenterMassPointI(_read_reals(coords, "delta", n - 1), _read_reals(coords, "gamma", n - 1))


def _rel_II(coords, n):
    return CenterMassPointII(_read_cplx_vec(coords, "zeta", n - 1))


def encode_point(model: str, pt) -> dict:
    if model == "P":
        return {"q": _reals(pt.q), "p": _reals(pt.p)}
    if model == "Phat":
        return {"qhat": _reals(pt.qhat), "phat": _reals(pt.phat)}
    if model == "PhatC":
        return {"z": _cplx_vec(pt.z), "Z": _cplx(pt.Z)}
    if model == "CM-I":
        return {"delta": _reals(pt.delta), "gamma": _reals(pt.gamma)}
    if model == "CM-II":
        return {"zeta": _cplx_vec(pt.zeta)}
    if model in ("P1-I", "P1-II"):
        head = {"zeta0": _cplx(pt.zeta0), "v0": float(pt.v0)}
    elif model in ("P2-I", "P2-II"):
        head = {"u0": float(pt.u0), "w0": float(pt.w0)}
    elif model == "Level":
        return {"g": _cplx_mat(pt.g), "J": _cplx_mat(pt.J), "v": _cplx_vec(pt.v)}
    else:
        raise DocumentError(f"unknown model {model!r}")
    head.update(encode_point("CM-I" if model.endswith("-I") else "CM-II", pt.rel))
    return head


def decode_point(model: str, coords: dict, c: Coupling):
    """Build and validate the typed point; raises the model's own validation errors."""
    if not isinstance(coords, dict):
        raise DocumentError("coordinates must be an object")
    n = c.n
    if model == "P":
        return canonicalize_sutherland(_read_reals(coords, "q", n), _read_reals(coords, "p", n))
    if model == "Phat":
        return DualInteriorPoint.make(_read_reals(coords, "qhat", n), _read_reals(coords, "phat", n), c)
    if model == "PhatC":
        return DualCompletedPoint(_read_cplx_vec(coords, "z", n - 1), _read_cplx(coords, "Z"))
    if model == "CM-I":
        return _rel_I(coords, n)
    if model == "CM-II":
        return _rel_II(coords, n)
    rel_of = _rel_I if model.endswith("-I") else _rel_II
    if model in ("P1-I", "P1-II"):
        return CoveringPoint1(_read_cplx(coords, "zeta0"), _read_scalar(coords, "v0"), rel_of(coords, n))
    if model in ("P2-I", "P2-II"):
        return CoveringPoint2(_read_scalar(coords, "u0"), _read_scalar(coords, "w0"), rel_of(coords, n))
    if model == "Level":
        g = np.atleast_2d(_to_complex(_field(coords, "g"), "g"))
        J = np.atleast_2d(_to_complex(_field(coords, "J"), "J"))
        v = _read_cplx_vec(coords, "v", n)
        if g.shape != (n, n) or J.shape != (n, n):
            raise DocumentError(f"g and J must be {n}x{n}")
        return LevelPoint(g, J, v)
    raise DocumentError(f"unknown model {model!r}")


# ---------------------------------------------------------------------------
# Documents
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PointDocument:
    coupling: Coupling
    model: str
    point: Any

    def __post_init__(self):
        if self.model not in MODELS:
            raise DocumentError(f"unknown model {self.model!r}; expected one of {', '.join(MODELS)}")

    def to_dict(self) -> dict:
        return {
            "schemaVersion": SCHEMA_VERSION,
            "coupling": {"n": int(self.coupling.n), "x": float(self.coupling.x)},
            "model": self.model,
            "coordinates": encode_point(self.model, self.point),
        }

    def dumps(self) -> str:
        return canonical_json(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "PointDocument":
        if not isinstance(d, dict):
            raise DocumentError("document must be a JSON object")
        version = d.get("schemaVersion")
        if version != SCHEMA_VERSION:
            raise DocumentError(f"unsupported schemaVersion {version!r}")
        cpl = d.get("coupling")
        if not isinstance(cpl, dict) or "n" not in cpl or "x" not in cpl:
            raise DocumentError("coupling must be an object with n and x")
        n = cpl["n"]
        if not isinstance(n, int) or isinstance(n, bool):
            raise DocumentError("coupling.n must be an integer")
        c = Coupling(n, float(cpl["x"]))
        model = d.get("model")
        if model not in MODELS:
            raise DocumentError(f"unknown model {model!r}")
        return cls(c, model, decode_point(model, d.get("coordinates"), c))

    @classmethod
    def loads(cls, text: str) -> "PointDocument":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DocumentError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(d)


def load(path) -> PointDocument:
    with open(path) as fh:
        return PointDocument.loads(fh.read())


def save(doc: PointDocument, path) -> None:
    with open(path, "w") as fh:
        fh.write(doc.dumps())

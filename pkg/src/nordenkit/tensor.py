"""Dense frame tensors.

A :class:`Tensor` is a plain numpy array plus a variance string with one
character per slot: ``"u"`` for a contravariant (upper) slot and ``"d"`` for a
covariant (lower) slot.  Index conventions used across the package:

* ``J[a, b]``        -- ``J e_b = J[a, b] e_a``                        ("ud")
* ``C[k, i, j]``     -- ``[e_i, e_j] = C[k, i, j] e_k``                ("udd")
* ``gamma[k, i, j]`` -- ``nabla_{e_i} e_j = gamma[k, i, j] e_k``       ("udd")
* ``R13[l, i, j, k]``-- ``R(e_i, e_j) e_k = R13[l, i, j, k] e_l``     ("uddd")
* ``R04[i, j, k, u]``-- ``g(R(e_i, e_j) e_k, e_u)``                    ("dddd")

Indices are zero-based internally; reports print them one-based.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

__all__ = [
    "NordenError",
    "DimensionMismatch",
    "InvalidRank",
    "InvalidSlot",
    "UnsupportedVariance",
    "PreconditionViolation",
    "DimensionTooSmall",
    "Tensor",
    "Tolerance",
    "Comparison",
    "DEFAULT_TOL",
    "default_tolerance",
    "contract",
    "lower",
    "raise_index",
    "approx_equal",
    "compare_arrays",
]


class NordenError(Exception):
    """Base class for all errors raised by nordenkit."""


class DimensionMismatch(NordenError):
    pass


class InvalidRank(NordenError):
    pass


class InvalidSlot(NordenError):
    pass


class UnsupportedVariance(NordenError):
    pass


class PreconditionViolation(NordenError):
    pass


class DimensionTooSmall(NordenError):
    pass


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Tensor:
    """Immutable dense tensor over a ``dim``-dimensional frame."""

    data: np.ndarray
    variance: str

    def __post_init__(self):
        data = _readonly(self.data)
        object.__setattr__(self, "data", data)
        if set(self.variance) - {"u", "d"}:
            raise ValueError(f"variance must use 'u'/'d' only, got {self.variance!r}")
        if data.ndim != len(self.variance):
            raise InvalidRank(
                f"array has rank {data.ndim} but variance {self.variance!r} has {len(self.variance)} slots"
            )
        if data.ndim and len(set(data.shape)) != 1:
            raise DimensionMismatch(f"all slots must share one dimension, got shape {data.shape}")
        if data.ndim and (data.shape[0] < 2 or data.shape[0] % 2):
            raise DimensionMismatch(f"frame dimension must be even and >= 2, got {data.shape[0]}")

    @property
    def dim(self) -> int:
        return self.data.shape[0] if self.data.ndim else 0

    @property
    def rank(self) -> int:
        return self.data.ndim

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __repr__(self) -> str:
        return f"Tensor(variance={self.variance!r}, dim={self.dim})"

    @classmethod
    def zeros(cls, dim: int, variance: str) -> "Tensor":
        return cls(np.zeros((dim,) * len(variance)), variance)


@dataclass(frozen=True)
class Tolerance:
    """Entrywise comparison rule ``|a-b| <= absolute + relative*max(|a|,|b|)``."""

    absolute: float = 1e-9
    relative: float = 1e-9

    def __post_init__(self):
        if self.absolute < 0 or self.relative < 0:
            raise ValueError("tolerances must be nonnegative")

    def bound(self, a, b) -> np.ndarray:
        return self.absolute + self.relative * np.maximum(np.abs(a), np.abs(b))

    def scaled_bound(self, scale: float) -> float:
        """Scalar acceptance bound for a residual measured against ``scale``."""
        return self.absolute + self.relative * abs(scale)


DEFAULT_TOL = Tolerance()


def default_tolerance() -> Tolerance:
    """Default tolerance, overridable with NORDEN_TOL_ABS / NORDEN_TOL_REL."""
    return Tolerance(
        float(os.environ.get("NORDEN_TOL_ABS", DEFAULT_TOL.absolute)),
        float(os.environ.get("NORDEN_TOL_REL", DEFAULT_TOL.relative)),
    )


@dataclass(frozen=True)
class Comparison:
    equal: bool
    residual: float
    worst_index: tuple[int, ...] | None = field(default=None)

    def __bool__(self) -> bool:
        return self.equal

    def describe(self) -> str:
        where = "" if self.worst_index is None else " at (" + ",".join(str(i + 1) for i in self.worst_index) + ")"
        return f"{'equal' if self.equal else 'differ'}: max residual {self.residual:.3e}{where}"


def compare_arrays(a, b, tol: Tolerance = DEFAULT_TOL) -> Comparison:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape {a.shape} vs {b.shape}")
    if a.size == 0:
        return Comparison(True, 0.0)
    diff = np.abs(a - b)
    ok = diff <= tol.bound(a, b)
    worst = np.unravel_index(int(np.argmax(diff)), diff.shape) if diff.ndim else ()
    return Comparison(bool(ok.all()), float(diff.max()), tuple(int(i) for i in worst))


def approx_equal(a: Tensor, b: Tensor, tol: Tolerance = DEFAULT_TOL) -> Comparison:
    if a.variance != b.variance or a.dim != b.dim:
        raise DimensionMismatch(
            f"cannot compare {a.variance!r}/dim {a.dim} with {b.variance!r}/dim {b.dim}"
        )
    return compare_arrays(a.data, b.data, tol)


def _check_slot(t: Tensor, slot: int) -> None:
    if not 0 <= slot < t.rank:
        raise InvalidSlot(f"slot {slot} out of range for rank {t.rank}")


def contract(t: Tensor, slot_a: int, slot_b: int, metric_inverse: Tensor | None = None) -> Tensor:
    """Trace over two slots.

    With ``metric_inverse`` both slots must be covariant and the trace is
    ``g^{ij} T_{..i..j..}``; without it the slots must have opposite variance.
    """
    if t.rank < 2:
        raise InvalidRank(f"cannot contract a rank-{t.rank} tensor")
    _check_slot(t, slot_a)
    _check_slot(t, slot_b)
    if slot_a == slot_b:
        raise InvalidSlot("contraction slots must differ")
    kinds = t.variance[slot_a] + t.variance[slot_b]
    rest = "".join(v for s, v in enumerate(t.variance) if s not in (slot_a, slot_b))
    if metric_inverse is None:
        if kinds not in ("ud", "du"):
            raise UnsupportedVariance("contraction without a metric needs one upper and one lower slot")
        data = np.trace(t.data, axis1=slot_a, axis2=slot_b)
    else:
        if metric_inverse.variance != "uu":
            raise UnsupportedVariance("metric_inverse must be a (2,0) tensor")
        if metric_inverse.dim != t.dim:
            raise DimensionMismatch(f"metric dim {metric_inverse.dim} vs tensor dim {t.dim}")
        if kinds != "dd":
            raise UnsupportedVariance("metric contraction needs two covariant slots")
        moved = np.moveaxis(t.data, (slot_a, slot_b), (-2, -1))
        data = np.tensordot(moved, metric_inverse.data, axes=([-2, -1], [0, 1]))
    return Tensor(data, rest)


def _apply_on_slot(t: Tensor, slot: int, matrix: np.ndarray, kind: str) -> Tensor:
    data = np.moveaxis(np.tensordot(matrix, t.data, axes=([1], [slot])), 0, slot)
    variance = t.variance[:slot] + kind + t.variance[slot + 1 :]
    return Tensor(data, variance)


def lower(t: Tensor, slot: int, metric: Tensor) -> Tensor:
    """Lower a contravariant slot with a (0,2) metric."""
    _check_slot(t, slot)
    if t.variance[slot] != "u":
        raise UnsupportedVariance(f"slot {slot} is already covariant")
    if metric.dim != t.dim:
        raise DimensionMismatch(f"metric dim {metric.dim} vs tensor dim {t.dim}")
    return _apply_on_slot(t, slot, metric.data.T, "d")


def raise_index(t: Tensor, slot: int, metric_inverse: Tensor) -> Tensor:
    """Raise a covariant slot with a (2,0) inverse metric."""
    _check_slot(t, slot)
    if t.variance[slot] != "d":
        raise UnsupportedVariance(f"slot {slot} is already contravariant")
    if metric_inverse.dim != t.dim:
        raise DimensionMismatch(f"metric dim {metric_inverse.dim} vs tensor dim {t.dim}")
    return _apply_on_slot(t, slot, metric_inverse.data, "u")


def nonzero_components(a, threshold: float = 1e-9) -> Iterable[tuple[tuple[int, ...], float]]:
    """Yield (one-based index, value) for entries above ``threshold``."""
    a = np.asarray(a, dtype=float)
    for idx in zip(*np.nonzero(np.abs(a) > threshold)):
        yield tuple(int(i) + 1 for i in idx), float(a[idx])

"""Left-invariant almost complex manifolds with Norden metric.

Everything lives on a Lie group with a left-invariant frame ``e_1..e_2n``:
the metric, the almost complex structure and every tensor field built from
them have constant frame components.  Derivatives of component functions
therefore vanish and every differential operator reduces to contractions
with the structure constants and connection coefficients.  In particular the
exterior derivative of a left-invariant 1-form is ``dw(x, y) = -w([x, y])``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from pathlib import Path

import numpy as np

from .report import VerificationReport
from .tensor import DEFAULT_TOL, DimensionMismatch, NordenError, Tensor, Tolerance

MAX_DIM = 16
SPEC_FIELDS = {"n", "g", "J", "C", "conformal"}


class SpecError(NordenError):
    """Malformed manifold input file."""

    def __init__(self, message: str, field: str = ""):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class ValidationError(NordenError):
    """A manifold failed one of its defining invariants."""

    def __init__(self, report: VerificationReport):
        names = ", ".join(r.name for r in report.failures())
        super().__init__(f"manifold validation failed: {names}")
        self.report = report


@dataclass(frozen=True, eq=False)
class FrameManifold:
    """Frame data ``(g, J, C)`` of a left-invariant Norden structure."""

    g: np.ndarray
    J: np.ndarray
    C: np.ndarray
    name: str = field(default="")

    def __post_init__(self):
        for attr in ("g", "J", "C"):
            a = np.array(getattr(self, attr), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, attr, a)
        d = self.g.shape[0] if self.g.ndim == 2 else -1
        if d < 2 or d % 2:
            raise DimensionMismatch(f"g must be a 2n x 2n matrix, got shape {self.g.shape}")
        if d > MAX_DIM:
            raise DimensionMismatch(f"frame dimension {d} exceeds the supported maximum {MAX_DIM}")
        if self.g.shape != (d, d) or self.J.shape != (d, d) or self.C.shape != (d, d, d):
            raise DimensionMismatch(
                f"inconsistent shapes g{self.g.shape}, J{self.J.shape}, C{self.C.shape}"
            )

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    @property
    def n(self) -> int:
        return self.dim // 2

    @cached_property
    def g_inv(self) -> np.ndarray:
        return np.linalg.inv(self.g)

    @cached_property
    def g_tilde(self) -> np.ndarray:
        """Associated metric ``g~(x, y) = g(x, Jy)``."""
        return self.g @ self.J

    def bracket(self, x, y) -> np.ndarray:
        return np.einsum("kij,i,j->k", self.C, x, y)

    def scaled(self, c: float) -> "FrameManifold":
        """Same frame and brackets with metric ``c*g``."""
        return FrameManifold(c * self.g, self.J, self.C, name=self.name)

    def tensors(self) -> dict[str, Tensor]:
        return {
            "g": Tensor(self.g, "dd"),
            "g_inv": Tensor(self.g_inv, "uu"),
            "J": Tensor(self.J, "ud"),
            "C": Tensor(self.C, "udd"),
        }


@dataclass(frozen=True)
class AssociatedMetric:
    g_tilde: np.ndarray


def associated_metric(m: FrameManifold) -> AssociatedMetric:
    return AssociatedMetric(m.g_tilde)


def bracket(m: FrameManifold, x, y) -> np.ndarray:
    return m.bracket(x, y)


def exterior_derivative(m: FrameManifold, form) -> np.ndarray:
    """``dw(e_i, e_j) = -w([e_i, e_j])`` for a left-invariant 1-form."""
    return -np.einsum("k,kij->ij", np.asarray(form, dtype=float), m.C)


def jacobi_residual(C: np.ndarray) -> float:
    d = C.shape[0]
    worst = 0.0
    for i, j, k in combinations(range(d), 3):
        cyc = (
            np.einsum("m,lm->l", C[:, i, j], C[:, :, k])
            + np.einsum("m,lm->l", C[:, j, k], C[:, :, i])
            + np.einsum("m,lm->l", C[:, k, i], C[:, :, j])
        )
        worst = max(worst, float(np.abs(cyc).max()))
    return worst


def signature(g: np.ndarray, zero: float = 1e-9) -> tuple[int, int, int]:
    """(positive, negative, zero) eigenvalue counts of a symmetric matrix."""
    ev = np.linalg.eigvalsh((g + g.T) / 2)
    return int((ev > zero).sum()), int((ev < -zero).sum()), int((np.abs(ev) <= zero).sum())


def validate(m: FrameManifold, tol: Tolerance = DEFAULT_TOL) -> VerificationReport:
    """One record per defining invariant of the Norden frame data."""
    rep = VerificationReport(title=f"manifold validation {m.name}".strip())
    eye = np.eye(m.dim)
    scale_J = max(1.0, float(np.abs(m.J).max()))
    scale_g = max(1.0, float(np.abs(m.g).max()))
    scale_C = max(1.0, float(np.abs(m.C).max()))

    rep.add("J^2 = -I", np.abs(m.J @ m.J + eye).max(), tol.scaled_bound(scale_J**2),
            anchor="J^{2}x=-x")
    norden = m.J.T @ m.g @ m.J + m.g
    rep.add("Norden condition g(Jx,Jy) = -g(x,y)", np.abs(norden).max(),
            tol.scaled_bound(scale_g * scale_J**2), anchor="g(Jx,Jy)=-g(x,y)")
    rep.add("g symmetry", np.abs(m.g - m.g.T).max(), tol.scaled_bound(scale_g))
    det = abs(float(np.linalg.det(m.g)))
    rep.add("g nondegeneracy", 0.0 if det > 1e-12 else 1.0, 0.0, passed=det > 1e-12,
            note=f"|det g| = {det:.3e}")
    pos, neg, _ = signature(m.g)
    rep.add("g neutral signature (n,n)", abs(pos - m.n) + abs(neg - m.n), 0.0,
            passed=(pos, neg) == (m.n, m.n), note=f"signature ({pos},{neg})",
            anchor="necessarily neutral, i.e. of signature $(n,n)$")
    rep.add("C antisymmetry", np.abs(m.C + m.C.transpose(0, 2, 1)).max(), tol.scaled_bound(scale_C))
    rep.add("Jacobi identity", jacobi_residual(m.C), tol.scaled_bound(scale_C**2))
    return rep


def require_valid(m: FrameManifold, tol: Tolerance = DEFAULT_TOL) -> FrameManifold:
    rep = validate(m, tol)
    if not rep.passed:
        raise ValidationError(rep)
    return m


# --- input files -------------------------------------------------


def _matrix(value, d: int, name: str) -> np.ndarray:
    try:
        a = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SpecError(f"not a numeric matrix ({exc})", name) from None
    if a.shape != (d, d):
        raise SpecError(f"expected a {d}x{d} array, got shape {a.shape}", name)
    if not np.isfinite(a).all():
        raise SpecError("entries must be finite", name)
    return a


def from_dict(doc: dict) -> tuple[FrameManifold, dict | None]:
    """Parse a manifold input document; returns the manifold and the raw conformal block."""
    if not isinstance(doc, dict):
        raise SpecError("top level must be an object")
    unknown = sorted(set(doc) - SPEC_FIELDS)
    if unknown:
        raise SpecError(f"unknown field(s) {unknown}", unknown[0])
    for key in ("n", "g", "J", "C"):
        if key not in doc:
            raise SpecError("missing required field", key)
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SpecError("must be a positive integer", "n")
    d = 2 * n
    if d > MAX_DIM:
        raise SpecError(f"2n = {d} exceeds the supported maximum {MAX_DIM}", "n")
    g = _matrix(doc["g"], d, "g")
    J = _matrix(doc["J"], d, "J")
    if not isinstance(doc["C"], list):
        raise SpecError("must be a list of {i, j, k, value} entries", "C")
    C = np.zeros((d, d, d))
    for pos, entry in enumerate(doc["C"]):
        where = f"C[{pos}]"
        if not isinstance(entry, dict) or set(entry) != {"i", "j", "k", "value"}:
            raise SpecError("entry must have exactly the keys i, j, k, value", where)
        i, j, k, v = entry["i"], entry["j"], entry["k"], entry["value"]
        for key, idx in (("i", i), ("j", j), ("k", k)):
            if not isinstance(idx, int) or isinstance(idx, bool) or not 1 <= idx <= d:
                raise SpecError(f"index must be an integer in 1..{d}", f"{where}.{key}")
        if i >= j:
            raise SpecError("only entries with i < j may be stored", f"{where}.i")
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not np.isfinite(v):
            raise SpecError("value must be a finite number", f"{where}.value")
        C[k - 1, i - 1, j - 1] += v
        C[k - 1, j - 1, i - 1] -= v
    conformal = doc.get("conformal")
    if conformal is not None:
        if not isinstance(conformal, dict) or set(conformal) - {"sigma", "factor"} or "sigma" not in conformal:
            raise SpecError("must be an object with 'sigma' and optional 'factor'", "conformal")
        sigma = conformal["sigma"]
        if not isinstance(sigma, list) or len(sigma) != d:
            raise SpecError(f"must be a list of {d} numbers", "conformal.sigma")
        factor = conformal.get("factor", 1.0)
        if not isinstance(factor, (int, float)) or factor <= 0:
            raise SpecError("must be a positive number", "conformal.factor")
    return FrameManifold(g, J, C), conformal


def to_dict(m: FrameManifold, threshold: float = 0.0) -> dict:
    entries = []
    for i, j in combinations(range(m.dim), 2):
        for k in range(m.dim):
            v = float(m.C[k, i, j])
            if abs(v) > threshold:
                entries.append({"i": i + 1, "j": j + 1, "k": k + 1, "value": v})
    return {"n": m.n, "g": m.g.tolist(), "J": m.J.tolist(), "C": entries}


def load_spec(path: str | Path) -> tuple[FrameManifold, dict | None]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return from_dict(doc)


def dump_spec(m: FrameManifold, path: str | Path, conformal: dict | None = None) -> None:
    doc = to_dict(m)
    if conformal is not None:
        doc["conformal"] = conformal
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")

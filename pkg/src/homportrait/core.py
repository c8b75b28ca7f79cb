"""Vector-field representation, portrait labels, outcomes and shared helpers.

Coefficient ordering
--------------------
A degree-``n`` field ``(P, Q)`` stores ``P`` as ``(A[n,0], A[n-1,1], ..., A[0,n])``
and ``Q`` as ``(B[n,0], ..., B[0,n])``, i.e. monomials ``x**i * y**j`` sorted by
descending power of ``x``. The flat coefficient vector is ``p + q``. For ``n = 2``
this is ``(a, b, c, d, e, f)`` with ``P = a x^2 + b xy + c y^2`` and
``Q = d x^2 + e xy + f y^2``; for ``n = 3`` it is ``(a, ..., h)`` in the same way.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

#: relative width of the degeneracy band
BAND = 1e-10


class HomPortraitError(Exception):
    """Base class for all errors raised by this package."""


class Reason(enum.IntFlag):
    """Genericity conditions that a field (or an intermediate quantity) can violate."""

    NONE = 0
    # linear
    DET_ZERO = enum.auto()
    DISC_ZERO = enum.auto()
    TRACE_ZERO = enum.auto()
    # quadratic index
    AF_CD_ZERO = enum.auto()
    LAMBDA_MU_ZERO = enum.auto()
    LAMBDA_MU_ONE = enum.auto()
    LAMBDA_PLUS_MU_ZERO = enum.auto()
    JACOBIAN_ZERO = enum.auto()
    # cubic index
    AH_DE_ZERO = enum.auto()
    PS_ONE = enum.auto()
    RSPQ_ZERO = enum.auto()
    H_ZERO = enum.auto()
    ALPHA_BETA_GAMMA_ZERO = enum.auto()
    C2_D3_ZERO = enum.auto()
    SIGNATURE_SIGNS = enum.auto()
    # invariant lines
    DIRECTION_POLY_ZERO = enum.auto()
    X_AXIS_INVARIANT = enum.auto()
    REPEATED_DIRECTION = enum.auto()
    INFINITY_SIGN = enum.auto()


REASON_TEXT = {
    Reason.DET_ZERO: "det=0",
    Reason.DISC_ZERO: "trace^2-4det=0",
    Reason.TRACE_ZERO: "trace=0 (center)",
    Reason.AF_CD_ZERO: "af-cd=0",
    Reason.LAMBDA_MU_ZERO: "λμ=0",
    Reason.LAMBDA_MU_ONE: "λμ=1",
    Reason.LAMBDA_PLUS_MU_ZERO: "λ+μ=0",
    Reason.JACOBIAN_ZERO: "j=0",
    Reason.AH_DE_ZERO: "ah-de=0",
    Reason.PS_ONE: "ps=1",
    Reason.RSPQ_ZERO: "rspq=0",
    Reason.H_ZERO: "h1h2h3h4j=0",
    Reason.ALPHA_BETA_GAMMA_ZERO: "αβγ=0",
    Reason.C2_D3_ZERO: "C2·D3=0",
    Reason.SIGNATURE_SIGNS: "signature roots not separable",
    Reason.DIRECTION_POLY_ZERO: "t_n≡0",
    Reason.X_AXIS_INVARIANT: "x=0 invariant",
    Reason.REPEATED_DIRECTION: "repeated invariant direction",
    Reason.INFINITY_SIGN: "s_j=0 at infinity",
}

INDEX_REASONS = (
    Reason.DET_ZERO
    | Reason.AF_CD_ZERO
    | Reason.LAMBDA_MU_ZERO
    | Reason.LAMBDA_MU_ONE
    | Reason.LAMBDA_PLUS_MU_ZERO
    | Reason.JACOBIAN_ZERO
    | Reason.AH_DE_ZERO
    | Reason.PS_ONE
    | Reason.RSPQ_ZERO
    | Reason.H_ZERO
    | Reason.ALPHA_BETA_GAMMA_ZERO
    | Reason.C2_D3_ZERO
    | Reason.SIGNATURE_SIGNS
)


def describe(reasons: Union[Reason, int]) -> list[str]:
    """Human-readable names of the flags set in ``reasons``."""
    reasons = Reason(int(reasons))
    return [text for flag, text in REASON_TEXT.items() if flag in reasons]


class DegenerateField(HomPortraitError):
    """A sign quantity that decides the answer falls inside the degeneracy band."""

    def __init__(self, reasons: Union[Reason, int], message: str = ""):
        self.reasons = Reason(int(reasons))
        super().__init__(message or ", ".join(describe(self.reasons)))


class NotWellPosed(DegenerateField):
    """The closed-form index criteria do not apply to this field."""


class BandHit(DegenerateField):
    """A quantity gating the attractor/repeller decision is in the band."""


class NoConvergence(HomPortraitError):
    pass


class PortraitLabel(str, enum.Enum):
    L1 = "L1"
    L2 = "L2"
    L3 = "L3"
    Q1 = "Q1"
    Q2 = "Q2"
    Q3 = "Q3"
    Q4 = "Q4"
    Q5 = "Q5"
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    C4 = "C4"
    C5 = "C5"
    C6 = "C6"
    C7 = "C7"
    C8 = "C8"
    C9 = "C9"

    @property
    def degree(self) -> int:
        return {"L": 1, "Q": 2, "C": 3}[self.value[0]]

    @classmethod
    def for_degree(cls, n: int) -> list["PortraitLabel"]:
        return [label for label in cls if label.degree == n]


@dataclass(frozen=True)
class VectorField:
    """Planar homogeneous polynomial field of degree ``n`` (see module docstring)."""

    degree: int
    p: tuple[float, ...]
    q: tuple[float, ...]

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError(f"degree must be >= 1, got {self.degree}")
        n1 = self.degree + 1
        if len(self.p) != n1 or len(self.q) != n1:
            raise ValueError(
                f"degree {self.degree} needs {n1} coefficients per component, "
                f"got {len(self.p)} and {len(self.q)}"
            )
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        object.__setattr__(self, "q", tuple(float(v) for v in self.q))

    @classmethod
    def from_coeffs(cls, degree: int, coeffs: Sequence[float]) -> "VectorField":
        coeffs = [float(c) for c in coeffs]
        if len(coeffs) != 2 * degree + 2:
            raise ValueError(
                f"degree {degree} needs {2 * degree + 2} coefficients, got {len(coeffs)}"
            )
        return cls(degree, tuple(coeffs[: degree + 1]), tuple(coeffs[degree + 1 :]))

    @classmethod
    def parse(cls, text: str, degree: int) -> "VectorField":
        """Parse the comma-separated coefficient format, e.g. ``"a,b,c,d,e,f"``."""
        try:
            coeffs = [float(tok) for tok in text.replace(" ", "").split(",") if tok]
        except ValueError as exc:
            raise ValueError(f"cannot parse coefficients {text!r}: {exc}") from None
        if not all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")
        return cls.from_coeffs(degree, coeffs)

    @property
    def coeffs(self) -> tuple[float, ...]:
        return self.p + self.q

    def to_array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=float)

    @property
    def scale(self) -> float:
        """Largest coefficient magnitude; the reference scale for band tests."""
        return max(abs(c) for c in self.coeffs)

    def format(self) -> str:
        return ",".join(repr(c) for c in self.coeffs)

    def negated(self) -> "VectorField":
        return VectorField(self.degree, tuple(-c for c in self.p), tuple(-c for c in self.q))

    def q_negated(self) -> "VectorField":
        return VectorField(self.degree, self.p, tuple(-c for c in self.q))

    def swapped(self) -> "VectorField":
        return VectorField(self.degree, self.q, self.p)


def _component(coeffs, n, x, y):
    return sum(c * x ** (n - k) * y**k for k, c in enumerate(coeffs))


def eval_field(f: VectorField, x, y):
    """Return ``(P(x, y), Q(x, y))``; ``x`` and ``y`` may be numpy arrays."""
    n = f.degree
    return _component(f.p, n, x, y), _component(f.q, n, x, y)


def scale_field(f: VectorField, lam: float) -> VectorField:
    """Multiply every coefficient by ``lam > 0`` (a positive time rescaling)."""
    if not lam > 0:
        raise ValueError(f"scale factor must be positive, got {lam}")
    return VectorField(f.degree, tuple(lam * c for c in f.p), tuple(lam * c for c in f.q))


def in_band(value, scale=1.0, degree=0):
    """True where ``|value| < BAND * max(1, scale**degree)``; works on arrays."""
    with np.errstate(over="ignore"):
        ref = np.maximum(1.0, np.asarray(scale, dtype=float) ** degree)
    return np.abs(value) < BAND * ref


def row_scale(coeffs: np.ndarray) -> np.ndarray:
    """Per-row coefficient scale for a ``(N, 2n+2)`` coefficient array."""
    return np.max(np.abs(coeffs), axis=-1)


@dataclass(frozen=True)
class Classified:
    label: PortraitLabel
    index: int
    lines: int
    tiebreak_used: bool = False
    index_source: str = "symbolic"
    warnings: tuple[str, ...] = ()

    def __str__(self) -> str:
        return f"{self.label.value} (i={self.index}, l={self.lines})"


@dataclass(frozen=True)
class Degenerate:
    reasons: Reason
    details: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.reasons:
            raise ValueError("a Degenerate outcome needs at least one reason")

    def __str__(self) -> str:
        return "degenerate: " + ", ".join(describe(self.reasons) + list(self.details))


ClassificationOutcome = Union[Classified, Degenerate]

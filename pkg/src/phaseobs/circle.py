"""Finite unions of half-open intervals on [0, 2pi) and their exact integrals.

Sets are kept in a canonical form (sorted, disjoint, merged, zero-length
dropped) so set equality is tuple equality.  Fourier and polynomial moment
integrals over these sets are closed forms, not quadratures.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CircleSet",
    "circle_set",
    "full_circle",
    "shift",
    "fourier_coeff",
    "moment_coeff",
    "parse_set",
]

TWO_PI = 2.0 * math.pi


def _normalize(pairs) -> tuple[tuple[float, float], ...]:
    """Wrap into [0, 2pi), split at the seam, merge overlaps/adjacencies."""
    raw = []
    for a, b in pairs:
        a = float(a)
        b = float(b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError("interval endpoints must be finite")
        length = b - a
        if length <= 0.0:
            continue
        if length >= TWO_PI:
            return ((0.0, TWO_PI),)
        a = a % TWO_PI
        b = a + length
        if b > TWO_PI:
            raw.append((a, TWO_PI))
            raw.append((0.0, b - TWO_PI))
        else:
            raw.append((a, b))
    raw.sort()
    merged: list[list[float]] = []
    for a, b in raw:
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    if len(merged) == 1 and merged[0][0] == 0.0 and merged[0][1] >= TWO_PI:
        return ((0.0, TWO_PI),)
    return tuple((a, b) for a, b in merged)


@dataclass(frozen=True)
class CircleSet:
    """Disjoint sorted half-open intervals [a, b) within [0, 2pi)."""

    intervals: tuple[tuple[float, float], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "intervals", _normalize(self.intervals))

    @property
    def measure(self) -> float:
        return float(sum(b - a for a, b in self.intervals))

    def contains(self, x: float) -> bool:
        x = x % TWO_PI
        return any(a <= x < b for a, b in self.intervals)

    def union(self, other: "CircleSet") -> "CircleSet":
        return CircleSet(self.intervals + other.intervals)

    def approx_equal(self, other: "CircleSet", tol: float = 1e-12) -> bool:
        if len(self.intervals) != len(other.intervals):
            return False
        return all(
            abs(a1 - a2) <= tol and abs(b1 - b2) <= tol
            for (a1, b1), (a2, b2) in zip(self.intervals, other.intervals)
        )

    def to_dict(self) -> dict:
        return {"intervals": [[a, b] for a, b in self.intervals]}

    @staticmethod
    def from_dict(data: dict) -> "CircleSet":
        return CircleSet(tuple((float(a), float(b)) for a, b in data["intervals"]))


def circle_set(*pairs) -> CircleSet:
    """Build a CircleSet from (a, b) pairs; endpoints wrap modulo 2pi."""
    if len(pairs) == 1 and pairs[0] and not np.isscalar(pairs[0][0]):
        pairs = tuple(pairs[0])
    return CircleSet(tuple(pairs))


def full_circle() -> CircleSet:
    return CircleSet(((0.0, TWO_PI),))


def shift(x: CircleSet, theta: float) -> CircleSet:
    """The set {t : (t - theta) mod 2pi in x}, renormalized."""
    return CircleSet(tuple((a + theta, b + theta) for a, b in x.intervals))


def fourier_coeff(x: CircleSet, k: int) -> complex:
    """(1/2pi) integral over x of e^{i k theta}, in closed form."""
    k = int(k)
    if k == 0:
        return complex(x.measure / TWO_PI)
    total = 0.0 + 0.0j
    for a, b in x.intervals:
        total += np.exp(1j * k * b) - np.exp(1j * k * a)
    return complex(total / (TWO_PI * 1j * k))


def moment_coeff(p: int, k: int) -> complex:
    """(1/2pi) integral over the full circle of theta^p e^{i k theta}.

    Defined for p in {1, 2} only; partial-set moments are out of scope.
    """
    k = int(k)
    if p == 1:
        if k == 0:
            return complex(math.pi)
        return 1.0 / (1j * k)
    if p == 2:
        if k == 0:
            return complex(4.0 * math.pi**2 / 3.0)
        return TWO_PI / (1j * k) + 2.0 / (k * k)
    raise ValueError("moment_coeff is defined for p in {1, 2}")


# ---------------------------------------------------------------------------
# CLI interval syntax: semicolon-separated "[a,b)" with radians, "pi" allowed
# ---------------------------------------------------------------------------

_ALLOWED_NODES = (
    ast.Expression,
    ast.BinOp,
    ast.UnaryOp,
    ast.Add,
    ast.Sub,
    ast.Mult,
    ast.Div,
    ast.USub,
    ast.UAdd,
    ast.Constant,
    ast.Name,
)


def _eval_angle(text: str) -> float:
    """Safely evaluate an angle expression like '3*pi/2' or '0.25'."""
    text = text.strip()
    if not text:
        raise ValueError("empty angle expression")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"bad angle expression {text!r}") from exc
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise ValueError(f"bad angle expression {text!r}")
        if isinstance(node, ast.Name) and node.id != "pi":
            raise ValueError(f"unknown name {node.id!r} in angle expression")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise ValueError(f"bad literal in angle expression {text!r}")
    return float(eval(compile(tree, "<angle>", "eval"), {"__builtins__": {}}, {"pi": math.pi}))


def parse_set(text: str) -> CircleSet:
    """Parse the CLI syntax '[a,b);[c,d)' into a CircleSet."""
    pairs = []
    for piece in text.split(";"):
        piece = piece.strip()
        if not piece:
            continue
        if not (piece.startswith("[") and piece.endswith(")")):
            raise ValueError(f"interval {piece!r} must have the form [a,b)")
        body = piece[1:-1]
        parts = body.split(",")
        if len(parts) != 2:
            raise ValueError(f"interval {piece!r} must have exactly two endpoints")
        pairs.append((_eval_angle(parts[0]), _eval_angle(parts[1])))
    if not pairs:
        raise ValueError("no intervals given")
    return CircleSet(tuple(pairs))

"""Index bookkeeping for the tripartite space H_A (x) H_B (x) H_C.

Composite indices follow one fixed convention everywhere::

    (a, b, c) -> a * dB * dC + b * dC + c

so factor A varies slowest.  A factor of dimension 1 needs no special
handling; bipartite formulas come from setting ``dB = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from .errors import DimensionError

FACTORS = ("A", "B", "C")

Labels = Union[str, Iterable[str]]


def parse_labels(labels: Labels) -> tuple[str, ...]:
    """Normalize ``"AB"``, ``{"B", "A"}`` or ``["A", "B"]`` to ``("A", "B")``."""
    if isinstance(labels, str):
        items = list(labels)
    else:
        items = list(labels)
    seen = set(items)
    if not seen or not seen <= set(FACTORS) or len(seen) != len(items):
        raise DimensionError(f"invalid factor labels {labels!r}; use a nonempty subset of A, B, C")
    return tuple(f for f in FACTORS if f in seen)


@dataclass(frozen=True)
class SpaceDims:
    """Dimensions of the three tensor factors."""

    dA: int
    dB: int
    dC: int

    def __post_init__(self):
        for name in ("dA", "dB", "dC"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise DimensionError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))

    @classmethod
    def parse(cls, text: str) -> "SpaceDims":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise DimensionError(f"dims must look like 'a,b,c', got {text!r}")
        try:
            return cls(*(int(p) for p in parts))
        except ValueError as exc:
            raise DimensionError(f"dims must be integers, got {text!r}") from exc

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.dA, self.dB, self.dC)

    def factor(self, label: str) -> int:
        return self.as_tuple()[FACTORS.index(label)]

    def size(self, labels: Labels = "ABC") -> int:
        return int(np.prod([self.factor(f) for f in parse_labels(labels)]))

    @property
    def total(self) -> int:
        return self.dA * self.dB * self.dC

    @property
    def ab(self) -> "SpaceDims":
        """Dimensions of the AB subsystem, with C trivial."""
        return SpaceDims(self.dA, self.dB, 1)

    @property
    def bc(self) -> "SpaceDims":
        """Dimensions of the BC subsystem, with A trivial."""
        return SpaceDims(1, self.dB, self.dC)

    @property
    def merged_ab(self) -> "SpaceDims":
        """Treat AB as a single factor A and make B trivial."""
        return SpaceDims(self.dA * self.dB, 1, self.dC)

    def __str__(self):
        return f"{self.dA},{self.dB},{self.dC}"


def herm_defect(M) -> float:
    """Max-norm of the anti-Hermitian part ``(M - M^dagger) / 2``."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.max(np.abs(M - M.conj().T)) / 2.0)


@dataclass(frozen=True)
class HermitianMatrix:
    """A square complex matrix with its Hermiticity defect recorded.

    Non-Hermitian input is accepted; callers decide what the defect means.
    Instances convert transparently with ``np.asarray``.
    """

    entries: np.ndarray
    herm_defect: float = field(init=False)

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "herm_defect", herm_defect(a))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def is_state(self, tol: float = 1e-12) -> bool:
        """Hermitian, unit trace and PSD, each within ``tol``."""
        if self.herm_defect > tol:
            return False
        if abs(np.trace(self.entries) - 1.0) > tol:
            return False
        herm = (self.entries + self.entries.conj().T) / 2
        return bool(np.linalg.eigvalsh(herm)[0] >= -tol)


def _square(M, n: int, what: str) -> np.ndarray:
    M = np.asarray(M)
    if M.shape != (n, n):
        raise DimensionError(f"{what}: expected shape {(n, n)}, got {M.shape}")
    return M


def embed(M, dims: SpaceDims, subset: Labels) -> np.ndarray:
    """Tensor ``M`` (acting on ``subset``) with the identity on the other factors."""
    sub = parse_labels(subset)
    M = _square(M, dims.size(sub), f"embed on {''.join(sub)}")
    rest = tuple(f for f in FACTORS if f not in sub)
    if not rest:
        return np.array(M)
    # kron(M, I_rest) is ordered (sub..., rest...); permute back to A, B, C
    full = np.kron(M, np.eye(dims.size(rest), dtype=M.dtype))
    order = sub + rest
    shape = [dims.factor(f) for f in order]
    perm = [order.index(f) for f in FACTORS]
    T = full.reshape(shape + shape).transpose(perm + [p + 3 for p in perm])
    n = dims.total
    return T.reshape(n, n)


def partial_trace(M, dims: SpaceDims, traced: Labels) -> np.ndarray:
    """Trace out the factors in ``traced``; the result acts on the remaining ones.

    Tracing all three factors returns the 1x1 matrix ``[[Tr M]]``.
    """
    out_labels = parse_labels(traced)
    M = _square(M, dims.total, "partial_trace")
    shape = list(dims.as_tuple())
    T = M.reshape(shape + shape)
    rows = [0, 1, 2]
    cols = [i if f in out_labels else i + 3 for i, f in enumerate(FACTORS)]
    kept = [i for i, f in enumerate(FACTORS) if f not in out_labels]
    result = np.einsum(T, rows + cols, kept + [i + 3 for i in kept])
    n = int(np.prod([shape[i] for i in kept])) if kept else 1
    return result.reshape(n, n)


def marginal(M, dims: SpaceDims, keep: Labels) -> np.ndarray:
    """Reduced matrix on the factors in ``keep``."""
    kept = parse_labels(keep)
    traced = tuple(f for f in FACTORS if f not in kept)
    if not traced:
        return np.array(_square(M, dims.total, "marginal"))
    return partial_trace(M, dims, traced)

"""Catalog of operator convex functions on (0, inf) and their transforms.

Ids understood by :func:`parse_g`::

    neg_log  x_log_x  square_diff  inv_sqrt  bures  wyd:<t>
    tilde:<id>  sym:<id>  k:<k-id>
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ParameterError, UnknownIdError

ScalarMap = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class GFunction:
    """A named scalar function, evaluated elementwise on positive arrays."""

    id: str
    eval: ScalarMap = field(repr=False, compare=False)
    param: Optional[float] = None
    description: str = ""
    # set when this function is the tilde transform of another one
    tilde_of: Optional["GFunction"] = field(default=None, repr=False, compare=False)

    def __call__(self, x):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return self.eval(np.asarray(x, dtype=float))

    @property
    def value_at_one(self) -> float:
        return float(self(1.0))


@dataclass(frozen=True)
class KFunction:
    """A positive function with ``x k(x) = k(1/x)``; generates ``(1-x)^2 k(x)``."""

    id: str
    eval: ScalarMap = field(repr=False, compare=False)

    def __call__(self, x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.eval(np.asarray(x, dtype=float))


def _neg_log(x):
    return -np.log(x)


def _x_log_x(x):
    return x * np.log(x)


NEG_LOG = GFunction("neg_log", _neg_log, description="-log x: relative entropy")
X_LOG_X = GFunction("x_log_x", _x_log_x, description="x log x: tilde of -log x")
SQUARE_DIFF = GFunction(
    "square_diff", lambda x: (x - 1.0) ** 2, description="(x-1)^2: operator Cauchy-Schwarz"
)
INV_SQRT = GFunction(
    "inv_sqrt", lambda x: x ** -0.5 - x ** 0.5, description="x^(-1/2) - x^(1/2): from k(x) = x^(-1/2)"
)
BURES = GFunction(
    "bures", lambda x: 2.0 * (1.0 - x) ** 2 / (1.0 + x), description="2(1-x)^2/(1+x): k(x) = 2/(1+x)"
)

_TILDE_PAIRS = {"neg_log": X_LOG_X, "x_log_x": NEG_LOG}

WYD_RANGE = (-1.0, 2.0)
CATALOG_WYD_PARAMS = (-1.0, -0.5, 0.5, 1.5, 2.0)


def wyd(t: float) -> GFunction:
    """Wigner-Yanase-Dyson function ``(1 - x^t) / (t (1 - t))`` for t in [-1, 2] minus {0, 1}."""
    t = float(t)
    if not np.isfinite(t) or not WYD_RANGE[0] <= t <= WYD_RANGE[1]:
        raise ParameterError(f"t must lie in [-1, 2], got {t}")
    if t in (0.0, 1.0):
        raise ParameterError("t must avoid {0,1}")
    scale = 1.0 / (t * (1.0 - t))

    def f(x):
        # expm1 keeps the t -> 0, 1 limits accurate
        return -np.expm1(t * np.log(x)) * scale

    return GFunction(f"wyd:{t:g}", f, param=t, description="Wigner-Yanase-Dyson family")


def tilde(g: GFunction) -> GFunction:
    """``x g(1/x)``; an involution."""
    if g.tilde_of is not None:
        return g.tilde_of
    if g.id in _TILDE_PAIRS:
        return _TILDE_PAIRS[g.id]
    if g.id.startswith(("sym:", "k:")) or g.id == "bures":
        return g

    def f(x):
        return x * g.eval(1.0 / x)

    out = GFunction(f"tilde:{g.id}", f, param=g.param, description=f"x g(1/x) for {g.id}")
    object.__setattr__(out, "tilde_of", g)
    return out


def symmetrize(g: GFunction) -> GFunction:
    """``g + tilde(g)``, a fixed point of :func:`tilde`."""
    gt = tilde(g)
    return GFunction(
        f"sym:{g.id}", lambda x: g.eval(x) + gt.eval(x), param=g.param, description=f"g + tilde(g) for {g.id}"
    )


K_BURES = KFunction("bures", lambda x: 2.0 / (1.0 + x))
K_MAX = KFunction("max", lambda x: (1.0 + x) / (2.0 * x))
K_INV_SQRT = KFunction("inv_sqrt", lambda x: x ** -0.5)
def _k_log(x):
    h = x - 1.0
    safe = np.where(h == 0.0, 1.0, h)
    return np.where(h == 0.0, 1.0, np.log1p(h) / safe)


K_LOG = KFunction("log", _k_log)

K_CATALOG = {k.id: k for k in (K_BURES, K_MAX, K_INV_SQRT, K_LOG)}

# bounds of the partial order on admissible k
K_LOWER = K_BURES
K_UPPER = K_MAX


def log_grid(lo: float = 1e-3, hi: float = 1e3, n: int = 201) -> np.ndarray:
    return np.logspace(np.log10(lo), np.log10(hi), n)


def k_symmetry_defect(k: KFunction, grid: Optional[np.ndarray] = None) -> float:
    x = log_grid() if grid is None else grid
    lhs, rhs = x * k(x), k(1.0 / x)
    return float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(rhs))))


def g_from_k(k: KFunction, tol: float = 1e-12) -> GFunction:
    """``g(x) = (1 - x)^2 k(x)``; rejects k that break ``x k(x) = k(1/x)``."""
    defect = k_symmetry_defect(k)
    if defect > tol:
        raise ParameterError(f"k '{k.id}' violates x k(x) = k(1/x) (defect {defect:.2e})")
    return GFunction(f"k:{k.id}", lambda x: (1.0 - x) ** 2 * k.eval(x), description=f"(1-x)^2 k(x), k = {k.id}")


_BASE = {g.id: g for g in (NEG_LOG, X_LOG_X, SQUARE_DIFF, INV_SQRT, BURES)}

BASE_IDS = tuple(_BASE) + ("wyd:<t>",)


def parse_g(gid: str) -> GFunction:
    """Resolve a function id; raises UnknownIdError or ParameterError."""
    gid = gid.strip()
    if gid in _BASE:
        return _BASE[gid]
    if gid.startswith("wyd:"):
        try:
            t = float(gid[4:])
        except ValueError:
            raise ParameterError(f"bad WYD parameter in {gid!r}") from None
        return wyd(t)
    if gid.startswith("tilde:"):
        return tilde(parse_g(gid[6:]))
    if gid.startswith("sym:"):
        return symmetrize(parse_g(gid[4:]))
    if gid.startswith("k:"):
        try:
            return g_from_k(K_CATALOG[gid[2:]])
        except KeyError:
            raise UnknownIdError(f"unknown k-function {gid[2:]!r}; valid: {', '.join(K_CATALOG)}") from None
    raise UnknownIdError(
        f"unknown g id {gid!r}; valid: {', '.join(BASE_IDS)}, tilde:<id>, sym:<id>, k:<k-id>"
    )


def catalog() -> list[GFunction]:
    """Every cataloged function, with WYD at representative parameters."""
    wyds = [wyd(t) for t in CATALOG_WYD_PARAMS]
    return [
        NEG_LOG,
        X_LOG_X,
        *wyds,
        tilde(wyd(0.5)),
        tilde(wyd(1.5)),
        SQUARE_DIFF,
        INV_SQRT,
        tilde(INV_SQRT),
        BURES,
        symmetrize(NEG_LOG),
    ]

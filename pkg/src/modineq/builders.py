"""Operators on H_C whose positive semidefiniteness follows from monotonicity
of quasi-entropies under the partial trace.

The general constructions are :func:`build_general` and
:func:`build_general_rev`.  The named builders write out the same operators
directly with matrix logs and powers, in the exact operator order of their
textbook form, so they double as independent checks on the general route.
Marginals are always recomputed from the full-space input.

Builders flagged "probe" deliberately construct operators that are *not*
PSD (or not even Hermitian) in general.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import gfuncs
from .errors import DimensionError, ParameterError
from .gfuncs import GFunction
from .spectral import invm, logm, modular_action, positive_eigensystem, powm
from .tensor import SpaceDims, embed, herm_defect, marginal, partial_trace


@dataclass(frozen=True)
class BuiltOperator:
    """Result of a builder: a ``dC x dC`` matrix plus provenance."""

    matrix: np.ndarray
    builder_id: str
    inputs_digest: str

    @property
    def herm_defect(self) -> float:
        return herm_defect(self.matrix)

    @property
    def min_eig(self) -> float:
        """Smallest eigenvalue of the Hermitian part."""
        M = self.matrix
        return float(np.linalg.eigvalsh((M + M.conj().T) / 2)[0])

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    @property
    def H(self) -> np.ndarray:
        return self.matrix.conj().T


def digest(*arrays) -> str:
    h = hashlib.sha256()
    for a in arrays:
        a = np.ascontiguousarray(np.asarray(a, dtype=complex))
        h.update(str(a.shape).encode())
        h.update(a.tobytes())
    return h.hexdigest()[:16]


def _full(M, dims: SpaceDims, what: str) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.shape != (dims.total, dims.total):
        raise DimensionError(f"{what}: expected {dims.total}x{dims.total} for dims {dims}, got {M.shape}")
    return M


def _on_ab(M, dims: SpaceDims, what: str) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    n = dims.dA * dims.dB
    if M.shape != (n, n):
        raise DimensionError(f"{what}: expected {n}x{n} on AB for dims {dims}, got {M.shape}")
    return M


def _bipartite(dims: SpaceDims, what: str) -> None:
    if dims.dB != 1:
        raise DimensionError(f"{what} needs dB = 1, got dims {dims}")


def _normalized(M, normalize: bool) -> np.ndarray:
    return M / np.trace(M).real if normalize else M


def _tr_ab(M, dims: SpaceDims) -> np.ndarray:
    return partial_trace(M, dims, "AB")


def _tr_b_of_bc(M, dims: SpaceDims) -> np.ndarray:
    return partial_trace(M, dims.bc, "B")


# -- general constructions -------------------------------------------------


def build_general(g: GFunction, P_AB, Q_ABC, dims: SpaceDims) -> BuiltOperator:
    """``Tr_AB g(L_{P_AB} R_{Q_ABC}^{-1})(Q_ABC) - Tr_B g(L_{P_B} R_{Q_BC}^{-1})(Q_BC)``."""
    P_AB = _on_ab(P_AB, dims, "P_AB")
    Q = _full(Q_ABC, dims, "Q_ABC")
    P_full = embed(P_AB, dims, "AB")
    first = _tr_ab(modular_action(g, P_full, Q).apply_to_q(), dims)

    P_B = partial_trace(P_AB, dims.ab, "A")
    Q_BC = partial_trace(Q, dims, "A")
    P_B_on_bc = embed(P_B, dims.bc, "B")
    second = _tr_b_of_bc(modular_action(g, P_B_on_bc, Q_BC).apply_to_q(), dims)
    return BuiltOperator(first - second, f"general:{g.id}", digest(P_AB, Q))


def build_general_rev(g: GFunction, P_ABC, Q_AB, dims: SpaceDims) -> BuiltOperator:
    """Mirror of :func:`build_general` with the full-space matrix on the left.

    ``Tr_AB g(L_{P_ABC} R_{Q_AB}^{-1})(Q_AB) - Tr_B g(L_{P_BC} R_{Q_B}^{-1})(Q_B)``.

    Written with ``h = tilde(g)`` this is
    ``Tr_AB P_ABC h(L_{P_ABC}^{-1} R_{Q_AB})(I) - Tr_B P_BC h(L_{P_BC}^{-1} R_{Q_B})(I)``,
    and ``build_general(g, P, Q)`` is the adjoint of
    ``build_general_rev(tilde(g), Q, P)``.
    """
    P = _full(P_ABC, dims, "P_ABC")
    Q_AB = _on_ab(Q_AB, dims, "Q_AB")
    Q_full = embed(Q_AB, dims, "AB")
    first = _tr_ab(modular_action(g, P, Q_full).apply_to_q(), dims)

    P_BC = partial_trace(P, dims, "A")
    Q_B = partial_trace(Q_AB, dims.ab, "A")
    Q_B_on_bc = embed(Q_B, dims.bc, "B")
    second = _tr_b_of_bc(modular_action(g, P_BC, Q_B_on_bc).apply_to_q(), dims)
    return BuiltOperator(first - second, f"general_rev:{g.id}", digest(P, Q_AB))


# -- entropy-type builders --------------------------------------------------


def _marginals(rho, dims: SpaceDims):
    rho_AB = marginal(rho, dims, "AB")
    rho_BC = marginal(rho, dims, "BC")
    rho_B = marginal(rho, dims, "B")
    return rho_AB, rho_BC, rho_B


def ssa_operator(rho_ABC, dims: SpaceDims) -> BuiltOperator:
    """``Tr_AB [log rho_ABC - log rho_AB - log rho_BC + log rho_B] rho_ABC``."""
    rho = _full(rho_ABC, dims, "rho_ABC")
    rho_AB, rho_BC, rho_B = _marginals(rho, dims)
    L = (
        logm(rho)
        - embed(logm(rho_AB), dims, "AB")
        - embed(logm(rho_BC), dims, "BC")
        + embed(logm(rho_B), dims, "B")
    )
    return BuiltOperator(_tr_ab(L @ rho, dims), "ssa", digest(rho))


def ssa_operator_kim(rho_ABC, dims: SpaceDims) -> BuiltOperator:
    """``Tr_AB rho_ABC [log rho_ABC - log rho_AB + log rho_B - log rho_BC]``."""
    rho = _full(rho_ABC, dims, "rho_ABC")
    rho_AB, rho_BC, rho_B = _marginals(rho, dims)
    L = (
        logm(rho)
        - embed(logm(rho_AB), dims, "AB")
        + embed(logm(rho_B), dims, "B")
        - embed(logm(rho_BC), dims, "BC")
    )
    return BuiltOperator(_tr_ab(rho @ L, dims), "ssa_kim", digest(rho))


def ssa_rev_operator(rho_ABC, dims: SpaceDims) -> BuiltOperator:
    """``Tr_AB rho_AB [log rho_AB - log rho_ABC - log rho_B + log rho_BC]``.

    PSD, but its full trace is not the SSA gap.
    """
    rho = _full(rho_ABC, dims, "rho_ABC")
    rho_AB, rho_BC, rho_B = _marginals(rho, dims)
    L = (
        embed(logm(rho_AB), dims, "AB")
        - logm(rho)
        - embed(logm(rho_B), dims, "B")
        + embed(logm(rho_BC), dims, "BC")
    )
    return BuiltOperator(_tr_ab(embed(rho_AB, dims, "AB") @ L, dims), "ssa_rev", digest(rho))


def subadditivity_operator(rho_AC, dims: SpaceDims) -> BuiltOperator:
    """``Tr_A rho_AC [log rho_AC - log rho_A - log rho_C]`` (dB = 1)."""
    _bipartite(dims, "subadditivity_operator")
    rho = _full(rho_AC, dims, "rho_AC")
    L = logm(rho) - embed(logm(marginal(rho, dims, "A")), dims, "A") - embed(logm(marginal(rho, dims, "C")), dims, "C")
    return BuiltOperator(partial_trace(rho @ L, dims, "A"), "subadd", digest(rho))


def mpt_operator(rho_ABC, gamma_AB, dims: SpaceDims, normalize: bool = True) -> BuiltOperator:
    """``Tr_AB rho_ABC [log rho_ABC - log gamma_AB - log rho_BC + log gamma_B]``."""
    rho = _full(rho_ABC, dims, "rho_ABC")
    gamma = _normalized(_on_ab(gamma_AB, dims, "gamma_AB"), normalize)
    gamma_B = partial_trace(gamma, dims.ab, "A")
    L = (
        logm(rho)
        - embed(logm(gamma), dims, "AB")
        - embed(logm(marginal(rho, dims, "BC")), dims, "BC")
        + embed(logm(gamma_B), dims, "B")
    )
    return BuiltOperator(_tr_ab(rho @ L, dims), "mpt", digest(rho, gamma))


def cond_info_bound(rho_AC, dims: SpaceDims) -> BuiltOperator:
    """``(log dA) rho_C - [-Tr_A rho_AC log rho_AC + rho_C log rho_C]`` (dB = 1)."""
    _bipartite(dims, "cond_info_bound")
    rho = _full(rho_AC, dims, "rho_AC")
    rho_C = marginal(rho, dims, "C")
    cond = -partial_trace(rho @ logm(rho), dims, "A") + rho_C @ logm(rho_C)
    return BuiltOperator(np.log(dims.dA) * rho_C - cond, "cond_info_bound", digest(rho))


def non_hermitian_probe(rho_AC, gamma_AC, dims: SpaceDims, normalize: bool = True) -> BuiltOperator:
    """``Tr_A rho_AC [log rho_AC - log gamma_AC - log rho_C + log gamma_C]`` (dB = 1).

    Returned raw: for non-commuting inputs this is generally not Hermitian.
    """
    _bipartite(dims, "non_hermitian_probe")
    rho = _full(rho_AC, dims, "rho_AC")
    gamma = _normalized(_full(gamma_AC, dims, "gamma_AC"), normalize)
    L = (
        logm(rho)
        - logm(gamma)
        - embed(logm(marginal(rho, dims, "C")), dims, "C")
        + embed(logm(marginal(gamma, dims, "C")), dims, "C")
    )
    return BuiltOperator(partial_trace(rho @ L, dims, "A"), "nonherm_probe", digest(rho, gamma))


def _check_wyd_t(t: float) -> float:
    return gfuncs.wyd(t).param  # raises ParameterError on a bad t


def wyd_operator(t: float, rho_ABC, gamma_AB, dims: SpaceDims, normalize: bool = True) -> BuiltOperator:
    """``[Tr_B rho_BC^{1-t} gamma_B^t - Tr_AB rho_ABC^{1-t} gamma_AB^t] / (t (1 - t))``.

    This is ``build_general(wyd(t), gamma_AB, rho_ABC)`` and tends to the
    SSA-type operator as ``t -> 1``.
    """
    t = _check_wyd_t(t)
    rho = _full(rho_ABC, dims, "rho_ABC")
    gamma = _normalized(_on_ab(gamma_AB, dims, "gamma_AB"), normalize)
    gamma_B = partial_trace(gamma, dims.ab, "A")
    rho_BC = marginal(rho, dims, "BC")
    full_term = _tr_ab(powm(rho, 1 - t) @ embed(powm(gamma, t), dims, "AB"), dims)
    bc_term = _tr_b_of_bc(powm(rho_BC, 1 - t) @ embed(powm(gamma_B, t), dims.bc, "B"), dims)
    return BuiltOperator((bc_term - full_term) / (t * (1 - t)), f"wyd:{t:g}", digest(rho, gamma))


def cs_operator(P_AB, Q_ABC, dims: SpaceDims) -> BuiltOperator:
    """``Tr_AB P_AB Q_ABC^{-1} P_AB - Tr_B P_B Q_BC^{-1} P_B``."""
    P_AB = _on_ab(P_AB, dims, "P_AB")
    Q = _full(Q_ABC, dims, "Q_ABC")
    P = embed(P_AB, dims, "AB")
    P_B = embed(partial_trace(P_AB, dims.ab, "A"), dims.bc, "B")
    Q_BC = partial_trace(Q, dims, "A")
    first = _tr_ab(P @ invm(Q) @ P, dims)
    second = _tr_b_of_bc(P_B @ invm(Q_BC) @ P_B, dims)
    return BuiltOperator(first - second, "cs", digest(P_AB, Q))


def lieb_ruskai_cs(X_AC, Q_AC, dims: SpaceDims) -> BuiltOperator:
    """``Tr_A X^dag Q^{-1} X - X_C^dag Q_C^{-1} X_C`` with ``X_C = Tr_A X`` (dB = 1)."""
    _bipartite(dims, "lieb_ruskai_cs")
    X = _full(X_AC, dims, "X_AC")
    Q = _full(Q_AC, dims, "Q_AC")
    X_C = partial_trace(X, dims, "A")
    Q_C = partial_trace(Q, dims, "A")
    lhs = partial_trace(X.conj().T @ invm(Q) @ X, dims, "A")
    return BuiltOperator(lhs - X_C.conj().T @ invm(Q_C) @ X_C, "lr_cs", digest(X, Q))


def xhalf_operator(rho_ABC, gamma_AB, dims: SpaceDims, normalize: bool = True) -> BuiltOperator:
    """``Tr_AB gamma^{-1/2}[rho - gamma] rho^{1/2} - Tr_B gamma_B^{-1/2}[rho_BC - gamma_B] rho_BC^{1/2}``."""
    rho = _full(rho_ABC, dims, "rho_ABC")
    gamma_AB = _normalized(_on_ab(gamma_AB, dims, "gamma_AB"), normalize)
    gamma = embed(gamma_AB, dims, "AB")
    g_isq = embed(powm(gamma_AB, -0.5), dims, "AB")
    first = _tr_ab(g_isq @ (rho - gamma) @ powm(rho, 0.5), dims)

    rho_BC = marginal(rho, dims, "BC")
    gamma_B = partial_trace(gamma_AB, dims.ab, "A")
    gB = embed(gamma_B, dims.bc, "B")
    gB_isq = embed(powm(gamma_B, -0.5), dims.bc, "B")
    second = _tr_b_of_bc(gB_isq @ (rho_BC - gB) @ powm(rho_BC, 0.5), dims)
    return BuiltOperator(first - second, "xhalf", digest(rho, gamma_AB))


# -- the (X, P, Q) map --------------------------------------------------------


def _resolvent(X, P, Q, t: float) -> np.ndarray:
    """Solve ``P Y + t Y Q = X`` in the joint eigenbasis."""
    if not t > 0:
        raise ParameterError(f"t must be positive, got {t}")
    eigP, eigQ = positive_eigensystem(P, "P"), positive_eigensystem(Q, "Q")
    U, lam = eigP.vectors, eigP.values
    V, mu = eigQ.vectors, eigQ.values
    C = U.conj().T @ np.asarray(X) @ V
    return U @ (C / (lam[:, None] + t * mu[None, :])) @ V.conj().T


def xpq_operator(X, P, Q, t: float = 1.0) -> np.ndarray:
    """``X^dag (L_P + t R_Q)^{-1}(X)``; its trace is :func:`xpq_value`."""
    return np.asarray(X).conj().T @ _resolvent(X, P, Q, t)


def xpq_value(X, P, Q, t: float = 1.0) -> float:
    """``Tr X^dag (L_P + t R_Q)^{-1}(X)``, jointly convex in (X, P, Q)."""
    return float(np.trace(xpq_operator(X, P, Q, t)).real)


def xpq_operator_probe(X: Sequence, P: Sequence, Q: Sequence, t: float = 1.0) -> np.ndarray:
    """Midpoint-convexity defect of :func:`xpq_operator` for two triples.

    ``X``, ``P``, ``Q`` are pairs.  Returns
    ``(M(X1,P1,Q1) + M(X2,P2,Q2)) / 2 - M(mean X, mean P, mean Q)``, which
    is PSD whenever the map is operator convex; it is not in general.
    """
    (X1, X2), (P1, P2), (Q1, Q2) = X, P, Q
    X1, X2, P1, P2, Q1, Q2 = map(np.asarray, (X1, X2, P1, P2, Q1, Q2))
    avg = (xpq_operator(X1, P1, Q1, t) + xpq_operator(X2, P2, Q2, t)) / 2
    return avg - xpq_operator((X1 + X2) / 2, (P1 + P2) / 2, (Q1 + Q2) / 2, t)


# -- the non-convex two-state map h ------------------------------------------


def h_operator(rho, gamma) -> np.ndarray:
    """``sqrt(rho) (log rho - log gamma) sqrt(rho)``; ``Tr h`` is relative entropy."""
    s = powm(rho, 0.5)
    return s @ (logm(rho) - logm(gamma)) @ s


def h_midpoint_defect(rhos: Sequence, gammas: Sequence) -> np.ndarray:
    (r1, r2), (g1, g2) = rhos, gammas
    r1, r2, g1, g2 = map(np.asarray, (r1, r2, g1, g2))
    return (h_operator(r1, g1) + h_operator(r2, g2)) / 2 - h_operator((r1 + r2) / 2, (g1 + g2) / 2)

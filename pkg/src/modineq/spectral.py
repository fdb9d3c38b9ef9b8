"""Matrix functions and the spectral action of g on the relative modular operator.

For positive definite P and Q the superoperator ``Delta = L_P R_Q^{-1}``,
``X -> P X Q^{-1}``, is diagonal in the basis ``u_i v_j^dagger`` built from
eigenvectors of P and Q, with eigenvalues ``lambda_i / mu_j``.  Every
``g(Delta)`` is therefore a Hadamard product in that basis, which is how
:func:`apply_g_modular` and :func:`quasi_entropy` are evaluated.
:func:`modular_superoperator` is an independent dense route used as an oracle.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DimensionError,
    NotHermitianError,
    NotPositiveDefiniteError,
    SpectralDomainError,
)
from .tensor import herm_defect

# Tolerance hierarchy, fixed once and used everywhere.
TOL_CONSTRUCTION = 1e-12
TOL_SPECTRAL = 1e-10
TOL_INEQUALITY = 1e-9
TOL_EQUALITY = 1e-8

FLOOR_EPS = 1e-9


def floor_state(M, eps: float = FLOOR_EPS) -> np.ndarray:
    """Mix ``M`` with a little of the maximally mixed matrix of the same trace.

    ``M -> (1 - eps) M + eps Tr(M) I / d``; keeps logs and inverses finite for
    rank-deficient input while moving results by ``O(eps)``.
    """
    M = np.asarray(M, dtype=complex)
    d = M.shape[0]
    return (1.0 - eps) * M + eps * np.trace(M).real * np.eye(d) / d


@dataclass(frozen=True)
class Eigensystem:
    """Ascending eigenvalues and column eigenvectors of a Hermitian matrix."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T

    def apply(self, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        fv = np.asarray(f(self.values))
        if not np.all(np.isfinite(fv)):
            raise SpectralDomainError(
                f"function is not finite on spectrum [{self.values[0]:.3e}, {self.values[-1]:.3e}]"
            )
        return (self.vectors * fv) @ self.vectors.conj().T


def eigensystem(M, tol: float = TOL_SPECTRAL) -> Eigensystem:
    """Decompose the Hermitian part of ``M``.

    Raises NotHermitianError when the anti-Hermitian part exceeds ``tol``;
    smaller defects are treated as round-off and symmetrized away.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    defect = herm_defect(M)
    if defect > tol:
        raise NotHermitianError(f"herm_defect {defect:.3e} exceeds {tol:.0e}")
    w, U = np.linalg.eigh((M + M.conj().T) / 2)
    return Eigensystem(w, U)


def positive_eigensystem(M, what: str = "matrix") -> Eigensystem:
    eig = eigensystem(M)
    if eig.values[0] <= 0:
        raise NotPositiveDefiniteError(
            f"{what} is not positive definite (min eigenvalue {eig.values[0]:.3e})"
        )
    return eig


def matrix_function(M, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """``U f(Lambda) U^dagger`` for Hermitian ``M``.

    Raises SpectralDomainError if ``f`` is not finite on the spectrum, e.g.
    ``np.log`` applied to a singular matrix.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        return eigensystem(M).apply(f)


def logm(M) -> np.ndarray:
    return positive_eigensystem(M).apply(np.log)


def powm(M, p: float) -> np.ndarray:
    """Real power of a positive definite matrix."""
    return positive_eigensystem(M).apply(lambda w: w ** p)


def invm(M) -> np.ndarray:
    return positive_eigensystem(M).apply(lambda w: 1.0 / w)


def entropy(rho) -> float:
    """Von Neumann entropy ``-Tr rho log rho`` (natural log) from eigenvalues."""
    w = eigensystem(rho).values
    w = w[w > 0]
    return float(-np.sum(w * np.log(w)))


def relative_entropy(rho, sigma) -> float:
    """``Tr rho (log rho - log sigma)``; sigma need not be normalized."""
    rho = np.asarray(rho)
    return float(np.trace(rho @ (logm(rho) - logm(sigma))).real)


@dataclass(frozen=True)
class ModularAction:
    """``g`` evaluated on the spectrum of ``L_P R_Q^{-1}``.

    ``gvals[i, j] = g(lambda_i / mu_j)`` for eigenvalues ``lambda`` of P and
    ``mu`` of Q.
    """

    eigP: Eigensystem
    eigQ: Eigensystem
    gvals: np.ndarray

    def apply(self, X) -> np.ndarray:
        """``g(L_P R_Q^{-1})(X)``."""
        U, V = self.eigP.vectors, self.eigQ.vectors
        X = np.asarray(X)
        if X.shape != (U.shape[0], V.shape[0]):
            raise DimensionError(f"X has shape {X.shape}, expected {(U.shape[0], V.shape[0])}")
        return U @ (self.gvals * (U.conj().T @ X @ V)) @ V.conj().T

    def apply_to_q(self) -> np.ndarray:
        """``g(L_P R_Q^{-1})(Q)``.

        Uses ``U^dag Q V = (U^dag V) diag(mu)`` exactly, so the weights are the
        perspective ``mu_j g(lambda_i / mu_j)`` and no product with Q is formed.
        """
        U, V = self.eigP.vectors, self.eigQ.vectors
        weights = self.gvals * self.eigQ.values[None, :]
        return U @ (weights * (U.conj().T @ V)) @ V.conj().T


def modular_action(g: Callable[[np.ndarray], np.ndarray], P, Q) -> ModularAction:
    eigP = positive_eigensystem(P, "P")
    eigQ = positive_eigensystem(Q, "Q")
    if eigP.dim != eigQ.dim:
        raise DimensionError(f"P is {eigP.dim}x{eigP.dim} but Q is {eigQ.dim}x{eigQ.dim}")
    ratios = eigP.values[:, None] / eigQ.values[None, :]
    gvals = np.asarray(g(ratios), dtype=float)
    if not np.all(np.isfinite(gvals)):
        raise SpectralDomainError("g is not finite on the modular spectrum")
    return ModularAction(eigP, eigQ, gvals)


def apply_g_modular(g, P, Q, X) -> np.ndarray:
    """``g(L_P R_Q^{-1})(X) = sum_ij g(lambda_i/mu_j) u_i u_i^dag X v_j v_j^dag``."""
    return modular_action(g, P, Q).apply(X)


def modular_superoperator(g, P, Q) -> np.ndarray:
    """Dense ``d^2 x d^2`` matrix of ``g(L_P R_Q^{-1})`` under column stacking.

    ``vec(P X Q^{-1}) = (Q^{-T} kron P) vec(X)``.  The Kronecker product of
    two Hermitian positive matrices is Hermitian positive, so ``g`` is
    applied through its own eigendecomposition; nothing is shared with
    :func:`apply_g_modular`.
    """
    P = np.asarray(P, dtype=complex)
    Q = np.asarray(Q, dtype=complex)
    if P.shape != Q.shape:
        raise DimensionError(f"P has shape {P.shape} but Q has shape {Q.shape}")
    positive_eigensystem(P, "P")
    positive_eigensystem(Q, "Q")
    S = np.kron(np.linalg.inv(Q).T, P)
    w, W = np.linalg.eigh((S + S.conj().T) / 2)
    return (W * np.asarray(g(w), dtype=float)) @ W.conj().T


def vec(X) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(X).reshape(-1, order="F")


def unvec(v, d: int) -> np.ndarray:
    return np.asarray(v).reshape(d, d, order="F")


def quasi_entropy(g, K, P, Q) -> float:
    """``H_g(K, P, Q) = Tr K^dagger g(L_P R_Q^{-1})(K Q)``.

    Evaluated as ``sum_ij g(lambda_i/mu_j) mu_j |<u_i, K v_j>|^2``.
    """
    act = modular_action(g, P, Q)
    K = np.asarray(K)
    C = act.eigP.vectors.conj().T @ K @ act.eigQ.vectors
    return float(np.sum(act.gvals * act.eigQ.values[None, :] * np.abs(C) ** 2))

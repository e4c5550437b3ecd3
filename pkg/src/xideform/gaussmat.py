"""Symmetric complex coupling matrices rho (d <= 3): minors, reductions, Gaussian closed forms.

The 2x2 sub-determinants R_ik = rho_ii rho_kk - rho_ik^2 and
T_ijk = rho_ij rho_kk - rho_ik rho_jk drive both the dimension reduction
(integrating out one axis of the Gaussian coupling) and the explicit closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularMatrixError

SQRT_PI = np.sqrt(np.pi)


@dataclass(frozen=True)
class RhoMatrix:
    """Symmetric d x d complex matrix, d in {1, 2, 3}."""

    entries: tuple

    @staticmethod
    def from_array(a) -> "RhoMatrix":
        a = np.asarray(a, dtype=complex)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] not in (1, 2, 3):
            raise DomainError(f"rho must be square with d in 1..3, got shape {a.shape}")
        if not np.array_equal(a, a.T):
            raise DomainError("rho must be exactly symmetric")
        return RhoMatrix(tuple(map(tuple, a)))

    @staticmethod
    def scalar(rho) -> "RhoMatrix":
        return RhoMatrix(((complex(rho),),))

    @property
    def d(self) -> int:
        return len(self.entries)

    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=complex)

    def det(self) -> complex:
        a = self.array()
        if self.d == 1:
            return complex(a[0, 0])
        if self.d == 2:
            return complex(a[0, 0] * a[1, 1] - a[0, 1] ** 2)
        return complex(
            a[0, 0] * a[1, 1] * a[2, 2]
            + 2 * a[0, 1] * a[0, 2] * a[1, 2]
            - a[0, 0] * a[1, 2] ** 2
            - a[1, 1] * a[0, 2] ** 2
            - a[2, 2] * a[0, 1] ** 2
        )

    def minor_R(self, i: int, k: int) -> complex:
        a = self.array()
        return complex(a[i, i] * a[k, k] - a[i, k] ** 2)

    def minor_T(self, i: int, j: int, k: int) -> complex:
        a = self.array()
        return complex(a[i, j] * a[k, k] - a[i, k] * a[j, k])

    def convergence_ok(self) -> bool:
        """Re(rho_ii) > 0, det(Re rho) > 0, and for d=3 positive Re-minors R_ij."""
        re = self.array().real
        if not np.all(np.diag(re) > 0):
            return False
        if self.d >= 2 and np.linalg.det(re) <= 0:
            return False
        if self.d == 3:
            for i in range(3):
                for j in range(i + 1, 3):
                    if re[i, i] * re[j, j] - re[i, j] ** 2 <= 0:
                        return False
        return True

    def require_convergent(self):
        if not self.convergence_ok():
            raise DomainError("rho violates the convergence inequalities")

    def reduce_k(self, k: int) -> "RhoMatrix":
        """Delete row/column k; rho_ii -> R_ik/rho_kk, rho_ij -> T_ijk/rho_kk."""
        if self.d < 2:
            raise DomainError("reduce_k needs d >= 2")
        a = self.array()
        if a[k, k] == 0:
            raise SingularMatrixError("rho_kk = 0 in reduce_k")
        idx = [i for i in range(self.d) if i != k]
        out = np.empty((self.d - 1, self.d - 1), dtype=complex)
        for p, i in enumerate(idx):
            for q, j in enumerate(idx):
                out[p, q] = self.minor_R(i, k) / a[k, k] if i == j else self.minor_T(i, j, k) / a[k, k]
        return RhoMatrix.from_array(out)

    def flip_k(self, k: int) -> "RhoMatrix":
        """Negate the off-diagonal entries in row/column k (an involution)."""
        a = self.array()
        for i in range(self.d):
            if i != k:
                a[i, k] = -a[i, k]
                a[k, i] = -a[k, i]
        return RhoMatrix.from_array(a)

    def inverse(self) -> np.ndarray:
        """Adjugate inverse; exact small-dimension formulas."""
        a = self.array()
        det = self.det()
        if det == 0:
            raise SingularMatrixError("rho is singular")
        if self.d == 1:
            return np.array([[1.0 / a[0, 0]]])
        if self.d == 2:
            return np.array([[a[1, 1], -a[0, 1]], [-a[0, 1], a[0, 0]]]) / det
        adj = np.empty((3, 3), dtype=complex)
        for i in range(3):
            for j in range(3):
                rows = [r for r in range(3) if r != i]
                cols = [c for c in range(3) if c != j]
                m = a[np.ix_(rows, cols)]
                adj[j, i] = (-1) ** (i + j) * (m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
        return adj / det

    def factorisation_ok(self, i: int, j: int, k: int) -> bool:
        """Whether T_ijk vanishes up to round-off relative to the entry scale."""
        scale = float(np.abs(self.array()).max()) ** 2
        return abs(self.minor_T(i, j, k)) <= 1e-14 * max(scale, 1.0)


def closed_form_e(rho: RhoMatrix, s) -> complex:
    """e(rho, s) = sqrt(pi^d / det rho) exp(s . rho^{-1} s / 16), principal root."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if s.size != rho.d:
        raise DomainError(f"s has length {s.size}, expected {rho.d}")
    det = rho.det()
    if det == 0:
        raise SingularMatrixError("rho is singular")
    rho.require_convergent()
    quad = s @ rho.inverse() @ s
    return complex(np.sqrt(np.pi**rho.d / det) * np.exp(quad / 16.0))


def quadratic_form_minors(rho: RhoMatrix, s) -> complex:
    """d=3 numerator of s . rho^{-1} s written through the minors:

    sum_k s_k^2 R_{ij(k)} - 2 sum_{i<j} s_i s_j T_{ij k(ij)},  divided by det(rho).
    """
    if rho.d != 3:
        raise DomainError("minor expansion is the d=3 formula")
    s = np.asarray(s, dtype=complex)
    num = (
        s[0] ** 2 * rho.minor_R(1, 2)
        + s[1] ** 2 * rho.minor_R(0, 2)
        + s[2] ** 2 * rho.minor_R(0, 1)
        - 2.0
        * (
            s[0] * s[1] * rho.minor_T(0, 1, 2)
            + s[0] * s[2] * rho.minor_T(0, 2, 1)
            + s[1] * s[2] * rho.minor_T(1, 2, 0)
        )
    )
    return complex(num / rho.det())


def rescale_class(rho: RhoMatrix, s, lam):
    """Representative (rho', s') of the scaling class and the matching prefactor.

    s'_i = s_i / lam_i, rho'_kl = rho_kl / (lam_k lam_l), prefactor = 1/prod(lam),
    so that e(rho, s) = prefactor * e(rho', s').
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if lam.size != rho.d or np.any(lam <= 0):
        raise DomainError("lam must be a positive vector of length d")
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    scaled = rho.array() / np.outer(lam, lam)
    return RhoMatrix.from_array(scaled), s / lam, float(1.0 / lam.prod())

"""Catalog of the named functional equations, each as an LHS/RHS verification.

Every identity evaluates both sides independently (multidimensional quadrature on
one side, lower-dimensional values plus Gaussian closed forms on the other) and
returns a VerificationReport.  Root families (telescope, tilde, funcor, the special
rho_12 locus) are generated in closed form and confirmed by quadrature.
"""

from __future__ import annotations

import cmath
import csv
import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateParameterError, DomainError
from .gaussmat import RhoMatrix, closed_form_e
from .quadrature import panel_nodes
from .theta import ThetaOperator
from .xi_core import mellin, MellinKernel, mellin_many, telescope_rhs, xi, xi_sum_m
from .xi_multi import MultiXiParams, xi_d

PI = math.pi

KINDS = (
    "telescope", "sk_flip", "fun1", "fun11", "funcor1", "funcor2", "rho12_roots",
    "mean_value", "result3d", "sixterm", "rewrite_3d_a", "rewrite_3d_b",
    "rewrite_2d", "mobius_rewrite",
)

# default per-identity tolerance by dimensionality of the heaviest integral
DEFAULT_TOL = {
    "telescope": 1e-9, "sk_flip": 1e-6, "fun1": 1e-6, "fun11": 1e-6,
    "funcor1": 1e-7, "funcor2": 1e-7, "rho12_roots": 1e-10, "mean_value": 1e-7,
    "result3d": 1e-5, "sixterm": 1e-5, "rewrite_3d_a": 1e-5, "rewrite_3d_b": 1e-4,
    "rewrite_2d": 1e-6, "mobius_rewrite": 1e-6,
}


@dataclass(frozen=True)
class IdentityId:
    kind: str
    index: int | None = None  # m for telescope, k for sk_flip

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown identity {self.kind!r}")

    def __str__(self):
        return self.kind if self.index is None else f"{self.kind}({self.index})"


@dataclass(frozen=True)
class VerificationReport:
    id: str
    params: dict
    lhs: complex
    rhs: complex
    abs_residual: float
    rel_residual: float
    passed: bool
    tolerance: float
    evaluations: int

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "params": self.params,
            "lhs": [self.lhs.real, self.lhs.imag],
            "rhs": [self.rhs.real, self.rhs.imag],
            "abs_residual": self.abs_residual,
            "rel_residual": self.rel_residual,
            "pass": self.passed,
            "tolerance": self.tolerance,
            "evaluations": self.evaluations,
        }

    def params_hash(self) -> str:
        blob = json.dumps(self.params, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def csv_row(self) -> list:
        return [self.id, self.params_hash(), repr(self.abs_residual), repr(self.rel_residual),
                "true" if self.passed else "false"]


def write_reports(reports, path, fmt="json"):
    """Serialize reports: one JSON record per line, or CSV summary rows."""
    if fmt == "json":
        with open(path, "w", encoding="utf-8") as fh:
            for r in reports:
                fh.write(json.dumps(r.to_dict()) + "\n")
    elif fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id", "params_hash", "abs_residual", "rel_residual", "pass"])
            for r in reports:
                writer.writerow(r.csv_row())
    else:
        raise DomainError(f"unknown format {fmt!r}")


def _report(identity, params, lhs, rhs, tol, evals) -> VerificationReport:
    lhs, rhs = complex(lhs), complex(rhs)
    abs_res = abs(lhs - rhs)
    scale = max(abs(lhs), abs(rhs), 1.0)
    return VerificationReport(
        id=str(identity), params=params, lhs=lhs, rhs=rhs,
        abs_residual=abs_res, rel_residual=abs_res / scale,
        passed=abs_res <= max(tol, tol * scale), tolerance=tol, evaluations=evals,
    )


def _as_rho(rho) -> RhoMatrix:
    return rho if isinstance(rho, RhoMatrix) else RhoMatrix.from_array(rho)


def _xi2(rho2: RhoMatrix, s, spec) -> complex:
    return xi_d(MultiXiParams(rho2, tuple(complex(v) for v in s), "theta"), spec).value


# ---------------------------------------------------------------------------
# individual identities


def _verify_telescope(m, rho, s, tol, spec):
    rho, s = complex(rho), complex(s)
    lhs = xi_sum_m(rho, s, m, spec).value - xi_sum_m(rho, 1 - m - s, m, spec).value
    return lhs, telescope_rhs(rho, s, m), 2 * (m + 1)


def _verify_sk_flip(k, rho, s, tol, spec):
    rho = _as_rho(rho)
    rho.require_convergent()
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    d = rho.d
    a = rho.array()
    lhs = xi_d(MultiXiParams.make(rho, s), spec).value if d > 1 else xi(a[0, 0], s[0], spec).value
    s_flip = s.copy()
    s_flip[k] = 1 - s_flip[k]
    main = (
        xi_d(MultiXiParams.make(rho.flip_k(k), s_flip), spec).value
        if d > 1 else xi(a[0, 0], s_flip[0], spec).value
    )
    rkk = a[k, k]
    pref = np.sqrt(np.pi / rkk) / 2

    def reduced_xi(shift):
        if d == 1:
            return 1.0
        args = [s[i] - shift * a[i, k] / rkk for i in range(d) if i != k]
        red = rho.reduce_k(k)
        if d == 2:
            return xi(red.array()[0, 0], args[0], spec).value
        return _xi2(red, args, spec)

    rhs = main + pref * (
        np.exp((s[k] - 1) ** 2 / (16 * rkk)) * reduced_xi(s[k] - 1)
        - np.exp(s[k] ** 2 / (16 * rkk)) * reduced_xi(s[k])
    )
    return lhs, rhs, 2 * d + 2


def _fun_groups(a, det, s1, s2, spec):
    """The two reduced-Xi brackets shared by the 2D functional equations."""
    r11, r22, r12 = a[0, 0], a[1, 1], a[0, 1]
    g22 = (np.sqrt(PI) / (2 * np.sqrt(r22))) * (
        np.exp((s2 - 1) ** 2 / (16 * r22)) * xi(det / r22, 1 - s1 - (r12 / r22) * (1 - s2), spec).value
        - np.exp(s2**2 / (16 * r22)) * xi(det / r22, 1 - s1 + (r12 / r22) * s2, spec).value
    )
    g11 = (np.sqrt(PI) / (2 * np.sqrt(r11))) * (
        np.exp((s1 - 1) ** 2 / (16 * r11)) * xi(det / r11, 1 - s2 - (r12 / r11) * (1 - s1), spec).value
        - np.exp(s1**2 / (16 * r11)) * xi(det / r11, 1 - s2 + (r12 / r11) * s1, spec).value
    )
    return g11, g22


def _verify_fun1(rho, s, tol, spec):
    rho = _as_rho(rho)
    rho.require_convergent()
    if rho.d != 2:
        raise DomainError("fun1 is a d=2 identity")
    a = rho.array()
    s1, s2 = complex(s[0]), complex(s[1])
    det = rho.det()
    lhs = (
        xi_d(MultiXiParams.make(rho, [s1, s2]), spec).value
        - xi_d(MultiXiParams.make(rho, [1 - s1, 1 - s2]), spec).value
    )
    r11, r22, r12 = a[0, 0], a[1, 1], a[0, 1]
    pref = PI * np.exp((r22 * s1**2 + r11 * s2**2 - 2 * r12 * s1 * s2) / (16 * det)) / (4 * np.sqrt(det))
    bracket = (
        1
        + np.exp((r11 + r22 - 2 * r12 - 2 * r22 * s1 - 2 * r11 * s2 + 2 * r12 * (s1 + s2)) / (16 * det))
        - np.exp((r22 - 2 * r22 * s1 + 2 * r12 * s2) / (16 * det))
        - np.exp((r11 - 2 * r11 * s2 + 2 * r12 * s1) / (16 * det))
    )
    g11, g22 = _fun_groups(a, det, s1, s2, spec)
    return lhs, pref * bracket + g22 + g11, 6


def _verify_fun11(rho, s, tol, spec):
    rho = _as_rho(rho)
    rho.require_convergent()
    a = rho.array()
    s1, s2 = complex(s[0]), complex(s[1])
    det = rho.det()
    lhs = (
        xi_d(MultiXiParams.make(rho, [s1, s2]), spec).value
        - xi_d(MultiXiParams.make(rho, [1 - s1, 1 - s2]), spec).value
    )
    r11, r12 = a[0, 0], a[0, 1]
    f11 = (np.sqrt(PI) / (2 * np.sqrt(r11))) * (
        np.exp((s1 - 1) ** 2 / (16 * r11)) * xi(det / r11, s2 + (r12 / r11) * (1 - s1), spec).value
        - np.exp(s1**2 / (16 * r11)) * xi(det / r11, s2 - (r12 / r11) * s1, spec).value
    )
    _, g22 = _fun_groups(a, det, s1, s2, spec)
    return lhs, f11 + g22, 6


def _verify_funcor1(rho, s, tol, spec):
    rho = _as_rho(rho)
    a = rho.array()
    if rho.d != 2 or a[0, 0] != a[1, 1]:
        raise DomainError("funcor1 needs a symmetric 2x2 matrix with rho11 = rho22")
    rho.require_convergent()
    s = complex(s)
    det = rho.det()
    r11, r12 = a[0, 0], a[0, 1]
    lhs = (
        xi_d(MultiXiParams.make(rho, [s, s]), spec).value
        - xi_d(MultiXiParams.make(rho, [1 - s, 1 - s]), spec).value
    )
    rhs = (np.sqrt(PI) / np.sqrt(r11)) * (
        np.exp((s - 1) ** 2 / (16 * r11)) * xi(det / r11, 1 - s - (r12 / r11) * (1 - s), spec).value
        - np.exp(s**2 / (16 * r11)) * xi(det / r11, 1 - s + (r12 / r11) * s, spec).value
    )
    return lhs, rhs, 4


def _verify_funcor2(rho, s, tol, spec):
    rho = _as_rho(rho)
    a = rho.array()
    if rho.d != 2 or a[0, 0] != a[1, 1]:
        raise DomainError("funcor2 needs a symmetric 2x2 matrix with rho11 = rho22")
    rho.require_convergent()
    s = complex(s)
    det = rho.det()
    r11, r12 = a[0, 0], a[0, 1]
    dr = det / r11
    lhs = (
        np.exp(s**2 / (16 * r11)) * xi(dr, 1 - s - (r12 / r11) * s, spec).value
        - np.exp((1 - s) ** 2 / (16 * r11)) * xi(dr, 1 - s + (r12 / r11) * (1 - s), spec).value
        + np.exp((s - 1) ** 2 / (16 * r11)) * xi(dr, s - (r12 / r11) * (1 - s), spec).value
        - np.exp(s**2 / (16 * r11)) * xi(dr, s + (r12 / r11) * s, spec).value
    )
    return lhs, 0.0, 4


def four_exponential_combination(gamma, rho12, s1, s2) -> complex:
    """1 + e^{E2} - e^{E3} - e^{E4}: the inhomogeneity bracket at rho11 = rho22 = gamma."""
    gamma, rho12, s1, s2 = complex(gamma), complex(rho12), complex(s1), complex(s2)
    det = gamma * gamma - rho12 * rho12
    e2 = (2 * gamma - 2 * rho12 - 2 * gamma * s1 - 2 * gamma * s2 + 2 * rho12 * (s1 + s2)) / (16 * det)
    e3 = (gamma - 2 * gamma * s1 + 2 * rho12 * s2) / (16 * det)
    e4 = (gamma - 2 * gamma * s2 + 2 * rho12 * s1) / (16 * det)
    return 1 + cmath.exp(e2) - cmath.exp(e3) - cmath.exp(e4)


def rho12_special_roots(gamma, n: int, branch: int, s2, nprime: int = 0):
    """Coupling rho12 with e^{-rho12/(8 det)} = 1 and an s1 annihilating the bracket.

    rho12 = 1/(32 pi i n) + branch * sqrt(gamma^2 - 1/(32 pi n)^2);
    s1 = (gamma/rho12)(s2 - 1/2) + 2 n'/n.
    """
    if n == 0:
        raise DomainError("n must be a nonzero integer")
    gamma = complex(gamma)
    rho12 = 1 / (32j * PI * n) + branch * cmath.sqrt(gamma**2 - 1 / (32 * PI * n) ** 2)
    s1 = (gamma / rho12) * (complex(s2) - 0.5) + 2.0 * nprime / n
    return rho12, s1


def _verify_rho12_roots(extras, tol):
    gamma = extras["gamma"]
    rho12, s1 = rho12_special_roots(gamma, extras["n"], extras.get("branch", 1),
                                    extras["s2"], extras.get("nprime", 0))
    val = four_exponential_combination(gamma, rho12, s1, extras["s2"])
    return val, 0.0, 0


def _verify_mean_value(rho, s, tol, spec):
    rho = _as_rho(rho)
    rho.require_convergent()
    a = rho.array()
    r11, r22, r12 = a[0, 0], a[1, 1], a[0, 1]
    s1, s2 = complex(s[0]), complex(s[1])
    asum = r11 + r22 - 2 * r12
    if asum.real <= 0:
        raise DomainError("mean-value identity needs Re(rho11 + rho22 - 2 rho12) > 0")
    # window from the net decay of weight * inner transform, which is det/rho22
    net = (rho.det() / r22).real
    if net <= 0:
        raise DomainError("mean-value window needs Re(det/rho22) > 0")
    half = math.sqrt(41.5 / min(net, asum.real))
    center = ((s1 - s2) / 2 / (2 * asum)).real
    n_panels = max(20, int(math.ceil(half)) * 8)
    nodes, w = panel_nodes(center - half - 1, center + half + 1, n_panels, 12)
    inner_args = s2 / 2 + 2 * (r22 - r12) * nodes
    inner, _ = mellin_many(ThetaOperator.plain(), r22, inner_args, spec=spec)
    weight = np.exp(-asum * nodes**2 + (s1 - s2) / 2 * nodes)
    lhs = (w * weight * inner).sum()
    arg = (s1 * r22 + s2 * r11 - (s1 + s2) * r12) / (2 * asum)
    rhs = (
        np.sqrt(PI / asum)
        * np.exp((s1 - s2) ** 2 / (16 * asum))
        * mellin(MellinKernel(ThetaOperator.plain(), 0, rho.det() / asum, arg), spec).value
    )
    return lhs, rhs, 2


_PAIR_FOR_K = {0: (1, 2), 1: (0, 2), 2: (0, 1)}


def _c_term(rho: RhoMatrix, k: int, x, y, z, spec) -> complex:
    """Closed 2D reduction times a 1D Xi; the minor shift enters with + sign."""
    a = rho.array()
    i, j = _PAIR_FOR_K[k]
    rij = rho.minor_R(i, j)
    tkij = rho.minor_T(k, i, j)
    tkji = rho.minor_T(k, j, i)
    pref = np.exp((a[j, j] * x**2 + a[i, i] * y**2 - 2 * a[i, j] * x * y) / (16 * rij)) / np.sqrt(rij)
    return pref * xi(rho.det() / rij, 1 - z + (x * tkij + y * tkji) / rij, spec).value


def _verify_result3d(rho, s, tol, spec):
    rho = _as_rho(rho)
    if rho.d != 3:
        raise DomainError("result3d is a d=3 identity")
    rho.require_convergent()
    a = rho.array()
    s1, s2, s3 = (complex(v) for v in s)
    lhs = (
        xi_d(MultiXiParams.make(rho, [s1, s2, s3]), spec).value
        - xi_d(MultiXiParams.make(rho, [1 - s1, 1 - s2, 1 - s3]), spec).value
    )
    e = lambda p, q, r: closed_form_e(rho, [p, q, r])
    grp_exp = (1.0 / 8.0) * (
        e(s1, s2 - 1, s3) - e(s1 - 1, s2, s3 - 1) + e(s1 - 1, s2, s3) - e(s1 - 1, s2 - 1, s3)
        + e(s1 - 1, s2 - 1, s3 - 1) - e(s1, s2, s3) + e(s1, s2, s3 - 1) - e(s1, s2 - 1, s3 - 1)
    )
    C = lambda k, x, y, z: _c_term(rho, k, x, y, z, spec)
    grp_c = (PI / 4.0) * (
        C(2, s1, s2, s3) - C(2, s1, s2 - 1, s3) + C(2, s1 - 1, s2 - 1, s3) - C(2, s1 - 1, s2, s3)
        + C(1, s1, s3, s2) - C(1, s1, s3 - 1, s2) + C(1, s1 - 1, s3 - 1, s2) - C(1, s1 - 1, s3, s2)
        + C(0, s2, s3, s1) - C(0, s2, s3 - 1, s1) + C(0, s2 - 1, s3 - 1, s1) - C(0, s2 - 1, s3, s1)
    )
    grp_red = 0j
    svec = [s1, s2, s3]
    for k in range(3):
        rkk = a[k, k]
        red = rho.reduce_k(k)
        others = [i for i in range(3) if i != k]
        for shift, sign in ((svec[k] - 1, 1.0), (svec[k], -1.0)):
            args = [1 - svec[i] + shift * a[i, k] / rkk for i in others]
            grp_red += sign * np.exp(shift**2 / (16 * rkk)) / np.sqrt(rkk) * _xi2(red, args, spec)
    grp_red *= np.sqrt(PI) / 2.0
    return lhs, grp_exp + grp_c + grp_red, 20


def _verify_sixterm(rho, s, tol, spec):
    rho = _as_rho(rho)
    if rho.d != 3:
        raise DomainError("sixterm is a d=3 identity")
    rho.require_convergent()
    a = rho.array()
    s1, s2, s3 = (complex(v) for v in s)
    h = lambda v: (1 + v) / 2
    lhs = xi_d(MultiXiParams.make(rho, [h(s1), h(s2), h(s3)]), spec).value

    def bracket(k, sk, arg_builder):
        rkk = a[k, k]
        pref = (np.sqrt(PI) / 2) * np.exp((1 + sk**2) / (64 * rkk)) / np.sqrt(rkk)
        plus = np.exp(-sk / (32 * rkk))
        minus = np.exp(sk / (32 * rkk))
        m_red, args_p, args_m = arg_builder()
        return pref * (plus * _xi2(m_red, args_p, spec) - minus * _xi2(m_red, args_m, spec))

    # first route: flip axis 3
    def build3():
        red = rho.reduce_k(2)
        args_p = [h(s1 + (1 - s3) * a[0, 2] / a[2, 2]), h(s2 + (1 - s3) * a[1, 2] / a[2, 2])]
        args_m = [h(s1 - (1 + s3) * a[0, 2] / a[2, 2]), h(s2 - (1 + s3) * a[1, 2] / a[2, 2])]
        return red, args_p, args_m

    rhs1 = xi_d(MultiXiParams.make(rho.flip_k(2), [h(s1), h(s2), h(-s3)]), spec).value + bracket(2, s3, build3)

    # second route: flip axis 1 then axis 2
    def build1():
        red = rho.reduce_k(0)
        args_p = [h(s2 + (1 - s1) * a[0, 1] / a[0, 0]), h(s3 + (1 - s1) * a[0, 2] / a[0, 0])]
        args_m = [h(s2 - (1 + s1) * a[0, 1] / a[0, 0]), h(s3 - (1 + s1) * a[0, 2] / a[0, 0])]
        return red, args_p, args_m

    def build2():
        red = rho.flip_k(0).reduce_k(1)
        args_p = [h(-s1 - (1 - s2) * a[0, 1] / a[1, 1]), h(s3 + (1 - s2) * a[1, 2] / a[1, 1])]
        args_m = [h(-s1 + (1 + s2) * a[0, 1] / a[1, 1]), h(s3 - (1 + s2) * a[1, 2] / a[1, 1])]
        return red, args_p, args_m

    rhs2 = (
        xi_d(MultiXiParams.make(rho.flip_k(2), [h(-s1), h(-s2), h(s3)]), spec).value
        + bracket(0, s1, build1)
        + bracket(1, s2, build2)
    )
    # report the worse of the two displayed equalities
    worse = rhs1 if abs(lhs - rhs1) >= abs(lhs - rhs2) else rhs2
    return lhs, worse, 9


def step4_matrix(rho, gamma, s) -> RhoMatrix:
    rho, gamma, s = complex(rho), complex(gamma), complex(s)
    return RhoMatrix.from_array([
        [rho + s**2 * gamma, s**2 * gamma, s * gamma],
        [s**2 * gamma, rho + s**2 * gamma, s * gamma],
        [s * gamma, s * gamma, gamma],
    ])


def _verify_rewrite_3d_a(extras, tol, spec):
    mat = step4_matrix(extras["rho"], extras["gamma"], extras["s"])
    mat.require_convergent()
    half = [0.5, 0.5, 0.5]
    lhs = xi_d(MultiXiParams.make(mat, half), spec).value
    rhs = xi_d(MultiXiParams.make(mat.flip_k(2), half), spec).value
    return lhs, rhs, 2


def step7_matrix_and_args(rho, gamma, s):
    rho, gamma, s = complex(rho), complex(gamma), complex(s)
    den = rho + gamma * s**2
    mat = RhoMatrix.from_array([
        [(rho**2 + 2 * rho * gamma * s**2) / den, rho * gamma * s / den],
        [rho * gamma * s / den, rho * gamma / den],
    ])
    a_hi = (rho + 2 * gamma * s**2) / (2 * den)
    a_lo = rho / (2 * den)
    b_plus = (rho + gamma * s**2 + gamma * s) / (2 * den)
    b_minus = (rho + gamma * s**2 - gamma * s) / (2 * den)
    return mat, a_hi, a_lo, b_plus, b_minus


def _verify_rewrite_3d_b(extras, tol, spec):
    mat, a_hi, a_lo, b_plus, b_minus = step7_matrix_and_args(extras["rho"], extras["gamma"], extras["s"])
    mat.require_convergent()
    flip = mat.flip_k(1)
    lhs = (
        xi_d(MultiXiParams.make(mat, [a_hi, b_plus]), spec).value
        - xi_d(MultiXiParams.make(mat, [a_lo, b_minus]), spec).value
    )
    rhs = (
        xi_d(MultiXiParams.make(flip, [a_hi, b_minus]), spec).value
        - xi_d(MultiXiParams.make(flip, [a_lo, b_plus]), spec).value
    )
    return lhs, rhs, 4


def rewrite_2d_matrix_and_args(rho, alpha, s, n: int):
    rho, alpha, s = complex(rho), complex(alpha), complex(s)
    mat = RhoMatrix.from_array([[rho + alpha * s**2, alpha * s], [alpha * s, alpha]])
    a1 = (1 - 16j * PI * (1 + 2 * n) * alpha * s) / 2
    a2 = (1 - 16j * PI * (1 + 2 * n) * alpha) / 2
    b2 = (1 + 16j * PI * (1 + 2 * n) * alpha) / 2
    return mat, a1, a2, b2


def _verify_rewrite_2d(extras, tol, spec):
    rho, alpha, s, n = extras["rho"], extras["alpha"], extras["s"], extras.get("n", 0)
    mat, a1, a2, b2 = rewrite_2d_matrix_and_args(rho, alpha, s, n)
    mat.require_convergent()
    # stated premise: Re(alpha s) < sqrt(Re alpha * Re(rho + alpha s^2)), taken on real parts
    a = mat.array()
    if (complex(alpha) * complex(s)).real >= math.sqrt(a[1, 1].real * a[0, 0].real):
        raise DomainError("rewrite_2d premise Re(alpha s) < sqrt(Re alpha Re(rho + alpha s^2)) fails")
    lhs = xi_d(MultiXiParams.make(mat, [a1, a2]), spec).value
    rhs = xi_d(MultiXiParams.make(mat.flip_k(1), [a1, b2]), spec).value
    return lhs, rhs, 2


def _verify_mobius(extras, tol, spec):
    rho, alpha, s = complex(extras["rho"]), complex(extras["alpha"]), complex(extras["s"])
    mat = RhoMatrix.from_array([[rho + alpha * s**2, alpha * s], [alpha * s, alpha]])
    mat.require_convergent()
    flip = mat.flip_k(1)
    u = alpha / rho
    lhs = rhs = 0j
    for i in (0, 1):
        sgn = (-1.0) ** i
        c1 = (1 + sgn * u * s**2) / 2
        c2 = (1 + sgn * u * s) / 2
        c2f = (1 - sgn * u * s) / 2
        lhs += sgn * xi_d(MultiXiParams.make(mat, [c1, c2]), spec).value
        rhs += sgn * xi_d(MultiXiParams.make(flip, [c1, c2f]), spec).value
    return lhs, rhs, 4


def verify(identity, rho=None, s=None, extras=None, tol=None, spec=None) -> VerificationReport:
    """Evaluate both sides of a named identity and build the report."""
    ident = identity if isinstance(identity, IdentityId) else IdentityId(identity)
    extras = dict(extras or {})
    tol = tol if tol is not None else DEFAULT_TOL[ident.kind]
    params = {"rho": str(rho), "s": str(s), **{k: str(v) for k, v in extras.items()}}
    kind = ident.kind
    if kind == "telescope":
        m = ident.index if ident.index is not None else int(extras.get("m", 0))
        params["m"] = m
        lhs, rhs, ev = _verify_telescope(m, rho, s, tol, spec)
    elif kind == "sk_flip":
        k = ident.index if ident.index is not None else int(extras.get("k", 0))
        params["k"] = k
        lhs, rhs, ev = _verify_sk_flip(k, rho, s, tol, spec)
    elif kind == "fun1":
        lhs, rhs, ev = _verify_fun1(rho, s, tol, spec)
    elif kind == "fun11":
        lhs, rhs, ev = _verify_fun11(rho, s, tol, spec)
    elif kind == "funcor1":
        lhs, rhs, ev = _verify_funcor1(rho, s, tol, spec)
    elif kind == "funcor2":
        lhs, rhs, ev = _verify_funcor2(rho, s, tol, spec)
    elif kind == "rho12_roots":
        lhs, rhs, ev = _verify_rho12_roots(extras, tol)
    elif kind == "mean_value":
        lhs, rhs, ev = _verify_mean_value(rho, s, tol, spec)
    elif kind == "result3d":
        lhs, rhs, ev = _verify_result3d(rho, s, tol, spec)
    elif kind == "sixterm":
        lhs, rhs, ev = _verify_sixterm(rho, s, tol, spec)
    elif kind == "rewrite_3d_a":
        lhs, rhs, ev = _verify_rewrite_3d_a(extras, tol, spec)
    elif kind == "rewrite_3d_b":
        lhs, rhs, ev = _verify_rewrite_3d_b(extras, tol, spec)
    elif kind == "rewrite_2d":
        lhs, rhs, ev = _verify_rewrite_2d(extras, tol, spec)
    else:
        lhs, rhs, ev = _verify_mobius(extras, tol, spec)
    return _report(ident, params, lhs, rhs, tol, ev)


# ---------------------------------------------------------------------------
# closed-form root families


def candidate_zeros(family: str, rho, k_range, m: int = 0, rho_mat=None, branch: int = 1):
    """Closed-form roots: telescope / tilde ladders, funcor1 / funcor2 log-branches."""
    ks = list(k_range)
    if family == "telescope":
        rho = complex(rho)
        return [(1 - m) / 2 + 16 * rho * PI * 1j * k / (1 + m) for k in ks]
    if family == "tilde":
        rho = complex(rho)
        return [(1 - m) / 2 + 16 * rho * PI * 1j * (-0.5 + k / (1 + m)) for k in ks]
    if family in ("funcor1", "funcor2"):
        a = _as_rho(rho_mat if rho_mat is not None else rho).array()
        r11, r12 = a[0, 0], a[0, 1]
        det = r11 * r11 - r12 * r12
        sign = -1.0 if family == "funcor1" else 1.0
        denom = r11 - r12 if family == "funcor1" else r11 + r12
        if denom == 0:
            raise DegenerateParameterError("rho11 = -+rho12 degenerates the root family")
        inner = 1 - cmath.exp(sign * r12 / (8 * det))
        sqrt_inner = cmath.sqrt(inner)
        if 1 + branch * sqrt_inner == 0:
            raise DegenerateParameterError("log branch argument vanishes")
        log_term = cmath.log(1 + branch * sqrt_inner)
        base = 0.5 + sign * r12 / (2 * denom)
        return [base - 8 * det / denom * (2j * PI * k + log_term) for k in ks]
    raise DomainError(f"unknown zero family {family!r}")


def zero_scan(f, anchor, direction, length, grid: int, refine_tol: float = 1e-10):
    """Bracket sign changes of the real-valued reduction of f along a ray and bisect.

    f is evaluated at anchor + u * direction for u in [0, length]; its real part
    must be the symmetry-reduced real quantity.  Returns refined points in the
    complex plane; empty list when no sign change is found.
    """
    anchor, direction = complex(anchor), complex(direction)
    us = np.linspace(0.0, float(length), int(grid))
    vals = np.array([complex(f(anchor + u * direction)).real for u in us])
    roots = []
    for i in range(len(us) - 1):
        a, b = us[i], us[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            roots.append(anchor + a * direction)
            continue
        if fa * fb >= 0.0:
            continue
        while (b - a) * abs(direction) > refine_tol:
            mid = (a + b) / 2
            fm = complex(f(anchor + mid * direction)).real
            if fm == 0.0:
                a = b = mid
                break
            if fa * fm < 0:
                b, fb = mid, fm
            else:
                a, fa = mid, fm
        roots.append(anchor + (a + b) / 2 * direction)
    return roots


def critical_sum_rescaled(rho, spec=None):
    """y -> [Xi_rho((1+iy)/2) + Xi_rho((1-iy)/2)] e^{y^2/64rho}: O(1) on the scan line.

    Roots of the sum factor of Xi^2((1+s)/2) - Xi^2((1-s)/2) on s = iy, with the
    Gaussian decay removed so bisection stays well conditioned.
    """
    rho = float(rho)

    def f(y):
        y = float(np.real(y))
        val = 2.0 * xi(rho, 0.5 + 0.5j * y, spec).value.real
        return val * math.exp(y * y / (64 * rho))

    return f


def sample_convergent_rho(seed: int, d: int, imag_scale: float = 0.1) -> RhoMatrix:
    """Deterministic random draw satisfying the convergence inequalities."""
    rng = np.random.default_rng(seed)
    for _ in range(1000):
        base = rng.normal(size=(d, d))
        sym = 0.25 * (base + base.T) / 2 + np.diag(rng.uniform(0.6, 1.5, size=d))
        im = imag_scale * (lambda b: (b + b.T) / 2)(rng.normal(size=(d, d)))
        np.fill_diagonal(im, 0.0)
        rho = RhoMatrix.from_array(sym + 1j * im)
        if rho.convergence_ok():
            return rho
    raise DomainError("failed to draw a convergent rho")

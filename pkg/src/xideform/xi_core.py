"""One-dimensional deformed family: Xi_rho(s) and its operator/log-moment relatives.

Everything is a Mellin transform M[f](a) = int_0^inf dt/t t^a f(t) evaluated on the
log axis x = ln t, where it becomes a Gaussian-weighted integral.  s-derivatives are
exact log-moment kernels (each d/ds inserts x/2), never finite differences.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PrecisionWarning
from .quadrature import QuadSpec, integrate_log_axis, oscillation_panels, panel_nodes, plan_axis
from .theta import LOG_TAIL_SPLIT, ThetaOperator, theta_values

# Largest real exponent we allow inside exp() before declaring the evaluation
# out of double-precision range.
_EXP_LIMIT = 705.0

# Cancellation ratio (integrand peak mass / |result|) beyond which a PrecisionWarning
# is emitted: the absolute floor is then about 1e-16 * ratio.
_CANCEL_LIMIT = 1e12


@dataclass(frozen=True)
class MellinKernel:
    """Integrand spec for M[(op Psi) * ln^m * exp(-rho ln^2)](argument).

    theta_op None means a pure exp kernel (no theta factor).
    """

    theta_op: ThetaOperator | None
    log_power: int
    gaussian_coeff: complex
    argument: complex

    def __post_init__(self):
        if complex(self.gaussian_coeff).real <= 0:
            raise DomainError("Re(gaussian_coeff) must be positive")
        if self.log_power < 0:
            raise DomainError("log_power must be >= 0")


@dataclass(frozen=True)
class XiValue:
    value: complex
    quad_error: float

    def __complex__(self):
        return complex(self.value)


def _checked_exp(z):
    re = np.real(z)
    top = float(np.max(re)) if np.size(re) else 0.0
    if top > _EXP_LIMIT:
        raise DomainError(f"integrand magnitude exp({top:.1f}) exceeds double range")
    return np.exp(z)


def kernel_values(op: ThetaOperator | None, x, a, rho, m: int = 0) -> np.ndarray:
    """(op Psi)(e^x) x^m e^{a x - rho x^2}, stable down to very negative x.

    For x below the far-left threshold the operator image of the theta sum is exactly
    c1 e^{-x/2} + c2, and the product is formed by combining exponents first.
    """
    x = np.asarray(x, dtype=float)
    a = complex(a)
    rho = complex(rho)
    out = np.empty(x.shape, dtype=complex)
    powm = x**m if m else 1.0
    if op is None:
        out[...] = _checked_exp(a * x - rho * x * x)
        return out * powm
    right = x >= LOG_TAIL_SPLIT
    if right.any():
        xr = x[right]
        out[right] = theta_values(op, np.exp(xr)) * _checked_exp(a * xr - rho * xr * xr)
    if (~right).any():
        xl = x[~right]
        c1, c2 = op.left_tail_coeffs()
        vals = np.zeros(xl.shape, dtype=complex)
        if c1 != 0:
            vals += c1 * _checked_exp((a - 0.5) * xl - rho * xl * xl)
        if c2 != 0:
            vals += c2 * _checked_exp(a * xl - rho * xl * xl)
        out[~right] = vals
    return out * powm


def _plan(op: ThetaOperator | None, a, rho, spec: QuadSpec):
    tol_log = -math.log(min(spec.abs_tol, 1e-10)) + 6.0
    delta_like = False
    if op is not None:
        c1, c2 = op.left_tail_coeffs()
        delta_like = abs(c1) + abs(c2) == 0.0
    x_lo, x_hi = plan_axis(complex(a).real, complex(rho).real, tol_log,
                           theta_like=op is not None, delta_like=delta_like)
    omega = abs(complex(a).imag) + 2.0 * abs(complex(rho).imag) * max(abs(x_lo), abs(x_hi))
    return x_lo, x_hi, omega


def mellin(kernel: MellinKernel, spec: QuadSpec | None = None) -> XiValue:
    """Evaluate the kernel's Mellin transform by adaptive log-axis quadrature.

    Pure-exp kernels are entire, so their path is shifted through the Gaussian
    saddle Im(a/2rho); this removes the e^{i Im(a) x} cancellation and keeps the
    result accurate relative to its own (possibly tiny) scale.
    """
    spec = spec or QuadSpec()
    op, m = kernel.theta_op, kernel.log_power
    a, rho = complex(kernel.argument), complex(kernel.gaussian_coeff)
    if op is None:
        shift = (a / (2 * rho)).imag
        lin_re = a.real + 2 * shift * rho.imag
        tol_log = -math.log(min(spec.abs_tol, 1e-10)) + 6.0
        x_lo, x_hi = plan_axis(lin_re, rho.real, tol_log, theta_like=False)
        omega = 2.0 * abs(rho.imag) * max(abs(x_lo), abs(x_hi))
        f = lambda x: (x + 1j * shift) ** m * np.exp(a * (x + 1j * shift) - rho * (x + 1j * shift) ** 2)
    else:
        x_lo, x_hi, omega = _plan(op, a, rho, spec)
        f = lambda x: kernel_values(op, x, a, rho, m)
    panels = oscillation_panels(x_lo, x_hi, omega)
    res = integrate_log_axis(f, spec, x_lo=x_lo, x_hi=x_hi, initial_panels=panels)
    probe = np.linspace(x_lo, x_hi, 129)
    peak_mass = float(np.abs(f(probe)).max()) * (x_hi - x_lo)
    err = res.error_estimate + 1e-16 * peak_mass
    if 1e-16 * peak_mass > spec.abs_tol and peak_mass > _CANCEL_LIMIT * max(abs(res.value), 1e-300):
        warnings.warn(
            f"cancellation ratio {peak_mass / max(abs(res.value), 1e-300):.2e} exceeds 1e12; "
            "absolute accuracy limited",
            PrecisionWarning,
            stacklevel=2,
        )
    return XiValue(res.value, err)


def mellin_many(op: ThetaOperator | None, rho, args, m: int = 0,
                spec: QuadSpec | None = None) -> tuple[np.ndarray, float]:
    """M[(op Psi) ln^m exp(-rho ln^2)](a_k) for a whole array of arguments a_k.

    Shares one node grid across the batch (planned for the hull of the arguments)
    and evaluates as a matrix product.  Returns (values, error_bound).
    """
    spec = spec or QuadSpec()
    rho = complex(rho)
    args = np.atleast_1d(np.asarray(args, dtype=complex))
    re_lo, re_hi = float(args.real.min()), float(args.real.max())
    im_max = float(np.abs(args.imag).max())
    tol_log = -math.log(min(spec.abs_tol, 1e-10)) + 6.0
    delta_like = False
    if op is not None:
        c1, c2 = op.left_tail_coeffs()
        delta_like = abs(c1) + abs(c2) == 0.0
    lo1, hi1 = plan_axis(re_lo, rho.real, tol_log, theta_like=op is not None, delta_like=delta_like)
    lo2, hi2 = plan_axis(re_hi, rho.real, tol_log, theta_like=op is not None, delta_like=delta_like)
    x_lo, x_hi = min(lo1, lo2), max(hi1, hi2)
    omega = im_max + 2.0 * abs(rho.imag) * max(abs(x_lo), abs(x_hi))
    n_panels = oscillation_panels(x_lo, x_hi, omega, base=8)

    def pass_at(order):
        x, w = panel_nodes(x_lo, x_hi, n_panels, order)
        base = kernel_values(op, x, 0.0, rho, m) * w
        # fold the damped base's magnitude into the exponent so exp(a x) never
        # overflows where the Gaussian would have rescued the product; magnitudes
        # below the subnormal range contribute nothing and divide unsafely
        mag = np.abs(base)
        ok = mag > 1e-280
        logmag = np.where(ok, np.log(np.maximum(mag, 1e-300)), -np.inf)
        phase = np.zeros_like(base)
        phase[ok] = base[ok] / mag[ok]
        out = np.empty(args.shape, dtype=complex)
        for start in range(0, args.size, 256):
            blk = args[start : start + 256]
            out[start : start + 256] = (_checked_exp(np.outer(blk, x) + logmag[None, :]) * phase[None, :]).sum(axis=1)
        return out

    hi_vals = pass_at(spec.panel_order + 5)
    lo_vals = pass_at(spec.panel_order)
    err = float(np.abs(hi_vals - lo_vals).max())
    if err > max(spec.abs_tol * 10, spec.rel_tol * float(np.abs(hi_vals).max())):
        n_panels *= 2
        hi_vals = pass_at(spec.panel_order + 5)
        lo_vals = pass_at(spec.panel_order)
        err = float(np.abs(hi_vals - lo_vals).max())
    return hi_vals, err


def xi(rho, s, spec: QuadSpec | None = None) -> XiValue:
    """Xi_rho(s) = M[Psi exp(-rho ln^2)](s/2)."""
    return mellin(MellinKernel(ThetaOperator.plain(), 0, complex(rho), complex(s) / 2), spec)


def xi_ds(rho, s, order: int = 1, spec: QuadSpec | None = None) -> XiValue:
    """d^order/ds^order Xi_rho(s), exact log-moment kernel (factor (x/2)^order)."""
    base = mellin(MellinKernel(ThetaOperator.plain(), order, complex(rho), complex(s) / 2), spec)
    return XiValue(base.value / 2**order, base.quad_error / 2**order)


def xi_tilde(rho, s, spec: QuadSpec | None = None) -> XiValue:
    """Xi~_rho(s) = M[(H_4 Psi) exp(-rho ln^2)](s/2) (direct operator kernel)."""
    return mellin(MellinKernel(ThetaOperator.h(4.0), 0, complex(rho), complex(s) / 2), spec)


def xi_tilde_moment_path(rho, s, spec: QuadSpec | None = None) -> XiValue:
    """(1 - 2s) Xi_rho(s) + 16 rho d_s Xi_rho(s); the cross-check route."""
    rho, s = complex(rho), complex(s)
    base = xi(rho, s, spec)
    der = xi_ds(rho, s, 1, spec)
    return XiValue((1 - 2 * s) * base.value + 16 * rho * der.value,
                   abs(1 - 2 * s) * base.quad_error + abs(16 * rho) * der.quad_error)


def xi_sum_m(rho, s, m: int, spec: QuadSpec | None = None) -> XiValue:
    """Xi^m_rho(s) = sum_{l=0..m} Xi_rho(s + l)."""
    if m < 0:
        raise DomainError("m must be >= 0")
    vals = [xi(rho, complex(s) + l, spec) for l in range(m + 1)]
    return XiValue(sum(v.value for v in vals), sum(v.quad_error for v in vals))


def xi_tilde_sum_m(rho, s, m: int, spec: QuadSpec | None = None) -> XiValue:
    """Alternating sum sum_{l=0..m} (-1)^l Xi~_rho(s + l)."""
    if m < 0:
        raise DomainError("m must be >= 0")
    vals = [xi_tilde(rho, complex(s) + l, spec) for l in range(m + 1)]
    return XiValue(sum((-1) ** l * v.value for l, v in enumerate(vals)),
                   sum(v.quad_error for v in vals))


def telescope_rhs(rho, s, m: int = 0) -> complex:
    """Closed form of Xi^m_rho(s) - Xi^m_rho(1-m-s)."""
    rho, s = complex(rho), complex(s)
    return np.sqrt(np.pi / rho) * (np.exp((s - 1) ** 2 / (16 * rho)) - np.exp((s + m) ** 2 / (16 * rho))) / 2


def mellin_delta4(rho, s, spec: QuadSpec | None = None) -> XiValue:
    """M[(Delta_4 Psi) exp(-rho ln^2)](s/2)."""
    return mellin(MellinKernel(ThetaOperator.delta4(), 0, complex(rho), complex(s) / 2), spec)


def delta4_identity_residual(rho, s, spec: QuadSpec | None = None) -> float:
    """Residual of the second-order identification

    M[(Delta_4 Psi) e](s/2) = (4s(s-1) - 32 rho) Xi + 32 rho (1-2s) Xi' + (16 rho)^2 Xi''.
    """
    rho, s = complex(rho), complex(s)
    lhs = mellin_delta4(rho, s, spec).value
    rhs = (
        (4 * s * (s - 1) - 32 * rho) * xi(rho, s, spec).value
        + 32 * rho * (1 - 2 * s) * xi_ds(rho, s, 1, spec).value
        + (16 * rho) ** 2 * xi_ds(rho, s, 2, spec).value
    )
    return abs(lhs - rhs)


def d_rho_xi(rho, s, spec: QuadSpec | None = None) -> XiValue:
    """d/drho Xi_rho(s) = -M[Psi ln^2 exp(-rho ln^2)](s/2)."""
    base = mellin(MellinKernel(ThetaOperator.plain(), 2, complex(rho), complex(s) / 2), spec)
    return XiValue(-base.value, base.quad_error)


def heat_residual(rho, s, spec: QuadSpec | None = None) -> float:
    """|d_rho Xi + 4 d^2_s Xi|; both sides are the same log moment."""
    a = d_rho_xi(rho, s, spec)
    b = xi_ds(rho, s, 2, spec)
    return abs(a.value + 4 * b.value)

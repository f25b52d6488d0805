"""Reconstruction of the tube-bulk interface unknown and coupling source.

Given the regularized bulk value sampled at distance ``delta`` from a tube
centerline, the interface value is the root of a scalar nonlinear equation
built from the Kirchhoff transform and the radial kernel profile. The
coupling source then follows from the wall transmissibility.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .laws import DiffusionLaw


class ReconstructionError(RuntimeError):
    """No bracketing interval found for the interface equation."""


def kernel_profile_f(distance, tube_radius: float, kernel_radius: float):
    """Radial profile of the regularized logarithmic solution.

    ``(1/2pi) [d^2/(2 rho^2) + ln(rho/R) - 1/2]`` inside the kernel support
    and ``(1/2pi) ln(d/R)`` outside; continuous at ``d = rho`` and zero at
    the tube wall in the unregularized limit ``rho = R``.
    """
    if kernel_radius < tube_radius:
        raise ValueError("kernel radius must not be smaller than tube radius")
    d = np.asarray(distance, float)
    rho, radius = kernel_radius, tube_radius
    inside = (d ** 2 / (2.0 * rho ** 2) + np.log(rho / radius) - 0.5)
    with np.errstate(divide="ignore"):
        outside = np.log(np.maximum(d, 1e-300) / radius)
    out = np.where(d <= rho, inside, outside) / (2.0 * np.pi)
    return float(out) if out.ndim == 0 else out


@dataclass
class ReconstructionInput:
    """Inputs of the scalar interface equation for one segment cell."""

    u_b_delta: float        # bulk value sampled at distance delta
    u_e: float              # tube unknown
    tube_radius: float
    kernel_radius: float
    delta: float
    gamma: float            # wall permeability
    law: DiffusionLaw

    def __post_init__(self):
        if not (0.0 <= self.delta < self.kernel_radius):
            raise ValueError("require 0 <= delta < kernel radius")
        if self.tube_radius > self.kernel_radius:
            raise ValueError("require tube radius <= kernel radius")
        if np.log(self.kernel_radius / self.tube_radius) < 0.5:
            warnings.warn(
                "ln(rho/R) < 0.5: uniqueness of the interface equation is "
                "not guaranteed", stacklevel=2)

    @property
    def perimeter(self) -> float:
        return 2.0 * np.pi * self.tube_radius

    @property
    def coupling_factor(self) -> float:
        """|P| gamma f(delta), the linear coefficient of the interface term."""
        f = kernel_profile_f(self.delta, self.tube_radius, self.kernel_radius)
        return self.perimeter * self.gamma * f


def reconstruct_interface(inp: ReconstructionInput,
                          tol: float = 1e-12,
                          max_expansions: int = 60) -> tuple[float, float]:
    """Solve the interface equation; returns ``(u_hat, q)``.

    ``u_hat`` satisfies ``T(u_b_delta) - T(u_hat) - |P| gamma f(delta)
    (u_hat - u_e) = 0`` and ``q = -|P| gamma (u_hat - u_e)`` is the source
    per unit tube length.
    """
    law = inp.law
    pf = inp.coupling_factor
    psi_delta = float(law.transform(np.float64(inp.u_b_delta)))

    def g(u_hat):
        return (psi_delta - float(law.transform(np.float64(u_hat)))
                - pf * (u_hat - inp.u_e))

    scale = max(1.0, abs(inp.u_e), abs(inp.u_b_delta))
    lo = min(inp.u_e, inp.u_b_delta)
    hi = max(inp.u_e, inp.u_b_delta)
    pad = 0.1 * max(hi - lo, 1e-12 * scale)
    lo, hi = lo - pad, hi + pad

    glo, ghi = g(lo), g(hi)
    for _ in range(max_expansions):
        # g is decreasing in u_hat: root bracketed once g(lo) >= 0 >= g(hi)
        if glo >= 0.0 >= ghi:
            break
        width = hi - lo
        if glo < 0.0:
            lo -= width
            glo = g(lo)
        if ghi > 0.0:
            hi += width
            ghi = g(hi)
    else:
        raise ReconstructionError(
            f"no sign change for interface equation; inputs: {inp!r}")

    if glo == 0.0:
        u_hat = lo
    elif ghi == 0.0:
        u_hat = hi
    else:
        u_hat = brentq(g, lo, hi, xtol=tol * scale, rtol=8.9e-16, maxiter=200)
    q = -inp.perimeter * inp.gamma * (u_hat - inp.u_e)
    return float(u_hat), float(q)


def interface_derivatives(inp: ReconstructionInput,
                          u_hat: float) -> tuple[float, float]:
    """Partial derivatives (du_hat/du_b_delta, du_hat/du_e) at the root.

    Obtained from the implicit function theorem on the interface equation;
    both denominators share ``D(u_hat) + |P| gamma f(delta) > 0``.
    """
    pf = inp.coupling_factor
    d_hat = float(inp.law.eval(np.float64(u_hat)))
    d_delta = float(inp.law.eval(np.float64(inp.u_b_delta)))
    denom = d_hat + pf
    return d_delta / denom, pf / denom


def mvt_error_bound(law: DiffusionLaw, u_lo: float, u_hi: float,
                    spread: float, c_tilde: float,
                    samples: int = 1001) -> float:
    """Diagnostic bound on the perimeter-averaging approximation error.

    ``0.5 * sup |D'| * spread^2 / c_tilde`` with the sup taken over
    ``[u_lo, u_hi]``; quadratic in the perimeter spread and zero for
    constant laws.
    """
    if spread < 0.0:
        raise ValueError("spread must be non-negative")
    if c_tilde <= 0.0:
        raise ValueError("c_tilde must be positive")
    u = np.linspace(u_lo, u_hi, samples)
    sup_dprime = float(np.max(np.abs(law.deriv(u))))
    return 0.5 * sup_dprime * spread ** 2 / c_tilde


def neighbor_error_bound(tube_radius: float, centerline_distance: float) -> float:
    """Far-tube contribution bound ``R^2 / (4 pi (d - R)^2)``.

    ``d`` is the distance from the evaluation point to the neighbor tube
    centerline; tubes must not overlap.
    """
    if centerline_distance <= tube_radius:
        raise ValueError("neighbor centerline distance must exceed the radius")
    return tube_radius ** 2 / (
        4.0 * np.pi * (centerline_distance - tube_radius) ** 2)

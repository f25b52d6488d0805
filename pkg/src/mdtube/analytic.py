"""Exact and semi-analytical reference solutions.

Single straight tube: closed-form radial profile of the transformed
variable. Multiple parallel tubes: superposition of regularized
logarithmic profiles whose interface values are found by a dense Newton
iteration over perimeter-average conditions. Two averaging variants are
supported: averaging the untransformed unknown (``variant="u"``) or the
transformed variable (``variant="psi"``); the latter is the solution the
distributed-source scheme converges to.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .laws import DiffusionLaw
from .reconstruction import kernel_profile_f


@dataclass(frozen=True)
class TubeSpec:
    """One parallel tube cut perpendicularly by the 2D plane."""

    center: tuple[float, float]
    tube_radius: float
    kernel_radius: float
    gamma: float
    u_e: float

    @property
    def perimeter(self) -> float:
        return 2.0 * np.pi * self.tube_radius


@dataclass
class SingleTubeSolution:
    """Radial solution around an infinite straight tube."""

    tube_radius: float
    kernel_radius: float
    gamma: float
    u_e: float
    u_hat: float            # interface unknown
    law: DiffusionLaw

    def __post_init__(self):
        self.psi_hat = float(self.law.transform(np.float64(self.u_hat)))
        self.q = (-2.0 * np.pi * self.tube_radius * self.gamma
                  * (self.u_hat - self.u_e))

    def psi(self, r):
        # the profile is normalized so that the line-source limit is zero
        # at the tube wall, hence psi(R)|_{rho=R} = psi_hat
        f = kernel_profile_f(r, self.tube_radius, self.kernel_radius)
        return self.psi_hat - self.q * f

    def u(self, r):
        return self.law.inverse_transform(self.psi(r))


def _perimeter_points(tube: TubeSpec, k_ip: int) -> np.ndarray:
    theta = 2.0 * np.pi * np.arange(k_ip) / k_ip
    return (np.asarray(tube.center)
            + tube.tube_radius * np.stack([np.cos(theta), np.sin(theta)],
                                          axis=-1))


@dataclass
class MultiTubeSolution:
    """Superposition solution for parallel tubes in the plane.

    ``u_hat`` are the interface unknowns, ``q`` the per-unit-length
    sources and ``c_psi`` the additive harmonic constant.
    """

    tubes: tuple[TubeSpec, ...]
    law: DiffusionLaw
    u_hat: np.ndarray
    c_psi: float
    variant: str            # "u" | "psi"
    k_ip: int
    residual_norm: float = field(default=np.nan)

    @property
    def q(self) -> np.ndarray:
        return np.array([-t.perimeter * t.gamma * (uh - t.u_e)
                         for t, uh in zip(self.tubes, self.u_hat)])

    def psi(self, points):
        """Transformed field at (n, 2) points (or a single point)."""
        pts = np.atleast_2d(np.asarray(points, float))
        out = np.full(len(pts), self.c_psi)
        for tube, q in zip(self.tubes, self.q):
            d = np.linalg.norm(pts - np.asarray(tube.center), axis=-1)
            out -= q * kernel_profile_f(d, tube.tube_radius,
                                        tube.kernel_radius)
        return out if np.asarray(points).ndim > 1 else float(out[0])

    def u(self, points):
        return self.law.inverse_transform(self.psi(points))

    def residuals(self, k_ip: int | None = None) -> np.ndarray:
        """Perimeter-average residuals, re-evaluated at ``k_ip`` points."""
        k_ip = k_ip or self.k_ip
        res = np.empty(len(self.tubes))
        q = self.q
        for i, tube in enumerate(self.tubes):
            pts = _perimeter_points(tube, k_ip)
            # the interface averages live on the line-source field, whose
            # own-tube log contribution vanishes on the tube wall; only
            # the neighbor terms and the constant remain
            psi = np.full(k_ip, self.c_psi)
            for j, other in enumerate(self.tubes):
                if j == i:
                    continue
                d = np.linalg.norm(pts - np.asarray(other.center), axis=-1)
                psi -= q[j] * kernel_profile_f(d, other.tube_radius,
                                               other.kernel_radius)
            if self.variant == "u":
                avg = float(np.mean(self.law.inverse_transform(psi)))
            else:
                avg = float(self.law.inverse_transform(
                    np.float64(np.mean(psi))))
            res[i] = self.u_hat[i] - avg
        return res


class AnalyticSolveError(RuntimeError):
    pass


def solve_multi_tube(tubes, law: DiffusionLaw, anchor: tuple[int, float],
                     variant: str = "u", k_ip: int = 64,
                     tol: float = 1e-12, max_iter: int = 100,
                     fd_step: float = 1e-7) -> MultiTubeSolution:
    """Find interface values and the harmonic constant by dense Newton.

    One interface unknown is pinned by ``anchor = (tube index, value)``;
    the remaining unknowns plus the constant make the square system of
    perimeter-average conditions. The dense Jacobian is approximated by
    forward differences.
    """
    tubes = tuple(tubes)
    n = len(tubes)
    if variant not in ("u", "psi"):
        raise ValueError("variant must be 'u' or 'psi'")
    anchor_idx, anchor_val = anchor
    free = [i for i in range(n) if i != anchor_idx]
    pts = [_perimeter_points(t, k_ip) for t in tubes]

    def unpack(z):
        u_hat = np.empty(n)
        u_hat[anchor_idx] = anchor_val
        u_hat[free] = z[1:]
        return float(z[0]), u_hat

    def residual(z):
        c_psi, u_hat = unpack(z)
        q = np.array([-t.perimeter * t.gamma * (uh - t.u_e)
                      for t, uh in zip(tubes, u_hat)])
        res = np.empty(n)
        for i, tube in enumerate(tubes):
            # line-source field on the perimeter of tube i: the self
            # contribution is log(R_i/R_i) = 0 and is skipped
            psi = np.full(k_ip, c_psi)
            for j, other in enumerate(tubes):
                if j == i:
                    continue
                d = np.linalg.norm(pts[i] - np.asarray(other.center), axis=-1)
                psi -= q[j] * kernel_profile_f(d, other.tube_radius,
                                               other.kernel_radius)
            if variant == "u":
                avg = float(np.mean(law.inverse_transform(psi)))
            else:
                avg = float(law.inverse_transform(np.float64(np.mean(psi))))
            res[i] = u_hat[i] - avg
        return res

    # initial guess: interface values at the tube unknowns, constant from
    # the anchor transform
    z = np.empty(n)
    z[0] = float(law.transform(np.float64(anchor_val)))
    z[1:] = [tubes[i].u_e for i in free]

    history = []
    r = residual(z)
    for _ in range(max_iter):
        norm = float(np.max(np.abs(r)))
        history.append(norm)
        if norm < tol:
            break
        jac = np.empty((n, n))
        for col in range(n):
            step = fd_step * max(1.0, abs(z[col]))
            zp = z.copy()
            zp[col] += step
            jac[:, col] = (residual(zp) - r) / step
        try:
            dz = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError as exc:
            raise AnalyticSolveError(
                f"singular dense Jacobian; residual history {history}"
            ) from exc
        alpha = 1.0
        for _ in range(30):
            r_new = residual(z + alpha * dz)
            if np.max(np.abs(r_new)) < norm or alpha < 1e-6:
                break
            alpha *= 0.5
        z = z + alpha * dz
        r = r_new
    else:
        raise AnalyticSolveError(
            f"dense Newton did not converge; residual history {history}")

    c_psi, u_hat = unpack(z)
    return MultiTubeSolution(tubes=tubes, law=law, u_hat=u_hat, c_psi=c_psi,
                             variant=variant, k_ip=k_ip,
                             residual_norm=float(np.max(np.abs(r))))

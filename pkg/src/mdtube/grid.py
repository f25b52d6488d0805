"""Structured axis-aligned grids with cell-centered TPFA machinery.

Supports three modes: ``radial`` (1D in the cylinder radius, annular cell
measures per unit length), ``2d`` (unit depth) and ``3d``. Cells are
uniform per axis; faces carry two-point flux approximations with harmonic
averaging of the cell-centered diffusion coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Side = tuple[int, int]  # (axis, 0=low / 1=high)


@dataclass
class BulkGrid:
    dimension: str                  # "radial" | "2d" | "3d"
    origin: np.ndarray
    extents: np.ndarray
    shape: tuple[int, ...]

    def __post_init__(self):
        ndim = {"radial": 1, "2d": 2, "3d": 3}[self.dimension]
        self.origin = np.asarray(self.origin, float).reshape(ndim)
        self.extents = np.asarray(self.extents, float).reshape(ndim)
        self.shape = tuple(int(n) for n in np.atleast_1d(self.shape))
        if len(self.shape) != ndim or any(n < 1 for n in self.shape):
            raise ValueError("grid shape does not match dimension")
        if np.any(self.extents <= 0.0):
            raise ValueError("extents must be positive")
        self.spacing = self.extents / np.array(self.shape)
        self.n_cells = int(np.prod(self.shape))
        self._build_geometry()

    # -- geometry ----------------------------------------------------------

    def _axis_centers(self, axis: int) -> np.ndarray:
        h = self.spacing[axis]
        return self.origin[axis] + h * (np.arange(self.shape[axis]) + 0.5)

    def _build_geometry(self):
        ndim = len(self.shape)
        axes = [self._axis_centers(a) for a in range(ndim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        self.cell_centers = np.stack([m.ravel() for m in mesh], axis=-1)

        if self.dimension == "radial":
            r = self.cell_centers[:, 0]
            self.volumes = 2.0 * np.pi * r * self.spacing[0]
        else:
            self.volumes = np.full(self.n_cells, float(np.prod(self.spacing)))

        self._build_faces()

    def _face_area(self, axis: int, coords: np.ndarray) -> np.ndarray:
        """Area of a face normal to ``axis`` located at the given centers.

        ``coords`` holds the face center coordinates, one row per face.
        """
        if self.dimension == "radial":
            return 2.0 * np.pi * coords[:, 0]
        if self.dimension == "2d":
            other = 1 - axis
            return np.full(len(coords), self.spacing[other])
        others = [a for a in range(3) if a != axis]
        return np.full(len(coords),
                       self.spacing[others[0]] * self.spacing[others[1]])

    def _build_faces(self):
        ndim = len(self.shape)
        left, right, areas, dists = [], [], [], []
        b_cell, b_area, b_dist, b_side, b_center = [], [], [], [], []

        idx = np.arange(self.n_cells).reshape(self.shape)
        for axis in range(ndim):
            h = self.spacing[axis]
            # interior faces
            lo = np.moveaxis(idx, axis, 0)[:-1].ravel()
            hi = np.moveaxis(idx, axis, 0)[1:].ravel()
            centers = 0.5 * (self.cell_centers[lo] + self.cell_centers[hi])
            left.append(lo)
            right.append(hi)
            areas.append(self._face_area(axis, centers))
            dists.append(np.full(lo.shape, h))
            # boundary faces
            for side, sl in ((0, 0), (1, -1)):
                cells = np.moveaxis(idx, axis, 0)[sl].ravel()
                centers = self.cell_centers[cells].copy()
                centers[:, axis] = (self.origin[axis]
                                    + (self.extents[axis] if side else 0.0))
                b_cell.append(cells)
                b_area.append(self._face_area(axis, centers))
                b_dist.append(np.full(cells.shape, 0.5 * h))
                b_side.append(np.full(cells.shape, 2 * axis + side))
                b_center.append(centers)

        self.face_left = np.concatenate(left)
        self.face_right = np.concatenate(right)
        self.face_area = np.concatenate(areas)
        self.face_dist = np.concatenate(dists)
        self.bface_cell = np.concatenate(b_cell)
        self.bface_area = np.concatenate(b_area)
        self.bface_dist = np.concatenate(b_dist)
        self.bface_side = np.concatenate(b_side)
        self.bface_center = np.concatenate(b_center)

    # -- lookup ------------------------------------------------------------

    def cells_containing(self, point: np.ndarray) -> np.ndarray:
        """Indices of all cells whose closure contains ``point``.

        A point on a face or corner belongs to every adjacent cell; the
        reconstruction sampling averages over this stencil so that points
        on cell boundaries are treated symmetrically.
        """
        point = np.asarray(point, float)
        per_axis = []
        for a, x in enumerate(point):
            h = self.spacing[a]
            t = (x - self.origin[a]) / h
            i = int(np.floor(t + 1e-12))
            cand = {i}
            if abs(t - round(t)) < 1e-9 * max(1.0, abs(t)) + 1e-12:
                cand.update({int(round(t)) - 1, int(round(t))})
            cand = sorted(c for c in cand if 0 <= c < self.shape[a])
            if not cand:
                raise ValueError(f"point {point} outside grid along axis {a}")
            per_axis.append(cand)
        mesh = np.meshgrid(*per_axis, indexing="ij")
        multi = [m.ravel() for m in mesh]
        return np.ravel_multi_index(multi, self.shape)

    def cell_bounds(self, cell: int) -> tuple[np.ndarray, np.ndarray]:
        multi = np.unravel_index(cell, self.shape)
        lo = self.origin + np.array(multi) * self.spacing
        return lo, lo + self.spacing


@dataclass
class DiscreteField:
    grid: BulkGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, float).reshape(self.grid.n_cells)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite entries")


def assemble_flux_jacobian(grid: BulkGrid, law, u: np.ndarray,
                           dirichlet: dict[int, np.ndarray] | None = None):
    """TPFA residual and Jacobian triplets for -div(D(u) grad u).

    Parameters
    ----------
    dirichlet : dict side-id -> boundary values
        Values at boundary face centers for Dirichlet sides (side ids are
        ``2*axis + (0 low | 1 high)``); absent sides are zero-flux.

    Returns
    -------
    res : ndarray (n_cells,)
        Sum of outward fluxes per cell (no sources).
    rows, cols, vals : ndarrays
        COO triplets of the Jacobian of ``res``.
    """
    u = np.asarray(u, float)
    d = np.asarray(law.eval(u), float)
    dp = np.asarray(law.deriv(u), float)

    res = np.zeros(grid.n_cells)
    rows, cols, vals = [], [], []

    il, ir = grid.face_left, grid.face_right
    tf = grid.face_area / grid.face_dist
    dl, dr = d[il], d[ir]
    s = dl + dr
    df = 2.0 * dl * dr / s
    du = u[ir] - u[il]
    flux = -df * tf * du          # flux out of left cell
    np.add.at(res, il, flux)
    np.add.at(res, ir, -flux)

    ddf_dl = 2.0 * (dr / s) ** 2 * dp[il]
    ddf_dr = 2.0 * (dl / s) ** 2 * dp[ir]
    dflux_dul = -ddf_dl * tf * du + df * tf
    dflux_dur = -ddf_dr * tf * du - df * tf
    rows += [il, il, ir, ir]
    cols += [il, ir, il, ir]
    vals += [dflux_dul, dflux_dur, -dflux_dul, -dflux_dur]

    if dirichlet:
        for side, values in dirichlet.items():
            mask = grid.bface_side == side
            c = grid.bface_cell[mask]
            tb = grid.bface_area[mask] / grid.bface_dist[mask]
            ub = np.asarray(values, float)
            db = np.asarray(law.eval(ub), float)
            dc = d[c]
            sb = dc + db
            dfb = 2.0 * dc * db / sb
            dub = ub - u[c]
            fb = -dfb * tb * dub
            np.add.at(res, c, fb)
            ddfb_dc = 2.0 * (db / sb) ** 2 * dp[c]
            dfb_duc = -ddfb_dc * tb * dub + dfb * tb
            rows.append(c)
            cols.append(c)
            vals.append(dfb_duc)

    return (res, np.concatenate(rows), np.concatenate(cols),
            np.concatenate(vals))


def bulk_l2_error(grid: BulkGrid, u_h: np.ndarray, reference: np.ndarray,
                  ref_value: float = 1.0) -> float:
    """Relative volume-weighted discrete L2 error against cell-center data."""
    dev = np.asarray(u_h, float) - np.asarray(reference, float)
    mean_sq = np.sum(grid.volumes * dev ** 2) / np.sum(grid.volumes)
    return float(np.sqrt(mean_sq) / ref_value)


def source_l2_error(q_h: np.ndarray, q_exact: np.ndarray,
                    ref_value: float | None = None) -> float:
    """Relative segment-mean L2 error of integrated sources."""
    q_h = np.asarray(q_h, float)
    q_exact = np.asarray(q_exact, float)
    if ref_value is None:
        ref_value = float(np.max(np.abs(q_exact)))
    if ref_value == 0.0:
        raise ZeroDivisionError("source reference value is zero")
    return float(np.sqrt(np.mean((q_h - q_exact) ** 2)) / ref_value)


def observed_orders(h: np.ndarray, errors: np.ndarray) -> np.ndarray:
    """log2 convergence orders between consecutive refinement levels."""
    h = np.asarray(h, float)
    errors = np.asarray(errors, float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (np.log(errors[:-1] / errors[1:])
                / np.log(h[:-1] / h[1:]))

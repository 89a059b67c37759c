"""Lattice algorithms for the exponential-kernel TLCE at any lag.

A regular lattice in the G-plane is scanned twice: at h = 0 for sign changes of F1
(the borderline), and over h in [0, h_max] for the roots of F1 (the domain). Each
(G, h) pair maps to z = F2(G, h); the density follows from the Jacobian of the
bilinearly interpolated map.
"""
from __future__ import annotations

import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy import ndimage

from src.covariance.kernels import exponential_kernel_params
from src.errors import BranchAnomalyError, GridMissError, NegativeDensityError, ParameterError
from src.numerics.contour import INSIDE_TOL
from src.numerics.polynomial import poly_roots_batch
from src.spectra.density import DensityCurve
from src.theory.tm3 import critical_ratio, tm3_F_from_roots, tm3_crossings, tm3_factor_roots, tm3_w_coeffs
from src.theory.types import Borderline, GridSolution

logger = logging.getLogger(__name__)

Bounds = Tuple[float, float, float, float]

TOLERANCE_FACTOR = 1e-3
H_POINTS = 96
H_MAX_FACTOR = 2.0
BOUND_MARGIN = 1.25
BISECT_STEPS = 52
CHUNK = 1024
CLAMP_FRACTION = 1e-6
DROP_LIMIT = 0.05
SINGULAR_TOL = 1e-14


def default_bounds(r: float, sigma: float, tau: float) -> Bounds:
    """Square G-lattice covering the domain; widened by the t = 1 analytics when they apply."""
    half = 4.0 / (sigma ** 2 * math.sqrt(r * (1.0 + r)))
    if 0 < r < 1:
        a1, a2, _ = exponential_kernel_params(sigma, tau)
        try:
            half = max(half, 1.2 * max(abs(v) for v in tm3_crossings(r, sigma, tau)["X"]))
        except ArithmeticError:
            pass
        if r > critical_ratio(tau):
            q = r * (1.0 - r)
            half = max(half, 1.2 * (-1.0 + 2.0 * r + math.sqrt(max(0.0, 1.0 - q * a2 * a2))) / (q * a1))
    return (-half, half, -half, half)


def _lattice(bounds: Bounds, resolution: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    if resolution < 5:
        raise ParameterError(f"lattice resolution must be at least 5, got {resolution}")
    x0, x1, y0, y1 = bounds
    if not (x1 > x0 and y1 > y0):
        raise ParameterError(f"empty lattice bounds {bounds}")
    xs = np.linspace(x0, x1, resolution)
    ys = np.linspace(y0, y1, resolution)
    return xs, ys, xs[None, :] + 1j * ys[:, None]


def _evaluate(G: np.ndarray, h: np.ndarray, r: float, a1: float, a2: float, t: int) -> Tuple[np.ndarray, np.ndarray]:
    """F1, F2 for flat arrays of (G, h); NaN where the inside count is not t + 1 or a root pinches C(0, 1)."""
    f1 = np.full(G.size, np.nan)
    f2 = np.full(G.size, np.nan, dtype=complex)
    ok = np.abs(G) > 0
    for start in range(0, G.size, CHUNK):
        sl = slice(start, start + CHUNK)
        idx = np.flatnonzero(ok[sl]) + start
        if idx.size == 0:
            continue
        g, hh = G[idx], h[idx]
        if np.all(hh == 0):
            roots = tm3_factor_roots(g, r, a1, a2, t)
        else:
            roots = poly_roots_batch(tm3_w_coeffs(g, hh, r, a1, a2, t))
        mod = np.abs(roots)
        inside = mod < 1.0
        valid = (inside.sum(axis=1) == t + 1) & ~np.any(np.abs(mod - 1.0) <= INSIDE_TOL, axis=1)
        if not np.any(valid):
            continue
        a, b = tm3_F_from_roots(g[valid], hh[valid], roots[valid], inside[valid], r, a1, a2, t)
        f1[idx[valid]] = a
        f2[idx[valid]] = b
    return f1, f2


def tm3_borderline_grid(
    r: float,
    sigma: float,
    tau: float,
    t: int,
    bounds: Optional[Bounds] = None,
    resolution: int = 121,
) -> Borderline:
    """Borderline traced on a G-lattice: zeros of F1(G, 0) mapped by F2.

    Zeros are located by sign changes between lattice neighbours and linear
    interpolation; crossings that do not shrink |F1| are pole jumps and are dropped.
    The component reaching farthest in z is labelled external (0), the rest internal (1).

    Raises:
        GridMissError: when no crossing is found inside the bounds.
    """
    if t < 1:
        raise ParameterError(f"lag t must be at least 1, got {t}")
    a1, a2, _ = exponential_kernel_params(sigma, tau)
    bounds = bounds or default_bounds(r, sigma, tau)
    xs, ys, lattice = _lattice(bounds, resolution)
    f, _ = _evaluate(lattice.ravel(), np.zeros(lattice.size), r, a1, a2, t)
    f = f.reshape(lattice.shape)
    finite = np.isfinite(f)
    if not np.any(finite):
        raise GridMissError()
    tol = TOLERANCE_FACTOR * float(np.median(np.abs(f[finite])))

    cand_g, cand_scale, cand_cells = [], [], []
    for axis in (0, 1):
        fa = f[:-1, :] if axis == 0 else f[:, :-1]
        fb = f[1:, :] if axis == 0 else f[:, 1:]
        ga = lattice[:-1, :] if axis == 0 else lattice[:, :-1]
        gb = lattice[1:, :] if axis == 0 else lattice[:, 1:]
        hit = np.isfinite(fa) & np.isfinite(fb) & (np.sign(fa) != np.sign(fb))
        iy, ix = np.nonzero(hit)
        w = fa[hit] / (fa[hit] - fb[hit])
        cand_g.append(ga[hit] + w * (gb[hit] - ga[hit]))
        cand_scale.append(np.maximum(np.abs(fa[hit]), np.abs(fb[hit])))
        cand_cells.append(np.stack([iy, ix, iy + (axis == 0), ix + (axis == 1)], axis=1))
    small = finite & (np.abs(f) < tol)
    iy, ix = np.nonzero(small)
    cand_g.append(lattice[small])
    cand_scale.append(np.full(iy.size, np.inf))
    cand_cells.append(np.stack([iy, ix, iy, ix], axis=1))

    g = np.concatenate(cand_g)
    scale = np.concatenate(cand_scale)
    cells = np.concatenate(cand_cells)
    if g.size == 0:
        raise GridMissError()
    f_mid, z = _evaluate(g, np.zeros(g.size), r, a1, a2, t)
    keep = np.isfinite(f_mid) & (np.abs(f_mid) <= 0.5 * scale)
    g, z, cells = g[keep], z[keep], cells[keep]
    if g.size == 0:
        raise GridMissError()

    mask = np.zeros(lattice.shape, dtype=bool)
    mask[cells[:, 0], cells[:, 1]] = True
    mask[cells[:, 2], cells[:, 3]] = True
    labels, count = ndimage.label(mask, structure=np.ones((3, 3), dtype=int))
    comp = labels[cells[:, 0], cells[:, 1]]
    reach = {c: float(np.max(np.abs(z[comp == c]))) for c in np.unique(comp)}
    outer = max(reach, key=reach.get)
    branch = np.where(comp == outer, 0, 1)
    cell = (xs[1] - xs[0], ys[1] - ys[0])
    meta = {
        "r": r,
        "sigma": sigma,
        "tau": tau,
        "t": t,
        "tolerance": tol,
        "components": int(count),
        "cell": cell,
        "bounds": bounds,
        "resolution": resolution,
        "g_points": g,
    }
    logger.info("tm3_borderline_grid r=%.4g tau=%.4g t=%d points=%d components=%d tolerance=%.3e", r, tau, t, g.size, count, tol)
    return Borderline("grid_trace", points=z, branch=branch, metadata=meta)


def h_upper_bound(G: np.ndarray, r: float, sigma: float, tau: float, h_factor: float = H_MAX_FACTOR) -> np.ndarray:
    """Upper end of the h-scan at each G.

    F1 = 0 reads int dp (|G|^2 + h) / (|G - v(p)|^2 + h) = r with |v(p)| <= V^(1/2),
    V = 1 / (r sigma^2 tanh(1/2tau))^2, so for r < 1 every root obeys
    h <= 2r(|G|^2 + V) / (1 - r). Wider ratios use h_factor (|G|^2 + V).
    """
    v2 = 1.0 / (r * sigma ** 2 * math.tanh(0.5 / tau)) ** 2
    factor = max(h_factor, BOUND_MARGIN * 2.0 * r / (1.0 - r)) if r < 1 else h_factor
    return factor * (np.abs(G) ** 2 + v2)


def _h_roots(G: np.ndarray, r: float, a1: float, a2: float, t: int, h_max: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """h-roots of F1(G, h) = 0 per lattice point, (n, 2) ascending with NaN padding.

    Also returns whether F1 changes sign between h = 0 and h_max, i.e. whether a
    partner root has left through h = 0.
    """
    n = G.size
    frac = np.concatenate([[0.0], np.geomspace(1e-10, 1.0, H_POINTS - 1)])
    h = h_max[:, None] * frac[None, :]
    f, _ = _evaluate(np.repeat(G, H_POINTS), h.ravel(), r, a1, a2, t)
    f = f.reshape(n, H_POINTS)
    hit = np.isfinite(f[:, :-1]) & np.isfinite(f[:, 1:]) & (np.sign(f[:, :-1]) != np.sign(f[:, 1:]))
    odd = np.isfinite(f[:, 0]) & (np.sign(f[:, 0]) != np.sign(f[:, -1]))
    out = np.full((n, 2), np.nan)
    rows, cols = np.nonzero(hit)
    if rows.size == 0:
        return out, odd
    lo, hi = h[rows, cols], h[rows, cols + 1]
    f_lo = f[rows, cols]
    for _ in range(BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        f_mid, _ = _evaluate(G[rows], mid, r, a1, a2, t)
        left = np.sign(f_mid) == np.sign(f_lo)
        lo = np.where(left, mid, lo)
        f_lo = np.where(left, f_mid, f_lo)
        hi = np.where(left, hi, mid)
    found = 0.5 * (lo + hi)
    slot = np.arange(rows.size) - np.searchsorted(rows, rows)
    if slot.max() > 1:
        i = int(rows[np.argmax(slot)])
        raise BranchAnomalyError(complex(G[i]), [float(v) for v in found[rows == i]])
    out[rows, slot] = found
    return out, odd


def _assign_branches(roots: np.ndarray, odd: np.ndarray) -> np.ndarray:
    """Split (ny, nx, 2) ascending h-roots into two continuous sheets.

    Two-root points fill both sheets, the smaller root on sheet 0 (the sheet that
    reaches h = 0 on the borderline). Single roots join the sheet whose neighbouring
    values they continue, propagating outward from assigned points; a cluster with
    no assigned neighbour is seeded from the sign of F1 at the ends of the scan: a
    root whose partner left through h = 0 belongs to sheet 1.
    """
    ny, nx, _ = roots.shape
    sheets = np.full((ny, nx, 2), np.nan)
    count = np.sum(np.isfinite(roots), axis=2)
    two = count == 2
    sheets[two] = roots[two]
    pending = {(iy, ix) for iy, ix in zip(*np.nonzero(count == 1))}
    while pending:
        placed = []
        for iy, ix in pending:
            win = sheets[max(iy - 1, 0): iy + 2, max(ix - 1, 0): ix + 2]
            known = [win[..., b][np.isfinite(win[..., b])] for b in (0, 1)]
            if known[0].size == 0 and known[1].size == 0:
                continue
            v = roots[iy, ix, 0]
            dist = [abs(v - k.mean()) if k.size else np.inf for k in known]
            placed.append((iy, ix, int(np.argmin(dist)), v))
        if not placed:
            iy, ix = min(pending)
            placed.append((iy, ix, int(odd[iy, ix]), roots[iy, ix, 0]))
        for iy, ix, b, v in placed:
            sheets[iy, ix, b] = v
            pending.discard((iy, ix))
    return sheets


def tm3_solve_lattice(
    r: float,
    sigma: float,
    tau: float,
    t: int,
    bounds: Optional[Bounds] = None,
    resolution: int = 121,
    h_factor: float = H_MAX_FACTOR,
) -> GridSolution:
    """h-roots and z-images on a G-lattice, split into two sheets.

    Raises:
        BranchAnomalyError: when a lattice point carries three or more h-roots.
    """
    if t < 1:
        raise ParameterError(f"lag t must be at least 1, got {t}")
    a1, a2, _ = exponential_kernel_params(sigma, tau)
    bounds = bounds or default_bounds(r, sigma, tau)
    xs, ys, lattice = _lattice(bounds, resolution)
    flat = lattice.ravel()
    roots, odd = _h_roots(flat, r, a1, a2, t, h_upper_bound(flat, r, sigma, tau, h_factor))
    roots = roots.reshape(lattice.shape + (2,))
    counts = np.sum(np.isfinite(roots), axis=2)
    sheets = _assign_branches(roots, odd.reshape(lattice.shape))
    z = np.full(sheets.shape, np.nan, dtype=complex)
    for b in (0, 1):
        ok = np.isfinite(sheets[..., b])
        if np.any(ok):
            _, z_b = _evaluate(lattice[ok], sheets[..., b][ok], r, a1, a2, t)
            z[..., b][ok] = z_b
    meta = {"r": r, "sigma": sigma, "tau": tau, "t": t, "bounds": bounds, "resolution": resolution, "xs": xs, "ys": ys, "h_factor": h_factor}
    logger.info("tm3_solve_lattice r=%.4g tau=%.4g t=%d domain_points=%d two_root_points=%d", r, tau, t, int((counts > 0).sum()), int((counts == 2).sum()))
    return GridSolution(lattice, sheets, z, counts, meta)


def _refined_cells(z: np.ndarray, dx: float, dy: float, refine: int):
    """Sub-cell centers, Jacobians and signed masses for one sheet (ny, nx)."""
    ok = np.isfinite(z)
    full = ok[:-1, :-1] & ok[1:, :-1] & ok[:-1, 1:] & ok[1:, 1:]
    iy, ix = np.nonzero(full)
    z00, z10 = z[iy, ix], z[iy, ix + 1]
    z01, z11 = z[iy + 1, ix], z[iy + 1, ix + 1]
    s = (np.arange(refine) + 0.5) / refine
    u = np.tile(s, refine)[None, :]
    v = np.repeat(s, refine)[None, :]
    z00, z10, z01, z11 = (c[:, None] for c in (z00, z10, z01, z11))
    pts = (1 - u) * (1 - v) * z00 + u * (1 - v) * z10 + (1 - u) * v * z01 + u * v * z11
    dzx = ((1 - v) * (z10 - z00) + v * (z11 - z01)) / dx
    dzy = ((1 - u) * (z01 - z00) + u * (z11 - z10)) / dy
    return pts.ravel(), dzx.ravel(), dzy.ravel()


def tm3_density_grid(
    r: float,
    sigma: float,
    tau: float,
    t: int,
    bounds: Optional[Bounds] = None,
    resolution: int = 121,
    refine: int = 5,
    nbins: int = 100,
    extent: Optional[Bounds] = None,
    solution: Optional[GridSolution] = None,
) -> DensityCurve:
    """Gridded density from the lattice solution.

    Each sub-cell of a fully interior lattice cell carries mass rho * |det J| dX dY,
    rho = (1/2 pi)(dX/dx - dY/dy) from the inverted Jacobian. The imaginary part
    (1/2 pi)(dX/dy + dY/dx) must vanish; its share of the mass is reported.

    Raises:
        NegativeDensityError: when negative sub-cells beyond the clamp carry over 5% of the mass.
    """
    if refine < 1:
        raise ParameterError(f"refine must be at least 1, got {refine}")
    sol = solution or tm3_solve_lattice(r, sigma, tau, t, bounds, resolution)
    xs, ys = sol.metadata["xs"], sol.metadata["ys"]
    dX, dY = xs[1] - xs[0], ys[1] - ys[0]
    sub_area = dX * dY / refine ** 2

    pts, jx, jy = [], [], []
    for b in (0, 1):
        p, dzx, dzy = _refined_cells(sol.z[..., b], dX, dY, refine)
        pts.append(p)
        jx.append(dzx)
        jy.append(dzy)
    pts, dzx, dzy = np.concatenate(pts), np.concatenate(jx), np.concatenate(jy)
    if pts.size == 0:
        raise GridMissError()
    xX, yX, xY, yY = dzx.real, dzx.imag, dzy.real, dzy.imag
    det = xX * yY - xY * yX
    singular = np.abs(det) <= SINGULAR_TOL * max(float(np.max(np.abs(det))), 1e-300)
    # dX/dx = yY / det, dY/dy = xX / det, dX/dy = -xY / det, dY/dx = -yX / det
    weight = np.where(singular, 0.0, np.sign(det) * sub_area / (2.0 * math.pi))
    mass = (yY - xX) * weight
    imag_share = float(np.sum(np.abs((xY + yX) * weight))) / max(float(np.sum(np.abs(mass))), 1e-300)
    peak = float(np.max(np.abs(mass))) if mass.size else 0.0
    mild = (mass < 0) & (mass >= -CLAMP_FRACTION * peak)
    severe = mass < -CLAMP_FRACTION * peak
    dropped = float(-mass[severe].sum())
    total = float(mass[mass > 0].sum())
    if total <= 0 or dropped > DROP_LIMIT * total:
        raise NegativeDensityError(f"negative density carries {dropped:.4g} of {total:.4g} mass")
    mass = np.where(mild | severe, 0.0, mass)

    if extent is None:
        reach = float(np.max(np.abs(pts)))
        extent = (-reach, reach, -reach, reach)
    x0, x1, y0, y1 = extent
    hist, xe, ye = np.histogram2d(pts.real, pts.imag, bins=nbins, range=[[x0, x1], [y0, y1]], weights=mass)
    area = (xe[1] - xe[0]) * (ye[1] - ye[0])
    density = hist.T / area
    meta = {
        "solver": "tm3_lattice",
        "r": r,
        "sigma": sigma,
        "tau": tau,
        "t": t,
        "refine": refine,
        "resolution": sol.metadata["resolution"],
        "imaginary_share": imag_share,
        "singular_cells": int(singular.sum()),
        "clamped_cells": int(mild.sum()),
        "dropped_cells": int(severe.sum()),
        "dropped_mass": dropped,
        "max_h_roots": int(sol.counts.max()),
    }
    logger.info("tm3_density_grid r=%.4g tau=%.4g t=%d mass=%.5f imaginary_share=%.3e dropped=%d singular=%d", r, tau, t, float(hist.sum()), imag_share, int(severe.sum()), int(singular.sum()))
    return DensityCurve(
        "grid2d",
        0.5 * (xe[:-1] + xe[1:]),
        density,
        float(hist.sum()),
        edges=xe,
        y_centers=0.5 * (ye[:-1] + ye[1:]),
        metadata=meta,
    )

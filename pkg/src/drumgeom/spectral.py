"""Finite-difference Dirichlet Laplacian on tile domains and spectrum comparison."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm, pi

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .gallery import TileDomain

MAX_ITER = 10**4
RESIDUAL_FACTOR = 1e-8
DENSE_LIMIT = 64


class SpectralError(ValueError):
    pass


class EmptyGrid(SpectralError):
    pass


class ConvergenceFailure(RuntimeError):
    pass


class MismatchedParameters(SpectralError):
    pass


class InsufficientSpectrum(SpectralError):
    pass


def parse_step(h) -> Fraction:
    h = Fraction(h)
    if h <= 0:
        raise SpectralError(f"mesh step must be positive, got {h}")
    return h


# --- exact point location -------------------------------------------------------


def _cross(ax, ay, bx, by) -> int:
    return ax * by - ay * bx


def _locally_covered(p, u, tri) -> bool:
    """Does tri contain p + eps*u for all small eps > 0?  (p in the closed triangle.)"""
    for i in range(3):
        a, b, c = tri[i], tri[(i + 1) % 3], tri[(i + 2) % 3]
        ex, ey = b[0] - a[0], b[1] - a[1]
        side_c = _cross(ex, ey, c[0] - a[0], c[1] - a[1])
        side_p = _cross(ex, ey, p[0] - a[0], p[1] - a[1])
        if side_p == 0:
            s = _cross(ex, ey, u[0], u[1])
            if s == 0 or (s > 0) != (side_c > 0):
                return False
        elif (side_p > 0) != (side_c > 0):
            return False
    return True


def _angle_key(d):
    x, y = d
    half = 0 if (y > 0 or (y == 0 and x > 0)) else 1
    return half, Fraction(-x, abs(x) + abs(y)) if half == 0 else Fraction(x, abs(x) + abs(y))


def is_interior(p, triangles) -> bool:
    """Exact test that p lies in the interior of the union of closed triangles."""
    touching = []
    for tri in triangles:
        sides = []
        for i in range(3):
            a, b, c = tri[i], tri[(i + 1) % 3], tri[(i + 2) % 3]
            sc = _cross(b[0] - a[0], b[1] - a[1], c[0] - a[0], c[1] - a[1])
            sp_ = _cross(b[0] - a[0], b[1] - a[1], p[0] - a[0], p[1] - a[1])
            sides.append(sp_ * (1 if sc > 0 else -1))
        if min(sides) < 0:
            continue
        if min(sides) > 0:
            return True
        touching.append(tri)
    if not touching:
        return False
    # rays from p along triangle edges; every open sector between them must be covered
    rays = set()
    for tri in touching:
        for v in tri:
            if v != p:
                d = (v[0] - p[0], v[1] - p[1])
                g = gcd(d[0], d[1])
                rays.add((d[0] // g, d[1] // g))
        for i in range(3):
            a, b = tri[i], tri[(i + 1) % 3]
            if _cross(b[0] - a[0], b[1] - a[1], p[0] - a[0], p[1] - a[1]) == 0 and p not in (a, b):
                d = (b[0] - a[0], b[1] - a[1])
                g = gcd(d[0], d[1])
                rays.add((d[0] // g, d[1] // g))
                rays.add((-d[0] // g, -d[1] // g))
    rays = sorted(rays, key=_angle_key)
    for i, d1 in enumerate(rays):
        d2 = rays[(i + 1) % len(rays)]
        if len(rays) > 1 and _cross(d1[0], d1[1], d2[0], d2[1]) > 0:
            u = (d1[0] + d2[0], d1[1] + d2[1])
        else:
            u = (-d1[1], d1[0])
        if not any(_locally_covered(p, u, tri) for tri in touching):
            return False
    return True


# --- grid and matrix ----------------------------------------------------------------


@dataclass
class Grid:
    h: Fraction
    origin: tuple[Fraction, Fraction]
    nodes: list[tuple[int, int]]  # integer lattice offsets (i, j): point = origin + h*(i, j)
    index: dict[tuple[int, int], int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.nodes)

    def coordinates(self) -> np.ndarray:
        h = float(self.h)
        ox, oy = map(float, self.origin)
        return np.array([(ox + i * h, oy + j * h) for i, j in self.nodes])


def build_grid(domain: TileDomain, h) -> Grid:
    h = parse_step(h)
    verts = [v for t in domain.triangles for v in t]
    x0 = min(v[0] for v in verts)
    y0 = min(v[1] for v in verts)
    # scale so that grid steps and vertices are integers
    S = lcm(h.denominator, *(c.denominator for v in verts for c in v))
    step = h * S
    if step.denominator != 1:
        raise SpectralError("internal scaling error")
    step = int(step)
    for x, y in verts:
        if ((x - x0) / h).denominator != 1 or ((y - y0) / h).denominator != 1:
            raise SpectralError(f"vertex ({x}, {y}) is not a grid node for h = {h}")
    tris = [tuple((int((x - x0) * S), int((y - y0) * S)) for x, y in t) for t in domain.triangles]
    nx = int((max(v[0] for v in verts) - x0) / h)
    ny = int((max(v[1] for v in verts) - y0) / h)
    nodes = []
    for j in range(ny + 1):
        for i in range(nx + 1):
            p = (i * step, j * step)
            if is_interior(p, tris):
                nodes.append((i, j))
    if not nodes:
        raise EmptyGrid(f"no interior nodes at h = {h}")
    return Grid(h, (x0, y0), nodes, {n: k for k, n in enumerate(nodes)})


def discretize(domain: TileDomain, h, grid: Grid | None = None) -> sp.csr_matrix:
    """5-point stencil for -Laplace with zero Dirichlet data, scaled by 1/h^2."""
    grid = grid or build_grid(domain, h)
    index = grid.index
    rows, cols, vals = [], [], []
    for k, (i, j) in enumerate(grid.nodes):
        rows.append(k)
        cols.append(k)
        vals.append(4.0)
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            m = index.get((i + di, j + dj))
            if m is not None:
                rows.append(k)
                cols.append(m)
                vals.append(-1.0)
    n = len(grid)
    hf = float(grid.h)
    return sp.csr_matrix((np.array(vals) / hf**2, (rows, cols)), shape=(n, n))


# --- eigenvalues ----------------------------------------------------------------------


@dataclass
class Spectrum:
    eigenvalues: np.ndarray
    residuals: np.ndarray
    h: Fraction | None = None

    @property
    def k(self) -> int:
        return len(self.eigenvalues)

    def to_json(self) -> dict:
        return {
            "h": None if self.h is None else str(self.h),
            "k": self.k,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "residuals": [float(x) for x in self.residuals],
        }

    @classmethod
    def from_json(cls, doc: dict) -> Spectrum:
        h = doc.get("h")
        return cls(
            np.asarray(doc["eigenvalues"], dtype=float),
            np.asarray(doc.get("residuals", [0.0] * len(doc["eigenvalues"])), dtype=float),
            None if h is None else Fraction(h),
        )


def _norm_bound(M) -> float:
    return float(abs(M).sum(axis=1).max())


def smallest_eigenvalues(M, k: int, seed: int = 0, h=None) -> Spectrum:
    """k smallest eigenvalues (with multiplicity) of a sparse SPD matrix.

    Shift-invert Lanczos around 0 (ARPACK); tiny matrices go to a dense solver.
    """
    n = M.shape[0]
    if not 1 <= k <= n:
        raise SpectralError(f"need 1 <= k <= {n}, got {k}")
    M = sp.csr_matrix(M)
    if n <= DENSE_LIMIT or k >= n - 1:
        w, V = scipy.linalg.eigh(M.toarray())
        w, V = w[:k], V[:, :k]
    else:
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(n)
        try:
            w, V = spla.eigsh(M.tocsc(), k=k, sigma=0.0, which="LM", v0=v0, maxiter=MAX_ITER)
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceFailure(str(exc)) from exc
        order = np.argsort(w)
        w, V = w[order], V[:, order]
    res = np.linalg.norm(M @ V - V * w, axis=0) / np.linalg.norm(V, axis=0)
    bound = RESIDUAL_FACTOR * _norm_bound(M)
    if np.any(res > bound):
        raise ConvergenceFailure(f"residual {res.max():.3e} exceeds {bound:.3e}")
    return Spectrum(np.asarray(w, dtype=float), res, None if h is None else Fraction(h))


def domain_spectrum(domain: TileDomain, h, k: int, seed: int = 0) -> Spectrum:
    return smallest_eigenvalues(discretize(domain, h), k, seed=seed, h=h)


@dataclass
class Comparison:
    relative: list[float]
    max_relative: float
    refinement_ratio: float | None = None

    def to_json(self) -> dict:
        return {
            "relative_differences": self.relative,
            "max_relative_difference": self.max_relative,
            "refinement_ratio": self.refinement_ratio,
        }


def _max_rel(a: Spectrum, b: Spectrum, k: int) -> list[float]:
    if a.h != b.h:
        raise MismatchedParameters(f"grid steps differ: {a.h} vs {b.h}")
    if k > min(a.k, b.k):
        raise MismatchedParameters(f"k = {k} but spectra have {a.k} and {b.k} values")
    x, y = a.eigenvalues[:k], b.eigenvalues[:k]
    return (np.abs(x - y) / x).tolist()


def compare_spectra(a: Spectrum, b: Spectrum, k: int | None = None, coarse: tuple[Spectrum, Spectrum] | None = None) -> Comparison:
    """Relative differences |a_i - b_i| / a_i; with ``coarse`` spectra at step 2h,
    also max difference at 2h divided by max difference at h."""
    k = min(a.k, b.k) if k is None else k
    rel = _max_rel(a, b, k)
    out = Comparison(rel, max(rel))
    if coarse is not None:
        ca, cb = coarse
        if ca.h is None or a.h is None or ca.h != 2 * a.h:
            raise MismatchedParameters("coarse spectra must use step 2h")
        coarse_max = max(_max_rel(ca, cb, k))
        out.refinement_ratio = coarse_max / out.max_relative if out.max_relative > 0 else float("inf")
    return out


# --- Weyl's law ---------------------------------------------------------------------------


@dataclass
class WeylFit:
    ratio: float
    slope: float
    expected_slope: float
    window: tuple[float, float]
    ratio_two_term: float

    def to_json(self) -> dict:
        return {
            "ratio": self.ratio,
            "slope": self.slope,
            "expected_slope": self.expected_slope,
            "window": list(self.window),
            "ratio_with_boundary_term": self.ratio_two_term,
        }


def weyl_check(s: Spectrum | np.ndarray, area) -> WeylFit:
    """Slope of the counting function N(x) over the upper half of the computed range,
    relative to the planar Weyl constant area / (4 pi).

    N is sampled at the eigenvalues (N(lambda_i) = i).  ``ratio_two_term`` refits with
    an extra sqrt(x) column, which absorbs the perimeter correction.
    """
    ev = np.sort(np.asarray(s.eigenvalues if isinstance(s, Spectrum) else s, dtype=float))
    if len(ev) < 8:
        raise InsufficientSpectrum(f"need at least 8 eigenvalues, got {len(ev)}")
    top = ev[-1]
    counts = np.arange(1, len(ev) + 1)
    mask = ev >= top / 2
    x, y = ev[mask], counts[mask]
    if len(x) < 4 or np.ptp(x) == 0:
        raise InsufficientSpectrum("upper half of the spectrum is too short to fit")
    expected = float(Fraction(area)) / (4 * pi)
    slope = float(np.polyfit(x, y, 1)[0])
    design = np.column_stack([x, np.sqrt(x), np.ones_like(x)])
    coef = np.linalg.lstsq(design, y, rcond=None)[0]
    return WeylFit(slope / expected, slope, expected, (float(x[0]), float(x[-1])), float(coef[0]) / expected)


def rectangle_eigenvalues(a, b, xmax: float) -> np.ndarray:
    """Exact Dirichlet eigenvalues pi^2 (j^2/a^2 + k^2/b^2) <= xmax of an a x b rectangle."""
    a, b = float(a), float(b)
    out = []
    j = 1
    while (pi * j / a) ** 2 <= xmax:
        k = 1
        while (pi * j / a) ** 2 + (pi * k / b) ** 2 <= xmax:
            out.append((pi * j / a) ** 2 + (pi * k / b) ** 2)
            k += 1
        j += 1
    return np.sort(np.array(out))

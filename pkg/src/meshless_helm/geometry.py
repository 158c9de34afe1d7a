"""Domains, boundary and source points, and the inflated-domain lattice.

Points are numpy arrays of shape ``(m, dim)``.  Membership tests are
vectorized and treat domains as closed sets.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, GeometryError

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))
_STAR_SEGMENTS = 1024


def _points(p, dim):
    p = np.asarray(p, dtype=np.float64)
    if p.ndim == 1:
        p = p[None, :]
    if p.ndim != 2 or p.shape[1] != dim:
        raise DomainError(f"expected points of dimension {dim}, got shape {p.shape}")
    return p


class Domain:
    dim = 2

    def contains(self, p):
        """Closed membership for an array of points; returns a bool array."""
        raise NotImplementedError

    def box_intersects(self, lo, hi):
        """Whether each closed box ``[lo[i], hi[i]]`` meets the domain."""
        raise NotImplementedError

    def bounding_box(self):
        raise NotImplementedError

    def boundary_points(self, n_points):
        raise NotImplementedError

    def inflate_contains(self, delta, p):
        """Membership in the Minkowski sum with the cube ``delta [-1, 1]^dim``."""
        p = _points(p, self.dim)
        return self.box_intersects(p - delta, p + delta)

    def project(self, p):
        """Map points to the closed domain: points inside are unchanged, points
        outside move to the boundary (nearest point for convex kinds, radial
        projection for star domains)."""
        raise NotImplementedError

    def enclosed_by(self, other, samples=4096):
        """True when every sampled point of this closure lies strictly inside
        ``other``.  Used to validate fictitious boundaries."""
        pts = self.boundary_points(samples)
        return bool(np.all(other.strictly_contains(pts)))


@dataclass(frozen=True)
class Disk(Domain):
    center: tuple = (0.0, 0.0)
    radius: float = 1.0
    dim = 2

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("radius must be positive")
        if len(self.center) != self.dim:
            raise DomainError(f"center must have {self.dim} coordinates")

    def _rel(self, p):
        return _points(p, self.dim) - np.asarray(self.center, dtype=np.float64)

    def contains(self, p):
        return np.einsum("ij,ij->i", self._rel(p), self._rel(p)) <= self.radius ** 2

    def strictly_contains(self, p):
        return np.linalg.norm(self._rel(p), axis=1) < self.radius

    def box_intersects(self, lo, hi):
        c = np.asarray(self.center, dtype=np.float64)
        nearest = np.clip(c, lo, hi)
        return np.sum((nearest - c) ** 2, axis=1) <= self.radius ** 2

    def bounding_box(self):
        c = np.asarray(self.center, dtype=np.float64)
        return c - self.radius, c + self.radius

    def project(self, p):
        q = self._rel(p)
        r = np.linalg.norm(q, axis=1)
        shrink = np.where(r > self.radius, self.radius / np.where(r > 0, r, 1.0), 1.0)
        return np.asarray(self.center, dtype=np.float64) + q * shrink[:, None]

    def boundary_points(self, n_points):
        _check_count(n_points)
        theta = 2.0 * np.pi * np.arange(n_points) / n_points
        c = np.asarray(self.center, dtype=np.float64)
        return c + self.radius * np.column_stack([np.cos(theta), np.sin(theta)])


Circle = Disk


@dataclass(frozen=True)
class Ball(Disk):
    center: tuple = (0.0, 0.0, 0.0)
    radius: float = 1.0
    dim = 3

    def boundary_points(self, n_points):
        """Fibonacci spiral: near-uniform and deterministic."""
        _check_count(n_points)
        k = np.arange(n_points)
        z = 1.0 - (2.0 * k + 1.0) / n_points
        rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        phi = k * GOLDEN_ANGLE
        unit = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
        return np.asarray(self.center, dtype=np.float64) + self.radius * unit


Sphere = Ball


@dataclass(frozen=True)
class Rect(Domain):
    x_range: tuple = (0.0, 1.0)
    y_range: tuple = (0.0, 1.0)
    dim = 2

    def __post_init__(self):
        if not (self.x_range[0] < self.x_range[1] and self.y_range[0] < self.y_range[1]):
            raise DomainError("rectangle ranges must be nonempty")

    def contains(self, p):
        p = _points(p, 2)
        (x0, x1), (y0, y1) = self.x_range, self.y_range
        return (p[:, 0] >= x0) & (p[:, 0] <= x1) & (p[:, 1] >= y0) & (p[:, 1] <= y1)

    def strictly_contains(self, p):
        p = _points(p, 2)
        (x0, x1), (y0, y1) = self.x_range, self.y_range
        return (p[:, 0] > x0) & (p[:, 0] < x1) & (p[:, 1] > y0) & (p[:, 1] < y1)

    def box_intersects(self, lo, hi):
        blo, bhi = self.bounding_box()
        return np.all((lo <= bhi) & (hi >= blo), axis=1)

    def project(self, p):
        lo, hi = self.bounding_box()
        return np.clip(_points(p, 2), lo, hi)

    def bounding_box(self):
        return (np.array([self.x_range[0], self.y_range[0]]),
                np.array([self.x_range[1], self.y_range[1]]))

    def boundary_points(self, n_points):
        """Equal arclength spacing, counterclockwise from the lower-left corner."""
        _check_count(n_points)
        (x0, x1), (y0, y1) = self.x_range, self.y_range
        w, h = x1 - x0, y1 - y0
        s = (2.0 * (w + h)) * np.arange(n_points) / n_points
        pts = np.empty((n_points, 2))
        for i, si in enumerate(s):
            if si < w:
                pts[i] = (x0 + si, y0)
            elif si < w + h:
                pts[i] = (x1, y0 + si - w)
            elif si < 2 * w + h:
                pts[i] = (x1 - (si - w - h), y1)
            else:
                pts[i] = (x0, y1 - (si - 2 * w - h))
        return pts


@dataclass(frozen=True, eq=False)
class PolarStar(Domain):
    """Star-shaped domain ``{(r cos t, r sin t) : r <= radius(t)}``.

    Parameters
    ----------
    radius : callable
        Vectorized, strictly positive, ``2 pi``-periodic radius function.
    label : str
        Text used in reprs and output metadata.
    """
    radius: object = None
    label: str = "polar_star"
    center: tuple = (0.0, 0.0)
    _poly: np.ndarray = field(init=False, repr=False)
    dim = 2

    def __post_init__(self):
        if not callable(self.radius):
            raise DomainError("PolarStar needs a callable radius function")
        theta = 2.0 * np.pi * np.arange(_STAR_SEGMENTS) / _STAR_SEGMENTS
        r = np.asarray(self.radius(theta), dtype=np.float64)
        if not np.all(np.isfinite(r) & (r > 0)):
            raise DomainError("PolarStar radius must be positive for all angles")
        poly = np.column_stack([r * np.cos(theta), r * np.sin(theta)]) + self.center
        object.__setattr__(self, "_poly", poly)

    @classmethod
    def cosine(cls, base, amplitude, frequency, center=(0.0, 0.0)):
        """``r(t) = base + amplitude cos(frequency t)``."""
        base, amplitude, frequency = float(base), float(amplitude), int(frequency)
        if base - abs(amplitude) <= 0:
            raise DomainError("PolarStar radius must stay positive")
        star = cls(lambda t: base + amplitude * np.cos(frequency * t),
                   label=f"{base:g}{amplitude:+g}cos({frequency}t)", center=tuple(center))
        object.__setattr__(star, "params", (base, amplitude, frequency))
        return star

    def _polar(self, p):
        q = _points(p, 2) - np.asarray(self.center)
        return np.hypot(q[:, 0], q[:, 1]), np.arctan2(q[:, 1], q[:, 0])

    def contains(self, p):
        r, t = self._polar(p)
        return r <= self.radius(t) * (1.0 + 1e-12)

    def strictly_contains(self, p):
        r, t = self._polar(p)
        return r < self.radius(t)

    def bounding_box(self):
        return self._poly.min(axis=0), self._poly.max(axis=0)

    def project(self, p):
        r, t = self._polar(p)
        bound = self.radius(t)
        shrink = np.where(r > bound, bound / np.where(r > 0, r, 1.0), 1.0)
        return np.asarray(self.center) + (_points(p, 2) - np.asarray(self.center)) * shrink[:, None]

    def boundary_points(self, n_points):
        _check_count(n_points)
        theta = 2.0 * np.pi * np.arange(n_points) / n_points
        r = np.asarray(self.radius(theta), dtype=np.float64)
        return np.asarray(self.center) + np.column_stack([r * np.cos(theta), r * np.sin(theta)])

    def box_intersects(self, lo, hi):
        lo = np.atleast_2d(lo)
        hi = np.atleast_2d(hi)
        corners = np.stack([lo, np.column_stack([hi[:, 0], lo[:, 1]]), hi,
                            np.column_stack([lo[:, 0], hi[:, 1]])], axis=1)
        hit = self.contains(corners.reshape(-1, 2)).reshape(-1, 4).any(axis=1)
        todo = np.flatnonzero(~hit)
        a = self._poly
        d = np.roll(a, -1, axis=0) - a
        for chunk in np.array_split(todo, max(1, todo.size // 256)):
            if chunk.size:
                hit[chunk] = _segments_hit_boxes(a, d, lo[chunk], hi[chunk])
        return hit


def _segments_hit_boxes(a, d, lo, hi):
    """Liang-Barsky clip of every segment ``a + s d, s in [0, 1]`` against
    every box; True where any segment of the polygon touches the box."""
    s0 = np.zeros((lo.shape[0], a.shape[0]))
    s1 = np.ones_like(s0)
    with np.errstate(divide="ignore", invalid="ignore"):
        for ax in range(2):
            da = d[None, :, ax]
            t_lo = (lo[:, ax, None] - a[None, :, ax]) / da
            t_hi = (hi[:, ax, None] - a[None, :, ax]) / da
            enter = np.minimum(t_lo, t_hi)
            leave = np.maximum(t_lo, t_hi)
            flat = da == 0.0
            inside = (a[None, :, ax] >= lo[:, ax, None]) & (a[None, :, ax] <= hi[:, ax, None])
            enter = np.where(flat, np.where(inside, -np.inf, np.inf), enter)
            leave = np.where(flat, np.where(inside, np.inf, -np.inf), leave)
            s0 = np.maximum(s0, enter)
            s1 = np.minimum(s1, leave)
    return np.any(s0 <= s1, axis=1)


def _check_count(n_points):
    if int(n_points) != n_points or n_points < 1:
        raise DomainError(f"point count must be a positive integer, got {n_points}")


def source_points(shape, n_points):
    """``n_points`` deterministic points on a fictitious surface."""
    if not isinstance(shape, Domain):
        raise GeometryError(f"unsupported source shape {shape!r}")
    return shape.boundary_points(n_points)


def boundary_points(domain, n_points):
    if not isinstance(domain, Domain):
        raise GeometryError(f"unsupported domain {domain!r}")
    return domain.boundary_points(n_points)


@dataclass(frozen=True, eq=False)
class Lattice:
    """Lattice nodes ``j / n`` whose cells meet the inflated domain.

    Attributes
    ----------
    indices : ndarray of int, shape (m, dim)
    samples : ndarray, shape (m,)
        Source values at the nodes.
    """
    n: int
    gamma: float
    delta: float
    indices: np.ndarray
    samples: np.ndarray

    @property
    def nodes(self):
        return self.indices / self.n

    @property
    def dim(self):
        return self.indices.shape[1]

    def __len__(self):
        return self.indices.shape[0]

    def with_samples(self, samples):
        samples = np.asarray(samples)
        if samples.shape != (len(self),):
            raise DomainError("samples must align with lattice nodes")
        return Lattice(self.n, self.gamma, self.delta, self.indices, samples)


def lattice_indices(domain, n, delta, padding=1):
    """Integer multi-indices ``j`` whose cell ``[j/n, (j+1)/n]^dim`` meets
    the domain inflated by ``delta`` in the sup norm."""
    lo, hi = domain.bounding_box()
    start = np.floor((lo - delta) * n).astype(int) - padding
    stop = np.ceil((hi + delta) * n).astype(int) + padding
    axes = [np.arange(a, b + 1) for a, b in zip(start, stop)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, domain.dim)
    cell_lo = grid / n - delta
    cell_hi = (grid + 1) / n + delta
    keep = domain.box_intersects(cell_lo, cell_hi)
    return grid[keep]


def lattice(domain, n, gamma=0.5, delta=0.2, f=None):
    """Build the lattice for ``domain`` and sample ``f`` at its nodes.

    ``f`` maps an ``(m, dim)`` array to ``m`` values; ``None`` means zero.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"gamma must lie in [0, 1], got {gamma}")
    idx = lattice_indices(domain, int(n), float(delta))
    if idx.shape[0] == 0:
        raise GeometryError("lattice is empty")
    nodes = idx / n
    samples = np.zeros(len(idx)) if f is None else np.asarray(f(nodes), dtype=np.float64)
    if samples.shape == ():
        samples = np.full(len(idx), float(samples))
    return Lattice(int(n), float(gamma), float(delta), idx, samples)


# evaluation point sets for the worked examples

def spiral_points(count=350, turns=(2.0 * np.pi, 4.0 * np.pi), pitch=14.0):
    """Points on ``r = theta / pitch`` for ``theta`` equispaced in ``turns``."""
    theta = np.linspace(turns[0], turns[1], count)
    r = theta / pitch
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])

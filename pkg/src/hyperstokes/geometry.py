"""One-dimensional rigid bodies: polyline segments, mass accounting, quadrature.

A body is a finite union of polyline segments with piecewise-constant linear
mass density.  Smooth shapes (e.g. the helix) are pre-sampled into polylines
by their builders, which keeps line integrals and symmetry detection exact.

All downstream solvers work in the co-moving frame with the center of mass
at the origin; :func:`discretize` enforces that centering on its quadrature
nodes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import ceil, cos, pi, sin, sqrt

import numpy as np

from .errors import BodyConfigError, InvalidArgument

__all__ = [
    "Segment",
    "BodyGeometry",
    "MassProperties",
    "DiscretizedBody",
    "mass_properties",
    "total_length",
    "diameter",
    "transform",
    "discretize",
    "ensure_orthogonal",
    "rod",
    "bent_rod",
    "tripod_tetrahedron",
    "octahedron_frame",
    "helix",
]

_ORTHO_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Segment:
    """Polyline with a positive density per edge.

    ``density`` may be given as a single scalar (applied to every edge) or
    as one value per edge.
    """

    points: np.ndarray
    density: np.ndarray = field(default=1.0)  # type: ignore[assignment]

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 2:
            raise BodyConfigError(
                f"segment needs >= 2 points of dimension 3, got shape {pts.shape}"
            )
        if not np.all(np.isfinite(pts)):
            raise BodyConfigError("segment contains non-finite coordinates")
        edges = np.diff(pts, axis=0)
        lengths = np.linalg.norm(edges, axis=1)
        if np.any(lengths == 0.0):
            raise BodyConfigError("segment has consecutive duplicate points")
        dens = np.asarray(self.density, dtype=float)
        if dens.ndim == 0:
            dens = np.full(len(lengths), float(dens))
        if dens.shape != (len(lengths),):
            raise BodyConfigError(
                f"density must be scalar or one value per edge "
                f"({len(lengths)} edges), got shape {dens.shape}"
            )
        if not np.all(np.isfinite(dens)) or np.any(dens <= 0.0):
            raise BodyConfigError("density values must be positive and finite")
        pts = pts.copy()
        dens = dens.copy()
        pts.setflags(write=False)
        dens.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "density", dens)

    @property
    def edge_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.points, axis=0), axis=1)


@dataclass(frozen=True, eq=False)
class BodyGeometry:
    """A rigid body: named collection of segments plus its complementary mass.

    ``m_c`` is the mass of fluid displaced by the idealized body (used for
    buoyancy); it must not exceed the body mass.
    """

    name: str
    segments: tuple[Segment, ...]
    m_c: float = 0.0

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise BodyConfigError("body needs at least one segment")
        if not all(isinstance(s, Segment) for s in segs):
            raise BodyConfigError("segments must be Segment instances")
        if not (np.isfinite(self.m_c) and self.m_c >= 0.0):
            raise BodyConfigError(f"m_c must be >= 0, got {self.m_c}")
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "m_c", float(self.m_c))


@dataclass(frozen=True, eq=False)
class MassProperties:
    """Mass, first moments and derived buoyancy data of a body.

    ``r`` is the centroid (uniform-density center) minus the center of mass,
    expressed in the co-moving frame; it vanishes for uniform densities.
    """

    m: float
    m_c: float
    m_e: float
    center_of_mass: np.ndarray
    centroid: np.ndarray
    r: np.ndarray
    total_length: float


@dataclass(frozen=True, eq=False)
class DiscretizedBody:
    """Midpoint-rule quadrature of a body, centered at its center of mass.

    nodes      (N, 3) element midpoints in the co-moving frame
    weights    (N,) element arc lengths
    densities  (N,) linear density at each node
    """

    name: str
    nodes: np.ndarray
    weights: np.ndarray
    densities: np.ndarray
    mass: MassProperties
    resolution: float

    @property
    def n_nodes(self) -> int:
        return len(self.weights)

    @property
    def diameter(self) -> float:
        return _cloud_diameter(self.nodes)


def _edges(body: BodyGeometry):
    """Yield (p0, p1, rho) for every edge of every segment."""
    for seg in body.segments:
        pts = seg.points
        for i, rho in enumerate(seg.density):
            yield pts[i], pts[i + 1], rho


def _cloud_diameter(points: np.ndarray) -> float:
    if len(points) == 1:
        return 0.0
    d2 = np.sum((points[:, None, :] - points[None, :, :]) ** 2, axis=-1)
    return float(np.sqrt(d2.max()))


def total_length(body: BodyGeometry) -> float:
    """Total arc length of the body."""
    return float(sum(np.linalg.norm(p1 - p0) for p0, p1, _ in _edges(body)))


def diameter(body: BodyGeometry) -> float:
    """Largest distance between any two polyline vertices."""
    return _cloud_diameter(np.vstack([s.points for s in body.segments]))


def mass_properties(body: BodyGeometry) -> MassProperties:
    """Exact line integrals of the piecewise-linear, piecewise-constant body.

    Each edge contributes rho * L to the mass and rho * L * midpoint to the
    first moment, which is exact for linear geometry.
    """
    m = 0.0
    length = 0.0
    moment = np.zeros(3)
    geo_moment = np.zeros(3)
    for p0, p1, rho in _edges(body):
        ell = float(np.linalg.norm(p1 - p0))
        mid = 0.5 * (p0 + p1)
        m += rho * ell
        length += ell
        moment += rho * ell * mid
        geo_moment += ell * mid
    com = moment / m
    centroid = geo_moment / length
    if body.m_c > m:
        raise BodyConfigError(
            f"complementary mass m_c={body.m_c} exceeds body mass m={m}"
        )
    return MassProperties(
        m=m,
        m_c=body.m_c,
        m_e=m - body.m_c,
        center_of_mass=com,
        centroid=centroid,
        r=centroid - com,
        total_length=length,
    )


def ensure_orthogonal(Q) -> np.ndarray:
    """Validate Q^T Q = I to 1e-12 and return Q as a float array."""
    Q = np.asarray(Q, dtype=float)
    if Q.shape != (3, 3) or not np.all(np.isfinite(Q)):
        raise InvalidArgument(f"expected a finite 3x3 matrix, got shape {Q.shape}")
    dev = np.abs(Q.T @ Q - np.eye(3)).max()
    if dev > _ORTHO_TOL:
        raise InvalidArgument(f"matrix is not orthogonal (|Q^T Q - I| = {dev:.2e})")
    return Q


def transform(body: BodyGeometry, Q, t=(0.0, 0.0, 0.0)) -> BodyGeometry:
    """Rigidly map every point p -> Q p + t; densities and m_c unchanged."""
    Q = ensure_orthogonal(Q)
    t = np.asarray(t, dtype=float)
    segs = tuple(
        Segment(points=seg.points @ Q.T + t, density=seg.density)
        for seg in body.segments
    )
    return BodyGeometry(name=body.name, segments=segs, m_c=body.m_c)


def _warn_if_disconnected(body: BodyGeometry) -> None:
    """Multi-segment bodies are expected to be connected; warn otherwise."""
    n = len(body.segments)
    if n <= 1:
        return
    tol = 1e-9 * max(diameter(body), 1e-300)
    ends = [(s.points[0], s.points[-1]) for s in body.segments]
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        pts_i = np.vstack(ends[i])
        for j in range(i + 1, n):
            pts_j = np.vstack(ends[j])
            gap = np.linalg.norm(pts_i[:, None, :] - pts_j[None, :, :], axis=-1).min()
            if gap <= tol:
                parent[find(i)] = find(j)
    if len({find(i) for i in range(n)}) > 1:
        warnings.warn(
            f"body '{body.name}' has disconnected segments; the solver still "
            "works but the underlying model assumes a connected body",
            stacklevel=3,
        )


def discretize(body: BodyGeometry, resolution: float) -> DiscretizedBody:
    """Composite-midpoint quadrature with at least ``resolution`` nodes per unit length.

    Every edge is split uniformly into ceil(length * resolution) elements,
    one node per element midpoint, weight = element length.  Midpoint nodes
    avoid duplicated junction points where segments meet, so the kernel
    matrix never sees coincident nodes.  The node set is finally shifted so
    the density-weighted center of mass sits at the origin.
    """
    if not (np.isfinite(resolution) and resolution > 0.0):
        raise InvalidArgument(f"resolution must be positive, got {resolution}")
    _warn_if_disconnected(body)
    mass = mass_properties(body)
    nodes = []
    weights = []
    densities = []
    for p0, p1, rho in _edges(body):
        ell = float(np.linalg.norm(p1 - p0))
        n = ceil(ell * resolution)
        t = (np.arange(n) + 0.5) / n
        nodes.append(p0 + t[:, None] * (p1 - p0))
        weights.append(np.full(n, ell / n))
        densities.append(np.full(n, rho))
    x = np.vstack(nodes)
    w = np.concatenate(weights)
    rho = np.concatenate(densities)
    x = x - (w * rho) @ x / float(np.sum(w * rho))
    x.setflags(write=False)
    w.setflags(write=False)
    rho.setflags(write=False)
    return DiscretizedBody(
        name=body.name,
        nodes=x,
        weights=w,
        densities=rho,
        mass=mass,
        resolution=float(resolution),
    )


def _require_positive(**dims) -> None:
    for name, val in dims.items():
        if not (np.isfinite(val) and val > 0.0):
            raise InvalidArgument(f"{name} must be positive, got {val}")


def rod(length: float) -> BodyGeometry:
    """Straight uniform rod along x1, centered at the origin."""
    _require_positive(length=length)
    pts = np.array([[-0.5 * length, 0.0, 0.0], [0.5 * length, 0.0, 0.0]])
    return BodyGeometry(name="rod", segments=(Segment(points=pts),))


def bent_rod(angle_deg: float, arm_length: float) -> BodyGeometry:
    """Two equal arms joined at ``angle_deg``, lying in the x2-x3 plane.

    The bend is symmetric about the x3 axis, so the body has both x2-x3
    (it is planar) and x1-x3 as planes of symmetry.
    """
    _require_positive(angle_deg=angle_deg, arm_length=arm_length)
    if angle_deg >= 180.0:
        raise InvalidArgument(f"opening angle must be < 180 deg, got {angle_deg}")
    half = 0.5 * angle_deg * pi / 180.0
    a = arm_length * sin(half)
    b = arm_length * cos(half)
    pts = np.array([[0.0, -a, b], [0.0, 0.0, 0.0], [0.0, a, b]])
    pts = pts - np.array([0.0, 0.0, 0.5 * b])  # uniform center to origin
    return BodyGeometry(name="bent_rod", segments=(Segment(points=pts),))


def tripod_tetrahedron(edge: float) -> BodyGeometry:
    """Three concurrent edges of a regular tetrahedron, apex on the x1 axis.

    Invariant under the rotation by 2*pi/3 about x1 (helicoidal symmetry of
    order 3).
    """
    _require_positive(edge=edge)
    h = edge * sqrt(2.0 / 3.0)
    rb = edge / sqrt(3.0)
    apex = np.array([0.5 * h, 0.0, 0.0])
    segs = []
    for k in range(3):
        ang = 2.0 * pi * k / 3.0
        base = np.array([-0.5 * h, rb * cos(ang), rb * sin(ang)])
        segs.append(Segment(points=np.array([apex, base])))
    return BodyGeometry(name="tripod_tetrahedron", segments=tuple(segs))


def octahedron_frame(edge: float) -> BodyGeometry:
    """Wire frame of the 12 edges of a regular octahedron, vertices on the axes.

    Helicoidally symmetric about every coordinate axis and fore-aft
    symmetric, so its coupling tensor vanishes.
    """
    _require_positive(edge=edge)
    c = edge / sqrt(2.0)
    verts = c * np.array(
        [
            [1, 0, 0],
            [-1, 0, 0],
            [0, 1, 0],
            [0, -1, 0],
            [0, 0, 1],
            [0, 0, -1],
        ],
        dtype=float,
    )
    segs = []
    for i in range(6):
        for j in range(i + 1, 6):
            if abs(np.linalg.norm(verts[i] - verts[j]) - edge) < 1e-12 * edge:
                segs.append(Segment(points=np.array([verts[i], verts[j]])))
    return BodyGeometry(name="octahedron_frame", segments=tuple(segs))


def helix(radius: float, pitch: float, turns: float, samples_per_turn: int = 16) -> BodyGeometry:
    """Circular helix along x1, pre-sampled as a polyline.

    ``pitch`` is the axial advance per full turn.  The polyline resolution
    (``samples_per_turn``) fixes the shape; :func:`discretize` refines the
    quadrature on top of it.
    """
    _require_positive(radius=radius, pitch=pitch, turns=turns)
    if samples_per_turn < 4:
        raise InvalidArgument("samples_per_turn must be >= 4")
    n = int(round(samples_per_turn * turns))
    t = np.linspace(0.0, 2.0 * pi * turns, n + 1)
    pts = np.stack(
        [
            pitch * t / (2.0 * pi) - 0.5 * pitch * turns,
            radius * np.cos(t),
            radius * np.sin(t),
        ],
        axis=1,
    )
    return BodyGeometry(name="helix", segments=(Segment(points=pts),))

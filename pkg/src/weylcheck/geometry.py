"""Planar domains of finite volume: membership, rasterization, distance
fields, inner domains and cube covers.

Domains are open sets. Membership is always strict (boundary points are
outside), which matches the extension-by-zero discretization downstream.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class GridMask:
    """Rasterization of a domain at spacing h.

    ``interior`` is a boolean array of shape ``dims`` (x index first);
    node (i, j) sits at ``origin + h * (i, j)``.
    """

    h: float
    origin: tuple[float, float]
    dims: tuple[int, int]
    interior: np.ndarray

    def __post_init__(self):
        if self.h <= 0:
            raise GeometryError("grid spacing must be positive")
        interior = np.asarray(self.interior, dtype=bool)
        if interior.shape != tuple(self.dims):
            raise GeometryError("interior array shape does not match dims")
        object.__setattr__(self, "interior", interior)
        interior.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return int(self.interior.sum())

    def node_index(self) -> np.ndarray:
        """Dense index over interior nodes: index[i, j] in 0..N-1, -1 outside."""
        idx = -np.ones(self.dims, dtype=np.int64)
        idx[self.interior] = np.arange(self.n_nodes)
        return idx

    def node_coords(self) -> np.ndarray:
        """(N, 2) physical coordinates of the interior nodes, index order."""
        ii, jj = np.nonzero(self.interior)
        return np.stack(
            [self.origin[0] + self.h * ii, self.origin[1] + self.h * jj], axis=1
        )

    def volume(self) -> float:
        return self.n_nodes * self.h**2

    def volume_uncertainty(self) -> float:
        """One-cell band around the raster boundary, as a volume."""
        return self.boundary_node_count() * self.h**2

    def boundary_node_count(self) -> int:
        """Interior nodes with at least one non-interior 4-neighbor."""
        padded = np.zeros((self.dims[0] + 2, self.dims[1] + 2), dtype=bool)
        padded[1:-1, 1:-1] = self.interior
        core = padded[1:-1, 1:-1]
        all_nb = (
            padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
        )
        return int((core & ~all_nb).sum())

    def is_submask_of(self, other: "GridMask") -> bool:
        return (
            self.h == other.h
            and self.origin == other.origin
            and self.dims == other.dims
            and bool(np.all(~self.interior | other.interior))
        )

    def restrict(self, keep: np.ndarray) -> "GridMask":
        """Submask keeping only the flagged nodes (boolean over dims)."""
        return GridMask(self.h, self.origin, self.dims, self.interior & keep)


@dataclass(frozen=True)
class DomainSpec:
    """Analytic or raster description of an open set of finite volume.

    kinds: interval(a) on (0, a); rectangle(a, b) on (0, a) x (0, b);
    disk(r) centered at the origin; cusp(p, x_max) the region
    0 < y < x^(-p), 1 < x < x_max; union of disjoint translated parts;
    raster backed by a GridMask.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        k = self.kind
        p = self.params
        if k == "interval":
            if p["a"] <= 0:
                raise GeometryError("interval length must be positive")
        elif k == "rectangle":
            if p["a"] <= 0 or p["b"] <= 0:
                raise GeometryError("rectangle sides must be positive")
        elif k == "disk":
            if p["r"] <= 0:
                raise GeometryError("disk radius must be positive")
        elif k == "cusp":
            if p["p"] <= 1:
                raise GeometryError("cusp exponent must exceed 1 for finite area")
            if p["x_max"] <= 1:
                raise GeometryError("cusp truncation must exceed 1")
        elif k == "union":
            parts = p["parts"]
            offsets = p["offsets"]
            if len(parts) != len(offsets):
                raise GeometryError("union needs one offset per part")
            if any(part.dimension != parts[0].dimension for part in parts):
                raise GeometryError("union parts must share dimension")
            _check_disjoint(parts, offsets)
        elif k == "raster":
            if p["mask"].n_nodes == 0:
                raise GeometryError("raster domain is empty")
        else:
            raise GeometryError(f"unknown domain kind {k!r}")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def interval(a: float) -> "DomainSpec":
        return DomainSpec("interval", {"a": float(a)})

    @staticmethod
    def rectangle(a: float, b: float) -> "DomainSpec":
        return DomainSpec("rectangle", {"a": float(a), "b": float(b)})

    @staticmethod
    def disk(r: float) -> "DomainSpec":
        return DomainSpec("disk", {"r": float(r)})

    @staticmethod
    def cusp(p: float, x_max: float) -> "DomainSpec":
        return DomainSpec("cusp", {"p": float(p), "x_max": float(x_max)})

    @staticmethod
    def union(parts, offsets) -> "DomainSpec":
        return DomainSpec(
            "union",
            {"parts": list(parts), "offsets": [tuple(map(float, o)) for o in offsets]},
        )

    @staticmethod
    def raster(mask: GridMask) -> "DomainSpec":
        return DomainSpec("raster", {"mask": mask})

    # -- basic queries -----------------------------------------------------

    @property
    def dimension(self) -> int:
        if self.kind == "interval":
            return 1
        if self.kind == "union":
            return self.params["parts"][0].dimension
        return 2

    @property
    def volume(self) -> float:
        k, p = self.kind, self.params
        if k == "interval":
            return p["a"]
        if k == "rectangle":
            return p["a"] * p["b"]
        if k == "disk":
            return math.pi * p["r"] ** 2
        if k == "cusp":
            # truncated area; the untruncated value is 1/(p-1)
            return (1.0 - p["x_max"] ** (1.0 - p["p"])) / (p["p"] - 1.0)
        if k == "union":
            return sum(part.volume for part in p["parts"])
        return p["mask"].volume()

    def volume_deficit(self) -> float:
        """Volume excluded by truncation (cusp tail beyond x_max)."""
        k, p = self.kind, self.params
        if k == "cusp":
            return p["x_max"] ** (1.0 - p["p"]) / (p["p"] - 1.0)
        if k == "union":
            return sum(part.volume_deficit() for part in p["parts"])
        return 0.0

    def bounding_box(self):
        """((xmin, ymin), (xmax, ymax)); 1-D domains report ((xmin,), (xmax,))."""
        k, p = self.kind, self.params
        if k == "interval":
            return (0.0,), (p["a"],)
        if k == "rectangle":
            return (0.0, 0.0), (p["a"], p["b"])
        if k == "disk":
            r = p["r"]
            return (-r, -r), (r, r)
        if k == "cusp":
            return (1.0, 0.0), (p["x_max"], 1.0)
        if k == "union":
            boxes = [
                _shift_box(part.bounding_box(), off)
                for part, off in zip(p["parts"], p["offsets"])
            ]
            lo = tuple(min(b[0][d] for b in boxes) for d in range(len(boxes[0][0])))
            hi = tuple(max(b[1][d] for b in boxes) for d in range(len(boxes[0][0])))
            return lo, hi
        m = p["mask"]
        return (
            (m.origin[0], m.origin[1]),
            (
                m.origin[0] + m.h * (m.dims[0] - 1),
                m.origin[1] + m.h * (m.dims[1] - 1),
            ),
        )


def _shift_box(box, off):
    lo, hi = box
    return tuple(l + o for l, o in zip(lo, off)), tuple(h + o for h, o in zip(hi, off))


def _boxes_overlap(b1, b2) -> bool:
    lo1, hi1 = b1
    lo2, hi2 = b2
    return all(lo1[d] < hi2[d] and lo2[d] < hi1[d] for d in range(len(lo1)))


def _check_disjoint(parts, offsets):
    boxes = [_shift_box(p.bounding_box(), o) for p, o in zip(parts, offsets)]
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            if _boxes_overlap(boxes[i], boxes[j]):
                raise GeometryError(
                    f"union parts {i} and {j} have overlapping bounding boxes"
                )


def membership(spec: DomainSpec, point) -> bool:
    """Strict membership in the open set."""
    point = tuple(float(c) for c in np.atleast_1d(point))
    if len(point) != spec.dimension:
        raise GeometryError(
            f"point dimension {len(point)} != domain dimension {spec.dimension}"
        )
    k, p = spec.kind, spec.params
    if k == "interval":
        return 0.0 < point[0] < p["a"]
    x, y = point
    if k == "rectangle":
        return 0.0 < x < p["a"] and 0.0 < y < p["b"]
    if k == "disk":
        return x * x + y * y < p["r"] ** 2
    if k == "cusp":
        return 1.0 < x < p["x_max"] and 0.0 < y < x ** (-p["p"])
    if k == "union":
        return any(
            membership(part, (x - ox, y - oy))
            for part, (ox, oy) in zip(p["parts"], p["offsets"])
        )
    # raster: the point belongs to the cell of its nearest node
    m = p["mask"]
    i = round((x - m.origin[0]) / m.h)
    j = round((y - m.origin[1]) / m.h)
    if 0 <= i < m.dims[0] and 0 <= j < m.dims[1]:
        return bool(m.interior[i, j])
    return False


def rasterize(spec: DomainSpec, h: float) -> GridMask:
    """Node-membership rasterization: a node is interior iff its coordinate
    passes strict membership."""
    if h <= 0:
        raise GeometryError("grid spacing must be positive")
    if spec.dimension != 2:
        raise GeometryError("rasterization is 2-D only; 1-D domains are analytic")
    (xmin, ymin), (xmax, ymax) = spec.bounding_box()
    nx = int(math.floor((xmax - xmin) / h + 1e-9)) + 1
    ny = int(math.floor((ymax - ymin) / h + 1e-9)) + 1
    xs = xmin + h * np.arange(nx)
    ys = ymin + h * np.arange(ny)
    interior = np.empty((nx, ny), dtype=bool)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            interior[i, j] = membership(spec, (x, y))
    if not interior.any():
        raise GeometryError(f"rasterization at h={h} produced an empty mask")
    return GridMask(h, (xmin, ymin), (nx, ny), interior)


# -- exact Euclidean distance transform -----------------------------------


def _edt_1d(f: np.ndarray) -> np.ndarray:
    """Lower envelope of parabolas: squared distance transform of a sampled
    function f along one axis (Felzenszwalb-Huttenlocher)."""
    n = f.shape[0]
    v = np.empty(n, dtype=np.int64)
    z = np.empty(n + 1)
    k = 0
    v[0] = 0
    z[0] = -np.inf
    z[1] = np.inf

    def intersect(p, q):
        # abscissa where parabola q overtakes parabola p; an infinite
        # parabola is overtaken everywhere
        if np.isinf(f[p]):
            return -np.inf
        if np.isinf(f[q]):
            return np.inf
        return ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * (q - p))

    for q in range(1, n):
        s = intersect(v[k], q)
        while k > 0 and s <= z[k]:
            k -= 1
            s = intersect(v[k], q)
        if k == 0 and s <= z[0]:
            v[0] = q
        else:
            k += 1
            v[k] = q
            z[k] = s
        z[k + 1] = np.inf
    d_out = np.empty(n)
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        p = v[k]
        d_out[q] = (q - p) ** 2 + f[p]
    return d_out


def distance_to_complement(mask: GridMask) -> np.ndarray:
    """Exact Euclidean distance from each node to the nearest non-interior
    node position, in physical units; +inf-free, 0 on non-interior nodes.

    The lattice outside the bounding box is non-interior; padding by one
    ring is enough because any outer node is farther than the ring.
    """
    if mask.n_nodes == 0:
        raise GeometryError("distance transform of an empty mask")
    nx, ny = mask.dims
    padded = np.zeros((nx + 2, ny + 2), dtype=bool)
    padded[1:-1, 1:-1] = mask.interior
    inf = np.inf
    g = np.where(padded, inf, 0.0)
    # pass 1: per-row squared distances, pass 2: per-column envelopes
    for i in range(nx + 2):
        g[i, :] = _edt_1d(g[i, :])
    for j in range(ny + 2):
        g[:, j] = _edt_1d(g[:, j])
    dist = np.sqrt(g[1:-1, 1:-1]) * mask.h
    return dist


def inner_domain(mask: GridMask, eta: float) -> GridMask:
    """Nodes at distance strictly greater than eta from the complement.

    May be empty; the caller checks ``n_nodes`` before discretizing.
    """
    if eta < 0:
        raise GeometryError("eta must be nonnegative")
    if eta == 0:
        return mask
    dist = distance_to_complement(mask)
    return GridMask(mask.h, mask.origin, mask.dims, dist > eta)


# -- cube cover ------------------------------------------------------------


@dataclass(frozen=True)
class CubeCover:
    """Disjoint lattice cubes of side eta/sqrt(n) lying inside the domain."""

    eta: float
    side: float
    corners: np.ndarray  # (m, 2) lower-left corners
    covered_volume: float


_CUBE_SAMPLES = 10  # per axis; conservative documented constant
_CORNER_SHRINK = 1e-9  # corners pulled toward the cube center: open-cube test


def _cube_inside(spec: DomainSpec, x0: float, y0: float, side: float) -> bool:
    c = side * (np.arange(_CUBE_SAMPLES) + 0.5) / _CUBE_SAMPLES
    for dx in c:
        for dy in c:
            if not membership(spec, (x0 + dx, y0 + dy)):
                return False
    eps = side * _CORNER_SHRINK
    for dx in (eps, side - eps):
        for dy in (eps, side - eps):
            if not membership(spec, (x0 + dx, y0 + dy)):
                return False
    return True


def cube_cover(spec: DomainSpec, eta: float) -> CubeCover:
    """Cubes from the single lattice of side eta/sqrt(2) anchored at the
    origin whose (open) closures lie inside the domain."""
    if eta <= 0:
        raise GeometryError("eta must be positive")
    if spec.dimension != 2:
        raise GeometryError("cube covers are 2-D only")
    side = eta / math.sqrt(2.0)
    (xmin, ymin), (xmax, ymax) = spec.bounding_box()
    i0 = int(math.floor(xmin / side))
    i1 = int(math.ceil(xmax / side))
    j0 = int(math.floor(ymin / side))
    j1 = int(math.ceil(ymax / side))
    corners = []
    for i in range(i0, i1 + 1):
        for j in range(j0, j1 + 1):
            x0, y0 = i * side, j * side
            if _cube_inside(spec, x0, y0, side):
                corners.append((x0, y0))
    corners = np.array(corners, dtype=float).reshape(-1, 2)
    return CubeCover(eta, side, corners, len(corners) * side * side)


# -- domain files ----------------------------------------------------------


def load_domain(path) -> DomainSpec:
    """Read a domain description from a JSON file.

    Raster masks reference a PGM (P5) or ASCII-art file next to the JSON.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise GeometryError(f"{path}: malformed JSON: {exc}") from exc
    return _domain_from_dict(data, path.parent)


def _domain_from_dict(data, base: Path) -> DomainSpec:
    if not isinstance(data, dict) or "kind" not in data:
        raise GeometryError("domain entry must be an object with a 'kind' field")
    kind = data["kind"]
    try:
        if kind == "interval":
            return DomainSpec.interval(data["a"])
        if kind == "rectangle":
            return DomainSpec.rectangle(data["a"], data["b"])
        if kind == "disk":
            return DomainSpec.disk(data["r"])
        if kind == "cusp":
            return DomainSpec.cusp(data["p"], data["x_max"])
        if kind == "union":
            parts = [_domain_from_dict(p, base) for p in data["parts"]]
            offsets = [p.get("offset", (0.0, 0.0)) for p in data["parts"]]
            return DomainSpec.union(parts, offsets)
        if kind == "raster":
            mask = load_mask(base / data["path"], data["h"])
            return DomainSpec.raster(mask)
    except KeyError as exc:
        raise GeometryError(f"domain kind {kind!r}: missing field {exc}") from exc
    raise GeometryError(f"unknown domain kind {kind!r}")


def load_mask(path, h: float) -> GridMask:
    """Binary PGM (P5) or ASCII art ('#' interior, '.' exterior)."""
    path = Path(path)
    raw = path.read_bytes()
    if raw.startswith(b"P5"):
        interior = _parse_pgm(raw, path)
    else:
        lines = [ln for ln in raw.decode().splitlines() if ln.strip()]
        rows = []
        for ln in lines:
            if set(ln) - {"#", "."}:
                raise GeometryError(f"{path}: ASCII mask may contain only '#' and '.'")
            rows.append([c == "#" for c in ln])
        if len({len(r) for r in rows}) != 1:
            raise GeometryError(f"{path}: ragged ASCII mask")
        # text rows run top-down; grid j runs bottom-up
        interior = np.array(rows[::-1], dtype=bool).T
    return GridMask(h, (0.0, 0.0), interior.shape, interior)


def _parse_pgm(raw: bytes, path) -> np.ndarray:
    fields = []
    pos = 2
    while len(fields) < 3:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        fields.append(int(raw[start:pos]))
    pos += 1  # single whitespace after maxval
    width, height, maxval = fields
    if maxval > 255:
        raise GeometryError(f"{path}: 16-bit PGM not supported")
    data = np.frombuffer(raw, dtype=np.uint8, count=width * height, offset=pos)
    img = data.reshape(height, width)
    # image rows run top-down; nonzero = interior
    return (img[::-1, :] > 0).T.copy()

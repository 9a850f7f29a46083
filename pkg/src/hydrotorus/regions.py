"""Torus scans: root-pattern classification, elliptic components, constancy checks."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .hydro import point_analysis
from .integral import IntegralCoeffs, bracket_residual
from .metric import ConformalMetric, Metric, SemiGeodesicMetric
from .roots import DEFAULT_TOL, RootClass

CLASS_CODES = (RootClass.HYPERBOLIC, RootClass.ELLIPTIC, RootClass.DEGENERATE)
HYP, ELL, DEG = 0, 1, 2


@dataclass
class RegionMap:
    """Per-node classification on a uniform grid.

    Arrays are indexed ``[i1, i2]`` along (u1, u2). Real-root quantities are
    NaN-padded to ``degree`` columns. ``pair_r`` holds ``u + i v`` for the root
    ``alpha + i beta`` (``r`` itself for quartics, ``r^2`` for cubics, whose
    invariant carries a square-root branch).
    """

    degree: int
    periods: tuple[float, float]
    u1: np.ndarray
    u2: np.ndarray
    classes: np.ndarray
    real_s: np.ndarray
    real_r: np.ndarray
    real_lam: np.ndarray
    pair_s: np.ndarray
    pair_r: np.ndarray
    failures: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return self.classes.shape

    @property
    def spacing(self) -> tuple[float, float]:
        return self.periods[0] / self.shape[0], self.periods[1] / self.shape[1]

    def class_at(self, i: int, j: int) -> RootClass:
        return CLASS_CODES[int(self.classes[i, j])]

    def counts(self) -> dict[str, int]:
        return {c.value: int(np.sum(self.classes == k)) for k, c in enumerate(CLASS_CODES)}

    def gray(self) -> np.ndarray:
        lut = np.array([c.gray for c in CLASS_CODES], dtype=np.uint8)
        return lut[self.classes]


def _scan_row(i, A, G, degree, tol):
    n2 = A.shape[2]
    row = {
        "cls": np.full(n2, DEG, dtype=np.uint8),
        "s": np.full((n2, degree), np.nan),
        "r": np.full((n2, degree), np.nan),
        "lam": np.full((n2, degree), np.nan),
        "ps": np.full(n2, np.nan + 0j),
        "pr": np.full(n2, np.nan + 0j),
        "fail": {},
    }
    for j in range(n2):
        try:
            _, data = point_analysis(tuple(A[:, i, j]), float(G[i, j]), tol)
        except (ValueError, ZeroDivisionError) as exc:
            row["fail"][(i, j)] = str(exc)
            continue
        row["cls"][j] = CLASS_CODES.index(data.cls)
        reals = data.real_records()
        for k, rec in enumerate(reals[:degree]):
            row["s"][j, k] = rec.s.real
            row["r"][j, k] = rec.r.real
            row["lam"][j, k] = rec.lam.real
        pair = data.pair_record()
        if pair is not None:
            row["ps"][j] = pair.s
            row["pr"][j] = pair.r_squared if degree == 3 else pair.r
    return row


def grid_coords(periods, resolution):
    n1, n2 = resolution
    u1 = np.arange(n1) * (periods[0] / n1)
    u2 = np.arange(n2) * (periods[1] / n2)
    return np.meshgrid(u1, u2, indexing="ij")


def scan_torus(F: IntegralCoeffs, metric: Metric, resolution=(64, 64), tol: float = DEFAULT_TOL,
               threads: int = 1) -> RegionMap:
    """Classify the root pattern of the fibre derivative at every grid node.

    In the conformal model the hat variable is ``s = p2/p1`` and speeds are
    reported with ``g = 1``.
    """
    if isinstance(resolution, int):
        resolution = (resolution, resolution)
    if min(resolution) < 16:
        raise ValueError("resolution must be at least 16 per axis")
    if F.degree not in (3, 4):
        raise ValueError("scans support cubic and quartic integrals")
    periods = metric.periods
    U1, U2 = grid_coords(periods, resolution)
    A = F.values_at(U1, U2)
    if isinstance(metric, SemiGeodesicMetric):
        G = metric.g(U1, U2)
    else:
        G = np.ones(resolution)
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(G))):
        raise ValueError("non-finite coefficient or metric values on the grid")
    n = F.degree
    n1 = resolution[0]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda i: _scan_row(i, A, G, n, tol), range(n1)))
    else:
        rows = [_scan_row(i, A, G, n, tol) for i in range(n1)]
    failures = {}
    for row in rows:
        failures.update(row["fail"])
    return RegionMap(
        n, tuple(periods), U1, U2,
        np.stack([r["cls"] for r in rows]),
        np.stack([r["s"] for r in rows]),
        np.stack([r["r"] for r in rows]),
        np.stack([r["lam"] for r in rows]),
        np.stack([r["ps"] for r in rows]),
        np.stack([r["pr"] for r in rows]),
        failures,
    )


# --- connected components ------------------------------------------------------------


@dataclass(frozen=True)
class Component:
    nodes: np.ndarray  # (k, 2) integer indices
    boundary: bool

    @property
    def size(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class ComponentSet:
    components: tuple[Component, ...]
    labels: np.ndarray  # 0 outside the mask, 1.. for components

    def __len__(self):
        return len(self.components)


def periodic_components(mask: np.ndarray) -> ComponentSet:
    """4-adjacency components of a boolean mask on a periodic grid."""
    mask = np.asarray(mask, dtype=bool)
    lab, nlab = ndimage.label(mask)
    parent = list(range(nlab + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for a, b in zip(lab[0, :], lab[-1, :]):
        if a and b:
            union(a, b)
    for a, b in zip(lab[:, 0], lab[:, -1]):
        if a and b:
            union(a, b)
    roots = sorted({find(x) for x in range(1, nlab + 1)})
    remap = np.zeros(nlab + 1, dtype=np.int64)
    for x in range(1, nlab + 1):
        remap[x] = roots.index(find(x)) + 1
    labels = remap[lab]
    outside = ~mask
    touches = np.zeros_like(mask)
    for axis in (0, 1):
        for shift in (1, -1):
            touches |= np.roll(outside, shift, axis=axis)
    comps = []
    for k in range(1, len(roots) + 1):
        sel = labels == k
        comps.append(Component(np.argwhere(sel), bool(np.any(touches & sel))))
    return ComponentSet(tuple(comps), labels)


def connected_components(rmap: RegionMap) -> ComponentSet:
    return periodic_components(rmap.classes == ELL)


# --- constancy and transport ------------------------------------------------------------


@dataclass
class ConstancyReport:
    applicable: bool
    message: str
    bracket_max: float
    components: list[dict] = field(default_factory=list)
    real_deviation: list[float] = field(default_factory=list)
    transport: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "applicable": self.applicable,
            "message": self.message,
            "bracket_max": self.bracket_max,
            "components": self.components,
            "real_deviation": self.real_deviation,
            "transport": self.transport,
        }


def max_bracket_residual(F: IntegralCoeffs, metric: Metric, rmap: RegionMap) -> float:
    worst = 0.0
    for i in range(rmap.shape[0]):
        for j in range(rmap.shape[1]):
            res = bracket_residual(F, metric, (rmap.u1[i, j], rmap.u2[i, j]))
            worst = max(worst, float(np.max(np.abs(res))))
    return worst


def _nan_max(x) -> float:
    x = np.asarray(x, dtype=float)
    x = x[np.isfinite(x)]
    return float(np.max(x)) if x.size else 0.0


def transport_residuals(rmap: RegionMap) -> list[float]:
    """max |(r_i)_t + lambda_i (r_i)_x| over nodes whose four neighbours share the root count.

    Axis 0 is t, axis 1 is x; centered periodic differences.
    """
    ht, hx = rmap.spacing
    nreal = np.sum(np.isfinite(rmap.real_r), axis=2)
    same = rmap.classes != DEG
    for axis in (0, 1):
        for shift in (1, -1):
            same &= np.roll(nreal, shift, axis) == nreal
            same &= np.roll(rmap.classes, shift, axis) != DEG
    out = []
    for k in range(rmap.degree):
        r = rmap.real_r[..., k]
        lam = rmap.real_lam[..., k]
        ok = same & np.isfinite(r)
        if not np.any(ok):
            continue
        rt = (np.roll(r, -1, 0) - np.roll(r, 1, 0)) / (2 * ht)
        rx = (np.roll(r, -1, 1) - np.roll(r, 1, 1)) / (2 * hx)
        out.append(_nan_max(np.abs(rt + lam * rx)[ok]))
    return out


def constancy_and_transport_check(rmap: RegionMap, metric: Metric, F: IntegralCoeffs,
                                  bracket_tol: float = 1e-8) -> ConstancyReport:
    """Check that elliptic invariants are constant and real invariants are transported."""
    bmax = max_bracket_residual(F, metric, rmap)
    if bmax > bracket_tol:
        return ConstancyReport(False, "not an integral; constancy check inapplicable "
                               f"(bracket residual {bmax:.3g} > {bracket_tol:g})", bmax)
    rep = ConstancyReport(True, "ok", bmax)
    comps = connected_components(rmap)
    for c in comps.components:
        vals = rmap.pair_r[c.nodes[:, 0], c.nodes[:, 1]]
        u, v = vals.real, vals.imag
        entry = {
            "size": c.size,
            "boundary": c.boundary,
            "u_deviation": float(np.max(np.abs(u - u.mean()))),
            "v_deviation": float(np.max(np.abs(v - v.mean()))),
        }
        if c.boundary:
            entry["max_abs_v"] = float(np.max(np.abs(v)))
        rep.components.append(entry)
    hyp = rmap.classes == HYP
    for k in range(rmap.degree):
        r = rmap.real_r[..., k][hyp]
        r = r[np.isfinite(r)]
        if r.size:
            rep.real_deviation.append(float(np.max(np.abs(r - r.mean()))))
    if isinstance(metric, SemiGeodesicMetric):
        rep.transport = transport_residuals(rmap)
    elif not isinstance(metric, ConformalMetric):
        raise TypeError("unsupported metric")
    return rep


# --- output -------------------------------------------------------------------------


def write_pgm(rmap: RegionMap, path, comment: str | None = None) -> None:
    """Binary P5 map; rows follow u1, columns follow u2."""
    img = rmap.gray()
    h, w = img.shape
    head = b"P5\n"
    if comment:
        head += b"# " + comment.encode("ascii", "replace") + b"\n"
    head += f"{w} {h}\n255\n".encode()
    with open(path, "wb") as fh:
        fh.write(head + img.tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    tokens, pos = [], 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        tokens.append(data[pos:end])
        pos = end
    if tokens[0] != b"P5":
        raise ValueError("not a binary PGM")
    w, h = int(tokens[1]), int(tokens[2])
    return np.frombuffer(data[pos + 1:pos + 1 + w * h], dtype=np.uint8).reshape(h, w)


def _fmt(x) -> str:
    return "%.17g" % x


def write_csv(rmap: RegionMap, path, comment: str | None = None) -> None:
    n = rmap.degree
    cols = ["i1", "i2", "u1", "u2", "class"]
    cols += [f"s{k}" for k in range(n)] + [f"r{k}" for k in range(n)] + [f"lambda{k}" for k in range(n)]
    cols += ["pair_alpha", "pair_beta", "pair_u", "pair_v"]
    lines = []
    if comment:
        lines.append("# " + comment)
    lines.append(",".join(cols))
    n1, n2 = rmap.shape
    for i in range(n1):
        for j in range(n2):
            row = [str(i), str(j), _fmt(rmap.u1[i, j]), _fmt(rmap.u2[i, j]), rmap.class_at(i, j).value]
            for arr in (rmap.real_s, rmap.real_r, rmap.real_lam):
                row += [_fmt(v) for v in arr[i, j]]
            ps, pr = rmap.pair_s[i, j], rmap.pair_r[i, j]
            row += [_fmt(ps.real), _fmt(ps.imag), _fmt(pr.real), _fmt(pr.imag)]
            lines.append(",".join(row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")

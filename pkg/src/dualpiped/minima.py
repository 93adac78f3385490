"""Lattice point enumeration in dilates and successive minima.

All searches work on coefficient vectors k with respect to a lattice basis B:
the gauge of the lattice point Bk under a parallelepiped (H, eta) is the sup
norm of C k where C = diag(1/eta) H B. Enumeration reports one canonical
representative per antipodal pair (first nonzero coordinate positive) and
never reports the origin. Points are ordered by (gauge, coefficient vector),
with exact lexicographic tie-breaking, so results are deterministic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .bodies import Lattice, Parallelepiped
from .linalg import Matrix, RationalSpan
from .scalars import Quad3, Scalar, as_float, scalar_ceil, scalar_floor, scalar_sign

GRID_CELL_CAP = 2_000_000
NODE_CAP = 3_000_000
FLOAT_SLACK = 1e-9
REDUCTION_CELL_FLOOR = 4096


class EnumerationBudgetError(RuntimeError):
    """The search exceeded its node or round budget without an answer."""


def gauge_rows(piped: Parallelepiped, lattice: Lattice) -> tuple:
    """Rows of diag(1/eta) H B; gauge of Bk is the sup norm of (rows) k."""
    hb = piped.forms.matmul(lattice.basis)
    return tuple(
        tuple(x / e for x in row) for row, e in zip(hb.rows, piped.bounds)
    )


def lattice_points_in_dilate(c_rows, mu, *, node_cap: int = NODE_CAP) -> list:
    """All (gauge, k) with sup norm of (c_rows) k at most mu, k != 0.

    One representative per antipodal pair, sorted by (gauge, k). Exact
    scalar rows decide boundary membership exactly; float rows include a
    relative slack of 1e-9. Skewed rows are first straightened by a
    unimodular change of coordinates, which shrinks the search box without
    changing the reported points.
    """
    d = len(c_rows)
    if any(len(row) != d for row in c_rows):
        raise ValueError("c_rows must be square")
    if scalar_sign(mu) <= 0:
        return []
    is_float = isinstance(c_rows[0][0], float)
    box = _dilate_box(Matrix(c_rows).inverse(), mu, is_float)
    if _cell_count(box) > REDUCTION_CELL_FLOOR:
        u = _reduction_transform(c_rows)
        if u is not None:
            return _points_reduced(c_rows, mu, u, is_float, node_cap)
    if is_float and _cell_count(box) <= GRID_CELL_CAP:
        return _grid_points_float(c_rows, float(mu), box)
    return _branch_points(c_rows, mu, box, is_float, node_cap)


def _dilate_box(cinv: Matrix, mu, is_float: bool) -> list:
    """Per-coordinate bound floor(mu * l1 norm of each inverse row)."""
    box = []
    for row in cinv.rows:
        width = abs(row[0])
        for x in row[1:]:
            width = width + abs(x)
        width = mu * width
        box.append(math.floor(width + 1e-9) if is_float else scalar_floor(width))
    return box


def _cell_count(box) -> int:
    cells = 1
    for b in box:
        cells *= 2 * b + 1
    return cells


def _reduction_transform(c_rows):
    """Integer unimodular u such that the columns of (c_rows) u are short.

    The reduction runs on a rational snapshot of the rows, so it applies to
    float, rational, and quadratic entries alike; u is exactly unimodular in
    every case, and None means the coordinates are already fine. The
    transform depends on the rows but not on the dilate, so repeated calls
    for the same body hit a cache.
    """
    d = len(c_rows)
    if d < 2:
        return None
    largest = 0.0
    snapshot = []
    for i in range(d):
        row = []
        for j in range(d):
            x = as_float(c_rows[i][j])
            if not math.isfinite(x):
                return None
            largest = max(largest, abs(x))
            row.append(x)
        snapshot.append(row)
    if largest == 0.0:
        return None
    scale = 2.0 ** -math.floor(math.log2(largest))
    key = tuple(tuple(x * scale for x in row) for row in snapshot)
    return _cached_reduction(key)


@lru_cache(maxsize=512)
def _cached_reduction(snapshot):
    d = len(snapshot)
    cols = [
        [Fraction(snapshot[i][j]).limit_denominator(10**6) for i in range(d)]
        for j in range(d)
    ]
    return _lll_unimodular(cols)


def _lll_unimodular(cols, delta=Fraction(3, 4)):
    """Track the column operations of an exact LLL pass over rational columns.

    Returns the transform as row-major integer tuples, or None when the
    columns are degenerate or already reduced. Exact arithmetic guarantees
    the swap condition never flip-flops on rounding noise; a wrong or weak
    transform could only slow the search down, never change its answer,
    because callers re-derive every box and gauge from the transformed rows.
    """
    n = len(cols)
    b = [list(c) for c in cols]
    u_cols = [[int(i == j) for i in range(n)] for j in range(n)]

    # one exact Gram-Schmidt pass; swaps later update it in place
    bstar: list = []
    mus = [[Fraction(0)] * n for _ in range(n)]
    norms: list = []
    for i in range(n):
        v = list(b[i])
        for j in range(i):
            if norms[j] == 0:
                return None
            m = sum(p * q for p, q in zip(b[i], bstar[j])) / norms[j]
            mus[i][j] = m
            v = [p - m * q for p, q in zip(v, bstar[j])]
        bstar.append(v)
        norms.append(sum(p * p for p in v))
    if norms[-1] == 0:
        return None

    k = 1
    steps = 0
    while k < n and steps < 10_000:
        steps += 1
        for j in range(k - 1, -1, -1):
            q = round(mus[k][j])
            if q:
                b[k] = [p - q * r for p, r in zip(b[k], b[j])]
                u_cols[k] = [p - q * r for p, r in zip(u_cols[k], u_cols[j])]
                for i in range(j):
                    mus[k][i] -= q * mus[j][i]
                mus[k][j] -= q
        if norms[k] >= (delta - mus[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            u_cols[k], u_cols[k - 1] = u_cols[k - 1], u_cols[k]
            # constant-size update of the orthogonalization state
            mu_old = mus[k][k - 1]
            norm_up = norms[k] + mu_old * mu_old * norms[k - 1]
            if norm_up == 0:
                return None
            mus[k][k - 1] = mu_old * norms[k - 1] / norm_up
            norms[k] = norms[k - 1] * norms[k] / norm_up
            norms[k - 1] = norm_up
            for j in range(k - 1):
                mus[k][j], mus[k - 1][j] = mus[k - 1][j], mus[k][j]
            for i in range(k + 1, n):
                t = mus[i][k]
                mus[i][k] = mus[i][k - 1] - mu_old * t
                mus[i][k - 1] = t + mus[k][k - 1] * mus[i][k]
            k = max(k - 1, 1)
    u = tuple(tuple(u_cols[m][j] for m in range(n)) for j in range(n))
    if all(u[i][j] == (i == j) for i in range(n) for j in range(n)):
        return None
    return u


def _points_reduced(c_rows, mu, u, is_float: bool, node_cap: int) -> list:
    """Enumerate in reduced coordinates, then map points back through u.

    Exact rows keep exact gauges (the change of coordinates commutes with
    the arithmetic); float rows recompute every surviving gauge against the
    original rows so the reported values match the unreduced paths.
    """
    d = len(c_rows)
    reduced = []
    for row in c_rows:
        new_row = []
        for m in range(d):
            acc = row[0] * u[0][m]
            for j in range(1, d):
                acc = acc + row[j] * u[j][m]
            new_row.append(acc)
        reduced.append(tuple(new_row))
    if is_float:
        capture = float(mu) * (1.0 + 1e-7) + 1e-12
        box = _dilate_box(Matrix(reduced).inverse(), capture, True)
        if _cell_count(box) <= GRID_CELL_CAP:
            return _reduced_grid_float(c_rows, reduced, float(mu), capture, box, u)
        raw = _branch_points(reduced, capture, box, True, node_cap)
        cutoff = float(mu) + FLOAT_SLACK * max(1.0, float(mu))
        out = []
        for _, kp in raw:
            k = tuple(sum(u[j][m] * kp[m] for m in range(d)) for j in range(d))
            gauge = max(abs(sum(row[j] * k[j] for j in range(d))) for row in c_rows)
            if gauge > cutoff:
                continue
            lead = next((x for x in k if x != 0), 0)
            if lead < 0:
                k = tuple(-x for x in k)
            out.append((gauge, k))
        out.sort(key=lambda t: (t[0], t[1]))
        return out
    box = _dilate_box(Matrix(reduced).inverse(), mu, False)
    raw = _branch_points(reduced, mu, box, False, node_cap)
    out = []
    for gauge, kp in raw:
        k = tuple(sum(u[j][m] * kp[m] for m in range(d)) for j in range(d))
        lead = next((x for x in k if x != 0), 0)
        if lead < 0:
            k = tuple(-x for x in k)
        out.append((gauge, k))
    out.sort(key=lambda t: (t[0], t[1]))
    return out


def _reduced_grid_float(c_rows, reduced, mu: float, capture: float, box, u) -> list:
    c = np.array([[float(x) for x in row] for row in c_rows], dtype=float)
    r = np.array([[float(x) for x in row] for row in reduced], dtype=float)
    u_mat = np.array(u, dtype=np.int64)
    axes = [np.arange(-b, b + 1, dtype=np.int64) for b in box]
    mesh = np.meshgrid(*axes, indexing="ij")
    kp = np.stack([m.ravel() for m in mesh], axis=1)
    coarse = np.abs(kp @ r.T).max(axis=1) <= capture + FLOAT_SLACK * max(1.0, capture)
    kp = kp[coarse]
    k = kp @ u_mat.T
    g = np.abs(k @ c.T).max(axis=1)
    keep = g <= mu + FLOAT_SLACK * max(1.0, mu)
    k = k[keep]
    g = g[keep]
    nonzero = k != 0
    lead = k[np.arange(len(k)), np.argmax(nonzero, axis=1)]
    canonical = nonzero.any(axis=1) & (lead > 0)
    out = [
        (float(gv), tuple(int(x) for x in kv))
        for gv, kv in zip(g[canonical], k[canonical])
    ]
    out.sort(key=lambda t: (t[0], t[1]))
    return out


def _grid_points_float(c_rows, mu: float, box) -> list:
    c = np.array([[float(x) for x in row] for row in c_rows], dtype=float)
    axes = [np.arange(-b, b + 1, dtype=np.int32) for b in box]
    mesh = np.meshgrid(*axes, indexing="ij")
    k = np.stack([m.ravel() for m in mesh], axis=1)
    g = np.abs(k @ c.T).max(axis=1)
    keep = g <= mu + FLOAT_SLACK * max(1.0, mu)
    k = k[keep]
    g = g[keep]
    nonzero = k != 0
    lead = k[np.arange(len(k)), np.argmax(nonzero, axis=1)]
    canonical = nonzero.any(axis=1) & (lead > 0)
    out = [
        (float(gv), tuple(int(x) for x in kv))
        for gv, kv in zip(g[canonical], k[canonical])
    ]
    out.sort(key=lambda t: (t[0], t[1]))
    return out


def _branch_points(c_rows, mu, box, is_float: bool, node_cap: int) -> list:
    """Depth-first search with interval propagation; exact or float scalars."""
    d = len(c_rows)
    if is_float:
        mu_eff = float(mu) + FLOAT_SLACK * max(1.0, float(mu))

        def int_floor(x):
            return math.floor(x + 1e-9)

        def int_ceil(x):
            return math.ceil(x - 1e-9)

    else:
        mu_eff = mu
        int_floor = scalar_floor
        int_ceil = scalar_ceil

    results: list = []
    assignment = [0] * d
    nodes = 0

    def propagate(lo, hi, fixed, free) -> bool:
        # tighten: for each form i, fixed_i + sum_j c_ij k_j must lie in
        # [-mu, mu]; a few passes are enough, correctness never depends on
        # reaching a fixpoint because leaves recheck the true gauge
        for _ in range(3):
            changed = False
            for i in range(d):
                row = c_rows[i]
                mins = {}
                maxs = {}
                total_min = 0
                total_max = 0
                for j in free:
                    t1 = row[j] * lo[j]
                    t2 = row[j] * hi[j]
                    if t2 < t1:
                        t1, t2 = t2, t1
                    mins[j] = t1
                    maxs[j] = t2
                    total_min = total_min + t1
                    total_max = total_max + t2
                base = fixed[i]
                if base + total_min > mu_eff or base + total_max < -mu_eff:
                    return False
                for j in free:
                    cij = row[j]
                    if scalar_sign(cij) == 0:
                        continue
                    low_target = -mu_eff - base - (total_max - maxs[j])
                    high_target = mu_eff - base - (total_min - mins[j])
                    if scalar_sign(cij) > 0:
                        new_lo = int_ceil(low_target / cij)
                        new_hi = int_floor(high_target / cij)
                    else:
                        new_lo = int_ceil(high_target / cij)
                        new_hi = int_floor(low_target / cij)
                    if new_lo > lo[j]:
                        lo[j] = new_lo
                        changed = True
                    if new_hi < hi[j]:
                        hi[j] = new_hi
                        changed = True
                    if lo[j] > hi[j]:
                        return False
            if not changed:
                break
        return True

    def search(lo, hi, fixed, free) -> None:
        nonlocal nodes
        nodes += 1
        if nodes > node_cap:
            raise EnumerationBudgetError(
                f"enumeration exceeded {node_cap} nodes; the dilate is too large"
            )
        lo = list(lo)
        hi = list(hi)
        if not propagate(lo, hi, fixed, free):
            return
        if not free:
            gauge = abs(fixed[0])
            for f in fixed[1:]:
                af = abs(f)
                if af > gauge:
                    gauge = af
            if gauge <= mu_eff:
                results.append((gauge, tuple(assignment)))
            return
        j = min(free, key=lambda jj: hi[jj] - lo[jj])
        rest = [jj for jj in free if jj != j]
        for v in range(lo[j], hi[j] + 1):
            assignment[j] = v
            search(lo, hi, [fixed[i] + c_rows[i][j] * v for i in range(d)], rest)
        assignment[j] = 0

    search([-b for b in box], list(box), [0] * d, list(range(d)))
    out = []
    for gauge, k in results:
        lead = next((x for x in k if x != 0), 0)
        if lead > 0:
            out.append((gauge, k))
    out.sort(key=lambda t: (t[0], t[1]))
    return out


@dataclass(frozen=True)
class MinimaProfile:
    """Successive minima values with independent witness coefficient vectors."""

    values: tuple
    witnesses: tuple

    def __post_init__(self) -> None:
        if len(self.values) != len(self.witnesses):
            raise ValueError("values and witnesses must have equal length")
        for a, b in zip(self.values, self.values[1:]):
            if not a <= b:
                raise ValueError("minima must be nondecreasing")
        if self.witnesses:
            span = RationalSpan(len(self.witnesses[0]))
            for w in self.witnesses:
                if not span.add([Fraction(x) for x in w]):
                    raise ValueError("witnesses must be linearly independent")


def _exact_radius(x) -> Scalar:
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, (Fraction, Quad3)):
        return x
    raise TypeError("exact instances need an exact initial radius")


def successive_minima(
    piped: Parallelepiped,
    lattice: Lattice | None = None,
    k_max: int | None = None,
    *,
    initial_radius=None,
    max_rounds: int = 42,
    node_cap: int = NODE_CAP,
) -> MinimaProfile:
    """First k_max successive minima of the lattice with respect to the body.

    Enumerates a dilate, greedily extracts an independent subset in
    (gauge, k) order, and doubles the dilate until k_max independent points
    appear. The starting radius defaults to the Minkowski volume bound.
    """
    d = piped.dimension
    if lattice is None:
        lattice = Lattice.integers(d, kind=piped.kind if piped.kind == "float" else "rational")
    if k_max is None:
        k_max = d
    if not 1 <= k_max <= d:
        raise ValueError("k_max must lie in 1..dimension")
    rows = gauge_rows(piped, lattice)
    is_float = piped.kind == "float"
    if initial_radius is None:
        # mu_1^d vol(Pi) <= 2^d covol, so this dilate can already contain
        # a first witness; doubling handles the rest
        start = (
            2**d * as_float(lattice.covolume()) / (math.factorial(d) * as_float(piped.volume()))
        ) ** (1.0 / d)
        radius = start if is_float else max(
            Fraction(start).limit_denominator(1_000_000), Fraction(1, 1024)
        )
    else:
        radius = float(initial_radius) if is_float else _exact_radius(initial_radius)
    for _ in range(max_rounds):
        points = lattice_points_in_dilate(rows, radius, node_cap=node_cap)
        span = RationalSpan(d)
        values = []
        witnesses = []
        for gauge, k in points:
            if span.add(k):
                values.append(gauge)
                witnesses.append(k)
                if len(values) == k_max:
                    return MinimaProfile(tuple(values), tuple(witnesses))
        radius = radius * 2
    raise EnumerationBudgetError(
        f"fewer than {k_max} independent lattice points found in {max_rounds} rounds"
    )


def first_minimum(
    piped: Parallelepiped,
    lattice: Lattice | None = None,
    *,
    initial_radius=None,
    max_rounds: int = 42,
    node_cap: int = NODE_CAP,
):
    """The first minimum and one witness coefficient vector."""
    profile = successive_minima(
        piped,
        lattice,
        1,
        initial_radius=initial_radius,
        max_rounds=max_rounds,
        node_cap=node_cap,
    )
    return profile.values[0], profile.witnesses[0]


@dataclass(frozen=True)
class OrthogonalSublattice:
    """Integer points orthogonal to a primitive vector, with exact covolume."""

    vector: tuple
    basis_columns: tuple
    covolume_squared: int

    def covolume(self) -> float:
        return math.sqrt(self.covolume_squared)


def orthogonal_sublattice(v: Sequence[int]) -> OrthogonalSublattice:
    """Basis of {k in Z^d : <v, k> = 0} for primitive integer v.

    Column reduction of v with a tracked unimodular matrix yields the kernel
    columns; a column Hermite normal form makes the basis canonical. The
    squared covolume (Gram determinant) always equals |v|^2.
    """
    if not all(isinstance(x, int) for x in v):
        raise TypeError("vector entries must be integers")
    t = list(v)
    d = len(t)
    if d == 0 or math.gcd(*(abs(x) for x in t)) != 1:
        raise ValueError("vector must be primitive (nonzero, gcd 1)")
    u_cols = [[int(i == j) for i in range(d)] for j in range(d)]
    while True:
        support = [j for j in range(d) if t[j] != 0]
        if len(support) == 1:
            break
        p = min(support, key=lambda j: abs(t[j]))
        for j in support:
            if j == p:
                continue
            q = t[j] // t[p]
            if q:
                t[j] -= q * t[p]
                u_cols[j] = [a - q * b for a, b in zip(u_cols[j], u_cols[p])]
    pivot = support[0]
    kernel = [u_cols[j] for j in range(d) if j != pivot]
    basis = _column_hnf(kernel, d)
    if basis:
        gram = Matrix(
            [
                [Fraction(sum(a * b for a, b in zip(c1, c2))) for c2 in basis]
                for c1 in basis
            ]
        )
        covol2 = int(gram.det())
    else:
        covol2 = 1
    return OrthogonalSublattice(tuple(v), tuple(basis), covol2)


def _column_hnf(cols, d: int) -> tuple:
    """Canonical column form: positive pivots, earlier columns reduced mod pivot."""
    cols = [list(c) for c in cols]
    n = len(cols)
    placed = 0
    for row in range(d):
        if placed == n:
            break
        while True:
            active = [j for j in range(placed, n) if cols[j][row] != 0]
            if len(active) <= 1:
                break
            p = min(active, key=lambda j: abs(cols[j][row]))
            for j in active:
                if j == p:
                    continue
                q = cols[j][row] // cols[p][row]
                if q:
                    cols[j] = [a - q * b for a, b in zip(cols[j], cols[p])]
        if not active:
            continue
        j0 = active[0]
        cols[placed], cols[j0] = cols[j0], cols[placed]
        if cols[placed][row] < 0:
            cols[placed] = [-x for x in cols[placed]]
        pivot_value = cols[placed][row]
        for j in range(placed):
            q = cols[j][row] // pivot_value
            if q:
                cols[j] = [a - q * b for a, b in zip(cols[j], cols[placed])]
        placed += 1
    return tuple(tuple(c) for c in cols)

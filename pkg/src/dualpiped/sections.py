"""Central cube sections, the normalized section volume, and section-dual bodies.

The (d-1)-volume of the section of [-1,1]^d orthogonal to a direction a with
no zero coordinate is

    |a| * S(|a|) / ((d-1)! * prod |a_i|),
    S(a) = sum over sign patterns s of (-1)^{#negative} * (s.a)_+^{d-1},

the truncated-power form of the density of sum a_i U_i at zero. Unlike the
divided-difference form it has no singular denominators, so repeated
coefficients need no perturbation. Zero coordinates factor out of the section
as whole cube edges, contributing 2 each.

The section-dual body of Pi = A B_d collects the points A'z whose defining
hyperplane cuts a unit-volume section out of Pi; its gauge at z works out to
|w| / (2^{1-d} vol(w-section)) with w = A^T z / det A, a ratio in which the
irrational |w| cancels, so exact scalar kinds stay exact.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bodies import Parallelepiped
from .linalg import Matrix
from .minima import EnumerationBudgetError, lattice_points_in_dilate
from .scalars import Quad3, Scalar, scalar_sign, sqrt_exact

# relative size under which the alternating sum is recomputed exactly
_CANCELLATION_GUARD = 1e-7


def _pow(x, n: int):
    out = None
    for _ in range(n):
        out = x if out is None else out * x
    return out if out is not None else 1


def _signed_power_sum(parts, power: int):
    """S(a): alternating sum of positive parts raised to `power`."""
    total = 0
    for signs in itertools.product((1, -1), repeat=len(parts)):
        s = 0
        negatives = 0
        for x, sg in zip(parts, signs):
            if sg > 0:
                s = s + x
            else:
                s = s - x
                negatives += 1
        if scalar_sign(s) > 0:
            term = _pow(s, power)
            total = total - term if negatives % 2 else total + term
    return total


def _section_ratio(parts, is_float: bool):
    """S(a) / ((d'-1)! * prod a_i) for positive parts a; exact when possible.

    The float path watches the alternating sum for cancellation and redoes
    the ratio in exact dyadic rationals when it strikes; the ratio itself is
    well conditioned, only the naive summation order is not.
    """
    power = len(parts) - 1
    fact = math.factorial(power)
    if not is_float:
        prod = parts[0]
        for x in parts[1:]:
            prod = prod * x
        return _signed_power_sum(parts, power) / (fact * prod)
    total = 0.0
    biggest = 0.0
    for signs in itertools.product((1, -1), repeat=len(parts)):
        s = 0.0
        negatives = 0
        for x, sg in zip(parts, signs):
            if sg > 0:
                s += x
            else:
                s -= x
                negatives += 1
        if s > 0.0:
            term = s**power
            biggest = max(biggest, term)
            total = total - term if negatives % 2 else total + term
    if total <= biggest * _CANCELLATION_GUARD:
        exact = [Fraction(x) for x in parts]
        prod = Fraction(1)
        for x in exact:
            prod *= x
        return float(_signed_power_sum(exact, power) / (fact * prod))
    prod = 1.0
    for x in parts:
        prod *= x
    return total / (fact * prod)


def _split_direction(a, d: int):
    a = tuple(a)
    if len(a) != d:
        raise ValueError("direction length must equal the dimension")
    if d < 2:
        raise ValueError("dimension must be at least 2")
    is_float = any(isinstance(x, float) for x in a)
    if is_float:
        entries = tuple(float(x) for x in a)
    else:
        entries = tuple(Fraction(x) if isinstance(x, int) else x for x in a)
    parts = [abs(x) for x in entries if scalar_sign(x) != 0]
    if not parts:
        raise ValueError("direction must be nonzero")
    return entries, parts, is_float


def _sqrt_exact_or_quad(x):
    root = sqrt_exact(x)
    if root is None and isinstance(x, (int, Fraction)):
        root = sqrt_exact(Quad3(x))
    return root


def cube_section_volume(a: Sequence[Scalar], d: int) -> Scalar:
    """(d-1)-volume of the central section of [-1,1]^d orthogonal to a.

    Exact inputs give an exact value whenever |a| lies in Q(sqrt3), a float
    otherwise; invariant under permutations, sign flips, and positive scaling.
    """
    _, parts, is_float = _split_direction(a, d)
    zeros = d - len(parts)
    if len(parts) == 1:
        # the section is a facet-parallel slice
        return 2.0 ** (d - 1) if is_float else Fraction(2 ** (d - 1))
    ratio = _section_ratio(parts, is_float)
    norm2 = 0
    for x in parts:
        norm2 = norm2 + x * x
    if is_float:
        return 2.0**zeros * math.sqrt(norm2) * ratio
    root = _sqrt_exact_or_quad(norm2)
    if root is None:
        return 2.0**zeros * math.sqrt(float(norm2)) * float(ratio)
    return 2**zeros * root * ratio


def section3_area(x: Scalar) -> Scalar:
    """Area of the section of [-1,1]^3 orthogonal to (x, 1, 1): (4-x)sqrt(2+x^2).

    An elementary cross-check for the general formula, valid on 0 <= x <= 1.
    """
    if isinstance(x, float):
        if not 0.0 <= x <= 1.0:
            raise ValueError("x must lie in [0, 1]")
        return (4.0 - x) * math.sqrt(2.0 + x * x)
    if isinstance(x, int):
        x = Fraction(x)
    if scalar_sign(x) < 0 or scalar_sign(1 - x) < 0:
        raise ValueError("x must lie in [0, 1]")
    inner = 2 + x * x
    root = _sqrt_exact_or_quad(inner)
    if root is None:
        return float(4 - x) * math.sqrt(float(inner))
    return (4 - x) * root


def v_tau(tau: Sequence[Scalar]) -> Scalar:
    """Normalized section volume 2^{1-d} vol(section orthogonal to tau).

    Defined for every nonzero direction, invariant under signs and positive
    scaling; Vaaler's and Ball's theorems pin it into [1, sqrt(2)].
    """
    d = len(tau)
    vol = cube_section_volume(tau, d)
    if isinstance(vol, float):
        return vol * 2.0 ** (1 - d)
    return vol * Fraction(1, 2 ** (d - 1))


def v_tau_squared(tau: Sequence[Scalar]) -> Scalar:
    """Exact square of v_tau; float inputs are read as exact dyadic rationals.

    The square drops the lone square root in v_tau, so comparisons against
    rational thresholds can be decided exactly.
    """
    d = len(tau)
    if d < 2:
        raise ValueError("dimension must be at least 2")
    exact = [Fraction(t) if isinstance(t, (int, float)) else t for t in tau]
    parts = [abs(t) for t in exact if scalar_sign(t) != 0]
    if not parts:
        raise ValueError("the direction must have a nonzero coordinate")
    if len(parts) == 1:
        return Fraction(1)
    zeros = d - len(parts)
    ratio = _section_ratio(parts, False)
    norm2 = 0
    for t in parts:
        norm2 = norm2 + t * t
    return norm2 * ratio * ratio * Fraction(4**zeros, 4 ** (d - 1))


def _wedge_gauge(w, d: int) -> Scalar:
    """Gauge of the section-dual of the cube at w; rational in the entries."""
    is_float = any(isinstance(x, float) for x in w)
    parts = [abs(x) for x in w if scalar_sign(x) != 0]
    if not parts:
        return 0.0 if is_float else Fraction(0)
    if len(parts) == 1:
        return parts[0]
    zeros = d - len(parts)
    ratio = _section_ratio(parts, is_float)
    if is_float:
        return 2.0 ** (d - 1 - zeros) / ratio
    return Fraction(2 ** (d - 1 - zeros)) / ratio


def section_dual_gauge(piped: Parallelepiped, z: Sequence[Scalar]) -> Scalar:
    """Gauge of the section-dual body of the parallelepiped at the point z.

    With Pi = A B_d for A = H^{-1} diag(eta), the point z is pulled back to
    w = A^T z / det A and measured against the section-dual of the cube.
    Exact kinds return exact values; membership in the body is gauge <= 1.
    """
    d = piped.dimension
    a = piped.forms.inverse().matmul(Matrix.diagonal(piped.bounds))
    det = a.det()
    w = tuple(x / det for x in a.transpose().matvec(tuple(z)))
    return _wedge_gauge(w, d)


def first_minimum_section_dual(
    piped: Parallelepiped,
    *,
    max_rounds: int = 42,
    node_cap: int = 3_000_000,
) -> Scalar:
    """Minimum section-dual gauge over nonzero integer points; d <= 6.

    Enumeration is complete because the gauge dominates the sup norm of
    w = A^T z / det A (every central section is a graph over the facet
    hyperplane of its largest coefficient, so the section volume is at most
    2^{d-1} |w| / max|w_i|); a doubling sup-norm box finds a first candidate
    and one final box of that gauge radius settles the minimum.
    """
    d = piped.dimension
    if not 2 <= d <= 6:
        raise ValueError("section-dual minimum supports dimensions 2 through 6")
    a = piped.forms.inverse().matmul(Matrix.diagonal(piped.bounds))
    det = a.det()
    c_rows = tuple(tuple(x / det for x in row) for row in a.transpose().rows)
    cmat = Matrix(c_rows)
    is_float = piped.kind == "float"
    start = abs(float(det)) ** ((1 - d) / d)
    if is_float:
        radius = start
    else:
        radius = max(Fraction(start).limit_denominator(1_000_000), Fraction(1, 1024))
    points: list = []
    for _ in range(max_rounds):
        points = lattice_points_in_dilate(c_rows, radius, node_cap=node_cap)
        if points:
            break
        radius = radius * 2
    if not points:
        raise EnumerationBudgetError(
            f"no integer point found within {max_rounds} doublings"
        )
    best = min(_wedge_gauge(cmat.matvec(k), d) for _, k in points)
    if best > radius:
        points = lattice_points_in_dilate(c_rows, best, node_cap=node_cap)
        best = min(_wedge_gauge(cmat.matvec(k), d) for _, k in points)
    return best


def monte_carlo_section_volume(
    a: Sequence[Scalar],
    d: int,
    *,
    samples: int = 1_000_000,
    seed: int = 0,
    half_width: float = 1e-3,
):
    """Slab estimate of the central section volume and its standard error.

    Counts uniform cube samples within distance half_width of the hyperplane;
    a testing oracle only, deterministic for a given seed.
    """
    entries, _, _ = _split_direction(a, d)
    unit = np.array([float(x) for x in entries])
    unit /= math.sqrt(float(np.dot(unit, unit)))
    rng = np.random.default_rng(seed)
    hits = 0
    remaining = samples
    while remaining > 0:
        n = min(remaining, 262_144)
        x = rng.uniform(-1.0, 1.0, size=(n, d))
        hits += int(np.count_nonzero(np.abs(x @ unit) <= half_width))
        remaining -= n
    p = hits / samples
    scale = 2.0**d / (2.0 * half_width)
    estimate = p * scale
    sigma = math.sqrt(max(p * (1.0 - p), 1e-12) / samples) * scale
    return estimate, sigma

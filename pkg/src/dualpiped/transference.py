"""Transference constants, hyperbolic shifts, and the claim-checking engine.

Claim ids are stable strings used verbatim in reports and CLI filters:
T3, T4, MK2, T5, T6, T7, FAM, FAMSHARP, WM, C12. Every claim is evaluated
against the integer lattice; a claim whose hypothesis fails is reported as
skipped, a conclusion failing beyond tolerance as a violation. Exact scalar
kinds decide pass/fail exactly (irrational thresholds are compared through
powers or polynomial signs); margins are always reported as floats.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .bodies import Parallelepiped, det_normalized, pseudo_compound
from .linalg import Matrix, monotone_root
from .minima import first_minimum, successive_minima
from .scalars import (
    Quad3,
    Scalar,
    ToleranceConfig,
    as_float,
    exact_nth_root,
    scalar_sign,
)
from .sections import (
    first_minimum_section_dual,
    section_dual_gauge,
    v_tau_squared,
)

ALL_CLAIMS = ("T3", "T4", "MK2", "T5", "T6", "T7", "FAM", "FAMSHARP", "WM", "C12")

_MODES = ("plain", "sharp")


def _int_pow(x, n: int):
    out = None
    for _ in range(n):
        out = x if out is None else out * x
    return out if out is not None else 1


def khintchine_pair(theta: Sequence[Scalar]):
    """Dual form matrices (F, G) of the two classical approximation problems.

    Row i of F is x_i - theta_i x_{n+1} (last row x_{n+1}); row i of G is x_i
    (last row theta.x + x_{n+1}). Always F^T G = I, exactly.
    """
    n = len(theta)
    if n < 1:
        raise ValueError("need at least one coefficient")
    is_float = any(isinstance(t, float) for t in theta)
    one = 1.0 if is_float else Fraction(1)
    zero = 0.0 if is_float else Fraction(0)
    f_rows = []
    g_rows = []
    for i in range(n):
        f_row = [zero] * (n + 1)
        f_row[i] = one
        f_row[n] = -theta[i] if is_float else -Fraction(theta[i]) if isinstance(theta[i], int) else -theta[i]
        f_rows.append(f_row)
        g_row = [zero] * (n + 1)
        g_row[i] = one
        g_rows.append(g_row)
    f_rows.append([zero] * n + [one])
    g_rows.append(list(theta) + [one])
    return Matrix(f_rows), Matrix(g_rows)


def mahler_dual_box(lam: Sequence[Scalar], det: Scalar):
    """Mahler's dual bounds: lam_bar = (|D| prod lam)^{1/(d-1)}, (d-1)lam_bar/lam_i.

    Exact inputs stay exact when the root does; otherwise floats are returned.
    """
    d = len(lam)
    if d < 2:
        raise ValueError("need at least two bounds")
    if scalar_sign(det) == 0:
        raise ValueError("determinant must be nonzero")
    if any(scalar_sign(x) <= 0 for x in lam):
        raise ValueError("all bounds must be positive")
    prod = abs(det)
    for x in lam:
        prod = prod * x
    if isinstance(prod, float):
        lam_bar = prod ** (1.0 / (d - 1))
    else:
        lam_bar = exact_nth_root(prod, d - 1)
        if lam_bar is None:
            lam_bar = float(prod) ** (1.0 / (d - 1))
    if isinstance(lam_bar, float):
        return lam_bar, tuple((d - 1) * lam_bar / float(x) for x in lam)
    return lam_bar, tuple((d - 1) * lam_bar / x for x in lam)


def hyperbolic_map(piped: Parallelepiped, tau: Sequence[Scalar]) -> Matrix:
    """The shift A^{-1} diag(tau) A in the parallelepiped's eigenbasis A = diag(1/eta)H."""
    d = piped.dimension
    if len(tau) != d:
        raise ValueError("tau length must equal the dimension")
    a = Matrix.diagonal(tuple(1 / e for e in piped.bounds)).matmul(piped.forms)
    return a.inverse().matmul(Matrix.diagonal(tuple(tau))).matmul(a)


def apply_hyperbolic(piped: Parallelepiped, tau: Sequence[Scalar]) -> Parallelepiped:
    """The image of the body under its hyperbolic shift: bounds scale to tau*eta."""
    d = piped.dimension
    if len(tau) != d:
        raise ValueError("tau length must equal the dimension")
    return Parallelepiped(piped.forms, tuple(t * e for t, e in zip(tau, piped.bounds)))


def _exactify(tau):
    return [Fraction(t) if isinstance(t, int) else t for t in tau]


def normalize_tau(tau: Sequence[Scalar], mode: str = "plain"):
    """Scale tau onto its surface: sum tau^2 = v^2 prod tau^2, v = 1 or v_tau.

    The scale is (sum/(v^2 prod))^{1/(2(d-1))}; exact kinds stay exact when
    that root stays in the field and otherwise fall back to floats.
    """
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}")
    d = len(tau)
    if d < 2:
        raise ValueError("need at least two weights")
    if any(scalar_sign(t) <= 0 for t in tau):
        raise ValueError("all weights must be positive")
    if any(isinstance(t, float) for t in tau):
        values = tuple(float(t) for t in tau)
        sum_sq = sum(t * t for t in values)
        prod = 1.0
        for t in values:
            prod *= t
        v2 = 1.0 if mode == "plain" else float(v_tau_squared(values))
        lam = (sum_sq / (v2 * prod * prod)) ** (1.0 / (2 * (d - 1)))
        return tuple(lam * t for t in values)
    values = _exactify(tau)
    sum_sq = 0
    prod_sq = 1
    for t in values:
        sum_sq = sum_sq + t * t
        prod_sq = prod_sq * t * t
    v2 = 1 if mode == "plain" else v_tau_squared(values)
    ratio = sum_sq / (v2 * prod_sq)
    lam = exact_nth_root(ratio, 2 * (d - 1))
    if lam is None:
        lam_f = float(ratio) ** (1.0 / (2 * (d - 1)))
        return tuple(lam_f * float(t) for t in values)
    return tuple(lam * t for t in values)


def on_surface(tau: Sequence[Scalar], mode: str = "plain", tol: ToleranceConfig | None = None) -> bool:
    """Whether tau satisfies its surface identity, exactly or within tolerance."""
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}")
    if any(scalar_sign(t) <= 0 for t in tau):
        return False
    if any(isinstance(t, float) for t in tau):
        tol = tol if tol is not None else ToleranceConfig()
        values = tuple(float(t) for t in tau)
        sum_sq = sum(t * t for t in values)
        prod = 1.0
        for t in values:
            prod *= t
        v2 = 1.0 if mode == "plain" else float(v_tau_squared(values))
        return tol.close(sum_sq, v2 * prod * prod)
    values = _exactify(tau)
    sum_sq = 0
    prod_sq = 1
    for t in values:
        sum_sq = sum_sq + t * t
        prod_sq = prod_sq * t * t
    v2 = 1 if mode == "plain" else v_tau_squared(values)
    return sum_sq == v2 * prod_sq


def c_d(d: int) -> float:
    """The two-minima constant: sqrt of the root of s^{d-1} = (d-1)s + 1 on (1, oo)."""
    if d < 3:
        raise ValueError("the polynomial degenerates below dimension 3")
    lo = d ** (1.0 / (d - 1))
    hi = d ** (1.0 / (d - 2))
    root = monotone_root(lambda s: s ** (d - 1) - (d - 1) * s - 1, lo, hi)
    return math.sqrt(root)


def t2_root(t1: float, d: int) -> float:
    """Positive root t of t1^2 t^{2(d-1)} = t1^2 + (d-1)t^2; decreasing in t1."""
    if d < 3:
        raise ValueError("the root equation degenerates below dimension 3")
    t1 = float(t1)
    if t1 < 1.0:
        raise ValueError("t1 must be at least 1")
    t1_sq = t1 * t1
    # at t1 = 1 the root sits exactly on c_d^2; inflate the bracket end so
    # float rounding cannot lose the sign change
    hi = c_d(d) ** 2 * (1 + 1e-9)
    root = monotone_root(
        lambda s: t1_sq * s ** (d - 1) - (d - 1) * s - t1_sq, 1.0, hi
    )
    return math.sqrt(root)


def tau_vertex(tau: Sequence[Scalar]):
    """The distinguished corner (prod tau)^{-1} (tau_1, ..., tau_d)."""
    if any(scalar_sign(t) <= 0 for t in tau):
        raise ValueError("all weights must be positive")
    prod = tau[0]
    for t in tau[1:]:
        prod = prod * t
    return tuple(t / prod for t in tau)


@dataclass(frozen=True)
class ClaimReport:
    """Outcome of one claim on one instance.

    Margin is the smallest (bound - attained) across subchecks, as a float;
    status is "pass", "violation", or "skip" (hypothesis unmet or claim not
    evaluatable), never silent.
    """

    claim: str
    status: str
    hypothesis: bool | None
    conclusion: bool | None
    margin: float | None
    detail: str = ""
    witnesses: tuple = ()


def sample_directions(rng: random.Random, d: int, count: int):
    """Positive-orthant direction samples used for the family claims."""
    out = []
    for _ in range(count):
        out.append(tuple(max(abs(rng.gauss(0.0, 1.0)), 1e-6) for _ in range(d)))
    return out


def check_claims(
    piped: Parallelepiped,
    claims: Sequence[str] | None = None,
    *,
    tolerance: ToleranceConfig | None = None,
    rng: random.Random | None = None,
    tau_samples: int = 8,
    directions: Sequence[Sequence[float]] | None = None,
    node_cap: int = 3_000_000,
) -> list:
    """Evaluate the requested claims on one parallelepiped against Z^d.

    The body is det-normalized first (same body, unit form determinant), so
    the pseudo-compound and its volume identities apply directly. Exact
    scalar kinds are judged exactly; floats through the tolerance config.
    """
    requested = tuple(claims) if claims is not None else ALL_CLAIMS
    unknown = [c for c in requested if c not in ALL_CLAIMS]
    if unknown:
        raise ValueError(f"unknown claim ids: {unknown}")
    if tau_samples < 1:
        raise ValueError("tau_samples must be positive")
    d = piped.dimension
    if not 2 <= d <= 8:
        raise ValueError("claim checking supports dimensions 2 through 8")
    tol = tolerance if tolerance is not None else ToleranceConfig()
    rng = rng if rng is not None else random.Random(0)

    body = det_normalized(piped)
    star = pseudo_compound(body)
    is_float = body.kind == "float"
    profile = successive_minima(body, node_cap=node_cap)
    profile_star = successive_minima(star, node_cap=node_cap)
    mu = profile.values
    mu_star = profile_star.values
    vol = body.volume()
    vol_star = star.volume()

    def leq(a, b) -> bool:
        if is_float:
            return tol.leq(as_float(a), as_float(b))
        return a <= b

    def strictly_greater(a, b) -> bool:
        if is_float:
            return tol.strictly_greater(as_float(a), as_float(b))
        return a > b

    def finish(cid, hypothesis, checks, detail="", witnesses=()):
        # checks: (bound, attained, ok) triples; margin = min bound - attained
        if not hypothesis:
            return ClaimReport(cid, "skip", False, None, None,
                               detail or "hypothesis not satisfied", witnesses)
        margin = min((b - a for b, a, _ in checks), default=None)
        ok = all(ok_ for _, _, ok_ in checks)
        return ClaimReport(cid, "pass" if ok else "violation", True, ok,
                           margin, detail, witnesses)

    def claim_t3():
        hyp = leq(mu_star[0], 1)
        checks = [(float(d - 1), as_float(mu[0]), leq(mu[0], d - 1))]
        return finish("T3", hyp, checks, witnesses=(profile.witnesses[0],))

    def claim_t4():
        lower = Fraction(2**d, d) / vol
        upper = Fraction(2**d) * math.factorial(d) / vol
        checks = []
        for k in range(1, d + 1):
            product = mu_star[k - 1] * mu[d - k]
            checks.append((as_float(product), as_float(lower), leq(lower, product)))
            checks.append((as_float(upper), as_float(product), leq(product, upper)))
        return finish("T4", True, checks, detail=f"k = 1..{d} pairings")

    def claim_mk2():
        checks = []
        for which, prof, volume in (("body", mu, vol), ("compound", mu_star, vol_star)):
            product = prof[0]
            for value in prof[1:]:
                product = product * value
            lower = Fraction(2**d, math.factorial(d)) / volume
            upper = Fraction(2**d) / volume
            checks.append((as_float(product), as_float(lower), leq(lower, product)))
            checks.append((as_float(upper), as_float(product), leq(product, upper)))
        return finish("MK2", True, checks, detail="minima products, body and compound")

    def _power_claim(cid, exponent_of):
        hyp = leq(mu_star[0], 1) and leq(1, mu[0])
        checks = []
        for k in range(1, d):
            exponent = exponent_of(k)
            bound = d ** (1.0 / exponent)
            if is_float:
                ok = tol.leq(as_float(mu[k - 1]), bound)
            else:
                ok = _int_pow(mu[k - 1], exponent) <= d
            checks.append((bound, as_float(mu[k - 1]), ok))
        return finish(cid, hyp, checks)

    def claim_t5():
        return _power_claim("T5", lambda k: d - k)

    def claim_t6():
        return _power_claim("T6", lambda k: 2 * (d - k))

    def claim_t7():
        hyp = leq(mu_star[0], 1) and strictly_greater(mu[0], 1)
        bound = c_d(d)
        if is_float:
            ok = tol.leq(as_float(mu[1]), bound)
        else:
            s = mu[1] * mu[1]
            ok = s <= 1 or scalar_sign(_int_pow(s, d - 1) - (d - 1) * s - 1) <= 0
        return finish("T7", hyp, [(bound, as_float(mu[1]), ok)],
                      witnesses=(profile.witnesses[1],))

    if directions is not None:
        if any(len(raw) != d or min(raw) <= 0 for raw in directions):
            raise ValueError("every supplied direction needs d positive entries")
        directions_cache = [tuple(tuple(map(float, raw)) for raw in directions)]
    else:
        directions_cache = []

    def sampled_directions():
        if not directions_cache:
            directions_cache.append(tuple(sample_directions(rng, d, tau_samples)))
        return directions_cache[0]

    float_body = body.to_float() if not is_float else body
    float_cube = Parallelepiped.cube(d, kind="float")

    def _family(cid, mode):
        checks = []
        witnesses = []
        for raw in sampled_directions():
            tau = normalize_tau(raw, mode)
            if not all(math.isfinite(t) for t in tau):
                return ClaimReport(cid, "skip", None, None, None,
                                   "tau normalization left the float range", ())
            shifted = apply_hyperbolic(float_body, tau)
            value, witness = first_minimum(shifted, initial_radius=1.0, node_cap=node_cap)
            ok = tol.leq(float(value), 1.0)
            checks.append((1.0, float(value), ok))
            if not ok:
                witnesses.append(tau)
            if mode == "sharp":
                gauge = section_dual_gauge(float_cube, tau_vertex(tau))
                ok_vertex = tol.leq(float(gauge), 1.0)
                checks.append((1.0, float(gauge), ok_vertex))
                if not ok_vertex:
                    witnesses.append(tau)
        detail = f"{len(sampled_directions())} sampled surface directions"
        return finish(cid, True, checks, detail=detail, witnesses=tuple(witnesses))

    def claim_fam():
        return _family("FAM", "plain")

    def claim_famsharp():
        return _family("FAMSHARP", "sharp")

    def claim_wm():
        if d > 6:
            return ClaimReport("WM", "skip", None, None, None,
                               "section-dual enumeration supports dimensions 2 through 6", ())
        wedge_min = first_minimum_section_dual(body, node_cap=node_cap)
        hyp = leq(wedge_min, 1)
        product = Fraction(1)
        for value in mu[: d - 1]:
            product = product * value
        return finish("WM", hyp, [(1.0, as_float(product), leq(product, 1))])

    def claim_c12():
        vertex_map = body.forms.transpose().matmul(Matrix.diagonal(star.bounds))
        bound = math.sqrt(d)
        checks = []
        witnesses = []
        one = 1.0 if is_float else 1
        for signs in itertools.product((1, -1), repeat=d - 1):
            sigma = (one,) + tuple(one * s for s in signs)
            vertex = vertex_map.matvec(sigma)
            gauge = section_dual_gauge(body, vertex)
            if is_float:
                ok = tol.leq(float(gauge), bound)
            else:
                ok = gauge * gauge <= d
            checks.append((bound, as_float(gauge), ok))
            if not ok:
                witnesses.append(sigma)
        return finish("C12", True, checks,
                      detail="pseudo-compound vertices, one per antipodal pair",
                      witnesses=tuple(witnesses))

    evaluators = {
        "T3": claim_t3,
        "T4": claim_t4,
        "MK2": claim_mk2,
        "T5": claim_t5,
        "T6": claim_t6,
        "T7": claim_t7,
        "FAM": claim_fam,
        "FAMSHARP": claim_famsharp,
        "WM": claim_wm,
        "C12": claim_c12,
    }
    return [evaluators[cid]() for cid in requested]

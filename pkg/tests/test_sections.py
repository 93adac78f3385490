import math
import random
from fractions import Fraction

import pytest

from dualpiped.bodies import Lattice, Parallelepiped
from dualpiped.linalg import Matrix
from dualpiped.sections import (
    cube_section_volume,
    first_minimum_section_dual,
    monte_carlo_section_volume,
    section3_area,
    section_dual_gauge,
    v_tau,
    v_tau_squared,
)
from dualpiped.scalars import Quad3


def _random_unimodular(rng, d, ops=None):
    m = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    for _ in range(ops if ops is not None else 3 * d):
        i, j = rng.sample(range(d), 2)
        c = rng.randint(-2, 2)
        for col in range(d):
            m[i][col] += c * m[j][col]
    return Matrix(m)


def test_cube_section_frozen_values():
    # facet-parallel slice
    for d in (2, 3, 4, 5):
        a = tuple(Fraction(int(i == 0)) for i in range(d))
        assert cube_section_volume(a, d) == Fraction(2 ** (d - 1))
    # main diagonal of the 3-cube: regular hexagon of area 3*sqrt(3)
    assert cube_section_volume((1, 1, 1), 3) == Quad3(0, 3)
    # face diagonal: 2 x 2*sqrt(2) rectangle
    assert cube_section_volume((0, 1, 1), 3) == pytest.approx(4 * math.sqrt(2), rel=1e-12)
    assert cube_section_volume((1.0, 1.0, 0.0, 0.0), 4) == pytest.approx(
        8 * math.sqrt(2), rel=1e-12
    )


def test_cube_section_invariances():
    rng = random.Random(31)
    for _ in range(40):
        d = rng.randint(2, 6)
        a = [rng.uniform(-1, 1) for _ in range(d)]
        if max(abs(x) for x in a) < 1e-3:
            continue
        base = cube_section_volume(tuple(a), d)
        shuffled = a[:]
        rng.shuffle(shuffled)
        flipped = [x if rng.random() < 0.5 else -x for x in shuffled]
        assert cube_section_volume(tuple(flipped), d) == pytest.approx(base, rel=1e-9)
        scaled = [3.7 * x for x in a]
        assert cube_section_volume(tuple(scaled), d) == pytest.approx(base, rel=1e-9)


def test_section3_frozen_values():
    assert section3_area(Fraction(0)) == pytest.approx(4 * math.sqrt(2), rel=1e-12)
    assert section3_area(Fraction(1)) == Quad3(0, 3)
    assert section3_area(Fraction(4, 5)) == pytest.approx(
        Fraction(16, 25) * math.sqrt(66), rel=1e-12
    )
    with pytest.raises(ValueError):
        section3_area(Fraction(3, 2))
    with pytest.raises(ValueError):
        section3_area(-0.1)


def test_section3_matches_general_formula():
    rng = random.Random(17)
    for _ in range(100):
        x = rng.random()
        general = cube_section_volume((x, 1.0, 1.0), 3)
        assert abs(general - section3_area(x)) <= 1e-10


def test_monte_carlo_oracle_agrees():
    estimate, sigma = monte_carlo_section_volume((1, 1, 0, 0), 4, samples=1_000_000, seed=7)
    assert abs(estimate - 8 * math.sqrt(2)) <= 4 * sigma
    estimate, sigma = monte_carlo_section_volume((1, 1, 1), 3, samples=500_000, seed=8)
    assert abs(estimate - 3 * math.sqrt(3)) <= 4 * sigma


def test_v_tau_frozen_and_scale_invariant():
    assert v_tau((1, 1, 1)) == Quad3(0, Fraction(3, 4))
    assert v_tau((2, 2, 2)) == v_tau((1, 1, 1))
    assert float(v_tau((1, 1, 1))) == pytest.approx(1.299038105676658, rel=1e-12)
    # Ball's extremal direction: two equal coordinates, the rest vanishing,
    # approached inside the positive orthant
    near_axis = v_tau((1, 1e-9, 1e-9))
    assert near_axis == pytest.approx(1.0, abs=1e-6)
    near_diag = v_tau((1, 1, 1e-9, 1e-9))
    assert near_diag == pytest.approx(math.sqrt(2), abs=1e-6)


def test_v_tau_at_degenerate_directions():
    # both extremal directions are reached exactly, not only in the limit
    assert v_tau((1, 0, 0)) == 1
    assert v_tau((0, 0, 3, 0)) == 1
    assert v_tau((1, 1, 0, 0)) == pytest.approx(math.sqrt(2), abs=1e-12)
    assert v_tau_squared((0, 1, 1)) == Fraction(2)
    assert v_tau_squared((1, 0, 0, 0)) == Fraction(1)
    with pytest.raises(ValueError):
        v_tau((0, 0, 0))
    with pytest.raises(ValueError):
        v_tau_squared((0.0, 0.0))


def test_v_tau_within_vaaler_and_ball_bounds():
    rng = random.Random(47)
    for d in range(3, 9):
        for _ in range(170):
            tau = tuple(rng.uniform(1e-3, 1) for _ in range(d))
            v = v_tau(tau)
            assert v >= 1 - 1e-12
            assert v <= math.sqrt(2) + 1e-12


def test_v_tau_squared_is_exact_rational():
    assert v_tau_squared((1, 1, 1)) == Fraction(27, 16)
    assert v_tau_squared((Fraction(4), Fraction(5), Fraction(5))) == Fraction(1056, 625)
    # squares agree with the float value
    for tau in ((1, 2, 3), (5, 1, 1, 2)):
        v2 = v_tau_squared(tau)
        assert isinstance(v2, Fraction)
        assert float(v2) == pytest.approx(v_tau(tuple(float(t) for t in tau)) ** 2, rel=1e-9)


def test_section_dual_gauge_boundary_points():
    b3 = Parallelepiped.cube(3)
    assert section_dual_gauge(b3, (Fraction(3, 4),) * 3) == 1
    assert section_dual_gauge(b3, (Fraction(16, 25), Fraction(4, 5), Fraction(4, 5))) == 1
    assert section_dual_gauge(b3, (1, 1, 1)) == Fraction(4, 3)
    assert section_dual_gauge(b3, (0, 0, 0)) == 0
    # a single nonzero coordinate reduces to its absolute value
    assert section_dual_gauge(b3, (Fraction(-5, 7), 0, 0)) == Fraction(5, 7)


def test_section_dual_gauge_homogeneous_and_even():
    rng = random.Random(3)
    b4 = Parallelepiped.cube(4)
    for _ in range(30):
        z = tuple(Fraction(rng.randint(-8, 8), rng.randint(1, 5)) for _ in range(4))
        t = Fraction(rng.randint(1, 9), rng.randint(1, 9))
        g = section_dual_gauge(b4, z)
        assert section_dual_gauge(b4, tuple(-x for x in z)) == g
        assert section_dual_gauge(b4, tuple(t * x for x in z)) == t * g


def test_section_dual_gauge_transform_equivariance():
    rng = random.Random(29)
    for _ in range(20):
        d = rng.randint(2, 4)
        h = _random_unimodular(rng, d)
        eta = tuple(Fraction(rng.randint(1, 4), rng.randint(1, 3)) for _ in range(d))
        piped = Parallelepiped(h, eta)
        u = _random_unimodular(rng, d)
        z = tuple(Fraction(rng.randint(-5, 5)) for _ in range(d))
        moved = piped.apply_linear(u)
        z_moved = u.cofactor().matvec(z)
        assert section_dual_gauge(moved, z_moved) == section_dual_gauge(piped, z)


def test_section_dual_gauge_quasiconvex():
    rng = random.Random(83)
    piped = Parallelepiped(
        Matrix([[1.0, 0.5, 0.0], [0.0, 1.0, -0.25], [0.5, 0.0, 1.0]]),
        (1.0, 0.75, 1.25),
    )
    for _ in range(60):
        z1 = tuple(rng.uniform(-2, 2) for _ in range(3))
        z2 = tuple(rng.uniform(-2, 2) for _ in range(3))
        t = rng.random()
        mix = tuple(t * a + (1 - t) * b for a, b in zip(z1, z2))
        g = section_dual_gauge(piped, mix)
        assert g <= max(section_dual_gauge(piped, z1), section_dual_gauge(piped, z2)) + 1e-9


def test_cube_vertices_within_sqrt_d_of_section_dual():
    import itertools

    for d in range(2, 8):
        bd = Parallelepiped.cube(d)
        for signs in itertools.product((1, -1), repeat=d):
            g = section_dual_gauge(bd, signs)
            assert g * g <= d


def test_first_minimum_section_dual_frozen():
    b3 = Parallelepiped.cube(3)
    assert first_minimum_section_dual(b3) == 1
    assert first_minimum_section_dual(b3.scale(Fraction(2))) == Fraction(1, 4)
    with pytest.raises(ValueError):
        first_minimum_section_dual(Parallelepiped.cube(7))


def test_first_minimum_section_dual_matches_brute_force():
    import itertools

    rng = random.Random(61)
    for _ in range(10):
        h = _random_unimodular(rng, 3, ops=4)
        eta = tuple(Fraction(rng.randint(2, 5), rng.randint(2, 4)) for _ in range(3))
        piped = Parallelepiped(h, eta)
        value = first_minimum_section_dual(piped)
        brute = min(
            section_dual_gauge(piped, z)
            for z in itertools.product(range(-8, 9), repeat=3)
            if any(z)
        )
        assert value == brute

"""Lattices and parallelepipeds, their duals, and a plain-text file format.

A parallelepiped is stored by its defining forms: row i of `forms` is the
linear form h_i and membership means |h_i(z)| <= bounds[i] for every i.
Lattice bases are stored column-wise: the columns generate.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .linalg import Matrix
from .scalars import (
    Quad3,
    Scalar,
    exact_nth_root,
    format_scalar,
    parse_scalar,
    scalar_sign,
)


class ExactnessError(ValueError):
    """The result left the exact scalar field; rerun the operation in float mode."""


def _normalize_scalars(values: Sequence[Scalar], kind: str) -> tuple:
    out = []
    for x in values:
        if isinstance(x, int):
            x = Fraction(x)
        if kind == "quad3" and isinstance(x, Fraction):
            x = Quad3(x)
        if (kind == "float") != isinstance(x, float):
            raise TypeError("float scalars cannot mix with exact scalars")
        out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class Lattice:
    basis: Matrix

    def __post_init__(self) -> None:
        self.basis.dim  # rejects non-square bases
        if scalar_sign(self.basis.det()) == 0:
            raise ValueError("lattice basis is singular")

    @classmethod
    def integers(cls, d: int, kind: str = "rational") -> "Lattice":
        return cls(Matrix.identity(d, kind=kind))

    @property
    def dimension(self) -> int:
        return self.basis.dim

    @property
    def kind(self) -> str:
        return self.basis.kind

    def covolume(self) -> Scalar:
        return abs(self.basis.det())

    def to_float(self) -> "Lattice":
        return Lattice(self.basis.to_float())


def dual_lattice(lat: Lattice) -> Lattice:
    """Basis of the dual: inverse transpose, so <b_i, b*_j> = delta_ij."""
    return Lattice(lat.basis.inverse().transpose())


@dataclass(frozen=True)
class Parallelepiped:
    forms: Matrix
    bounds: tuple

    def __post_init__(self) -> None:
        d = self.forms.dim
        if len(self.bounds) != d:
            raise ValueError("bounds length must match dimension")
        object.__setattr__(self, "bounds", _normalize_scalars(self.bounds, self.forms.kind))
        if any(scalar_sign(e) <= 0 for e in self.bounds):
            raise ValueError("all bounds must be positive")
        if scalar_sign(self.forms.det()) == 0:
            raise ValueError("forms matrix must be invertible")

    @classmethod
    def cube(cls, d: int, kind: str = "rational") -> "Parallelepiped":
        one = 1.0 if kind == "float" else Fraction(1)
        return cls(Matrix.identity(d, kind=kind), (one,) * d)

    @classmethod
    def axis_box(cls, eta: Sequence[Scalar]) -> "Parallelepiped":
        kind = "float" if any(isinstance(e, float) for e in eta) else (
            "quad3" if any(isinstance(e, Quad3) for e in eta) else "rational"
        )
        return cls(Matrix.identity(len(eta), kind=kind), tuple(eta))

    @property
    def dimension(self) -> int:
        return self.forms.dim

    @property
    def kind(self) -> str:
        return self.forms.kind

    def gauge(self, x: Sequence[Scalar]) -> Scalar:
        """Minkowski functional: max_i |h_i(x)| / eta_i."""
        values = self.forms.matvec(tuple(x))
        best = None
        for v, e in zip(values, self.bounds):
            g = abs(v) / e
            if best is None or g > best:
                best = g
        return best

    def contains(self, x: Sequence[Scalar], dilate: Scalar = 1) -> bool:
        return self.gauge(x) <= dilate

    def contains_interior(self, x: Sequence[Scalar], dilate: Scalar = 1) -> bool:
        return self.gauge(x) < dilate

    def volume(self) -> Scalar:
        d = self.dimension
        prod = self.bounds[0]
        for e in self.bounds[1:]:
            prod = prod * e
        scale = 2**d if self.kind != "float" else float(2**d)
        return scale * prod / abs(self.forms.det())

    def scale(self, t: Scalar) -> "Parallelepiped":
        if scalar_sign(t) <= 0:
            raise ValueError("scale factor must be positive")
        return Parallelepiped(self.forms, tuple(t * e for e in self.bounds))

    def apply_linear(self, t: Matrix) -> "Parallelepiped":
        """The image T(Pi): forms become H T^{-1}, bounds stay."""
        return Parallelepiped(self.forms.matmul(t.inverse()), self.bounds)

    def to_float(self) -> "Parallelepiped":
        return Parallelepiped(self.forms.to_float(), tuple(float(e) for e in self.bounds))


def det_normalized(piped: Parallelepiped) -> Parallelepiped:
    """The same body rewritten as (s H, s eta) with |det(s H)| = 1.

    Exact kinds require the scale s = |det H|^{-1/d} to stay in the field;
    otherwise ExactnessError asks for a float conversion.
    """
    d = piped.dimension
    adet = abs(piped.forms.det())
    if adet == 1:
        return piped
    if piped.kind == "float":
        s = adet ** (-1.0 / d)
    else:
        s = exact_nth_root(1 / adet, d)
        if s is None:
            raise ExactnessError(
                f"|det H| = {format_scalar(adet)} has no exact {d}-th root; "
                "convert the instance to float mode first"
            )
    return Parallelepiped(piped.forms.scale(s), tuple(s * e for e in piped.bounds))


def pseudo_compound(piped: Parallelepiped) -> Parallelepiped:
    """Dual forms with bounds (prod eta)/eta_i, after det-normalizing the forms.

    The construction requires |det H| = 1; other parallelepipeds are first
    renamed by det_normalized, which keeps the body fixed.
    """
    normalized = det_normalized(piped)
    bounds = normalized.bounds
    prod = bounds[0]
    for e in bounds[1:]:
        prod = prod * e
    star_forms = normalized.forms.inverse().transpose()
    star_bounds = tuple(prod / e for e in bounds)
    return Parallelepiped(star_forms, star_bounds)


# ---------------------------------------------------------------------------
# plain-text document format


def _kind_name(kind: str) -> str:
    return kind


def _format_matrix_block(m: Matrix) -> str:
    return "\n".join(",".join(format_scalar(x) for x in row) for row in m.rows)


def format_parallelepiped(piped: Parallelepiped) -> str:
    lines = [
        f"dimension: {piped.dimension}",
        f"scalar_kind: {_kind_name(piped.kind)}",
        "H:",
        _format_matrix_block(piped.forms),
        "eta: " + ",".join(format_scalar(e) for e in piped.bounds),
    ]
    return "\n".join(lines) + "\n"


def format_lattice(lat: Lattice) -> str:
    lines = [
        f"dimension: {lat.dimension}",
        f"scalar_kind: {_kind_name(lat.kind)}",
        "basis:",
        _format_matrix_block(lat.basis),
    ]
    return "\n".join(lines) + "\n"


def parse_body_document(text: str) -> dict:
    """Parse a document holding a parallelepiped and/or a lattice.

    Returns {"dimension", "scalar_kind", "parallelepiped", "lattice"} with
    None for absent parts. Exact kinds round-trip bit for bit.
    """
    dimension = None
    kind = None
    h_rows: list | None = None
    eta: tuple | None = None
    basis_rows: list | None = None
    pending: list | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if pending is not None and ":" not in line:
            pending.append(line)
            continue
        key, _, value = line.partition(":")
        key = key.strip()
        value = value.strip()
        if key == "dimension":
            val = int(value)
            if dimension is not None and val != dimension:
                raise ValueError("conflicting dimensions in document")
            dimension = val
        elif key == "scalar_kind":
            if kind is not None and value != kind:
                raise ValueError("conflicting scalar kinds in document")
            kind = value
        elif key == "H":
            h_rows = []
            pending = h_rows
        elif key == "basis":
            basis_rows = []
            pending = basis_rows
        elif key == "eta":
            eta = tuple(value.split(","))
            pending = None
        else:
            raise ValueError(f"unknown field {key!r}")
    if dimension is None or kind is None:
        raise ValueError("document must declare dimension and scalar_kind")

    def to_matrix(rows: list) -> Matrix:
        if len(rows) != dimension:
            raise ValueError("matrix block has wrong number of rows")
        return Matrix(
            [[parse_scalar(cell, kind) for cell in row.split(",")] for row in rows]
        )

    piped = None
    if h_rows is not None:
        if eta is None:
            raise ValueError("H block requires an eta line")
        piped = Parallelepiped(to_matrix(h_rows), tuple(parse_scalar(e, kind) for e in eta))
    lattice = Lattice(to_matrix(basis_rows)) if basis_rows is not None else None
    return {
        "dimension": dimension,
        "scalar_kind": kind,
        "parallelepiped": piped,
        "lattice": lattice,
    }

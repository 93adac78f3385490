"""Small dense matrices over one scalar kind, plus bracketed root finding.

Exact kinds use fraction-free (Bareiss) elimination for determinants and
plain field operations elsewhere; the float kind gets partial pivoting.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .scalars import Quad3, Scalar, scalar_sign

_EXACT_KINDS = ("rational", "quad3")


def _normalize_entry(x):
    if isinstance(x, int):
        return Fraction(x)
    return x


class Matrix:
    """Immutable row-major matrix; all entries share one scalar kind."""

    __slots__ = ("rows", "kind", "nrows", "ncols")

    def __init__(self, rows: Iterable[Sequence[Scalar]]) -> None:
        mat = [tuple(_normalize_entry(x) for x in row) for row in rows]
        if not mat or not mat[0]:
            raise ValueError("matrix must be nonempty")
        if any(len(r) != len(mat[0]) for r in mat):
            raise ValueError("ragged rows")
        has_float = any(isinstance(x, float) for r in mat for x in r)
        has_quad = any(isinstance(x, Quad3) for r in mat for x in r)
        has_rat = any(isinstance(x, Fraction) for r in mat for x in r)
        if has_float and (has_quad or has_rat):
            raise TypeError("float entries cannot mix with exact entries")
        if has_quad:
            mat = [tuple(x if isinstance(x, Quad3) else Quad3(x) for x in r) for r in mat]
            kind = "quad3"
        elif has_float:
            kind = "float"
        else:
            kind = "rational"
        object.__setattr__(self, "rows", tuple(mat))
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "nrows", len(mat))
        object.__setattr__(self, "ncols", len(mat[0]))

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def identity(cls, d: int, kind: str = "rational") -> "Matrix":
        if kind == "float":
            one, zero = 1.0, 0.0
        elif kind == "quad3":
            one, zero = Quad3(1), Quad3(0)
        else:
            one, zero = Fraction(1), Fraction(0)
        return cls([[one if i == j else zero for j in range(d)] for i in range(d)])

    @classmethod
    def diagonal(cls, entries: Sequence[Scalar]) -> "Matrix":
        d = len(entries)
        zero = 0.0 if any(isinstance(x, float) for x in entries) else Fraction(0)
        return cls([[entries[i] if i == j else zero for j in range(d)] for i in range(d)])

    @property
    def dim(self) -> int:
        if self.nrows != self.ncols:
            raise ValueError("matrix is not square")
        return self.nrows

    def _check_compatible(self, other: "Matrix") -> None:
        if (self.kind == "float") != (other.kind == "float"):
            raise TypeError("float matrices cannot mix with exact matrices")

    def matmul(self, other: "Matrix") -> "Matrix":
        self._check_compatible(other)
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        cols = list(zip(*other.rows))
        return Matrix(
            [[_dot(row, col) for col in cols] for row in self.rows]
        )

    def matvec(self, vec: Sequence[Scalar]) -> tuple:
        if len(vec) != self.ncols:
            raise ValueError("shape mismatch")
        v = [_normalize_entry(x) for x in vec]
        return tuple(_dot(row, v) for row in self.rows)

    def transpose(self) -> "Matrix":
        return Matrix(list(zip(*self.rows)))

    def scale(self, s: Scalar) -> "Matrix":
        return Matrix([[s * x for x in row] for row in self.rows])

    def to_float(self) -> "Matrix":
        return Matrix([[float(x) for x in row] for row in self.rows])

    def det(self) -> Scalar:
        d = self.dim
        if self.kind == "float":
            return _det_float([list(r) for r in self.rows])
        return _det_bareiss([list(r) for r in self.rows])

    def inverse(self) -> "Matrix":
        d = self.dim
        if self.kind == "float":
            return Matrix(_gauss_jordan_float([list(r) for r in self.rows]))
        return Matrix(_gauss_jordan_exact([list(r) for r in self.rows]))

    def cofactor(self) -> "Matrix":
        """M' with M (M')^T = (det M) I; equals (det M)(M^T)^{-1} when invertible."""
        det = self.det()
        if scalar_sign(det) != 0:
            return self.inverse().transpose().scale(det)
        return self._cofactor_minors()

    def _cofactor_minors(self) -> "Matrix":
        d = self.dim
        out = []
        for i in range(d):
            row = []
            for j in range(d):
                minor = [
                    [self.rows[r][c] for c in range(d) if c != j]
                    for r in range(d)
                    if r != i
                ]
                sub = _det_float(minor) if self.kind == "float" else _det_bareiss(minor)
                row.append(sub if (i + j) % 2 == 0 else -sub)
            out.append(row)
        return Matrix(out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"Matrix({[list(r) for r in self.rows]!r})"


def _dot(a, b):
    total = None
    for x, y in zip(a, b):
        term = x * y
        total = term if total is None else total + term
    return total


def _det_bareiss(m) -> Scalar:
    d = len(m)
    if d == 1:
        return m[0][0]
    sign = 1
    prev = 1
    for k in range(d - 1):
        if not m[k][k]:
            for r in range(k + 1, d):
                if m[r][k]:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return m[0][0] * 0  # zero of the right kind
        for i in range(k + 1, d):
            for j in range(k + 1, d):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev
        prev = m[k][k]
    return m[d - 1][d - 1] if sign > 0 else -m[d - 1][d - 1]


def _det_float(m) -> float:
    d = len(m)
    det = 1.0
    for k in range(d):
        piv = max(range(k, d), key=lambda r: abs(m[r][k]))
        if m[piv][k] == 0.0:
            return 0.0
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            det = -det
        det *= m[k][k]
        for i in range(k + 1, d):
            f = m[i][k] / m[k][k]
            for j in range(k, d):
                m[i][j] -= f * m[k][j]
    return det


def _gauss_jordan_exact(m):
    d = len(m)
    aug = [list(row) + [Fraction(1) if i == j else Fraction(0) for j in range(d)] for i, row in enumerate(m)]
    for k in range(d):
        piv = next((r for r in range(k, d) if aug[r][k]), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        aug[k], aug[piv] = aug[piv], aug[k]
        inv_p = 1 / aug[k][k] if not isinstance(aug[k][k], Quad3) else Quad3(1) / aug[k][k]
        aug[k] = [x * inv_p for x in aug[k]]
        for r in range(d):
            if r != k and aug[r][k]:
                f = aug[r][k]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[k])]
    return [row[d:] for row in aug]


def _gauss_jordan_float(m):
    d = len(m)
    aug = [list(row) + [1.0 if i == j else 0.0 for j in range(d)] for i, row in enumerate(m)]
    for k in range(d):
        piv = max(range(k, d), key=lambda r: abs(aug[r][k]))
        if aug[piv][k] == 0.0:
            raise ZeroDivisionError("matrix is singular")
        aug[k], aug[piv] = aug[piv], aug[k]
        p = aug[k][k]
        aug[k] = [x / p for x in aug[k]]
        for r in range(d):
            if r != k and aug[r][k] != 0.0:
                f = aug[r][k]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[k])]
    return [row[d:] for row in aug]


class RationalSpan:
    """Incremental exact rank tracker for vectors over Q or Q(sqrt3)."""

    def __init__(self, dim: int) -> None:
        self.dim = dim
        self._reduced: list[tuple[int, list]] = []

    @property
    def rank(self) -> int:
        return len(self._reduced)

    def add(self, vec: Sequence[Scalar]) -> bool:
        """Add vec if it enlarges the span; return whether it did."""
        r = [_normalize_entry(x) for x in vec]
        for piv, row in self._reduced:
            if r[piv]:
                f = r[piv] / row[piv]
                r = [a - f * b for a, b in zip(r, row)]
        piv = next((i for i, x in enumerate(r) if x), None)
        if piv is None:
            return False
        self._reduced.append((piv, r))
        return True


def monotone_root(
    f: Callable[[Scalar], Scalar],
    lo: Scalar,
    hi: Scalar,
    width: Scalar | None = None,
    max_iter: int = 4096,
):
    """Root of a strictly monotone f on [lo, hi] by bisection.

    Float endpoints bisect to machine precision; exact endpoints require a
    target interval `width` and return the midpoint of the final bracket.
    """
    flo, fhi = f(lo), f(hi)
    slo, shi = scalar_sign(flo), scalar_sign(fhi)
    if slo == 0:
        return lo
    if shi == 0:
        return hi
    if slo == shi:
        raise ValueError("no sign change on the bracket")
    exact = not isinstance(lo, float)
    if exact and width is None:
        raise ValueError("exact bisection needs a target width")
    for _ in range(max_iter):
        if exact:
            if hi - lo <= width:
                break
            mid = (lo + hi) / 2
        else:
            mid = 0.5 * (lo + hi)
            if not (lo < mid < hi):
                break
        fm = f(mid)
        sm = scalar_sign(fm)
        if sm == 0:
            return mid
        if sm == slo:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2 if exact else 0.5 * (lo + hi)

"""Dense exact matrices over a :class:`~mixedquiver.fields.Field`."""

from __future__ import annotations

from typing import Sequence

from .fields import Field, QQ


class ShapeError(ValueError):
    pass


class SingularMatrixError(ZeroDivisionError):
    pass


class Matrix:
    """Immutable rectangular matrix; rows are tuples of field elements."""

    __slots__ = ("field", "rows", "nrows", "ncols", "_hash")

    def __init__(self, rows: Sequence[Sequence], field: Field = QQ, ncols: int | None = None):
        self.field = field
        self.rows = tuple(tuple(field.coerce(x) for x in row) for row in rows)
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else (ncols or 0)
        if any(len(row) != self.ncols for row in self.rows):
            raise ShapeError("ragged rows")
        self._hash = None

    @classmethod
    def _raw(cls, rows, field, ncols):
        # rows already reduced
        m = cls.__new__(cls)
        m.field = field
        m.rows = rows
        m.nrows = len(rows)
        m.ncols = ncols
        m._hash = None
        return m

    @classmethod
    def zeros(cls, nrows, ncols, field=QQ):
        z = field.zero
        return cls._raw(tuple((z,) * ncols for _ in range(nrows)), field, ncols)

    @classmethod
    def identity(cls, n, field=QQ):
        z, o = field.zero, field.one
        return cls._raw(
            tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)), field, n
        )

    @classmethod
    def from_function(cls, nrows, ncols, fn, field=QQ):
        """Build from ``fn(i, j)`` with 0-based indices."""
        return cls([[fn(i, j) for j in range(ncols)] for i in range(nrows)], field, ncols)

    @classmethod
    def random(cls, nrows, ncols, field, rng, entries=None):
        if entries is None:
            draw = lambda: field.random_element(rng)  # noqa: E731
        else:
            draw = lambda: field.coerce(rng.choice(entries))  # noqa: E731
        return cls._raw(
            tuple(tuple(draw() for _ in range(ncols)) for _ in range(nrows)), field, ncols
        )

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def is_square(self):
        return self.nrows == self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.shape, self.rows))
        return self._hash

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in row) for row in self.rows)
        return f"Matrix({self.nrows}x{self.ncols}: [{body}])"

    def _check_same(self, other):
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check_same(other)
        red = self.field.reduce
        return Matrix._raw(
            tuple(tuple(red(a + b) for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)),
            self.field,
            self.ncols,
        )

    def __sub__(self, other):
        self._check_same(other)
        red = self.field.reduce
        return Matrix._raw(
            tuple(tuple(red(a - b) for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)),
            self.field,
            self.ncols,
        )

    def __neg__(self):
        red = self.field.reduce
        return Matrix._raw(tuple(tuple(red(-a) for a in r) for r in self.rows), self.field, self.ncols)

    def scale(self, c):
        c = self.field.coerce(c)
        red = self.field.reduce
        return Matrix._raw(tuple(tuple(red(c * a) for a in r) for r in self.rows), self.field, self.ncols)

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        red = self.field.reduce
        cols = tuple(zip(*other.rows)) if other.rows else ((),) * other.ncols
        rows = tuple(
            tuple(red(sum(a * b for a, b in zip(row, col))) for col in cols) for row in self.rows
        )
        return Matrix._raw(rows, self.field, other.ncols)

    @property
    def T(self):
        if not self.rows:
            return Matrix.zeros(self.ncols, 0, self.field)
        return Matrix._raw(tuple(zip(*self.rows)), self.field, self.nrows)

    def trace(self):
        if not self.is_square():
            raise ShapeError("trace of a non-square matrix")
        return self.field.reduce(sum(self.rows[i][i] for i in range(self.nrows)))

    def __pow__(self, k: int):
        if not self.is_square() or k < 0:
            raise ShapeError("power needs a square matrix and k >= 0")
        result = Matrix.identity(self.nrows, self.field)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def block(self, r0, c0, nrows, ncols):
        return Matrix._raw(
            tuple(row[c0:c0 + ncols] for row in self.rows[r0:r0 + nrows]), self.field, ncols
        )

    def _echelon(self):
        """Row-reduce a copy; returns (rows, rank, det of the square part)."""
        F = self.field
        a = [list(r) for r in self.rows]
        n, m = self.nrows, self.ncols
        rank = 0
        det = F.one
        for col in range(m):
            piv = next((i for i in range(rank, n) if a[i][col] != 0), None)
            if piv is None:
                det = F.zero
                continue
            if piv != rank:
                a[rank], a[piv] = a[piv], a[rank]
                det = F.reduce(-det)
            p = a[rank][col]
            det = F.reduce(det * p)
            pinv = F.inv(p)
            for i in range(rank + 1, n):
                if a[i][col] != 0:
                    f = F.reduce(a[i][col] * pinv)
                    a[i] = [F.reduce(x - f * y) for x, y in zip(a[i], a[rank])]
            rank += 1
            if rank == n:
                break
        return a, rank, det

    def rank(self):
        return self._echelon()[1]

    def det(self):
        if not self.is_square():
            raise ShapeError("determinant of a non-square matrix")
        if self.nrows == 0:
            return self.field.one
        _, rank, det = self._echelon()
        return det if rank == self.nrows else self.field.zero

    def inverse(self):
        if not self.is_square():
            raise ShapeError("inverse of a non-square matrix")
        F = self.field
        n = self.nrows
        a = [list(r) + [F.one if i == j else F.zero for j in range(n)] for i, r in enumerate(self.rows)]
        for col in range(n):
            piv = next((i for i in range(col, n) if a[i][col] != 0), None)
            if piv is None:
                raise SingularMatrixError("matrix is singular")
            a[col], a[piv] = a[piv], a[col]
            pinv = F.inv(a[col][col])
            a[col] = [F.reduce(x * pinv) for x in a[col]]
            for i in range(n):
                if i != col and a[i][col] != 0:
                    f = a[i][col]
                    a[i] = [F.reduce(x - f * y) for x, y in zip(a[i], a[col])]
        return Matrix._raw(tuple(tuple(r[n:]) for r in a), F, n)

    def is_invertible(self):
        return self.is_square() and self.det() != 0

    def to_json(self):
        return [[self.field.to_json(x) for x in row] for row in self.rows]


def charpoly_coefficients(m: Matrix) -> list:
    """Return ``[sigma_0, ..., sigma_d]`` with det(tI - M) = sum (-1)^j sigma_j t^(d-j).

    Faddeev--LeVerrier divides by 1..d, so it is used only when the
    characteristic exceeds d; otherwise the Hessenberg method is used.
    """
    if not m.is_square():
        raise ShapeError("characteristic polynomial of a non-square matrix")
    d = m.nrows
    F = m.field
    if F.characteristic == 0 or F.characteristic > d:
        return _faddeev_leverrier(m)
    return _hessenberg_sigmas(m)


def _faddeev_leverrier(m: Matrix) -> list:
    F = m.field
    d = m.nrows
    # c_k: coefficients of det(tI - M) = t^d + c_1 t^(d-1) + ... + c_d
    c = [F.one]
    M_k = Matrix.zeros(d, d, F)
    ident = Matrix.identity(d, F)
    for k in range(1, d + 1):
        M_k = m @ (M_k + ident.scale(c[-1]))
        c.append(F.reduce(-F.div(M_k.trace(), F.coerce(k))))
    return [c[j] if j % 2 == 0 else F.reduce(-c[j]) for j in range(d + 1)]


def _hessenberg_sigmas(m: Matrix) -> list:
    """Characteristic polynomial via reduction to upper Hessenberg form.

    Uses only field operations (no division by integers), so it is valid
    in every characteristic.
    """
    F = m.field
    n = m.nrows
    h = [list(r) for r in m.rows]
    for col in range(n - 2):
        piv = next((i for i in range(col + 1, n) if h[i][col] != 0), None)
        if piv is None:
            continue
        if piv != col + 1:
            h[col + 1], h[piv] = h[piv], h[col + 1]
            for row in h:
                row[col + 1], row[piv] = row[piv], row[col + 1]
        pinv = F.inv(h[col + 1][col])
        for i in range(col + 2, n):
            f = F.reduce(h[i][col] * pinv)
            if f == 0:
                continue
            h[i] = [F.reduce(x - f * y) for x, y in zip(h[i], h[col + 1])]
            for row in h:
                row[col + 1] = F.reduce(row[col + 1] + f * row[i])
    # p[k]: monic charpoly of the leading k x k block, coefficient lists low->high
    p = [[F.one]]
    for k in range(1, n + 1):
        nxt = [F.zero] + p[k - 1]  # t * p_{k-1}
        hkk = h[k - 1][k - 1]
        for i, c in enumerate(p[k - 1]):
            nxt[i] = F.reduce(nxt[i] - hkk * c)
        prod = F.one
        for i in range(1, k):
            prod = F.reduce(prod * h[k - i][k - i - 1])
            coef = F.reduce(prod * h[k - i - 1][k - 1])
            if coef == 0:
                continue
            for j, c in enumerate(p[k - i - 1]):
                nxt[j] = F.reduce(nxt[j] - coef * c)
        p.append(nxt)
    poly = p[n]  # poly[i] is the coefficient of t^i
    return [F.reduce((-1) ** j * poly[n - j]) for j in range(n + 1)]


def sigma_coeff(m: Matrix, j: int):
    """sigma_j(M): the j-th elementary symmetric function of the eigenvalues."""
    if not m.is_square():
        raise ShapeError("sigma_j needs a square matrix")
    if j < 0:
        raise ValueError(f"sigma index {j} is negative")
    if j > m.nrows:
        return m.field.zero
    return charpoly_coefficients(m)[j]

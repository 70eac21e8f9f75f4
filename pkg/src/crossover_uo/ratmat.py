"""Dense exact-rational matrices.

Entries are :class:`fractions.Fraction`. Rank and the n.n.d. test scale to
integers and run in the fraction-free kernels of :mod:`crossover_uo.kernels`;
everything else is plain Fraction arithmetic.
"""

import csv
import io
import json
from fractions import Fraction
from math import gcd, lcm

from . import kernels
from .errors import NotNnd, NotSymmetric

_ZERO = Fraction(0)
_ONE = Fraction(1)


def fmt_rational(q):
    """``"num/den"``, or ``"num"`` when the denominator is 1."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(s):
    return Fraction(str(s).strip())


def _frac(x):
    return x if type(x) is Fraction else Fraction(x)


class RationalMatrix:
    """Immutable rows x cols grid of Fractions."""

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, entries, cols=None):
        grid = tuple(tuple(_frac(x) for x in row) for row in entries)
        if cols is None:
            cols = len(grid[0]) if grid else 0
        for row in grid:
            if len(row) != cols:
                raise ValueError("ragged matrix rows")
        self.rows = len(grid)
        self.cols = cols
        self._e = grid

    @classmethod
    def _raw(cls, grid, rows, cols):
        # grid must already be a tuple of tuples of Fraction
        m = cls.__new__(cls)
        m.rows = rows
        m.cols = cols
        m._e = grid
        return m

    # constructors

    @classmethod
    def zeros(cls, rows, cols=None):
        cols = rows if cols is None else cols
        return cls._raw(tuple((_ZERO,) * cols for _ in range(rows)), rows, cols)

    @classmethod
    def identity(cls, k):
        return cls._raw(
            tuple(tuple(_ONE if i == j else _ZERO for j in range(k)) for i in range(k)),
            k,
            k,
        )

    @classmethod
    def ones(cls, rows, cols=None):
        cols = rows if cols is None else cols
        return cls._raw(tuple((_ONE,) * cols for _ in range(rows)), rows, cols)

    @classmethod
    def centering(cls, k):
        """H = I - J/k."""
        return complete_symmetric(k, 1 - Fraction(1, k), -Fraction(1, k))

    @classmethod
    def diag(cls, values):
        values = [_frac(x) for x in values]
        k = len(values)
        return cls._raw(
            tuple(
                tuple(values[i] if i == j else _ZERO for j in range(k)) for i in range(k)
            ),
            k,
            k,
        )

    @classmethod
    def column(cls, values):
        return cls([[x] for x in values], cols=1)

    @classmethod
    def block(cls, blocks):
        """Assemble from a 2-D list of blocks; all blocks in a row share height."""
        out = []
        width = None
        for brow in blocks:
            h = brow[0].rows
            for b in brow:
                if b.rows != h:
                    raise ValueError("block heights differ within a block row")
            for i in range(h):
                row = []
                for b in brow:
                    row.extend(b._e[i])
                out.append(tuple(row))
            w = sum(b.cols for b in brow)
            if width is None:
                width = w
            elif w != width:
                raise ValueError("block rows have different widths")
        return cls._raw(tuple(out), len(out), width or 0)

    # access

    @property
    def shape(self):
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self._e[i][j]

    def row(self, i):
        return self._e[i]

    def tolist(self):
        return [list(r) for r in self._e]

    def submatrix(self, rows, cols):
        rows = list(rows)
        cols = list(cols)
        return RationalMatrix._raw(
            tuple(tuple(self._e[i][j] for j in cols) for i in rows), len(rows), len(cols)
        )

    @property
    def T(self):
        return RationalMatrix._raw(tuple(zip(*self._e)), self.cols, self.rows) if self.rows else \
            RationalMatrix.zeros(self.cols, 0)

    def trace(self):
        return sum((self._e[i][i] for i in range(min(self.rows, self.cols))), _ZERO)

    def total(self):
        return sum((x for row in self._e for x in row), _ZERO)

    def row_sums(self):
        return [sum(r, _ZERO) for r in self._e]

    def col_sums(self):
        return [sum(c, _ZERO) for c in zip(*self._e)]

    def is_square(self):
        return self.rows == self.cols

    def is_symmetric(self):
        if self.rows != self.cols:
            return False
        e = self._e
        return all(e[i][j] == e[j][i] for i in range(self.rows) for j in range(i))

    def is_zero(self):
        return all(x == 0 for row in self._e for x in row)

    # arithmetic

    def _check_same(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check_same(other)
        return RationalMatrix._raw(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._e, other._e)),
            self.rows,
            self.cols,
        )

    def __sub__(self, other):
        self._check_same(other)
        return RationalMatrix._raw(
            tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._e, other._e)),
            self.rows,
            self.cols,
        )

    def __neg__(self):
        return RationalMatrix._raw(
            tuple(tuple(-a for a in r) for r in self._e), self.rows, self.cols
        )

    def __mul__(self, k):
        if isinstance(k, RationalMatrix):
            return NotImplemented
        k = _frac(k)
        return RationalMatrix._raw(
            tuple(tuple(a * k for a in r) for r in self._e), self.rows, self.cols
        )

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self * (_ONE / _frac(k))

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        # integer product of the scaled matrices, one normalisation per entry
        A, da = _integer_scaled(self)
        B, db = _integer_scaled(other)
        cols = tuple(zip(*B)) if other.rows else ((),) * other.cols
        den = da * db
        out = []
        for r in A:
            nz = [(a, k) for k, a in enumerate(r) if a]
            out.append(tuple(
                Fraction(sum(a * c[k] for a, k in nz), den) for c in cols
            ))
        return RationalMatrix._raw(tuple(out), self.rows, other.cols)

    def __eq__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self._e == other._e

    def __hash__(self):
        return hash(self._e)

    def __repr__(self):
        body = "; ".join(" ".join(fmt_rational(x) for x in r) for r in self._e)
        return f"RationalMatrix({self.rows}x{self.cols}: [{body}])"

    # serialization

    def to_json_obj(self):
        return [[fmt_rational(x) for x in r] for r in self._e]

    def to_json(self):
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text) if isinstance(text, str) else text
        return cls([[parse_rational(x) for x in r] for r in obj])

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for r in self._e:
            w.writerow([fmt_rational(x) for x in r])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        return cls([[parse_rational(x) for x in r] for r in rows])


def complete_symmetric(k, a, b):
    """k x k matrix with ``a`` on the diagonal and ``b`` elsewhere."""
    if k < 1:
        raise ValueError("k must be >= 1")
    a, b = _frac(a), _frac(b)
    return RationalMatrix._raw(
        tuple(tuple(a if i == j else b for j in range(k)) for i in range(k)), k, k
    )


def _integer_rows(M):
    """Each row scaled by the lcm of its denominators (rank-preserving)."""
    out = []
    for r in M._e:
        den = lcm(*(x.denominator for x in r)) if r else 1
        out.append([x.numerator * (den // x.denominator) for x in r])
    return out


def _integer_scaled(M):
    """M times the lcm of all denominators (a positive scalar)."""
    den = 1
    for r in M._e:
        for x in r:
            if x.denominator != 1:
                den = lcm(den, x.denominator)
    return [[x.numerator * (den // x.denominator) for x in r] for r in M._e], den


def rank(M):
    if M.rows == 0 or M.cols == 0:
        return 0
    return kernels.bareiss_rank(_integer_rows(M))


def ldl_pivots(M):
    """Symmetric pivoted LDL^T of ``M``: ``(nnd, D)``.

    ``D`` holds the strictly positive diagonal factors of the original
    (unscaled) matrix, in pivot order. Raises NotSymmetric.
    """
    if not M.is_symmetric():
        raise NotSymmetric("matrix is not symmetric")
    ints, den = _integer_scaled(M)
    ok, piv = kernels.symmetric_ldl(ints)
    return ok, [Fraction(num, d * den) for num, d in piv]


def is_nnd(M):
    """Exact test of x'Mx >= 0 for all x."""
    return ldl_pivots(M)[0]


def _reduce(row):
    g = gcd(*row)
    return [x // g for x in row] if g > 1 else row


def rref(M):
    """Reduced row echelon form: ``(R, pivot_columns)`` with zero rows dropped.

    Elimination runs on integer rows (each kept primitive); only the final
    normalisation by the pivot creates fractions.
    """
    a = _integer_rows(M)
    m, n = M.rows, M.cols
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        pr = a[r]
        pv = pr[c]
        for i in range(m):
            if i != r:
                f = a[i][c]
                if f:
                    a[i] = _reduce([pv * x - f * y for x, y in zip(a[i], pr)])
        pivots.append(c)
        r += 1
    out = tuple(
        tuple(Fraction(x, a[i][c]) for x in a[i]) for i, c in zip(range(r), pivots)
    )
    return RationalMatrix._raw(out, r, n), pivots


def inverse(M):
    """Inverse of a nonsingular square matrix (Gauss-Jordan)."""
    if not M.is_square():
        raise ValueError("inverse of a non-square matrix")
    k = M.rows
    aug = RationalMatrix.block([[M, RationalMatrix.identity(k)]])
    R, piv = rref(aug)
    if piv[:k] != list(range(k)) or R.rows < k:
        raise ZeroDivisionError("matrix is singular")
    return R.submatrix(range(k), range(k, 2 * k))


def mp_inverse(M):
    """Moore-Penrose inverse via rank factorization M = BC.

    M+ = C'(CC')^-1 (B'B)^-1 B', with C the nonzero rows of rref(M) and B the
    pivot columns of M.
    """
    C, piv = rref(M)
    if not piv:
        return RationalMatrix.zeros(M.cols, M.rows)
    B = M.submatrix(range(M.rows), piv)
    Ct = C.T
    Bt = B.T
    return Ct @ inverse(C @ Ct) @ inverse(Bt @ B) @ Bt


def schur(M, keep):
    """M_kk - M_ke (M_ee)+ M_ek, with e the complement of ``keep``.

    ``keep`` is an iterable of 0-based indices; the result follows its order.
    """
    if not M.is_symmetric():
        raise NotSymmetric("schur complement of a non-symmetric matrix")
    keep = list(keep)
    ks = set(keep)
    elim = [i for i in range(M.rows) if i not in ks]
    Mkk = M.submatrix(keep, keep)
    if not elim:
        return Mkk
    Mee = M.submatrix(elim, elim)
    if not is_nnd(Mee):
        raise NotNnd("eliminated block is not n.n.d.")
    Mke = M.submatrix(keep, elim)
    return Mkk - Mke @ mp_inverse(Mee) @ Mke.T


def penrose_conditions(M, P):
    """The four Penrose conditions for P as a pseudoinverse of M."""
    MP = M @ P
    PM = P @ M
    return (
        MP @ M == M,
        PM @ P == P,
        MP.T == MP,
        PM.T == PM,
    )

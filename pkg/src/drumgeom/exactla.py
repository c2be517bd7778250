"""Exact dense linear algebra over Z and Q, and the intertwiner solver.

Nothing in here touches floating point.  Entries are ``int`` where possible and
``fractions.Fraction`` otherwise.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Iterable, Iterator, Sequence
from fractions import Fraction
from math import lcm

from .permcore import CapExceeded, CosetAction, Perm, element_cap

Number = int | Fraction


class NotSquare(ValueError):
    pass


class IndexMismatch(ValueError):
    pass


def _norm(x) -> Number:
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        return _norm(Fraction(x))
    raise TypeError(f"inexact entry {x!r}")


class ExactMatrix:
    """Dense row-major matrix with exact entries."""

    __slots__ = ("cols", "entries", "rows")

    def __init__(self, entries: Iterable[Iterable]):
        rows = [tuple(_norm(x) for x in row) for row in entries]
        self.rows = len(rows)
        self.cols = len(rows[0]) if rows else 0
        if any(len(r) != self.cols for r in rows):
            raise ValueError("ragged matrix")
        self.entries: tuple[tuple[Number, ...], ...] = tuple(rows)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> ExactMatrix:
        return cls([[0] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int) -> ExactMatrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def permutation(cls, p: Perm) -> ExactMatrix:
        """Matrix with a 1 at (i, p[i]); for a point map alpha this is P with p_ij = 1 iff alpha(x_i) = x_j."""
        n = len(p)
        return cls([[int(p[i] == j) for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij: tuple[int, int]) -> Number:
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other) -> bool:
        if isinstance(other, ExactMatrix):
            return self.entries == other.entries
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:
        return f"ExactMatrix({[list(r) for r in self.entries]})"

    def __matmul__(self, other: ExactMatrix) -> ExactMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other.entries))
        return ExactMatrix(
            [[sum(a * b for a, b in zip(row, col) if a and b) for col in cols] for row in self.entries]
        )

    def __add__(self, other: ExactMatrix) -> ExactMatrix:
        return ExactMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __mul__(self, c: Number) -> ExactMatrix:
        return ExactMatrix([[a * c for a in r] for r in self.entries])

    __rmul__ = __mul__

    def transpose(self) -> ExactMatrix:
        return ExactMatrix(zip(*self.entries))

    def tolist(self) -> list[list[Number]]:
        return [list(r) for r in self.entries]

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self.entries]

    @classmethod
    def from_json(cls, rows: Sequence[Sequence[str]]) -> ExactMatrix:
        return cls([[Fraction(x) for x in r] for r in rows])

    def det(self) -> Number:
        return determinant(self)

    def is_integral(self) -> bool:
        return all(isinstance(x, int) for r in self.entries for x in r)


def _bareiss(rows: list[list[int]]) -> int:
    n = len(rows)
    a = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            aik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * akk - aik * rk[j]) // prev
            ri[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1] if n else 1


def determinant(M: ExactMatrix) -> Number:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if M.rows != M.cols:
        raise NotSquare(f"determinant of a {M.rows}x{M.cols} matrix")
    if M.is_integral():
        return _bareiss([list(r) for r in M.entries])
    # clear denominators row by row
    scale = 1
    rows = []
    for r in M.entries:
        d = lcm(*(Fraction(x).denominator for x in r))
        scale *= d
        rows.append([int(x * d) for x in r])
    return _norm(Fraction(_bareiss(rows), scale))


def cofactor_determinant(M: ExactMatrix) -> Number:
    """Laplace expansion along the first row; only for small matrices."""
    if M.rows != M.cols:
        raise NotSquare(f"determinant of a {M.rows}x{M.cols} matrix")
    rows = M.entries

    def rec(rows):
        if not rows:
            return 1
        total = 0
        for j, a in enumerate(rows[0]):
            if a:
                minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
                total += (-1) ** j * a * rec(minor)
        return total

    return _norm(Fraction(rec(rows)))


def rank(M: ExactMatrix) -> int:
    return M.cols - len(nullspace(M))


def nullspace(M: ExactMatrix) -> list[list[Number]]:
    """Basis of {x : Mx = 0} from the reduced row echelon form (one vector per free column)."""
    rows = [{j: Fraction(x) for j, x in enumerate(r) if x} for r in M.entries]
    return sparse_nullspace(rows, M.cols)


def sparse_nullspace(rows: Iterable[dict[int, Number]], ncols: int) -> list[list[Number]]:
    """Nullspace of a system given as sparse rows {column: coefficient}.

    Gauss-Jordan elimination on dictionaries; stays cheap when rows are short,
    as for intertwiner equations which have two nonzeros each.
    """
    pivots: dict[int, dict[int, Fraction]] = {}  # pivot column -> normalised row
    for row in rows:
        r = {j: Fraction(c) for j, c in row.items() if c}
        # reduce by existing pivots
        changed = True
        while changed:
            changed = False
            for j in list(r):
                piv = pivots.get(j)
                if piv is not None and j in r:
                    c = r[j]
                    for k, v in piv.items():
                        nv = r.get(k, 0) - c * v
                        if nv:
                            r[k] = nv
                        else:
                            r.pop(k, None)
                    changed = True
        if not r:
            continue
        p = min(r)
        c = r[p]
        r = {k: v / c for k, v in r.items()}
        # back-substitute into existing pivots to keep the form reduced
        for prow in pivots.values():
            if p in prow:
                f = prow[p]
                for k, v in r.items():
                    nv = prow.get(k, 0) - f * v
                    if nv:
                        prow[k] = nv
                    else:
                        prow.pop(k, None)
        pivots[p] = r
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        vec: list[Number] = [0] * ncols
        vec[f] = 1
        for p, prow in pivots.items():
            c = prow.get(f)
            if c:
                vec[p] = _norm(-c)
        basis.append(vec)
    return basis


# --- intertwiners -----------------------------------------------------------


def intertwiner_space(t, cap: int | None = None) -> list[ExactMatrix]:
    """Rational basis of {T : P_g T = T Q_g for all generators g}.

    P_g and Q_g are the permutation matrices of g on G/U and G/V (``ExactMatrix.permutation``
    convention), so the system says T[s(i), j] = T[i, r^-1(j)] entrywise.
    """
    G = t.group
    left = CosetAction(G, t.left)
    right = CosetAction(G, t.right)
    n = left.degree
    if right.degree != n:
        raise IndexMismatch(f"[G:U] = {n} but [G:V] = {right.degree}")
    cap = element_cap() if cap is None else cap
    if n * n > cap:
        raise CapExceeded(f"{n * n} unknowns exceed the cap {cap}")
    rows = []
    for g in G.generators:
        s = left.perm(g)
        r = right.perm(g)
        rinv = [0] * n
        for a, b in enumerate(r):
            rinv[b] = a
        for i in range(n):
            for j in range(n):
                a = s[i] * n + j
                b = i * n + rinv[j]
                if a != b:
                    rows.append({a: 1, b: -1})
    return [ExactMatrix([vec[i * n : (i + 1) * n] for i in range(n)]) for vec in sparse_nullspace(rows, n * n)]


def _combine(basis: Sequence[ExactMatrix], coeffs: Sequence[int]) -> ExactMatrix:
    n, m = basis[0].shape
    out = [[0] * m for _ in range(n)]
    for c, B in zip(coeffs, basis):
        if not c:
            continue
        for i, row in enumerate(B.entries):
            o = out[i]
            for j, x in enumerate(row):
                if x:
                    o[j] += c * x
    return ExactMatrix(out)


def coefficient_sweep(dim: int, bound: int = 3) -> Iterator[tuple[int, ...]]:
    """Nonzero vectors in {-bound..bound}^dim.

    Ordered by max-norm, then support size, then support position, with values
    running 1, -1, 2, -2, ... so single basis elements come first and in order.
    """
    for norm in range(1, bound + 1):
        values = [s * k for k in range(1, norm + 1) for s in (1, -1)]
        for size in range(1, dim + 1):
            for support in itertools.combinations(range(dim), size):
                for vals in itertools.product(values, repeat=size):
                    if max(map(abs, vals)) != norm:
                        continue
                    v = [0] * dim
                    for i, x in zip(support, vals):
                        v[i] = x
                    yield tuple(v)


def find_invertible_intertwiner(
    basis: Sequence[ExactMatrix], seed: int = 0, bound: int = 3, draws: int = 64
) -> ExactMatrix | None:
    """First combination of ``basis`` with nonzero determinant, or None within the budget."""
    if not basis or basis[0].rows != basis[0].cols:
        return None
    for coeffs in coefficient_sweep(len(basis), bound):
        T = _combine(basis, coeffs)
        if determinant(T) != 0:
            return T
    rng = random.Random(seed)
    for _ in range(draws):
        coeffs = [rng.randint(-(10**6), 10**6) for _ in basis]
        T = _combine(basis, coeffs)
        if determinant(T) != 0:
            return T
    return None


def intertwines(T: ExactMatrix, P: ExactMatrix, Q: ExactMatrix) -> bool:
    return P @ T == T @ Q

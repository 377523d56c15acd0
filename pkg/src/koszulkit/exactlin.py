"""Exact sparse linear algebra over Q and prime fields.

Subspaces are always kept in reduced row-echelon form with the smallest
column as pivot, so two subspaces are equal exactly when their bases are.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import gmpy2

from . import kernels

Vector = Mapping[int, object]

# Dense Bareiss is used for exact rank when rows * touched-columns stays below this.
BAREISS_DENSE_LIMIT = 400_000


class KoszulkitError(Exception):
    """Base class for library errors."""


class BadPrimeError(KoszulkitError):
    """The chosen prime divides a denominator; retry with another prime."""


class AmbientMismatchError(KoszulkitError, ValueError):
    pass


class ResourceLimitError(KoszulkitError):
    """A requested degree or ambient dimension exceeds the configured guard."""


@dataclass(frozen=True)
class FieldSpec:
    """Coefficient field: exact rationals or integers modulo a prime."""

    mode: str = "rational"
    prime: int | None = None

    def __post_init__(self):
        if self.mode == "rational":
            if self.prime is not None:
                raise ValueError("rational field takes no prime")
        elif self.mode == "modular":
            if self.prime is None or self.prime < 3 or not gmpy2.is_prime(self.prime):
                raise ValueError(f"modular field needs an odd prime, got {self.prime!r}")
        else:
            raise ValueError(f"unknown field mode {self.mode!r}")

    @classmethod
    def rational(cls) -> "FieldSpec":
        return cls("rational")

    @classmethod
    def modular(cls, prime: int) -> "FieldSpec":
        return cls("modular", int(prime))

    @property
    def is_exact(self) -> bool:
        return self.mode == "rational"

    @property
    def p(self) -> int | None:
        return self.prime

    def coerce(self, value) -> object:
        """Map an integer or rational into this field."""
        if self.prime is None:
            return Fraction(value)
        if isinstance(value, int):
            return value % self.prime
        value = Fraction(value)
        den = value.denominator % self.prime
        if den == 0:
            raise BadPrimeError(f"prime {self.prime} divides denominator {value.denominator}")
        return value.numerator * pow(den, -1, self.prime) % self.prime

    def coerce_vector(self, vec: Vector) -> dict:
        out = {}
        for k, v in vec.items():
            v = self.coerce(v)
            if v:
                out[k] = v
        return out

    def one(self):
        return Fraction(1) if self.prime is None else 1

    def neg(self, v):
        return -v if self.prime is None else (-v) % self.prime

    def __str__(self):
        return "Q" if self.prime is None else f"GF({self.prime})"


QQ = FieldSpec.rational()


def random_prime(rng: random.Random, bits: int = 31) -> int:
    """A random prime just below ``2**bits`` (31 bits keeps products in int64)."""
    lo = 1 << (bits - 1)
    hi = (1 << bits) - (1 << (bits - 8))
    while True:
        p = int(gmpy2.next_prime(rng.randrange(lo, hi)))
        if p < (1 << bits):
            return p


def vec_axpy(y: dict, a, x: Vector, p: int | None) -> dict:
    """In-place ``y += a * x``; zeros are dropped."""
    for k, v in x.items():
        nv = y.get(k, 0) + a * v
        if p is not None:
            nv %= p
        if nv:
            y[k] = nv
        else:
            y.pop(k, None)
    return y


@dataclass(frozen=True)
class SparseMatrix:
    """Coordinate-format matrix with canonical (row, col) ordering."""

    nrows: int
    ncols: int
    entries: tuple = ()

    def __post_init__(self):
        prev = None
        for r, c, v in self.entries:
            if not (0 <= r < self.nrows and 0 <= c < self.ncols):
                raise IndexError(f"entry ({r}, {c}) outside {self.nrows}x{self.ncols}")
            if not v:
                raise ValueError("stored zero entry")
            if prev is not None and (r, c) <= prev:
                raise ValueError("entries must be strictly sorted by (row, col)")
            prev = (r, c)

    @classmethod
    def from_rows(cls, rows: Sequence[Vector], ncols: int) -> "SparseMatrix":
        entries = []
        for i, row in enumerate(rows):
            for c in sorted(row):
                v = row[c]
                if v:
                    entries.append((i, c, v))
        return cls(len(rows), ncols, tuple(entries))

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[object]]) -> "SparseMatrix":
        ncols = len(dense[0]) if dense else 0
        rows = [{j: v for j, v in enumerate(r) if v} for r in dense]
        return cls.from_rows(rows, ncols)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, tuple((i, i, 1) for i in range(n)))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "SparseMatrix":
        return cls(nrows, ncols, ())

    @classmethod
    def from_columns(cls, columns: Sequence[Vector], nrows: int) -> "SparseMatrix":
        """Matrix whose j-th column is ``columns[j]``."""
        return cls.from_rows(columns, nrows).T

    def rows(self) -> list[dict]:
        out = [dict() for _ in range(self.nrows)]
        for r, c, v in self.entries:
            out[r][c] = v
        return out

    def columns(self) -> list[dict]:
        return self.T.rows()

    @property
    def T(self) -> "SparseMatrix":
        ent = sorted((c, r, v) for r, c, v in self.entries)
        return SparseMatrix(self.ncols, self.nrows, tuple(ent))

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def to_dense(self) -> list[list]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for r, c, v in self.entries:
            out[r][c] = v
        return out

    def is_zero(self) -> bool:
        return not self.entries


def bareiss_rank(rows: Sequence[Vector], ncols: int) -> int:
    """Exact rank by fraction-free (Bareiss) elimination on dense integer rows.

    Rational rows are scaled to integers first; only touched columns are kept.
    """
    cols = sorted({c for r in rows for c, v in r.items() if v})
    where = {c: j for j, c in enumerate(cols)}
    mat = []
    for r in rows:
        r = {c: Fraction(v) for c, v in r.items() if v}
        if not r:
            continue
        den = 1
        for v in r.values():
            den = den * v.denominator // math.gcd(den, v.denominator)
        dense = [0] * len(cols)
        for c, v in r.items():
            dense[where[c]] = int(v * den)
        mat.append(dense)
    m, n = len(mat), len(cols)
    rank = 0
    prev = 1
    for col in range(n):
        piv = next((i for i in range(rank, m) if mat[i][col]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        pr = mat[rank]
        pv = pr[col]
        for i in range(rank + 1, m):
            row = mat[i]
            a = row[col]
            for j in range(col + 1, n):
                row[j] = (pv * row[j] - a * pr[j]) // prev
            row[col] = 0
        prev = pv
        rank += 1
        if rank == m:
            break
    return rank


def _kernel_p(f: FieldSpec):
    return f.prime


def rank(m: SparseMatrix, f: FieldSpec = QQ, backend: str | None = None) -> int:
    """Row rank over ``f``.  Over a prime this is the rank modulo p."""
    rows = [f.coerce_vector(r) for r in m.rows()]
    if f.is_exact:
        touched = len({c for r in rows for c in r})
        if len(rows) * touched <= BAREISS_DENSE_LIMIT:
            return bareiss_rank(rows, m.ncols)
    return kernels.rank(rows, m.ncols, _kernel_p(f), backend=backend)


def rank_rows(rows: Sequence[Vector], ncols: int, f: FieldSpec, backend: str | None = None) -> int:
    """Rank of rows already in field representation."""
    if f.is_exact:
        touched = len({c for r in rows for c in r})
        if len(rows) * touched <= BAREISS_DENSE_LIMIT:
            return bareiss_rank(rows, ncols)
    return kernels.rank(list(rows), ncols, _kernel_p(f), backend=backend)


@dataclass(frozen=True)
class Subspace:
    """Subspace of ``field^ambient_dim`` held by its canonical RREF basis."""

    ambient_dim: int
    basis: SparseMatrix
    pivot_cols: tuple
    field: FieldSpec = field(default=QQ)

    def __post_init__(self):
        if self.basis.ncols != self.ambient_dim:
            raise AmbientMismatchError("basis width differs from ambient dimension")
        if self.basis.nrows != len(self.pivot_cols):
            raise ValueError("one pivot per basis row required")
        if any(a >= b for a, b in zip(self.pivot_cols, self.pivot_cols[1:])):
            raise ValueError("pivot columns must increase strictly")

    @classmethod
    def zero(cls, ambient_dim: int, f: FieldSpec = QQ) -> "Subspace":
        return cls(ambient_dim, SparseMatrix.zeros(0, ambient_dim), (), f)

    @classmethod
    def full(cls, ambient_dim: int, f: FieldSpec = QQ) -> "Subspace":
        one = f.one()
        basis = SparseMatrix(ambient_dim, ambient_dim, tuple((i, i, one) for i in range(ambient_dim)))
        return cls(ambient_dim, basis, tuple(range(ambient_dim)), f)

    @classmethod
    def span(cls, vectors: Iterable[Vector], ambient_dim: int, f: FieldSpec = QQ,
             backend: str | None = None) -> "Subspace":
        rows = [f.coerce_vector(v) for v in vectors]
        for r in rows:
            for c in r:
                if not 0 <= c < ambient_dim:
                    raise AmbientMismatchError(f"coordinate {c} outside ambient {ambient_dim}")
        return cls._from_field_rows(rows, ambient_dim, f, backend)

    @classmethod
    def _from_field_rows(cls, rows, ambient_dim, f, backend=None) -> "Subspace":
        piv, red = kernels.echelon(rows, ambient_dim, _kernel_p(f), full=True, backend=backend)
        return cls(ambient_dim, SparseMatrix.from_rows(red, ambient_dim), tuple(piv), f)

    @property
    def dim(self) -> int:
        return len(self.pivot_cols)

    @cached_property
    def vectors(self) -> list[dict]:
        return self.basis.rows()

    @cached_property
    def _pivot_rows(self) -> dict:
        return dict(zip(self.pivot_cols, self.vectors))

    def reduce(self, vec: Vector) -> dict:
        """Normal form of ``vec`` modulo this subspace (zero on pivot columns)."""
        p = self.field.prime
        w = self.field.coerce_vector(vec)
        for c in sorted(set(w) & set(self.pivot_cols)):
            a = w.get(c)
            if a:
                vec_axpy(w, self.field.neg(a), self._pivot_rows[c], p)
        # reduction by row c only adds columns > c that are non-pivot in RREF
        return w

    def contains(self, vec: Vector) -> bool:
        return not self.reduce(vec)

    def coordinates(self, vec: Vector) -> list:
        """Coefficients of ``vec`` in the basis; raises if not a member."""
        w = self.field.coerce_vector(vec)
        if self.reduce(w):
            raise ValueError("vector is not in the subspace")
        zero = 0 if self.field.prime is not None else Fraction(0)
        return [w.get(c, zero) for c in self.pivot_cols]

    def is_subspace_of(self, other: "Subspace") -> bool:
        _check_same(self, other)
        return all(other.contains(v) for v in self.vectors)

    def with_field(self, f: FieldSpec) -> "Subspace":
        """Reduce a rational subspace mod p; the RREF keeps its rank or hits a bad prime."""
        if f == self.field:
            return self
        if not self.field.is_exact:
            raise ValueError("only rational subspaces can change field")
        return Subspace.span(self.vectors, self.ambient_dim, f)


def _check_same(u: Subspace, v: Subspace):
    if u.ambient_dim != v.ambient_dim:
        raise AmbientMismatchError(f"ambient {u.ambient_dim} != {v.ambient_dim}")
    if u.field != v.field:
        raise AmbientMismatchError(f"field {u.field} != {v.field}")


def kernel_basis(m: SparseMatrix, f: FieldSpec = QQ, backend: str | None = None) -> Subspace:
    """Right null space ``{x : m x = 0}`` as a canonical subspace."""
    rows = [f.coerce_vector(r) for r in m.rows()]
    piv, red = kernels.echelon(rows, m.ncols, f.prime, full=True, backend=backend)
    pivset = set(piv)
    free = [c for c in range(m.ncols) if c not in pivset]
    where = {c: i for i, c in enumerate(free)}
    gens = [{c: f.one()} for c in free]
    for pc, row in zip(piv, red):
        for c, v in row.items():
            if c != pc:
                gens[where[c]][pc] = f.neg(v)
    return Subspace._from_field_rows(gens, m.ncols, f, backend)


def subspace_sum(u: Subspace, v: Subspace) -> Subspace:
    _check_same(u, v)
    if not v.dim:
        return u
    if not u.dim:
        return v
    return Subspace._from_field_rows(u.vectors + v.vectors, u.ambient_dim, u.field)


def subspace_intersect(u: Subspace, v: Subspace) -> Subspace:
    """Intersection by the Zassenhaus construction on ``[u | u]`` over ``[v | 0]``."""
    _check_same(u, v)
    n = u.ambient_dim
    if not u.dim or not v.dim:
        return Subspace.zero(n, u.field)
    rows = []
    for x in u.vectors:
        r = dict(x)
        r.update({n + c: a for c, a in x.items()})
        rows.append(r)
    rows.extend(dict(y) for y in v.vectors)
    piv, red = kernels.echelon(rows, 2 * n, u.field.prime, full=False)
    inter = [{c - n: a for c, a in r.items()} for c, r in zip(piv, red) if c >= n]
    return Subspace._from_field_rows(inter, n, u.field)


def subspace_intersect_all(spaces: Sequence[Subspace]) -> Subspace:
    out = spaces[0]
    for s in spaces[1:]:
        out = subspace_intersect(out, s)
        if not out.dim:
            break
    return out


def annihilator(u: Subspace) -> Subspace:
    """Covectors vanishing on ``u`` under the standard pairing of coordinates."""
    if not u.dim:
        return Subspace.full(u.ambient_dim, u.field)
    return kernel_basis(u.basis, u.field)


def contains(u: Subspace, w: Vector) -> bool:
    for c in w:
        if not 0 <= c < u.ambient_dim:
            raise AmbientMismatchError(f"coordinate {c} outside ambient {u.ambient_dim}")
    return u.contains(w)


@dataclass
class RankResult:
    rank: int
    path: str
    primes: tuple = field(default_factory=tuple)


def certified_rank(m: SparseMatrix, seed: int = 0, backend: str | None = None) -> RankResult:
    """Rank modulo two random primes, escalating to exact elimination on disagreement."""
    rng = random.Random(seed)
    found = []
    while len(found) < 2:
        p = random_prime(rng)
        try:
            found.append((p, rank(m, FieldSpec.modular(p), backend)))
        except BadPrimeError:
            continue
    (p1, r1), (p2, r2) = found
    if r1 == r2:
        return RankResult(r1, "modular-agree", (p1, p2))
    return RankResult(rank(m, QQ), "exact-escalated", (p1, p2))


STRATEGIES = ("modular", "exact", "verify")


def run_with_strategy(fn, strategy: str = "verify", seed: int = 0):
    """Evaluate ``fn(field)`` under a field strategy.

    ``modular`` uses one random prime, ``exact`` works over Q, and ``verify``
    uses two independent primes and falls back to Q when they disagree.
    Returns ``(value, provenance)``; values must compare with ``==``.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown field strategy {strategy!r}")
    if strategy == "exact":
        return fn(QQ), {"strategy": "exact", "path": "exact"}
    rng = random.Random(seed)
    tried = set()

    def attempt():
        while True:
            p = random_prime(rng)
            if p in tried:
                continue
            tried.add(p)
            try:
                return p, fn(FieldSpec.modular(p))
            except BadPrimeError:
                continue

    p1, v1 = attempt()
    if strategy == "modular":
        return v1, {"strategy": "modular", "path": "modular", "primes": [p1]}
    p2, v2 = attempt()
    if v1 == v2:
        return v1, {"strategy": "verify", "path": "modular-agree", "primes": [p1, p2]}
    return fn(QQ), {"strategy": "verify", "path": "exact-escalated", "primes": [p1, p2]}

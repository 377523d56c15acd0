"""Words, tensors in E^{(x)n}, and the two graded families of subspaces.

A word of length n over g letters is stored by its big-endian index
``sum(letter_i * g**(n-1-i))``, so numeric order is lexicographic order.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exactlin import (
    QQ,
    FieldSpec,
    ResourceLimitError,
    SparseMatrix,
    Subspace,
    subspace_intersect,
    subspace_intersect_all,
    vec_axpy,
)
from . import kernels

# Largest ambient g**n the explicit tensor-space routines will build.
MAX_TENSOR_AMBIENT = 1 << 20


def word_index(word: Sequence[int], generator_count: int) -> int:
    idx = 0
    for letter in word:
        if not 0 <= letter < generator_count:
            raise ValueError(f"letter {letter} out of range for {generator_count} generators")
        idx = idx * generator_count + letter
    return idx


def index_word(index: int, n: int, generator_count: int) -> tuple:
    out = []
    for _ in range(n):
        index, r = divmod(index, generator_count)
        out.append(r)
    if index:
        raise ValueError("index too large for word length")
    return tuple(reversed(out))


def check_ambient(generator_count: int, n: int, limit: int = MAX_TENSOR_AMBIENT) -> int:
    size = generator_count**n
    if size > limit:
        raise ResourceLimitError(f"E^(x){n} has dimension {size} > limit {limit}")
    return size


@dataclass(frozen=True)
class TensorVector:
    """Homogeneous element of E^{(x)n}: sparse map word index -> coefficient."""

    degree: int
    generator_count: int
    coeffs: tuple = ()  # sorted ((index, Fraction), ...)

    @classmethod
    def from_dict(cls, degree: int, generator_count: int, coeffs: dict) -> "TensorVector":
        items = tuple(sorted((k, Fraction(v)) for k, v in coeffs.items() if v))
        return cls(degree, generator_count, items)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple], generator_count: int, degree: int | None = None) -> "TensorVector":
        """Build from ``(word, coeff)`` pairs; all words must share one length."""
        acc: dict = {}
        for word, c in terms:
            word = tuple(word)
            if degree is None:
                degree = len(word)
            elif len(word) != degree:
                raise ValueError(f"inhomogeneous term {word}: expected length {degree}")
            k = word_index(word, generator_count)
            acc[k] = acc.get(k, 0) + Fraction(c)
        if degree is None:
            raise ValueError("degree needed for an empty tensor")
        return cls.from_dict(degree, generator_count, acc)

    @classmethod
    def word(cls, word: Sequence[int], generator_count: int, coeff=1) -> "TensorVector":
        return cls.from_terms([(word, coeff)], generator_count)

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def terms(self):
        for k, c in self.coeffs:
            yield index_word(k, self.degree, self.generator_count), c

    def is_zero(self) -> bool:
        return not self.coeffs

    def _same(self, other):
        if self.degree != other.degree or self.generator_count != other.generator_count:
            raise ValueError("tensor degree or generator count mismatch")

    def __add__(self, other: "TensorVector") -> "TensorVector":
        self._same(other)
        acc = self.as_dict()
        vec_axpy(acc, 1, other.as_dict(), None)
        return TensorVector.from_dict(self.degree, self.generator_count, acc)

    def __sub__(self, other: "TensorVector") -> "TensorVector":
        return self + (-1) * other

    def __rmul__(self, scalar) -> "TensorVector":
        s = Fraction(scalar)
        return TensorVector.from_dict(self.degree, self.generator_count, {k: s * c for k, c in self.coeffs})

    def __matmul__(self, other: "TensorVector") -> "TensorVector":
        """Tensor (concatenation) product."""
        if self.generator_count != other.generator_count:
            raise ValueError("generator count mismatch")
        shift = self.generator_count**other.degree
        acc = {}
        for a, ca in self.coeffs:
            for b, cb in other.coeffs:
                acc[a * shift + b] = acc.get(a * shift + b, 0) + ca * cb
        return TensorVector.from_dict(self.degree + other.degree, self.generator_count, acc)

    def split(self, k: int) -> dict:
        """Decompose as sum over prefixes u of length k of u (x) tail_u."""
        shift = self.generator_count ** (self.degree - k)
        out: dict = {}
        for idx, c in self.coeffs:
            pre, suf = divmod(idx, shift)
            out.setdefault(pre, {})[suf] = c
        return out


@dataclass(frozen=True)
class RelatorSpace:
    """The relator subspace R of E^{(x)N}, canonical over Q."""

    generator_count: int
    degree: int
    space: Subspace

    def __post_init__(self):
        if self.degree < 2:
            raise ValueError("homogeneity degree N must be at least 2")
        if self.space.ambient_dim != self.generator_count**self.degree:
            raise ValueError("relator space ambient must be g**N")

    @classmethod
    def from_tensors(cls, tensors: Iterable[TensorVector], generator_count: int, degree: int) -> "RelatorSpace":
        vecs = []
        for t in tensors:
            if t.degree != degree or t.generator_count != generator_count:
                raise ValueError(f"relator of degree {t.degree} in a degree-{degree} presentation")
            vecs.append(t.as_dict())
        return cls(generator_count, degree, Subspace.span(vecs, generator_count**degree, QQ))

    @property
    def dim(self) -> int:
        return self.space.dim

    def tensors(self) -> list[TensorVector]:
        return [TensorVector.from_dict(self.degree, self.generator_count, v) for v in self.space.vectors]


def _shift_rows(base: Subspace, g: int, left: int, right: int) -> list[dict]:
    """Rows of E^{(x)left} (x) base (x) E^{(x)right}, ordered by pivot."""
    width = base.ambient_dim
    rshift = g**right
    lshift = width * rshift
    rows = []
    for a in range(g**left):
        for vec in base.vectors:
            for c in range(rshift):
                off = a * lshift + c
                rows.append({off + k * rshift: v for k, v in vec.items()})
    return rows


def shift_embed(r: RelatorSpace, i: int, n: int, field: FieldSpec = QQ) -> Subspace:
    """E^{(x)i} (x) R (x) E^{(x)(n-N-i)} inside E^{(x)n}."""
    g, N = r.generator_count, r.degree
    if i < 0 or i + N > n:
        raise ValueError(f"shift {i} does not fit degree {n} with N={N}")
    ambient = check_ambient(g, n)
    base = r.space.with_field(field)
    rows = _shift_rows(base, g, i, n - N - i)
    # padding an RREF basis by words keeps it in RREF; only the order changes
    rows.sort(key=min)
    piv = tuple(min(row) for row in rows)
    return Subspace(ambient, SparseMatrix.from_rows(rows, ambient), piv, field)


def ideal_slice(r: RelatorSpace, n: int, field: FieldSpec = QQ, backend: str | None = None) -> Subspace:
    """Degree-n part of the two-sided ideal generated by R (one combined elimination)."""
    g, N = r.generator_count, r.degree
    ambient = check_ambient(g, n)
    if n < N or not r.dim:
        return Subspace.zero(ambient, field)
    base = r.space.with_field(field)
    rows = []
    for i in range(n - N + 1):
        rows.extend(_shift_rows(base, g, i, n - N - i))
    piv, red = kernels.echelon(rows, ambient, field.prime, full=True, backend=backend)
    return Subspace(ambient, SparseMatrix.from_rows(red, ambient), tuple(piv), field)


def dual_koszul_slice(r: RelatorSpace, n: int, field: FieldSpec = QQ) -> Subspace:
    """J_n: intersection of all shifted copies of R in E^{(x)n} (all of E^{(x)n} below N)."""
    g, N = r.generator_count, r.degree
    ambient = check_ambient(g, n)
    if n < N:
        return Subspace.full(ambient, field)
    return subspace_intersect_all([shift_embed(r, i, n, field) for i in range(n - N + 1)])


def _padded(space: Subspace, g: int, left: int, right: int) -> Subspace:
    rows = _shift_rows(space, g, left, right)
    if left == 0:
        rows.sort(key=min)
    ambient = space.ambient_dim * g ** (left + right)
    return Subspace(ambient, SparseMatrix.from_rows(rows, ambient), tuple(min(r) for r in rows), space.field)


def dual_koszul_tower(r: RelatorSpace, kmax: int, field: FieldSpec = QQ) -> list[Subspace]:
    """J_0 .. J_kmax, using J_k = (E (x) J_{k-1}) cap (J_{k-1} (x) E) above degree N."""
    g, N = r.generator_count, r.degree
    out: list[Subspace] = []
    for k in range(kmax + 1):
        if k < N:
            out.append(Subspace.full(check_ambient(g, k), field))
        elif k == N:
            out.append(r.space.with_field(field))
        elif not out[-1].dim:
            out.append(Subspace.zero(g**k, field))
        else:
            check_ambient(g, k)
            prev = out[-1]
            out.append(subspace_intersect(_padded(prev, g, 1, 0), _padded(prev, g, 0, 1)))
    return out

"""Graded algebras A(E, R) = T(E)/(R) given by homogeneous presentations.

The quotient is built one degree at a time.  Writing I_n for the ideal in
degree n, I_n / (I_{n-1} (x) E) is the image of A_{n-N} (x) R, so A_n is the
cokernel of a map A_{n-N} (x) R -> A_{n-1} (x) E.  Its canonical echelon
form picks the standard words (non-pivot words under lexicographic order,
the same set the RREF of I_n in E^{(x)n} would leave) and gives the normal
form of every other word.
"""
from __future__ import annotations

import hashlib
import json
import logging
import threading
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import kernels
from .exactlin import (
    QQ,
    FieldSpec,
    ResourceLimitError,
    SparseMatrix,
    Subspace,
    annihilator,
    run_with_strategy,
    vec_axpy,
)
from .tensor import RelatorSpace, TensorVector, ideal_slice, index_word, word_index

logger = logging.getLogger(__name__)

HARD_AMBIENT_LIMIT = 1 << 20


class DependentRelatorWarning(UserWarning):
    pass


def default_cutoff(generator_count: int) -> int:
    return 10 if generator_count <= 2 else 8


def _check_cutoff(generator_count: int, n: int, cutoff: int | None):
    limit = default_cutoff(generator_count) if cutoff is None else cutoff
    if n > limit:
        raise ResourceLimitError(f"degree {n} exceeds cutoff {limit}")
    if generator_count**n > HARD_AMBIENT_LIMIT:
        raise ResourceLimitError(f"degree {n} needs ambient {generator_count**n} > {HARD_AMBIENT_LIMIT}")


def _frac_str(v: Fraction) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


# --------------------------------------------------------------------------
# metrics


def _invert(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(rows)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col]), None)
        if piv is None:
            raise ValueError("metric is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col]:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[col])]
    return [r[n:] for r in aug]


@dataclass(frozen=True)
class Metric:
    """Invertible symmetric rational matrix g_{mu nu} with its inverse g^{mu nu}."""

    g: tuple
    g_inv: tuple

    @classmethod
    def from_matrix(cls, rows: Sequence[Sequence]) -> "Metric":
        m = [[Fraction(x) for x in r] for r in rows]
        n = len(m)
        if n < 2 or any(len(r) != n for r in m):
            raise ValueError("metric must be a square matrix of size at least 2")
        if any(m[i][j] != m[j][i] for i in range(n) for j in range(n)):
            raise ValueError("metric is not symmetric")
        inv = _invert(m)
        return cls(tuple(map(tuple, m)), tuple(map(tuple, inv)))

    @classmethod
    def diagonal(cls, values: Sequence) -> "Metric":
        n = len(values)
        return cls.from_matrix([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def euclidean(cls, size: int) -> "Metric":
        return cls.diagonal([1] * size)

    @classmethod
    def minkowski(cls, size: int) -> "Metric":
        return cls.diagonal([-1] + [1] * (size - 1))

    @property
    def size(self) -> int:
        return len(self.g)

    def to_json(self) -> list:
        return [[_frac_str(x) for x in r] for r in self.g]


# --------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class Presentation:
    """Generators plus a canonical relator space; ``label``/``metric`` are metadata."""

    generators: tuple
    relators: RelatorSpace
    label: str = field(default="", compare=False)
    metric: Metric | None = field(default=None, compare=False)
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if not self.generators:
            raise ValueError("a presentation needs at least one generator")
        if len(self.generators) != self.relators.generator_count:
            raise ValueError("generator names do not match the relator space")

    @classmethod
    def from_relators(cls, generators: Sequence[str], degree: int, relators: Iterable[TensorVector],
                      label: str = "", metric: Metric | None = None) -> "Presentation":
        gens = tuple(generators)
        g = len(gens)
        if not g:
            raise ValueError("a presentation needs at least one generator")
        relators = list(relators)
        kept, dropped = [], []
        for i, t in enumerate(relators):
            if t.degree != degree or t.generator_count != g:
                raise ValueError(f"relator {i} has degree {t.degree}, expected {degree}")
            trial = Subspace.span([r.as_dict() for r in kept + [t]], g**degree)
            if trial.dim == len(kept) + 1:
                kept.append(t)
            else:
                dropped.append(i)
        if dropped:
            warnings.warn(f"dropped linearly dependent relators at positions {dropped}",
                          DependentRelatorWarning, stacklevel=2)
        return cls(gens, RelatorSpace.from_tensors(kept, g, degree), label, metric)

    @property
    def generator_count(self) -> int:
        return len(self.generators)

    @property
    def degree(self) -> int:
        return self.relators.degree

    def algebra(self, f: FieldSpec = QQ) -> "GradedAlgebra":
        """The memoized graded-algebra engine over ``f``."""
        lock = self._cache.setdefault("_lock", threading.Lock())
        with lock:
            eng = self._cache.get(f)
            if eng is None:
                eng = GradedAlgebra(self, f)
                self._cache[f] = eng
            return eng

    def to_json(self) -> dict:
        """Canonical JSON form: relators are the RREF basis, words big-endian."""
        rels = []
        for t in self.relators.tensors():
            rels.append([{"coeff": _frac_str(c), "word": list(w)} for w, c in t.terms()])
        out = {"degree": self.degree, "generators": list(self.generators), "relators": rels}
        if self.metric is not None:
            out["metric"] = self.metric.to_json()
        return out

    def fingerprint(self) -> str:
        body = {k: v for k, v in self.to_json().items() if k != "metric"}
        blob = json.dumps(body, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


# --------------------------------------------------------------------------
# engine


def apply_columns(cols: Sequence[dict], vec: dict, p: int | None) -> dict:
    """Image of ``vec`` under the map whose i-th column is ``cols[i]``."""
    out: dict = {}
    for i, a in vec.items():
        vec_axpy(out, a, cols[i], p)
    return out


class GradedAlgebra:
    """Graded components of a presentation over one field, built lazily by degree.

    Component data are cached per degree; construction is serialized by a lock
    so concurrent readers see each degree built exactly once.
    """

    def __init__(self, presentation: Presentation, f: FieldSpec = QQ, backend: str | None = None):
        self.presentation = presentation
        self.field = f
        self.backend = backend
        self.g = presentation.generator_count
        self.N = presentation.degree
        self.p = f.prime
        self._relators = [f.coerce_vector(v) for v in presentation.relators.space.vectors]
        self._relator_terms = [
            [(index_word(k, self.N, self.g), c) for k, c in sorted(v.items())] for v in self._relators
        ]
        self._lock = threading.RLock()
        self._std_cols = {0: [0]}  # standard positions -> column in A_{n-1} (x) E
        self._words = {0: [0]}
        self._proj: dict[int, list] = {}
        self._relation_rank: dict[int, int] = {}
        self._left: dict[tuple, list] = {}

    # -- construction ------------------------------------------------------

    def _ensure(self, n: int):
        if n in self._words:
            return
        if self.g**n > HARD_AMBIENT_LIMIT:
            raise ResourceLimitError(f"degree {n} needs ambient {self.g ** n} > {HARD_AMBIENT_LIMIT}")
        with self._lock:
            for k in range(1, n + 1):
                if k not in self._words:
                    self._build(k)

    def _relation_rows(self, n: int) -> list[dict]:
        g, N, p = self.g, self.N, self.p
        rows = []
        for i in range(len(self._words[n - N])):
            prefix_cache: dict = {(): {i: 1}}
            for terms in self._relator_terms:
                row: dict = {}
                for word, c in terms:
                    head = word[:-1]
                    vec = self._prefix_image(prefix_cache, head, n - N)
                    x = word[-1]
                    for j, a in vec.items():
                        col = j * g + x
                        nv = row.get(col, 0) + c * a
                        if p is not None:
                            nv %= p
                        if nv:
                            row[col] = nv
                        else:
                            row.pop(col, None)
                rows.append(row)
        return rows

    def _prefix_image(self, cache: dict, word: tuple, base_degree: int) -> dict:
        vec = cache.get(word)
        if vec is None:
            prev = self._prefix_image(cache, word[:-1], base_degree)
            vec = self._right_apply(prev, base_degree + len(word) - 1, word[-1])
            cache[word] = vec
        return vec

    def _build(self, n: int):
        g, N = self.g, self.N
        prev = self._words[n - 1]
        ncols = len(prev) * g
        if n < N or not self._relators:
            std = list(range(ncols))
            proj = [{c: 1} for c in range(ncols)]
            self._relation_rank[n] = 0
        else:
            rows = self._relation_rows(n)
            piv, red = kernels.echelon(rows, ncols, self.p, full=True, backend=self.backend)
            self._relation_rank[n] = len(piv)
            pivset = dict(zip(piv, red))
            std = [c for c in range(ncols) if c not in pivset]
            pos = {c: k for k, c in enumerate(std)}
            neg = self.field.neg
            proj = []
            for c in range(ncols):
                row = pivset.get(c)
                if row is None:
                    proj.append({pos[c]: 1 if self.p is not None else Fraction(1)})
                else:
                    proj.append({pos[k]: neg(v) for k, v in row.items() if k != c})
        self._proj[n] = proj
        self._std_cols[n] = std
        self._words[n] = [prev[c // g] * g + c % g for c in std]  # published last
        logger.debug("degree %d: dim %d (relation rank %d)", n, len(std), self._relation_rank[n])

    # -- queries -----------------------------------------------------------

    def dim(self, n: int) -> int:
        if n < 0:
            return 0
        self._ensure(n)
        return len(self._words[n])

    def dims(self, cutoff: int) -> list[int]:
        return [self.dim(n) for n in range(cutoff + 1)]

    def words(self, n: int) -> list[int]:
        self._ensure(n)
        return self._words[n]

    def relation_rank(self, n: int) -> int:
        self._ensure(n)
        return self._relation_rank[n]

    def projection_columns(self, n: int) -> list[dict]:
        """Columns of the quotient map A_{n-1} (x) E -> A_n (index ``i*g + x``)."""
        self._ensure(n)
        return self._proj[n]

    def _right_apply(self, vec: dict, n: int, x: int) -> dict:
        """``vec * x`` for ``vec`` in A_n, result in A_{n+1}."""
        self._ensure(n + 1)
        proj = self._proj[n + 1]
        g, p = self.g, self.p
        out: dict = {}
        for i, a in vec.items():
            vec_axpy(out, a, proj[i * g + x], p)
        return out

    def right_mult(self, x: int, n: int) -> list[dict]:
        """Columns of right multiplication by generator ``x``: A_n -> A_{n+1}."""
        self._ensure(n + 1)
        proj = self._proj[n + 1]
        return [proj[i * self.g + x] for i in range(len(self._words[n]))]

    def left_mult(self, x: int, n: int) -> list[dict]:
        """Columns of left multiplication by generator ``x``: A_n -> A_{n+1}."""
        key = (x, n)
        cols = self._left.get(key)
        if cols is not None:
            return cols
        self._ensure(n + 1)
        with self._lock:
            if n == 0:
                cols = [self._right_apply({0: self.field.one()}, 0, x)]
            else:
                below = self.left_mult(x, n - 1)
                cols = [self._right_apply(below[c // self.g], n, c % self.g) for c in self._std_cols[n]]
            self._left[key] = cols
        return cols

    def normal_form(self, vec: dict, n: int) -> dict:
        """Coordinates in A_n of a tensor ``{word_index: coeff}`` of degree n."""
        self._ensure(n)
        memo: dict = {}

        def nf(idx: int, k: int) -> dict:
            if k == 0:
                return {0: self.field.one()}
            key = (idx, k)
            hit = memo.get(key)
            if hit is None:
                head, x = divmod(idx, self.g)
                hit = self._right_apply(nf(head, k - 1), k - 1, x)
                memo[key] = hit
            return hit

        out: dict = {}
        for idx, c in vec.items():
            c = self.field.coerce(c)
            if c:
                vec_axpy(out, c, nf(idx, n), self.p)
        return out

    def right_mult_element(self, element: dict, k: int, n: int) -> list[dict]:
        """Columns of ``a -> a * e`` from A_n to A_{n+k}, for ``e`` in E^{(x)k}."""
        terms = [(index_word(u, k, self.g), self.field.coerce(c)) for u, c in element.items()]
        terms = [(w, c) for w, c in terms if c]
        self._ensure(n + k)
        cols = []
        for i in range(len(self._words[n])):
            cache: dict = {(): {i: self.field.one()}}
            out: dict = {}
            for w, c in terms:
                vec_axpy(out, c, self._prefix_image(cache, w, n), self.p)
            cols.append(out)
        return cols

    def left_mult_element(self, element: dict, k: int, n: int) -> list[dict]:
        """Columns of ``b -> e * b`` from A_n to A_{n+k}, for ``e`` in E^{(x)k}."""
        terms = [(index_word(u, k, self.g), self.field.coerce(c)) for u, c in element.items()]
        terms = [(w, c) for w, c in terms if c]
        self._ensure(n + k)
        dim = len(self._words[n])
        if k == 0:
            c0 = sum(c for _, c in terms)
            return [{i: c0} if c0 else {} for i in range(dim)] if terms else [{} for _ in range(dim)]
        # suffix images: e = u_1 ... u_k acts as L_{u_1} o ... o L_{u_k}
        suffix: dict = {}

        def image(word: tuple) -> list:
            hit = suffix.get(word)
            if hit is None:
                inner = image(word[1:]) if len(word) > 1 else None
                deg = n + len(word) - 1
                lm = self.left_mult(word[0], deg)
                if inner is None:
                    hit = lm
                else:
                    hit = [apply_columns(lm, v, self.p) for v in inner]
                suffix[word] = hit
            return hit

        cols = [dict() for _ in range(dim)]
        for w, c in terms:
            img = image(w)
            for i in range(dim):
                vec_axpy(cols[i], c, img[i], self.p)
        return cols


# --------------------------------------------------------------------------
# public operations


@dataclass
class GradedComponent:
    """Degree-n component with its standard-word section."""

    degree: int
    dim: int
    standard_words: list
    generator_count: int
    _algebra: GradedAlgebra = field(repr=False)

    def project(self, vec: dict) -> dict:
        """Image in standard-word coordinates of a tensor of this degree."""
        return self._algebra.normal_form(vec, self.degree)

    def projection_matrix(self) -> SparseMatrix:
        n, g = self.degree, self.generator_count
        width = g**n
        if width > HARD_AMBIENT_LIMIT:
            raise ResourceLimitError("projection matrix too large")
        cols = [self._algebra.normal_form({w: 1}, n) for w in range(width)]
        return SparseMatrix.from_columns(cols, self.dim)

    @property
    def ideal_slice(self) -> Subspace:
        alg = self._algebra
        return ideal_slice(alg.presentation.relators, self.degree, alg.field)


def graded_dim(p: Presentation, n: int, f: FieldSpec | None = None, cutoff: int | None = None,
               strategy: str = "verify", seed: int = 0) -> int:
    """dim A_n.  With ``f=None`` the value is certified by ``strategy``."""
    _check_cutoff(p.generator_count, n, cutoff)
    if f is not None:
        return p.algebra(f).dim(n)
    value, _ = run_with_strategy(lambda fld: p.algebra(fld).dim(n), strategy, seed)
    return value


def graded_dims(p: Presentation, cutoff: int, f: FieldSpec | None = None, strategy: str = "verify",
                seed: int = 0) -> tuple[list[int], dict]:
    """All dims up to ``cutoff`` and the provenance of the numbers."""
    _check_cutoff(p.generator_count, cutoff, cutoff)
    if f is not None:
        return p.algebra(f).dims(cutoff), {"strategy": "fixed", "field": str(f)}
    return run_with_strategy(lambda fld: p.algebra(fld).dims(cutoff), strategy, seed)


def standard_section(p: Presentation, n: int, f: FieldSpec = QQ, cutoff: int | None = None) -> GradedComponent:
    _check_cutoff(p.generator_count, n, cutoff)
    alg = p.algebra(f)
    return GradedComponent(n, alg.dim(n), list(alg.words(n)), p.generator_count, alg)


def mult_matrix(p: Presentation, side: str, generator: int, n: int, f: FieldSpec = QQ,
                cutoff: int | None = None) -> SparseMatrix:
    """Matrix (target rows, source columns) of multiplication by a generator A_n -> A_{n+1}."""
    _check_cutoff(p.generator_count, n + 1, cutoff)
    if not 0 <= generator < p.generator_count:
        raise ValueError(f"generator {generator} out of range")
    alg = p.algebra(f)
    if side == "right":
        cols = alg.right_mult(generator, n)
    elif side == "left":
        cols = alg.left_mult(generator, n)
    else:
        raise ValueError("side must be 'left' or 'right'")
    return SparseMatrix.from_columns(cols, alg.dim(n + 1))


def dual_presentation(p: Presentation) -> Presentation:
    """A^! = A(E*, R^perp) on dual generators."""
    ann = annihilator(p.relators.space)
    rel = RelatorSpace(p.generator_count, p.degree, ann)
    names = tuple(f"{x}*" for x in p.generators)
    return Presentation(names, rel, label=f"dual({p.label})" if p.label else "dual")


def ideal_membership(p: Presentation, v: TensorVector, f: FieldSpec = QQ) -> bool:
    """True iff ``v`` lies in the two-sided ideal generated by the relators."""
    if v.generator_count != p.generator_count:
        raise ValueError("generator count mismatch")
    if v.is_zero():
        return True
    return not p.algebra(f).normal_form(v.as_dict(), v.degree)


def quotient_check(sub: RelatorSpace, quot: RelatorSpace) -> bool:
    """True iff every relator of ``sub`` lies in the ideal generated by ``quot``."""
    if sub.generator_count != quot.generator_count:
        raise ValueError("generator count mismatch")
    if sub.degree < quot.degree:
        raise ValueError("quotient relators must not have higher degree")
    names = tuple(f"x{i}" for i in range(quot.generator_count))
    alg = Presentation(names, quot).algebra(QQ)
    return all(not alg.normal_form(v, sub.degree) for v in sub.space.vectors)


def words_of(p: Presentation, words: Sequence[int], n: int) -> list[tuple]:
    return [index_word(w, n, p.generator_count) for w in words]


__all__ = [
    "DependentRelatorWarning",
    "GradedAlgebra",
    "GradedComponent",
    "Metric",
    "Presentation",
    "apply_columns",
    "default_cutoff",
    "dual_presentation",
    "graded_dim",
    "graded_dims",
    "ideal_membership",
    "mult_matrix",
    "quotient_check",
    "standard_section",
    "word_index",
]

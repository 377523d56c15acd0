"""Koszul N-complexes, their contractions, graded slices and certificates.

A position of a template is the free module A (x) J_k.  Basis of a degree-n
slice at that position: ``j * dim A_{n-k} + a`` for J-basis index j and
standard word a.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from . import kernels
from .algebra import Presentation, apply_columns
from .exactlin import QQ, FieldSpec, KoszulkitError, run_with_strategy, vec_axpy
from .presets import ym_matrix_M, ym_raised_relators
from .tensor import TensorVector, dual_koszul_tower

logger = logging.getLogger(__name__)


class ComplexError(KoszulkitError):
    """A slice failed the complex property: an internal consistency failure."""


@dataclass(frozen=True)
class FreeComplexTemplate:
    """Free modules A (x) J_k at J-degrees ``degrees`` (ascending) and their element matrices.

    ``elements[i]`` describes the map from position i to i-1 (i >= 1):
    ``elements[i][j][l]`` is the element of E^{(x)step} multiplying basis
    vector j of J_{k_i} into basis vector l of J_{k_{i-1}}.
    """

    presentation: Presentation
    degrees: tuple
    ranks: tuple
    elements: tuple
    m: int
    q: int
    bounded: bool
    augmented: bool

    @property
    def length(self) -> int:
        return len(self.degrees) - 1

    def step(self, i: int) -> int:
        return self.degrees[i] - self.degrees[i - 1]


def _contraction_degrees(N: int, m: int, q: int, kmax: int) -> list[int]:
    out = set()
    r = 0
    while N * r + q - m <= kmax:
        for k in (N * r + q, N * r + q - m):
            if 0 <= k <= kmax:
                out.add(k)
        r += 1
    return sorted(out)


def _element_matrix(J, hi: int, lo: int, g: int) -> list[list[dict]]:
    """Split each basis tensor of J[hi] as sum_u u (x) tail_u, tails in J[lo] coordinates."""
    step = hi - lo
    src, dst = J[hi], J[lo]
    out = []
    for v in src.vectors:
        t = TensorVector.from_dict(hi, g, v)
        row = [dict() for _ in range(dst.dim)]
        for u, tail in t.split(step).items():
            if dst.reduce(tail):
                raise ComplexError(f"J_{hi} does not split into E^{step} (x) J_{lo}")
            for l, c in enumerate(dst.coordinates(tail)):
                if c:
                    row[l][u] = c
        out.append(row)
    return out


def koszul_template(p: Presentation, m: int | None = None, q: int = 0,
                    kmax: int = 8) -> FreeComplexTemplate:
    """Contraction C_{m,q} of K(A), positions with J-degree <= kmax.

    Defaults give the Koszul complex C_{N-1,0}.  ``bounded`` records whether
    J vanished before kmax, i.e. the template is the whole complex.
    """
    N, g = p.degree, p.generator_count
    m = N - 1 if m is None else m
    if not (0 <= q <= N - 2 and q + 1 <= m <= N - 1):
        raise ValueError(f"no contraction C_({m},{q}) for N={N}")
    J = dual_koszul_tower(p.relators, kmax + 1)
    degrees = [k for k in _contraction_degrees(N, m, q, kmax + 1) if J[k].dim]
    bounded = any(not J[k].dim for k in _contraction_degrees(N, m, q, kmax + 1))
    degrees = [k for k in degrees if k <= kmax]
    # a hole in the middle makes later positions unreachable
    for i in range(1, len(degrees)):
        if degrees[i] - degrees[i - 1] not in (m, N - m):
            degrees = degrees[:i]
            break
    elements = [()]
    for i in range(1, len(degrees)):
        elements.append(tuple(tuple(r) for r in _element_matrix(J, degrees[i], degrees[i - 1], g)))
    return FreeComplexTemplate(p, tuple(degrees), tuple(J[k].dim for k in degrees), tuple(elements),
                               m, q, bounded, bool(degrees) and degrees[0] == 0)


def full_template(p: Presentation, kmax: int = 8) -> FreeComplexTemplate:
    """The N-complex K(A) itself: every J-degree, single-step differential."""
    g = p.generator_count
    J = dual_koszul_tower(p.relators, kmax + 1)
    degrees = [k for k in range(kmax + 1) if J[k].dim]
    degrees = [k for i, k in enumerate(degrees) if k == i]
    elements = [()]
    for i in range(1, len(degrees)):
        elements.append(tuple(tuple(r) for r in _element_matrix(J, degrees[i], degrees[i - 1], g)))
    bounded = not J[kmax + 1].dim or len(degrees) < kmax + 1
    return FreeComplexTemplate(p, tuple(degrees), tuple(J[k].dim for k in degrees), tuple(elements),
                               1, 0, bounded, True)


# --------------------------------------------------------------------------
# slices


@dataclass
class ComplexSlice:
    """Scalar matrices of a template at one degree.

    ``dims[i]`` is the dimension at position i; ``maps[i]`` (i >= 1) holds the
    columns of the map out of position i (homological) or into it (dual).
    """

    degree: int
    dims: list
    maps: list
    field: FieldSpec
    dual: bool = False


def _element_cols(alg, element: dict, step: int, n_src: int, side: str) -> list[dict]:
    if side == "right":
        return alg.right_mult_element(element, step, n_src)
    return alg.left_mult_element(element, step, n_src)


def _block_map(alg, elements, n_src: int, n_dst: int, step: int, side: str,
               src_rank: int, dst_rank: int, transpose: bool) -> list[dict]:
    """Columns of the block matrix whose (j, l) block multiplies by elements[j][l]."""
    d_src, d_dst = alg.dim(n_src), alg.dim(n_dst)
    p = alg.p
    if transpose:
        src_rank, dst_rank = dst_rank, src_rank
    cols = [dict() for _ in range(src_rank * d_src)]
    if not d_src or not d_dst:
        return cols
    for j, row in enumerate(elements):
        for l, el in enumerate(row):
            if not el:
                continue
            block = _element_cols(alg, el, step, n_src, side)
            s, t = (l, j) if transpose else (j, l)
            base, off = s * d_src, t * d_dst
            for a, col in enumerate(block):
                target = cols[base + a]
                vec_axpy(target, 1, {off + b: v for b, v in col.items()}, p)
    return cols


def slice_at(t: FreeComplexTemplate, n: int, f: FieldSpec = QQ, check: bool = True) -> ComplexSlice:
    """Degree-n slice of the chain complex of left modules (right multiplication)."""
    alg = t.presentation.algebra(f)
    dims = [t.ranks[i] * alg.dim(n - k) for i, k in enumerate(t.degrees)]
    maps: list = [None]
    for i in range(1, len(t.degrees)):
        k_hi, k_lo = t.degrees[i], t.degrees[i - 1]
        if n < k_hi:
            maps.append([])
            continue
        maps.append(_block_map(alg, t.elements[i], n - k_hi, n - k_lo, k_hi - k_lo, "right",
                               t.ranks[i], t.ranks[i - 1], transpose=False))
    s = ComplexSlice(n, dims, maps, f)
    if check:
        _check_complex(s)
    return s


def dual_slice_at(t: FreeComplexTemplate, tau: int, f: FieldSpec = QQ, check: bool = True) -> ComplexSlice:
    """Internal degree ``tau`` of Hom_A(K, A): position i holds A_{tau + k_i}^{rank_i}.

    ``maps[i]`` holds the columns of the coboundary from position i-1 into i:
    left multiplication by the transposed element matrix.
    """
    alg = t.presentation.algebra(f)
    dims = [t.ranks[i] * alg.dim(tau + k) for i, k in enumerate(t.degrees)]
    maps: list = [None]
    for i in range(1, len(t.degrees)):
        k_hi, k_lo = t.degrees[i], t.degrees[i - 1]
        if tau + k_lo < 0:
            maps.append([])
            continue
        maps.append(_block_map(alg, t.elements[i], tau + k_lo, tau + k_hi, k_hi - k_lo, "left",
                               t.ranks[i], t.ranks[i - 1], transpose=True))
    s = ComplexSlice(tau, dims, maps, f, dual=True)
    if check:
        _check_complex(s)
    return s


def _check_complex(s: ComplexSlice):
    p = s.field.prime
    for i in range(2, len(s.maps)):
        first, second = (s.maps[i], s.maps[i - 1]) if not s.dual else (s.maps[i - 1], s.maps[i])
        if not first or not second:
            continue
        for col in first:
            if apply_columns(second, col, p):
                where = i if not s.dual else i - 1
                raise ComplexError(f"d o d != 0 at position {where}, degree {s.degree}")


def _rank(cols: list[dict], nrows: int, f: FieldSpec) -> int:
    cols = [c for c in cols if c]
    if not cols:
        return 0
    return kernels.rank(cols, nrows, f.prime)


# --------------------------------------------------------------------------
# homology


@dataclass(frozen=True)
class HomologyReport:
    """Rows ``(degree, position, dim, kernel, image, homology)``."""

    rows: tuple
    dual: bool = False

    def homology(self, degree: int, position: int) -> int:
        for r in self.rows:
            if r[0] == degree and r[1] == position:
                return r[5]
        raise KeyError((degree, position))

    def table(self) -> list[dict]:
        keys = ("degree", "position", "dim", "kernel", "image", "homology")
        return [dict(zip(keys, r)) for r in self.rows]


def _slice_rows(s: ComplexSlice) -> list[tuple]:
    npos = len(s.dims)
    ranks = [0] * (npos + 1)  # ranks[i]: rank of maps[i], zero outside
    for i in range(1, npos):
        if s.maps[i]:
            target = s.dims[i - 1] if not s.dual else s.dims[i]
            ranks[i] = _rank(s.maps[i], target, s.field)
    rows = []
    for i in range(npos):
        if not s.dual:
            out_rank, in_rank = ranks[i], ranks[i + 1]
        else:
            out_rank, in_rank = ranks[i + 1], ranks[i]
        kernel = s.dims[i] - out_rank
        rows.append((s.degree, i, s.dims[i], kernel, in_rank, kernel - in_rank))
    return rows


def homology(t: FreeComplexTemplate, n_max: int, f: FieldSpec = QQ) -> HomologyReport:
    """Per-degree homology of the (unaugmented) chain complex, degrees 0..n_max."""
    rows = []
    for n in range(n_max + 1):
        rows.extend(_slice_rows(slice_at(t, n, f)))
    return HomologyReport(tuple(rows))


def cohomology_dual(t: FreeComplexTemplate, n_max: int, f: FieldSpec = QQ) -> HomologyReport:
    """Cohomology of Hom_A(K, A) at internal degrees -k_top .. n_max - k_top."""
    top = t.degrees[-1]
    rows = []
    for tau in range(-top, n_max - top + 1):
        rows.extend(_slice_rows(dual_slice_at(t, tau, f)))
    return HomologyReport(tuple(rows), dual=True)


# --------------------------------------------------------------------------
# certificates


@dataclass
class Certificate:
    kind: str
    cutoff: int
    verdict: str
    witness: dict | None = None
    strategy: dict = field(default_factory=dict)
    table: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in ("pass", "fail"):
            raise ValueError("verdict is pass or fail")
        if (self.verdict == "pass") != (self.witness is None):
            raise ValueError("a failing certificate carries a witness, a passing one does not")

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    @property
    def label(self) -> str:
        if self.passed:
            return f"{self.kind}: pass, verified through degree {self.cutoff}"
        return f"{self.kind}: fail, failed within degree {self.cutoff}"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "cutoff": self.cutoff,
            "verdict": self.verdict,
            "label": self.label,
            "witness": self.witness,
            "strategy": self.strategy,
            "details": self.details,
            "table": self.table,
        }


def _koszul_verdict(rep: HomologyReport):
    for n, pos, _dim, _k, _im, h in rep.rows:
        expected = 1 if (n == 0 and pos == 0) else 0
        if h != expected:
            return {"position": pos, "degree": n, "homology": h, "expected": expected}
    return None


def koszul_certificate(p: Presentation, n_max: int, strategy: str = "verify", seed: int = 0) -> Certificate:
    """Acyclicity of C_{N-1,0} in positive degrees (H_0 = k at degree 0) through n_max."""
    t = koszul_template(p, kmax=n_max)
    rep, prov = run_with_strategy(lambda f: homology(t, n_max, f), strategy, seed)
    witness = _koszul_verdict(rep)
    details = {"degrees": list(t.degrees), "ranks": list(t.ranks), "bounded": t.bounded}
    if witness is None:
        details["global_dimension"] = t.length if t.bounded else None
    return Certificate("koszul", n_max, "pass" if witness is None else "fail", witness, prov,
                       rep.table(), details)


def gorenstein_certificate(p: Presentation, n_max: int, strategy: str = "verify", seed: int = 0) -> Certificate:
    """Cohomology of the dual complex: zero below the top, one-dimensional in total at the top."""
    t = koszul_template(p, kmax=n_max)
    top = t.length
    details = {"degrees": list(t.degrees), "ranks": list(t.ranks), "top_position": top,
               "internal_degrees": [-t.degrees[-1], n_max - t.degrees[-1]]}
    if not t.bounded:
        return Certificate("gorenstein", n_max, "fail",
                           {"reason": "Koszul complex does not terminate within the cutoff"},
                           {"strategy": strategy}, [], details)
    rep, prov = run_with_strategy(lambda f: cohomology_dual(t, n_max, f), strategy, seed)
    witness = None
    top_total = 0
    top_where = []
    for tau, pos, _dim, _k, _im, h in rep.rows:
        if pos < top and h and witness is None:
            witness = {"position": pos, "internal_degree": tau, "cohomology": h}
        if pos == top and h:
            top_total += h
            top_where.append(tau)
    if witness is None and top_total != 1:
        witness = {"position": top, "top_total_dimension": top_total, "internal_degrees": top_where}
    details["top_total_dimension"] = top_total
    details["top_class_internal_degree"] = top_where[0] if len(top_where) == 1 else top_where
    return Certificate("gorenstein", n_max, "pass" if witness is None else "fail", witness, prov,
                       rep.table(), details)


def _compose(maps, col, p):
    for m in maps:
        col = apply_columns(m, col, p)
        if not col:
            break
    return col


def _dn_zero_value(p: Presentation, n_max: int, f: FieldSpec):
    N = p.degree
    full = full_template(p, kmax=n_max)
    contraction = koszul_template(p, kmax=n_max)
    pk = f.prime
    failures = []
    for n in range(n_max + 1):
        s = slice_at(full, n, f, check=False)
        npos = len(s.dims)
        for i in range(N, npos):
            chain = [s.maps[i - r] for r in range(N)]
            for c, col in enumerate(chain[0]):
                if _compose(chain[1:], col, pk):
                    failures.append({"check": "d^N", "position": i, "degree": n, "column": c})
                    break
        # the long steps of the contraction are composites of single steps
        cs = slice_at(contraction, n, f, check=False)
        for ci in range(1, len(contraction.degrees)):
            hi, lo = contraction.degrees[ci], contraction.degrees[ci - 1]
            if hi - lo < 2 or hi >= npos:
                continue
            chain = [s.maps[k] for k in range(hi, lo, -1)]
            for c, col in enumerate(cs.maps[ci]):
                if _compose(chain, {c: f.one()}, pk) != col:
                    failures.append({"check": "composite", "position": ci, "degree": n, "column": c})
                    break
    return tuple(tuple(sorted(w.items())) for w in failures)


def dN_zero_check(p: Presentation, n_max: int, strategy: str = "verify", seed: int = 0) -> Certificate:
    """d^N = 0 on every slice of K(A), and contraction steps equal composites of d."""
    value, prov = run_with_strategy(lambda f: _dn_zero_value(p, n_max, f), strategy, seed)
    witness = dict(value[0]) if value else None
    return Certificate("dN_zero", n_max, "pass" if not value else "fail", witness, prov,
                       [dict(v) for v in value], {"N": p.degree})


def ym_M_slice_value(p: Presentation, n_max: int, f: FieldSpec) -> tuple:
    """Degrees where the C_{2,0} middle map, in the raised-relator basis, differs from M."""
    metric = p.metric
    if metric is None or p.degree != 3:
        raise ValueError("needs a Yang-Mills presentation with its metric")
    g = p.generator_count
    t = koszul_template(p, kmax=min(n_max, 4))
    i3 = t.degrees.index(3)
    J3 = dual_koszul_tower(p.relators, 3)[3]
    M = ym_matrix_M(metric)
    alg = p.algebra(f)
    coords = [J3.coordinates(r.as_dict()) for r in ym_raised_relators(metric)]
    bad = []
    for n in range(3, n_max + 1):
        src = n - 3
        for mu in range(g):
            for nu in range(g):
                combined: dict = {}
                for j, c in enumerate(coords[mu]):
                    if c:
                        vec_axpy(combined, Fraction(c), t.elements[i3][j][nu], None)
                lhs = alg.right_mult_element(combined, 2, src) if combined else [{} for _ in range(alg.dim(src))]
                rhs_el = M[mu][nu].as_dict()
                rhs = alg.right_mult_element(rhs_el, 2, src) if rhs_el else [{} for _ in range(alg.dim(src))]
                if lhs != rhs:
                    bad.append((n, mu, nu))
    return tuple(bad)


def ym_M_certificate(p: Presentation, n_max: int, strategy: str = "verify", seed: int = 0) -> Certificate:
    value, prov = run_with_strategy(lambda f: ym_M_slice_value(p, n_max, f), strategy, seed)
    witness = None
    if value:
        n, mu, nu = value[0]
        witness = {"degree": n, "mu": mu, "nu": nu}
    return Certificate("dN_zero", n_max, "pass" if not value else "fail", witness, prov, [],
                       {"check": "d^2 equals M"})


def euler_value(p: Presentation, n_max: int, f: FieldSpec):
    t = koszul_template(p, kmax=n_max)
    dims = p.algebra(f).dims(n_max)
    out = []
    for n in range(n_max + 1):
        total = sum((-1) ** i * r * dims[n - k] for i, (k, r) in enumerate(zip(t.degrees, t.ranks)) if k <= n)
        out.append(total)
    return tuple(out)


def euler_check(p: Presentation, n_max: int, strategy: str = "verify", seed: int = 0) -> Certificate:
    """sum_i (-1)^i rank_i p_{n - k_i} = delta_{n,0} for the Koszul template."""
    value, prov = run_with_strategy(lambda f: euler_value(p, n_max, f), strategy, seed)
    witness = None
    for n, v in enumerate(value):
        if v != (1 if n == 0 else 0):
            witness = {"degree": n, "value": v}
            break
    table = [{"degree": n, "alternating_sum": v} for n, v in enumerate(value)]
    return Certificate("euler", n_max, "pass" if witness is None else "fail", witness, prov, table)


__all__ = [
    "Certificate",
    "ComplexError",
    "ComplexSlice",
    "FreeComplexTemplate",
    "HomologyReport",
    "cohomology_dual",
    "dN_zero_check",
    "dual_slice_at",
    "euler_check",
    "full_template",
    "gorenstein_certificate",
    "homology",
    "koszul_certificate",
    "koszul_template",
    "slice_at",
    "ym_M_certificate",
]

"""The concrete algebras: Yang-Mills, (anti) self-duality and sanity presets."""
from __future__ import annotations

import re
from math import gcd
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import Metric, Presentation, dual_presentation, ideal_membership
from .exactlin import QQ, Subspace, annihilator, contains
from .series import (
    RationalSeries,
    heisenberg_series,
    self_duality_series,
    yang_mills_series,
)
from .tensor import TensorVector

CYCLIC = ((1, 2, 3), (2, 3, 1), (3, 1, 2))


def _names(n: int, stem: str = "D") -> tuple:
    return tuple(f"{stem}{i}" for i in range(n))


def _t(terms, g) -> TensorVector:
    return TensorVector.from_terms(terms, g)


# --------------------------------------------------------------------------
# Yang-Mills


def ym_relator_tensors(metric: Metric) -> list[TensorVector]:
    """g^{lm}(D_l D_m D_n + D_n D_l D_m - 2 D_l D_n D_m), one per n."""
    g = metric.size
    gi = metric.g_inv
    out = []
    for nu in range(g):
        terms = []
        for lam in range(g):
            for mu in range(g):
                c = gi[lam][mu]
                if c:
                    terms += [((lam, mu, nu), c), ((nu, lam, mu), c), ((lam, nu, mu), -2 * c)]
        out.append(_t(terms, g) if terms else TensorVector(3, g))
    return out


def ym_raised_relators(metric: Metric) -> list[TensorVector]:
    """r^mu = g^{mu nu} r_nu: the relator basis matching the rows of M."""
    low = ym_relator_tensors(metric)
    g = metric.size
    out = []
    for mu in range(g):
        acc = TensorVector(3, g)
        for nu in range(g):
            c = metric.g_inv[mu][nu]
            if c:
                acc = acc + c * low[nu]
        out.append(acc)
    return out


def yang_mills(metric: Metric | None = None) -> Presentation:
    """Cubic Yang-Mills algebra over ``metric`` (default Euclidean R^4)."""
    metric = Metric.euclidean(4) if metric is None else metric
    if metric.size < 2:
        raise ValueError("Yang-Mills needs at least two generators")
    return Presentation.from_relators(_names(metric.size), 3, ym_relator_tensors(metric),
                                      label=f"yang_mills(s={metric.size - 1})", metric=metric)


def heisenberg() -> Presentation:
    """The s = 1 Yang-Mills algebra, U of the Heisenberg Lie algebra."""
    p = yang_mills(Metric.euclidean(2))
    return Presentation(p.generators, p.relators, "heisenberg", p.metric)


def ym_matrix_M(metric: Metric) -> list[list[TensorVector]]:
    """M^{mu nu} = (g^{mu nu} g^{ab} + g^{mu a} g^{nu b} - 2 g^{mu b} g^{nu a}) D_a D_b."""
    g = metric.size
    gi = metric.g_inv
    rows = []
    for mu in range(g):
        row = []
        for nu in range(g):
            terms = []
            for a in range(g):
                for b in range(g):
                    c = gi[mu][nu] * gi[a][b] + gi[mu][a] * gi[nu][b] - 2 * gi[mu][b] * gi[nu][a]
                    if c:
                        terms.append(((a, b), c))
            row.append(_t(terms, g) if terms else TensorVector(2, g))
        rows.append(row)
    return rows


def generator_tensor(i: int, g: int) -> TensorVector:
    return TensorVector.word((i,), g)


def ym_M_nabla(metric: Metric) -> list[TensorVector]:
    """Components sum_nu M^{mu nu} D_nu."""
    g = metric.size
    M = ym_matrix_M(metric)
    return [sum((M[mu][nu] @ generator_tensor(nu, g) for nu in range(g)), TensorVector(3, g))
            for mu in range(g)]


def ym_nabla_M(metric: Metric) -> list[TensorVector]:
    """Components sum_mu D_mu M^{mu nu}."""
    g = metric.size
    M = ym_matrix_M(metric)
    return [sum((generator_tensor(mu, g) @ M[mu][nu] for mu in range(g)), TensorVector(3, g))
            for nu in range(g)]


def dual_relation_tensors(metric: Metric, scale: Fraction | None = None) -> list[TensorVector]:
    """theta^l theta^m theta^n - (1/s)(g^{lm} th^n + g^{mn} th^l - 2 g^{ln} th^m) g.

    ``scale`` replaces 1/s (used to build deliberately wrong relators).
    """
    g = metric.size
    s = g - 1
    k = Fraction(1, s) if scale is None else Fraction(scale)
    gi, gl = metric.g_inv, metric.g
    gbold = _t([((a, b), gl[a][b]) for a in range(g) for b in range(g) if gl[a][b]], g)
    out = []
    for lam in range(g):
        for mu in range(g):
            for nu in range(g):
                lhs = TensorVector.word((lam, mu, nu), g)
                coeffs: dict = {}
                for x, c in ((nu, gi[lam][mu]), (lam, gi[mu][nu]), (mu, -2 * gi[lam][nu])):
                    coeffs[x] = coeffs.get(x, 0) + c
                rhs = TensorVector(3, g)
                for x, c in coeffs.items():
                    if c:
                        rhs = rhs + (k * c) * (generator_tensor(x, g) @ gbold)
                out.append(lhs - rhs)
    return out


def dual_relation_check(metric: Metric, scale: Fraction | None = None) -> bool:
    """Closed-form dual relators span R^perp, and g is central modulo them."""
    g = metric.size
    ym = yang_mills(metric)
    rperp = annihilator(ym.relators.space)
    spanned = Subspace.span([t.as_dict() for t in dual_relation_tensors(metric, scale)], g**3)
    if spanned != rperp:
        return False
    gl = metric.g
    gbold = _t([((a, b), gl[a][b]) for a in range(g) for b in range(g) if gl[a][b]], g)
    for nu in range(g):
        th = generator_tensor(nu, g)
        comm = (gbold @ th) - (th @ gbold)
        if not contains(rperp, comm.as_dict()):
            return False
    return True


# --------------------------------------------------------------------------
# self-duality


def sd_relator_tensors(sign: int = 1) -> list[TensorVector]:
    """[D_0, D_k] - sign [D_l, D_m] for cyclic (k, l, m)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    out = []
    for k, l, m in CYCLIC:
        out.append(_t([((0, k), 1), ((k, 0), -1), ((l, m), -sign), ((m, l), sign)], 4))
    return out


def self_duality(sign: int = 1) -> Presentation:
    label = "self_duality(+)" if sign == 1 else "self_duality(-)"
    return Presentation.from_relators(_names(4), 2, sd_relator_tensors(sign), label=label,
                                      metric=Metric.euclidean(4))


def sd_matrix_N() -> list[list[TensorVector]]:
    """The 3x4 matrix of generators whose rows applied to D give the relators."""
    layout = [
        [(-1, 1), (1, 0), (1, 3), (-1, 2)],
        [(-1, 2), (-1, 3), (1, 0), (1, 1)],
        [(-1, 3), (1, 2), (-1, 1), (1, 0)],
    ]
    return [[c * generator_tensor(x, 4) for c, x in row] for row in layout]


def sd_N_nabla() -> list[TensorVector]:
    N = sd_matrix_N()
    return [sum((N[k][nu] @ generator_tensor(nu, 4) for nu in range(4)), TensorVector(2, 4))
            for k in range(3)]


def _levi_civita(idx: Sequence[int]) -> int:
    idx = list(idx)
    if len(set(idx)) < len(idx):
        return 0
    sign = 1
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                sign = -sign
    return sign


def sd_dual_relator_tensors() -> list[TensorVector]:
    """theta^l theta^m + 1/2 sum eps^{lmnr} theta^n theta^r, for all (l, m)."""
    out = []
    for lam in range(4):
        for mu in range(4):
            terms = [((lam, mu), 1)]
            for nu in range(4):
                for rho in range(4):
                    e = _levi_civita((lam, mu, nu, rho))
                    if e:
                        terms.append(((nu, rho), Fraction(e, 2)))
            out.append(_t(terms, 4))
    return out


def sd_dual_check() -> bool:
    """The closed-form relators span the annihilator of the self-duality relators."""
    rperp = annihilator(self_duality(1).relators.space)
    return Subspace.span([t.as_dict() for t in sd_dual_relator_tensors()], 16) == rperp


# --------------------------------------------------------------------------
# sanity algebras


def free_algebra(g: int = 2) -> Presentation:
    """Tensor algebra on g generators, presented as quadratic with no relators."""
    return Presentation.from_relators(_names(g, "x"), 2, [], label=f"free({g})")


def polynomial(g: int = 2) -> Presentation:
    rels = [_t([((i, j), 1), ((j, i), -1)], g) for i in range(g) for j in range(i + 1, g)]
    return Presentation.from_relators(_names(g, "x"), 2, rels, label=f"polynomial({g})")


def dual_numbers() -> Presentation:
    return Presentation.from_relators(("x",), 2, [_t([((0, 0), 1)], 1)], label="dual_numbers")


# --------------------------------------------------------------------------
# closed-form Hilbert series


def closed_form_series(p: Presentation) -> RationalSeries | None:
    """The known Hilbert series of a preset, identified by its relator space."""
    g, N = p.generator_count, p.degree
    if N == 3 and p.metric is not None and p == yang_mills(p.metric):
        if g == 2:
            return heisenberg_series()
        return yang_mills_series(g - 1)
    if N == 2 and g == 4 and p in (self_duality(1), self_duality(-1)):
        return self_duality_series()
    if N == 2 and p.relators.dim == 0:
        return RationalSeries((1,), (1, -g))
    if N == 2 and p == polynomial(g):
        den = (1,)
        for _ in range(g):
            den = tuple(np.convolve(den, (1, -1)).tolist())
        return RationalSeries((1,), den)
    if g == 1 and N == 2 and p == dual_numbers():
        return RationalSeries((1, 1), (1,))
    return None


# --------------------------------------------------------------------------
# representations


@dataclass(frozen=True)
class RepCandidate:
    """Square rational matrices standing in for the generators."""

    matrices: tuple

    def __post_init__(self):
        if not self.matrices:
            raise ValueError("need at least one matrix")
        size = len(self.matrices[0])
        for m in self.matrices:
            if len(m) != size or any(len(r) != size for r in m):
                raise ValueError("matrices must be square and of equal size")

    @classmethod
    def from_lists(cls, mats) -> "RepCandidate":
        return cls(tuple(tuple(tuple(Fraction(x) for x in r) for r in m) for m in mats))

    @property
    def size(self) -> int:
        return len(self.matrices[0])


def representation_check(p: Presentation, rep: RepCandidate) -> bool:
    """True iff every relator evaluates to the zero matrix."""
    if len(rep.matrices) != p.generator_count:
        raise ValueError(f"{len(rep.matrices)} matrices for {p.generator_count} generators")
    # clear denominators: M_x = A_x / d_x with A_x integral, exact object arithmetic
    ints, dens = [], []
    for m in rep.matrices:
        d = 1
        for row in m:
            for v in row:
                d = d * v.denominator // gcd(d, v.denominator)
        ints.append(np.array([[int(v * d) for v in row] for row in m], dtype=object))
        dens.append(d)
    cache: dict = {}

    def prod(word):
        hit = cache.get(word)
        if hit is None:
            hit = ints[word[0]] if len(word) == 1 else prod(word[:-1]).dot(ints[word[-1]])
            cache[word] = hit
        return hit

    n = rep.size
    for t in p.relators.tensors():
        coeffs = []
        for word, c in t.terms():
            d = 1
            for x in word:
                d *= dens[x]
            coeffs.append((word, Fraction(c) / d))
        lcm = 1
        for _, f in coeffs:
            lcm = lcm * f.denominator // gcd(lcm, f.denominator)
        total = np.zeros((n, n), dtype=object)
        for word, f in coeffs:
            total = total + int(f * lcm) * prod(word)
        if any(v != 0 for v in total.flat):
            return False
    return True


def truncated_regular_rep(p: Presentation, top: int) -> RepCandidate:
    """Left multiplication on A / A_{> top}, a finite-dimensional A-module."""
    alg = p.algebra(QQ)
    dims = alg.dims(top)
    offsets = np.cumsum([0] + dims).tolist()
    size = offsets[-1]
    mats = []
    for x in range(p.generator_count):
        m = [[Fraction(0)] * size for _ in range(size)]
        for n in range(top):
            cols = alg.left_mult(x, n)
            for j, col in enumerate(cols):
                for i, v in col.items():
                    m[offsets[n + 1] + i][offsets[n] + j] = Fraction(v)
        mats.append(m)
    return RepCandidate.from_lists(mats)


# --------------------------------------------------------------------------
# preset names for the command line

_METRIC_RE = re.compile(r"^(euclid|minkowski)(\d+)$")


def parse_metric(text: str) -> Metric:
    """``euclid4``, ``minkowski4`` or ``diag:a,b,...`` with rational entries."""
    text = text.strip()
    m = _METRIC_RE.match(text)
    if m:
        size = int(m.group(2))
        return Metric.euclidean(size) if m.group(1) == "euclid" else Metric.minkowski(size)
    if text.startswith("diag:"):
        return Metric.diagonal([Fraction(v) for v in text[5:].split(",")])
    raise ValueError(f"unrecognized metric {text!r}")


def preset(name: str, metric: str | None = None) -> Presentation:
    """Resolve a preset id: ym, sd+, sd-, heisenberg, free[:g], poly[:g], dual-numbers."""
    base, _, arg = name.partition(":")
    if base == "ym":
        return yang_mills(parse_metric(metric or "euclid4"))
    if base in ("sd+", "sd-"):
        return self_duality(1 if base == "sd+" else -1)
    if base == "heisenberg":
        return heisenberg()
    if base == "free":
        return free_algebra(int(arg or 2))
    if base in ("poly", "polynomial"):
        return polynomial(int(arg or 2))
    if base in ("dual-numbers", "dual_numbers"):
        return dual_numbers()
    raise ValueError(f"unknown preset {name!r}")


__all__ = [
    "RepCandidate",
    "closed_form_series",
    "dual_numbers",
    "dual_presentation",
    "dual_relation_check",
    "dual_relation_tensors",
    "free_algebra",
    "generator_tensor",
    "heisenberg",
    "ideal_membership",
    "parse_metric",
    "polynomial",
    "preset",
    "representation_check",
    "sd_N_nabla",
    "sd_dual_check",
    "sd_dual_relator_tensors",
    "sd_matrix_N",
    "sd_relator_tensors",
    "self_duality",
    "truncated_regular_rep",
    "yang_mills",
    "ym_M_nabla",
    "ym_matrix_M",
    "ym_nabla_M",
    "ym_raised_relators",
    "ym_relator_tensors",
]

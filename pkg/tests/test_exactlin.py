import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from koszulkit.exactlin import (
    QQ,
    AmbientMismatchError,
    BadPrimeError,
    FieldSpec,
    SparseMatrix,
    Subspace,
    annihilator,
    bareiss_rank,
    certified_rank,
    contains,
    kernel_basis,
    random_prime,
    rank,
    run_with_strategy,
    subspace_intersect,
    subspace_sum,
)

from oracles import sympy_rank

small_q = st.fractions(min_value=-3, max_value=3, max_denominator=3)


@st.composite
def matrices(draw, max_rows=6, max_cols=6):
    nr = draw(st.integers(0, max_rows))
    nc = draw(st.integers(1, max_cols))
    rows = []
    for _ in range(nr):
        vals = draw(st.lists(st.one_of(st.just(Fraction(0)), small_q), min_size=nc, max_size=nc))
        rows.append({j: v for j, v in enumerate(vals) if v})
    return rows, nc


def test_field_validation():
    with pytest.raises(ValueError):
        FieldSpec.modular(15)
    with pytest.raises(ValueError):
        FieldSpec("rational", 7)
    with pytest.raises(ValueError):
        FieldSpec("p-adic")
    f = FieldSpec.modular(7)
    assert f.coerce(Fraction(1, 2)) == 4
    assert f.coerce(-1) == 6
    with pytest.raises(BadPrimeError):
        f.coerce(Fraction(1, 14))
    assert str(QQ) == "Q" and str(f) == "GF(7)"


def test_random_prime_is_31_bit():
    rng = random.Random(0)
    for _ in range(20):
        p = random_prime(rng)
        assert 2**30 <= p < 2**31
        FieldSpec.modular(p)


def test_sparse_matrix_canonical():
    m = SparseMatrix.from_dense([[0, 2], [3, 0]])
    assert m.entries == ((0, 1, 2), (1, 0, 3))
    assert m.T.to_dense() == [[0, 3], [2, 0]]
    assert SparseMatrix.from_columns([{1: 3}, {0: 2}], 2) == m
    with pytest.raises(ValueError):
        SparseMatrix(1, 1, ((0, 0, 0),))
    with pytest.raises(IndexError):
        SparseMatrix(1, 1, ((0, 1, 1),))


@given(matrices())
def test_rank_matches_sympy(mc):
    rows, nc = mc
    m = SparseMatrix.from_rows(rows, nc)
    expected = sympy_rank(rows, nc)
    assert rank(m) == expected
    assert bareiss_rank(rows, nc) == expected
    assert rank(m, FieldSpec.modular(1000003)) == expected  # small entries: no bad prime


def test_modular_rank_can_drop():
    m = SparseMatrix.from_dense([[1, 1], [1, 8]])
    assert rank(m) == 2
    assert rank(m, FieldSpec.modular(7)) == 1


@given(matrices())
def test_kernel_basis(mc):
    rows, nc = mc
    m = SparseMatrix.from_rows(rows, nc)
    k = kernel_basis(m)
    assert k.dim == nc - rank(m)
    for v in k.vectors:
        for r in rows:
            assert sum(r.get(c, 0) * x for c, x in v.items()) == 0


@given(matrices(), matrices())
def test_dimension_formula(a, b):
    (ra, _), (rb, _) = a, b
    n = 6
    u = Subspace.span([{c: v for c, v in r.items() if c < n} for r in ra], n)
    w = Subspace.span([{c: v for c, v in r.items() if c < n} for r in rb], n)
    s, i = subspace_sum(u, w), subspace_intersect(u, w)
    assert s.dim + i.dim == u.dim + w.dim
    assert i.is_subspace_of(u) and i.is_subspace_of(w)
    assert u.is_subspace_of(s) and w.is_subspace_of(s)


@given(matrices())
def test_double_annihilator(mc):
    rows, nc = mc
    u = Subspace.span(rows, nc)
    a = annihilator(u)
    assert a.dim == nc - u.dim
    assert annihilator(a) == u


def test_span_is_canonical():
    a = Subspace.span([{0: 1, 1: 1}, {1: 2}], 3)
    b = Subspace.span([{0: 5}, {0: 1, 1: -1}], 3)
    assert a == b
    assert a.coordinates({0: 2, 1: 3}) == [2, 3]
    with pytest.raises(ValueError):
        a.coordinates({2: 1})


def test_contains_checks_ambient():
    u = Subspace.full(2)
    assert contains(u, {1: 5})
    with pytest.raises(AmbientMismatchError):
        contains(u, {2: 1})
    with pytest.raises(AmbientMismatchError):
        subspace_sum(u, Subspace.zero(3))


def test_with_field():
    u = Subspace.span([{0: 1, 1: Fraction(8, 3)}], 2)
    r = u.with_field(FieldSpec.modular(7))
    assert r.dim == 1 and r.vectors == [{0: 1, 1: 5}]
    with pytest.raises(BadPrimeError):
        Subspace.span([{0: 1, 1: Fraction(1, 7)}], 2).with_field(FieldSpec.modular(7))


def test_certified_rank():
    m = SparseMatrix.from_dense([[1, 2, 3], [2, 4, 6], [0, 1, Fraction(1, 3)]])
    res = certified_rank(m, seed=5)
    assert res.rank == 2
    assert res.path == "modular-agree" and len(res.primes) == 2


def test_strategy_paths():
    value, prov = run_with_strategy(lambda f: 3, "exact")
    assert prov["path"] == "exact"
    value, prov = run_with_strategy(lambda f: 3, "modular", seed=1)
    assert prov["path"] == "modular" and len(prov["primes"]) == 1
    value, prov = run_with_strategy(lambda f: 3, "verify", seed=1)
    assert prov["path"] == "modular-agree"
    # values that depend on the prime force exact escalation
    value, prov = run_with_strategy(lambda f: f.prime or "exact-answer", "verify", seed=2)
    assert value == "exact-answer" and prov["path"] == "exact-escalated"
    with pytest.raises(ValueError):
        run_with_strategy(lambda f: 0, "approximate")


def test_strategy_retries_bad_primes():
    calls = []

    def fn(f):
        calls.append(f.prime)
        if f.prime is not None and len(calls) == 1:
            raise BadPrimeError("unlucky")
        return 1

    value, prov = run_with_strategy(fn, "verify", seed=3)
    assert value == 1 and len(calls) == 3 and prov["primes"][0] == calls[1]

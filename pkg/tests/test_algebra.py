import random
import threading
import warnings
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from koszulkit.algebra import (
    DependentRelatorWarning,
    Metric,
    Presentation,
    dual_presentation,
    graded_dim,
    graded_dims,
    ideal_membership,
    mult_matrix,
    quotient_check,
    standard_section,
)
from koszulkit.exactlin import QQ, FieldSpec, ResourceLimitError
from koszulkit.presets import (
    free_algebra,
    heisenberg,
    polynomial,
    self_duality,
    yang_mills,
)
from koszulkit.tensor import RelatorSpace, TensorVector, word_index

from oracles import brute_graded_dims, gauss_rank, rows_to_dense

P = 2147483629
YM = [1, 4, 16, 60, 225, 840, 3136]


def terms_of(pres):
    return [list(t.terms()) for t in pres.relators.tensors()]


def test_metric_validation():
    with pytest.raises(ValueError):
        Metric.from_matrix([[1, 1], [1, 1]])
    with pytest.raises(ValueError):
        Metric.from_matrix([[1, 2], [0, 1]])
    with pytest.raises(ValueError):
        Metric.from_matrix([[1]])
    m = Metric.diagonal([2, Fraction(1, 3)])
    assert m.g_inv == ((Fraction(1, 2), 0), (0, 3))


def test_dependent_relators_warn():
    t = TensorVector.from_terms([((0, 1), 1), ((1, 0), -1)], 2)
    with pytest.warns(DependentRelatorWarning, match=r"\[1\]"):
        p = Presentation.from_relators(("x", "y"), 2, [t, 2 * t])
    assert p.relators.dim == 1
    with pytest.raises(ValueError):
        Presentation.from_relators(("x", "y"), 3, [t])


def test_canonical_json_and_fingerprint():
    a = yang_mills()
    b = yang_mills(Metric.diagonal([2, 2, 2, 2]))
    assert a == b  # same relator space
    assert a.fingerprint() == b.fingerprint()
    assert a.to_json() != b.to_json()  # metric is carried along
    assert a.fingerprint() != yang_mills(Metric.minkowski(4)).fingerprint()
    assert a.fingerprint() == yang_mills().fingerprint()


@pytest.mark.parametrize("pres,nmax", [
    (heisenberg(), 7), (yang_mills(), 4), (self_duality(1), 4), (polynomial(3), 4), (free_algebra(2), 5),
])
def test_dims_match_brute_force(pres, nmax):
    g, N = pres.generator_count, pres.degree
    expected = brute_graded_dims(terms_of(pres), g, N, nmax)
    assert pres.algebra(QQ).dims(nmax) == expected
    assert pres.algebra(FieldSpec.modular(P)).dims(nmax) == expected


@st.composite
def small_presentations(draw):
    g = draw(st.integers(1, 3))
    N = draw(st.integers(2, 3))
    k = draw(st.integers(0, 3))
    words = list(product(range(g), repeat=N))
    rels = []
    for _ in range(k):
        chosen = draw(st.lists(st.sampled_from(words), min_size=1, max_size=3, unique=True))
        coeffs = draw(st.lists(st.integers(-2, 2).filter(bool), min_size=len(chosen), max_size=len(chosen)))
        rels.append(TensorVector.from_terms(list(zip(chosen, coeffs)), g))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return Presentation.from_relators(tuple(f"x{i}" for i in range(g)), N, rels)


@settings(max_examples=40)
@given(small_presentations())
def test_random_presentations_match_brute_force(pres):
    nmax = 5 if pres.generator_count <= 2 else 4
    expected = brute_graded_dims(terms_of(pres), pres.generator_count, pres.degree, nmax)
    assert pres.algebra(QQ).dims(nmax) == expected


def test_exact_and_modular_agree_on_yang_mills():
    assert yang_mills().algebra(QQ).dims(6) == YM
    dims, prov = graded_dims(yang_mills(), 6, seed=11)
    assert dims == YM and prov["path"] == "modular-agree"
    assert graded_dim(yang_mills(), 5, strategy="exact") == 840


def test_section_projection():
    comp = standard_section(yang_mills(), 4)
    assert comp.dim == 225
    assert comp.standard_words == sorted(comp.standard_words)
    for k, w in enumerate(comp.standard_words[:50]):
        assert comp.project({w: 1}) == {k: 1}
    # padded relators project to zero
    for t in yang_mills().relators.tensors():
        for x in range(4):
            assert comp.project((TensorVector.word((x,), 4) @ t).as_dict()) == {}
            assert comp.project((t @ TensorVector.word((x,), 4)).as_dict()) == {}
    pm = standard_section(heisenberg(), 4).projection_matrix()
    assert pm.nrows == 9 and pm.ncols == 16


def test_left_and_right_multiplication_commute():
    alg = yang_mills().algebra(FieldSpec.modular(P))
    for n in range(4):
        for x in range(4):
            for y in range(4):
                lx, ry = alg.left_mult(x, n + 1), alg.right_mult(y, n)
                ly, rx = alg.left_mult(x, n), alg.right_mult(y, n + 1)
                for a in range(alg.dim(n)):
                    one = {}
                    for i, c in ry[a].items():
                        for j, d in lx[i].items():
                            one[j] = (one.get(j, 0) + c * d) % P
                    two = {}
                    for i, c in ly[a].items():
                        for j, d in rx[i].items():
                            two[j] = (two.get(j, 0) + c * d) % P
                    assert {k: v for k, v in one.items() if v} == {k: v for k, v in two.items() if v}


def test_mult_matrix_matches_normal_form():
    p = self_duality(1)
    alg = p.algebra(QQ)
    m = mult_matrix(p, "left", 2, 3)
    assert (m.nrows, m.ncols) == (alg.dim(4), alg.dim(3))
    cols = m.columns()
    for a, w in enumerate(alg.words(3)):
        assert cols[a] == alg.normal_form({2 * 4**3 + w: 1}, 4)
    with pytest.raises(ValueError):
        mult_matrix(p, "middle", 0, 1)


def test_ideal_membership():
    ym = yang_mills()
    for t in ym.relators.tensors():
        assert ideal_membership(ym, t)
    assert not ideal_membership(ym, TensorVector.word((0, 1, 2), 4))


def test_quotient_check():
    ym = yang_mills().relators
    assert quotient_check(ym, ym)
    assert quotient_check(ym, self_duality(1).relators)
    assert quotient_check(ym, self_duality(-1).relators)
    rng = random.Random(2024)
    rels = [TensorVector.from_dict(2, 4, {rng.randrange(16): rng.randint(1, 5) for _ in range(3)}) for _ in range(3)]
    q = RelatorSpace.from_tensors(rels, 4, 2)
    # oracle: does adding R to the degree-3 ideal slice of q raise its rank?
    rows = []
    for t in rels:
        for x in range(4):
            rows.append((TensorVector.word((x,), 4) @ t).as_dict())
            rows.append((t @ TensorVector.word((x,), 4)).as_dict())
    base = gauss_rank(rows_to_dense(rows, 64))
    grown = gauss_rank(rows_to_dense(rows + ym.space.vectors, 64))
    assert (grown == base) == quotient_check(ym, q)
    assert not quotient_check(ym, q)


def test_double_dual_is_identity():
    for p in (yang_mills(), self_duality(1), heisenberg(), polynomial(2)):
        assert dual_presentation(dual_presentation(p)).relators == p.relators


def test_cutoff_guard():
    with pytest.raises(ResourceLimitError):
        graded_dim(yang_mills(), 9)
    assert graded_dim(heisenberg(), 10, f=QQ) == 36


def test_concurrent_construction():
    p = yang_mills()
    f = FieldSpec.modular(1000003)
    results = []

    def work():
        results.append(p.algebra(f).dims(6))

    threads = [threading.Thread(target=work) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert results == [YM] * 4

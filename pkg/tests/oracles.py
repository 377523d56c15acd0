"""Reference computations that share no code with koszulkit.

Everything here is deliberately naive: dense Fraction matrices, sympy,
explicit word enumeration.  Small inputs only.
"""
from fractions import Fraction
from itertools import product

import numpy as np
import sympy


def sympy_rank(rows, ncols):
    """Rank of a list of {col: value} rows via sympy over QQ."""
    if not rows:
        return 0
    m = sympy.zeros(len(rows), ncols)
    for i, r in enumerate(rows):
        for c, v in r.items():
            m[i, c] = sympy.Rational(Fraction(v).numerator, Fraction(v).denominator)
    return m.rank()


def gauss_rank(dense):
    """Textbook Gaussian elimination on a dense list of Fraction rows."""
    a = [[Fraction(x) for x in r] for r in dense]
    if not a:
        return 0
    rank = 0
    ncols = len(a[0])
    for c in range(ncols):
        piv = next((i for i in range(rank, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for i in range(len(a)):
            if i != rank and a[i][c] != 0:
                f = a[i][c] / a[rank][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def gauss_rank_mod(dense, p):
    a = [[int(x) % p for x in r] for r in dense]
    rank = 0
    ncols = len(a[0]) if a else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = pow(a[rank][c], -1, p)
        for i in range(len(a)):
            if i != rank and a[i][c]:
                f = a[i][c] * inv % p
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def rows_to_dense(rows, ncols):
    return [[Fraction(r.get(c, 0)) for c in range(ncols)] for r in rows]


def word_relators(relators):
    """Relators as lists of (word tuple, Fraction)."""
    return [[(tuple(w), Fraction(c)) for w, c in rel] for rel in relators]


def brute_ideal_rank(relators, g, N, n):
    """dim of the degree-n ideal slice: span every u * r * v explicitly."""
    if n < N:
        return 0
    index = {w: i for i, w in enumerate(product(range(g), repeat=n))}
    rows = []
    for i in range(n - N + 1):
        for left in product(range(g), repeat=i):
            for right in product(range(g), repeat=n - N - i):
                for rel in relators:
                    row = {}
                    for w, c in rel:
                        k = index[left + tuple(w) + right]
                        row[k] = row.get(k, 0) + c
                    rows.append(row)
    return gauss_rank(rows_to_dense(rows, g**n)) if rows else 0


def brute_graded_dims(relators, g, N, nmax):
    return [g**n - brute_ideal_rank(relators, g, N, n) for n in range(nmax + 1)]


def sympy_series(num, den, cutoff):
    """Taylor coefficients of num(t)/den(t) from sympy."""
    t = sympy.symbols("t")
    f = sum(c * t**i for i, c in enumerate(num)) / sum(c * t**i for i, c in enumerate(den))
    s = sympy.series(f, t, 0, cutoff + 1).removeO()
    return [int(s.coeff(t, i)) for i in range(cutoff + 1)]


def necklace(g, j):
    """Number of primitive necklaces: (1/j) sum_{d|j} mu(j/d) g^d."""
    return sum(sympy.mobius(j // d) * g**d for d in sympy.divisors(j)) // j


def _plain(v):
    v = Fraction(v)
    return v.numerator if v.denominator == 1 else v


def eval_tensor(terms, mats):
    """Evaluate sum c * M_{w1} ... M_{wk} term by term with numpy object arrays."""
    arrs = [np.array([[_plain(v) for v in r] for r in m], dtype=object) for m in mats]
    size = len(mats[0])
    total = np.zeros((size, size), dtype=object)
    for w, c in terms:
        prod = arrs[w[0]]
        for x in w[1:]:
            prod = prod.dot(arrs[x])
        total = total + _plain(c) * prod
    return total.tolist()


YM_LIE_30 = [
    4, 6, 16, 45, 144, 440, 1440, 4680, 15600, 52344, 177840, 608160, 2095920,
    7262640, 25300032, 88517520, 310927680, 1095923400, 3874804560,
    13737892896, 48829153920, 173949483240, 620963048160, 2220904271040,
    7956987570576, 28553731537320, 102617166646800, 369294887482560,
    1330702217420400, 4800706662984672,
]

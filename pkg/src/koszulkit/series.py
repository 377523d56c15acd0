"""Exact truncated power series, Moebius inversion and graded Lie dimensions."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence


class NotEnvelopingError(ValueError):
    """The series is not a PBW product of nonnegative integer exponents."""


def _normalize(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


@dataclass(frozen=True)
class TruncatedSeries:
    """Coefficients c_0 .. c_cutoff of a power series."""

    coefficients: tuple

    def __post_init__(self):
        if not self.coefficients:
            raise ValueError("a truncated series needs at least c_0")
        object.__setattr__(self, "coefficients", tuple(_normalize(c) for c in self.coefficients))

    @classmethod
    def of(cls, coeffs: Sequence) -> "TruncatedSeries":
        return cls(tuple(coeffs))

    @property
    def cutoff(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, n):
        return self.coefficients[n]

    def __len__(self):
        return len(self.coefficients)

    def __iter__(self):
        return iter(self.coefficients)

    def truncate(self, cutoff: int) -> "TruncatedSeries":
        return TruncatedSeries(self.coefficients[: cutoff + 1])

    def __mul__(self, other) -> "TruncatedSeries":
        other = other if isinstance(other, TruncatedSeries) else TruncatedSeries(tuple(other))
        n = min(self.cutoff, other.cutoff)
        return TruncatedSeries(tuple(poly_mul(self.coefficients, other.coefficients)[: n + 1]))

    def inverse(self) -> "TruncatedSeries":
        return expand(RationalSeries((1,), self.coefficients), self.cutoff)

    def list(self) -> list:
        return list(self.coefficients)


@dataclass(frozen=True)
class RationalSeries:
    """numerator(t) / denominator(t) with integer polynomial coefficients (low degree first)."""

    numerator: tuple
    denominator: tuple

    def __post_init__(self):
        if not self.denominator or self.denominator[0] == 0:
            raise ZeroDivisionError("denominator must have nonzero constant term")

    @classmethod
    def from_factors(cls, numerator: Sequence[int], *den_factors: Sequence[int]) -> "RationalSeries":
        den = (1,)
        for f in den_factors:
            den = tuple(poly_mul(den, f))
        return cls(tuple(numerator), den)


def poly_mul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def expand(r: RationalSeries, cutoff: int) -> TruncatedSeries:
    """Power-series coefficients via the linear recurrence of the denominator."""
    den = r.denominator
    d0 = den[0]
    if d0 == 0:
        raise ZeroDivisionError("denominator must have nonzero constant term")
    num = r.numerator
    out = []
    for n in range(cutoff + 1):
        acc = num[n] if n < len(num) else 0
        for k in range(1, min(n, len(den) - 1) + 1):
            acc -= den[k] * out[n - k]
        if d0 in (1, -1):
            out.append(acc * d0)
        else:
            out.append(Fraction(acc, d0))
    return TruncatedSeries(tuple(out))


def pq_one_check(p: TruncatedSeries, q: Sequence) -> bool:
    """True iff p * q = 1 + O(t^(cutoff+1))."""
    prod = poly_mul(p.coefficients, list(q))[: p.cutoff + 1]
    prod += [0] * (p.cutoff + 1 - len(prod))
    return prod[0] == 1 and not any(prod[1:])


def koszul_numerator(dual_dims: Sequence[int], N: int) -> list[int]:
    """Q(t) = sum_n dim A^!_{Nn} t^{Nn} - dim A^!_{Nn+1} t^{Nn+1}."""
    q = [0] * len(dual_dims)
    for k, d in enumerate(dual_dims):
        if k % N == 0:
            q[k] = d
        elif k % N == 1:
            q[k] = -d
    while len(q) > 1 and q[-1] == 0:
        q.pop()
    return q


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("Moebius function is defined for n >= 1")
    result = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            result = -result
        d += 1
    if n > 1:
        result = -result
    return result


def mobius_table(nmax: int) -> list[int]:
    """mu(0..nmax) by a linear sieve; entry 0 is unused (0)."""
    mu = [1] * (nmax + 1)
    if nmax >= 0:
        mu[0] = 0
    is_comp = [False] * (nmax + 1)
    primes: list[int] = []
    for i in range(2, nmax + 1):
        if not is_comp[i]:
            primes.append(i)
            mu[i] = -1
        for p in primes:
            if i * p > nmax:
                break
            is_comp[i * p] = True
            if i % p == 0:
                mu[i * p] = 0
                break
            mu[i * p] = -mu[i]
    return mu


def divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


@dataclass(frozen=True)
class LieDims:
    """N_1 .. N_jmax; ``from_series`` lists the j taken from Witt inversion."""

    values: tuple
    from_series: tuple = field(default=())

    def __getitem__(self, j: int) -> int:
        if j < 1:
            raise IndexError("Lie dimensions are indexed from 1")
        return self.values[j - 1]

    def __len__(self):
        return len(self.values)

    def list(self) -> list[int]:
        return list(self.values)


def log_derivative_coeffs(p: TruncatedSeries) -> list:
    """a_n with t P'/P = sum a_n t^n (a_0 = 0); integral when p is."""
    if p[0] != 1:
        raise NotEnvelopingError("series must start with 1")
    a = [0] * (p.cutoff + 1)
    for n in range(1, p.cutoff + 1):
        acc = n * p[n]
        for k in range(1, n):
            acc -= a[k] * p[n - k]
        a[n] = acc
    return a


def lie_dims_from_series(p: TruncatedSeries, jmax: int | None = None) -> LieDims:
    """Graded Lie dimensions N_j with prod_j (1 - t^j)^(-N_j) = p."""
    jmax = p.cutoff if jmax is None else jmax
    if jmax > p.cutoff:
        raise ValueError(f"series known to t^{p.cutoff} only, need t^{jmax}")
    a = log_derivative_coeffs(p.truncate(jmax))
    mu = mobius_table(jmax)
    out = []
    for j in range(1, jmax + 1):
        total = sum(mu[j // d] * a[d] for d in divisors(j))
        n_j = Fraction(total, j)
        if n_j.denominator != 1 or n_j < 0:
            raise NotEnvelopingError(f"N_{j} = {n_j} is not a nonnegative integer")
        out.append(int(n_j))
    return LieDims(tuple(out), tuple(range(1, jmax + 1)))


def power_sums(trace: int, kmax: int) -> list[int]:
    """t1^k + t2^k for the roots of t^2 - trace*t + 1, k = 0..kmax."""
    ps = [2, trace]
    for _ in range(2, kmax + 1):
        ps.append(trace * ps[-1] - ps[-2])
    return ps[: kmax + 1]


def lie_dims_closed_form(s: int, jmax: int) -> LieDims:
    """Yang-Mills Lie dimensions from power sums of the roots of t^2 - (s+1)t + 1.

    The closed form holds for j > 2; N_1 and N_2 come from Witt inversion of
    the full series (the (1 - t^2)^(-1) factor contributes one extra class at j = 2).
    """
    if jmax < 3:
        raise ValueError("jmax must be at least 3")
    ps = power_sums(s + 1, jmax)
    mu = mobius_table(jmax)
    low = lie_dims_from_series(expand(yang_mills_series(s), 2), 2)
    out = [low[1], low[2]]
    for j in range(3, jmax + 1):
        total = sum(mu[j // k] * ps[k] for k in divisors(j))
        if total % j:
            raise ArithmeticError(f"closed form not integral at j={j}")
        out.append(total // j)
    return LieDims(tuple(out), (1, 2))


def pbw_product(lie: LieDims | Sequence[int], cutoff: int) -> TruncatedSeries:
    """prod_{j <= cutoff} (1 - t^j)^(-N_j), truncated at t^cutoff."""
    values = lie.values if isinstance(lie, LieDims) else tuple(lie)
    series = [1] + [0] * cutoff
    for j, m in enumerate(values[:cutoff], start=1):
        if not m:
            continue
        # (1 - t^j)^(-m) = sum_k C(m + k - 1, k) t^(jk)
        factor = [0] * (cutoff + 1)
        coef = 1
        for k in range(cutoff // j + 1):
            if k:
                coef = coef * (m + k - 1) // k
            factor[j * k] = coef
        series = poly_mul(series, factor)[: cutoff + 1]
    return TruncatedSeries(tuple(series))


def growth_ratio(p: TruncatedSeries, n: int) -> Fraction:
    """p_n / p_{n-1} exactly."""
    if n < 1 or p[n - 1] == 0:
        raise ZeroDivisionError("p_{n-1} is zero")
    return Fraction(p[n], p[n - 1])


# closed forms for the preset algebras


def yang_mills_series(s: int) -> RationalSeries:
    """1 / ((1 - t^2)(1 - (s+1)t + t^2))."""
    return RationalSeries.from_factors((1,), (1, 0, -1), (1, -(s + 1), 1))


def self_duality_series() -> RationalSeries:
    """1 / ((1 - t)(1 - 3t))."""
    return RationalSeries.from_factors((1,), (1, -1), (1, -3))


def heisenberg_series() -> RationalSeries:
    """1 / ((1 - t)^2 (1 - t^2))."""
    return RationalSeries.from_factors((1,), (1, -1), (1, -1), (1, 0, -1))

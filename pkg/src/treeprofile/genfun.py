"""Truncated power series for exact tree-size and profile moments.

The size generating function A(z) = E z^{|T|} of an unconditioned critical
tree solves A = z Phi(A); its coefficients a_n = P(|T| = n) drive exact
size computations everywhere (forest splitting, edge marking, Dwass
checks).  On top of A, closed rational expressions give the bivariate
series whose (n, k) coefficients are a_n E[L_n(k)] and a_n E[Lambda_n(k)],
and, at a fixed point x on the unit circle, the complex z-series whose
n-th coefficients are a_n E|L-hat_n|^2 and a_n E|Lambda-hat_n|^2 for the
lattice Fourier transforms of the profiles.

Series arithmetic is plain double (complex double) with C-accumulated
convolutions; the exactness gates of the test-suite (1e-10 relative
against enumeration) hold with a wide margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import zeta as hurwitz_zeta

from .weights import (OffspringDistribution, WeightSequence, WeightError,
                      unrooted_to_rooted)

__all__ = [
    "TruncatedSeries",
    "BivariateSeries",
    "solve_A",
    "gw_size_coeffs",
    "apow_coeffs",
    "series_B",
    "series_D",
    "series_CEF_at",
    "expected_profiles",
    "fourier_second_moments",
    "sum_pmf",
    "exact_dwass_size_prob",
    "total_mass_residual",
    "unrooted_gf_check",
]

_FFT_MIN = 256  # below this length product, np.convolve beats FFT


# --- raw array helpers -------------------------------------------------------

def _mul(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Series product truncated to length n+1."""
    la, lb = min(len(a), n + 1), min(len(b), n + 1)
    a, b = a[:la], b[:lb]
    if la == 0 or lb == 0:
        return np.zeros(0, dtype=np.result_type(a.dtype, b.dtype, float))
    if la * lb <= _FFT_MIN * _FFT_MIN:
        out = np.convolve(a, b)
    else:
        out = fftconvolve(a, b)
    return out[: n + 1]


def _inv(d: np.ndarray, n: int) -> np.ndarray:
    """Series reciprocal by Newton doubling; d[0] must be nonzero."""
    if d[0] == 0:
        raise ZeroDivisionError("series with zero constant term")
    x = np.zeros(1, dtype=np.result_type(d.dtype, float))
    x[0] = 1.0 / d[0]
    m = 0
    while m < n:
        m = min(2 * m + 1, n)
        e = _mul(d, x, m)
        corr = -e
        corr[0] += 2.0
        x = _mul(x, corr, m)
    return x


def _exp(s: np.ndarray, n: int) -> np.ndarray:
    """exp of a series with s[0] = 0, by Newton with a log correction."""
    if s[0] != 0:
        raise ValueError("series exp needs zero constant term")
    dt = np.result_type(s.dtype, float)
    e = np.ones(1, dtype=dt)
    m = 0
    while m < n:
        m = min(2 * m + 1, n)
        loge = np.zeros(m + 1, dtype=dt)
        if len(e) > 1:
            de = e[1:] * np.arange(1, len(e))
            q = _mul(de, _inv(e, m), m - 1)
            loge[1: len(q) + 1] = q / np.arange(1, len(q) + 1)
        corr = _pad(s, m) - loge
        corr[0] += 1.0
        e = _mul(e, corr, m)
    return e


def _pad(a: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n + 1, dtype=a.dtype)
    out[: min(len(a), n + 1)] = a[: n + 1]
    return out


# --- family descriptors ------------------------------------------------------

@dataclass(frozen=True)
class _Fam:
    """Closed-form generating function of a weight/probability family."""

    form: str        # "rational1", "rational2", "exp", "poly"
    c: float         # leading constant
    q: float = 0.0   # pole or exponential rate
    poly: tuple = ()

    def compose(self, s: np.ndarray, n: int, deriv: int = 0) -> np.ndarray:
        """Series of Phi^{(deriv)}(S) for a series S with S[0] = 0."""
        if self.form == "rational1":
            # Phi(w) = c / (1 - q w); Phi^(r) = c q^r r! / (1 - q w)^{r+1}
            den = -self.q * _pad(s, n)
            den[0] += 1.0
            base = _inv(den, n)
            out = base
            for _ in range(deriv):
                out = _mul(out, base, n)
            return (self.c * self.q**deriv * math.factorial(deriv)) * out
        if self.form == "rational2":
            # Phi(w) = c / (1 - q w)^2; Phi^(r) = c q^r (r+1)! / (1 - q w)^{r+2}
            den = -self.q * _pad(s, n)
            den[0] += 1.0
            base = _inv(den, n)
            out = _mul(base, base, n)
            for _ in range(deriv):
                out = _mul(out, base, n)
            return (self.c * self.q**deriv * math.factorial(deriv + 1)) * out
        if self.form == "exp":
            # Phi(w) = c exp(q w)
            return (self.c * self.q**deriv) * _exp(self.q * _pad(s, n), n)
        # polynomial (finite table)
        coeffs = np.array(self.poly, dtype=float) * self.c
        for _ in range(deriv):
            if len(coeffs) <= 1:
                coeffs = np.zeros(0)
                break
            coeffs = coeffs[1:] * np.arange(1, len(coeffs))
        out = np.zeros(n + 1, dtype=np.result_type(s.dtype, float))
        if len(coeffs) == 0:
            return out
        sp = _pad(s, n)
        out[0] = coeffs[-1]
        for c in coeffs[-2::-1]:
            out = _mul(out, sp, n)
            out = _pad(out, n)
            out[0] += c
        return out


def _fam_of(obj) -> _Fam:
    if isinstance(obj, OffspringDistribution):
        p = dict(obj.params)
        if obj.family == "geometric":
            q = p["q"]
            return _Fam("rational1", 1 - q, q)
        if obj.family == "poisson":
            lam = p["lam"]
            return _Fam("exp", math.exp(-lam), lam)
        if obj.family == "binomial2":
            q = p["q"]
            return _Fam("poly", 1.0, poly=((1 - q) ** 2, 2 * q * (1 - q), q * q))
        if obj.family == "neg_binomial2":
            r = p["r"]
            return _Fam("rational2", (1 - r) ** 2, r)
        if obj.family == "table":
            return _Fam("poly", 1.0, poly=tuple(obj.table))
        raise WeightError(f"{obj.family} is a root law, not a body law")
    if isinstance(obj, WeightSequence):
        p = obj.param_dict
        if obj.family == "geometric":
            return _Fam("rational1", obj.scale, p["q"])
        if obj.family == "poisson":
            return _Fam("exp", obj.scale, p["lam"])
        if obj.family == "binary":
            q = p["q"]
            return _Fam("poly", obj.scale,
                        poly=((1 - q) ** 2, 2 * q * (1 - q), q * q))
        if obj.family == "linear_geometric":
            return _Fam("rational2", obj.scale, p["beta"])
        if obj.family == "table":
            return _Fam("poly", obj.scale, poly=tuple(obj.coeffs))
    raise WeightError(f"no generating-function form for {obj!r}")


# --- the fixed point A = z Phi(A) -------------------------------------------

def _solve_fixed_point(fam: _Fam, n: int) -> np.ndarray:
    """Coefficients of A with A = z Phi(A), by Newton precision doubling."""
    a = np.zeros(max(n, 1) + 1)
    a[1] = fam.compose(np.zeros(1), 0)[0]  # a_1 = phi_0
    a = a[:2]
    m = 1
    while m < n:
        m = min(2 * m, n)
        phi = fam.compose(a, m - 1)
        res = _pad(a, m)
        res[1:] -= phi[:m]          # A - z Phi(A)
        dphi = fam.compose(a, m - 1, deriv=1)
        den = np.zeros(m + 1)
        den[0] = 1.0
        den[1:] -= dphi[:m]         # 1 - z Phi'(A)
        a = _pad(a, m) - _mul(res, _inv(den, m), m)
        a[0] = 0.0
    return a[: n + 1]


@lru_cache(maxsize=64)
def _solve_A_cached(famspec, n: int) -> np.ndarray:
    out = _solve_fixed_point(_Fam(*famspec), n)
    out.setflags(write=False)
    return out


def _famspec(p) -> tuple:
    fam = _fam_of(p)
    return (fam.form, fam.c, fam.q, fam.poly)


def gw_size_coeffs(p, n: int) -> np.ndarray:
    """Array a[0..n] with a[m] = P(|T| = m) (a[0] = 0); read-only view."""
    return _solve_A_cached(_famspec(p), int(n))


def solve_A(p, n: int) -> "TruncatedSeries":
    """Size series A(z) = sum_m P(|T| = m) z^m through order n."""
    return TruncatedSeries(gw_size_coeffs(p, n))


@lru_cache(maxsize=256)
def _apow_cached(famspec, j: int, n: int) -> np.ndarray:
    if j == 1:
        return _solve_A_cached(famspec, n)
    out = _mul(_apow_cached(famspec, j - 1, n), _solve_A_cached(famspec, n), n)
    out.setflags(write=False)
    return out


def apow_coeffs(p, j: int, n: int) -> np.ndarray:
    """Coefficients of A(z)**j through order n (forest size splitting)."""
    if j == 0:
        out = np.zeros(n + 1)
        out[0] = 1.0
        return out
    return _apow_cached(_famspec(p), int(j), int(n))


# --- i.i.d. sums (Dwass formula) ---------------------------------------------

@lru_cache(maxsize=64)
def _sum_pmf_cached(key, length: int, n: int, table_bytes) -> np.ndarray:
    base = np.frombuffer(table_bytes)[:length]
    result = np.zeros(length)
    result[0] = 1.0
    m = n
    cur = base
    while m > 0:
        if m & 1:
            result = _pad(_mul(result, cur, length - 1), length - 1)
        m >>= 1
        if m:
            cur = _pad(_mul(cur, cur, length - 1), length - 1)
    result.setflags(write=False)
    return result


def sum_pmf(p: OffspringDistribution, n: int, length: int) -> np.ndarray:
    """P(S_n = t) for t = 0..length-1, S_n a sum of n i.i.d. offspring draws.

    Truncating the base pmf at `length` is exact here: increments are
    nonnegative, so values above the window never contribute below it.
    """
    tab = p.table_view(length)
    return _sum_pmf_cached(p.key, int(length), int(n), tab.tobytes())


def exact_dwass_size_prob(p: OffspringDistribution, n: int, k: int) -> float:
    """P(a forest of k critical trees has total size n) = (k/n) P(S_n = n-k)."""
    if not 1 <= k <= n:
        return 0.0
    s = sum_pmf(p, n, n + 1)
    return k / n * float(s[n - k])


# --- total mass with tail adjustment ----------------------------------------

def total_mass_residual(p, n: int = 4000) -> float:
    """|sum_{m<=n} a_m + tail_estimate - 1| with a fitted n^{-3/2} power tail.

    The tail sum_{m>n} a_m is estimated from the expansion
    a_m ~ m^{-3/2} (c0 + c1/m + c2/m^2 + c3/m^3) fitted on exact a_m
    (feasible residues only) and summed exactly via Hurwitz zeta values.
    """
    a = gw_size_coeffs(p, n + 1)
    span = int(getattr(p, "span", 1))
    partial = float(a[1: n + 1].sum())
    # fp residue can leave ~1e-17 junk at infeasible sizes; filter by the
    # span lattice, not by a > 0
    feasible = np.arange(1, n + 1, dtype=np.int64)
    feasible = feasible[(feasible - 1) % span == 0]
    feasible = feasible[(feasible >= n // 2) & (a[feasible] > 0)]
    if len(feasible) < 4:
        raise WeightError("not enough feasible sizes to fit the tail")
    nodes = feasible[np.unique(np.linspace(0, len(feasible) - 1, 8).astype(int))]
    y = a[nodes] * nodes.astype(float) ** 1.5
    # fit in the well-conditioned variable u = n/m on [1, 2]
    u = n / nodes.astype(float)
    X = np.vstack([u**j for j in range(4)]).T
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    # feasible sizes are m = 1 + span*j; sum m^{-q} over m > n exactly
    j0 = (n + span - 1) // span  # smallest j with 1 + span*j > n
    tail = 0.0
    for j, c in enumerate(coef):
        q = 1.5 + j
        tail += c * float(n) ** j * span ** (-q) * float(hurwitz_zeta(q, j0 + 1.0 / span))
    return abs(partial + tail - 1.0)


# --- series wrappers ---------------------------------------------------------

class TruncatedSeries:
    """Coefficients c_0..c_N; arithmetic is exact modulo z^{N+1}."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i: int):
        return self.coeffs[i] if 0 <= i <= self.order else 0.0

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            n = min(self.order, other.order)
            return TruncatedSeries(self.coeffs[: n + 1] + other.coeffs[: n + 1])
        out = self.coeffs.astype(np.result_type(self.coeffs.dtype, type(other))).copy()
        out[0] += other
        return TruncatedSeries(out)

    def __sub__(self, other):
        if isinstance(other, TruncatedSeries):
            n = min(self.order, other.order)
            return TruncatedSeries(self.coeffs[: n + 1] - other.coeffs[: n + 1])
        out = self.coeffs.astype(np.result_type(self.coeffs.dtype, type(other))).copy()
        out[0] -= other
        return TruncatedSeries(out)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            n = min(self.order, other.order)
            return TruncatedSeries(_mul(self.coeffs, other.coeffs, n))
        return TruncatedSeries(self.coeffs * other)

    __rmul__ = __mul__

    def inverse(self) -> "TruncatedSeries":
        return TruncatedSeries(_inv(self.coeffs, self.order))

    def shift(self, by: int = 1) -> "TruncatedSeries":
        out = np.zeros(len(self.coeffs), dtype=self.coeffs.dtype)
        out[by:] = self.coeffs[: len(self.coeffs) - by]
        return TruncatedSeries(out)


class BivariateSeries:
    """Coefficients c[m, k] for z^m x^k; products truncate both variables."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs)

    @property
    def orders(self) -> tuple[int, int]:
        return self.coeffs.shape[0] - 1, self.coeffs.shape[1] - 1

    def __add__(self, other: "BivariateSeries") -> "BivariateSeries":
        n = min(self.coeffs.shape[0], other.coeffs.shape[0])
        k = min(self.coeffs.shape[1], other.coeffs.shape[1])
        return BivariateSeries(self.coeffs[:n, :k] + other.coeffs[:n, :k])

    def __mul__(self, other: "BivariateSeries") -> "BivariateSeries":
        n = min(self.coeffs.shape[0], other.coeffs.shape[0]) - 1
        k = min(self.coeffs.shape[1], other.coeffs.shape[1]) - 1
        out = np.zeros((n + 1, k + 1), dtype=np.result_type(self.coeffs.dtype,
                                                            other.coeffs.dtype))
        for j in range(k + 1):
            for j2 in range(j + 1):
                block = _mul(self.coeffs[:, j2], other.coeffs[:, j - j2], n)
                out[: len(block), j] += block
        return BivariateSeries(out)

    def z_row(self, m: int) -> np.ndarray:
        return self.coeffs[m]


def _g_series(p, n: int) -> tuple[np.ndarray, np.ndarray, _Fam]:
    """(a, g, fam) with a = A-coefficients and g = z Phi'(A)."""
    fam = _fam_of(p)
    a = gw_size_coeffs(p, n)
    dphi = fam.compose(a, n - 1, deriv=1)
    g = np.zeros(n + 1)
    g[1:] = dphi[:n]
    return a, g, fam


def series_B(p, n: int, k: int) -> BivariateSeries:
    """B(z, x) = sum a_m E[L_m(j)] z^m x^j = A / (1 - x z Phi'(A))."""
    a, g, _ = _g_series(p, n)
    out = np.zeros((n + 1, k + 1))
    cur = a.copy()
    out[:, 0] = cur
    for j in range(1, k + 1):
        cur = _pad(_mul(cur, g, n), n)
        out[:, j] = cur
    return BivariateSeries(out)


def series_D(p, n: int, k: int) -> BivariateSeries:
    """D(z, x) = sum a_m E[Lambda_m(j)] z^m x^j (distance-profile series)."""
    a, g, fam = _g_series(p, n)
    one = np.zeros(n + 1)
    one[0] = 1.0
    h = _inv(one - g, n)                                  # 1 / (1 - z Phi'(A))
    d2 = fam.compose(a, n - 1, deriv=2)
    zphi2 = np.zeros(n + 1)
    zphi2[1:] = d2[:n]
    w = _mul(zphi2, _mul(a, a, n), n)                     # z Phi''(A) A^2
    out = np.zeros((n + 1, k + 1))
    out[:, 0] = _pad(_mul(h, a, n), n)
    g_jm1 = np.zeros(n + 1)
    g_jm1[0] = 1.0                                        # G^{j-1}
    g_jm2 = None                                          # G^{j-2}
    for j in range(1, k + 1):
        term = 2.0 * _mul(a, _mul(g, g_jm1, n), n)
        if j >= 2:
            term = _pad(term, n) + (j - 1) * _pad(_mul(w, g_jm2, n), n)
        out[:, j] = _pad(_mul(h, term, n), n)
        g_jm2 = g_jm1
        g_jm1 = _pad(_mul(g_jm1, g, n), n)
    return BivariateSeries(out)


def expected_profiles(p, n: int) -> tuple[np.ndarray, np.ndarray]:
    """(E[L_n(k)], E[Lambda_n(k)]) for k = 0..n-1, exact via the series."""
    if n == 1:
        return np.array([1.0]), np.array([1.0])
    a = gw_size_coeffs(p, n)
    if a[n] <= 0:
        raise WeightError(f"size {n} unreachable for this offspring law")
    B = series_B(p, n, n - 1)
    D = series_D(p, n, n - 1)
    return B.z_row(n) / a[n], D.z_row(n) / a[n]


def series_CEF_at(p, x: complex, n: int):
    """C, E, F z-series at (x, y) = (x, conj(x)) with |x| = 1.

    Coefficient m of C (resp. F) divided by a_m is E|L-hat_m(xi)|^2
    (resp. E|Lambda-hat_m(xi)|^2) for x = e^{i xi}, where L-hat and
    Lambda-hat are the lattice Fourier transforms of the profiles.  The
    reductions x y = 1, x^2 y = x, x y^2 = y are substituted symbolically
    so the removable denominator factor never suffers cancellation.
    Needs a finite fourth moment of the offspring law (all built-in
    families qualify).
    """
    if abs(abs(x) - 1.0) > 1e-12:
        raise ValueError("x must lie on the unit circle")
    x = complex(x)
    y = x.conjugate()
    a, g, fam = _g_series(p, n)
    one = np.zeros(n + 1)
    one[0] = 1.0
    h = _inv(one - g, n)
    zp = []
    for r in (2, 3, 4):
        d = fam.compose(a, n - 1, deriv=r)
        z = np.zeros(n + 1)
        z[1:] = d[:n]
        zp.append(z)
    zphi2, zphi3, zphi4 = zp
    ac = a.astype(complex)
    gc = g.astype(complex)
    hc = h.astype(complex)

    def b_at(u):
        den = _pad(-u * gc, n)
        den[0] += 1.0
        return _mul(ac, _inv(den, n), n)

    bx, by = b_at(x), b_at(y)

    c_num = _mul(zphi2, _mul(bx, by, n), n) + _pad(bx, n) + _pad(by, n) - ac
    C = _mul(hc, c_num, n)

    def d_at(u, bu):
        num = (u * u) * _mul(zphi2, _mul(bu, bu, n), n) \
            + 2.0 * u * _pad(_mul(gc, bu, n), n) + ac
        return _mul(hc, _pad(num, n), n)

    dx, dy = d_at(x, bx), d_at(y, by)

    def e_at(u, v, bu, bv, du):
        # E(z, u, v) with u v = 1 (so u^2 v = u); denominator 1 - v z Phi'(A)
        num = (v * _mul(zphi2, _mul(du, bv, n), n)
               + 2.0 * u * _pad(_mul(zphi2, _mul(C, bu, n), n), n)
               + u * _pad(_mul(zphi3, _mul(_mul(bu, bu, n), bv, n), n), n)
               + 2.0 * _pad(_mul(gc, C, n), n)
               + 2.0 * _pad(_mul(zphi2, _mul(bu, bv, n), n), n)
               + v * _pad(_mul(gc, bv, n), n)
               + _pad(du, n))
        den = _pad(-v * gc, n)
        den[0] += 1.0
        return _mul(num, _inv(den, n), n)

    Exy = e_at(x, y, bx, by, dx)
    Eyx = e_at(y, x, by, bx, dy)

    x2, y2 = x * x, y * y
    terms = [
        _mul(zphi2, _mul(dx, dy, n), n),
        2.0 * y2 * _mul(zphi2, _mul(Exy, by, n), n),
        y2 * _mul(zphi3, _mul(dx, _mul(by, by, n), n), n),
        2.0 * y * _mul(gc, Exy, n),
        2.0 * y * _mul(zphi2, _mul(dx, by, n), n),
        2.0 * x2 * _mul(zphi2, _mul(Eyx, bx, n), n),
        x2 * _mul(zphi3, _mul(_mul(bx, bx, n), dy, n), n),
        4.0 * _mul(zphi3, _mul(C, _mul(bx, by, n), n), n),
        2.0 * _mul(zphi2, _mul(C, C, n), n),
        _mul(zphi4, _mul(_mul(bx, bx, n), _mul(by, by, n), n), n),
        4.0 * x * _mul(zphi2, _mul(C, bx, n), n),
        2.0 * x * _mul(zphi3, _mul(_mul(bx, bx, n), by, n), n),
        2.0 * x * _mul(gc, Eyx, n),
        2.0 * x * _mul(zphi2, _mul(dy, bx, n), n),
        4.0 * y * _mul(zphi2, _mul(C, by, n), n),
        2.0 * y * _mul(zphi3, _mul(bx, _mul(by, by, n), n), n),
        4.0 * _mul(gc, C, n),
        4.0 * _mul(zphi2, _mul(bx, by, n), n),
    ]
    f_num = _pad(dx, n) + _pad(dy, n) - ac
    for t in terms:
        f_num += _pad(t, n)
    F = _mul(hc, f_num, n)
    return TruncatedSeries(C), TruncatedSeries(Exy), TruncatedSeries(F)


def fourier_second_moments(p, n: int, theta: float) -> tuple[float, float]:
    """(E|L-hat_n(theta)|^2, E|Lambda-hat_n(theta)|^2) for the lattice
    Fourier transforms of the profiles of the size-n conditioned tree."""
    x = complex(math.cos(theta), math.sin(theta))
    C, _, F = series_CEF_at(p, x, n)
    a = gw_size_coeffs(p, n)
    if a[n] <= 0:
        raise WeightError(f"size {n} unreachable for this offspring law")
    return float(C.coeffs[n].real) / a[n], float(F.coeffs[n].real) / a[n]


# --- unrooted generating-function identities ---------------------------------

def _psi_compose(w: WeightSequence, s: np.ndarray, n: int) -> np.ndarray:
    """Psi(S) where Psi(z) = sum_{k>=1} w_k z^k / k! (w_0 is excluded)."""
    if w.family == "factorial":
        # sum_{k>=1} z^k = z / (1 - z), times scale
        den = -_pad(s, n)
        den[0] += 1.0
        return w.scale * _mul(_pad(s, n), _inv(den, n), n)
    coeffs = np.asarray(w.coeffs, dtype=float) * w.scale
    egf = np.array([coeffs[k] / math.factorial(k) if k >= 1 else 0.0
                    for k in range(len(coeffs))])
    out = np.zeros(n + 1)
    if len(egf) == 0:
        return out
    sp = _pad(s, n)
    out[0] = egf[-1]
    for c in egf[-2::-1]:
        out = _pad(_mul(out, sp, n), n)
        out[0] += c
    return out


def unrooted_gf_check(w: WeightSequence, order: int) -> float:
    """Max relative coefficient residual of B' = Psi(A) and 2zB' - 2B = A^2.

    B collects total labelled-tree weights b_m/m!; coefficients for
    m <= 7 come from exhaustive enumeration (so the first identity is a
    genuine check there), the rest by integrating Psi(A).  The second
    identity is then checked on the full range.  The order-1 coefficient
    follows the w_0 = 0 bookkeeping convention of the unrooted weights.
    """
    from .oracle import labelled_total_weights  # local import, no cycle

    phi, _ = unrooted_to_rooted(w)
    A = _solve_fixed_point(_fam_of(phi), order)
    psiA = _psi_compose(w, A, order)

    beta = np.zeros(order + 1)
    n_oracle = min(7, order)
    b = labelled_total_weights(w, n_oracle)
    for m in range(2, n_oracle + 1):
        beta[m] = b[m] / math.factorial(m)
    for m in range(n_oracle + 1, order + 1):
        beta[m] = psiA[m - 1] / m

    res = 0.0
    for m in range(0, order):               # (m+1) beta_{m+1} = [z^m] Psi(A)
        lhs = (m + 1) * beta[m + 1]
        res = max(res, abs(lhs - psiA[m]) / max(1.0, abs(psiA[m])))
    A2 = _mul(A, A, order)
    for m in range(1, order + 1):           # 2 (m-1) beta_m = [z^m] A^2
        lhs = 2.0 * (m - 1) * beta[m]
        res = max(res, abs(lhs - A2[m]) / max(1.0, abs(A2[m])))
    return res

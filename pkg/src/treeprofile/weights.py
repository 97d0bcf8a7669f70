"""Weight sequences, offspring distributions, and the tilting algebra.

A rooted weight sequence ``(phi_k)`` assigns multiplicative weight
``prod_v phi_{outdeg(v)}`` to an ordered rooted tree; an unrooted weight
sequence ``(w_k)`` assigns ``prod_v w_{deg(v)}`` to a labelled tree.
Two sequences related by ``phi'_k = a * b**k * phi_k`` (a "tilt") induce
the same conditioned random tree, which lets us normalise arbitrary
weights to a critical (mean-one) offspring probability distribution.

Weight sequences are represented either by a finite coefficient table or
by a named analytic family with closed-form generating function, so that
moments and criticalisation avoid truncation error.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable

import numpy as np

__all__ = [
    "WeightSequence",
    "OffspringDistribution",
    "UnrootedModel",
    "WeightError",
    "mean_variance",
    "tilt",
    "criticalize",
    "unrooted_to_rooted",
    "unrooted_model",
    "root_degree_limit",
    "geometric_weights",
    "poisson_weights",
    "binary_weights",
    "table_weights",
    "factorial_unrooted_weights",
    "weights_from_json",
    "weights_to_json",
]

# Probability/consistency tolerances used by the validation invariants.
_SUM_TOL = 1e-12
_MEAN_TOL = 1e-12
_VAR_TOL = 1e-10
_TABLE_TAIL = 1e-16

_ROOTED_FAMILIES = ("geometric", "poisson", "binary", "linear_geometric",
                    "shifted_geometric", "table")
_UNROOTED_FAMILIES = ("table", "factorial")


class WeightError(ValueError):
    """Invalid weight sequence or infeasible request."""


def _as_tuple(params: dict | None) -> tuple:
    if not params:
        return ()
    return tuple(sorted(params.items()))


@dataclass(frozen=True)
class WeightSequence:
    """Nonnegative weights ``scale * base_k(params)``, rooted or unrooted.

    ``kind`` is ``"rooted_phi"`` (weights indexed by outdegree) or
    ``"unrooted_w"`` (weights indexed by degree).  A body sequence must
    satisfy phi_0 > 0 and phi_k > 0 for some k >= 2 (rooted), or w_1 > 0
    and w_k > 0 for some k >= 3 (unrooted); a sequence with
    ``role="root"`` only modifies the root and merely needs some positive
    coefficient.

    Families and their unit-scale base coefficients:

    - ``geometric``:          q**k
    - ``poisson``:            lam**k / k!
    - ``binary``:             C(2,k) q**k (1-q)**(2-k)
    - ``linear_geometric``:   (k+1) beta**k
    - ``shifted_geometric``:  r**(k-1) for k >= 1, else 0
    - ``table``:              coeffs[k] (finite support)
    - ``factorial``:          k! for k >= 1 and w_0 = 0 (unrooted only;
                               w_0 matters only for the trivial tree n = 1)
    """

    kind: str
    family: str
    params: tuple = ()
    scale: float = 1.0
    coeffs: tuple = ()
    truncation: int | None = None
    role: str = "body"

    def __post_init__(self):
        if self.kind not in ("rooted_phi", "unrooted_w"):
            raise WeightError(f"unknown kind {self.kind!r}")
        if self.role not in ("body", "root"):
            raise WeightError(f"unknown role {self.role!r}")
        allowed = _ROOTED_FAMILIES if self.kind == "rooted_phi" else _UNROOTED_FAMILIES
        if self.family not in allowed:
            raise WeightError(f"family {self.family!r} not valid for {self.kind}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise WeightError("scale must be positive and finite")
        p = self.param_dict
        if self.family == "geometric" and not (p["q"] > 0):
            raise WeightError("geometric family needs q > 0")
        if self.family == "poisson" and not (p["lam"] > 0):
            raise WeightError("poisson family needs lam > 0")
        if self.family == "binary" and not (0 < p["q"] < 1):
            raise WeightError("binary family needs 0 < q < 1")
        if self.family == "linear_geometric" and not (p["beta"] > 0):
            raise WeightError("linear_geometric family needs beta > 0")
        if self.family == "shifted_geometric" and not (p["r"] > 0):
            raise WeightError("shifted_geometric family needs r > 0")
        if self.family == "table":
            c = np.asarray(self.coeffs, dtype=float)
            if c.ndim != 1 or c.size == 0:
                raise WeightError("table family needs a 1-d coefficient list")
            if np.any(c < 0) or not np.all(np.isfinite(c)):
                raise WeightError("table coefficients must be nonnegative and finite")
        self._check_support()

    def _check_support(self):
        cap = self.support_cap()
        if self.role == "root":
            if not any(self.coefficient(k) > 0 for k in range(cap)):
                raise WeightError("root weights must have a positive coefficient")
            return
        if self.kind == "rooted_phi":
            if not self.coefficient(0) > 0:
                raise WeightError("rooted weights need phi_0 > 0")
            if not any(self.coefficient(k) > 0 for k in range(2, cap)):
                raise WeightError("rooted weights need phi_k > 0 for some k >= 2")
        else:
            if not self.coefficient(1) > 0:
                raise WeightError("unrooted weights need w_1 > 0")
            if not any(self.coefficient(k) > 0 for k in range(3, cap)):
                raise WeightError("unrooted weights need w_k > 0 for some k >= 3")

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    def support_cap(self) -> int:
        """Exclusive upper bound for support scans (tight for finite families)."""
        if self.family == "table":
            return max(len(self.coeffs), 4)
        if self.family == "binary":
            return 4
        return 64  # infinite-support families: enough for positivity scans

    def coefficient(self, k: int) -> float:
        """Weight at index k, including the scale factor."""
        if k < 0:
            return 0.0
        p = self.param_dict
        if self.family == "geometric":
            return self.scale * p["q"] ** k
        if self.family == "poisson":
            return self.scale * p["lam"] ** k / math.factorial(k)
        if self.family == "binary":
            q = p["q"]
            return self.scale * (math.comb(2, k) * q**k * (1 - q) ** (2 - k) if k <= 2 else 0.0)
        if self.family == "linear_geometric":
            return self.scale * (k + 1) * p["beta"] ** k
        if self.family == "shifted_geometric":
            return self.scale * p["r"] ** (k - 1) if k >= 1 else 0.0
        if self.family == "factorial":
            return self.scale * float(math.factorial(k)) if k >= 1 else 0.0
        return self.scale * self.coeffs[k] if k < len(self.coeffs) else 0.0

    def coefficients(self, upto: int) -> np.ndarray:
        """Array of weights for k = 0..upto-1."""
        return np.array([self.coefficient(k) for k in range(upto)], dtype=float)

    @property
    def radius(self) -> float:
        """Radius of convergence of the ordinary generating function."""
        p = self.param_dict
        if self.family == "geometric":
            return 1.0 / p["q"]
        if self.family == "linear_geometric":
            return 1.0 / p["beta"]
        if self.family == "shifted_geometric":
            return 1.0 / p["r"]
        if self.family == "factorial":
            return 0.0
        return math.inf  # poisson, binary, table

    def gf(self, b: float) -> float:
        """Generating function Sum_k coeff(k) b**k at real 0 <= b < radius."""
        p = self.param_dict
        if self.family == "geometric":
            return self.scale / (1.0 - p["q"] * b)
        if self.family == "poisson":
            return self.scale * math.exp(p["lam"] * b)
        if self.family == "binary":
            q = p["q"]
            return self.scale * (1 - q + q * b) ** 2
        if self.family == "linear_geometric":
            return self.scale / (1.0 - p["beta"] * b) ** 2
        if self.family == "shifted_geometric":
            return self.scale * b / (1.0 - p["r"] * b)
        if self.family == "table":
            c = np.asarray(self.coeffs, dtype=float)
            return self.scale * float(np.polyval(c[::-1], b))
        raise WeightError(f"no closed-form gf for family {self.family}")

    def gf_mean(self, b: float) -> float:
        """Mean of the b-tilted normalised sequence: b Phi'(b) / Phi(b)."""
        p = self.param_dict
        if self.family == "geometric":
            return p["q"] * b / (1.0 - p["q"] * b)
        if self.family == "poisson":
            return p["lam"] * b
        if self.family == "binary":
            q = p["q"]
            return 2 * q * b / (1 - q + q * b)
        if self.family == "linear_geometric":
            return 2 * p["beta"] * b / (1.0 - p["beta"] * b)
        if self.family == "shifted_geometric":
            return 1.0 / (1.0 - p["r"] * b)
        if self.family == "table":
            c = np.asarray(self.coeffs, dtype=float)
            k = np.arange(len(c), dtype=float)
            num = float(np.polyval((k * c)[::-1], b))
            den = float(np.polyval(c[::-1], b))
            if den == 0.0:
                raise WeightError("zero generating function")
            return num / den
        raise WeightError(f"no closed-form mean for family {self.family}")


def tilt(ws: WeightSequence, a: float, b: float) -> WeightSequence:
    """Equivalent sequence (a * b**k * w_k); the conditioned tree law is unchanged."""
    if not (a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b)):
        raise WeightError("tilt parameters must be positive and finite")
    p = ws.param_dict
    if ws.family == "geometric":
        return WeightSequence(ws.kind, "geometric", _as_tuple({"q": p["q"] * b}),
                              ws.scale * a, role=ws.role)
    if ws.family == "poisson":
        return WeightSequence(ws.kind, "poisson", _as_tuple({"lam": p["lam"] * b}),
                              ws.scale * a, role=ws.role)
    if ws.family == "binary":
        # C(2,k) (qb)^k (1-q)^{2-k} = (1-q+qb)^2 * C(2,k) q'^k (1-q')^{2-k}
        q = p["q"]
        qb = q * b / (1 - q + q * b)
        return WeightSequence(ws.kind, "binary", _as_tuple({"q": qb}),
                              ws.scale * a * (1 - q + q * b) ** 2, role=ws.role)
    if ws.family == "linear_geometric":
        return WeightSequence(ws.kind, "linear_geometric",
                              _as_tuple({"beta": p["beta"] * b}), ws.scale * a,
                              role=ws.role)
    if ws.family == "shifted_geometric":
        return WeightSequence(ws.kind, "shifted_geometric",
                              _as_tuple({"r": p["r"] * b}), ws.scale * a * b,
                              role=ws.role)
    if ws.family == "table":
        c = np.asarray(ws.coeffs, dtype=float)
        tilted = a * c * b ** np.arange(len(c))
        return WeightSequence(ws.kind, "table", (), ws.scale, tuple(tilted),
                              ws.truncation, role=ws.role)
    raise WeightError(f"cannot tilt family {ws.family}")


# --- public constructors ---------------------------------------------------

def geometric_weights(q: float = 0.5, kind: str = "rooted_phi") -> WeightSequence:
    """Probability weights p_k = (1-q) q**k."""
    return WeightSequence(kind, "geometric", _as_tuple({"q": q}), 1.0 - q)


def poisson_weights(lam: float = 1.0, kind: str = "rooted_phi") -> WeightSequence:
    """Probability weights p_k = exp(-lam) lam**k / k!."""
    return WeightSequence(kind, "poisson", _as_tuple({"lam": lam}), math.exp(-lam))


def binary_weights(q: float = 0.5, kind: str = "rooted_phi") -> WeightSequence:
    """Binomial(2, q) probability weights."""
    return WeightSequence(kind, "binary", _as_tuple({"q": q}))


def table_weights(coeffs: Iterable[float], kind: str = "rooted_phi",
                  role: str = "body") -> WeightSequence:
    c = tuple(float(x) for x in coeffs)
    return WeightSequence(kind, "table", (), 1.0, c, len(c) - 1, role)


def factorial_unrooted_weights() -> WeightSequence:
    """Unrooted weights w_k = k!: uniformly random non-crossing trees."""
    return WeightSequence("unrooted_w", "factorial")


# --- offspring distributions ----------------------------------------------

@dataclass(frozen=True)
class OffspringDistribution:
    """Probability sequence on {0,1,2,...} with cached mean/variance/span.

    ``family`` mirrors the weight families (``binomial2`` for "binary",
    ``neg_binomial2`` with pmf (k+1)(1-r)^2 r^k for "linear_geometric").
    For infinite-support families ``table_view(n)`` gives exact pmf values,
    so no truncation decision is baked in at construction.
    """

    family: str
    params: tuple = ()
    table: tuple = ()
    mu: float = field(default=0.0, compare=False)
    sigma2: float = field(default=0.0, compare=False)
    span: int = field(default=1, compare=False)

    def __post_init__(self):
        s = self.pmf_sum()
        if abs(s - 1.0) > _SUM_TOL:
            raise WeightError(f"probabilities sum to {s}, not 1")
        mu, var = self._exact_moments()
        if abs(mu - self.mu) > _MEAN_TOL or abs(var - self.sigma2) > _VAR_TOL:
            raise WeightError("stored moments disagree with the distribution")

    # -- construction --

    @staticmethod
    def geometric(q: float) -> "OffspringDistribution":
        if not 0 < q < 1:
            raise WeightError("geometric offspring needs 0 < q < 1")
        mu = q / (1 - q)
        return OffspringDistribution("geometric", _as_tuple({"q": q}),
                                     mu=mu, sigma2=q / (1 - q) ** 2, span=1)

    @staticmethod
    def poisson(lam: float) -> "OffspringDistribution":
        return OffspringDistribution("poisson", _as_tuple({"lam": lam}),
                                     mu=lam, sigma2=lam, span=1)

    @staticmethod
    def binomial2(q: float) -> "OffspringDistribution":
        if not 0 < q < 1:
            raise WeightError("binomial2 offspring needs 0 < q < 1")
        return OffspringDistribution("binomial2", _as_tuple({"q": q}),
                                     mu=2 * q, sigma2=2 * q * (1 - q), span=1)

    @staticmethod
    def neg_binomial2(r: float) -> "OffspringDistribution":
        if not 0 < r < 1:
            raise WeightError("neg_binomial2 offspring needs 0 < r < 1")
        return OffspringDistribution("neg_binomial2", _as_tuple({"r": r}),
                                     mu=2 * r / (1 - r), sigma2=2 * r / (1 - r) ** 2, span=1)

    @staticmethod
    def shifted_geometric(r: float) -> "OffspringDistribution":
        """pmf (1-r) r**(k-1) on k >= 1 (a root-degree law, never a body law)."""
        if not 0 < r < 1:
            raise WeightError("shifted_geometric offspring needs 0 < r < 1")
        return OffspringDistribution("shifted_geometric", _as_tuple({"r": r}),
                                     mu=1 / (1 - r), sigma2=r / (1 - r) ** 2, span=1)

    @staticmethod
    def from_table(p: Iterable[float]) -> "OffspringDistribution":
        arr = np.asarray(list(p), dtype=float)
        if np.any(arr < 0):
            raise WeightError("negative probabilities")
        k = np.arange(len(arr), dtype=float)
        mu = float(k @ arr)
        var = float((k * k) @ arr - mu * mu)
        pos = [int(i) for i in np.nonzero(arr[1:])[0] + 1]
        span = 0
        for i in pos:
            span = gcd(span, i)
        if span == 0:
            raise WeightError("offspring law with no positive support above 0")
        return OffspringDistribution("table", (), tuple(float(x) for x in arr),
                                     mu=mu, sigma2=var, span=span)

    # -- pmf access --

    def pmf(self, k: int) -> float:
        if k < 0:
            return 0.0
        p = dict(self.params)
        if self.family == "geometric":
            q = p["q"]
            return (1 - q) * q**k
        if self.family == "poisson":
            lam = p["lam"]
            return math.exp(-lam) * lam**k / math.factorial(k)
        if self.family == "binomial2":
            q = p["q"]
            return math.comb(2, k) * q**k * (1 - q) ** (2 - k) if k <= 2 else 0.0
        if self.family == "neg_binomial2":
            r = p["r"]
            return (k + 1) * (1 - r) ** 2 * r**k
        if self.family == "shifted_geometric":
            r = p["r"]
            return (1 - r) * r ** (k - 1) if k >= 1 else 0.0
        return self.table[k] if k < len(self.table) else 0.0

    def table_view(self, length: int) -> np.ndarray:
        """Exact pmf values for k = 0..length-1 (zero-padded for tables)."""
        p = dict(self.params)
        k = np.arange(length, dtype=float)
        if self.family == "geometric":
            q = p["q"]
            return (1 - q) * q**k
        if self.family == "poisson":
            lam = p["lam"]
            out = np.empty(length)
            out[0] = math.exp(-lam)
            for i in range(1, length):
                out[i] = out[i - 1] * lam / i
            return out
        if self.family == "binomial2":
            out = np.zeros(length)
            for i in range(min(3, length)):
                out[i] = self.pmf(i)
            return out
        if self.family == "neg_binomial2":
            r = p["r"]
            return (k + 1) * (1 - r) ** 2 * r**k
        if self.family == "shifted_geometric":
            r = p["r"]
            out = (1 - r) * r ** np.maximum(k - 1, 0)
            out[0] = 0.0
            return out
        out = np.zeros(length)
        m = min(length, len(self.table))
        out[:m] = self.table[:m]
        return out

    def adaptive_length(self, tail: float = _TABLE_TAIL) -> int:
        """Length L such that sum_{k >= L} pmf(k) <= tail."""
        if self.family in ("binomial2", "table"):
            return max(3, len(self.table))
        n, acc = 1, self.pmf(0)
        while 1.0 - acc > tail and n < 10_000:
            acc += self.pmf(n)
            n += 1
        return n

    def pmf_sum(self) -> float:
        if self.family == "table":
            return float(np.sum(self.table))
        return 1.0  # analytic families are normalised by construction

    def _exact_moments(self) -> tuple[float, float]:
        if self.family == "table":
            arr = np.asarray(self.table)
            k = np.arange(len(arr), dtype=float)
            mu = float(k @ arr)
            return mu, float((k * k) @ arr - mu * mu)
        # closed forms exist, but a long partial sum is an independent check
        L = self.adaptive_length(1e-18) + 64
        arr = self.table_view(L)
        k = np.arange(L, dtype=float)
        mu = float(k @ arr)
        return mu, float((k * k) @ arr - mu * mu)

    @property
    def key(self) -> tuple:
        return (self.family, self.params, self.table)


def mean_variance(ws) -> tuple[float, float]:
    """(mean, variance) of a probability sequence, or of normalised weights.

    For a non-probability WeightSequence the weights are normalised by
    their total mass first; divergent mass or second moment raises
    ``WeightError("moment diverges")``.
    """
    if isinstance(ws, OffspringDistribution):
        return ws.mu, ws.sigma2
    p = ws.param_dict
    if ws.family == "geometric":
        q = p["q"]
        if q >= 1:
            raise WeightError("moment diverges")
        return q / (1 - q), q / (1 - q) ** 2
    if ws.family == "poisson":
        return p["lam"], p["lam"]
    if ws.family == "binary":
        q = p["q"]
        return 2 * q, 2 * q * (1 - q)
    if ws.family == "linear_geometric":
        beta = p["beta"]
        if beta >= 1:
            raise WeightError("moment diverges")
        return 2 * beta / (1 - beta), 2 * beta / (1 - beta) ** 2
    if ws.family == "shifted_geometric":
        r = p["r"]
        if r >= 1:
            raise WeightError("moment diverges")
        return 1 / (1 - r), r / (1 - r) ** 2
    if ws.family == "factorial":
        raise WeightError("moment diverges")
    c = np.asarray(ws.coeffs, dtype=float)
    total = float(c.sum())
    if total <= 0:
        raise WeightError("zero total weight")
    k = np.arange(len(c), dtype=float)
    mu = float(k @ c) / total
    return mu, float((k * k) @ c) / total - mu * mu


def criticalize(ws: WeightSequence,
                tol: float = 1e-12,
                max_iter: int = 200) -> tuple[OffspringDistribution, float, float]:
    """Tilt a rooted weight sequence to a critical (mean-one) probability law.

    Bisects on b over (0, radius): the tilted mean b Phi'(b)/Phi(b) is
    nondecreasing in b, so the mean-one root is found robustly.  Returns
    (p, a, b) with p_k = a * b**k * phi_k and mu(p) = 1 within 1e-10.
    """
    if ws.kind != "rooted_phi":
        raise WeightError("criticalize needs a rooted weight sequence")
    if ws.role != "body":
        raise WeightError("criticalize needs a body weight sequence")
    if ws.radius == 0.0:
        raise WeightError("radius zero")

    lo = 0.0
    if math.isfinite(ws.radius):
        hi = ws.radius * (1 - 1e-13)
        if ws.gf_mean(hi) < 1.0:
            raise WeightError("no critical tilt in radius of convergence")
    else:
        hi = 1.0
        while ws.gf_mean(hi) < 1.0:
            hi *= 2.0
            if hi > 1e12:
                raise WeightError("no critical tilt in radius of convergence")
    b = 0.5 * (lo + hi)
    for _ in range(max_iter):
        b = 0.5 * (lo + hi)
        m = ws.gf_mean(b)
        if abs(m - 1.0) <= tol:
            break
        if m < 1.0:
            lo = b
        else:
            hi = b
    a = 1.0 / ws.gf(b)

    p = ws.param_dict
    if ws.family == "geometric":
        dist = OffspringDistribution.geometric(p["q"] * b)
    elif ws.family == "poisson":
        dist = OffspringDistribution.poisson(p["lam"] * b)
    elif ws.family == "binary":
        q = p["q"]
        dist = OffspringDistribution.binomial2(q * b / (1 - q + q * b))
    elif ws.family == "linear_geometric":
        dist = OffspringDistribution.neg_binomial2(p["beta"] * b)
    elif ws.family == "shifted_geometric":
        dist = OffspringDistribution.shifted_geometric(p["r"] * b)
    else:
        c = np.asarray(ws.coeffs, dtype=float)
        tab = a * ws.scale * c * b ** np.arange(len(c))
        dist = OffspringDistribution.from_table(tab / tab.sum())
    return dist, a, b


def unrooted_to_rooted(ws: WeightSequence) -> tuple[WeightSequence, WeightSequence]:
    """Vertex-marking reduction: phi_k = w_{k+1}/k!, phi0_k = w_k/k!."""
    if ws.kind != "unrooted_w":
        raise WeightError("unrooted_to_rooted needs an unrooted weight sequence")
    if ws.family == "factorial":
        # w_{k+1}/k! = k+1, and w_k/k! = 1 for k >= 1 (w_0 = 0)
        phi = WeightSequence("rooted_phi", "linear_geometric",
                             _as_tuple({"beta": 1.0}), ws.scale)
        phi0 = WeightSequence("rooted_phi", "shifted_geometric",
                              _as_tuple({"r": 1.0}), ws.scale, role="root")
        return phi, phi0
    w = np.asarray(ws.coeffs, dtype=float) * ws.scale
    kmax = len(w) - 1
    fact = np.array([math.factorial(k) for k in range(kmax + 1)], dtype=float)
    phi = np.array([w[k + 1] / fact[k] for k in range(kmax)], dtype=float)
    phi0 = w / fact
    return (table_weights(phi, "rooted_phi"),
            table_weights(phi0, "rooted_phi", role="root"))


def root_degree_limit(p0: OffspringDistribution, length: int | None = None) -> np.ndarray:
    """Size-biased root-degree law k p0_k / mu(p0) (index 0 is always 0)."""
    if p0.mu <= 0 or not math.isfinite(p0.mu):
        raise WeightError("root law needs 0 < mean < infinity")
    L = length if length is not None else p0.adaptive_length(1e-15) + 8
    tab = p0.table_view(L)
    k = np.arange(L, dtype=float)
    return k * tab / p0.mu


@dataclass(frozen=True)
class UnrootedModel:
    """Critical rooted view of an unrooted weight sequence.

    ``p`` is the criticalised body law; ``p0`` is the root law tilted with
    the *same* b, so the vertex-marked tree is the modified conditioned
    tree with offspring pair (p, p0).
    """

    w: WeightSequence
    p: OffspringDistribution
    p0: OffspringDistribution
    a: float
    b: float
    sigma: float

    @property
    def key(self) -> tuple:
        return (self.w.family, self.w.params, self.w.coeffs, self.w.scale)


def unrooted_model(w: WeightSequence) -> UnrootedModel:
    """Criticalise the vertex-marking pair (phi, phi0) of an unrooted sequence."""
    phi, phi0 = unrooted_to_rooted(w)
    p, a, b = criticalize(phi)
    if phi0.family == "geometric":
        p0 = OffspringDistribution.geometric(phi0.param_dict["q"] * b)
    elif phi0.family == "shifted_geometric":
        p0 = OffspringDistribution.shifted_geometric(phi0.param_dict["r"] * b)
    else:
        c = np.asarray(phi0.coeffs, dtype=float) * phi0.scale
        tilted = c * b ** np.arange(len(c))
        total = tilted.sum()
        if total <= 0:
            raise WeightError("root weights vanish after tilt")
        p0 = OffspringDistribution.from_table(tilted / total)
    return UnrootedModel(w, p, p0, a, b, math.sqrt(p.sigma2))


# --- JSON weight specification ---------------------------------------------

def weights_from_json(obj) -> WeightSequence:
    """Parse {"kind": ..., "params": {...}, "coeffs": [...]} (exact field names)."""
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    if not isinstance(obj, dict):
        raise WeightError("weight spec must be a JSON object")
    unknown = set(obj) - {"kind", "params", "coeffs"}
    if unknown:
        raise WeightError(f"unknown weight-spec fields: {sorted(unknown)}")
    kind = obj.get("kind")
    params = obj.get("params") or {}
    coeffs = obj.get("coeffs") or []
    if kind == "geometric":
        return geometric_weights(float(params.get("q", 0.5)))
    if kind == "poisson":
        return poisson_weights(float(params.get("lam", 1.0)))
    if kind == "binary":
        return binary_weights(float(params.get("q", 0.5)))
    if kind == "table":
        unrooted = bool(params.get("unrooted", False))
        return table_weights(coeffs, "unrooted_w" if unrooted else "rooted_phi")
    if kind == "factorial_unrooted":
        return factorial_unrooted_weights()
    raise WeightError(f"unknown weight kind {kind!r}")


def weights_to_json(ws: WeightSequence) -> dict:
    """Inverse of :func:`weights_from_json` for the public families."""
    p = ws.param_dict
    if ws.family == "geometric":
        return {"kind": "geometric", "params": {"q": p["q"]}, "coeffs": []}
    if ws.family == "poisson":
        return {"kind": "poisson", "params": {"lam": p["lam"]}, "coeffs": []}
    if ws.family == "binary":
        return {"kind": "binary", "params": {"q": p["q"]}, "coeffs": []}
    if ws.family == "factorial":
        return {"kind": "factorial_unrooted", "params": {}, "coeffs": []}
    if ws.family == "table":
        params = {"unrooted": True} if ws.kind == "unrooted_w" else {}
        return {"kind": "table", "params": params,
                "coeffs": [float(c) * ws.scale for c in ws.coeffs]}
    raise WeightError(f"family {ws.family} has no JSON form")

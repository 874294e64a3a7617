"""Correlation of two per-pair similarity series with honest p-values.

Pair series violate the independence assumed by the textbook t-test
(every site takes part in n-1 pairs), so two p-values are always
computed side by side:

* ``p_t``: the naive parametric value from t = r*sqrt((n-2)/(1-r^2))
  with n-2 degrees of freedom, evaluated through the regularized
  incomplete beta function. Comparable to conventionally reported
  values, labeled naive in reports.
* ``p_perm``: a Mantel-style permutation value. Site labels of the
  second series' underlying similarity matrix are permuted B times and
  r recomputed; p = (1 + #{|r_b| >= |r_obs|}) / (B + 1). Permutations
  come from the seeded generator in ``rng``, so the value is a pure
  function of (inputs, B, seed) regardless of execution order.

The permutation loop exploits that relabeling sites permutes the
condensed values without changing their multiset: the permuted series'
mean and norm equal the originals, so each replicate costs one gather
and one dot product.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

from .errors import DegenerateSeriesError
from .manifest import Manifest
from .rng import permutation
from .similarity import PairIndex, PairVector

#: Smallest positive binary64; stands in for an unrepresentably small p.
MIN_POSITIVE_P = 5e-324


@dataclass(frozen=True)
class CorrelationResult:
    comparison_id: str
    scope: str
    r: float
    p_t: float
    p_perm: float
    n_sites: int
    n_pairs: int
    permutations: int
    seed: int


def _centered(values: np.ndarray, name: str) -> tuple[np.ndarray, float]:
    centered = values - values.mean()
    norm = float(np.sqrt(centered @ centered))
    if norm == 0.0:
        raise DegenerateSeriesError(f"{name} series is constant")
    return centered, norm


def pearson_r_values(x, y) -> float:
    """Sample Pearson correlation of two equal-length series."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 3:
        raise ValueError(f"need at least 3 observations, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("series must be finite")
    xc, x_norm = _centered(x, "x")
    yc, y_norm = _centered(y, "y")
    r = float(xc @ yc) / (x_norm * y_norm)
    return min(1.0, max(-1.0, r))


def _check_same_index(x: PairVector, y: PairVector) -> None:
    if x.index != y.index:
        raise ValueError("pair vectors are indexed over different site pairs")


def pearson_r(x: PairVector, y: PairVector) -> float:
    """Pearson r of two pair series sharing one canonical index."""
    _check_same_index(x, y)
    return pearson_r_values(x.values, y.values)


def p_value_t(r: float, n_pairs: int) -> float:
    """Two-sided parametric p for a correlation of n_pairs observations.

    Uses the identity p = I_x(df/2, 1/2) with x = df/(df + t^2) and
    df = n_pairs - 2; monotone decreasing in |r|, and exactly 1 at r=0.
    |r| = 1 has no finite t, so the smallest positive binary64 is
    returned with a warning.
    """
    r = float(r)
    if not np.isfinite(r) or abs(r) > 1.0:
        raise ValueError(f"r must lie in [-1, 1], got {r}")
    n_pairs = int(n_pairs)
    if n_pairs < 3:
        raise ValueError(f"need at least 3 pairs, got {n_pairs}")
    df = n_pairs - 2
    if abs(r) == 1.0:
        warnings.warn(
            "perfect correlation: p-value below the smallest representable "
            "positive value",
            stacklevel=2,
        )
        return MIN_POSITIVE_P
    t_squared = r * r * df / (1.0 - r * r)
    return float(betainc(df / 2.0, 0.5, df / (df + t_squared)))


def _square_from_condensed(values: np.ndarray, n: int) -> np.ndarray:
    square = np.zeros((n, n), dtype=np.float64)
    iu, ju = np.triu_indices(n, k=1)
    square[iu, ju] = values
    square[ju, iu] = values
    return square


def mantel_permutation_test(
    x: PairVector, y: PairVector, permutations: int = 9999, seed: int = 42
) -> float:
    """Permutation p-value for the correlation of two pair series.

    Relabels the sites of y's similarity matrix ``permutations``
    times; replicate b's permutation is a pure function of (seed, b), so
    replicates may be evaluated in any order or in parallel without
    changing the result. p is never 0: its floor is 1/(B+1).
    """
    _check_same_index(x, y)
    if permutations < 99:
        raise ValueError(
            f"need at least 99 permutations, got {permutations}"
        )
    n = x.index.n_sites
    if x.index.n_pairs != n * (n - 1) // 2:
        raise ValueError("pair vector does not cover a full site-pair matrix")
    if n < 3:
        raise ValueError(f"need at least 3 sites, got {n}")

    xc, x_norm = _centered(x.values, "x")
    _, y_norm = _centered(y.values, "y")
    denom = x_norm * y_norm
    r_obs = abs(float(xc @ y.values) / denom)

    y_square = _square_from_condensed(y.values, n)
    iu, ju = np.triu_indices(n, k=1)
    # xc sums to zero, so dot(xc, y_perm) needs no centering of y_perm,
    # and relabeling preserves the multiset of condensed values, hence
    # y's mean and norm.
    exceed = 0
    for b in range(1, permutations + 1):
        perm = permutation(n, seed, b)
        y_perm = y_square[perm[iu], perm[ju]]
        r_b = abs(float(xc @ y_perm) / denom)
        if r_b >= r_obs:
            exceed += 1
    return (1 + exceed) / (permutations + 1)


def correlate(
    x: PairVector,
    y: PairVector,
    comparison_id: str,
    scope: str = "ALL",
    permutations: int = 9999,
    seed: int = 42,
) -> CorrelationResult:
    """Full correlation record for one comparison in one scope."""
    r = pearson_r(x, y)
    return CorrelationResult(
        comparison_id=comparison_id,
        scope=scope,
        r=r,
        p_t=p_value_t(r, x.index.n_pairs),
        p_perm=mantel_permutation_test(x, y, permutations, seed),
        n_sites=x.index.n_sites,
        n_pairs=x.index.n_pairs,
        permutations=permutations,
        seed=seed,
    )


def stratify_by_city(pairs: PairVector, manifest: Manifest) -> dict[str, PairVector]:
    """Split a pair series into per-city strata.

    A city's stratum holds exactly the pairs whose two sites share that
    city; cross-city pairs belong to no stratum (they remain in the
    undivided series). Strata keep the canonical ordering, being
    subsequences of it. Cities are keyed in manifest order.
    """
    city_of = {}
    for site in manifest.sites:
        city_of[site.site_id] = site.city
    unknown = sorted(set(pairs.index.sites) - set(city_of))
    if unknown:
        raise ValueError(f"sites {unknown} absent from the manifest")

    value_of = dict(zip(pairs.index.pairs, pairs.values))
    out: dict[str, PairVector] = {}
    for city in manifest.cities():
        city_sites = [s for s in pairs.index.sites if city_of[s] == city]
        if not city_sites:
            continue
        index = PairIndex.from_site_ids(city_sites)
        values = np.array(
            [value_of[p] for p in index.pairs], dtype=np.float64
        )
        out[city] = PairVector(
            index=index, values=values, comparison_id=pairs.comparison_id
        )
    return out

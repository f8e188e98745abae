"""
Statistical kernel

- pearson: product-moment r with a two-sided p-value from the t distribution,
  evaluated through the regularized incomplete beta function
- pairwise_state_correlations: all unordered state pairs of daily series
- manova_one_way: Wilks' lambda with Rao's F approximation
"""

from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.special import betainc
from statsmodels.multivariate.manova import MANOVA

from core.models import CorrelationResult, ManovaResult


def t_two_sided_p(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with df degrees of freedom."""
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def pearson(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """
    Pearson's r between two equal-length series.

    p-value is None when n < 3. Raises ValueError("constant series") on zero variance.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"series must be 1-D and of equal length, got {x.shape} and {y.shape}")
    n = x.size
    if n < 2:
        raise ValueError("pearson needs at least 2 observations")

    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("constant series")

    r = float(np.clip(np.dot(dx, dy) / np.sqrt(sxx * syy), -1.0, 1.0))
    if n < 3:
        return CorrelationResult(r=r, n=n, p_value=None)
    if abs(r) == 1.0:
        return CorrelationResult(r=r, n=n, p_value=0.0)

    df = n - 2
    t = r * np.sqrt(df / (1.0 - r * r))
    return CorrelationResult(r=r, n=n, p_value=t_two_sided_p(t, df))


def pairwise_state_correlations(daily: pd.DataFrame, r_threshold: float = 0.8,
                                p_threshold: float = 0.001) -> Tuple[float, pd.DataFrame, pd.DataFrame, List[str]]:
    """
    Correlate every unordered pair of state series (one column per state).

    Returns:
        (fraction of evaluated pairs with r > r_threshold and p < p_threshold,
         symmetric r matrix, per-pair table, notices)

    Pairs involving a constant series are excluded (NaN in the matrix) with a notice.
    """
    states = sorted(daily.columns)
    if len(states) < 2:
        raise ValueError("pairwise correlations need at least 2 states")

    matrix = pd.DataFrame(np.eye(len(states)), index=states, columns=states)
    rows, notices = [], []
    for a, b in combinations(states, 2):
        try:
            result = pearson(daily[a].to_numpy(), daily[b].to_numpy())
        except ValueError as e:
            matrix.loc[a, b] = matrix.loc[b, a] = np.nan
            notices.append(f"pair {a}-{b} excluded ({e})")
            continue
        qualifies = (result.r > r_threshold and result.p_value is not None
                     and result.p_value < p_threshold)
        matrix.loc[a, b] = matrix.loc[b, a] = result.r
        rows.append((a, b, result.r, result.p_value, result.n, qualifies))

    for state in states:
        if daily[state].nunique() <= 1:
            matrix.loc[state, state] = np.nan

    pairs = pd.DataFrame(rows, columns=["state_a", "state_b", "r", "p_value", "n", "qualifies"])
    fraction = float(pairs["qualifies"].mean()) if len(pairs) else 0.0
    matrix.index.name = "state"
    return fraction, matrix, pairs, notices


def correlate_against(table: pd.DataFrame, target: str, columns: Sequence[str]) -> pd.DataFrame:
    """variable, r, n, p_value of `target` against each column (constant columns skipped)."""
    rows = []
    for col in columns:
        try:
            result = pearson(table[target].to_numpy(), table[col].to_numpy())
        except ValueError:
            continue
        rows.append((col, result.r, result.n, result.p_value))
    return pd.DataFrame(rows, columns=["variable", "r", "n", "p_value"])


# ============================================================================
# MANOVA
# ============================================================================

def _scatter(groups: List[np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """Within (W) and total (T) scatter matrices."""
    stacked = np.vstack(groups)
    centered = stacked - stacked.mean(axis=0)
    total = centered.T @ centered
    within = sum((g - g.mean(axis=0)).T @ (g - g.mean(axis=0)) for g in groups)
    return within, total


def manova_one_way(groups: Sequence[Sequence[Sequence[float]]],
                   components: Optional[Sequence[int]] = None) -> ManovaResult:
    """
    One-way MANOVA over groups of k-dimensional observations.

    Args:
        groups: one array-like (n_g x k) per group
        components: observation columns to keep (None -> all)

    Raises:
        ValueError: fewer than 2 groups, k < 2, too few observations,
                    or "degenerate covariance" when W is singular
    """
    arrays = [np.atleast_2d(np.asarray(g, dtype=float)) for g in groups]
    arrays = [a for a in arrays if a.size]
    if len(arrays) < 2:
        raise ValueError("MANOVA needs at least 2 non-empty groups")
    if components is not None:
        arrays = [a[:, list(components)] for a in arrays]

    k = arrays[0].shape[1]
    if any(a.shape[1] != k for a in arrays):
        raise ValueError("all observations must have the same dimension")
    if k < 2:
        raise ValueError(f"MANOVA needs observation dimension >= 2, got {k}")
    n_groups = len(arrays)
    n_obs = sum(a.shape[0] for a in arrays)
    if n_obs <= n_groups + k:
        raise ValueError(
            f"MANOVA needs more observations than groups + dimensions "
            f"({n_obs} <= {n_groups} + {k})"
        )

    within, _ = _scatter(arrays)
    if np.linalg.matrix_rank(within) < k:
        raise ValueError("degenerate covariance")

    columns = [f"y{i}" for i in range(k)]
    data = pd.DataFrame(np.vstack(arrays), columns=columns)
    data["group"] = np.concatenate([[f"g{i}"] * a.shape[0] for i, a in enumerate(arrays)])

    model = MANOVA.from_formula(" + ".join(columns) + " ~ group", data=data)
    stat = model.mv_test().results["group"]["stat"]
    row = stat.loc["Wilks' lambda"]

    return ManovaResult(
        wilks_lambda=float(row["Value"]),
        approx_F=float(row["F Value"]),
        df1=float(row["Num DF"]),
        df2=float(row["Den DF"]),
        p_value=float(row["Pr > F"]),
        n_groups=n_groups,
        n_observations=n_obs,
        components=tuple(components) if components is not None else tuple(range(k)),
    )


def wilks_lambda(groups: Sequence[np.ndarray]) -> float:
    """det(W) / det(W + B) computed directly from the scatter matrices."""
    within, total = _scatter([np.asarray(g, dtype=float) for g in groups])
    return float(np.linalg.det(within) / np.linalg.det(total))

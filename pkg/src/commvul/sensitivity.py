"""First-order and total-effect Sobol' indices of vulnerability w.r.t. the four weights."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .vulnerability import CommunityFeatures

FACTORS = ("alpha", "beta", "lambda", "eta")
ESTIMATORS = ("jansen", "saltelli2010")

# feature column (S, T, Din, Dout order) and exponent sign driven by each factor
_FACTOR_COLUMN = (0, 3, 2, 1)
_FACTOR_SIGN = (1.0, -1.0, -1.0, -1.0)


class DegenerateRangeError(ValueError):
    """A factor range of zero width leaves its indices undefined."""


@dataclass(frozen=True)
class SamplePlan:
    n_samples: int = 10000
    ranges: Tuple[Tuple[float, float], ...] = ((0.2, 5.0),) * 4
    seed: int = 0
    estimator: str = "jansen"
    n_bootstrap: int = 200
    quasi_random: bool = False

    def __post_init__(self):
        if self.n_samples < 64:
            raise ValueError("n_samples must be at least 64")
        if len(self.ranges) != 4:
            raise ValueError("need one (low, high) range per factor")
        for lo, hi in self.ranges:
            if not lo > 0 or hi < lo:
                raise ValueError(f"invalid range ({lo}, {hi}); need 0 < low <= high")
        if self.estimator not in ESTIMATORS:
            raise ValueError(f"estimator must be one of {ESTIMATORS}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 unsigned bits")

    @classmethod
    def uniform(cls, low: float = 0.2, high: float = 5.0, **kwargs) -> "SamplePlan":
        return cls(ranges=((low, high),) * 4, **kwargs)

    @property
    def estimator_id(self) -> str:
        first = "jansen" if self.estimator == "jansen" else "saltelli-2010"
        return f"saltelli-pairs/first-order:{first}/total:jansen"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ranges"] = [list(r) for r in self.ranges]
        d["estimator_id"] = self.estimator_id
        return d


@dataclass(frozen=True)
class SampleMatrices:
    A: np.ndarray
    B: np.ndarray
    AB: np.ndarray  # (4, N, 4): AB[i] is A with column i taken from B


def sample_weights(plan: SamplePlan) -> SampleMatrices:
    n = plan.n_samples
    lo = np.array([r[0] for r in plan.ranges])
    hi = np.array([r[1] for r in plan.ranges])
    if plan.quasi_random:
        from scipy.stats import qmc

        u = qmc.Sobol(d=8, scramble=True, seed=plan.seed).random(n)
    else:
        u = np.random.default_rng(plan.seed).random((n, 8))
    A = lo + (hi - lo) * u[:, :4]
    B = lo + (hi - lo) * u[:, 4:]
    AB = np.repeat(A[None, :, :], 4, axis=0)
    for i in range(4):
        AB[i, :, i] = B[:, i]
    return SampleMatrices(A, B, AB)


def _indices(ya, yb, yab, estimator):
    """Point estimates for one set of rows; ``yab`` is (4, N)."""
    var = np.var(np.concatenate([ya, yb]))
    if var == 0:
        return np.zeros(4), np.zeros(4), 0.0
    if estimator == "jansen":
        vi = var - 0.5 * np.mean((yb[None, :] - yab) ** 2, axis=1)
    else:
        vi = np.mean(yb[None, :] * (yab - ya[None, :]), axis=1)
    vt = 0.5 * np.mean((ya[None, :] - yab) ** 2, axis=1)
    return vi / var, vt / var, float(var)


@dataclass
class SobolReport:
    index: Tuple[int, ...]
    si: np.ndarray
    st: np.ndarray
    si_halfwidth: np.ndarray
    st_halfwidth: np.ndarray
    si_raw: np.ndarray
    st_raw: np.ndarray
    variance: np.ndarray
    plan: SamplePlan
    degenerate: Tuple[int, ...] = ()
    warnings: List[str] = field(default_factory=list)

    @property
    def epsilon(self) -> np.ndarray:
        """Per-index Monte-Carlo allowance: three bootstrap half-widths."""
        return 3.0 * np.maximum(self.si_halfwidth, self.st_halfwidth)

    def rows(self) -> List[dict]:
        out = []
        for i, c in enumerate(self.index):
            row: Dict[str, float] = {"community": c}
            for j, name in enumerate(FACTORS):
                row[f"SI_{name}"] = float(self.si[i, j])
                row[f"ST_{name}"] = float(self.st[i, j])
            for j, name in enumerate(FACTORS):
                row[f"SI_{name}_hw"] = float(self.si_halfwidth[i, j])
                row[f"ST_{name}_hw"] = float(self.st_halfwidth[i, j])
            row["var_Y"] = float(self.variance[i])
            out.append(row)
        return out

    def to_dict(self) -> dict:
        return {
            "factors": list(FACTORS),
            "rows": self.rows(),
            "raw": {"si": self.si_raw.tolist(), "st": self.st_raw.tolist()},
            "degenerate_variance": list(self.degenerate),
            "plan": self.plan.to_dict(),
            "evaluations_per_community": 6 * self.plan.n_samples,
            "warnings": list(self.warnings),
        }


def _log_contributions(features) -> np.ndarray:
    """(k, 4) matrix ``c`` with vulnerability = exp(weights @ c[x])."""
    norm = features.normalized if isinstance(features, CommunityFeatures) else np.asarray(features, float)
    norm = np.atleast_2d(norm)
    if norm.shape[1] != 4:
        raise ValueError("features must have four columns (S, T, Din, Dout)")
    if np.any(~(norm > 0)) or np.any(~np.isfinite(norm)):
        raise ValueError("Sobol' analysis needs strictly positive finite normalized features")
    c = np.empty_like(norm)
    for j, (col, sign) in enumerate(zip(_FACTOR_COLUMN, _FACTOR_SIGN)):
        c[:, j] = sign * np.log(norm[:, col])
    return c


def sobol_indices(features, plan: SamplePlan = SamplePlan(),
                  index: Optional[Sequence[int]] = None) -> SobolReport:
    """Sobol' indices of every community's vulnerability.

    Factors acting on a feature equal to 1 cannot move the output and get
    exact zeros without estimation.
    """
    if any(lo == hi for lo, hi in plan.ranges):
        raise DegenerateRangeError("a factor range has zero width; its indices are undefined")
    contrib = _log_contributions(features)
    k = contrib.shape[0]
    index = tuple(index) if index is not None else tuple(range(1, k + 1))
    mats = sample_weights(plan)
    n = plan.n_samples
    boot_rows = np.random.default_rng([plan.seed, 1]).integers(0, n, size=(plan.n_bootstrap, n))

    si = np.zeros((k, 4))
    st = np.zeros((k, 4))
    si_hw = np.zeros((k, 4))
    st_hw = np.zeros((k, 4))
    variance = np.zeros(k)
    degenerate = []
    warnings: List[str] = []
    for x in range(k):
        c = contrib[x]
        active = c != 0
        if not active.any():
            degenerate.append(index[x])
            warnings.append(f"community {index[x]}: all features equal 1, output variance is 0")
            continue
        ya = np.exp(mats.A @ c)
        yb = np.exp(mats.B @ c)
        yab = np.exp(mats.AB @ c)
        s1, tot, var = _indices(ya, yb, yab, plan.estimator)
        variance[x] = var
        boot_s = np.empty((plan.n_bootstrap, 4))
        boot_t = np.empty((plan.n_bootstrap, 4))
        for r, rows in enumerate(boot_rows):
            boot_s[r], boot_t[r], _ = _indices(ya[rows], yb[rows], yab[:, rows], plan.estimator)
        lo_s, hi_s = np.percentile(boot_s, [2.5, 97.5], axis=0)
        lo_t, hi_t = np.percentile(boot_t, [2.5, 97.5], axis=0)
        si[x] = np.where(active, s1, 0.0)
        st[x] = np.where(active, tot, 0.0)
        si_hw[x] = np.where(active, (hi_s - lo_s) / 2, 0.0)
        st_hw[x] = np.where(active, (hi_t - lo_t) / 2, 0.0)

    si_raw, st_raw = si.copy(), st.copy()
    eps = 3.0 * np.maximum(si_hw, st_hw)
    # adding 0.0 turns the -0.0 produced by clipping exact zeros into +0.0
    si = np.clip(si, -eps, 1 + eps) + 0.0
    st = np.clip(st, -eps, 1 + eps) + 0.0
    return SobolReport(index, si, st, si_hw, st_hw, si_raw, st_raw, variance, plan,
                       tuple(degenerate), warnings)


def analytic_variance_check(value: float, column: str, plan: SamplePlan = SamplePlan()) -> dict:
    """Compare the estimator against a single-factor model with known indices.

    The feature row is all ones except ``column`` (one of S, T, Din, Dout),
    which takes ``value``; only the factor acting on that column moves the
    output, so its exact first-order and total indices are 1 and the rest 0.
    """
    from .vulnerability import COLUMNS

    row = np.ones(4)
    col = COLUMNS.index(column)
    row[col] = value
    report = sobol_indices(row[None, :], plan)
    exact = np.zeros(4)
    if value != 1:
        exact[_FACTOR_COLUMN.index(col)] = 1.0
    return {
        "column": column,
        "value": value,
        "exact": exact,
        "si": report.si[0],
        "st": report.st[0],
        "max_abs_error": float(max(np.abs(report.si[0] - exact).max(),
                                   np.abs(report.st[0] - exact).max())),
        "degenerate": bool(report.degenerate),
    }


class SobolAnalyzer(BaseEstimator):
    """Estimator front-end for :func:`sobol_indices`.

    ``fit`` accepts :class:`CommunityFeatures`, a fitted
    :class:`~commvul.vulnerability.CommunityVulnerability`, or a (k, 4) array
    of normalized features.
    """

    def __init__(self, n_samples=10000, low=0.2, high=5.0, seed=0, estimator="jansen",
                 n_bootstrap=200, quasi_random=False):
        self.n_samples = n_samples
        self.low = low
        self.high = high
        self.seed = seed
        self.estimator = estimator
        self.n_bootstrap = n_bootstrap
        self.quasi_random = quasi_random

    def fit(self, X, y=None):
        features = getattr(X, "features_", X)
        plan = SamplePlan.uniform(self.low, self.high, n_samples=self.n_samples, seed=self.seed,
                                  estimator=self.estimator, n_bootstrap=self.n_bootstrap,
                                  quasi_random=self.quasi_random)
        self.report_ = sobol_indices(features, plan)
        self.first_order_ = self.report_.si
        self.total_effect_ = self.report_.st
        return self

    def transform(self, X=None):
        """(k, 8) matrix of interleaved (SI, ST) per factor."""
        check_is_fitted(self, "report_")
        out = np.empty((self.first_order_.shape[0], 8))
        out[:, 0::2] = self.first_order_
        out[:, 1::2] = self.total_effect_
        return out

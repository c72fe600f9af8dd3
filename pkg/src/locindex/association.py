"""Classical association coefficients and their bridge to the LOC index.

Everything here that touches ranks assumes a tie-free sample: ranks of n
distinct values are a permutation of 1..n, which the identities below rely
on.  Tied data should be passed through ``dataset.jitter`` first; the rank
operations raise ``TiesError`` otherwise rather than silently mid-ranking.

The bridge: sorting the pairs by x and reading off the y ranks r_1..r_n
yields the rank step function t -> r_i / n on ((i-1)/n, i/n].  Its LOC index
equals the finite-population quantity I = (1/(2 n^3)) sum (i - r_i)^2, which
is exactly the expectation entering Liebscher's zeta under the quadratic
psi -- so zeta is the LOC index of the *rank-based* scatterplot, while the
LOC matrix entries come from the raw-data scatterplot.

References
----------
.. [1] Liebscher, E. (2014). "Copula-based dependence measures."
       *Dependence Modeling* 2: 49-64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy import integrate

from .bandwidth import BandwidthError, dpi_bandwidth, median_adjust
from .dataset import NormalizedSample, PairedSample, jitter, pair
from .rearrangement import StepFunction, loc_index, step_from_curve
from .smoothing import FitSpec, SmoothingError, fit_curve

__all__ = [
    "TiesError",
    "Ranks",
    "PsiFunction",
    "AssociationReport",
    "LocMatrix",
    "pearson",
    "empirical_ranks",
    "spearman",
    "psi_norm_constant",
    "liebscher_zeta",
    "finite_population_I",
    "rank_step_function",
    "loc_matrix",
]


class TiesError(ValueError):
    """Raised when ranks are requested for tied data.

    Add negligible noise first (``dataset.jitter`` with sd around 1e-5); that
    breaks the ties without practically changing the values.
    """


@dataclass(frozen=True)
class Ranks:
    """Empirical cdf values and the induced y ranks after ordering by x.

    ``fx[i] = rank(x_i)/n`` and ``gy[i] = rank(y_i)/n`` in original row
    order; ``induced[i]`` is n times the empirical y-cdf at the y value paired
    with the i-th smallest x, a permutation of 1..n.
    """

    fx: np.ndarray
    gy: np.ndarray
    induced: np.ndarray


@dataclass(frozen=True)
class PsiFunction:
    """Non-negative, symmetric, psi(0) = 0 distance shape on [-1, 1].

    ``c_psi = 2 * integral (1-u) psi(u) du`` over [0, 1] is the normalizer
    that calibrates Liebscher's zeta to 1 under perfect co-monotonicity.
    """

    kind: str  # "quadratic" | "absolute" | "custom"
    func: Callable[[np.ndarray], np.ndarray] | None = None
    c_psi: float | None = None

    @classmethod
    def quadratic(cls) -> "PsiFunction":
        """psi(u) = u^2 / 2, normalizer 1/12."""
        return cls(kind="quadratic")

    @classmethod
    def absolute(cls) -> "PsiFunction":
        """psi(u) = |u|, normalizer 1/3."""
        return cls(kind="absolute")

    @classmethod
    def custom(cls, func: Callable, c_psi: float | None = None) -> "PsiFunction":
        return cls(kind="custom", func=func, c_psi=c_psi)

    def __call__(self, u: np.ndarray) -> np.ndarray:
        if self.kind == "quadratic":
            return np.square(u) / 2.0
        if self.kind == "absolute":
            return np.abs(u)
        return np.asarray(self.func(u), dtype=float)


def pearson(sample: PairedSample) -> float:
    """Product-moment correlation; rejects constant coordinates."""
    dx = sample.x - sample.x.mean()
    dy = sample.y - sample.y.mean()
    vx = float(dx @ dx)
    vy = float(dy @ dy)
    if vx == 0.0 or vy == 0.0:
        raise ValueError("correlation undefined for a constant coordinate")
    return float(dx @ dy) / math.sqrt(vx * vy)


def _dense_ranks(values: np.ndarray, label: str) -> np.ndarray:
    n = len(values)
    if len(np.unique(values)) != n:
        raise TiesError(
            f"tied values in {label}; jitter the sample (sd ~ 1e-5) before ranking"
        )
    ranks = np.empty(n, dtype=np.int64)
    ranks[np.argsort(values, kind="stable")] = np.arange(1, n + 1)
    return ranks


def empirical_ranks(sample: PairedSample) -> Ranks:
    """Empirical cdf evaluations and induced y ranks for a tie-free sample."""
    rx = _dense_ranks(sample.x, "x")
    ry = _dense_ranks(sample.y, "y")
    n = sample.n
    induced = ry[np.argsort(sample.x, kind="stable")]
    return Ranks(fx=rx / n, gy=ry / n, induced=induced)


def spearman(sample: PairedSample) -> float:
    """Rank correlation: the Pearson correlation of (F_n(x_i), G_n(y_i))."""
    ranks = empirical_ranks(sample)
    return pearson(PairedSample(x=ranks.fx, y=ranks.gy))


def psi_norm_constant(psi: PsiFunction) -> float:
    """The normalizer c_psi = 2 * integral over [0,1] of (1-u) psi(u) du.

    Closed form for the built-in shapes, adaptive quadrature for custom ones.
    """
    if psi.kind == "quadratic":
        return 1.0 / 12.0
    if psi.kind == "absolute":
        return 1.0 / 3.0
    if psi.c_psi is not None:
        value = psi.c_psi
    else:
        value, _ = integrate.quad(lambda u: 2.0 * (1.0 - u) * float(psi(u)), 0.0, 1.0,
                                  epsabs=1e-10, epsrel=1e-10)
    if value <= 0.0:
        raise ValueError("psi normalizer must be positive; degenerate psi")
    return float(value)


def liebscher_zeta(sample: PairedSample, psi: PsiFunction) -> float:
    """Coefficient of monotonically increasing dependence on ranks.

    zeta = 1 - mean(psi(F_n(x_i) - G_n(y_i))) / c_psi.  Symmetric in the two
    roles, unlike the LOC index.
    """
    ranks = empirical_ranks(sample)
    c = psi_norm_constant(psi)
    return 1.0 - float(np.mean(psi(ranks.fx - ranks.gy))) / c


def finite_population_I(sample: PairedSample) -> float:
    """The quantity (1/(2 n^3)) * sum (i - r_i)^2 over the induced ranks.

    This is the empirical version of E[(F(X) - G(Y))^2] / 2; it vanishes
    exactly for co-monotone data.  Computed in integer arithmetic.
    """
    ranks = empirical_ranks(sample)
    n = sample.n
    i = np.arange(1, n + 1, dtype=np.int64)
    num = int(np.sum((i - ranks.induced) ** 2))
    return num / (2.0 * n**3)


def rank_step_function(sample: PairedSample) -> StepFunction:
    """Step function t -> r_i / n built from the induced ranks.

    Its ``loc_index`` reproduces ``finite_population_I`` exactly, which ties
    the rank-based coefficients to the LOC machinery.
    """
    ranks = empirical_ranks(sample)
    return StepFunction(taus=ranks.induced / sample.n)


@dataclass(frozen=True)
class AssociationReport:
    """All coefficients for one ordered pair, side by side.

    ``loc_mean``/``loc_median`` are None when the smoothing stage is skipped.
    ``identity_ok`` records whether the rank-based LOC reproduced
    ``finite_population_I`` to near machine precision on this sample.
    """

    pearson: float
    spearman: float
    zeta_quadratic: float
    zeta_absolute: float
    finite_i: float
    rank_loc: float
    identity_ok: bool
    loc_mean: float | None = None
    loc_median: float | None = None


@dataclass(frozen=True)
class LocMatrix:
    """Asymmetric matrix of LOC values over all ordered column pairs.

    ``entries[i, j]`` is the LOC of (column i explaining column j), unscaled;
    presentation layers multiply by 1000.  Failed pairs carry NaN and an
    explanation in ``failures``.
    """

    labels: tuple[str, ...]
    entries: np.ndarray
    loss_kind: str
    failures: dict[tuple[str, str], str]


def _pair_seed(seed: int, i: int, j: int) -> int:
    # one master seed, an independent but reproducible substream per pair
    return int(np.random.SeedSequence([seed, i, j]).generate_state(1)[0])


def loc_matrix(
    sample: NormalizedSample,
    spec: FitSpec,
    jitter_sd: float = 1e-5,
    seed: int = 0,
) -> LocMatrix:
    """LOC of every ordered column pair through the full smoothing pipeline.

    Per pair: jitter (pair-specific substream of ``seed``), bandwidth
    selection (plug-in; Yu-Jones adjusted for quantile loss; or the fixed
    value carried by ``spec``), curve fitting, and the exact step-function
    index.  The diagonal is zero by construction.  A failing pair is recorded
    and does not stop the others.
    """
    labels = sample.column_names
    if len(labels) < 2:
        raise ValueError("need at least 2 columns for a LOC matrix")
    k = len(labels)
    entries = np.zeros((k, k))
    failures: dict[tuple[str, str], str] = {}
    for i, x_name in enumerate(labels):
        for j, y_name in enumerate(labels):
            if i == j:
                continue
            try:
                entries[i, j] = _loc_of_pair(
                    pair(sample, x_name, y_name), spec, jitter_sd, _pair_seed(seed, i, j)
                )
            except (BandwidthError, SmoothingError, ValueError) as exc:
                entries[i, j] = np.nan
                failures[(x_name, y_name)] = str(exc)
    return LocMatrix(labels=labels, entries=entries, loss_kind=spec.loss.kind,
                     failures=failures)


def _loc_of_pair(pr: PairedSample, spec: FitSpec, jitter_sd: float, seed: int) -> float:
    jittered = jitter(pr, jitter_sd, seed)
    if spec.bandwidth is not None and spec.bandwidth.method == "fixed":
        bw = spec.bandwidth
    else:
        bw = dpi_bandwidth(jittered)
        if spec.loss.kind == "quantile":
            bw = median_adjust(bw, spec.loss.tau)
    curve = fit_curve(jittered, replace(spec, bandwidth=bw))
    return loc_index(step_from_curve(curve)).value

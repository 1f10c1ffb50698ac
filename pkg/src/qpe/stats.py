"""Pearson, Spearman and Chatterjee's xi for paired series.

Convention used throughout the experiments: ``xs`` is the Shannon entropy of
the data and ``ys`` the translated pseudo-entropy. xi is directional; it
measures how well ys is explained as a function of xs.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import ShapeError, UndefinedCorrelationError, ValidationError

DEFAULT_SEED = 42
# values closer than this (relative) are treated as exact ties by correlation_report
TIE_RTOL = 1e-10


def _paired(xs, ys) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(xs, dtype=float).ravel()
    y = np.asarray(ys, dtype=float).ravel()
    if x.size != y.size:
        raise ShapeError(f"series lengths differ: {x.size} vs {y.size}")
    if x.size < 2:
        raise ShapeError("need at least two paired samples")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValidationError("series contain non-finite values")
    return x, y


def pearson(xs, ys) -> float:
    x, y = _paired(xs, ys)
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise UndefinedCorrelationError("pearson correlation undefined for a constant series")
    dx, dy = x - x.mean(), y - y.mean()
    sx, sy = np.sqrt(dx @ dx), np.sqrt(dy @ dy)
    r = float((dx @ dy) / (sx * sy))
    return max(-1.0, min(1.0, r))


def average_ranks(v) -> np.ndarray:
    """1-based ranks; tied values share the mean of their positions."""
    v = np.asarray(v, dtype=float).ravel()
    order = np.argsort(v, kind="mergesort")
    sv = v[order]
    # boundaries of runs of equal values
    starts = np.flatnonzero(np.r_[True, sv[1:] != sv[:-1]])
    ends = np.r_[starts[1:], sv.size]
    mean_rank = (starts + ends + 1) / 2.0
    ranks = np.empty(v.size)
    ranks[order] = np.repeat(mean_rank, ends - starts)
    return ranks


def spearman(xs, ys) -> float:
    x, y = _paired(xs, ys)
    rx, ry = average_ranks(x), average_ranks(y)
    if np.all(rx == rx[0]) or np.all(ry == ry[0]):
        raise UndefinedCorrelationError("spearman correlation undefined for a constant series")
    return pearson(rx, ry)


def xicor(xs, ys, seed: int = DEFAULT_SEED) -> float:
    """Chatterjee's xi_n(X, Y).

    Pairs are sorted by x with ties broken uniformly at random (seeded).
    r_i counts y_j <= y_(i), l_i counts y_j >= y_(i). Without ties in y this
    is 1 - 3 sum|r_{i+1} - r_i| / (n^2 - 1); otherwise
    1 - n sum|r_{i+1} - r_i| / (2 sum l_i (n - l_i)).
    """
    x, y = _paired(xs, ys)
    n = x.size
    rng = np.random.default_rng(seed)
    order = np.lexsort((rng.permutation(n), x))
    ys_sorted = y[order]
    sy = np.sort(y)
    r = np.searchsorted(sy, ys_sorted, side="right").astype(np.int64)
    total = int(np.abs(np.diff(r)).sum())
    if np.unique(y).size == n:
        return 1.0 - (3 * total) / (n * n - 1)
    left = n - np.searchsorted(sy, ys_sorted, side="left").astype(np.int64)
    denom = 2 * int(np.sum(left * (n - left)))
    if denom == 0:
        # every y identical: no variation to explain
        return 0.0
    return 1.0 - (n * total) / denom


def merge_near_ties(v, rtol: float = TIE_RTOL) -> np.ndarray:
    """Snap values that agree to ``rtol`` onto one representative.

    Sorted neighbours closer than ``rtol * max(1, |v|)`` are chained into a
    group that takes the group's first value. Rank statistics are otherwise
    decided by rounding noise when the data carry exact symmetries.
    """
    v = np.asarray(v, dtype=float).ravel()
    if v.size < 2:
        return v.copy()
    order = np.argsort(v, kind="mergesort")
    sv = v[order]
    gap = np.diff(sv) > rtol * np.maximum(1.0, np.abs(sv[1:]))
    group = np.r_[0, np.cumsum(gap)]
    heads = sv[np.r_[0, np.flatnonzero(gap) + 1]]
    out = np.empty_like(v)
    out[order] = heads[group]
    return out


@dataclass(frozen=True)
class CorrelationReport:
    spearman: float | None
    xicor: float
    n: int
    seed: int
    pearson: float | None = None
    encoder: str | None = None
    translation: str | None = None

    def to_json(self) -> dict:
        d = asdict(self)
        return {k: d[k] for k in ("encoder", "translation", "n", "seed", "pearson", "spearman", "xicor")}


def _or_none(fn, *args):
    try:
        return fn(*args)
    except UndefinedCorrelationError:
        return None


def correlation_report(
    xs, ys, seed: int = DEFAULT_SEED, *, encoder=None, translation=None, tie_rtol: float | None = TIE_RTOL
) -> CorrelationReport:
    """All three statistics; near-equal values are merged first unless ``tie_rtol`` is None."""
    x, y = _paired(xs, ys)
    if tie_rtol is not None:
        x, y = merge_near_ties(x, tie_rtol), merge_near_ties(y, tie_rtol)
    return CorrelationReport(
        spearman=_or_none(spearman, x, y),
        xicor=xicor(x, y, seed),
        n=int(x.size),
        seed=int(seed),
        pearson=_or_none(pearson, x, y),
        encoder=encoder,
        translation=None if translation is None else str(getattr(translation, "value", translation)),
    )

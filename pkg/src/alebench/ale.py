"""Adaptive line enhancer core: delayed regressors and FIR filtering.

The enhancer delays the received samples by `delay`, forms length-`taps`
regressors from the delayed stream, and applies a real weight vector to
produce the predictable component y.  The residual e = d - y is the
noise-cancelled stream.  Samples whose regressor would reach before the
start of the frame are zero-padded and excluded from `valid`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["AleConfig", "FilterRun", "regressor", "filter_frame"]


@dataclass(frozen=True)
class AleConfig:
    """FIR enhancer geometry.

    Parameters
    ----------
    taps : int
        Filter length L, >= 1.
    delay : int
        Decorrelation delay in samples, >= 1.  The default of one sample
        is the canonical choice for broadband noise.
    """

    taps: int = 5
    delay: int = 1

    def __post_init__(self):
        if self.taps < 1:
            raise ValueError(f"taps must be >= 1, got {self.taps}")
        if self.delay < 1:
            raise ValueError(f"delay must be >= 1, got {self.delay}")

    @property
    def warmup(self) -> int:
        """First index whose regressor is fully inside the frame."""
        return self.delay + self.taps - 1


@dataclass(frozen=True)
class FilterRun:
    """One filtering pass: output y, residual e = d - y, and the index
    range over which regressors were fully populated."""

    y: np.ndarray
    e: np.ndarray
    valid: range = field(repr=False)

    @property
    def valid_slice(self) -> slice:
        return slice(self.valid.start, self.valid.stop)


def _check_weights(w: np.ndarray, cfg: AleConfig) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (cfg.taps,):
        raise ValueError(f"weights must have shape ({cfg.taps},), got {w.shape}")
    if not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite")
    return w


def regressor(
    d: np.ndarray, n: int, cfg: AleConfig, zero_pad: bool = False
) -> np.ndarray:
    """Delayed sample window [d[n-delay], d[n-delay-1], ..., d[n-delay-taps+1]].

    Indices before the frame start raise unless `zero_pad` is set, in which
    case they contribute zeros (warm-up convention).
    """
    d = np.asarray(d)
    first = n - cfg.delay - (cfg.taps - 1)
    if n - cfg.delay >= d.size or n < 0:
        raise ValueError(f"index {n} out of range for frame of length {d.size}")
    if first < 0 and not zero_pad:
        raise ValueError(
            f"regressor at n={n} reaches index {first}; "
            "enable zero_pad for warm-up samples"
        )
    out = np.zeros(cfg.taps, dtype=d.dtype)
    for k in range(cfg.taps):
        idx = n - cfg.delay - k
        if idx >= 0:
            out[k] = d[idx]
    return out


def filter_frame(d: np.ndarray, w: np.ndarray, cfg: AleConfig) -> FilterRun:
    """Apply fixed weights across a whole frame.

    y[n] = sum_k w[k] * d[n - delay - k], with zero padding ahead of the
    frame; e = d - y everywhere.  `valid` excludes the warm-up prefix.
    """
    d = np.asarray(d, dtype=np.complex128)
    w = _check_weights(w, cfg)
    if d.size <= cfg.delay + cfg.taps:
        raise ValueError(
            f"frame of length {d.size} too short for delay {cfg.delay} "
            f"and {cfg.taps} taps"
        )
    delayed = np.concatenate([np.zeros(cfg.delay, dtype=np.complex128), d[: d.size - cfg.delay]])
    y = np.convolve(delayed, w)[: d.size]
    e = d - y
    return FilterRun(y=y, e=e, valid=range(cfg.warmup, d.size))

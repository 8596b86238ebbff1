"""Column-wise standardization fitted on training data.

Each column is shifted to zero mean and scaled to unit sample standard
deviation (n-1 divisor). Constant columns are flagged and mapped to zeros
instead of blowing up: intrusion datasets routinely contain columns that are
constant on a subset.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class Standardizer:
    means: np.ndarray
    stds: np.ndarray  # 1.0 where zero-variance
    zero_variance_flags: np.ndarray

    @property
    def p(self) -> int:
        return len(self.means)

    def to_text(self) -> str:
        lines = ["standardizer"]
        for m, s, z in zip(self.means, self.stds, self.zero_variance_flags):
            lines.append(f"{m!r} {s!r} {int(z)}")
        return "\n".join(lines)


def fit_standardizer(m: np.ndarray) -> Standardizer:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 2:
        raise DataError(f"need a 2-D matrix with at least 2 rows, got shape {m.shape}")
    means = m.mean(axis=0)
    stds = m.std(axis=0, ddof=1)
    # A constant column must be flagged even when summation round-off keeps
    # the computed std a hair above zero; max == min is the exact test.
    flags = m.max(axis=0) == m.min(axis=0)
    stds = np.where(flags, 1.0, stds)
    return Standardizer(means=means, stds=stds, zero_variance_flags=flags)


def transform(s: Standardizer, m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[1] != s.p:
        raise DataError(f"matrix has {m.shape[1] if m.ndim == 2 else '?'} columns, standardizer expects {s.p}")
    out = (m - s.means) / s.stds
    if s.zero_variance_flags.any():
        out[:, s.zero_variance_flags] = 0.0
    return out

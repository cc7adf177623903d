"""Nadir/Utopia normalisation for weighted-sum scalarisation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["NadirUtopia", "normalization_factors", "weighted_sum_scalarize"]


@dataclass(frozen=True)
class NadirUtopia:
    nadir: tuple
    utopia: tuple

    def __post_init__(self):
        if self.utopia[0] > self.nadir[0] or self.utopia[1] > self.nadir[1]:
            raise ValueError("utopia point must not exceed nadir point")

    @classmethod
    def from_points(cls, F) -> "NadirUtopia":
        F = np.asarray(F, dtype=float).reshape(-1, 2)
        return cls(tuple(F.max(axis=0).tolist()), tuple(F.min(axis=0).tolist()))

    def factors(self) -> tuple[float, float]:
        return normalization_factors(self)


def normalization_factors(ref: NadirUtopia) -> tuple[float, float]:
    """``1 / (nadir - utopia)`` per objective; a collapsed range gets factor 1."""
    out = []
    for hi, lo in zip(ref.nadir, ref.utopia):
        span = hi - lo
        out.append(1.0 / span if span > 0 else 1.0)
    return out[0], out[1]


def weighted_sum_scalarize(pair, v_e: float, factors) -> float:
    """``v_e N_e Cost_e + (1 - v_e) N_u Cost_u``."""
    if not 0.0 <= v_e <= 1.0:
        raise ValueError(f"v_e must lie in [0, 1], got {v_e}")
    n_e, n_u = factors
    w_e = v_e * n_e
    w_u = (1.0 - v_e) * n_u
    return w_e * pair[0] + w_u * pair[1]

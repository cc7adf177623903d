"""Transformer view of the surrogate cost model."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .alignment import AlignmentDesign, build_horizontal, build_segments, vertical_count
from .costing import CostParameters, evaluate_costs
from .exceptions import RoadAlignError


class SurrogateCostModel(TransformerMixin, BaseEstimator):
    """Map decision vectors ``[X, Y, R, Z]`` to ``(Cost_e, Cost_u)`` rows.

    Designs whose geometry cannot be built, or that leave the terrain, map to
    ``(inf, inf)``.

    Examples
    --------
    >>> model = SurrogateCostModel(terrain, start=(0, 0, 100), end=(0, 900, 100), m=5)
    >>> costs = model.fit().transform(design_matrix)
    """

    def __init__(self, terrain=None, params=None, start=None, end=None, m=5):
        self.terrain = terrain
        self.params = params
        self.start = start
        self.end = end
        self.m = m

    def fit(self, X=None, y=None):
        if self.terrain is None or self.start is None or self.end is None:
            raise ValueError("terrain, start and end are required")
        self.params_ = self.params if self.params is not None else CostParameters()
        start = np.asarray(self.start, dtype=float)
        end = np.asarray(self.end, dtype=float)
        if start.size != 3 or end.size != 3:
            raise ValueError("start and end must be 3-D points")
        self.start_, self.end_ = start, end
        # scalar m: N is inferred from each row's length, 3N + (N+1)m + (N-1)
        self.m_ = None if np.ndim(self.m) == 0 else tuple(int(v) for v in self.m)
        if self.m_ is not None:
            self.n_features_in_ = 3 * (len(self.m_) - 1) + vertical_count(self.m_)
        return self

    def _design(self, row):
        m = self.m_
        if m is None:
            d = row.size
            n, rem = divmod(d - self.m + 1, 4 + self.m)
            if rem or n < 1:
                raise ValueError(f"cannot infer N from {d} columns with m={self.m}")
            m = (int(self.m),) * (n + 1)
        return AlignmentDesign.from_vector(row, self.start_, self.end_, m)

    def transform(self, X):
        check_is_fitted(self, "params_")
        X = check_array(X)
        out = np.empty((X.shape[0], 2))
        for i, row in enumerate(X):
            design = self._design(row)
            try:
                geom = build_horizontal(design)
                out[i] = evaluate_costs(design, self.terrain, self.params_, geom, build_segments(design, geom)).objectives
            except RoadAlignError:
                out[i] = np.inf
        return out

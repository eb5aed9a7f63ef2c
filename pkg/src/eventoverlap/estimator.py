"""scikit-learn compatible wrapper over the closed-form estimators.

Each input row is one scenario ``(T, t_a, t_b, n_a, n_b)``; for
``method="rate"`` the last two columns are rates instead of counts.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import closed_form
from .domain import Scenario

_METHODS = ("precise", "approx", "universal", "rate")


class OverlapProbability(TransformerMixin, BaseEstimator):
    """Overlap probability for a batch of scenarios.

    Nothing is learned; ``fit`` only validates the input width and the
    hyper-parameters so the estimator can sit inside a ``Pipeline``.

    Parameters
    ----------
    method : {"precise", "approx", "universal", "rate"}
    error_scale : {"overlap", "no_overlap"}
        Prefactor of the universal error bound, see
        :func:`eventoverlap.closed_form.error_bound`.
    """

    def __init__(self, method: str = "universal", error_scale: str = "overlap"):
        self.method = method
        self.error_scale = error_scale

    def fit(self, X, y=None):
        if self.method not in _METHODS:
            raise ValueError(f"method must be one of {_METHODS}, got {self.method!r}")
        if self.error_scale not in ("overlap", "no_overlap"):
            raise ValueError(f"unknown error_scale {self.error_scale!r}")
        X = self._validate(X)
        self.n_features_in_ = X.shape[1]
        return self

    def _validate(self, X) -> np.ndarray:
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != 5:
            raise ValueError(f"expected 5 columns (T, t_a, t_b, n_a, n_b), got {X.shape[1]}")
        return X

    def _result(self, row: np.ndarray) -> closed_form.ProbabilityResult:
        T, t_a, t_b, a, b = (float(v) for v in row)
        if self.method == "rate":
            return closed_form.p_universal_rate(T, t_a, t_b, a, b, scale=self.error_scale)
        s = Scenario.from_params(T, t_a, t_b, a, b)
        if self.method == "precise":
            return closed_form.p_star(s)
        if self.method == "approx":
            return closed_form.p_approx(s)
        return closed_form.p_universal(s, scale=self.error_scale)

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "n_features_in_")
        X = self._validate(X)
        return np.array([self._result(row).value for row in X])

    def transform(self, X) -> np.ndarray:
        """Columns: probability, error bound (NaN where none is available)."""
        check_is_fitted(self, "n_features_in_")
        X = self._validate(X)
        out = np.empty((X.shape[0], 2))
        for i, row in enumerate(X):
            r = self._result(row)
            out[i] = r.value, np.nan if r.error_bound is None else r.error_bound
        return out

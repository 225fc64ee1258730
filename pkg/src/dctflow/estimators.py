"""Estimator wrappers exposing the factorizations to scikit-learn pipelines.

Each estimator infers the transform length from the training data's
feature axis, builds the corresponding plan once in ``fit``, and applies
it row-wise in ``transform``.  The plans are linear and parameter-free,
so ``fit`` never looks at the values of ``X``, only its width.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .factorizer import ScaledFactorization, dct3_plan, kok_plan, merged_scaled_plan, scaled_plan
from .flowgraph import PlanGraph
from .folding import fold


class _PlanEstimator(TransformerMixin, BaseEstimator):
    """Shared plumbing; subclasses provide the plan constructor."""

    def __init__(self, fold_plan: bool = True):
        self.fold_plan = fold_plan

    def _build(self, n: int) -> PlanGraph:
        raise NotImplementedError

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        self.n_features_in_ = X.shape[1]
        plan = self._build(self.n_features_in_)
        if self.fold_plan:
            plan = fold(plan)
        self.plan_ = plan
        self.op_count_ = plan.count_ops()
        return self

    def _validated(self, X) -> np.ndarray:
        check_is_fitted(self, "plan_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, but the estimator was fitted with {self.n_features_in_}")
        return X

    def transform(self, X) -> np.ndarray:
        X = self._validated(X)
        return self.plan_.apply(X)


class Dct2(_PlanEstimator):
    """Row-wise unnormalized DCT-II via the recursive flowgraph.

    Parameters
    ----------
    fold_plan : bool, default=True
        Run the constant-folding pass on the built plan.
    """

    def _build(self, n: int) -> PlanGraph:
        return kok_plan(n)


class Dct3(_PlanEstimator):
    """Row-wise unnormalized DCT-III, the transpose of :class:`Dct2`."""

    def _build(self, n: int) -> PlanGraph:
        return dct3_plan(n)


class ScaledDct2(_PlanEstimator):
    """Row-wise scaled DCT-II: outputs equal the DCT-II up to per-row scales.

    ``transform`` returns coefficients in natural frequency order; the
    exact DCT-II values are ``transform(X) * scale_``, also available
    through :meth:`reconstruct`.

    Parameters
    ----------
    fold_plan : bool, default=True
        Run the constant-folding pass on the built plan.
    variant : {"auto", "recursive", "merged"}, default="auto"
        Which scaled construction to build.  "merged" folds the stage
        scales into the diagonal and only supports lengths 2^m and
        3*2^m; "auto" uses it where it applies and falls back to the
        recursive construction elsewhere.

    Attributes
    ----------
    factorization_ : ScaledFactorization
        The underlying plan with its permutation and diagonal.
    permutation_ : ndarray
        Natural output k is produced by raw plan output ``permutation_[k]``.
    scale_ : ndarray
        Per-output scales in natural order.
    """

    def __init__(self, fold_plan: bool = True, variant: str = "auto"):
        super().__init__(fold_plan=fold_plan)
        self.variant = variant

    def _build_factorization(self, n: int) -> ScaledFactorization:
        if self.variant == "recursive":
            return scaled_plan(n)
        if self.variant == "merged":
            return merged_scaled_plan(n)
        if self.variant == "auto":
            try:
                return merged_scaled_plan(n)
            except ValueError:
                return scaled_plan(n)
        raise ValueError(f"variant must be 'auto', 'recursive' or 'merged', got {self.variant!r}")

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        self.n_features_in_ = X.shape[1]
        factorization = self._build_factorization(self.n_features_in_)
        if self.fold_plan:
            factorization = ScaledFactorization(
                fold(factorization.plan), factorization.pi, factorization.delta
            )
        self.factorization_ = factorization
        self.plan_ = factorization.plan
        self.op_count_ = factorization.plan.count_ops()
        self.permutation_ = np.asarray(factorization.pi)
        self.scale_ = np.asarray(factorization.delta)[self.permutation_]
        return self

    def transform(self, X) -> np.ndarray:
        X = self._validated(X)
        raw = self.plan_.apply(X)
        return raw[..., self.permutation_]

    def reconstruct(self, Z) -> np.ndarray:
        """Turn scaled coefficients from ``transform`` into DCT-II values."""
        check_is_fitted(self, "plan_")
        Z = np.asarray(Z, dtype=float)
        if Z.shape[-1] != self.n_features_in_:
            raise ValueError(f"expected last axis of length {self.n_features_in_}, got {Z.shape[-1]}")
        return Z * self.scale_

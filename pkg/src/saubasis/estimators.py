"""Estimator-style wrappers so the pursuit and stage driver compose with
the scikit-learn ecosystem (get_params/set_params, fit, transform).

The fitted family acts as a dictionary: transform maps step functions to
their coefficient vectors against the family, exactly computed and
returned as floats for downstream numeric code (use project() to keep
Fractions).
"""

from __future__ import annotations

from typing import List, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .basis import BasisState, run_stages
from .pursuit import DEFAULT_CELL_CEILING, pursue
from .stepfn import OrthoFamily, StepFn, project_residual


def _check_stepfn(x, name="input") -> StepFn:
    if not isinstance(x, StepFn):
        raise TypeError("%s must be a StepFn, got %r" % (name, type(x).__name__))
    return x


class UnitaryPursuit(BaseEstimator):
    """Greedy decomposition of a step function over sign-valued unitaries.

    Parameters
    ----------
    epsilon : Fraction-like, stopping threshold on the residual 2-norm.
    cell_ceiling : abort limit on the residual partition size.

    Attributes (after fit)
    ----------------------
    units_ : list of StepFn, the extracted unitaries.
    alphas_ : list of Fraction, the pursuit coefficients.
    residual_ : StepFn with norm2_sq < epsilon^2.
    trace_ : PursuitTrace with the per-step certificates.
    """

    def __init__(self, epsilon="1/4", cell_ceiling=DEFAULT_CELL_CEILING):
        self.epsilon = epsilon
        self.cell_ceiling = cell_ceiling

    def fit(self, a, family: OrthoFamily | None = None):
        a = _check_stepfn(a, "a")
        fam = family if family is not None else OrthoFamily()
        units, trace, residual = pursue(
            a, fam, self.epsilon, cell_ceiling=self.cell_ceiling
        )
        self.family_ = fam
        self.units_ = units
        self.alphas_ = trace.alphas()
        self.residual_ = residual
        self.trace_ = trace
        return self

    def fit_transform(self, a, family: OrthoFamily | None = None):
        self.fit(a, family)
        return np.array([float(c) for c in self.alphas_])


class BasisTransformer(TransformerMixin, BaseEstimator):
    """Grow an orthonormal family of sign-valued unitaries, then expand
    step functions in it.

    Parameters
    ----------
    stages : number of (dense element, precision) stages to run.
    cell_ceiling : abort limit for the underlying pursuits.
    """

    def __init__(self, stages=15, cell_ceiling=DEFAULT_CELL_CEILING):
        self.stages = stages
        self.cell_ceiling = cell_ceiling

    def fit(self, X=None, y=None):
        self.state_ = run_stages(self.stages, cell_ceiling=self.cell_ceiling)
        self.family_ = self.state_.family
        return self

    def _check_fitted(self):
        if not hasattr(self, "state_"):
            raise NotFittedError("call fit first")

    def project(self, f: StepFn):
        """Exact coefficients and residual of f against the family."""
        self._check_fitted()
        return project_residual(_check_stepfn(f), self.family_)

    def transform(self, X: Sequence[StepFn]) -> np.ndarray:
        """Coefficient matrix of the inputs against the fitted family."""
        self._check_fitted()
        rows: List[List[float]] = []
        for f in X:
            coeffs, _ = project_residual(_check_stepfn(f), self.family_)
            rows.append([float(c) for c in coeffs])
        return np.array(rows)

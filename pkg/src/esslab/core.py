"""Concordance metrics, the distance curve and signed ESS conventions.

Every model family reduces to a :class:`ConcordanceProfile`: the second
moment of the Bayesian Z statistic at the Bayesian sample size ``n``
(``u_bayes``) and the per-observation slope ``kappa`` of the frequentist
second moment, which is linear in the hypothetical sample size because the
sample mean is held fixed while that size varies.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import numpy as np

from .exceptions import MinimizerAtBoundary, ValidationError


class Family(str, enum.Enum):
    NORMAL_ONE_SAMPLE = "normal"
    BETA_ONE_SAMPLE = "beta1"
    BETA_TWO_SAMPLE = "beta2"
    LINREG_TWO_GROUP = "linreg"


class SupportDirection(str, enum.Enum):
    """Which hypothesis the data-generating truth supports.

    Only the sign rule of the ESS depends on it.
    """

    SUPPORTS_NULL = "null"
    SUPPORTS_ALTERNATIVE = "alternative"


class Method(str, enum.Enum):
    CLOSED_FORM = "closed-form"
    EXACT_ENUMERATION = "enum"
    MONTE_CARLO = "mc"
    BOOTSTRAP = "bootstrap"


@dataclass(frozen=True)
class HypothesisSpec:
    """One-sided test ``H0: param <= boundary`` vs ``H1: param > boundary``.

    ``null_boundary`` is ``None`` for the two-sample equality-of-rates test.
    """

    family: Family
    null_boundary: float | None = 0.0

    def __post_init__(self):
        family = Family(self.family)
        object.__setattr__(self, "family", family)
        b = self.null_boundary
        if family is Family.BETA_TWO_SAMPLE:
            if b is not None:
                raise ValidationError("null_boundary", "two-sample rate test has no boundary")
            return
        if b is None or not math.isfinite(b):
            raise ValidationError("null_boundary", "must be a finite real")
        if family is Family.BETA_ONE_SAMPLE and not 0.0 < b < 1.0:
            raise ValidationError("null_boundary", "must lie in (0, 1) for a Bernoulli rate")


@dataclass(frozen=True)
class ConcordanceProfile:
    """Sufficient statistics of the distance curve ``|u_bayes - n_tilde * kappa|``."""

    u_bayes: float
    kappa: float
    n: int
    se_u_bayes: float = 0.0
    se_kappa: float = 0.0
    diagnostics: Mapping[str, float] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (self.kappa > 0 and math.isfinite(self.kappa)):
            raise ValidationError("kappa", f"must be finite and > 0, got {self.kappa!r}")
        if not (self.u_bayes >= 0 and math.isfinite(self.u_bayes)):
            raise ValidationError("u_bayes", f"must be finite and >= 0, got {self.u_bayes!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError("n", "must be an integer >= 1")
        if self.se_u_bayes < 0 or self.se_kappa < 0:
            raise ValidationError("se", "standard errors must be >= 0")

    @property
    def n_tilde_continuous(self) -> float:
        return self.u_bayes / self.kappa


@dataclass(frozen=True)
class EssEstimate:
    n: int
    n_tilde_star: int
    n_tilde_continuous: float
    ess: int
    direction: SupportDirection
    method: Method
    diagnostics: Mapping[str, float] = field(default_factory=dict, compare=False)

    @property
    def ess_continuous(self) -> float:
        if self.direction is SupportDirection.SUPPORTS_NULL:
            return self.n - self.n_tilde_continuous
        return self.n_tilde_continuous - self.n

    @property
    def at_boundary(self) -> bool:
        return bool(self.diagnostics.get("at_boundary", 0.0))

    def to_dict(self) -> dict:
        return {
            "n": int(self.n),
            "n_tilde_star": int(self.n_tilde_star),
            "n_tilde_continuous": float(self.n_tilde_continuous),
            "ess": int(self.ess),
            "ess_continuous": float(self.ess_continuous),
            "direction": self.direction.value,
            "method": self.method.value,
            "diagnostics": {k: float(v) for k, v in self.diagnostics.items()},
        }


class Minimizer(NamedTuple):
    n_tilde_star: int
    n_tilde_continuous: float
    at_boundary: bool


def default_grid(n: int) -> tuple[int, int]:
    """Search grid ``[1, 20 n]``; the minimizer can sit far above ``n``."""
    return 1, 20 * int(n)


def distance(profile: ConcordanceProfile, n_tilde) -> float | np.ndarray:
    """``|u_bayes - n_tilde * kappa|``; vectorised over ``n_tilde``."""
    if np.any(np.asarray(n_tilde) < 1):
        raise ValidationError("n_tilde", "must be >= 1")
    d = np.abs(profile.u_bayes - np.asarray(n_tilde, dtype=float) * profile.kappa)
    return float(d) if d.ndim == 0 else d


def minimize_distance(profile: ConcordanceProfile, grid: tuple[int, int] | None = None) -> Minimizer:
    """Integer argmin of the distance over ``[lo, hi]`` by full grid enumeration.

    Ties go to the smaller ``n_tilde``. The continuous minimizer
    ``u_bayes / kappa`` is returned alongside; when it falls outside the
    grid the result is flagged rather than raised, callers that need an
    interior solution check ``at_boundary``.
    """
    lo, hi = grid if grid is not None else default_grid(profile.n)
    if not 1 <= lo <= hi:
        raise ValidationError("grid", f"need 1 <= lo <= hi, got [{lo}, {hi}]")
    candidates = np.arange(lo, hi + 1)
    d = np.abs(profile.u_bayes - candidates * profile.kappa)
    # np.argmin returns the first minimum, i.e. the smaller n_tilde on ties
    star = int(candidates[int(np.argmin(d))])
    cont = profile.n_tilde_continuous
    return Minimizer(star, cont, not lo <= cont <= hi)


def analytic_minimizer(profile: ConcordanceProfile, grid: tuple[int, int] | None = None) -> int:
    """Closed-form integer minimizer: the nearer of floor/ceil of ``u/kappa``, clipped to the grid."""
    lo, hi = grid if grid is not None else default_grid(profile.n)
    cont = profile.n_tilde_continuous
    below = min(max(math.floor(cont), lo), hi)
    above = min(max(math.ceil(cont), lo), hi)
    d_below = abs(profile.u_bayes - below * profile.kappa)
    d_above = abs(profile.u_bayes - above * profile.kappa)
    return below if d_below <= d_above else above


def signed_ess(n: int, n_tilde, direction: SupportDirection):
    direction = SupportDirection(direction)
    if direction is SupportDirection.SUPPORTS_NULL:
        return n - n_tilde
    return n_tilde - n


def ess_from_minimizer(
    n: int,
    n_tilde_star: int,
    direction: SupportDirection,
    method: Method = Method.CLOSED_FORM,
    n_tilde_continuous: float | None = None,
    diagnostics: Mapping[str, float] | None = None,
) -> EssEstimate:
    if n < 1 or n_tilde_star < 1:
        raise ValidationError("n", "n and n_tilde_star must be >= 1")
    direction = SupportDirection(direction)
    return EssEstimate(
        n=int(n),
        n_tilde_star=int(n_tilde_star),
        n_tilde_continuous=float(n_tilde_star if n_tilde_continuous is None else n_tilde_continuous),
        ess=int(signed_ess(int(n), int(n_tilde_star), direction)),
        direction=direction,
        method=Method(method),
        diagnostics=dict(diagnostics or {}),
    )


def estimate_ess(
    profile: ConcordanceProfile,
    direction: SupportDirection,
    method: Method,
    grid: tuple[int, int] | None = None,
    strict: bool = False,
) -> EssEstimate:
    """Minimize the distance curve of ``profile`` and apply the sign rule.

    With ``strict=True`` a minimizer outside the grid raises
    :class:`MinimizerAtBoundary` instead of being flagged.
    """
    grid = grid if grid is not None else default_grid(profile.n)
    star, cont, at_boundary = minimize_distance(profile, grid)
    if strict and at_boundary:
        raise MinimizerAtBoundary(cont, *grid)
    # delta-method SE of u/kappa, ignoring the u/kappa covariance
    rel = math.hypot(
        profile.se_u_bayes / profile.u_bayes if profile.u_bayes > 0 else 0.0,
        profile.se_kappa / profile.kappa,
    )
    diagnostics = {
        "u_bayes": profile.u_bayes,
        "kappa": profile.kappa,
        "se_u_bayes": profile.se_u_bayes,
        "se_kappa": profile.se_kappa,
        "se_n_tilde": cont * rel,
        "grid_lo": float(grid[0]),
        "grid_hi": float(grid[1]),
        "at_boundary": float(at_boundary),
    }
    diagnostics.update(profile.diagnostics)
    return ess_from_minimizer(profile.n, star, direction, method, cont, diagnostics)

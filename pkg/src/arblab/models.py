"""Model parameter types for every process the laboratory can simulate.

Each variant is a frozen dataclass validated at construction; a tagged-dict
(de)serialization mirrors the shipped ``model_params`` JSON schema field for
field.  The local-volatility coefficient functionals come from a closed
catalog so their bound invariants can be checked when a model is registered,
which an open plugin interface could not guarantee.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, asdict
from typing import Callable, Union

import numpy as np

_BOUND_TOL = 1e-12


def _as_matrix(sigma) -> np.ndarray:
    arr = np.atleast_2d(np.asarray(sigma, dtype=float))
    if arr.ndim != 2:
        raise ValueError("sigma must be a scalar, vector or matrix")
    return arr


@dataclass(frozen=True)
class BrownianParams:
    """Standard D-dimensional Brownian motion started at 0."""

    dims: int = 1

    def __post_init__(self):
        if self.dims < 1:
            raise ValueError("dims must be >= 1")


@dataclass(frozen=True)
class FbmParams:
    """Fractional Brownian motion with Hurst index `hurst`, started at 0."""

    hurst: float
    method: str = "circulant"

    def __post_init__(self):
        if not 0.0 < self.hurst < 1.0:
            raise ValueError(f"hurst must lie in (0, 1), got {self.hurst}")
        if self.method not in ("circulant", "cholesky"):
            raise ValueError(f"unknown fbm method {self.method!r}")


@dataclass(frozen=True)
class BubbleParams:
    """Gaussian-kernel local martingale that is pinned to 0 at the grid horizon."""


@dataclass(frozen=True)
class DriftedExpParams:
    """exp(W_t + t**alpha) with alpha in (0, 1); sub-diffusive drift dominates near 0 for alpha < 1/2."""

    alpha: float = 0.25

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class MixedFbsParams:
    """Mixed Black-Scholes: x0 * exp(sigma W_t + eta Z_t + nu t + mu t**2H).

    Multi-asset form: `x0` a length-D vector and `sigma` a D x Nw matrix with
    sigma sigma* strictly positive definite; Z has independent fBm components.
    """

    x0: Union[float, tuple] = 1.0
    sigma: Union[float, tuple] = 0.2
    eta: float = 0.0
    nu: float = 0.0
    mu: float = 0.0
    hurst: float = 0.75

    def __post_init__(self):
        if not 0.0 < self.hurst < 1.0:
            raise ValueError(f"hurst must lie in (0, 1), got {self.hurst}")
        x0 = np.atleast_1d(np.asarray(self.x0, dtype=float))
        if np.any(x0 <= 0.0):
            raise ValueError("x0 must be strictly positive")
        smat = _as_matrix(self.sigma)
        if smat.shape[0] != x0.size:
            raise ValueError(
                f"sigma has {smat.shape[0]} rows but x0 has {x0.size} components"
            )
        gram = smat @ smat.T
        min_eig = float(np.linalg.eigvalsh(gram).min())
        if min_eig <= 0.0:
            raise ValueError(
                f"sigma sigma* must be strictly positive definite (min eigenvalue {min_eig:.3e})"
            )
        if self.eta < 0.0:
            raise ValueError("eta must be nonnegative")

    @property
    def dims(self) -> int:
        return np.atleast_1d(np.asarray(self.x0, dtype=float)).size

    def x0_vector(self) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.x0, dtype=float))

    def sigma_matrix(self) -> np.ndarray:
        return _as_matrix(self.sigma)


@dataclass(frozen=True)
class MixedHestonParams:
    """Heston discounted stock times exp(eta * Z) for an independent fBm Z.

    The Feller condition 2 kappa theta >= xi**2 is enforced so the variance
    stays strictly positive in the continuous model; eta = 0 switches the
    mixing component off.
    """

    s0: float = 1.0
    v0: float = 0.04
    kappa: float = 1.5
    theta: float = 0.04
    xi: float = 0.3
    rho: float = -0.6
    mu: float = 0.0
    hurst: float = 0.75
    eta: float = 1.0

    def __post_init__(self):
        if self.s0 <= 0.0 or self.v0 <= 0.0 or self.kappa <= 0.0 or self.theta <= 0.0 or self.xi <= 0.0:
            raise ValueError("s0, v0, kappa, theta, xi must all be strictly positive")
        if not -1.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie in (-1, 1), got {self.rho}")
        if 2.0 * self.kappa * self.theta < self.xi**2:
            raise ValueError(
                f"Feller condition violated: 2*kappa*theta = {2 * self.kappa * self.theta:.6g} "
                f"< xi**2 = {self.xi ** 2:.6g}"
            )
        if not 0.0 < self.hurst < 1.0:
            raise ValueError(f"hurst must lie in (0, 1), got {self.hurst}")
        if self.eta < 0.0:
            raise ValueError("eta must be nonnegative")


# --- closed catalog of local-volatility coefficient functionals -------------
#
# Coefficients are relative to the spot: sigma(t, x) = c_sigma * x(t) and
# mu(t, x) = c_mu * x(t).  A factory maps the model bound to
# (step_fn, lo, hi) where step_fn(t, log_spot, log_running_max) returns the
# per-path coefficient array and [lo, hi] encloses every value it can take.

def _flat_vol(level: float) -> Callable:
    def fn(t, log_spot, log_run_max):
        return np.full_like(log_spot, level)
    return fn


def _running_max_vol(lo: float, hi: float) -> Callable:
    def fn(t, log_spot, log_run_max):
        at_max = log_spot >= log_run_max
        return np.where(at_max, hi, lo)
    return fn


VOL_FUNCTIONALS: dict[str, Callable[[float], tuple[Callable, float, float]]] = {
    "flat_max": lambda sig_bar: (_flat_vol(sig_bar), sig_bar, sig_bar),
    "flat_min": lambda sig_bar: (_flat_vol(1.0 / sig_bar), 1.0 / sig_bar, 1.0 / sig_bar),
    "running_max": lambda sig_bar: (
        _running_max_vol(1.0 / sig_bar, sig_bar), 1.0 / sig_bar, sig_bar,
    ),
}

DRIFT_FUNCTIONALS: dict[str, Callable[[float], tuple[Callable, float, float]]] = {
    "zero": lambda mu_bar: (_flat_vol(0.0), 0.0, 0.0),
    "long": lambda mu_bar: (_flat_vol(mu_bar), mu_bar, mu_bar),
    "short": lambda mu_bar: (_flat_vol(-mu_bar), -mu_bar, -mu_bar),
}


def resolve_vol_functional(name: str, sigma_bar: float) -> tuple[Callable, float, float]:
    """Look up a volatility functional and verify its declared bounds.

    Rejects names outside the catalog and any (name, sigma_bar) combination
    whose coefficient range escapes [1/sigma_bar, sigma_bar].
    """
    if name not in VOL_FUNCTIONALS:
        raise ValueError(f"unknown volatility functional {name!r}; catalog: {sorted(VOL_FUNCTIONALS)}")
    fn, lo, hi = VOL_FUNCTIONALS[name](sigma_bar)
    if lo < 1.0 / sigma_bar - _BOUND_TOL or hi > sigma_bar + _BOUND_TOL or lo > hi:
        raise ValueError(
            f"volatility functional {name!r} violates its bounds: range [{lo}, {hi}] "
            f"outside [{1.0 / sigma_bar}, {sigma_bar}]"
        )
    return fn, lo, hi


def resolve_drift_functional(name: str, mu_bar: float) -> tuple[Callable, float, float]:
    if name not in DRIFT_FUNCTIONALS:
        raise ValueError(f"unknown drift functional {name!r}; catalog: {sorted(DRIFT_FUNCTIONALS)}")
    fn, lo, hi = DRIFT_FUNCTIONALS[name](mu_bar)
    if max(abs(lo), abs(hi)) > mu_bar + _BOUND_TOL:
        raise ValueError(
            f"drift functional {name!r} violates |c| <= mu_bar: range [{lo}, {hi}], mu_bar={mu_bar}"
        )
    return fn, lo, hi


@dataclass(frozen=True)
class LocalVolMixedParams:
    """Path-dependent local-volatility stock times exp(z_scale * Z).

    Coefficients are drawn from the closed functional catalog and must respect
    |mu(t,x)| <= mu_bar x(t) and x(t)/sigma_bar <= |sigma(t,x)| <= sigma_bar x(t),
    which forces sigma_bar >= 1.  Z is fBm with Hurst index z_hurst >= 1/2.
    """

    s0: float = 1.0
    mu_bar: float = 0.1
    sigma_bar: float = 1.25
    drift_fn: str = "zero"
    vol_fn: str = "flat_max"
    z_hurst: float = 0.75
    z_scale: float = 1.0

    def __post_init__(self):
        if self.s0 <= 0.0:
            raise ValueError("s0 must be strictly positive")
        if self.mu_bar <= 0.0:
            raise ValueError("mu_bar must be strictly positive")
        if self.sigma_bar < 1.0:
            raise ValueError(
                f"sigma_bar must be >= 1 so that [1/sigma_bar, sigma_bar] is nonempty, got {self.sigma_bar}"
            )
        if not 0.5 <= self.z_hurst < 1.0:
            raise ValueError(f"z_hurst must lie in [0.5, 1), got {self.z_hurst}")
        if self.z_scale < 0.0:
            raise ValueError("z_scale must be nonnegative")
        # Registration-time bound check of the chosen functionals.
        resolve_vol_functional(self.vol_fn, self.sigma_bar)
        resolve_drift_functional(self.drift_fn, self.mu_bar)


@dataclass(frozen=True)
class Counterexample2dParams:
    """Two stocks: X1 = W_{t^1}, X2 = U W_{t^1} + (t^1) with U ~ Uniform[0,1] drawn once per path."""


ModelParams = Union[
    BrownianParams,
    FbmParams,
    BubbleParams,
    DriftedExpParams,
    MixedFbsParams,
    MixedHestonParams,
    LocalVolMixedParams,
    Counterexample2dParams,
]

MODEL_VARIANTS: dict[str, type] = {
    "brownian": BrownianParams,
    "fbm": FbmParams,
    "bubble": BubbleParams,
    "drifted_exp": DriftedExpParams,
    "mixed_fbs": MixedFbsParams,
    "mixed_heston": MixedHestonParams,
    "local_vol_mixed": LocalVolMixedParams,
    "counterexample_2d": Counterexample2dParams,
}

_VARIANT_NAMES = {cls: name for name, cls in MODEL_VARIANTS.items()}


def model_variant(model: ModelParams) -> str:
    return _VARIANT_NAMES[type(model)]


def model_to_dict(model: ModelParams) -> dict:
    d = asdict(model)
    d["variant"] = model_variant(model)
    return d


def model_from_dict(d: dict) -> ModelParams:
    if "variant" not in d:
        raise ValueError("model dict needs a 'variant' tag")
    variant = d["variant"]
    if variant not in MODEL_VARIANTS:
        raise ValueError(f"unknown model variant {variant!r}; known: {sorted(MODEL_VARIANTS)}")
    cls = MODEL_VARIANTS[variant]
    allowed = {f.name for f in fields(cls)}
    kwargs = {}
    for key, value in d.items():
        if key == "variant":
            continue
        if key not in allowed:
            raise ValueError(f"model variant {variant!r} has no field {key!r}")
        if isinstance(value, list):
            value = tuple(tuple(v) if isinstance(v, list) else v for v in value)
        kwargs[key] = value
    return cls(**kwargs)

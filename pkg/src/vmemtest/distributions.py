"""Innovation laws: independent unit-mean Gamma marginals and copula
perturbations.

The null family fixes component ``j`` to a Gamma distribution with shape
and rate both equal to ``beta_j`` (mean exactly 1, variance ``1/beta_j``)
and couples the components with the independence copula.  Alternatives
keep the same marginals but couple them with a Gaussian or Clayton copula.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .rng import SeedLike, as_generator

__all__ = [
    "GammaMarginalNull",
    "CopulaSpec",
    "InnovationLaw",
    "INDEPENDENCE",
    "sample_innovations",
    "null_lt",
    "gamma_quantile",
]

# copula uniforms clipped away from {0,1} before the quantile transform;
# double-precision normal/exponential draws only reach these bounds with
# probability ~1e-300
_U_LO = 1e-300
_U_HI = 1.0 - 1e-16


@dataclass(frozen=True, eq=False)
class GammaMarginalNull:
    """Null marginal family: component j ~ Gamma(beta_j, beta_j)."""

    betas: np.ndarray

    def __post_init__(self) -> None:
        betas = np.ascontiguousarray(np.atleast_1d(self.betas), dtype=float)
        if betas.ndim != 1 or betas.size < 1:
            raise ValueError("betas must be a d-vector")
        if not np.all(np.isfinite(betas)) or np.any(betas <= 0.0):
            raise ValueError("betas must be finite and strictly positive")
        betas.flags.writeable = False
        object.__setattr__(self, "betas", betas)

    @property
    def d(self) -> int:
        return self.betas.size

    def laplace(self, u) -> float:
        """Joint Laplace transform prod_j (1 + u_j / beta_j)^(-beta_j)."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        if u.shape[-1] != self.d:
            raise ValueError(f"u must have dimension {self.d}")
        if np.any(u < 0.0):
            raise ValueError("Laplace transform argument must be non-negative")
        # exp(-beta*log1p(u/beta)) stays accurate for very large beta
        val = np.exp(-np.sum(self.betas * np.log1p(u / self.betas), axis=-1))
        return float(val) if val.ndim == 0 else val


@dataclass(frozen=True)
class CopulaSpec:
    """Dependence structure: independence, Gaussian(rho) or Clayton(rho).

    For the Gaussian copula ``rho`` is the off-diagonal correlation (in
    (-1, 1)); for the Clayton copula it is the positive theta parameter.
    Kendall's tau is ``(2/pi) arcsin(rho)`` and ``rho / (rho + 2)``
    respectively.
    """

    kind: str = "independence"
    rho: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("independence", "gaussian", "clayton"):
            raise ValueError(f"unknown copula kind {self.kind!r}")
        if self.kind == "gaussian" and not (-1.0 < self.rho < 1.0):
            raise ValueError("gaussian copula requires rho in (-1, 1)")
        if self.kind == "clayton" and not self.rho > 0.0:
            raise ValueError("clayton copula requires rho > 0")

    def kendall_tau(self) -> float:
        if self.kind == "independence":
            return 0.0
        if self.kind == "gaussian":
            return float(2.0 / np.pi * np.arcsin(self.rho))
        return float(self.rho / (self.rho + 2.0))


INDEPENDENCE = CopulaSpec("independence")


@dataclass(frozen=True, eq=False)
class InnovationLaw:
    """Gamma marginals coupled by a copula; the sampling distribution."""

    marginals: GammaMarginalNull
    copula: CopulaSpec = INDEPENDENCE

    @property
    def dim(self) -> int:
        return self.marginals.d

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw n i.i.d. innovation vectors.

        Under independence each column is drawn directly from its Gamma
        marginal.  The Gaussian copula draws correlated standard normals
        (equicorrelation rho), maps them through the normal CDF and then
        the Gamma quantile.  The Clayton copula uses the gamma-frailty
        construction V ~ Gamma(1/rho, 1), U_j = (1 + E_j / V)^(-1/rho)
        with E_j i.i.d. unit exponentials.
        """
        if n < 1:
            raise ValueError("sample size must be >= 1")
        betas = self.marginals.betas
        d = betas.size
        if self.copula.kind == "independence":
            return rng.gamma(shape=betas, scale=1.0 / betas, size=(n, d))
        if self.copula.kind == "gaussian":
            corr = np.full((d, d), self.copula.rho)
            np.fill_diagonal(corr, 1.0)
            chol = np.linalg.cholesky(corr)
            z = rng.standard_normal((n, d)) @ chol.T
            u = special.ndtr(z)
        else:  # clayton
            theta = self.copula.rho
            v = rng.gamma(shape=1.0 / theta, scale=1.0, size=n)
            e = rng.standard_exponential((n, d))
            u = np.exp(-np.log1p(e / v[:, None]) / theta)
        u = np.clip(u, _U_LO, _U_HI)
        return gamma_quantile(betas, u)


def sample_innovations(law: InnovationLaw, n: int, seed: SeedLike) -> np.ndarray:
    """Draw ``n`` i.i.d. rows from ``law``; deterministic given the seed."""
    return law.sample(n, as_generator(seed))


def null_lt(phi: GammaMarginalNull, u) -> float:
    """Laplace transform of the null law at ``u >= 0`` componentwise."""
    return phi.laplace(u)


def gamma_quantile(beta, p):
    """Inverse CDF of Gamma(shape=beta, rate=beta) at probability p.

    Broadcasts over arrays; ``p`` must lie strictly inside (0, 1).
    """
    beta = np.asarray(beta, dtype=float)
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        raise ValueError("quantile probability must be in the open interval (0, 1)")
    q = stats.gamma.ppf(p, a=beta, scale=1.0 / beta)
    return float(q) if q.ndim == 0 else q

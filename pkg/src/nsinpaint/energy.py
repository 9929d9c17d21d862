"""Transport residual, energy, and descent gradients.

For an Omega'-vector u' the residual is the elementwise expression

    F = (D2 u') * (D1 Lap u') - (D1 u') * (D2 Lap u')

which vanishes exactly when the smoothness Lap u is constant along the
level lines of u.  The energy is E = ||F||^2 / 2.

The plain (Euler-Lagrange) gradient g_EL is the vector that satisfies the
directional-derivative identity  d/dt E(u' + t Z h)|_0 = <h, g_EL>  for
every perturbation h supported on Omega (Z pads h with zeros on the fixed
ring).  Differentiating F and moving every difference operator onto h via
its transpose gives, with d_i = D_i u' and l_i = D_i Lap u':

    g_EL = R[ D2^T(F*l1) - D1^T(F*l2) + (D1 Lap)^T(F*d2) - (D2 Lap)^T(F*d1) ]

where R restricts an Omega'-vector to its Omega entries.  The smoothed
(Sobolev) gradient applies the resolvent power: g = (I - Lap_Omega)^{-k} g_EL.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch
from .operators import OperatorSet, PreconditionerFactorization

_METHOD_KS = {"el": 0, "h1": 1, "h2": 2, "h3": 3}


@dataclass(frozen=True)
class GradientKind:
    """Descent direction selector: k = 0 is plain Euler-Lagrange descent,
    k in 1..3 applies the resolvent (I - Lap)^{-k} as a smoother."""

    k: int

    def __post_init__(self):
        if self.k not in (0, 1, 2, 3):
            raise ValueError(f"k must be in 0..3, got {self.k}")

    @classmethod
    def euler_lagrange(cls) -> "GradientKind":
        return cls(0)

    @classmethod
    def sobolev(cls, k: int) -> "GradientKind":
        if k not in (1, 2, 3):
            raise ValueError(f"Sobolev order must be 1, 2 or 3, got {k}")
        return cls(k)

    @classmethod
    def from_method(cls, method: str) -> "GradientKind":
        try:
            return cls(_METHOD_KS[method])
        except KeyError:
            raise ValueError(f"unknown method {method!r}") from None

    @property
    def label(self) -> str:
        return "el" if self.k == 0 else f"h{self.k}"


@dataclass(frozen=True)
class EnergyState:
    """Residual, energy, and the four cached difference fields at one iterate."""

    d1: np.ndarray
    d2: np.ndarray
    l1: np.ndarray
    l2: np.ndarray
    residual: np.ndarray
    energy: float


def _check_u_prime(u_prime: np.ndarray, ops: OperatorSet) -> np.ndarray:
    u_prime = np.asarray(u_prime, dtype=np.float64)
    n = ops.domain.n_omega_prime
    if u_prime.shape != (n,):
        raise LengthMismatch(f"expected Omega' length {n}, got {u_prime.shape}")
    return u_prime


def compute_state(u_prime: np.ndarray, ops: OperatorSet) -> EnergyState:
    u_prime = _check_u_prime(u_prime, ops)
    d1 = ops.d1.matrix @ u_prime
    d2 = ops.d2.matrix @ u_prime
    l1 = ops.d1lap.matrix @ u_prime
    l2 = ops.d2lap.matrix @ u_prime
    f = d2 * l1 - d1 * l2
    return EnergyState(d1=d1, d2=d2, l1=l1, l2=l2, residual=f, energy=0.5 * float(f @ f))


def residual(u_prime: np.ndarray, ops: OperatorSet) -> np.ndarray:
    """F = (D2 u') * (D1 Lap u') - (D1 u') * (D2 Lap u') on Omega."""
    return compute_state(u_prime, ops).residual


def energy(u_prime: np.ndarray, ops: OperatorSet) -> float:
    """E = ||F||^2 / 2."""
    return compute_state(u_prime, ops).energy


def gradient_el_from_state(state: EnergyState, ops: OperatorSet) -> np.ndarray:
    f = state.residual
    lifted = (
        ops.d2.apply_adjoint(f * state.l1)
        - ops.d1.apply_adjoint(f * state.l2)
        + ops.d1lap.apply_adjoint(f * state.d2)
        - ops.d2lap.apply_adjoint(f * state.d1)
    )
    return lifted[ops.domain.omega_in_prime]


def gradient_el(u_prime: np.ndarray, ops: OperatorSet) -> np.ndarray:
    """Euler-Lagrange gradient on Omega (the L2 representation of E')."""
    return gradient_el_from_state(compute_state(u_prime, ops), ops)


def gradient(
    u_prime: np.ndarray,
    ops: OperatorSet,
    fact: PreconditionerFactorization | None,
    kind: GradientKind,
) -> np.ndarray:
    """Descent gradient of the requested kind at u'."""
    g = gradient_el(u_prime, ops)
    if kind.k == 0:
        return g
    if fact is None:
        raise ValueError("a preconditioner factorization is required for k >= 1")
    return fact.solve_k(g, kind.k)

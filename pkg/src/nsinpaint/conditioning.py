"""Condition-number diagnostics for the descent methods.

The relative condition number of the energy at an iterate x, measured in
the H^k metric <u, v>_{H^k} = <u, (I - Lap)^k v>, is

    kappa_k = ||g||_{H^k,*} * ||x||_{H^k} / E

with ||g||_{H^k,*} = sqrt(<g_EL, (I - Lap)^{-k} g_EL>) and
||x||_{H^k} = sqrt(<x, (I - Lap)^k x>).  k = 0 is the plain Euclidean
case.  An ``unrooted`` flag drops the square root on the gradient factor;
both variants are exposed because the rooted form is the norm-consistent
one while the un-rooted form is what some figure pipelines plot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ZeroEnergy
from .operators import PreconditionerFactorization


@dataclass(frozen=True)
class ConditionReport:
    """Per-iterate conditioning snapshot across all gradient kinds."""

    iter: int
    energy: float
    kappa_rel: dict[int, float]
    hk_grad_norm: dict[int, float]
    x_hk_norm: dict[int, float]


def hk_gradient_norm(g_el: np.ndarray, fact: PreconditionerFactorization, k: int) -> float:
    """sqrt(<g, (I - Lap)^{-k} g>); reduces to ||g|| at k = 0."""
    g_el = np.asarray(g_el, dtype=np.float64)
    if k == 0:
        return float(np.linalg.norm(g_el))
    smoothed = fact.solve_k(g_el, k)
    # SPD quadratic form; clip roundoff-negative values near zero.
    return math.sqrt(max(float(g_el @ smoothed), 0.0))


def hk_state_norm(u0: np.ndarray, fact: PreconditionerFactorization, k: int) -> float:
    """sqrt(<u0, (I - Lap)^k u0>); reduces to ||u0|| at k = 0."""
    u0 = np.asarray(u0, dtype=np.float64)
    if k == 0:
        return float(np.linalg.norm(u0))
    return math.sqrt(max(float(u0 @ fact.apply_power(u0, k)), 0.0))


def relative_condition(
    u0: np.ndarray,
    g_el: np.ndarray,
    fact: PreconditionerFactorization,
    k: int,
    energy: float,
    unrooted: bool = False,
) -> float:
    """Relative condition number at one iterate for gradient order k in 0..3."""
    if k not in (0, 1, 2, 3):
        raise ValueError(f"k must be in 0..3, got {k}")
    if not energy > 0.0:
        raise ZeroEnergy(f"relative condition number undefined at energy {energy}")
    grad_factor = hk_gradient_norm(g_el, fact, k)
    if unrooted:
        grad_factor = grad_factor * grad_factor
    return grad_factor * hk_state_norm(u0, fact, k) / energy


def condition_report(
    iteration: int,
    u0: np.ndarray,
    g_el: np.ndarray,
    fact: PreconditionerFactorization,
    energy: float,
    ks=(0, 1, 2, 3),
    unrooted: bool = False,
) -> ConditionReport:
    """Conditioning snapshot across gradient orders at one iterate."""
    grad_norms = {k: hk_gradient_norm(g_el, fact, k) for k in ks}
    state_norms = {k: hk_state_norm(u0, fact, k) for k in ks}
    kappas = {
        k: relative_condition(u0, g_el, fact, k, energy, unrooted=unrooted)
        for k in ks
    }
    return ConditionReport(
        iter=iteration,
        energy=float(energy),
        kappa_rel=kappas,
        hk_grad_norm=grad_norms,
        x_hk_norm=state_norms,
    )


def dirichlet_eigenvalue(p: int, q: int, n: int) -> float:
    """Eigenvalue of the negated five-point Laplacian on an n-by-n square
    with homogeneous Dirichlet data, for mode (p, q), 1-based."""
    s = math.pi / (2.0 * (n + 1))
    return 4.0 * math.sin(p * s) ** 2 + 4.0 * math.sin(q * s) ** 2


def dirichlet_eigenvector(p: int, q: int, n: int) -> np.ndarray:
    """Matching eigenvector sampled in the column-major natural ordering."""
    m = np.arange(1, n + 1)
    vi = np.sin(p * np.pi * m / (n + 1.0))
    vj = np.sin(q * np.pi * m / (n + 1.0))
    # position of local pixel (i, j) is j*n + i
    return np.outer(vj, vi).ravel()


def spectral_attenuation_check(fact: PreconditionerFactorization, k: int, n: int) -> float:
    """Max relative deviation of solve_k from the exact modal attenuation.

    Valid when the factorization was built on an n-by-n square region, so
    the closed-form Dirichlet eigenpairs apply: each mode must come back
    scaled by 1/(1 + lambda_pq)^k.
    """
    if n > 16:
        raise ValueError("spectral check is intended for n <= 16")
    if fact.dimension != n * n:
        raise ValueError(
            f"factorization dimension {fact.dimension} != n*n = {n * n}"
        )
    worst = 0.0
    for p in range(1, n + 1):
        for q in range(1, n + 1):
            v = dirichlet_eigenvector(p, q, n)
            expected = v / (1.0 + dirichlet_eigenvalue(p, q, n)) ** k
            got = fact.solve_k(v, k)
            dev = np.linalg.norm(got - expected) / np.linalg.norm(expected)
            worst = max(worst, float(dev))
    return worst

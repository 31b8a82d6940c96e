"""Hyperbolic quantities: heights, lambda-lengths, Lobachevsky function, volumes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import zeta

from .errors import CirclesNotDisjointError, InconsistentAnglesError
from .metric import DecoratedMetric

__all__ = [
    "HeightVector",
    "heights",
    "lambda_length",
    "hyperbolic_radius",
    "lobachevsky",
    "clausen2",
    "horoprism_volume",
    "face_volumes",
    "volume_angles",
]


@dataclass
class HeightVector:
    h: np.ndarray
    eps: np.ndarray  # 1 for hyperideal vertices (r > 0), 0 for ideal ones


def heights(metric: DecoratedMetric, u=None) -> HeightVector:
    """Heights ``h_i = -log(exp(u_i) r_i)``; ideal vertices use ``h_i = -u_i``."""
    r = np.asarray(metric.radii, dtype=float)
    u = np.zeros_like(r) if u is None else np.asarray(u, dtype=float)
    eps = (r > 0).astype(np.int64)
    h = -u.copy()
    pos = eps == 1
    h[pos] = -np.log(r[pos]) - u[pos]
    return HeightVector(h, eps)


def lambda_length(length, h_i, h_j, eps_i, eps_j):
    """Truncated hyperbolic length of an edge.

    Solves ``e^lam + eps_i eps_j e^-lam = l^2 e^(h_i+h_j) - eps_i e^(h_j-h_i)
    - eps_j e^(h_i-h_j)``.  Accepts scalars or arrays.
    """
    length = np.asarray(length, dtype=float)
    h_i = np.asarray(h_i, dtype=float)
    h_j = np.asarray(h_j, dtype=float)
    eps_i = np.asarray(eps_i)
    eps_j = np.asarray(eps_j)
    rhs = (
        length * length * np.exp(h_i + h_j)
        - eps_i * np.exp(h_j - h_i)
        - eps_j * np.exp(h_i - h_j)
    )
    both = (eps_i * eps_j) == 1
    bound = np.where(both, 2.0, 0.0)
    if np.any(~(rhs > bound)):
        raise CirclesNotDisjointError("lambda-length undefined: configuration not hyperideal")
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(both, np.arccosh(np.maximum(rhs, 2.0) / 2.0), np.log(rhs))
    return float(out) if out.ndim == 0 else out


def hyperbolic_radius(h, eps):
    """Hyperbolic radius of a vertex decoration from its height."""
    h = np.asarray(h, dtype=float)
    eps = np.asarray(eps)
    out = np.where(eps == 1, np.arcsinh(np.exp(h)), np.log(2.0) + h)
    return float(out) if out.ndim == 0 else out


# Cl2(t) = t - t log|t| + sum_n zeta(2n) / (n (2n+1)) t (t / 2pi)^(2n), |t| <= pi
_N_TERMS = 30
_n = np.arange(1, _N_TERMS + 1)
_COEFFS = zeta(2.0 * _n) / (_n * (2 * _n + 1))


def clausen2(t):
    """Clausen function ``Cl2(t) = -int_0^t log|2 sin(s/2)| ds``."""
    t = np.asarray(t, dtype=float)
    t = t - 2 * math.pi * np.round(t / (2 * math.pi))
    z = (t / (2 * math.pi)) ** 2
    series = np.zeros_like(t)
    for c in _COEFFS[::-1]:
        series = (series + c) * z
    abs_t = np.abs(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_term = np.where(abs_t > 0, t * np.log(np.where(abs_t > 0, abs_t, 1.0)), 0.0)
    out = t - log_term + t * series
    return float(out) if out.ndim == 0 else out


def lobachevsky(x):
    """Milnor's Lobachevsky function ``-int_0^x log|2 sin s| ds``."""
    return 0.5 * clausen2(2.0 * np.asarray(x, dtype=float))


def volume_angles(theta, alpha):
    """The angles entering the horoprism volume.

    ``theta[..., i]`` is the corner angle at vertex ``i`` and ``alpha[..., i]``
    the face-circle angle of the side opposite ``i``.  Returns arrays
    ``(gamma, gamma1, gamma2, mu, nu)`` each of shape ``theta.shape``.
    """
    theta = np.asarray(theta, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    a1 = alpha[..., [1, 2, 0]]  # side from vertex i back to i-1 (ki)
    a2 = alpha[..., [2, 0, 1]]  # side from i to i+1 (ij)
    gamma1 = 0.5 * (math.pi + a1 - a2 - theta)
    gamma2 = 0.5 * (math.pi - a1 + a2 - theta)
    mu = 0.5 * (math.pi + a1 + a2 - theta)
    nu = 0.5 * (math.pi - a1 - a2 - theta)
    return theta, gamma1, gamma2, mu, nu


def face_volumes(theta, alpha, tol: float = 1e-9) -> np.ndarray:
    """Volumes of the horoprisms over many triangles at once, shape ``theta.shape[:-1]``."""
    theta = np.asarray(theta, dtype=float)
    defect = np.abs(theta.sum(axis=-1) - math.pi)
    if np.any(defect > tol):
        raise InconsistentAnglesError(
            f"triangle angles miss pi by {float(np.max(defect)):.3g}"
        )
    total = sum(lobachevsky(a) for a in volume_angles(theta, alpha))
    return 0.5 * np.sum(total, axis=-1)


def horoprism_volume(theta, alpha) -> float:
    """Volume of the hyperideal horoprism over one decorated triangle.

    ``theta = (theta_1, theta_2, theta_3)`` are the triangle's angles and
    ``alpha = (alpha_23, alpha_31, alpha_12)`` the face-circle angles of the
    opposite sides.
    """
    return float(face_volumes(np.asarray(theta, dtype=float)[None], np.asarray(alpha)[None])[0])

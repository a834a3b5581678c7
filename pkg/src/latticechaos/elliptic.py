"""Jacobi elliptic functions and the complete elliptic integral K.

Self-contained AGM/Landen implementations for real arguments and
moduli k in [0, 1], which is all the resonance solutions need; the
ballistic branch with modulus > 1 is handled by callers through the
reciprocal-modulus form.  The amplitude function is returned unwrapped
(continuous and monotone in the argument for k < 1).
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "agm",
    "complete_elliptic_k",
    "jacobi_am",
    "jacobi_sn_cn_dn",
]

_MAX_LANDEN = 32


def _check_modulus(k: float, allow_one: bool) -> float:
    k = float(k)
    if not math.isfinite(k) or k < 0.0:
        raise ValueError(f"modulus must be finite and non-negative, got {k}")
    if k > 1.0 or (k == 1.0 and not allow_one):
        hi = "1" if allow_one else "1 (exclusive)"
        raise ValueError(
            f"modulus must be in [0, {hi}], got {k}; apply the "
            "reciprocal-modulus transformation for k > 1")
    return k


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of non-negative a, b."""
    if a < 0.0 or b < 0.0:
        raise ValueError("agm requires non-negative arguments")
    if a == 0.0 or b == 0.0:
        return 0.0
    for _ in range(_MAX_LANDEN):
        an = 0.5 * (a + b)
        bn = math.sqrt(a * b)
        a, b = an, bn
        if abs(a - b) <= 4.0 * np.finfo(float).eps * a:
            break
    return 0.5 * (a + b)


def complete_elliptic_k(k: float) -> float:
    """Complete elliptic integral K(k) = AGM(1, sqrt(1-k^2)) form.

    Defined for 0 <= k < 1; diverges logarithmically as k -> 1.
    """
    k = _check_modulus(k, allow_one=False)
    kp = math.sqrt((1.0 - k) * (1.0 + k))
    return math.pi / (2.0 * agm(1.0, kp))


def _landen_scale(k: float):
    """Descending Landen sequence (a_n, c_n/a_n ratios) for modulus k."""
    a = 1.0
    b = math.sqrt((1.0 - k) * (1.0 + k))
    ratios = []
    for _ in range(_MAX_LANDEN):
        c = 0.5 * (a - b)
        an = 0.5 * (a + b)
        bn = math.sqrt(a * b)
        a, b = an, bn
        ratios.append(c / an if an != 0.0 else 0.0)
        if c <= np.finfo(float).eps * an:
            break
    return a, ratios


def jacobi_am(u, k: float):
    """Jacobi amplitude am(u, k), continuous (unwrapped) in u.

    Scalar in, scalar out; array in, array out.  k must be in [0, 1];
    at k = 1 the amplitude is the Gudermannian function.
    """
    k = _check_modulus(k, allow_one=True)
    u_arr = np.asarray(u, dtype=float)
    scalar = u_arr.ndim == 0
    uu = np.atleast_1d(u_arr)

    if k == 0.0:
        phi = uu.copy()
    elif k == 1.0:
        phi = np.arcsin(np.tanh(uu))
    else:
        a_final, ratios = _landen_scale(k)
        n = len(ratios)
        phi = (2.0 ** n) * a_final * uu
        for ratio in reversed(ratios):
            phi = 0.5 * (phi + np.arcsin(ratio * np.sin(phi)))
    return float(phi[0]) if scalar else phi


def jacobi_sn_cn_dn(u, k: float):
    """Simultaneous (sn, cn, dn)(u, k) for modulus k in [0, 1].

    dn is recovered from the identity dn^2 = 1 - k^2 sn^2 (dn > 0 for
    real u), so all three satisfy the defining identities to roundoff.
    """
    k = _check_modulus(k, allow_one=True)
    phi = jacobi_am(u, k)
    sn = np.sin(phi)
    cn = np.cos(phi)
    dn = np.sqrt(np.clip(1.0 - (k * sn) ** 2, 0.0, None))
    return sn, cn, dn

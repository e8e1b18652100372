"""Independent reference computations used by the tests.

Nothing here imports the package under test; each function evaluates a
closed-form series or brute-force expansion directly.
"""

from __future__ import annotations

import cmath
import math
from math import comb, factorial, sqrt


def poisson_tail(mu: float, N: int) -> float:
    """sum_{n > N} e^-mu mu^n / n!, summed term by term until negligible."""
    if mu == 0:
        return 0.0
    total = 0.0
    n = N + 1
    while True:
        term = math.exp(-mu + n * math.log(mu) - math.lgamma(n + 1))
        total += term
        if n > mu and term < 1e-30 * max(total, 1e-300):
            return total
        n += 1


def cutoff_by_tail(mu: float, tol: float = 1e-12, padding: int = 20) -> int:
    N = 0
    while poisson_tail(mu, N) >= tol:
        N += 1
    return N + padding


def q(alpha: complex, n: int) -> complex:
    if alpha == 0:
        return 1.0 if n == 0 else 0.0
    return cmath.exp(-abs(alpha) ** 2 / 2 + n * cmath.log(alpha) - math.lgamma(n + 1) / 2)


def single_bs_output(alpha, t, r, phi_t=0.0, phi_r=math.pi, nmax=30) -> dict:
    """Joint output amplitudes {(n3, n4): c} from the explicit A1/A2 double sum."""
    out: dict = {}
    for n in range(nmax + 1):
        qn = q(alpha, n)
        for k in range(n + 1):
            pref = qn * sqrt(factorial(n)) * (-1) ** k / (factorial(k) * factorial(n - k))
            A1 = t ** (n - k) * r ** (k + 1) * cmath.exp(1j * ((n - k) * phi_t - (k - 1) * phi_r))
            A2 = t ** (n - k + 1) * r**k * cmath.exp(1j * ((n - k - 1) * phi_t - k * phi_r))
            key1 = (n - k + 1, k)
            key2 = (n - k, k + 1)
            out[key1] = out.get(key1, 0) + pref * A1 * sqrt(factorial(n - k + 1) * factorial(k))
            out[key2] = out.get(key2, 0) + pref * A2 * sqrt(factorial(n - k) * factorial(k + 1))
    return out


def zero_count_amplitudes(alpha, R, nmax) -> list:
    """Unnormalized mode-4 amplitudes after zero counts: q_n |t| |r|^n sqrt(n+1) on |n+1>."""
    t, r = sqrt(1 - R), sqrt(R)
    amps = [0j] * (nmax + 2)
    for n in range(nmax + 1):
        amps[n + 1] = q(alpha, n) * t * r**n * sqrt(n + 1)
    return amps


def p0_series(A: float, R: float, nterms: int = 400) -> float:
    """Partial sum of e^-A A^n/n! (1-R) R^n (n+1)."""
    total = 0.0
    for n in range(nterms):
        if A == 0 and n > 0:
            break
        log_pn = -A + (n * math.log(A) if A > 0 else 0.0) - math.lgamma(n + 1)
        total += math.exp(log_pn) * (1 - R) * R**n * (n + 1)
    return total


def second_stage_amplitudes(alpha, R1, R2, nmax) -> list:
    """q_n |r1|^(n-1) (n|t1|^2 - |r1|^2) |t2| |r2|^n sqrt(n+1) on |n+1>."""
    t1sq, r1, t2, r2 = 1 - R1, sqrt(R1), sqrt(1 - R2), sqrt(R2)
    amps = [0j] * (nmax + 2)
    for n in range(nmax + 1):
        amps[n + 1] = q(alpha, n) * r1 ** (n - 1) * (n * t1sq - R1) * t2 * r2**n * sqrt(n + 1)
    return amps


def expand_beamsplitter(c: dict, u) -> dict:
    """Brute-force binomial expansion of sum c_jk a1+^j a2+^k / sqrt(j!k!) |00>.

    ``u`` is the 2x2 mode matrix with a1+ = u00 a3+ + u01 a4+, a2+ = u10 a3+ + u11 a4+.
    """
    out: dict = {}
    for (j, k), cjk in c.items():
        norm = cjk / sqrt(factorial(j) * factorial(k))
        for s in range(j + 1):
            for m in range(k + 1):
                coef = (
                    comb(j, s) * u[0][0] ** s * u[0][1] ** (j - s)
                    * comb(k, m) * u[1][0] ** m * u[1][1] ** (k - m)
                )
                p3, p4 = s + m, (j - s) + (k - m)
                amp = norm * coef * sqrt(factorial(p3) * factorial(p4))
                out[(p3, p4)] = out.get((p3, p4), 0) + amp
    return out

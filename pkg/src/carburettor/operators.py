"""Ladder operators and the two-mode beamsplitter on truncated Fock space."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .fock import PureState, TwoModeState


# ---------------------------------------------------------------------------
# single-mode ladder operators
# ---------------------------------------------------------------------------


def bare_raise(s: PureState) -> PureState:
    """Shift every amplitude up one rung, ``E+|n> = |n+1>``.

    The cutoff grows by one so no amplitude is lost and the norm is
    preserved exactly.
    """
    return PureState(np.concatenate(([0.0], s.amps)))


def bare_lower(s: PureState) -> PureState:
    """Shift every amplitude down one rung, discarding the vacuum amplitude.

    The cutoff shrinks by one (never below zero). Lowering the vacuum gives
    the zero vector.
    """
    if s.cutoff == 0:
        return PureState(np.zeros(1))
    return PureState(s.amps[1:])


def std_raise(s: PureState) -> PureState:
    """Apply the creation operator; the result is left unnormalized."""
    n = np.arange(s.cutoff + 1)
    return PureState(np.concatenate(([0.0], np.sqrt(n + 1) * s.amps)))


def std_lower(s: PureState) -> PureState:
    """Apply the annihilation operator; the result is left unnormalized."""
    if s.cutoff == 0:
        return PureState(np.zeros(1))
    n = np.arange(1, s.cutoff + 1)
    return PureState(np.sqrt(n) * s.amps[1:])


def tensor(a: PureState, b: PureState) -> TwoModeState:
    return TwoModeState(np.outer(a.amps, b.amps), a.cutoff + b.cutoff)


# ---------------------------------------------------------------------------
# beamsplitter
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BeamsplitterParams:
    """Lossless beamsplitter.

    The input creation operators are expressed through the output ones as::

        a1+ =  |t| e^{i phi_t} a3+  -  |r| e^{-i phi_r} a4+
        a2+ =  |r| e^{i phi_r} a3+  +  |t| e^{-i phi_t} a4+

    The default phases ``phi_t = 0, phi_r = pi`` make the reflected coherent
    amplitude and the transmitted photon add with the same sign in mode 4.
    """

    t_mag: float
    r_mag: float
    phi_t: float = 0.0
    phi_r: float = math.pi

    def __post_init__(self):
        for name in ("t_mag", "r_mag"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if abs(self.t_mag**2 + self.r_mag**2 - 1.0) > 1e-12:
            raise ValueError(
                f"|t|^2 + |r|^2 must equal 1, got {self.t_mag**2 + self.r_mag**2!r}"
            )

    @classmethod
    def from_reflectivity(
        cls, R: float, phi_t: float = 0.0, phi_r: float = math.pi
    ) -> BeamsplitterParams:
        """Build from the reflection probability ``R = |r|^2``."""
        if not 0.0 <= R <= 1.0:
            raise ValueError(f"reflection probability must lie in [0, 1], got {R}")
        return cls(math.sqrt(1.0 - R), math.sqrt(R), phi_t, phi_r)

    @property
    def reflectivity(self) -> float:
        return self.r_mag**2

    def mode_matrix(self) -> np.ndarray:
        """2x2 matrix ``u`` with ``(a1+, a2+) = u @ (a3+, a4+)``."""
        t, r = self.t_mag, self.r_mag
        et, er = np.exp(1j * self.phi_t), np.exp(1j * self.phi_r)
        return np.array([[t * et, -r / er], [r * er, t / et]])

    def inverse(self) -> BeamsplitterParams:
        """Parameters whose mode matrix is the adjoint of this one."""
        return BeamsplitterParams(
            self.t_mag, self.r_mag, -self.phi_t, math.remainder(self.phi_r + math.pi, 2 * math.pi)
        )


@numba.njit(cache=True)
def _beamsplitter_kernel(c, nmax, u11, u12, u21, u22, out):
    # Builds the image of every input column |j,k> with c[j,k] in the support
    # rectangle, one total-photon-number block at a time, using
    # |j,k> = a1+ |j-1,k> / sqrt(j)   (or a2+ |0,k-1> / sqrt(k) when j == 0)
    # and the substitution a1+ -> u11 a3+ + u12 a4+, a2+ -> u21 a3+ + u22 a4+.
    # prev[p, k] holds <p, M-1-p| U |M-1-k, k>.
    J = c.shape[0] - 1
    K = c.shape[1] - 1
    sq = np.sqrt(np.arange(nmax + 2).astype(np.float64))
    prev = np.zeros((nmax + 1, K + 1), np.complex128)
    cur = np.zeros((nmax + 1, K + 1), np.complex128)
    prev[0, 0] = 1.0
    out[0, 0] = c[0, 0]
    for M in range(1, nmax + 1):
        klo = max(0, M - J)
        khi = min(M, K)
        for k in range(klo, khi + 1):
            j = M - k
            for p in range(M + 1):
                cur[p, k] = 0.0
            if j >= 1:
                for p in range(M):
                    v = prev[p, k] / sq[j]
                    cur[p + 1, k] += u11 * sq[p + 1] * v
                    cur[p, k] += u12 * sq[M - p] * v
            else:
                for p in range(M):
                    v = prev[p, k - 1] / sq[k]
                    cur[p + 1, k] += u21 * sq[p + 1] * v
                    cur[p, k] += u22 * sq[M - p] * v
            amp = c[j, k]
            if amp != 0:
                for p in range(M + 1):
                    out[p, M - p] += cur[p, k] * amp
        prev, cur = cur, prev


def _support_extent(amps: np.ndarray) -> tuple[int, int, int]:
    """Largest occupied j, k and j + k; all -1 for the zero state."""
    j, k = np.nonzero(amps)
    if j.size == 0:
        return -1, -1, -1
    return int(j.max()), int(k.max()), int((j + k).max())


def beamsplitter(
    s: TwoModeState, p: BeamsplitterParams, cutoff_total: int | None = None
) -> TwoModeState:
    """Apply the beamsplitter unitary.

    The unitary is block diagonal in total photon number; each block is
    generated on the fly from the single-photon mode matrix, restricted to
    the input columns that carry amplitude.

    Args:
        s: input state, first index mode 1, second index mode 2.
        p: beamsplitter parameters.
        cutoff_total: total-photon cutoff of the output (both modes get this
            cutoff). Defaults to ``s.cutoff_total``.

    Returns:
        Output state indexed ``(mode 3, mode 4)``.
    """
    if cutoff_total is None:
        cutoff_total = s.cutoff_total
    jmax, kmax, nmax = _support_extent(s.amps)
    if nmax > cutoff_total:
        raise ValueError(f"output cutoff {cutoff_total} cannot hold input photon number {nmax}")
    out = np.zeros((cutoff_total + 1, cutoff_total + 1), dtype=np.complex128)
    if jmax >= 0:
        u = p.mode_matrix()
        c = np.ascontiguousarray(s.amps[: jmax + 1, : kmax + 1])
        _beamsplitter_kernel(c, nmax, u[0, 0], u[0, 1], u[1, 0], u[1, 1], out)
    return TwoModeState(out, cutoff_total)

"""Truncated photon-number-basis states.

States are stored as complex amplitude vectors over ``|0>, ..., |cutoff>``.
Sub-normalized vectors are legal: a conditional branch carries its
heralding probability in its squared norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammainc, gammaln

# Truncation that throws away this much probability is refused outright.
MAX_TAIL_LOSS = 1e-6


class EmptyStateError(ValueError):
    """Raised when a zero-norm vector is used where a physical state is required."""


@dataclass(frozen=True)
class CutoffPolicy:
    """How aggressively to truncate a Poisson-distributed photon number."""

    tail_tol: float = 1e-12
    padding: int = 20

    def __post_init__(self):
        if not 0.0 < self.tail_tol < 1.0:
            raise ValueError(f"tail_tol must lie in (0, 1), got {self.tail_tol}")
        if self.padding < 0:
            raise ValueError(f"padding must be >= 0, got {self.padding}")


DEFAULT_POLICY = CutoffPolicy()


def poisson_tail(mean_photons: float, n: int) -> float:
    """Probability that a Poisson(mean_photons) variable exceeds ``n``."""
    if mean_photons == 0.0:
        return 0.0
    return float(gammainc(n + 1, mean_photons))


def choose_cutoff(mean_photons: float, policy: CutoffPolicy = DEFAULT_POLICY) -> int:
    """Smallest ``N`` whose Poisson tail is below ``policy.tail_tol``, plus padding."""
    if not math.isfinite(mean_photons) or mean_photons < 0:
        raise ValueError(f"mean_photons must be finite and >= 0, got {mean_photons}")
    start = int(math.floor(mean_photons))
    width = int(20 * math.sqrt(mean_photons)) + 50
    while True:
        ns = np.arange(start, start + width)
        tails = gammainc(ns + 1, mean_photons) if mean_photons > 0 else np.zeros(width)
        below = np.flatnonzero(tails < policy.tail_tol)
        if below.size:
            return int(ns[below[0]]) + policy.padding
        start += width


def _as_amplitudes(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128, copy=True)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-D amplitude array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("amplitudes must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PureState:
    """Single-mode pure state (possibly unnormalized) in a truncated Fock basis."""

    amps: np.ndarray

    def __post_init__(self):
        amps = _as_amplitudes(self.amps, 1)
        if amps.size == 0:
            raise ValueError("a state needs at least the vacuum amplitude")
        object.__setattr__(self, "amps", amps)

    @property
    def cutoff(self) -> int:
        return self.amps.size - 1

    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def normalized(self) -> PureState:
        peak = float(np.max(np.abs(self.amps)))
        if peak == 0.0:
            raise EmptyStateError("cannot normalize the zero vector")
        # rescale first: branches can be tiny enough for the squared norm to underflow
        v = self.amps / peak
        return PureState(v / np.linalg.norm(v))

    def padded(self, cutoff: int) -> PureState:
        """Zero-pad up to ``cutoff``. Never truncates."""
        if cutoff < self.cutoff:
            raise ValueError(f"cannot pad cutoff {self.cutoff} down to {cutoff}")
        return PureState(np.pad(self.amps, (0, cutoff - self.cutoff)))

    def __len__(self) -> int:
        return self.amps.size


@dataclass(frozen=True, eq=False)
class TwoModeState:
    """Joint two-mode pure state with amplitudes ``amps[j, k]`` on ``|j>|k>``.

    ``cutoff_total`` bounds the total photon number ``j + k``; amplitudes
    outside that triangle must vanish.
    """

    amps: np.ndarray
    cutoff_total: int = field(default=-1)

    def __post_init__(self):
        amps = _as_amplitudes(self.amps, 2)
        total = self.cutoff_total
        if total < 0:
            total = amps.shape[0] + amps.shape[1] - 2
        j, k = np.indices(amps.shape)
        if np.any(amps[j + k > total] != 0):
            raise ValueError(f"amplitudes found above total photon number {total}")
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "cutoff_total", int(total))

    @property
    def cutoffs(self) -> tuple[int, int]:
        return self.amps.shape[0] - 1, self.amps.shape[1] - 1

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))


def coherent_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    """``exp(-|a|^2/2) a^n / sqrt(n!)`` for n = 0..cutoff, evaluated in log space."""
    alpha = complex(alpha)
    n = np.arange(cutoff + 1)
    if alpha == 0:
        out = np.zeros(cutoff + 1, dtype=np.complex128)
        out[0] = 1.0
        return out
    mag = np.exp(-0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1))
    return mag * np.exp(1j * n * np.angle(alpha))


def make_coherent(
    alpha: complex, cutoff: int | None = None, policy: CutoffPolicy = DEFAULT_POLICY
) -> PureState:
    """Coherent state ``|alpha>`` truncated at ``cutoff``.

    If ``cutoff`` is omitted it is chosen from ``policy``. A cutoff that
    discards ``MAX_TAIL_LOSS`` or more of the probability is rejected.
    """
    mean = abs(complex(alpha)) ** 2
    if cutoff is None:
        cutoff = choose_cutoff(mean, policy)
    if cutoff < 0:
        raise ValueError(f"cutoff must be >= 0, got {cutoff}")
    tail = poisson_tail(mean, cutoff)
    if tail >= MAX_TAIL_LOSS:
        raise ValueError(
            f"cutoff {cutoff} discards {tail:.3g} of |alpha|^2={mean:g}; "
            f"use at least {choose_cutoff(mean, policy)}"
        )
    return PureState(coherent_amplitudes(alpha, cutoff))


def make_fock(n: int, cutoff: int) -> PureState:
    if not 0 <= n <= cutoff:
        raise ValueError(f"need 0 <= n <= cutoff, got n={n}, cutoff={cutoff}")
    amps = np.zeros(cutoff + 1, dtype=np.complex128)
    amps[n] = 1.0
    return PureState(amps)


def _common_cutoff(a: PureState, b: PureState) -> tuple[np.ndarray, np.ndarray]:
    size = max(len(a), len(b))
    return np.pad(a.amps, (0, size - len(a))), np.pad(b.amps, (0, size - len(b)))


def overlap(a: PureState, b: PureState) -> complex:
    """Inner product ``<a|b>``, zero-padding the shorter vector."""
    va, vb = _common_cutoff(a, b)
    return complex(np.vdot(va, vb))


def fidelity(a: PureState, b: PureState) -> float:
    """Pure-state fidelity ``|<a|b>|^2 / (|a|^2 |b|^2)``."""
    na, nb = a.norm_sq(), b.norm_sq()
    if na == 0.0 or nb == 0.0:
        raise EmptyStateError("fidelity is undefined for a zero-norm state")
    return abs(overlap(a, b)) ** 2 / (na * nb)


def photon_distribution(s: PureState) -> np.ndarray:
    n2 = s.norm_sq()
    if n2 == 0.0:
        raise EmptyStateError("photon distribution of the zero vector")
    return np.abs(s.amps) ** 2 / n2

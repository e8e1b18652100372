"""Photodetection on one mode of a two-mode state.

An ideal detector projects the watched mode onto a photon number. An
inefficient detector of efficiency ``eta`` registers ``m`` counts from
``k`` incident photons with binomial probability
``C(k, m) eta^m (1 - eta)^(k - m)``; for ``m = 0`` this is the normally
ordered ``:exp(-eta a+ a):``. Because that POVM is diagonal in the watched
mode's photon number, the conditional output is an exact mixture of the
pure states obtained by projecting onto each ``k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import comb

from .fock import EmptyStateError, PureState, TwoModeState, fidelity


@dataclass(frozen=True)
class DetectorModel:
    eta: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"detector efficiency must lie in [0, 1], got {self.eta}")

    def count_weights(self, m: int, kmax: int) -> np.ndarray:
        """``P(m counts | k photons)`` for k = 0..kmax."""
        k = np.arange(kmax + 1)
        with np.errstate(invalid="ignore"):
            w = comb(k, m) * self.eta**m * (1.0 - self.eta) ** np.maximum(k - m, 0)
        w[k < m] = 0.0
        return w


PERFECT = DetectorModel(1.0)


@dataclass(frozen=True, eq=False)
class BranchEnsemble:
    """A classical mixture of normalized pure states."""

    branches: tuple[tuple[float, PureState], ...]

    def __post_init__(self):
        if not self.branches:
            raise ValueError("an ensemble needs at least one branch")
        total = math.fsum(w for w, _ in self.branches)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"branch weights sum to {total!r}, not 1")
        for w, s in self.branches:
            if w < 0:
                raise ValueError(f"negative branch weight {w}")
            if abs(s.norm_sq() - 1.0) > 1e-12:
                raise ValueError("branch states must be normalized")
        object.__setattr__(self, "branches", tuple(self.branches))

    @classmethod
    def from_unnormalized(cls, pairs: Sequence[tuple[float, PureState]]) -> BranchEnsemble:
        """Build from positive weights that need not sum to one."""
        pairs = [(w, s) for w, s in pairs if w > 0]
        total = math.fsum(w for w, _ in pairs)
        if total == 0:
            raise EmptyStateError("every branch has zero weight")
        return cls(tuple((w / total, s.normalized()) for w, s in pairs))

    @classmethod
    def pure(cls, s: PureState) -> BranchEnsemble:
        return cls(((1.0, s.normalized()),))

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.branches])

    @property
    def cutoff(self) -> int:
        return max(s.cutoff for _, s in self.branches)

    def photon_distribution(self) -> np.ndarray:
        size = self.cutoff + 1
        dist = np.zeros(size)
        for w, s in self.branches:
            dist[: len(s)] += w * np.abs(s.amps) ** 2
        return dist

    def __len__(self) -> int:
        return len(self.branches)


class Herald(NamedTuple):
    """Ideal-detector outcome; ``state`` is None when the event is impossible."""

    prob: float
    state: PureState | None

    @property
    def heralded(self) -> bool:
        return self.state is not None


class EnsembleHerald(NamedTuple):
    """Inefficient-detector outcome; ``ensemble`` is None when impossible."""

    prob: float
    ensemble: BranchEnsemble | None

    @property
    def heralded(self) -> bool:
        return self.ensemble is not None


def _check_mode(watched: int) -> None:
    if watched not in (0, 1):
        raise ValueError(f"watched mode must be 0 or 1, got {watched!r}")


def counts_slice(s: TwoModeState, watched: int, m: int) -> PureState:
    """Unnormalized state of the other mode given ``m`` photons in ``watched``."""
    _check_mode(watched)
    if m < 0:
        raise ValueError(f"photon number must be >= 0, got {m}")
    amps = s.amps if watched == 0 else s.amps.T
    if m >= amps.shape[0]:
        return PureState(np.zeros(amps.shape[1]))
    return PureState(amps[m])


def watched_distribution(s: TwoModeState, watched: int) -> np.ndarray:
    """Photon-number distribution of the watched mode (normalized by the state norm)."""
    _check_mode(watched)
    n2 = s.norm_sq()
    if n2 == 0:
        raise EmptyStateError("cannot measure the zero vector")
    return np.sum(np.abs(s.amps) ** 2, axis=1 - watched) / n2


def project_counts(s: TwoModeState, watched: int, m: int) -> Herald:
    """Condition on exactly ``m`` photons in ``watched`` with an ideal detector."""
    n2 = s.norm_sq()
    if n2 == 0:
        raise EmptyStateError("cannot measure the zero vector")
    branch = counts_slice(s, watched, m)
    b2 = branch.norm_sq()
    if b2 == 0:
        return Herald(0.0, None)
    return Herald(b2 / n2, branch.normalized())


def condition_counts_inefficient(
    s: TwoModeState, watched: int, det: DetectorModel, m: int
) -> EnsembleHerald:
    """Condition on ``m`` counts from a detector of efficiency ``det.eta``.

    Returns the total probability of the count and the mixture over the true
    photon number ``k >= m`` that produced it.
    """
    p_k = watched_distribution(s, watched)
    weights = det.count_weights(m, p_k.size - 1) * p_k
    prob = math.fsum(weights)
    if prob == 0:
        return EnsembleHerald(0.0, None)
    pairs = [(w, counts_slice(s, watched, k)) for k, w in enumerate(weights) if w > 0]
    return EnsembleHerald(prob, BranchEnsemble.from_unnormalized(pairs))


def condition_zero_counts_inefficient(
    s: TwoModeState, watched: int, det: DetectorModel
) -> EnsembleHerald:
    return condition_counts_inefficient(s, watched, det, 0)


def ensemble_fidelity(e: BranchEnsemble, target: PureState) -> float:
    """Fidelity of a mixture with a pure target, ``sum_i w_i |<psi_i|target>|^2``."""
    return math.fsum(w * fidelity(s, target) for w, s in e.branches)

"""Beamsplitter photon-addition schemes built on the Fock simulator.

The basic scheme mixes a coherent state (mode 1) with a single photon
(mode 2) and accepts when the detector on mode 3 stays silent; the kept
output in mode 4 approximates the bare raising operator applied to the
coherent state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fock import (
    DEFAULT_POLICY,
    PureState,
    choose_cutoff,
    fidelity,
    make_coherent,
    make_fock,
)
from .measurement import (
    BranchEnsemble,
    DetectorModel,
    Herald,
    condition_counts_inefficient,
    counts_slice,
    ensemble_fidelity,
    project_counts,
)
from .operators import BeamsplitterParams, bare_raise, beamsplitter, tensor

DETECTOR_MODE = 0  # mode 3 in the beamsplitter output
OUTPUT_MODE = 1  # mode 4


@dataclass(frozen=True, eq=False)
class SingleBsOutcome:
    """Result of one heralded photon-addition attempt.

    ``output`` is None when the zero-count event is impossible; the
    fidelity is then reported as 0.
    """

    R: float
    eta: float
    p_success: float
    fidelity_vs_bare: float
    output: BranchEnsemble | None

    @property
    def heralded(self) -> bool:
        return self.output is not None


@dataclass(frozen=True, eq=False)
class CascadeOutcome:
    """Two-stage feedforward scheme.

    Stage 1 accepts on zero counts at detector 1. On exactly one count the
    failed state is sent through a second beamsplitter with a fresh photon
    and accepted on zero counts at detector 2. ``output`` is the mixture of
    all accepted states.
    """

    P1_0: float
    F1: float
    P1_1: float
    P2_0: float
    F2: float
    F_mean: float
    p_total: float
    output: BranchEnsemble | None = None


@dataclass(frozen=True)
class CharacterizationPoint:
    alpha: float
    R: float
    p_zero_counts: float


def input_cutoff(alpha: complex) -> int:
    return choose_cutoff(abs(complex(alpha)) ** 2, DEFAULT_POLICY)


def bare_target(alpha: complex, cutoff: int | None = None) -> PureState:
    """Normalized ``E+|alpha>`` on ``cutoff + 1`` levels."""
    if cutoff is None:
        cutoff = input_cutoff(alpha)
    return bare_raise(make_coherent(alpha, cutoff)).normalized()


def _check_prob(name: str, x: float) -> None:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {x}")


def _single_bs_joint(alpha: complex, R: float, cutoff: int):
    photon = make_fock(1, 1)
    state = tensor(make_coherent(alpha, cutoff), photon)
    return beamsplitter(state, BeamsplitterParams.from_reflectivity(R))


def run_single_bs(
    alpha: complex, R: float, eta: float = 1.0, cutoff: int | None = None
) -> SingleBsOutcome:
    """Simulate the single-beamsplitter scheme at reflection probability ``R``."""
    _check_prob("R", R)
    _check_prob("eta", eta)
    if cutoff is None:
        cutoff = input_cutoff(alpha)
    joint = _single_bs_joint(alpha, R, cutoff)
    prob, ens = condition_counts_inefficient(joint, DETECTOR_MODE, DetectorModel(eta), 0)
    fid = 0.0 if ens is None else ensemble_fidelity(ens, bare_target(alpha, cutoff))
    return SingleBsOutcome(R, eta, prob, fid, ens)


def single_bs_metrics(
    alpha: complex, R: float, eta: float = 1.0, cutoff: int | None = None
) -> tuple[float, float]:
    """``(p_success, fidelity_vs_bare)`` of :func:`run_single_bs` without building the ensemble.

    Used as the optimizer objective; agrees with :func:`run_single_bs` to
    rounding.
    """
    _check_prob("R", R)
    _check_prob("eta", eta)
    if cutoff is None:
        cutoff = input_cutoff(alpha)
    amps = _single_bs_joint(alpha, R, cutoff).amps
    target = bare_target(alpha, cutoff).padded(amps.shape[1] - 1).amps
    rows = np.sum(np.abs(amps) ** 2, axis=1)
    w = DetectorModel(eta).count_weights(0, rows.size - 1) * rows
    prob = math.fsum(w)
    if prob == 0:
        return 0.0, 0.0
    keep = w > 0
    overlaps = np.abs(amps[keep] @ target.conj()) ** 2 / rows[keep]
    return prob, math.fsum(w[keep] * overlaps) / prob


def closed_form_p0(alpha_sq: float, R: float) -> float:
    """Zero-count probability for a perfect detector, summed in closed form."""
    T = 1.0 - R
    return T * math.exp(-alpha_sq * T) * (1.0 + alpha_sq * R)


def closed_form_p0_inefficient(alpha_sq: float, R: float, eta: float) -> float:
    """Zero-count probability with detector efficiency ``eta``.

    The mode-3 output is ``(-r a3+ + t a4+)|t alpha>|r alpha>``; taking the
    expectation of ``(1 - eta)^n3`` gives
    ``exp(-eta T A) [T + R (1 - eta) + eta^2 R T A]`` with ``T = 1 - R``.
    Reduces to :func:`closed_form_p0` at ``eta = 1``.
    """
    T = 1.0 - R
    return math.exp(-eta * T * alpha_sq) * (T + R * (1.0 - eta) + eta**2 * R * T * alpha_sq)


def optimal_R(alpha_sq: float) -> float:
    """Reflection probability maximizing :func:`closed_form_p0`.

    For ``alpha_sq <= 0.5`` the optimum sits at ``R = 0``.
    """
    if alpha_sq <= 0.5:
        return 0.0
    A = alpha_sq
    R = (A - 3.0 + math.sqrt(A * A + 2.0 * A + 5.0)) / (2.0 * A)
    return min(max(R, 0.0), 1.0)


def failed_branch(alpha: complex, R: float, cutoff: int | None = None) -> Herald:
    """Output conditioned on exactly one count at an ideal detector."""
    _check_prob("R", R)
    if cutoff is None:
        cutoff = input_cutoff(alpha)
    return project_counts(_single_bs_joint(alpha, R, cutoff), DETECTOR_MODE, 1)


def hole_position(dist: Sequence[float]) -> int | None:
    """Photon number of the deepest strict interior local minimum, if any."""
    p = np.asarray(dist, dtype=float)
    inner = np.flatnonzero((p[1:-1] < p[:-2]) & (p[1:-1] < p[2:])) + 1
    if inner.size == 0:
        return None
    return int(inner[np.argmin(p[inner])])


def _stage_two(failed: PureState, R2: float, det: DetectorModel):
    joint = beamsplitter(tensor(failed, make_fock(1, 1)), BeamsplitterParams.from_reflectivity(R2))
    return condition_counts_inefficient(joint, DETECTOR_MODE, det, 0)


def run_cascade(alpha: complex, R1: float, R2: float, eta: float = 1.0) -> CascadeOutcome:
    """Simulate the two-beamsplitter correction scheme.

    With ``eta < 1`` the one-count herald at detector 1 mixes every true
    photon number ``k >= 1`` weighted by the chance that exactly one of the
    ``k`` photons was counted; each such branch is fed to stage 2
    separately.
    """
    _check_prob("R1", R1)
    _check_prob("R2", R2)
    _check_prob("eta", eta)
    det = DetectorModel(eta)
    cutoff = input_cutoff(alpha)
    target = bare_target(alpha, cutoff)
    joint = _single_bs_joint(alpha, R1, cutoff)

    p1_0, ens1 = condition_counts_inefficient(joint, DETECTOR_MODE, det, 0)
    f1 = 0.0 if ens1 is None else ensemble_fidelity(ens1, target)
    p1_1, failed = condition_counts_inefficient(joint, DETECTOR_MODE, det, 1)

    accepted: list[tuple[float, PureState]] = []
    if ens1 is not None:
        accepted += [(p1_0 * w, s) for w, s in ens1.branches]

    p2_0 = 0.0
    stage2: list[tuple[float, PureState]] = []
    if failed is not None:
        for w, s in failed.branches:
            prob, ens2 = _stage_two(s, R2, det)
            if ens2 is not None:
                p2_0 += w * prob
                stage2 += [(w * prob * w2, s2) for w2, s2 in ens2.branches]
    f2 = 0.0
    if stage2:
        f2 = ensemble_fidelity(BranchEnsemble.from_unnormalized(stage2), target)
        accepted += [(p1_1 * w, s) for w, s in stage2]

    p_total = p1_0 + p1_1 * p2_0
    if p_total > 0:
        f_mean = (p1_0 * f1 + p1_1 * p2_0 * f2) / p_total
        output = BranchEnsemble.from_unnormalized(accepted)
    else:
        f_mean, output = 0.0, None
    return CascadeOutcome(p1_0, f1, p1_1, p2_0, f2, f_mean, p_total, output)


def cascade_second_stage_state(alpha: complex, R1: float, R2: float) -> PureState:
    """Unnormalized accepted stage-2 state for ideal detectors.

    Its squared norm is the joint probability of one count at detector 1
    followed by none at detector 2.
    """
    cutoff = input_cutoff(alpha)
    joint = _single_bs_joint(alpha, R1, cutoff)
    failed = counts_slice(joint, DETECTOR_MODE, 1)
    joint2 = beamsplitter(tensor(failed, make_fock(1, 1)), BeamsplitterParams.from_reflectivity(R2))
    return counts_slice(joint2, DETECTOR_MODE, 0)


def escher_stage(n: int) -> tuple[float, float]:
    """Optimal transmission and success probability for adding a photon to ``|n>``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return math.sqrt(n / (n + 1)), (n / (n + 1)) ** n


def simulate_escher_stage(n: int) -> tuple[float, PureState | None]:
    """Mix ``|n>`` with ``|1>`` at ``|t| = t_n`` and herald on a silent detector.

    The Fock input transmits into mode 3 with amplitude ``t_n`` and reflects
    into mode 4, so the detector watches mode 4 and the grown Fock state
    leaves in mode 3.
    """
    t, _ = escher_stage(n)
    params = BeamsplitterParams(t, math.sqrt(1.0 - t * t))
    joint = beamsplitter(tensor(make_fock(n, n), make_fock(1, 1)), params)
    return project_counts(joint, OUTPUT_MODE, 0)


def escher_cascade(N: int) -> float:
    """Probability of building ``|N>`` from ``N`` photons with every detector silent."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    return math.prod(escher_stage(n)[1] for n in range(1, N))


def do_nothing_fidelity(alpha: complex, cutoff: int | None = None) -> float:
    """Fidelity of the untouched ``|alpha>`` with normalized ``E+|alpha>``."""
    if cutoff is None:
        cutoff = input_cutoff(alpha)
    return fidelity(make_coherent(alpha, cutoff), bare_target(alpha, cutoff))


def characterization_curve(
    R: float, alpha_grid: Sequence[float], eta: float = 1.0
) -> list[CharacterizationPoint]:
    """Zero-count probability against coherent amplitude at fixed ``R``."""
    _check_prob("R", R)
    _check_prob("eta", eta)
    if len(alpha_grid) == 0:
        raise ValueError("alpha grid is empty")
    points = []
    for a in alpha_grid:
        A = float(a) ** 2
        p = closed_form_p0(A, R) if eta == 1.0 else closed_form_p0_inefficient(A, R, eta)
        points.append(CharacterizationPoint(float(a), R, p))
    return points


def characterization_peak(R: float) -> tuple[float, float]:
    """Location ``alpha^2`` and height of the zero-count peak for ``R`` in (0.5, 1)."""
    return (2 * R - 1) / (R * (1 - R)), R * math.exp(-2 + 1 / R)

"""Exact-propagation measurement model and its averaged classical limit.

A spin-1/2 test particle prepared in (|0> + |1>)/sqrt(2) couples to a
detector with K microscopic configurations through an interaction that is
diagonal in the product basis: energy A_k on the |0> branch and B_k on the
|1> branch of configuration k. Propagating the joint state exactly for a
time tau and projecting back onto the initial particle state gives the
closed-form return probability

    P = sum_k |a_k|^2 cos^2((A_k - B_k) tau / (2 hbar)),

which decays to the classical value 1/2 once the dimensionless energy
spread (A_k - B_k) tau / hbar is large and random across configurations.
Averaging over randomly drawn detectors realizes that limit numerically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .montecarlo import MonteCarloEstimate, UniformInterval, derive_seed, mc_mean, sample_uniform, standard_normal
from .qcore import (
    NATURAL_UNITS,
    HermitianOperator,
    PhysicalConstants,
    StateVector,
    expm_propagator,
    tensor_product,
)

__all__ = [
    "QubitState",
    "DetectorModel",
    "MeasurementResult",
    "initial_superposition",
    "build_interaction",
    "initial_product_state",
    "propagate_exact",
    "prob_closed_form",
    "prob_full_propagation",
    "sample_random_detector",
    "decohered_probability",
]

_SQRT_HALF = 1.0 / math.sqrt(2.0)

MEASUREMENT_METHODS = ("closed_form", "full_propagation", "averaged")


@dataclass(frozen=True)
class QubitState:
    """Two amplitudes on the z-basis states |0> and |1>."""

    c0: complex
    c1: complex

    def __post_init__(self):
        nrm2 = abs(self.c0) ** 2 + abs(self.c1) ** 2
        if not np.isfinite(nrm2) or abs(nrm2 - 1.0) > 1e-12:
            raise ValueError(f"qubit amplitudes must be normalized, got |c0|^2+|c1|^2 = {nrm2!r}")

    def as_state_vector(self) -> StateVector:
        return StateVector([self.c0, self.c1], "qubit")


@dataclass(frozen=True)
class MeasurementResult:
    """Return probability for the initially prepared spin state."""

    p_sx_plus: float
    method: str

    def __post_init__(self):
        if self.method not in MEASUREMENT_METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not (-1e-12 <= self.p_sx_plus <= 1.0 + 1e-12):
            raise ValueError(f"probability out of range: {self.p_sx_plus!r}")


def initial_superposition() -> QubitState:
    """Equal superposition (|0> + |1>)/sqrt(2) the particle starts in."""
    return QubitState(_SQRT_HALF, _SQRT_HALF)


class DetectorModel:
    """Detector with K configurations: amplitudes a_k and branch energies A_k, B_k."""

    __slots__ = ("a", "energies_0", "energies_1")

    def __init__(self, a, energies_0, energies_1):
        a = np.array(a, dtype=np.complex128, copy=True).reshape(-1)
        e0 = np.array(energies_0, dtype=np.float64, copy=True).reshape(-1)
        e1 = np.array(energies_1, dtype=np.float64, copy=True).reshape(-1)
        if a.size < 1:
            raise ValueError("detector needs K >= 1 configurations")
        if not (a.size == e0.size == e1.size):
            raise ValueError(
                f"mismatched lengths: a has {a.size}, energies_0 has {e0.size}, energies_1 has {e1.size}"
            )
        if not (np.all(np.isfinite(a.view(np.float64))) and np.all(np.isfinite(e0)) and np.all(np.isfinite(e1))):
            raise ValueError("detector fields must be finite")
        total = float(np.sum(np.abs(a) ** 2))
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"configuration amplitudes must satisfy sum |a_k|^2 = 1, got {total!r}")
        for arr in (a, e0, e1):
            arr.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "energies_0", e0)
        object.__setattr__(self, "energies_1", e1)

    def __setattr__(self, name, value):
        raise AttributeError("DetectorModel is immutable")

    @property
    def K(self) -> int:
        return self.a.size

    def initial_state(self) -> StateVector:
        return StateVector(self.a, "detector")

    def __repr__(self):
        return f"DetectorModel(K={self.K})"


def build_interaction(d: DetectorModel) -> HermitianOperator:
    """Interaction operator, diagonal on the 2K product basis.

    Ordering follows the tensor product with the particle index major:
    entry A_k at (|0>, k) and B_k at (|1>, k).
    """
    return HermitianOperator.from_diagonal(np.concatenate([d.energies_0, d.energies_1]))


def initial_product_state(d: DetectorModel) -> StateVector:
    """Joint particle (x) detector state before the interaction."""
    return tensor_product(initial_superposition().as_state_vector(), d.initial_state())


def propagate_exact(d: DetectorModel, tau: float, c: PhysicalConstants = NATURAL_UNITS) -> StateVector:
    """Joint state after interacting for tau under the exact exponential."""
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    u = expm_propagator(build_interaction(d), tau, c)
    return u.apply(initial_product_state(d))


def prob_closed_form(d: DetectorModel, tau: float, c: PhysicalConstants = NATURAL_UNITS) -> MeasurementResult:
    """Return probability from the per-configuration cosine formula."""
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    half_angles = (d.energies_0 - d.energies_1) * (tau / (2.0 * c.hbar))
    p = float(np.sum(np.abs(d.a) ** 2 * np.cos(half_angles) ** 2))
    return MeasurementResult(p_sx_plus=min(p, 1.0 + 1e-12), method="closed_form")


def prob_full_propagation(d: DetectorModel, tau: float, c: PhysicalConstants = NATURAL_UNITS) -> MeasurementResult:
    """Return probability from explicit propagation of the joint state.

    Propagates the full 2K-dimensional state and sums the squared overlaps
    with (initial particle state) (x) (configuration k) over all k. Serves
    as the independent check on ``prob_closed_form``.
    """
    psi_f = propagate_exact(d, tau, c).amps
    k = d.K
    # <psi0 (x) eps_k | Psi_f> = (psi_f[0,k] + psi_f[1,k]) / sqrt(2)
    overlaps = _SQRT_HALF * (psi_f[:k] + psi_f[k:])
    p = float(np.sum(np.abs(overlaps) ** 2))
    return MeasurementResult(p_sx_plus=min(p, 1.0 + 1e-12), method="full_propagation")


def sample_random_detector(K: int, energy_scale: float, seed: int) -> DetectorModel:
    """Random detector: sphere-uniform amplitudes, uniform branch energies.

    Amplitudes come from normalized complex standard normals (uniform on
    the unit sphere); A_k and B_k are independent uniform on
    [0, energy_scale].
    """
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if not (np.isfinite(energy_scale) and energy_scale > 0):
        raise ValueError(f"energy_scale must be positive, got {energy_scale}")
    idx = np.arange(K, dtype=np.uint64)
    re = standard_normal(derive_seed(seed, "amp_re"), idx)
    im = standard_normal(derive_seed(seed, "amp_im"), idx)
    a = re + 1j * im
    nrm = np.linalg.norm(a)
    if nrm == 0.0:  # astronomically unlikely, but the draw must stay total
        a = np.zeros(K, dtype=np.complex128)
        a[0] = 1.0
    else:
        a = a / nrm
    interval = UniformInterval(0.0, energy_scale)
    e0 = sample_uniform(interval, derive_seed(seed, "energy_0"), idx)
    e1 = sample_uniform(interval, derive_seed(seed, "energy_1"), idx)
    return DetectorModel(a, e0, e1)


def decohered_probability(
    K: int,
    energy_scale: float,
    tau: float,
    c: PhysicalConstants = NATURAL_UNITS,
    seed: int = 0,
    trials: int = 100,
) -> MonteCarloEstimate:
    """Average the closed-form probability over randomly drawn detectors.

    As energy_scale * tau / hbar grows, the per-detector cosine weights
    oscillate incoherently and the average settles at 1/2.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if trials == 1:
        d = sample_random_detector(K, energy_scale, derive_seed(seed, "detector", 0))
        p = prob_closed_form(d, tau, c).p_sx_plus
        return MonteCarloEstimate(mean=p, stderr=0.0, n=1)

    def one_trial(indices, base_seed):
        out = np.empty(indices.size, dtype=np.float64)
        for pos, i in enumerate(indices):
            d = sample_random_detector(K, energy_scale, derive_seed(base_seed, "detector", int(i)))
            out[pos] = prob_closed_form(d, tau, c).p_sx_plus
        return out

    return mc_mean(one_trial, trials, seed)

"""Exact Cover encoding, adiabatic evolution, and the spectral decision problem.

Two concrete problem families back the complexity story:

* Exact Cover over n bits (every clause (i, j, k) demands exactly one of
  the three bits set). A diagonal cost operator counts violated clauses,
  a transverse-field begin operator has the uniform superposition as its
  known ground state, and a linear interpolation between them drives an
  adiabatic sweep whose final state concentrates on satisfying
  assignments when the total time is large enough. A brute-force
  enumerator certifies every statement at desk scale.

* A one-particle energy-threshold decision on a 1D grid: discretize
  -hbar^2/(2m) d^2/dx^2 + V(x) with Dirichlet walls, ask whether the
  ground energy is at most a threshold, and verify candidate eigenpairs
  by a residual check that costs only a matrix-vector product.

Bit conventions: assignments are bitstrings z_1 ... z_n with bit 1 the
leftmost character and the most significant bit of the basis index, so
``format(index, "0{n}b")`` reads off the assignment directly.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from .qcore import (
    NATURAL_UNITS,
    HermitianOperator,
    PhysicalConstants,
    StateVector,
    TdseResult,
    integrate_tdse,
)

__all__ = [
    "ExactCoverInstance",
    "CostHamiltonian",
    "BeginHamiltonian",
    "AdiabaticSchedule",
    "AdiabaticResult",
    "SpectralDecisionInstance",
    "GridHamiltonian",
    "load_instance",
    "save_instance",
    "bitstring_satisfies",
    "brute_force_exact_cover",
    "build_cost_hamiltonian",
    "build_begin_hamiltonian",
    "interpolate",
    "uniform_superposition",
    "recommended_steps",
    "adiabatic_run",
    "success_sweep",
    "most_probable_bitstring",
    "reduce_energy_decision",
    "ground_energy",
    "decide_energy_threshold",
    "verify_eigenpair",
]

BRUTE_FORCE_MAX_BITS = 24
DENSE_MAX_BITS = 14
EVOLUTION_MAX_BITS = 12
STEPS_PER_ENERGY_TIME = 10.0

_PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])


# ---------------------------------------------------------------------------
# Exact Cover instances
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExactCoverInstance:
    """n bits and clauses (i, j, k), 1-based with i < j < k <= n."""

    n: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need n >= 1 bits, got {self.n}")
        seen = set()
        norm = []
        for clause in self.clauses:
            if len(clause) != 3:
                raise ValueError(f"clause {clause} must have exactly 3 indices")
            i, j, k = (int(x) for x in clause)
            if not (1 <= i < j < k <= self.n):
                raise ValueError(f"clause {clause} must satisfy 1 <= i < j < k <= {self.n}")
            if (i, j, k) in seen:
                raise ValueError(f"duplicate clause {clause}")
            seen.add((i, j, k))
            norm.append((i, j, k))
        object.__setattr__(self, "clauses", tuple(norm))

    def to_dict(self) -> dict:
        return {"n": self.n, "clauses": [list(c) for c in self.clauses]}

    @classmethod
    def from_dict(cls, data: dict) -> "ExactCoverInstance":
        extra = set(data) - {"n", "clauses"}
        if extra:
            raise ValueError(f"unknown instance keys: {sorted(extra)}")
        return cls(n=int(data["n"]), clauses=tuple(tuple(c) for c in data["clauses"]))


def load_instance(path) -> ExactCoverInstance:
    """Read an instance from the JSON file format {"n": ..., "clauses": [[i,j,k], ...]}."""
    with open(path, "r", encoding="utf-8") as fh:
        return ExactCoverInstance.from_dict(json.load(fh))


def save_instance(inst: ExactCoverInstance, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(inst.to_dict(), indent=2) + "\n", encoding="utf-8")
    return path


def bitstring_satisfies(inst: ExactCoverInstance, bits: str) -> bool:
    """True when every clause sees exactly one set bit."""
    if len(bits) != inst.n or set(bits) - {"0", "1"}:
        raise ValueError(f"expected a {inst.n}-char bitstring, got {bits!r}")
    return all(int(bits[i - 1]) + int(bits[j - 1]) + int(bits[k - 1]) == 1 for i, j, k in inst.clauses)


def brute_force_exact_cover(inst: ExactCoverInstance) -> list[str]:
    """All satisfying bitstrings by plain enumeration of the 2^n assignments.

    Deliberately naive (string bits, per-clause sums): this is the oracle
    the operator constructions are checked against. Minutes of runtime at
    the top of the allowed range.
    """
    if inst.n > BRUTE_FORCE_MAX_BITS:
        raise ValueError(f"brute force capped at n <= {BRUTE_FORCE_MAX_BITS}, got {inst.n}")
    hits = []
    for z in range(1 << inst.n):
        bits = format(z, f"0{inst.n}b")
        if bitstring_satisfies(inst, bits):
            hits.append(bits)
    return hits


# ---------------------------------------------------------------------------
# Operator encodings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CostHamiltonian:
    """Diagonal violated-clause counts per assignment; 0 exactly on solutions."""

    n: int
    energies: np.ndarray

    def as_operator(self) -> HermitianOperator:
        return HermitianOperator.from_diagonal(self.energies.astype(np.float64))


@dataclass(frozen=True)
class BeginHamiltonian:
    """Transverse-field operator sum_i d_i (1 - X_i)/2 with known ground state.

    d_i counts the clauses containing bit i; the uniform superposition is
    an exact eigenvector with eigenvalue 0 and the largest eigenvalue is
    sum_i d_i (the per-bit terms commute).
    """

    n: int
    d: np.ndarray
    matrix: np.ndarray

    def as_operator(self) -> HermitianOperator:
        return HermitianOperator.from_dense(self.matrix)

    def max_eigenvalue(self) -> float:
        return float(self.d.sum())


def _assignment_bits(n: int) -> np.ndarray:
    """(2^n, n) matrix of bits with bit 1 in column 0 (most significant)."""
    z = np.arange(1 << n, dtype=np.uint64)[:, None]
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint64)[None, :]
    return ((z >> shifts) & np.uint64(1)).astype(np.int64)


def build_cost_hamiltonian(inst: ExactCoverInstance) -> CostHamiltonian:
    """Count violated clauses for every assignment (vectorized over 2^n)."""
    if inst.n > DENSE_MAX_BITS:
        raise ValueError(f"dense encoding capped at n <= {DENSE_MAX_BITS}, got {inst.n}")
    bits = _assignment_bits(inst.n)
    energies = np.zeros(1 << inst.n, dtype=np.int64)
    for i, j, k in inst.clauses:
        energies += bits[:, i - 1] + bits[:, j - 1] + bits[:, k - 1] != 1
    energies.setflags(write=False)
    return CostHamiltonian(n=inst.n, energies=energies)


def build_begin_hamiltonian(inst: ExactCoverInstance) -> BeginHamiltonian:
    """Assemble sum_i d_i (1 - X_i)/2 as a dense real matrix."""
    if inst.n > DENSE_MAX_BITS:
        raise ValueError(f"dense encoding capped at n <= {DENSE_MAX_BITS}, got {inst.n}")
    n = inst.n
    d = np.zeros(n, dtype=np.int64)
    for clause in inst.clauses:
        for idx in clause:
            d[idx - 1] += 1
    dim = 1 << n
    matrix = np.zeros((dim, dim))
    half = (np.eye(2) - _PAULI_X) / 2.0
    for site in range(n):
        if d[site] == 0:
            continue
        term = np.kron(np.kron(np.eye(1 << site), half), np.eye(1 << (n - site - 1)))
        matrix += d[site] * term
    d.setflags(write=False)
    matrix.setflags(write=False)
    return BeginHamiltonian(n=n, d=d, matrix=matrix)


def interpolate(h0: BeginHamiltonian, hc: CostHamiltonian, t: float, total_time: float) -> HermitianOperator:
    """Linear schedule (1 - t/T) H_begin + (t/T) H_cost; endpoints are exact."""
    if h0.n != hc.n:
        raise ValueError(f"operator sizes disagree: begin n={h0.n}, cost n={hc.n}")
    if not 0.0 <= t <= total_time:
        raise ValueError(f"t = {t} outside the schedule [0, {total_time}]")
    s = t / total_time
    m = (1.0 - s) * h0.matrix
    m[np.diag_indices_from(m)] += s * hc.energies
    return HermitianOperator.from_dense(m)


def uniform_superposition(n: int) -> StateVector:
    return StateVector(np.full(1 << n, (1 << n) ** -0.5, dtype=np.complex128), "bitstring")


# ---------------------------------------------------------------------------
# Adiabatic sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdiabaticSchedule:
    """Total time T and step count for one interpolation run."""

    total_time: float
    steps: int

    def __post_init__(self):
        if not (np.isfinite(self.total_time) and self.total_time > 0):
            raise ValueError(f"total_time must be positive, got {self.total_time}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")


def recommended_steps(max_energy: float, total_time: float, c: PhysicalConstants = NATURAL_UNITS) -> int:
    """Step count keeping the per-step phase below 0.1 rad: 10 T E_max / hbar."""
    return max(1, math.ceil(STEPS_PER_ENERGY_TIME * total_time * max_energy / c.hbar))


@dataclass(frozen=True)
class AdiabaticResult:
    """Final state of one run plus the weight on satisfying assignments."""

    state: StateVector
    success_probability: float
    norm_drift: float
    total_time: float
    steps: int


def adiabatic_run(
    inst: ExactCoverInstance,
    schedule: AdiabaticSchedule,
    c: PhysicalConstants = NATURAL_UNITS,
) -> AdiabaticResult:
    """Integrate the interpolated Hamiltonian from the uniform superposition.

    Success probability is the total final weight on the assignments the
    brute-force enumerator certifies as satisfying.
    """
    if inst.n > EVOLUTION_MAX_BITS:
        raise ValueError(f"evolution capped at n <= {EVOLUTION_MAX_BITS}, got {inst.n}")
    h0 = build_begin_hamiltonian(inst)
    hc = build_cost_hamiltonian(inst)
    max_energy = max(h0.max_eigenvalue(), float(hc.energies.max(initial=0)))
    rec = recommended_steps(max_energy, schedule.total_time, c)
    if schedule.steps < rec:
        warnings.warn(
            f"schedule has {schedule.steps} steps; {rec} recommended for "
            f"T={schedule.total_time} at max energy {max_energy}",
            RuntimeWarning,
            stacklevel=2,
        )

    # Per-step assembly in complex dtype, bypassing the Hermiticity rescan:
    # convex combinations of the two validated operators stay Hermitian.
    h0c = h0.matrix.astype(np.complex128)
    energies = hc.energies.astype(np.float64)
    diag = np.diag_indices(h0c.shape[0])
    total = schedule.total_time

    def h_of_t(t: float) -> HermitianOperator:
        s = t / total
        m = (1.0 - s) * h0c
        m[diag] += s * energies
        return HermitianOperator.from_dense(m, check=False)

    result: TdseResult = integrate_tdse(
        h_of_t, uniform_superposition(inst.n), total, schedule.steps, c, max_energy=max_energy
    )
    satisfying = brute_force_exact_cover(inst)
    probs = result.state.probabilities()
    success = float(sum(probs[int(bits, 2)] for bits in satisfying))
    return AdiabaticResult(
        state=result.state,
        success_probability=success,
        norm_drift=result.norm_drift,
        total_time=schedule.total_time,
        steps=schedule.steps,
    )


def success_sweep(
    inst: ExactCoverInstance,
    total_times,
    c: PhysicalConstants = NATURAL_UNITS,
    target: float | None = None,
) -> list[dict]:
    """Run the schedule at each total time, stopping early once ``target`` is hit.

    Step counts follow the recommendation for each T. Returns one row per
    run with T, steps, success probability, and norm drift.
    """
    h0 = build_begin_hamiltonian(inst)
    hc = build_cost_hamiltonian(inst)
    max_energy = max(h0.max_eigenvalue(), float(hc.energies.max(initial=0)))
    rows = []
    for total_time in total_times:
        schedule = AdiabaticSchedule(
            total_time=float(total_time),
            steps=recommended_steps(max_energy, float(total_time), c),
        )
        run = adiabatic_run(inst, schedule, c)
        rows.append(
            {
                "T": run.total_time,
                "steps": run.steps,
                "success_probability": run.success_probability,
                "norm_drift": run.norm_drift,
            }
        )
        if target is not None and run.success_probability >= target:
            break
    return rows


def most_probable_bitstring(state: StateVector, n: int) -> str:
    """Assignment carrying the largest probability in a 2^n state."""
    if state.dim != 1 << n:
        raise ValueError(f"state dim {state.dim} does not match 2^{n}")
    return format(int(np.argmax(state.probabilities())), f"0{n}b")


# ---------------------------------------------------------------------------
# Spectral decision problem on a 1D grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralDecisionInstance:
    """One particle in a hard box: grid resolution, geometry, potential, threshold."""

    grid_points: int
    box_length: float
    mass: float
    potential: np.ndarray
    threshold: float

    def __post_init__(self):
        if self.grid_points < 3:
            raise ValueError(f"need grid_points >= 3, got {self.grid_points}")
        if not (np.isfinite(self.box_length) and self.box_length > 0):
            raise ValueError(f"box_length must be positive, got {self.box_length}")
        if not (np.isfinite(self.mass) and self.mass > 0):
            raise ValueError(f"mass must be positive, got {self.mass}")
        v = np.array(self.potential, dtype=np.float64, copy=True).reshape(-1)
        if v.size != self.grid_points:
            raise ValueError(f"potential has {v.size} samples for {self.grid_points} grid points")
        if not np.all(np.isfinite(v)):
            raise ValueError("potential must be finite")
        if not np.isfinite(self.threshold):
            raise ValueError("threshold must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "potential", v)

    def grid(self) -> np.ndarray:
        """Interior grid points; the walls sit at 0 and box_length."""
        dx = self.box_length / (self.grid_points + 1)
        return dx * np.arange(1, self.grid_points + 1)


@dataclass(frozen=True)
class GridHamiltonian:
    """Dense symmetric discretization of the boxed Schrodinger operator."""

    matrix: np.ndarray
    dx: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def spectral_scale(self) -> float:
        """Gershgorin bound on max |eigenvalue|."""
        return float(np.abs(self.matrix).sum(axis=1).max())


def reduce_energy_decision(
    inst: SpectralDecisionInstance, c: PhysicalConstants = NATURAL_UNITS
) -> tuple[GridHamiltonian, float]:
    """Build the grid operator and pass the threshold through unchanged.

    Central second differences with Dirichlet walls:
    H = -hbar^2/(2m) D2 + diag(V). Polynomial-time data transform.
    """
    n = inst.grid_points
    dx = inst.box_length / (n + 1)
    t = c.hbar**2 / (2.0 * inst.mass * dx * dx)
    matrix = np.diag(2.0 * t + inst.potential)
    off = np.full(n - 1, -t)
    matrix[np.arange(n - 1), np.arange(1, n)] = off
    matrix[np.arange(1, n), np.arange(n - 1)] = off
    matrix.setflags(write=False)
    return GridHamiltonian(matrix=matrix, dx=dx), float(inst.threshold)


GROUND_ENERGY_MAX_DIM = 4096


def _gershgorin_lower(matrix: np.ndarray) -> float:
    radii = np.abs(matrix).sum(axis=1) - np.abs(np.diag(matrix))
    return float((np.diag(matrix) - radii).min())


def _ground_energy_inverse(matrix: np.ndarray, tol: float = 1e-12, max_iter: int = 200) -> float | None:
    """Smallest eigenvalue by shifted inverse iteration; None if not converged."""
    dim = matrix.shape[0]
    scale = max(1.0, float(np.abs(matrix).max()))
    shift = _gershgorin_lower(matrix) - 1e-6 * scale
    try:
        lu = scipy.linalg.lu_factor(matrix - shift * np.eye(dim))
    except scipy.linalg.LinAlgError:
        return None
    v = np.full(dim, dim**-0.5)
    lam_old = None
    for _ in range(max_iter):
        v = scipy.linalg.lu_solve(lu, v)
        v /= np.linalg.norm(v)
        lam = float(v @ (matrix @ v))
        if lam_old is not None and abs(lam - lam_old) <= tol * max(1.0, abs(lam)):
            residual = np.linalg.norm(matrix @ v - lam * v)
            if residual <= 1e-8 * scale:
                return lam
        lam_old = lam
    return None


def ground_energy(h: GridHamiltonian, method: str = "dense") -> float:
    """Smallest eigenvalue of the grid operator.

    ``dense`` uses the symmetric eigensolver; ``inverse`` runs shifted
    inverse iteration and falls back to the dense route (with a notice)
    if it stalls.
    """
    if h.dim > GROUND_ENERGY_MAX_DIM:
        raise ValueError(f"ground_energy capped at dim <= {GROUND_ENERGY_MAX_DIM}, got {h.dim}")
    if method == "dense":
        return float(np.linalg.eigvalsh(h.matrix)[0])
    if method == "inverse":
        lam = _ground_energy_inverse(h.matrix)
        if lam is None:
            warnings.warn("inverse iteration did not converge; using dense solver", RuntimeWarning, stacklevel=2)
            return float(np.linalg.eigvalsh(h.matrix)[0])
        return lam
    raise ValueError(f"unknown method {method!r}, expected 'dense' or 'inverse'")


def decide_energy_threshold(inst: SpectralDecisionInstance, c: PhysicalConstants = NATURAL_UNITS) -> bool:
    """Is the ground energy at most the threshold? Ties resolve to yes.

    The comparison allows an absolute slack of 1e-9 * max(1, |threshold|)
    so that exact-tie inputs are not lost to rounding.
    """
    h, threshold = reduce_energy_decision(inst, c)
    slack = 1e-9 * max(1.0, abs(threshold))
    return ground_energy(h) <= threshold + slack


def verify_eigenpair(h, psi, energy: float, tol: float) -> bool:
    """Residual check ||H psi - E psi||_2 <= tol.

    Costs one matrix-vector product (quadratic in the dimension), so a
    claimed eigenpair is checkable far more cheaply than it is findable.
    Accepts GridHamiltonian, HermitianOperator, or a plain square array.
    """
    if isinstance(h, GridHamiltonian):
        apply_h = h.matrix.__matmul__
        dim = h.dim
    elif isinstance(h, HermitianOperator):
        apply_h = h.matvec
        dim = h.dim
    else:
        m = np.asarray(h)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got shape {m.shape}")
        apply_h = m.__matmul__
        dim = m.shape[0]
    vec = psi.amps if isinstance(psi, StateVector) else np.asarray(psi)
    if vec.size != dim:
        raise ValueError(f"dimension mismatch: operator dim {dim}, vector dim {vec.size}")
    nrm = np.linalg.norm(vec)
    if abs(nrm - 1.0) > 1e-8:
        raise ValueError(f"eigenvector must be normalized, |norm - 1| = {abs(nrm - 1.0):.3e}")
    residual = float(np.linalg.norm(apply_h(vec) - energy * vec))
    return residual <= tol

"""Linear boundary-value problems for first-order difference systems.

The system is z(n+1) = A_n z(n) + f(n) over the window {0, ..., m} with a
sampled linear boundary condition l z = alpha. The induced operator on the
initial state, Q = l Phi(., 0), may be singular (the resonance case); the
solver classifies solvability and returns a solution family built through
the Moore-Penrose pseudoinverse of Q.

Index convention: Phi(n, n) = I and Phi(n, i) = A_{n-1} ... A_i for n > i,
the unique choice under which z(n) = Phi(n, i) z(i) for the homogeneous
recurrence and g(n) = sum_{i<n} Phi(n, i+1) f(i) solves the forced one
from g(0) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boundary import BoundaryOperator
from .linalg import (
    RankDecision,
    cokernel_basis,
    kernel_basis,
    numerical_rank,
    operator_rank,
    pseudoinverse,
)

__all__ = [
    "CLASSICAL",
    "FAMILY",
    "QUASISOLUTION",
    "OperatorSequence",
    "SolvabilityReport",
    "SolutionFamily",
    "LinearBVP",
    "evolution",
    "transition_stack",
    "particular_forced",
    "assemble_Q",
    "assemble_h",
    "classify",
    "solve_family",
    "green_apply",
    "recurrence_residual",
    "boundary_residual",
]

CLASSICAL = "unique_classical"
FAMILY = "family"
QUASISOLUTION = "quasisolution"


@dataclass(frozen=True)
class OperatorSequence:
    """Time-indexed square system matrices A_0, ..., A_{m-1}.

    matrices has shape (m, N, N); step n maps z(n) to the A_n z(n) part of
    z(n+1). Trajectories over the window have m+1 states.
    """

    matrices: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.matrices, dtype=float)
        if A.ndim != 3 or A.shape[1] != A.shape[2]:
            raise ValueError(f"expected shape (m, N, N), got {A.shape}")
        if A.shape[0] == 0:
            raise ValueError("horizon must be at least 1")
        if not np.all(np.isfinite(A)):
            raise ValueError("system matrices must have finite entries")
        object.__setattr__(self, "matrices", A)

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    @property
    def horizon(self) -> int:
        return self.matrices.shape[0]

    @classmethod
    def constant(cls, A, m: int) -> "OperatorSequence":
        A = np.asarray(A, dtype=float)
        return cls(np.broadcast_to(A, (m,) + A.shape).copy())

    @classmethod
    def identity(cls, dim: int, m: int) -> "OperatorSequence":
        return cls.constant(np.eye(dim), m)


def transition_stack(system: OperatorSequence) -> np.ndarray:
    """All transition matrices from time 0: U[k] = Phi(k, 0), shape (m+1, N, N)."""
    m, N = system.horizon, system.dim
    U = np.empty((m + 1, N, N))
    U[0] = np.eye(N)
    for k in range(m):
        U[k + 1] = system.matrices[k] @ U[k]
    return U


def evolution(system: OperatorSequence, n: int, i: int) -> np.ndarray:
    """State-transition matrix Phi(n, i) = A_{n-1} ... A_i, Phi(n, n) = I."""
    if not 0 <= i <= n <= system.horizon:
        raise IndexError(f"need 0 <= i <= n <= {system.horizon}, got (n, i) = ({n}, {i})")
    P = np.eye(system.dim)
    for k in range(i, n):
        P = system.matrices[k] @ P
    return P


def _forcing_array(system: OperatorSequence, f) -> np.ndarray:
    m, N = system.horizon, system.dim
    if f is None:
        return np.zeros((m, N))
    f = np.asarray(f, dtype=float)
    if f.shape == (m + 1, N):  # trailing value is irrelevant to the window
        f = f[:m]
    if f.shape != (m, N):
        raise ValueError(f"forcing must have shape ({m}, {N}), got {f.shape}")
    return f


def particular_forced(system: OperatorSequence, f) -> np.ndarray:
    """The unique solution of g(n+1) = A_n g(n) + f(n) with g(0) = 0."""
    f = _forcing_array(system, f)
    m, N = system.horizon, system.dim
    g = np.zeros((m + 1, N))
    for n in range(m):
        g[n + 1] = system.matrices[n] @ g[n] + f[n]
    return g


def _check_window(system: OperatorSequence, l: BoundaryOperator) -> None:
    if l.dim is not None and l.dim != system.dim:
        raise ValueError(f"boundary operator dimension {l.dim} != state dimension {system.dim}")
    if l.max_point > system.horizon:
        raise ValueError(
            f"boundary sample point {l.max_point} outside window [0, {system.horizon}]"
        )


def assemble_Q(system: OperatorSequence, l: BoundaryOperator) -> np.ndarray:
    """Matrix of the map c -> l(Phi(., 0) c), shape (q, N)."""
    _check_window(system, l)
    U = transition_stack(system)
    Q = np.zeros((l.codim, system.dim))
    for n, L in l.samples:
        Q += L @ U[n]
    return Q


def assemble_h(system: OperatorSequence, f, l: BoundaryOperator, alpha=None) -> np.ndarray:
    """Right-hand side h = alpha - l g of the induced equation Q z0 = h."""
    _check_window(system, l)
    alpha = l.target if alpha is None else np.asarray(alpha, dtype=float)
    return alpha - l.apply(particular_forced(system, f))


@dataclass(frozen=True)
class SolvabilityReport:
    """Classification of the induced equation Q z0 = h."""

    classification: str
    defect_norm: float
    kernel_dim: int
    cokernel_dim: int
    fredholm_index: int
    tolerance_used: float
    rank_tolerance: float

    def as_dict(self) -> dict:
        return {
            "classification": self.classification,
            "defect_norm": self.defect_norm,
            "kernel_dim": self.kernel_dim,
            "cokernel_dim": self.cokernel_dim,
            "fredholm_index": self.fredholm_index,
            "tolerance_used": self.tolerance_used,
            "rank_tolerance": self.rank_tolerance,
        }


def classify(Q, h, tol: float = 1e-9, rank_tol: float = 1e-10,
             rd: RankDecision | None = None) -> SolvabilityReport:
    """Classify Q z0 = h as unique / family / quasisolution.

    The defect is ||P_{N(Q*)} h||; quasisolution iff it exceeds
    tol * (1 + ||h||). In finite dimensions the range of Q is closed, so
    the non-classical branch is exactly the least-squares one.
    """
    Q = np.asarray(Q, dtype=float)
    h = np.asarray(h, dtype=float).reshape(-1)
    if h.shape[0] != Q.shape[0]:
        raise ValueError(f"h has length {h.shape[0]}, expected {Q.shape[0]}")
    if rd is None:
        rd = operator_rank(Q, rank_tol)
    r = Q.shape[1] - rd.rank
    d = Q.shape[0] - rd.rank
    defect = float(np.linalg.norm(cokernel_basis(Q, rd).T @ h))
    if defect > tol * (1.0 + np.linalg.norm(h)):
        label = QUASISOLUTION
    elif r == 0:
        label = CLASSICAL
    else:
        label = FAMILY
    return SolvabilityReport(
        classification=label,
        defect_norm=defect,
        kernel_dim=r,
        cokernel_dim=d,
        fredholm_index=r - d,
        tolerance_used=tol,
        rank_tolerance=rd.tolerance,
    )


@dataclass(frozen=True)
class SolutionFamily:
    """Solution family z0(n, c) = particular(n) + sum_j c_j kernel_basis[j](n).

    Kernel members are propagated from an orthonormal basis of N(Q), so
    every member solves the recurrence exactly and leaves the boundary
    residual of the particular member unchanged.
    """

    particular: np.ndarray            # (m+1, N)
    kernel_basis: np.ndarray          # (r, m+1, N)
    initial_particular: np.ndarray    # (N,) = Q^+ h
    kernel_initial_basis: np.ndarray  # (N, r), orthonormal basis of N(Q)
    cokernel_basis: np.ndarray        # (q, d), orthonormal basis of N(Q*)
    classification: str

    @property
    def kernel_dim(self) -> int:
        return self.kernel_basis.shape[0]

    @property
    def cokernel_dim(self) -> int:
        return self.cokernel_basis.shape[1]

    def member(self, c) -> np.ndarray:
        c = np.atleast_1d(np.asarray(c, dtype=float))
        if c.shape != (self.kernel_dim,):
            raise ValueError(f"coefficient vector must have shape ({self.kernel_dim},)")
        if self.kernel_dim == 0:
            return self.particular.copy()
        return self.particular + np.tensordot(c, self.kernel_basis, axes=1)


class LinearBVP:
    """Assembled linear problem: transition stack, Q, and its generalized inverse.

    Immutable after construction; all solve/green calls are pure.
    """

    def __init__(self, system: OperatorSequence, l: BoundaryOperator,
                 rank_tol: float = 1e-10):
        _check_window(system, l)
        self.system = system
        self.boundary = l
        self.U = transition_stack(system)
        self.Q = assemble_Q(system, l)
        self.rd = operator_rank(self.Q, rank_tol)
        self.Q_pinv = pseudoinverse(self.Q, self.rd)
        self.kernel_initial_basis = kernel_basis(self.Q, self.rd)
        self.cokernel_basis = cokernel_basis(self.Q, self.rd)

    @property
    def kernel_dim(self) -> int:
        return self.kernel_initial_basis.shape[1]

    @property
    def cokernel_dim(self) -> int:
        return self.cokernel_basis.shape[1]

    def propagate(self, z0: np.ndarray) -> np.ndarray:
        """Homogeneous trajectory Phi(n, 0) z0 over the window."""
        return self.U @ np.asarray(z0, dtype=float)

    def h(self, f, alpha=None) -> np.ndarray:
        alpha = self.boundary.target if alpha is None else np.asarray(alpha, dtype=float)
        return alpha - self.boundary.apply(particular_forced(self.system, f))

    def classify(self, f, alpha=None, tol: float = 1e-9) -> SolvabilityReport:
        return classify(self.Q, self.h(f, alpha), tol=tol, rd=self.rd)

    def green(self, f, alpha=None) -> np.ndarray:
        """Particular solution operator: Phi(n, 0) Q^+ (alpha - l g) + g(n).

        Linear in (f, alpha); least-squares/minimum-norm when the boundary
        condition cannot be met exactly.
        """
        if alpha is None:
            alpha = np.zeros(self.boundary.codim)
        g = particular_forced(self.system, f)
        h = np.asarray(alpha, dtype=float) - self.boundary.apply(g)
        return self.propagate(self.Q_pinv @ h) + g

    def solve(self, f, alpha=None, tol: float = 1e-9):
        """Classify and build the full solution family for (f, alpha)."""
        g = particular_forced(self.system, f)
        alpha_vec = self.boundary.target if alpha is None else np.asarray(alpha, dtype=float)
        h = alpha_vec - self.boundary.apply(g)
        report = classify(self.Q, h, tol=tol, rd=self.rd)
        z0p = self.Q_pinv @ h
        particular = self.propagate(z0p) + g
        r = self.kernel_dim
        kernels = np.empty((r, self.system.horizon + 1, self.system.dim))
        for j in range(r):
            kernels[j] = self.propagate(self.kernel_initial_basis[:, j])
        family = SolutionFamily(
            particular=particular,
            kernel_basis=kernels,
            initial_particular=z0p,
            kernel_initial_basis=self.kernel_initial_basis,
            cokernel_basis=self.cokernel_basis,
            classification=report.classification,
        )
        return report, family


def solve_family(system: OperatorSequence, f, l: BoundaryOperator, alpha=None,
                 tol: float = 1e-9, rank_tol: float = 1e-10):
    """One-shot wrapper around LinearBVP.solve."""
    return LinearBVP(system, l, rank_tol=rank_tol).solve(f, alpha, tol=tol)


def green_apply(system: OperatorSequence, l: BoundaryOperator, rhs_forcing,
                rhs_alpha=None, rank_tol: float = 1e-10) -> np.ndarray:
    """One-shot wrapper around LinearBVP.green."""
    return LinearBVP(system, l, rank_tol=rank_tol).green(rhs_forcing, rhs_alpha)


def recurrence_residual(system: OperatorSequence, f, trajectory) -> float:
    """max_n || z(n+1) - A_n z(n) - f(n) ||."""
    z = np.asarray(trajectory, dtype=float)
    f = _forcing_array(system, f)
    worst = 0.0
    for n in range(system.horizon):
        worst = max(worst, float(np.linalg.norm(z[n + 1] - system.matrices[n] @ z[n] - f[n])))
    return worst


def boundary_residual(l: BoundaryOperator, trajectory, alpha=None) -> float:
    """|| l z - alpha ||."""
    alpha = l.target if alpha is None else np.asarray(alpha, dtype=float)
    return float(np.linalg.norm(l.apply(trajectory) - alpha))

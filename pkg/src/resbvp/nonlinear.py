"""Weakly nonlinear solver: generating-constant equation, its linearization
B0, the full-row-rank sufficiency gate, and the fixed-point iteration that
continues a generating solution z0(n, c0) to z(n, eps) = z0 + u.

The perturbed system is

    z(n+1) = A_n z(n) + f(n) + eps * Z(z(n), n, eps),      l z = alpha.

Generating solutions that survive the perturbation are selected by the
bifurcation equation F(c) = 0, where F pushes the nonlinearity evaluated
along a family member through the forcing-to-boundary map and projects
onto the cokernel of Q.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boundary import BoundaryOperator
from .linalg import numerical_rank, pseudoinverse
from .linear import (
    QUASISOLUTION,
    LinearBVP,
    OperatorSequence,
    SolutionFamily,
    boundary_residual,
    particular_forced,
)

__all__ = [
    "GeneratingFamilyError",
    "SufficiencyError",
    "DerivativeMismatchError",
    "NonlinearProblem",
    "GeneratingRoot",
    "SufficiencyCheck",
    "IterationTrace",
    "generating_F",
    "solve_generating",
    "assemble_B0",
    "check_sufficient",
    "iterate",
    "verify_derivative",
    "nonlinear_recurrence_residual",
]


class GeneratingFamilyError(ValueError):
    """The linear part is a quasisolution; there is no generating family."""


class SufficiencyError(RuntimeError):
    """The full-row-rank condition on B0 fails."""


class DerivativeMismatchError(ValueError):
    """Supplied derivative disagrees with finite differences of Z."""


@dataclass
class NonlinearProblem:
    """Linear BVP data plus the nonlinearity and its state derivative.

    Z(z, n, eps) maps R^N -> R^N; Z_du(z, n, eps) is its N x N Jacobian
    in z. eps is the perturbation size of the solve.
    """

    system: OperatorSequence
    forcing: np.ndarray
    boundary: BoundaryOperator
    Z: callable
    Z_du: callable
    epsilon: float = 0.0
    _bvp: LinearBVP | None = field(default=None, repr=False, compare=False)

    def linear_bvp(self, rank_tol: float = 1e-10) -> LinearBVP:
        if self._bvp is None:
            self._bvp = LinearBVP(self.system, self.boundary, rank_tol=rank_tol)
        return self._bvp


@dataclass(frozen=True)
class GeneratingRoot:
    """Accepted root of the generating-constant equation."""

    c0: np.ndarray
    residual_norm: float
    jacobian_rank: int
    converged: bool
    iterations: int


@dataclass(frozen=True)
class SufficiencyCheck:
    """Outcome of the full-row-rank gate on B0."""

    holds: bool
    row_rank: int
    required_rank: int
    product_norm: float
    null_direction: np.ndarray | None


@dataclass(frozen=True)
class IterationTrace:
    """Per-iteration diagnostics of the fixed-point process."""

    records: tuple          # rows: (k, c_norm, ubar_norm, rec_res, bc_res, proj_res)
    converged: bool
    iterations: int

    FIELDS = ("k", "c_norm", "ubar_norm", "recurrence_residual",
              "boundary_residual", "projected_residual")


def verify_derivative(problem: NonlinearProblem, points: int = 20,
                      tol: float = 1e-5, scale: float = 1.0, seed: int = 0) -> None:
    """Check Z_du against central finite differences of Z at random probes.

    Raises DerivativeMismatchError on disagreement beyond ``tol`` relative.
    """
    rng = np.random.default_rng(seed)
    N, m = problem.system.dim, problem.system.horizon
    step = 1e-6 * scale
    for _ in range(points):
        z = scale * rng.standard_normal(N)
        n = int(rng.integers(0, m))
        J = np.asarray(problem.Z_du(z, n, 0.0), dtype=float)
        fd = np.empty_like(J)
        for j in range(N):
            e = np.zeros(N)
            e[j] = step
            fd[:, j] = (np.asarray(problem.Z(z + e, n, 0.0))
                        - np.asarray(problem.Z(z - e, n, 0.0))) / (2 * step)
        err = np.linalg.norm(fd - J) / (1.0 + np.linalg.norm(J))
        if err > tol:
            raise DerivativeMismatchError(
                f"Z_du disagrees with finite differences at n={n}: relative error {err:.3e}"
            )


def _require_generating(family: SolutionFamily) -> None:
    if family.classification == QUASISOLUTION:
        raise GeneratingFamilyError(
            "linear part is only solvable in the least-squares sense; "
            "no generating family exists"
        )


def _boundary_of_forcing(bvp: LinearBVP, forcing: np.ndarray) -> np.ndarray:
    """l applied to the zero-initial-state response of the given forcing."""
    return bvp.boundary.apply(particular_forced(bvp.system, forcing))


def generating_F(problem: NonlinearProblem, family: SolutionFamily, c,
                 at_eps: float = 0.0) -> np.ndarray:
    """Bifurcation function F(c) in cokernel coordinates (length d).

    Evaluates Z along the family member z0(., c), pushes it through the
    forcing-to-boundary map, and projects onto N(Q*). The generating
    equation proper evaluates Z at eps = 0; parameter scans may probe the
    nonlinearity at a nonzero ``at_eps`` instead.
    """
    _require_generating(family)
    bvp = problem.linear_bvp()
    m = problem.system.horizon
    z0 = family.member(c)
    fz = np.array([problem.Z(z0[n], n, float(at_eps)) for n in range(m)], dtype=float)
    return family.cokernel_basis.T @ _boundary_of_forcing(bvp, fz)


def _fd_jacobian(fun, c: np.ndarray, out_dim: int) -> np.ndarray:
    """Central finite-difference Jacobian of a vector map of c."""
    r = c.shape[0]
    J = np.zeros((out_dim, r))
    for j in range(r):
        step = 1e-6 * (1.0 + abs(c[j]))
        e = np.zeros(r)
        e[j] = step
        J[:, j] = (fun(c + e) - fun(c - e)) / (2 * step)
    return J


def solve_generating(problem: NonlinearProblem, family: SolutionFamily, c_init=None,
                     tol: float = 1e-10, max_iter: int = 50,
                     at_eps: float = 0.0) -> GeneratingRoot:
    """Damped Newton root search for F(c) = 0.

    Uses a finite-difference Jacobian and a pseudoinverse step, so
    rectangular and rank-deficient Jacobians are handled. With d = 0 the
    equation is empty and c_init is returned unchanged.
    """
    _require_generating(family)
    r = family.kernel_dim
    d = family.cokernel_dim
    c = np.zeros(r) if c_init is None else np.asarray(c_init, dtype=float).reshape(r).copy()
    if d == 0:
        return GeneratingRoot(c0=c, residual_norm=0.0, jacobian_rank=0,
                              converged=True, iterations=0)

    fun = lambda cc: generating_F(problem, family, cc, at_eps=at_eps)
    F = fun(c)
    norm = float(np.linalg.norm(F))
    jac_rank = 0
    for k in range(1, max_iter + 1):
        if norm <= tol:
            return GeneratingRoot(c0=c, residual_norm=norm, jacobian_rank=jac_rank,
                                  converged=True, iterations=k - 1)
        J = _fd_jacobian(fun, c, d)
        rd = numerical_rank(J)
        jac_rank = rd.rank
        step = -pseudoinverse(J, rd) @ F
        lam = 1.0
        improved = False
        for _ in range(30):
            trial = c + lam * step
            Ft = fun(trial)
            nt = float(np.linalg.norm(Ft))
            if nt < norm:
                c, F, norm = trial, Ft, nt
                improved = True
                break
            lam *= 0.5
        if not improved:
            break  # stagnation; report best iterate
    return GeneratingRoot(c0=c, residual_norm=norm, jacobian_rank=jac_rank,
                          converged=norm <= tol, iterations=max_iter)


def assemble_B0(problem: NonlinearProblem, family: SolutionFamily, c0,
                at_eps: float = 0.0) -> np.ndarray:
    """Linearization of the bifurcation function at c0, shape (d, r).

    Column j is minus the cokernel projection of l applied to the forced
    response of Z_du(z0(., c0), ., 0) acting on the j-th propagated kernel
    trajectory. By construction B0 = -dF/dc at c0.
    """
    _require_generating(family)
    bvp = problem.linear_bvp()
    m = problem.system.horizon
    r, d = family.kernel_dim, family.cokernel_dim
    B0 = np.zeros((d, r))
    if d == 0 or r == 0:
        return B0
    z0 = family.member(c0)
    Zdu = [np.asarray(problem.Z_du(z0[n], n, float(at_eps)), dtype=float) for n in range(m)]
    for j in range(r):
        w = family.kernel_basis[j]
        forcing = np.array([Zdu[n] @ w[n] for n in range(m)])
        B0[:, j] = -family.cokernel_basis.T @ _boundary_of_forcing(bvp, forcing)
    return B0


def check_sufficient(B0, tol: float = 1e-9) -> SufficiencyCheck:
    """Full-row-rank gate on B0 (in cokernel coordinates the condition
    P_{N(B0*)} P_{N(Q*)} = 0 reads: B0 has row rank d)."""
    B0 = np.asarray(B0, dtype=float)
    d = B0.shape[0]
    if d == 0:
        return SufficiencyCheck(holds=True, row_rank=0, required_rank=0,
                                product_norm=0.0, null_direction=None)
    smax = float(np.linalg.norm(B0, 2)) if B0.size else 0.0
    rd = numerical_rank(B0, tol=tol * (1.0 + smax), absolute=True)
    coker = rd.u[:, rd.rank:]
    product_norm = float(np.linalg.norm(coker @ coker.T))  # = P_{N(B0*)} on R^d
    holds = rd.rank == d
    null_dir = None if holds else coker[:, 0].copy()
    return SufficiencyCheck(holds=holds, row_rank=rd.rank, required_rank=d,
                            product_norm=product_norm, null_direction=null_dir)


def nonlinear_recurrence_residual(problem: NonlinearProblem, z, eps=None) -> float:
    """max_n || z(n+1) - A_n z(n) - f(n) - eps Z(z(n), n, eps) ||."""
    eps = problem.epsilon if eps is None else eps
    z = np.asarray(z, dtype=float)
    A = problem.system.matrices
    f = np.asarray(problem.forcing, dtype=float)
    worst = 0.0
    for n in range(problem.system.horizon):
        res = z[n + 1] - A[n] @ z[n] - f[n] - eps * np.asarray(problem.Z(z[n], n, eps))
        worst = max(worst, float(np.linalg.norm(res)))
    return worst


def iterate(problem: NonlinearProblem, family: SolutionFamily, c0,
            eps: float | None = None, tol: float = 1e-10, max_iter: int = 200,
            blowup: float = 1e6, residual_tol: float = 1e-8,
            B0: np.ndarray | None = None, force: bool = False):
    """Three-sequence fixed-point iteration continuing z0(., c0) to eps != 0.

    Per round, from the current (u, c, ubar):

        u_next    = propagated-kernel(c) + ubar
        c_next    = B0^+ [cokernel proj. of l(response of Z_du ubar + R(u))]
        ubar_next = eps * Green[ Z(z0,.,0) + Z_du(z0,.,0) u + R(u), 0 ]

    with remainder R(u, n, eps) = Z(z0+u, n, eps) - Z(z0, n, 0)
    - Z_du(z0, n, 0) u, all three sequences starting at zero. The
    linearized forcing therefore telescopes to Z(z0+u, n, eps) exactly, so
    a fixed point solves the perturbed recurrence identically.

    Stops on a sup-norm Cauchy increment <= tol confirmed by small
    recurrence and boundary residuals of z0 + u.

    Returns (z, trace) with z = z0(., c0) + u.
    """
    _require_generating(family)
    eps = problem.epsilon if eps is None else float(eps)
    bvp = problem.linear_bvp()
    m, N = problem.system.horizon, problem.system.dim
    r, d = family.kernel_dim, family.cokernel_dim

    if B0 is None:
        B0 = assemble_B0(problem, family, c0)
    suff = check_sufficient(B0)
    if not suff.holds and not force:
        raise SufficiencyError(
            f"B0 row rank {suff.row_rank} < {suff.required_rank}; "
            "sufficient condition fails (pass force=True to override)"
        )
    B0_pinv = pseudoinverse(B0) if B0.size else np.zeros((r, d))

    z0 = family.member(c0)
    Z0 = np.array([problem.Z(z0[n], n, 0.0) for n in range(m)], dtype=float)
    Zdu = [np.asarray(problem.Z_du(z0[n], n, 0.0), dtype=float) for n in range(m)]
    D = family.cokernel_basis
    zero_alpha = np.zeros(bvp.boundary.codim)

    def kernel_member(cvec):
        if r == 0:
            return np.zeros((m + 1, N))
        return np.tensordot(cvec, family.kernel_basis, axes=1)

    u = np.zeros((m + 1, N))
    c = np.zeros(r)
    ubar = np.zeros((m + 1, N))
    records = []
    converged = False
    iterations = 0

    for k in range(max_iter + 1):
        R = np.array([
            np.asarray(problem.Z(z0[n] + u[n], n, eps), dtype=float)
            - Z0[n] - Zdu[n] @ u[n]
            for n in range(m)
        ])
        phi = np.array([Z0[n] + Zdu[n] @ u[n] + R[n] for n in range(m)])

        u_next = kernel_member(c) + ubar
        lin_forcing = np.array([Zdu[n] @ ubar[n] + R[n] for n in range(m)])
        c_next = B0_pinv @ (D.T @ _boundary_of_forcing(bvp, lin_forcing))
        ubar_next = eps * bvp.green(phi, zero_alpha)

        z = z0 + u_next
        rec_res = nonlinear_recurrence_residual(problem, z, eps)
        bc_res = boundary_residual(problem.boundary, z)
        proj_res = float(np.linalg.norm(D.T @ _boundary_of_forcing(bvp, phi)))
        records.append((k, float(np.linalg.norm(c)), float(np.abs(ubar).max()),
                        rec_res, bc_res, proj_res))

        delta = float(np.abs(u_next - u).max())
        u, c, ubar = u_next, c_next, ubar_next
        iterations = k
        if np.abs(u).max() > blowup:
            break
        scale = 1.0 + float(np.abs(z).max())
        if delta <= tol * scale and rec_res <= residual_tol * scale \
                and bc_res <= residual_tol * scale:
            converged = True
            break

    z = z0 + u
    trace = IterationTrace(records=tuple(records), converged=converged,
                           iterations=iterations)
    return z, trace

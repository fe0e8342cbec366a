"""Weakly nonlinear pipeline on the resonant rotation benchmark.

The system rotates the plane by 2*pi/m each step, so after m steps the
monodromy is the identity and the periodic problem is fully resonant
(r = d = 2).  A predator-prey style quadratic perturbation

    z(n+1) = A z(n) + f(n) + eps * Z(z(n))

selects isolated members of the generating family.  The script runs the
full pipeline by hand: classification, generating roots, the sufficiency
gate, and the contraction-style iteration, then measures how far the
perturbed solution drifts from the generating one as eps shrinks.

Run:  python3 demos/weakly_nonlinear_rotation.py
"""

import numpy as np

from resbvp import (
    LotkaVolterraSpec,
    NonlinearProblem,
    OperatorSequence,
    assemble_B0,
    boundary_residual,
    check_sufficient,
    iterate,
    lv_callables,
    nonlinear_recurrence_residual,
    particular_forced,
    periodic,
    rotation_matrix,
    solve_generating,
)


def build(eps):
    m = 6
    system = OperatorSequence.constant(rotation_matrix(2 * np.pi / m), m)
    rng = np.random.default_rng(42)
    f = 0.3 * rng.standard_normal((m, 2))
    f[m - 1] -= particular_forced(system, f)[m]  # make the window sum close
    Z, Z_du = lv_callables(LotkaVolterraSpec.uniform(1))
    return NonlinearProblem(system, f, periodic(2, m), Z, Z_du, eps)


def main():
    problem = build(0.0)
    report, family = problem.linear_bvp().solve(problem.forcing)
    print(f"linear part: {report.classification}, r = {family.kernel_dim}, "
          f"d = {family.cokernel_dim}")

    root = solve_generating(problem, family, [0.5, 0.5])
    print(f"generating root c0 = {root.c0}, |F(c0)| = {root.residual_norm:.2e}")

    B0 = assemble_B0(problem, family, root.c0)
    gate = check_sufficient(B0)
    print(f"sufficiency gate: row rank {gate.row_rank}/{gate.required_rank} "
          f"-> {'holds' if gate.holds else 'fails'}")

    print("\n eps       iters   |z - z0|_inf   recurrence   boundary")
    for eps in (1e-2, 1e-3, 1e-4, 0.0):
        p = build(eps)
        z, trace = iterate(p, family, root.c0)
        gap = np.abs(z - family.member(root.c0)).max()
        print(f" {eps:8.0e}  {trace.iterations:5d}   {gap:12.4e}   "
              f"{nonlinear_recurrence_residual(p, z):10.2e}   "
              f"{boundary_residual(p.boundary, z):10.2e}")
    print("\nThe gap shrinks linearly with eps and vanishes exactly at eps = 0,")
    print("where the iteration returns the generating solution unchanged.")


if __name__ == "__main__":
    main()

"""Plane pressure and shear waves with all-Dirichlet boundary data.

Exact plane waves u = a e exp(-i (kappa/c) x.d) are homogeneous solutions of
the constant-coefficient problem (c = sqrt(3) for pressure waves, c = 1 for
shear waves when lambda = mu = rho = 1). The study prints observed orders for
both wave types and then sweeps the propagation direction to show that on the
structured mesh the asymptotic regime is reached at very different mesh sizes
depending on the direction: along the mesh main diagonal the optimal orders
k+2 / k+1 are visible already at n=4, while oblique directions need finer
meshes at kappa = 1.

Usage::

    python demos/plane_waves.py
"""

import numpy as np

from hdg_elastic import (VARIANTS, Discretization, build_structured_cube,
                         make_case, solve_time_harmonic, tag_boundary)
from hdg_elastic.errors import compute_errors, eoc, problem_data_from_case


def ladder(tag, direction, polarization, ns, k=1, kappa=1.0):
    errs_u, errs_s, hs = [], [], []
    for n in ns:
        case = make_case(tag, kappa=kappa, direction=direction,
                         polarization=polarization)
        mesh = tag_boundary(build_structured_cube(n), "all-dirichlet")
        disc = Discretization(mesh, k)
        sol, _ = solve_time_harmonic(disc, case.material,
                                     problem_data_from_case(case),
                                     VARIANTS["first_order"])
        rep = compute_errors(disc, case.material, case, sol)
        errs_u.append(rep.err_u)
        errs_s.append(rep.err_sigma)
        hs.append(rep.h)
    return errs_u, errs_s, hs


def show(label, errs_u, errs_s, hs):
    ru = eoc(errs_u, hs)[1:]
    rs = eoc(errs_s, hs)[1:]
    print(f"  {label}: EOC(u) = {[f'{r:.2f}' for r in ru]}, "
          f"EOC(sigma) = {[f'{r:.2f}' for r in rs]}")


def main():
    print("default directions (mesh diagonal), k = 1, kappa = 1, n = 1..4")
    for tag in ("pwave", "swave"):
        errs_u, errs_s, hs = ladder(tag, None, None, [1, 2, 3, 4])
        show(tag, errs_u, errs_s, hs)
    print("expected: EOC(u) -> 3, EOC(sigma) -> 2\n")

    print("shear-wave direction sweep (finest-pair EOC at n=3 -> 4):")
    sweeps = [
        ("diagonal   d=(1,1,1)/sqrt(3)", (1, 1, 1), (1, -1, 0)),
        ("oblique    d=(1,2,2)/3      ", (1, 2, 2), (2, 1, -2)),
        ("axis       d=(0,1,0)        ", (0, 1, 0), (0, 0, 1)),
    ]
    for label, d, e in sweeps:
        d = np.asarray(d, float) / np.linalg.norm(d)
        e = np.asarray(e, float) / np.linalg.norm(e)
        errs_u, errs_s, hs = ladder("swave", d, e, [3, 4])
        print(f"  {label}: EOC(u) = {eoc(errs_u, hs)[1]:.2f}, "
              f"EOC(sigma) = {eoc(errs_s, hs)[1]:.2f}")
    print("oblique directions are pre-asymptotic at this resolution; their "
          "rates recover\non finer meshes or at lower frequency.")


if __name__ == "__main__":
    main()

"""Skeleton system assembly/solve, monolithic oracles, reconstruction."""

import numpy as np
import pytest

from hdg_elastic import (VARIANTS, BoundaryTag, Discretization, ProblemData,
                         assemble_hybrid, build_structured_cube, flux_residual,
                         load_solution, make_case, save_solution,
                         solve_monolithic, solve_skeleton, solve_time_harmonic,
                         tag_boundary)
from hdg_elastic.errors import problem_data_from_case
from hdg_elastic.global_system import solve_dirichlet_trace


@pytest.fixture(scope="module")
def poly_setup():
    case = make_case("polynomial", kappa=1.0, k=1)
    mesh = tag_boundary(build_structured_cube(1), "mixed")
    disc = Discretization(mesh, 1)
    return disc, case, problem_data_from_case(case)


def test_skeleton_dimension(poly_setup):
    disc, case, data = poly_setup
    system = assemble_hybrid(disc, case.material, data, VARIANTS["first_order"])
    # 18 faces, 4 Dirichlet, 3 components x 3 basis functions per face
    assert system.matrix.shape == (126, 126)


def test_homogeneous_data_zero_solution(poly_setup):
    disc, case, _ = poly_setup
    data = ProblemData(kappa=1.0)
    for variant in VARIANTS.values():
        system = assemble_hybrid(disc, case.material, data, variant)
        assert np.abs(system.rhs).max() == 0
        uhat = solve_skeleton(system)
        assert np.abs(uhat).max() <= 1e-14


def test_dirichlet_trace_projection(poly_setup):
    disc, _, _ = poly_setup
    g = lambda p: np.stack([1 + p[:, 0], p[:, 1] - 2 * p[:, 2], p[:, 2]], axis=1)
    vals = solve_dirichlet_trace(disc, g)
    for fi, face in enumerate(disc.mesh.faces):
        pts = disc.face_data(fi).points
        if face.tag == BoundaryTag.DIRICHLET:
            assert np.abs(disc.eval_face(fi, vals[fi], pts) - g(pts)).max() < 1e-12
        else:
            assert np.abs(vals[fi]).max() == 0


def test_dirichlet_trace_residual_orthogonal(poly_setup):
    disc, _, _ = poly_setup
    case = make_case("pwave", kappa=1.0)
    vals = solve_dirichlet_trace(disc, case.g_d)
    for fi, face in enumerate(disc.mesh.faces):
        if face.tag != BoundaryTag.DIRICHLET:
            continue
        fd = disc.face_data(fi)
        resid = case.g_d(fd.points) - disc.eval_face(fi, vals[fi], fd.points)
        moments = np.einsum("q,qd,ql->dl", fd.weights, resid, fd.chi)
        assert np.abs(moments).max() < 1e-11


def test_hybrid_matches_monolithic_all_variants(poly_setup):
    disc, case, data = poly_setup
    for variant in VARIANTS.values():
        sol, _ = solve_time_harmonic(disc, case.material, data, variant)
        ref = solve_monolithic(disc, case.material, data, variant, form="second")
        scale = np.abs(ref.u).max()
        assert np.abs(sol.u - ref.u).max() < 1e-9 * scale
        assert np.abs(sol.sigma - ref.sigma).max() < 1e-9 * np.abs(ref.sigma).max()
        assert np.abs(sol.uhat - ref.uhat).max() < 1e-9 * scale


def test_first_order_form_equivalence(poly_setup):
    # first-order system in sigma = (i/kappa) sigma_tilde gives the same fields
    disc, case, data = poly_setup
    sol, _ = solve_time_harmonic(disc, case.material, data,
                                 VARIANTS["first_order"])
    ref = solve_monolithic(disc, case.material, data, VARIANTS["first_order"],
                           form="first")
    assert np.abs(ref.u - sol.u).max() < 1e-10 * np.abs(sol.u).max()
    scaled = sol.first_order_stress()
    assert np.abs(ref.sigma - scaled).max() < 1e-10 * np.abs(scaled).max()


def test_flux_single_valued_varcoeff():
    case = make_case("varcoeff", kappa=1.0)
    mesh = tag_boundary(build_structured_cube(2), "mixed")
    disc = Discretization(mesh, 1)
    data = problem_data_from_case(case)
    sol, _ = solve_time_harmonic(disc, case.material, data,
                                 VARIANTS["first_order"])
    assert flux_residual(disc, case.material, data, VARIANTS["first_order"],
                         sol) < 1e-9


def test_skeleton_residual_varcoeff():
    case = make_case("varcoeff", kappa=1.0)
    mesh = tag_boundary(build_structured_cube(2), "mixed")
    disc = Discretization(mesh, 1)
    data = problem_data_from_case(case)
    system = assemble_hybrid(disc, case.material, data, VARIANTS["first_order"])
    uhat = solve_skeleton(system)
    x = uhat[system.skeleton.active].reshape(-1)
    resid = np.linalg.norm(system.matrix @ x - system.rhs)
    assert resid <= 1e-10 * max(np.linalg.norm(system.rhs), 1.0)


def test_impedance_kappa_zero_is_neumann_matrix():
    mesh_imp = tag_boundary(build_structured_cube(1), "impedance")
    mesh_neu = tag_boundary(build_structured_cube(1), "all-neumann")
    mat = make_case("polynomial", kappa=1.0, k=1).material
    data = ProblemData(kappa=0.0)
    variant = VARIANTS["conservative"]
    a = assemble_hybrid(Discretization(mesh_imp, 1), mat, data, variant)
    b = assemble_hybrid(Discretization(mesh_neu, 1), mat, data, variant)
    diff = (a.matrix - b.matrix).toarray()
    assert np.abs(diff).max() < 1e-13 * np.abs(b.matrix.toarray()).max()


def test_impedance_boundary_condition_satisfied():
    # reconstructed flux satisfies sigma_n - i kappa uhat = g_R moments
    case = make_case("pwave", kappa=1.0)
    mesh = tag_boundary(build_structured_cube(2), "impedance")
    disc = Discretization(mesh, 1)
    data = problem_data_from_case(case)
    sol, _ = solve_time_harmonic(disc, case.material, data,
                                 VARIANTS["first_order"])
    assert flux_residual(disc, case.material, data, VARIANTS["first_order"],
                         sol) < 1e-9


def test_neumann_boundary_condition_satisfied(poly_setup):
    disc, case, data = poly_setup
    sol, _ = solve_time_harmonic(disc, case.material, data,
                                 VARIANTS["first_order"])
    assert flux_residual(disc, case.material, data, VARIANTS["first_order"],
                         sol) < 1e-9


def test_polynomial_exactness_k2():
    from hdg_elastic import compute_errors
    case = make_case("polynomial", kappa=1.0, k=2)
    mesh = tag_boundary(build_structured_cube(1), "all-dirichlet")
    disc = Discretization(mesh, 2)
    sol, _ = solve_time_harmonic(disc, case.material,
                                 problem_data_from_case(case),
                                 VARIANTS["first_order"])
    rep = compute_errors(disc, case.material, case, sol)
    assert rep.rel_err_u < 1e-10
    assert rep.rel_err_sigma < 1e-10


def test_skeleton_dof_advantage_k2():
    mesh = tag_boundary(build_structured_cube(2), "mixed")
    disc = Discretization(mesh, 2)
    case = make_case("polynomial", kappa=1.0, k=2)
    _, info = solve_time_harmonic(disc, case.material,
                                  problem_data_from_case(case),
                                  VARIANTS["first_order"])
    interior = mesh.num_elements * (6 * disc.nV + 3 * disc.nW)
    assert info["dofs_skeleton"] < interior
    all_traces = mesh.num_faces * 3 * disc.nF
    assert info["dofs_total"] == all_traces + interior


def test_solution_io_roundtrip(tmp_path, poly_setup):
    disc, case, data = poly_setup
    sol, _ = solve_time_harmonic(disc, case.material, data,
                                 VARIANTS["first_order"])
    path = tmp_path / "sol.npz"
    save_solution(path, sol, header={"n": 1})
    again = load_solution(path)
    assert np.abs(again.sigma - sol.sigma).max() == 0
    assert np.abs(again.u - sol.u).max() == 0
    assert np.abs(again.uhat - sol.uhat).max() == 0
    assert again.kappa == sol.kappa
    assert again.variant_tag == sol.variant_tag
    assert again.meta["n"] == 1


def test_dirichlet_trace_equals_projected_data(poly_setup):
    disc, case, data = poly_setup
    sol, _ = solve_time_harmonic(disc, case.material, data,
                                 VARIANTS["first_order"])
    for fi, face in enumerate(disc.mesh.faces):
        if face.tag != BoundaryTag.DIRICHLET:
            continue
        ref = disc.project_face(fi, data.dirichlet())
        assert np.abs(sol.uhat[fi] - ref).max() < 1e-12 * max(np.abs(ref).max(), 1)

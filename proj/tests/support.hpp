#pragma once

#include <vector>

#include <Eigen/Core>

#include "afem/assembly.hpp"
#include "afem/elements.hpp"
#include "afem/mesh.hpp"
#include "afem/solver.hpp"

namespace afem::test {

inline Mesh unit_square(int n) { return build_initial_mesh({DomainKind::unit_square, n}); }

inline Mesh single_triangle(Point a, Point b, Point c) {
    return Mesh({a, b, c}, {{0, 1, 2}});
}

inline SchemeSpec stab_p1p0() { return SchemeSpec::stabilized(Family::stab_p1p0); }

inline SchemeSpec stab_p1p1() {
    StabParams s;
    s.tau_T = 0.1;
    s.ell = 1;
    return SchemeSpec::stabilized(Family::stab_p1p1, s);
}

inline std::vector<SchemeSpec> all_schemes() {
    return {SchemeSpec::taylor_hood(), SchemeSpec::mini(), stab_p1p0(), stab_p1p1()};
}

// Discrete solution with homogeneous boundary data.
inline Solution solve_point_force(const Mesh& mesh, const SchemeSpec& scheme, const DofMap& dofs,
                                  const std::vector<PointSource>& sources) {
    SaddleSystem sys = assemble(mesh, scheme, dofs);
    sys.load = delta_load(mesh, scheme, dofs, sources);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dofs.boundary_velocity_dofs().size());
    return solve_saddle(apply_dirichlet(sys, dofs, g));
}

// A few rounds of refinement toward z so that meshes are graded.
inline Mesh graded_mesh(int rounds, Point z = Point(0.5, 0.5), int n = 2) {
    Mesh mesh = unit_square(n);
    for (int r = 0; r < rounds; ++r) {
        std::vector<int> marked = mesh.elements_containing(z);
        mesh = mesh.bisect(marked);
    }
    return mesh;
}

} // namespace afem::test

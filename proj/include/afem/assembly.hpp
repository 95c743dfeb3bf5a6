#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "afem/elements.hpp"
#include "afem/mesh.hpp"

namespace afem {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Point force F at z.
struct PointSource {
    Point z;
    Eigen::Vector2d F;
};

/// Blocks of [A B^T; B -M] over all velocity dofs (before boundary elimination).
struct SaddleSystem {
    SparseMatrix A;  ///< velocity x velocity: stiffness plus tau_div div-div
    SparseMatrix B;  ///< pressure x velocity: -(q, div v)
    SparseMatrix M;  ///< pressure x pressure: gradient and jump penalties; zero for stable pairs
    Eigen::VectorXd load;
    Eigen::VectorXd mean;  ///< integral of each pressure basis function
};

/// Quadrature degree used for all element matrices; exact for every family.
constexpr int assembly_quadrature_degree = 4;

SaddleSystem assemble(const Mesh& mesh, const SchemeSpec& scheme, const DofMap& dofs);

/// Velocity load with entries F_i * phi(z). Throws InputError if a source lies outside the mesh.
Eigen::VectorXd delta_load(const Mesh& mesh, const SchemeSpec& scheme, const DofMap& dofs,
                           std::span<const PointSource> sources);

/// System on free velocity dofs after eliminating Dirichlet values.
struct ConstrainedSystem {
    SparseMatrix A;  ///< free x free
    SparseMatrix B;  ///< pressure x free
    SparseMatrix M;
    Eigen::VectorXd rhs_u;
    Eigen::VectorXd rhs_p;
    Eigen::VectorXd mean;
    std::vector<int> free_dofs;       ///< global velocity dof of each free unknown
    Eigen::VectorXd boundary_values;  ///< full velocity vector, g on boundary dofs and 0 elsewhere
};

/// `g` holds one value per entry of dofs.boundary_velocity_dofs(). Throws InputError on a size mismatch.
ConstrainedSystem apply_dirichlet(const SaddleSystem& system, const DofMap& dofs, const Eigen::VectorXd& g);

/// Nodal values of a velocity field at the boundary dofs, in boundary_velocity_dofs() order.
Eigen::VectorXd boundary_data(const DofMap& dofs, const VectorField& u);

} // namespace afem

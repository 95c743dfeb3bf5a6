#pragma once

#include <Eigen/Core>

#include "afem/assembly.hpp"

namespace afem {

struct Solution {
    Eigen::VectorXd velocity;  ///< all velocity dofs, boundary values included
    Eigen::VectorXd pressure;
    double residual = 0;       ///< relative residual of the augmented system
    double pressure_mean = 0;  ///< plain mean of p over the domain
    double multiplier = 0;     ///< Lagrange multiplier of the mean constraint
};

struct SolverOptions {
    /// Systems smaller than this use a dense LU instead of UMFPACK.
    int dense_threshold = 2000;
    int max_refinement_steps = 3;
};

/// Solves [A B^T 0; B -M c; 0 c^T 0] [u; p; lambda] = [f; g; 0], where the last
/// row pins the pressure mean to zero. Throws SolverError on a failed
/// factorization and InputError if there is no free velocity dof.
Solution solve_saddle(const ConstrainedSystem& system, const SolverOptions& opts = {});

} // namespace afem

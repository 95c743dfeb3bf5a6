#pragma once

#include <functional>

#include <Eigen/Core>

#include "afem/elements.hpp"
#include "afem/mesh.hpp"
#include "afem/quadrature.hpp"
#include "afem/solver.hpp"

namespace afem {

/// Free-space Stokes flow driven by the point force F at z.
struct StokesletSpec {
    Point z;
    Eigen::Vector2d F;
};

struct StokesletValue {
    Eigen::Vector2d u;
    double p = 0;
    Eigen::Matrix2d grad_u;  ///< row i is grad(u_i)
};

/// u = -(1/4pi)(log|r| I - r r^T/|r|^2) F, p = r.F / (2pi |r|^2) with r = x - z.
/// Throws SingularityError at x = z.
StokesletValue stokeslet(const StokesletSpec& spec, const Point& x);

/// Reference solution for error measurement.
struct ExactSolution {
    std::function<Eigen::Vector2d(const Point&)> velocity;
    std::function<Eigen::Matrix2d(const Point&)> gradient;
    std::function<double(const Point&)> pressure;
};

ExactSolution stokeslet_solution(const StokesletSpec& spec);

struct ErrorNorms {
    double err_u = 0;  ///< weighted L2 norm of grad(u - u_h)
    double err_p = 0;  ///< weighted L2 quotient norm of p - p_h
    double total = 0;
    bool converged = true;
};

/// Weighted errors; the pressure constant is removed by subtracting the weighted mean.
ErrorNorms weighted_error(const Mesh& mesh, const DofMap& dofs, const Solution& solution,
                          const ExactSolution& exact, const WeightSpec& weight, double tol = 1e-10);

} // namespace afem

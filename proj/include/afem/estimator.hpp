#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "afem/assembly.hpp"
#include "afem/elements.hpp"
#include "afem/mesh.hpp"
#include "afem/quadrature.hpp"
#include "afem/solver.hpp"

namespace afem {

/// Squared contributions to one element indicator.
struct IndicatorTerms {
    double residual = 0;    ///< h^2 D^a |lap u - grad p|^2
    double divergence = 0;  ///< kappa |div u|^2 in the weighted norm
    double jump = 0;        ///< h D^a |[(grad u - p I) nu]|^2 over interior sides
    double source = 0;      ///< h^a |F|^2 for each source in the closed element

    double squared() const { return residual + divergence + jump + source; }
};

struct IndicatorField {
    std::vector<double> eta;
    std::vector<IndicatorTerms> terms;
    Family family = Family::taylor_hood;
    WeightSpec weight;

    double global() const;
};

/// sqrt of the sum of squares.
double global_estimator(std::span<const double> eta);
inline double global_estimator(const IndicatorField& field) { return field.global(); }

/// Normal flux jump (grad u - p I) nu+ + (grad u - p I) nu- on an interior
/// side, where nu+ is the unit normal pointing into T+. T+ is the lower-id
/// neighbor unless `swap` is set.
struct EdgeJump {
    std::vector<Point> points;
    std::vector<double> weights;  ///< physical quadrature weights (sum to |S|)
    std::vector<Eigen::Vector2d> jump;
};

/// Throws InputError for a boundary edge.
EdgeJump jump_trace(const Mesh& mesh, const DofMap& dofs, const Solution& solution, int edge,
                    bool swap = false);

struct EstimatorOptions {
    double tol = 1e-8;  ///< weighted quadrature tolerance of the divergence term
    int edge_points = 4;
};

/// Indicator of one element, jumps over all of its interior sides included.
double element_indicator(const Mesh& mesh, const SchemeSpec& scheme, const DofMap& dofs,
                         const Solution& solution, const WeightSpec& weight,
                         std::span<const PointSource> sources, int t, const EstimatorOptions& opts = {});

IndicatorTerms element_indicator_terms(const Mesh& mesh, const SchemeSpec& scheme, const DofMap& dofs,
                                       const Solution& solution, const WeightSpec& weight,
                                       std::span<const PointSource> sources, int t,
                                       const EstimatorOptions& opts = {});

/// All indicators. Each interior side's jump integral is added to both neighbors.
IndicatorField compute_indicators(const Mesh& mesh, const SchemeSpec& scheme, const DofMap& dofs,
                                  const Solution& solution, const WeightSpec& weight,
                                  std::span<const PointSource> sources, const EstimatorOptions& opts = {});

} // namespace afem

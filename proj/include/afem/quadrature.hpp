#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "afem/mesh.hpp"

namespace afem {

/// Power-of-distance weight |x - z|^alpha, or the multi-source weight that is
/// |x - z|^alpha inside the ball of radius d_Z/2 around each source and 1 elsewhere.
class WeightSpec {
public:
    enum class Mode { single, multi };

    /// Any finite alpha; weighted_integral near a source additionally needs (-2, 2).
    static WeightSpec single(const Point& z, double alpha);
    static WeightSpec multi(std::vector<Point> sources, double alpha, double d_z);
    /// Multi-source weight with d_Z = min(dist(Z, boundary), min pairwise distance).
    static WeightSpec multi(std::vector<Point> sources, double alpha, const Mesh& mesh);
    /// Single weight for one source, multi weight otherwise.
    static WeightSpec for_sources(std::vector<Point> sources, double alpha, const Mesh& mesh);

    Mode mode() const { return mode_; }
    double alpha() const { return alpha_; }
    std::span<const Point> sources() const { return sources_; }
    double d_z() const { return d_z_; }

    /// Same sources and mode with the exponent negated.
    WeightSpec dual() const;

    /// Throws SingularityError at a source when the exponent is negative.
    double operator()(const Point& x) const;

private:
    WeightSpec(Mode mode, double alpha, std::vector<Point> sources, double d_z);

    Mode mode_;
    double alpha_;
    std::vector<Point> sources_;
    double d_z_;
};

inline double weight_eval(const WeightSpec& w, const Point& x) { return w(x); }

/// Rule on the reference triangle; weights sum to 1 (multiply by the area).
struct QuadratureRule {
    std::vector<std::array<double, 3>> points;  ///< barycentric coordinates
    std::vector<double> weights;
    int degree = 0;

    std::size_t size() const { return weights.size(); }
};

/// Collapsed Gauss product rule exact for polynomials of total degree `degree`.
const QuadratureRule& triangle_rule(int degree);

/// Gauss-Legendre nodes and weights on [0, 1].
struct LineRule {
    std::vector<double> points;
    std::vector<double> weights;
    int degree = 0;
};

/// n-point Gauss-Legendre rule on [0, 1], exact to degree 2n - 1.
const LineRule& gauss_legendre(int n);

using ScalarField = std::function<double(const Point&)>;

/// Integral of f over a triangle with a fixed rule.
double integrate(const std::array<Point, 3>& tri, const ScalarField& f, const QuadratureRule& rule);

struct IntegralResult {
    double value = 0;
    bool converged = true;  ///< false if the subdivision budget ran out before tol
    int levels = 0;         ///< deepest grading level used
};

struct WeightedIntegralOptions {
    double tol = 1e-8;
    int rule_degree = 8;
    int max_levels = 40;
};

/// Integral of weight * f over a triangle. Sources within one diameter of the
/// triangle trigger geometric grading (ratio 1/2) toward the closest point of
/// the triangle to the source; otherwise a fixed rule with pointwise weights.
IntegralResult weighted_integral(const std::array<Point, 3>& tri, const WeightSpec& weight,
                                 const ScalarField& f, const WeightedIntegralOptions& opts = {});

IntegralResult weighted_cell_integral(const Mesh& mesh, int t, const WeightSpec& weight,
                                      const ScalarField& f, double tol);

/// Gauss-Legendre integral over edge e. `g` receives the physical point and
/// the arclength parameter measured from edge.vertices[0].
double edge_integral(const Mesh& mesh, int e, const std::function<double(const Point&, double)>& g,
                     int degree = 7);

} // namespace afem

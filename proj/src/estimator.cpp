#include "afem/estimator.hpp"

#include <cmath>

#include "afem/errors.hpp"

namespace afem {

double IndicatorField::global() const { return global_estimator(eta); }

double global_estimator(std::span<const double> eta) {
    double sum = 0;
    for (double e : eta) sum += e * e;
    return std::sqrt(sum);
}

namespace {

// Flux (grad u - p I) n seen from element t at physical point x.
Eigen::Vector2d flux(const Mesh& mesh, const DofMap& dofs, const Solution& sol, const ElementMap& map, int t,
                     const Point& x, const Eigen::Vector2d& n, LocalBasis& basis) {
    eval_basis(dofs.family(), map, mesh.barycentric(t, x), basis);
    FieldValue f = evaluate_field(dofs, basis, t, sol.velocity, sol.pressure);
    return f.grad_u * n - f.p * n;
}

// Inward unit normal of element t on edge e.
Eigen::Vector2d inward_normal(const Mesh& mesh, int t, int e) {
    const auto& edge = mesh.edge(e);
    const Point& a = mesh.vertex(edge.vertices[0]);
    const Point& b = mesh.vertex(edge.vertices[1]);
    Eigen::Vector2d n(-(b - a).y(), (b - a).x());
    n.normalize();
    auto c = mesh.corners(t);
    Point centroid = (c[0] + c[1] + c[2]) / 3.0;
    if (n.dot(centroid - a) < 0) n = -n;
    return n;
}

double jump_squared_integral(const Mesh& mesh, const DofMap& dofs, const Solution& sol, int e, int points) {
    const auto& edge = mesh.edge(e);
    const Point& a = mesh.vertex(edge.vertices[0]);
    const Point& b = mesh.vertex(edge.vertices[1]);
    const double len = (b - a).norm();
    const int tp = edge.elements[0], tm = edge.elements[1];
    const ElementMap map_p = element_map(mesh, tp), map_m = element_map(mesh, tm);
    const Eigen::Vector2d np = inward_normal(mesh, tp, e);
    const LineRule& rule = gauss_legendre(points);
    LocalBasis basis;
    double sum = 0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        Point x = a + rule.points[q] * (b - a);
        Eigen::Vector2d j = flux(mesh, dofs, sol, map_p, tp, x, np, basis) + flux(mesh, dofs, sol, map_m, tm, x, -np, basis);
        sum += rule.weights[q] * j.squaredNorm();
    }
    return len * sum;
}

double d_power(const Mesh& mesh, int t, const WeightSpec& weight) {
    return std::pow(element_geometry(mesh, t, weight).D, weight.alpha());
}

IndicatorTerms volume_terms(const Mesh& mesh, const SchemeSpec& scheme, const DofMap& dofs, const Solution& sol,
                            const WeightSpec& weight, std::span<const PointSource> sources, int t,
                            const EstimatorOptions& opts) {
    IndicatorTerms terms;
    const ElementMap map = element_map(mesh, t);
    const double h = mesh.diameter(t);
    const double d_alpha = d_power(mesh, t, weight);
    LocalBasis basis;

    auto field_at = [&](const Point& x) {
        eval_basis(dofs.family(), map, mesh.barycentric(t, x), basis);
        return evaluate_field(dofs, basis, t, sol.velocity, sol.pressure);
    };

    // Only the Taylor-Hood and mini velocities have a non-zero elementwise
    // Laplacian; continuous P1 pressure contributes grad p for every P1 family.
    if (scheme.family != Family::stab_p1p0) {
        const QuadratureRule& rule = triangle_rule(4);
        double sum = 0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto& l = rule.points[q];
            eval_basis(dofs.family(), map, Eigen::Vector3d(l[0], l[1], l[2]), basis);
            FieldValue f = evaluate_field(dofs, basis, t, sol.velocity, sol.pressure);
            sum += rule.weights[q] * (f.laplacian_u - f.grad_p).squaredNorm();
        }
        terms.residual = h * h * d_alpha * map.area * sum;
    }

    const double kappa = scheme.stab ? 1.0 + scheme.stab->tau_div * scheme.stab->tau_div : 1.0;
    WeightedIntegralOptions wopts;
    wopts.tol = opts.tol;
    wopts.rule_degree = 6;
    auto div = weighted_integral(
        map.corners, weight,
        [&](const Point& x) {
            FieldValue f = field_at(x);
            double d = f.grad_u.trace();
            return d * d;
        },
        wopts);
    terms.divergence = kappa * div.value;

    for (const auto& s : sources)
        if (mesh.contains(t, s.z)) terms.source += std::pow(h, weight.alpha()) * s.F.squaredNorm();
    return terms;
}

} // namespace

EdgeJump jump_trace(const Mesh& mesh, const DofMap& dofs, const Solution& solution, int e, bool swap) {
    if (e < 0 || e >= mesh.num_edges()) throw InputError("unknown edge id");
    const auto& edge = mesh.edge(e);
    if (edge.on_boundary()) throw InputError("jump requested on a boundary edge");
    const Point& a = mesh.vertex(edge.vertices[0]);
    const Point& b = mesh.vertex(edge.vertices[1]);
    const double len = (b - a).norm();
    int tp = edge.elements[0], tm = edge.elements[1];
    if (swap) std::swap(tp, tm);
    const ElementMap map_p = element_map(mesh, tp), map_m = element_map(mesh, tm);
    const Eigen::Vector2d nu_p = inward_normal(mesh, tp, e);
    const Eigen::Vector2d nu_m = inward_normal(mesh, tm, e);

    EdgeJump out;
    const LineRule& rule = gauss_legendre(4);
    LocalBasis basis;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        Point x = a + rule.points[q] * (b - a);
        out.points.push_back(x);
        out.weights.push_back(rule.weights[q] * len);
        out.jump.push_back(flux(mesh, dofs, solution, map_p, tp, x, nu_p, basis) +
                           flux(mesh, dofs, solution, map_m, tm, x, nu_m, basis));
    }
    return out;
}

IndicatorTerms element_indicator_terms(const Mesh& mesh, const SchemeSpec& scheme, const DofMap& dofs,
                                       const Solution& solution, const WeightSpec& weight,
                                       std::span<const PointSource> sources, int t,
                                       const EstimatorOptions& opts) {
    if (t < 0 || t >= mesh.num_elements()) throw InputError("unknown element id");
    IndicatorTerms terms = volume_terms(mesh, scheme, dofs, solution, weight, sources, t, opts);
    const double scale = mesh.diameter(t) * d_power(mesh, t, weight);
    for (int e : mesh.element_edges(t)) {
        if (mesh.edge(e).on_boundary()) continue;
        terms.jump += scale * jump_squared_integral(mesh, dofs, solution, e, opts.edge_points);
    }
    return terms;
}

double element_indicator(const Mesh& mesh, const SchemeSpec& scheme, const DofMap& dofs, const Solution& solution,
                         const WeightSpec& weight, std::span<const PointSource> sources, int t,
                         const EstimatorOptions& opts) {
    return std::sqrt(element_indicator_terms(mesh, scheme, dofs, solution, weight, sources, t, opts).squared());
}

IndicatorField compute_indicators(const Mesh& mesh, const SchemeSpec& scheme, const DofMap& dofs,
                                  const Solution& solution, const WeightSpec& weight,
                                  std::span<const PointSource> sources, const EstimatorOptions& opts) {
    const int nt = mesh.num_elements();
    IndicatorField field{{}, {}, scheme.family, weight};
    field.terms.resize(nt);
    std::vector<double> scale(nt);
    for (int t = 0; t < nt; ++t) {
        field.terms[t] = volume_terms(mesh, scheme, dofs, solution, weight, sources, t, opts);
        scale[t] = mesh.diameter(t) * d_power(mesh, t, weight);
    }
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const auto& edge = mesh.edge(e);
        if (edge.on_boundary()) continue;
        const double j = jump_squared_integral(mesh, dofs, solution, e, opts.edge_points);
        field.terms[edge.elements[0]].jump += scale[edge.elements[0]] * j;
        field.terms[edge.elements[1]].jump += scale[edge.elements[1]] * j;
    }
    field.eta.resize(nt);
    for (int t = 0; t < nt; ++t) field.eta[t] = std::sqrt(field.terms[t].squared());
    return field;
}

} // namespace afem

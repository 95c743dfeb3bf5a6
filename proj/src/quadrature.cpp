#include "afem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "afem/errors.hpp"

namespace afem {

WeightSpec::WeightSpec(Mode mode, double alpha, std::vector<Point> sources, double d_z)
    : mode_(mode), alpha_(alpha), sources_(std::move(sources)), d_z_(d_z) {
    if (!std::isfinite(alpha_)) throw InputError("weight exponent must be finite");
    if (sources_.empty()) throw InputError("weight needs at least one source");
}

WeightSpec WeightSpec::single(const Point& z, double alpha) {
    return WeightSpec(Mode::single, alpha, {z}, std::numeric_limits<double>::infinity());
}

WeightSpec WeightSpec::multi(std::vector<Point> sources, double alpha, double d_z) {
    if (!(d_z > 0)) throw InputError("multi-source weight requires d_Z > 0");
    return WeightSpec(Mode::multi, alpha, std::move(sources), d_z);
}

WeightSpec WeightSpec::multi(std::vector<Point> sources, double alpha, const Mesh& mesh) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sources.size(); ++i) {
        d = std::min(d, distance_to_boundary(mesh, sources[i]));
        for (std::size_t j = i + 1; j < sources.size(); ++j) d = std::min(d, (sources[i] - sources[j]).norm());
    }
    return multi(std::move(sources), alpha, d);
}

WeightSpec WeightSpec::for_sources(std::vector<Point> sources, double alpha, const Mesh& mesh) {
    if (sources.size() == 1) return single(sources.front(), alpha);
    return multi(std::move(sources), alpha, mesh);
}

WeightSpec WeightSpec::dual() const { return WeightSpec(mode_, -alpha_, sources_, d_z_); }

double WeightSpec::operator()(const Point& x) const {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& z : sources_) r = std::min(r, (x - z).norm());
    if (mode_ == Mode::multi && r >= 0.5 * d_z_) return 1.0;
    if (r == 0) {
        if (alpha_ < 0) throw SingularityError("weight evaluated at a source with negative exponent");
        return alpha_ == 0 ? 1.0 : 0.0;
    }
    return std::pow(r, alpha_);
}

namespace {

LineRule make_gauss_legendre(int n) {
    LineRule rule;
    rule.degree = 2 * n - 1;
    rule.points.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton iteration on P_n from the Chebyshev-like initial guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1, p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1, p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
        }
        rule.points[n - 1 - i] = 0.5 * (x + 1);
        rule.weights[n - 1 - i] = 1.0 / ((1 - x * x) * dp * dp);  // 2/((1-x^2)P'^2) scaled to [0,1]
    }
    return rule;
}

constexpr int max_line_points = 48;
constexpr int max_triangle_degree = 60;

QuadratureRule make_triangle_rule(int degree) {
    // Duffy map x = u, y = (1 - u) v; Jacobian (1 - u) raises the u-degree by one.
    const int n = std::max(1, (degree + 3) / 2);
    const LineRule& g = gauss_legendre(n);
    QuadratureRule rule;
    rule.degree = degree;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double u = g.points[i], v = g.points[j];
            double x = u, y = (1 - u) * v;
            rule.points.push_back({1 - x - y, x, y});
            rule.weights.push_back(2 * g.weights[i] * g.weights[j] * (1 - u));
        }
    }
    return rule;
}

double point_segment_distance(const Point& x, const Point& a, const Point& b, Point& closest) {
    Point d = b - a;
    double s = std::clamp((x - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
    closest = a + s * d;
    return (closest - x).norm();
}

double signed_area(const Point& a, const Point& b, const Point& c) {
    return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

// Closest point of the closed triangle to z, and its distance.
double closest_point(const std::array<Point, 3>& tri, const Point& z, Point& closest) {
    double a = signed_area(tri[0], tri[1], tri[2]);
    double l0 = signed_area(z, tri[1], tri[2]) / a;
    double l1 = signed_area(tri[0], z, tri[2]) / a;
    double l2 = signed_area(tri[0], tri[1], z) / a;
    if (l0 >= 0 && l1 >= 0 && l2 >= 0) {
        closest = z;
        return 0;
    }
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 3; ++j) {
        Point c;
        double d = point_segment_distance(z, tri[j], tri[(j + 1) % 3], c);
        if (d < best) best = d, closest = c;
    }
    return best;
}

double diameter(const std::array<Point, 3>& tri) {
    return std::max({(tri[0] - tri[1]).norm(), (tri[1] - tri[2]).norm(), (tri[2] - tri[0]).norm()});
}

struct Grader {
    const WeightSpec& weight;
    const ScalarField& f;
    const WeightedIntegralOptions& opts;
    const QuadratureRule& rule;
    IntegralResult result{};

    double plain(const std::array<Point, 3>& tri) const {
        return integrate(tri, [&](const Point& x) { return weight(x) * f(x); }, rule);
    }

    // Integral over the part of the fan (c, p, q) with radial parameter s in [s0, s1],
    // x = c + s((1 - t)(p - c) + t(q - c)). The weight is only singular at s = 0;
    // in t it is smooth as long as the fan is narrow, see split().
    double fan(const Point& c, const Point& p, const Point& q, double s0, double s1) const {
        const double jac = 2 * std::abs(signed_area(c, p, q));
        const LineRule& gs = gauss_legendre(std::min(max_line_points, opts.rule_degree / 2 + 3));
        const LineRule& gt = gauss_legendre(std::min(max_line_points, opts.rule_degree / 2 + 1));
        double sum = 0;
        for (std::size_t i = 0; i < gs.points.size(); ++i) {
            const double s = s0 + (s1 - s0) * gs.points[i];
            for (std::size_t j = 0; j < gt.points.size(); ++j) {
                const double t = gt.points[j];
                const Point x = c + s * ((1 - t) * (p - c) + t * (q - c));
                sum += gs.weights[i] * gt.weights[j] * s * weight(x) * f(x);
            }
        }
        return sum * (s1 - s0) * jac;
    }

    // Points on pq cutting the angle at c into pieces of at most pi/12.
    static std::vector<Point> split(const Point& c, const Point& p, const Point& q) {
        const Point a = p - c, b = q - c;
        const double phi = std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
        const int m = std::max(1, static_cast<int>(std::ceil(std::abs(phi) / (std::numbers::pi / 12))));
        std::vector<Point> cuts{p};
        const double t0 = std::atan2(a.y(), a.x());
        const Point d = q - p;
        for (int k = 1; k < m; ++k) {
            const double th = t0 + phi * k / m;
            const Point e(std::cos(th), std::sin(th));
            const double t = -(e.x() * a.y() - e.y() * a.x()) / (e.x() * d.y() - e.y() * d.x());
            cuts.push_back(p + t * d);
        }
        cuts.push_back(q);
        return cuts;
    }

    // Shells s in [2^-(k+1), 2^-k] towards the apex c, then the remaining core.
    void apex(const Point& c, const Point& p, const Point& q) {
        const std::vector<Point> cuts = split(c, p, q);
        auto ring = [&](double s0, double s1) {
            double v = 0;
            for (std::size_t k = 0; k + 1 < cuts.size(); ++k) v += fan(c, cuts[k], cuts[k + 1], s0, s1);
            return v;
        };
        double acc = 0;
        bool done = false;
        int level = 0;
        double s = 1;
        const double reach = std::max((p - c).norm(), (q - c).norm());
        // Below this scale the rule's points would round onto c itself.
        const double floor = 1e-12 * std::max(1.0, c.lpNorm<Eigen::Infinity>());
        for (; level < opts.max_levels; ++level) {
            if (s * reach < floor) break;
            const double shell = ring(0.5 * s, s);
            acc += shell;
            s *= 0.5;
            if (level >= 2 && std::abs(shell) <= opts.tol * std::abs(acc)) {
                done = true;
                break;
            }
        }
        acc += ring(0, s);
        result.value += acc;
        result.levels = std::max(result.levels, level + 1);
        if (!done) result.converged = false;
    }

    void run(const std::array<Point, 3>& tri, int depth) {
        const double h = diameter(tri);
        std::vector<Point> near;
        Point centre = tri[0];
        for (const auto& z : weight.sources()) {
            Point c;
            if (closest_point(tri, z, c) <= h) {
                near.push_back(z);
                centre = c;
            }
        }
        if (near.empty()) {
            result.value += plain(tri);
            return;
        }
        if (near.size() > 1 && depth < 16) {
            Point m01 = 0.5 * (tri[0] + tri[1]), m12 = 0.5 * (tri[1] + tri[2]), m20 = 0.5 * (tri[2] + tri[0]);
            run({tri[0], m01, m20}, depth + 1);
            run({m01, tri[1], m12}, depth + 1);
            run({m20, m12, tri[2]}, depth + 1);
            run({m12, m20, m01}, depth + 1);
            return;
        }
        const double area = signed_area(tri[0], tri[1], tri[2]);
        for (int j = 0; j < 3; ++j) {
            const Point& p = tri[j];
            const Point& q = tri[(j + 1) % 3];
            if (signed_area(centre, p, q) > 1e-14 * area) apex(centre, p, q);
        }
    }
};

} // namespace

const LineRule& gauss_legendre(int n) {
    static const std::vector<LineRule> table = [] {
        std::vector<LineRule> t(max_line_points + 1);
        for (int k = 1; k <= max_line_points; ++k) t[k] = make_gauss_legendre(k);
        return t;
    }();
    if (n < 1 || n > max_line_points) throw InputError("unsupported Gauss-Legendre order");
    return table[n];
}

const QuadratureRule& triangle_rule(int degree) {
    static const std::vector<QuadratureRule> table = [] {
        std::vector<QuadratureRule> t(max_triangle_degree + 1);
        for (int k = 0; k <= max_triangle_degree; ++k) t[k] = make_triangle_rule(k);
        return t;
    }();
    if (degree < 0 || degree > max_triangle_degree) throw InputError("unsupported triangle rule degree");
    return table[degree];
}

double integrate(const std::array<Point, 3>& tri, const ScalarField& f, const QuadratureRule& rule) {
    const double area = std::abs(signed_area(tri[0], tri[1], tri[2]));
    double sum = 0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto& l = rule.points[q];
        // Offsets from the first corner keep points on tiny cells distinct from it.
        Point x = tri[0] + l[1] * (tri[1] - tri[0]) + l[2] * (tri[2] - tri[0]);
        sum += rule.weights[q] * f(x);
    }
    return area * sum;
}

IntegralResult weighted_integral(const std::array<Point, 3>& tri, const WeightSpec& weight,
                                 const ScalarField& f, const WeightedIntegralOptions& opts) {
    // Pointwise any exponent is fine; near a source only (-2, 2) is integrable.
    if (!(weight.alpha() > -2 && weight.alpha() < 2)) {
        const double h = diameter(tri);
        Point c;
        for (const auto& z : weight.sources())
            if (closest_point(tri, z, c) <= h) throw InputError("weight exponent must lie in (-2, 2) near a source");
    }
    Grader grader{weight, f, opts, triangle_rule(opts.rule_degree)};
    grader.run(tri, 0);
    return grader.result;
}

IntegralResult weighted_cell_integral(const Mesh& mesh, int t, const WeightSpec& weight,
                                      const ScalarField& f, double tol) {
    if (!(tol > 0)) throw InputError("tolerance must be positive");
    WeightedIntegralOptions opts;
    opts.tol = tol;
    return weighted_integral(mesh.corners(t), weight, f, opts);
}

double edge_integral(const Mesh& mesh, int e, const std::function<double(const Point&, double)>& g,
                     int degree) {
    const auto& edge = mesh.edge(e);
    const Point& a = mesh.vertex(edge.vertices[0]);
    const Point& b = mesh.vertex(edge.vertices[1]);
    const double len = (b - a).norm();
    const LineRule& rule = gauss_legendre(std::max(1, (degree + 2) / 2));
    double sum = 0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        double s = rule.points[q];
        sum += rule.weights[q] * g(a + s * (b - a), s * len);
    }
    return len * sum;
}

} // namespace afem

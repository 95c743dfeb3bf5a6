#include "afem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>
#include <utility>

#include "afem/errors.hpp"
#include "afem/quadrature.hpp"

namespace afem {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const Point& a, const Point& b, const Point& c) {
    return 0.5 * cross(b - a, c - a);
}

std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

// Local index of the longest edge of (v0, v1, v2). Equal lengths (to rounding)
// are resolved by the lexicographically smallest sorted vertex pair, which is
// the lowest global edge id under the mesh's edge numbering.
int longest_local_edge(std::span<const Point> pts, const std::array<int, 3>& v) {
    int best = 0;
    double best_len = -1;
    std::pair<int, int> best_pair{0, 0};
    for (int j = 0; j < 3; ++j) {
        int a = v[(j + 1) % 3], b = v[(j + 2) % 3];
        double len = (pts[a] - pts[b]).squaredNorm();
        std::pair<int, int> pair{std::min(a, b), std::max(a, b)};
        if (best_len < 0) {
            best = j, best_len = len, best_pair = pair;
            continue;
        }
        double tol = 1e-12 * std::max(len, best_len);
        if (len > best_len + tol || (std::abs(len - best_len) <= tol && pair < best_pair)) {
            best = j, best_len = std::max(len, best_len), best_pair = pair;
        }
    }
    return best;
}

} // namespace

Mesh::Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> elements,
           std::vector<int> parents)
    : vertices_(std::move(vertices)), elements_(std::move(elements)), parents_(std::move(parents)) {
    const int nv = num_vertices();
    const int nt = num_elements();
    if (!parents_.empty() && static_cast<int>(parents_.size()) != nt)
        throw InputError("parent table size does not match element count");

    for (int t = 0; t < nt; ++t) {
        for (int v : elements_[t])
            if (v < 0 || v >= nv) throw InputError("element vertex index out of range");
        const auto& e = elements_[t];
        if (signed_area(vertices_[e[0]], vertices_[e[1]], vertices_[e[2]]) <= 0)
            throw InputError("element " + std::to_string(t) + " has non-positive area");
    }

    struct Incidence {
        int a, b, elem, local;
    };
    std::vector<Incidence> inc;
    inc.reserve(3 * nt);
    for (int t = 0; t < nt; ++t) {
        for (int j = 0; j < 3; ++j) {
            int a = elements_[t][(j + 1) % 3], b = elements_[t][(j + 2) % 3];
            inc.push_back({std::min(a, b), std::max(a, b), t, j});
        }
    }
    std::sort(inc.begin(), inc.end(), [](const Incidence& l, const Incidence& r) {
        return std::tie(l.a, l.b, l.elem) < std::tie(r.a, r.b, r.elem);
    });

    element_edges_.assign(nt, {-1, -1, -1});
    for (std::size_t i = 0; i < inc.size();) {
        std::size_t j = i;
        while (j < inc.size() && inc[j].a == inc[i].a && inc[j].b == inc[i].b) ++j;
        if (j - i > 2) throw InputError("edge shared by more than two elements");
        int id = num_edges();
        Edge edge{{inc[i].a, inc[i].b}, {inc[i].elem, j - i == 2 ? inc[i + 1].elem : -1}};
        edges_.push_back(edge);
        for (std::size_t k = i; k < j; ++k) element_edges_[inc[k].elem][inc[k].local] = id;
        i = j;
    }

    boundary_vertex_.assign(nv, false);
    for (const auto& e : edges_) {
        if (e.on_boundary()) {
            boundary_vertex_[e.vertices[0]] = true;
            boundary_vertex_[e.vertices[1]] = true;
        }
    }

    longest_edge_.resize(nt);
    for (int t = 0; t < nt; ++t) longest_edge_[t] = longest_local_edge(vertices_, elements_[t]);

    bbox_min_ = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
    bbox_max_ = -bbox_min_;
    for (const auto& p : vertices_) {
        bbox_min_ = bbox_min_.cwiseMin(p);
        bbox_max_ = bbox_max_.cwiseMax(p);
    }
}

std::array<Point, 3> Mesh::corners(int t) const {
    const auto& e = elements_[t];
    return {vertices_[e[0]], vertices_[e[1]], vertices_[e[2]]};
}

double Mesh::area(int t) const {
    auto c = corners(t);
    return signed_area(c[0], c[1], c[2]);
}

double Mesh::diameter(int t) const {
    int j = longest_edge_[t];
    const auto& e = elements_[t];
    return (vertices_[e[(j + 1) % 3]] - vertices_[e[(j + 2) % 3]]).norm();
}

double Mesh::edge_length(int e) const {
    return (vertices_[edges_[e].vertices[0]] - vertices_[edges_[e].vertices[1]]).norm();
}

double Mesh::min_angle() const {
    double result = std::numbers::pi;
    for (int t = 0; t < num_elements(); ++t) {
        auto c = corners(t);
        for (int j = 0; j < 3; ++j) {
            Point u = c[(j + 1) % 3] - c[j], w = c[(j + 2) % 3] - c[j];
            double cosang = u.dot(w) / (u.norm() * w.norm());
            result = std::min(result, std::acos(std::clamp(cosang, -1.0, 1.0)));
        }
    }
    return result;
}

double Mesh::total_area() const {
    double sum = 0;
    for (int t = 0; t < num_elements(); ++t) sum += area(t);
    return sum;
}

Eigen::Vector3d Mesh::barycentric(int t, const Point& x) const {
    auto c = corners(t);
    double twice = cross(c[1] - c[0], c[2] - c[0]);
    double l1 = cross(c[2] - c[1], x - c[1]) / twice;
    double l2 = cross(c[0] - c[2], x - c[2]) / twice;
    double l3 = cross(c[1] - c[0], x - c[0]) / twice;
    return {l1, l2, l3};
}

bool Mesh::contains(int t, const Point& x, double tol) const {
    return barycentric(t, x).minCoeff() >= -tol;
}

std::vector<int> Mesh::elements_containing(const Point& x) const {
    std::vector<int> result;
    if ((x.array() < bbox_min_.array() - 1e-12).any() || (x.array() > bbox_max_.array() + 1e-12).any())
        return result;
    for (int t = 0; t < num_elements(); ++t) {
        auto c = corners(t);
        Eigen::Vector2d lo = c[0].cwiseMin(c[1]).cwiseMin(c[2]);
        Eigen::Vector2d hi = c[0].cwiseMax(c[1]).cwiseMax(c[2]);
        double slack = 1e-12 * (hi - lo).maxCoeff();
        if ((x.array() < lo.array() - slack).any() || (x.array() > hi.array() + slack).any()) continue;
        if (contains(t, x)) result.push_back(t);
    }
    return result;
}

int Mesh::locate(const Point& x) const {
    auto hits = elements_containing(x);
    if (hits.empty())
        throw LookupError("point (" + std::to_string(x.x()) + ", " + std::to_string(x.y()) +
                          ") lies outside the mesh");
    return hits.front();
}

Mesh Mesh::bisect(std::span<const int> marked) const {
    const int nt = num_elements();
    for (int t : marked)
        if (t < 0 || t >= nt) throw InputError("unknown element id " + std::to_string(t));

    std::vector<Point> pts(vertices_);
    std::vector<std::array<int, 3>> tris(elements_);
    std::vector<std::array<int, 2>> children(nt, {-1, -1});
    std::unordered_map<std::uint64_t, int> midpoint;
    std::unordered_map<std::uint64_t, std::vector<int>> edge_elems;
    for (int t = 0; t < nt; ++t)
        for (int j = 0; j < 3; ++j)
            edge_elems[edge_key(tris[t][(j + 1) % 3], tris[t][(j + 2) % 3])].push_back(t);

    auto is_leaf = [&](int t) { return children[t][0] < 0; };
    auto hanging = [&](int t) {
        for (int j = 0; j < 3; ++j)
            if (midpoint.contains(edge_key(tris[t][(j + 1) % 3], tris[t][(j + 2) % 3]))) return true;
        return false;
    };
    auto detach = [&](int t) {
        for (int j = 0; j < 3; ++j) {
            auto& list = edge_elems[edge_key(tris[t][(j + 1) % 3], tris[t][(j + 2) % 3])];
            list.erase(std::find(list.begin(), list.end(), t));
        }
    };
    auto attach = [&](int t) {
        for (int j = 0; j < 3; ++j)
            edge_elems[edge_key(tris[t][(j + 1) % 3], tris[t][(j + 2) % 3])].push_back(t);
    };

    std::vector<int> stack(marked.rbegin(), marked.rend());
    std::sort(stack.begin(), stack.end(), std::greater<>());
    stack.erase(std::unique(stack.begin(), stack.end()), stack.end());

    while (!stack.empty()) {
        int t = stack.back();
        stack.pop_back();
        if (!is_leaf(t)) continue;

        auto v = tris[t];
        int k = longest_local_edge(pts, v);
        int a = v[(k + 1) % 3], b = v[(k + 2) % 3], apex = v[k];
        auto key = edge_key(a, b);
        int m;
        if (auto it = midpoint.find(key); it != midpoint.end()) {
            m = it->second;
        } else {
            m = static_cast<int>(pts.size());
            pts.push_back(0.5 * (pts[a] + pts[b]));
            midpoint.emplace(key, m);
        }

        detach(t);
        int c0 = static_cast<int>(tris.size());
        tris.push_back({apex, a, m});
        tris.push_back({apex, m, b});
        children.push_back({-1, -1});
        children.push_back({-1, -1});
        children[t] = {c0, c0 + 1};
        attach(c0);
        attach(c0 + 1);

        // The neighbor across (a, b) now carries a hanging node at m.
        for (int n : edge_elems[key]) stack.push_back(n);
        for (int c : {c0 + 1, c0})
            if (hanging(c)) stack.push_back(c);
    }

    std::vector<std::array<int, 3>> leaves;
    std::vector<int> parent_of;
    leaves.reserve(tris.size());
    for (int t = 0; t < nt; ++t) {
        std::vector<int> todo{t};
        while (!todo.empty()) {
            int s = todo.back();
            todo.pop_back();
            if (is_leaf(s)) {
                leaves.push_back(tris[s]);
                parent_of.push_back(t);
            } else {
                todo.push_back(children[s][1]);
                todo.push_back(children[s][0]);
            }
        }
    }
    return Mesh(std::move(pts), std::move(leaves), std::move(parent_of));
}

Mesh build_initial_mesh(const DomainSpec& domain) {
    const int n = domain.subdivisions;
    if (n < 1) throw InputError("subdivisions must be at least 1");

    double x0 = 0, y0 = 0;
    int cells = n;
    if (domain.kind == DomainKind::l_shape) {
        x0 = -1, y0 = -1;
        cells = 2 * n;
    }
    const double h = 1.0 / n;
    auto in_domain = [&](int i, int j) {
        if (domain.kind == DomainKind::unit_square) return true;
        // Cell lower-left corner; the removed quadrant is [0,1) x [-1,0).
        return !(i >= n && j < n);
    };

    std::vector<int> index((cells + 1) * (cells + 1), -1);
    auto id = [&](int i, int j) -> int& { return index[j * (cells + 1) + i]; };
    std::vector<Point> pts;
    std::vector<std::array<int, 3>> tris;
    for (int j = 0; j < cells; ++j) {
        for (int i = 0; i < cells; ++i) {
            if (!in_domain(i, j)) continue;
            for (auto [di, dj] : {std::pair{0, 0}, {1, 0}, {1, 1}, {0, 1}}) {
                int& slot = id(i + di, j + dj);
                if (slot < 0) {
                    slot = static_cast<int>(pts.size());
                    pts.emplace_back(x0 + (i + di) * h, y0 + (j + dj) * h);
                }
            }
            int v00 = id(i, j), v10 = id(i + 1, j), v11 = id(i + 1, j + 1), v01 = id(i, j + 1);
            tris.push_back({v00, v10, v11});
            tris.push_back({v00, v11, v01});
        }
    }
    return Mesh(std::move(pts), std::move(tris));
}

double max_distance(const std::array<Point, 3>& corners, const Point& z) {
    return std::max({(corners[0] - z).norm(), (corners[1] - z).norm(), (corners[2] - z).norm()});
}

ElementGeometry element_geometry(const Mesh& mesh, int t, const WeightSpec& weight) {
    auto c = mesh.corners(t);
    ElementGeometry g;
    g.h = mesh.diameter(t);
    g.area = mesh.area(t);
    g.D = std::numeric_limits<double>::infinity();
    for (const auto& z : weight.sources()) g.D = std::min(g.D, max_distance(c, z));
    return g;
}

double distance_to_boundary(const Mesh& mesh, const Point& x) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : mesh.edges()) {
        if (!e.on_boundary()) continue;
        const Point& a = mesh.vertex(e.vertices[0]);
        const Point& b = mesh.vertex(e.vertices[1]);
        Point d = b - a;
        double s = std::clamp((x - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
        best = std::min(best, (a + s * d - x).norm());
    }
    return best;
}

} // namespace afem

#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace afem {

using Point = Eigen::Vector2d;

class WeightSpec;

enum class DomainKind { unit_square, l_shape };

/// Unit square (0,1)^2 or the L-shape (-1,1)^2 minus [0,1)x[-1,0).
struct DomainSpec {
    DomainKind kind = DomainKind::unit_square;
    int subdivisions = 2;  ///< grid cells per unit length

    double area() const { return kind == DomainKind::unit_square ? 1.0 : 3.0; }
};

/// An edge with its incident elements. `elements[1] == -1` on the boundary.
struct Edge {
    std::array<int, 2> vertices;
    std::array<int, 2> elements;

    bool on_boundary() const { return elements[1] < 0; }
};

/// Conforming triangulation. Immutable once built; refinement returns a new mesh.
///
/// Elements are counterclockwise vertex triples. Local edge j of an element is
/// the edge opposite local vertex j. Global edges are numbered in lexicographic
/// order of their (smaller, larger) vertex pair.
class Mesh {
public:
    /// Throws InputError for out-of-range indices, non-positive areas, or a
    /// non-manifold edge (more than two incident elements).
    Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> elements,
         std::vector<int> parents = {});

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_elements() const { return static_cast<int>(elements_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    const Point& vertex(int v) const { return vertices_[v]; }
    std::span<const Point> vertices() const { return vertices_; }
    const std::array<int, 3>& element(int t) const { return elements_[t]; }
    std::span<const std::array<int, 3>> elements() const { return elements_; }
    const Edge& edge(int e) const { return edges_[e]; }
    std::span<const Edge> edges() const { return edges_; }

    /// Global edge ids of element t, local edge j opposite local vertex j.
    const std::array<int, 3>& element_edges(int t) const { return element_edges_[t]; }
    /// Local index (0..2) of the longest edge; ties go to the lowest global edge id.
    int longest_edge(int t) const { return longest_edge_[t]; }
    bool boundary_vertex(int v) const { return boundary_vertex_[v]; }

    /// Parent element id in the mesh this one was refined from (empty for T_0).
    std::span<const int> parents() const { return parents_; }

    double area(int t) const;
    double diameter(int t) const;
    double edge_length(int e) const;
    std::array<Point, 3> corners(int t) const;
    double min_angle() const;
    double total_area() const;

    /// Barycentric coordinates of x with respect to element t.
    Eigen::Vector3d barycentric(int t, const Point& x) const;
    bool contains(int t, const Point& x, double tol = 1e-12) const;

    /// Lowest id among elements whose closure contains x. Throws LookupError.
    int locate(const Point& x) const;
    /// All elements whose closure contains x, ascending.
    std::vector<int> elements_containing(const Point& x) const;

    /// Longest-edge bisection: each marked element is bisected once, then
    /// neighbors are bisected until no hanging nodes remain. Throws InputError
    /// for unknown ids.
    Mesh bisect(std::span<const int> marked) const;

private:
    std::vector<Point> vertices_;
    std::vector<std::array<int, 3>> elements_;
    std::vector<Edge> edges_;
    std::vector<std::array<int, 3>> element_edges_;
    std::vector<int> longest_edge_;
    std::vector<bool> boundary_vertex_;
    std::vector<int> parents_;
    Eigen::Vector2d bbox_min_, bbox_max_;
};

/// Grid of n cells per unit length, each cell split by its positive-slope diagonal.
Mesh build_initial_mesh(const DomainSpec& domain);

struct ElementGeometry {
    double h = 0;     ///< diameter (longest edge)
    double area = 0;
    double D = 0;     ///< max distance to the source (min over sources in multi mode)
};

ElementGeometry element_geometry(const Mesh& mesh, int t, const WeightSpec& weight);

/// Largest distance from the closed triangle to z; exact since |x - z| is convex.
double max_distance(const std::array<Point, 3>& corners, const Point& z);

/// Distance from x to the closest boundary edge of the mesh.
double distance_to_boundary(const Mesh& mesh, const Point& x);

} // namespace afem

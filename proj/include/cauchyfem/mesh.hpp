#pragma once

#include <array>
#include <string>
#include <unordered_map>
#include <vector>

namespace cauchyfem {

// Boundary region labels. S is the accessible part of the boundary carrying
// the Cauchy data pair; B is the inaccessible part where traces are sought.
enum class Region { S, B };

inline Region complement(Region r) { return r == Region::S ? Region::B : Region::S; }
const char* region_name(Region r);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Boundary edge as a vertex pair plus its region tag.
struct BoundaryEdge {
  int a = -1;
  int b = -1;
  Region region = Region::S;
};

// Planar triangulation whose boundary is split into the two regions.
// Triangles are counterclockwise; h_max is the longest triangle edge.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary;
  double h_max = 0.0;
};

// Node bookkeeping derived from the tagged boundary edges. Node lists are
// ordered by walking each region's edge chains end to end; interface nodes
// (shared by both regions) appear in both lists.
class BoundaryPartition {
 public:
  explicit BoundaryPartition(const Mesh& mesh);

  const std::vector<int>& nodes(Region r) const { return r == Region::S ? s_nodes_ : b_nodes_; }
  const std::vector<int>& interface_nodes() const { return interface_; }
  const std::vector<BoundaryEdge>& edges(Region r) const { return r == Region::S ? s_edges_ : b_edges_; }
  double length(Region r) const { return r == Region::S ? s_length_ : b_length_; }

  // Position of a mesh vertex in nodes(r), or -1 if the vertex is not in r.
  int local_index(Region r, int vertex) const;
  bool is_interface(int vertex) const;
  int node_count(Region r) const { return static_cast<int>(nodes(r).size()); }

 private:
  std::vector<int> s_nodes_, b_nodes_, interface_;
  std::vector<BoundaryEdge> s_edges_, b_edges_;
  std::unordered_map<int, int> s_index_, b_index_;
  std::unordered_map<int, bool> interface_set_;
  double s_length_ = 0.0, b_length_ = 0.0;
};

// Structured triangulation of [0,1]^2 with roughly 1/h subdivisions per side.
// The listed sides form region S, the remaining sides B; S must be a nonempty
// strict subset of the four sides.
enum class Side { Bottom, Right, Top, Left };
Mesh build_unit_square(double h, const std::vector<Side>& s_sides);

// Lens-shaped domain bounded above by the segment y = 0, -1 <= x <= 1
// (region S) and below by the parabola y = -depth*(1 - x^2) (region B).
// The interface is the two points (+-1, 0). Mapped structured grid; the
// parabola is replaced by its polygonal interpolant at the mesh nodes.
Mesh build_parabola_domain(double h, double depth);

// Longest triangle edge over the whole mesh.
double mesh_h_max(const Mesh& mesh);

// Sum of triangle areas.
double mesh_area(const Mesh& mesh);

// Plain-text round trip. Format: three sections, "vertices <n>" (index x y
// per line, full precision), "triangles <n>" (three vertex indices), and
// "boundary <n>" (two vertex indices plus tag S or B). Indices are 0-based.
void save_mesh(const Mesh& mesh, const std::string& path);
Mesh load_mesh(const std::string& path);

// Mesh invariant checks: positive triangle orientation, each boundary edge on
// exactly one triangle and each interior edge on two, tagged edges covering
// the whole boundary exactly once, both regions nonempty, nonempty interface.
// Returns one message per violation; empty means valid.
std::vector<std::string> validate_mesh(const Mesh& mesh);

}  // namespace cauchyfem

#include "cauchyfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cauchyfem {

namespace {

double edge_length(const Mesh& m, int a, int b) {
  const double dx = m.vertices[a].x - m.vertices[b].x;
  const double dy = m.vertices[a].y - m.vertices[b].y;
  return std::hypot(dx, dy);
}

double signed_area(const Mesh& m, const std::array<int, 3>& t) {
  const Vec2& p0 = m.vertices[t[0]];
  const Vec2& p1 = m.vertices[t[1]];
  const Vec2& p2 = m.vertices[t[2]];
  return 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
}

std::pair<int, int> canonical(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Nodes of one region ordered by walking its edge chains; chains themselves
// ordered by smallest contained node so the result is deterministic.
std::vector<int> ordered_chain_nodes(const std::vector<BoundaryEdge>& edges) {
  std::map<int, std::vector<int>> adj;
  std::set<std::pair<int, int>> unvisited;
  for (const BoundaryEdge& e : edges) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
    unvisited.insert(canonical(e.a, e.b));
  }
  for (auto& [node, nbrs] : adj) std::sort(nbrs.begin(), nbrs.end());

  std::vector<std::vector<int>> chains;
  while (!unvisited.empty()) {
    int start = -1;
    for (const auto& [node, nbrs] : adj) {
      int open = 0;
      for (int nb : nbrs)
        if (unvisited.count(canonical(node, nb))) ++open;
      if (open == 1) {  // chain endpoint
        start = node;
        break;
      }
    }
    if (start < 0) start = unvisited.begin()->first;  // defensive: closed loop

    std::vector<int> chain{start};
    int cur = start;
    for (;;) {
      int next = -1;
      for (int nb : adj[cur]) {
        if (unvisited.count(canonical(cur, nb))) {
          next = nb;
          break;
        }
      }
      if (next < 0) break;
      unvisited.erase(canonical(cur, next));
      chain.push_back(next);
      cur = next;
    }
    chains.push_back(std::move(chain));
  }
  std::sort(chains.begin(), chains.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              return *std::min_element(a.begin(), a.end()) < *std::min_element(b.begin(), b.end());
            });

  std::vector<int> out;
  for (const auto& c : chains) out.insert(out.end(), c.begin(), c.end());
  return out;
}

}  // namespace

const char* region_name(Region r) { return r == Region::S ? "S" : "B"; }

BoundaryPartition::BoundaryPartition(const Mesh& mesh) {
  for (const BoundaryEdge& e : mesh.boundary) {
    if (e.region == Region::S) {
      s_edges_.push_back(e);
      s_length_ += edge_length(mesh, e.a, e.b);
    } else {
      b_edges_.push_back(e);
      b_length_ += edge_length(mesh, e.a, e.b);
    }
  }
  s_nodes_ = ordered_chain_nodes(s_edges_);
  b_nodes_ = ordered_chain_nodes(b_edges_);
  for (size_t i = 0; i < s_nodes_.size(); ++i) s_index_[s_nodes_[i]] = static_cast<int>(i);
  for (size_t i = 0; i < b_nodes_.size(); ++i) b_index_[b_nodes_[i]] = static_cast<int>(i);
  for (int v : s_nodes_) {
    if (b_index_.count(v)) {
      interface_.push_back(v);
      interface_set_[v] = true;
    }
  }
  std::sort(interface_.begin(), interface_.end());
}

int BoundaryPartition::local_index(Region r, int vertex) const {
  const auto& idx = (r == Region::S) ? s_index_ : b_index_;
  auto it = idx.find(vertex);
  return it == idx.end() ? -1 : it->second;
}

bool BoundaryPartition::is_interface(int vertex) const {
  return interface_set_.count(vertex) > 0;
}

double mesh_h_max(const Mesh& mesh) {
  double h = 0.0;
  for (const auto& t : mesh.triangles)
    for (int i = 0; i < 3; ++i) h = std::max(h, edge_length(mesh, t[i], t[(i + 1) % 3]));
  return h;
}

double mesh_area(const Mesh& mesh) {
  double a = 0.0;
  for (const auto& t : mesh.triangles) a += signed_area(mesh, t);
  return a;
}

Mesh build_unit_square(double h, const std::vector<Side>& s_sides) {
  if (h <= 0.0 || h >= 1.0) throw std::invalid_argument("build_unit_square: need 0 < h < 1");
  std::set<Side> s_set(s_sides.begin(), s_sides.end());
  if (s_set.empty() || s_set.size() == 4)
    throw std::invalid_argument("build_unit_square: S must be a nonempty strict subset of the sides");

  const int n = std::max(1, static_cast<int>(std::lround(1.0 / h)));
  Mesh m;
  m.vertices.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      m.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
  auto id = [n](int i, int j) { return j * (n + 1) + i; };

  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }

  auto tag = [&](Side s) { return s_set.count(s) ? Region::S : Region::B; };
  for (int i = 0; i < n; ++i) {  // counterclockwise: bottom, right, top, left
    m.boundary.push_back({id(i, 0), id(i + 1, 0), tag(Side::Bottom)});
  }
  for (int j = 0; j < n; ++j) m.boundary.push_back({id(n, j), id(n, j + 1), tag(Side::Right)});
  for (int i = n; i > 0; --i) m.boundary.push_back({id(i, n), id(i - 1, n), tag(Side::Top)});
  for (int j = n; j > 0; --j) m.boundary.push_back({id(0, j), id(0, j - 1), tag(Side::Left)});

  m.h_max = mesh_h_max(m);
  return m;
}

Mesh build_parabola_domain(double h, double depth) {
  if (depth <= 0.0) throw std::invalid_argument("build_parabola_domain: need depth > 0");
  if (h <= 0.0 || h >= 1.0) throw std::invalid_argument("build_parabola_domain: need 0 < h < 1");

  int nx = static_cast<int>(std::lround(2.0 / h));
  if (nx % 2 != 0) ++nx;  // keep a node column at x = 0
  nx = std::max(nx, 2);
  const int ny = std::max(1, static_cast<int>(std::lround(depth / h)));

  Mesh m;
  // Vertex 0 is the left tip; columns i = 1..nx-1 hold ny+1 vertices from the
  // parabola up to y = 0; the last vertex is the right tip.
  std::vector<int> col_base(nx + 1, -1);
  m.vertices.push_back({-1.0, 0.0});
  for (int i = 1; i < nx; ++i) {
    const double x = -1.0 + 2.0 * i / nx;
    const double di = depth * (1.0 - x * x);
    col_base[i] = static_cast<int>(m.vertices.size());
    for (int j = 0; j <= ny; ++j) {
      const double y = -di * (1.0 - static_cast<double>(j) / ny);
      m.vertices.push_back({x, y});
    }
  }
  const int right_tip = static_cast<int>(m.vertices.size());
  m.vertices.push_back({1.0, 0.0});

  auto at = [&](int i, int j) { return col_base[i] + j; };

  for (int j = 0; j < ny; ++j)  // left fan
    m.triangles.push_back({0, at(1, j), at(1, j + 1)});
  for (int i = 1; i + 1 < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      m.triangles.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
      m.triangles.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
    }
  }
  for (int j = 0; j < ny; ++j)  // right fan
    m.triangles.push_back({right_tip, at(nx - 1, j + 1), at(nx - 1, j)});

  m.boundary.push_back({0, at(1, ny), Region::S});
  for (int i = 1; i + 1 < nx; ++i) m.boundary.push_back({at(i, ny), at(i + 1, ny), Region::S});
  m.boundary.push_back({at(nx - 1, ny), right_tip, Region::S});

  m.boundary.push_back({0, at(1, 0), Region::B});
  for (int i = 1; i + 1 < nx; ++i) m.boundary.push_back({at(i, 0), at(i + 1, 0), Region::B});
  m.boundary.push_back({at(nx - 1, 0), right_tip, Region::B});

  m.h_max = mesh_h_max(m);
  return m;
}

void save_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_mesh: cannot open " + path);
  out << "vertices " << mesh.vertices.size() << "\n";
  for (size_t i = 0; i < mesh.vertices.size(); ++i)
    out << i << " " << fmt_double(mesh.vertices[i].x) << " " << fmt_double(mesh.vertices[i].y)
        << "\n";
  out << "triangles " << mesh.triangles.size() << "\n";
  for (const auto& t : mesh.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "boundary " << mesh.boundary.size() << "\n";
  for (const auto& e : mesh.boundary)
    out << e.a << " " << e.b << " " << region_name(e.region) << "\n";
  if (!out) throw std::runtime_error("save_mesh: write failed for " + path);
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void parse_fail(const std::string& section, size_t record, const std::string& what) {
  throw std::runtime_error("load_mesh: " + section + " record " + std::to_string(record) + ": " +
                           what);
}

long parse_int(const std::string& s, const std::string& section, size_t record) {
  size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    parse_fail(section, record, "bad integer '" + s + "'");
  }
  if (pos != s.size()) parse_fail(section, record, "bad integer '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const std::string& section, size_t record) {
  size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    parse_fail(section, record, "bad number '" + s + "'");
  }
  if (pos != s.size()) parse_fail(section, record, "bad number '" + s + "'");
  return v;
}

}  // namespace

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mesh: cannot open " + path);

  std::vector<std::vector<std::string>> lines;
  std::string raw;
  while (std::getline(in, raw)) {
    auto toks = tokenize(raw);
    if (!toks.empty() && toks[0][0] != '#') lines.push_back(std::move(toks));
  }
  size_t cursor = 0;
  auto expect_header = [&](const std::string& name) -> size_t {
    if (cursor >= lines.size() || lines[cursor].size() != 2 || lines[cursor][0] != name)
      throw std::runtime_error("load_mesh: expected '" + name + " <count>' header");
    long n = parse_int(lines[cursor][1], name, 0);
    if (n < 0) parse_fail(name, 0, "negative count");
    ++cursor;
    return static_cast<size_t>(n);
  };

  Mesh m;
  const size_t nv = expect_header("vertices");
  m.vertices.resize(nv);
  for (size_t i = 0; i < nv; ++i, ++cursor) {
    if (cursor >= lines.size() || lines[cursor].size() != 3)
      parse_fail("vertices", i, "expected 'index x y'");
    const auto& t = lines[cursor];
    if (parse_int(t[0], "vertices", i) != static_cast<long>(i))
      parse_fail("vertices", i, "index out of order");
    m.vertices[i] = {parse_double(t[1], "vertices", i), parse_double(t[2], "vertices", i)};
  }

  const size_t nt = expect_header("triangles");
  m.triangles.resize(nt);
  for (size_t i = 0; i < nt; ++i, ++cursor) {
    if (cursor >= lines.size() || lines[cursor].size() != 3)
      parse_fail("triangles", i, "expected three vertex indices");
    for (int k = 0; k < 3; ++k) {
      long v = parse_int(lines[cursor][k], "triangles", i);
      if (v < 0 || v >= static_cast<long>(nv)) parse_fail("triangles", i, "vertex index out of range");
      m.triangles[i][k] = static_cast<int>(v);
    }
  }

  const size_t nb = expect_header("boundary");
  m.boundary.resize(nb);
  for (size_t i = 0; i < nb; ++i, ++cursor) {
    if (cursor >= lines.size() || lines[cursor].size() != 3)
      parse_fail("boundary", i, "expected 'a b S|B'");
    const auto& t = lines[cursor];
    long a = parse_int(t[0], "boundary", i);
    long b = parse_int(t[1], "boundary", i);
    if (a < 0 || a >= static_cast<long>(nv) || b < 0 || b >= static_cast<long>(nv))
      parse_fail("boundary", i, "vertex index out of range");
    Region reg;
    if (t[2] == "S")
      reg = Region::S;
    else if (t[2] == "B")
      reg = Region::B;
    else
      parse_fail("boundary", i, "edge tag must be S or B, got '" + t[2] + "'");
    m.boundary[i] = {static_cast<int>(a), static_cast<int>(b), reg};
  }
  if (cursor != lines.size()) throw std::runtime_error("load_mesh: trailing content after boundary section");

  m.h_max = mesh_h_max(m);
  return m;
}

std::vector<std::string> validate_mesh(const Mesh& mesh) {
  std::vector<std::string> errs;
  const int n = static_cast<int>(mesh.vertices.size());

  for (size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    bool in_range = true;
    for (int k = 0; k < 3; ++k)
      if (t[k] < 0 || t[k] >= n) in_range = false;
    if (!in_range) {
      errs.push_back("triangle " + std::to_string(i) + ": vertex index out of range");
      continue;
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      errs.push_back("triangle " + std::to_string(i) + ": repeated vertex");
      continue;
    }
    if (signed_area(mesh, t) <= 0.0)
      errs.push_back("triangle " + std::to_string(i) + ": non-positive orientation");
  }

  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) ++edge_count[canonical(t[k], t[(k + 1) % 3])];
  for (const auto& [e, c] : edge_count)
    if (c > 2)
      errs.push_back("edge (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                     "): shared by more than two triangles");

  std::map<std::pair<int, int>, Region> tagged;
  int s_count = 0, b_count = 0;
  for (size_t i = 0; i < mesh.boundary.size(); ++i) {
    const auto& e = mesh.boundary[i];
    if (e.a < 0 || e.a >= n || e.b < 0 || e.b >= n) {
      errs.push_back("boundary edge " + std::to_string(i) + ": vertex index out of range");
      continue;
    }
    auto key = canonical(e.a, e.b);
    if (tagged.count(key)) {
      errs.push_back("boundary edge " + std::to_string(i) + ": listed more than once");
      continue;
    }
    tagged[key] = e.region;
    (e.region == Region::S ? s_count : b_count)++;
    auto it = edge_count.find(key);
    if (it == edge_count.end() || it->second != 1)
      errs.push_back("boundary edge " + std::to_string(i) + ": not on exactly one triangle");
  }
  for (const auto& [e, c] : edge_count) {
    if (c == 1 && !tagged.count(e))
      errs.push_back("edge (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                     "): on the boundary but untagged");
  }
  if (s_count == 0) errs.push_back("region S has no edges");
  if (b_count == 0) errs.push_back("region B has no edges");

  std::map<int, int> boundary_degree;
  for (const auto& [e, r] : tagged) {
    ++boundary_degree[e.first];
    ++boundary_degree[e.second];
  }
  for (const auto& [v, d] : boundary_degree)
    if (d != 2)
      errs.push_back("boundary vertex " + std::to_string(v) + ": has " + std::to_string(d) +
                     " boundary edges, expected 2");

  if (s_count > 0 && b_count > 0) {
    std::set<int> s_nodes, shared;
    for (const auto& [e, r] : tagged)
      if (r == Region::S) {
        s_nodes.insert(e.first);
        s_nodes.insert(e.second);
      }
    for (const auto& [e, r] : tagged)
      if (r == Region::B) {
        if (s_nodes.count(e.first)) shared.insert(e.first);
        if (s_nodes.count(e.second)) shared.insert(e.second);
      }
    if (shared.empty()) errs.push_back("interface between S and B is empty");
  }
  return errs;
}

}  // namespace cauchyfem

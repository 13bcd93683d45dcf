#include "tac/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tac {

namespace {

const char* tag_name(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::Gamma1: return "gamma1";
    case BoundaryTag::Gamma2: return "gamma2";
    case BoundaryTag::GammaC: return "gammac";
  }
  return "?";
}

BoundaryTag tag_from_name(const std::string& s) {
  if (s == "gamma1") return BoundaryTag::Gamma1;
  if (s == "gamma2") return BoundaryTag::Gamma2;
  if (s == "gammac") return BoundaryTag::GammaC;
  throw std::runtime_error("mesh: unknown boundary tag '" + s + "'");
}

double tri_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

}  // namespace

std::vector<bool> Mesh::gamma1_node_mask() const {
  std::vector<bool> mask(nodes.size(), false);
  for (const auto& e : boundary_edges) {
    if (e.tag == BoundaryTag::Gamma1) {
      mask[e.a] = true;
      mask[e.b] = true;
    }
  }
  return mask;
}

void Mesh::validate() const {
  if (nodes.empty() || triangles.empty()) throw std::runtime_error("mesh: empty");
  std::vector<int> touch(nodes.size(), 0);
  for (const auto& t : triangles) {
    for (int v : t) {
      if (v < 0 || v >= num_nodes()) throw std::runtime_error("mesh: triangle index out of range");
      ++touch[v];
    }
    if (tri_area(nodes[t[0]], nodes[t[1]], nodes[t[2]]) <= 0.0)
      throw std::runtime_error("mesh: degenerate or inverted triangle");
  }
  for (int i = 0; i < num_nodes(); ++i)
    if (touch[i] == 0) throw std::runtime_error("mesh: orphan node");

  // Every boundary edge (edge with exactly one adjacent triangle) must carry
  // exactly one tag, and tagged edges must be boundary edges.
  std::map<std::pair<int, int>, int> edge_count;
  auto key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) ++edge_count[key(t[k], t[(k + 1) % 3])];
  }
  std::set<std::pair<int, int>> tagged;
  bool has_gamma1 = false;
  for (const auto& e : boundary_edges) {
    auto k = key(e.a, e.b);
    auto it = edge_count.find(k);
    if (it == edge_count.end() || it->second != 1)
      throw std::runtime_error("mesh: tagged edge is not a boundary edge");
    if (!tagged.insert(k).second) throw std::runtime_error("mesh: edge tagged twice");
    if (e.tag == BoundaryTag::Gamma1) has_gamma1 = true;
  }
  for (const auto& [k, cnt] : edge_count) {
    if (cnt == 1 && !tagged.count(k)) throw std::runtime_error("mesh: untagged boundary edge");
  }
  if (!has_gamma1) throw std::runtime_error("mesh: Gamma1 must contain at least one edge");

  if (surface_nodes.size() < 2) throw std::runtime_error("mesh: GammaC needs at least 2 nodes");
  for (size_t k = 1; k < surface_nodes.size(); ++k) {
    if (!(nodes[surface_nodes[k - 1]].x() < nodes[surface_nodes[k]].x()))
      throw std::runtime_error("mesh: surface nodes not in x-order");
  }
}

Mesh build_unit_square_mesh(int n) {
  if (n < 2) throw std::invalid_argument("build_unit_square_mesh: n must be >= 2");
  Mesh m;
  const int nn = n + 1;
  m.nodes.reserve(nn * nn);
  for (int j = 0; j < nn; ++j)
    for (int i = 0; i < nn; ++i)
      m.nodes.emplace_back(double(i) / n, double(j) / n);

  auto id = [nn](int i, int j) { return j * nn + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      // split each cell along the (i,j)-(i+1,j+1) diagonal, counter-clockwise
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }

  for (int i = 0; i < n; ++i) {
    m.boundary_edges.push_back({id(i, 0), id(i + 1, 0), BoundaryTag::GammaC});   // bottom
    m.boundary_edges.push_back({id(i, n), id(i + 1, n), BoundaryTag::Gamma1});   // top
  }
  for (int j = 0; j < n; ++j) {
    m.boundary_edges.push_back({id(0, j), id(0, j + 1), BoundaryTag::Gamma2});   // left
    m.boundary_edges.push_back({id(n, j), id(n, j + 1), BoundaryTag::Gamma2});   // right
  }

  for (int i = 0; i < nn; ++i) m.surface_nodes.push_back(id(i, 0));
  m.h = std::sqrt(2.0) / n;
  m.validate();
  return m;
}

void write_mesh(const Mesh& mesh, std::ostream& os) {
  os << "tacmesh " << mesh.num_nodes() << ' ' << mesh.triangles.size() << ' '
     << mesh.boundary_edges.size() << '\n';
  os.precision(17);
  for (const auto& p : mesh.nodes) os << p.x() << ' ' << p.y() << '\n';
  for (const auto& t : mesh.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : mesh.boundary_edges) os << e.a << ' ' << e.b << ' ' << tag_name(e.tag) << '\n';
}

Mesh read_mesh(std::istream& is) {
  std::string magic;
  size_t nn = 0, nt = 0, ne = 0;
  if (!(is >> magic >> nn >> nt >> ne) || magic != "tacmesh")
    throw std::runtime_error("mesh: bad header");
  Mesh m;
  m.nodes.resize(nn);
  for (auto& p : m.nodes) {
    if (!(is >> p.x() >> p.y())) throw std::runtime_error("mesh: truncated node list");
  }
  m.triangles.resize(nt);
  for (auto& t : m.triangles) {
    if (!(is >> t[0] >> t[1] >> t[2])) throw std::runtime_error("mesh: truncated triangle list");
  }
  m.boundary_edges.resize(ne);
  for (auto& e : m.boundary_edges) {
    std::string tag;
    if (!(is >> e.a >> e.b >> tag)) throw std::runtime_error("mesh: truncated edge list");
    e.tag = tag_from_name(tag);
  }
  // Rebuild derived data: GammaC nodes in x-order, max diameter.
  std::set<int> surf;
  for (const auto& e : m.boundary_edges) {
    if (e.tag == BoundaryTag::GammaC) {
      surf.insert(e.a);
      surf.insert(e.b);
    }
  }
  m.surface_nodes.assign(surf.begin(), surf.end());
  std::sort(m.surface_nodes.begin(), m.surface_nodes.end(),
            [&m](int a, int b) { return m.nodes[a].x() < m.nodes[b].x(); });
  m.h = 0.0;
  for (const auto& t : m.triangles) {
    for (int k = 0; k < 3; ++k)
      m.h = std::max(m.h, (m.nodes[t[k]] - m.nodes[t[(k + 1) % 3]]).norm());
  }
  m.validate();
  return m;
}

void write_mesh_file(const Mesh& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("mesh: cannot open '" + path + "' for writing");
  write_mesh(mesh, os);
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("mesh: cannot open '" + path + "'");
  return read_mesh(is);
}

}  // namespace tac

#include "phoband/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "phoband/errors.hpp"
#include "phoband/geometry.hpp"

namespace phoband {

namespace {

constexpr Vec2 kCellCenter{0.5, 0.5};

double edge_length(const Vec2& a, const Vec2& b) { return std::hypot(b[0] - a[0], b[1] - a[1]); }

double longest_edge(const UnitCellMesh& mesh) {
  double h = 0.0;
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) h = std::max(h, edge_length(mesh.vertices[t[e]], mesh.vertices[t[(e + 1) % 3]]));
  }
  return h;
}

void check_radius(double r) {
  if (!(r > 0.0 && r < 0.5)) {
    std::ostringstream os;
    os << "disc radius must satisfy 0 < r < 1/2, got " << r;
    throw InvalidGeometry(os.str());
  }
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

// Pairs vertices on the side coord==0 with those on coord==1, matching along the other axis.
void pair_sides(const UnitCellMesh& mesh, int coord, DisjointSets& sets) {
  const int other = 1 - coord;
  std::vector<int> low, high;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    const double c = mesh.vertices[v][coord];
    if (std::abs(c) <= kPairingTolerance) low.push_back(static_cast<int>(v));
    if (std::abs(c - 1.0) <= kPairingTolerance) high.push_back(static_cast<int>(v));
  }
  const char* axis = coord == 0 ? "x1" : "x2";
  if (low.size() != high.size()) {
    std::ostringstream os;
    os << "boundary " << axis << "=0 has " << low.size() << " vertices but " << axis << "=1 has " << high.size();
    throw NonMatchingBoundary(os.str());
  }
  auto by_other = [&](int a, int b) { return mesh.vertices[a][other] < mesh.vertices[b][other]; };
  std::ranges::sort(low, by_other);
  std::ranges::sort(high, by_other);
  for (std::size_t i = 0; i < low.size(); ++i) {
    if (std::abs(mesh.vertices[low[i]][other] - mesh.vertices[high[i]][other]) > kPairingTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "vertex " << low[i] + 1 << " on " << axis << "=0 has no mirror partner on " << axis << "=1";
      throw NonMatchingBoundary(os.str());
    }
    sets.unite(low[i], high[i]);
  }
}

bool on_same_side(const Vec2& a, const Vec2& b) {
  for (int c = 0; c < 2; ++c) {
    for (double side : {0.0, 1.0}) {
      if (std::abs(a[c] - side) <= kPairingTolerance && std::abs(b[c] - side) <= kPairingTolerance) return true;
    }
  }
  return false;
}

std::string next_data_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return line;
  }
  throw ParseError("unexpected end of file");
}

}  // namespace

double UnitCellMesh::area(std::size_t t) const {
  const auto& tri = triangles[t];
  return geometry::signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
}

Vec2 UnitCellMesh::centroid(std::size_t t) const {
  const auto& tri = triangles[t];
  Vec2 c{0.0, 0.0};
  for (int v : tri) {
    c[0] += vertices[v][0] / 3.0;
    c[1] += vertices[v][1] / 3.0;
  }
  return c;
}

void classify_materials(UnitCellMesh& mesh) {
  const double r = mesh.disc_radius;
  mesh.material_tag.resize(mesh.n_triangles());
  mesh.inclusion_weight.resize(mesh.n_triangles());
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Vec2 c = mesh.centroid(t);
    const bool inside = std::hypot(c[0] - kCellCenter[0], c[1] - kCellCenter[1]) < r;
    mesh.material_tag[t] = inside ? Material::Inclusion : Material::Background;
    if (mesh.mass_rule == InclusionMass::Tagged) {
      mesh.inclusion_weight[t] = inside ? 1.0 : 0.0;
    } else {
      const auto& tri = mesh.triangles[t];
      const std::array<Vec2, 3> poly{mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]};
      const double frac = geometry::polygon_disc_area(poly, kCellCenter, r) / mesh.area(t);
      mesh.inclusion_weight[t] = std::clamp(frac, 0.0, 1.0);
    }
  }
}

UnitCellMesh generate_structured(int n, double r, InclusionMass rule) {
  if (n < 2) throw InvalidGeometry("structured mesh needs n >= 2 subdivisions per side");
  check_radius(r);
  UnitCellMesh mesh;
  mesh.disc_radius = r;
  mesh.mass_rule = rule;
  const int stride = n + 1;
  mesh.vertices.reserve(static_cast<std::size_t>(stride) * stride);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) mesh.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
  }
  mesh.triangles.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = i + j * stride, b = a + 1, d = a + stride, c = d + 1;
      mesh.triangles.push_back({a, b, d});
      mesh.triangles.push_back({b, c, d});
    }
  }
  mesh.h = std::sqrt(2.0) / n;
  classify_materials(mesh);
  return mesh;
}

UnitCellMesh refine_uniform(const UnitCellMesh& mesh) {
  UnitCellMesh out;
  out.disc_radius = mesh.disc_radius;
  out.mass_rule = mesh.mass_rule;
  out.vertices = mesh.vertices;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto [it, inserted] = midpoint.try_emplace({key.first, key.second}, static_cast<int>(out.vertices.size()));
    if (inserted) {
      const Vec2& p = mesh.vertices[a];
      const Vec2& q = mesh.vertices[b];
      out.vertices.push_back({0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])});
    }
    return it->second;
  };
  out.triangles.reserve(4 * mesh.n_triangles());
  for (const auto& t : mesh.triangles) {
    const int m01 = mid(t[0], t[1]), m12 = mid(t[1], t[2]), m20 = mid(t[2], t[0]);
    out.triangles.push_back({t[0], m01, m20});
    out.triangles.push_back({m01, t[1], m12});
    out.triangles.push_back({m20, m12, t[2]});
    out.triangles.push_back({m01, m12, m20});
  }
  out.h = longest_edge(out);
  classify_materials(out);
  return out;
}

PeriodicDofMap build_periodic_dof_map(const UnitCellMesh& mesh) {
  DisjointSets sets(mesh.n_vertices());
  pair_sides(mesh, 0, sets);
  pair_sides(mesh, 1, sets);
  PeriodicDofMap map;
  map.dof_of_vertex.assign(mesh.n_vertices(), -1);
  std::vector<int> dof_of_root(mesh.n_vertices(), -1);
  for (std::size_t v = 0; v < mesh.n_vertices(); ++v) {
    const int root = sets.find(static_cast<int>(v));
    if (dof_of_root[root] < 0) dof_of_root[root] = map.n_dofs++;
    map.dof_of_vertex[v] = dof_of_root[root];
  }
  return map;
}

void validate_mesh(const UnitCellMesh& mesh) {
  constexpr double tol = 1e-12;
  for (std::size_t v = 0; v < mesh.n_vertices(); ++v) {
    const Vec2& p = mesh.vertices[v];
    if (p[0] < -tol || p[0] > 1.0 + tol || p[1] < -tol || p[1] > 1.0 + tol) {
      throw InvalidGeometry("vertex " + std::to_string(v + 1) + " lies outside the unit cell");
    }
  }
  std::map<std::pair<int, int>, int> edge_count;
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int v : tri) {
      if (v < 0 || static_cast<std::size_t>(v) >= mesh.n_vertices()) {
        throw InvalidGeometry("triangle " + std::to_string(t + 1) + " references a missing vertex");
      }
    }
    const double a = mesh.area(t);
    if (!(a > 0.0)) {
      throw InvalidGeometry("triangle " + std::to_string(t + 1) + " is clockwise or degenerate");
    }
    total += a;
    for (int e = 0; e < 3; ++e) {
      const auto key = std::minmax(tri[e], tri[(e + 1) % 3]);
      ++edge_count[{key.first, key.second}];
    }
  }
  for (const auto& [edge, count] : edge_count) {
    if (count > 2 || (count == 1 && !on_same_side(mesh.vertices[edge.first], mesh.vertices[edge.second]))) {
      throw InvalidGeometry("non-conforming edge between vertices " + std::to_string(edge.first + 1) + " and " +
                            std::to_string(edge.second + 1));
    }
  }
  if (std::abs(total - 1.0) > tol) {
    std::ostringstream os;
    os.precision(17);
    os << "triangles cover area " << total << " instead of the unit cell";
    throw InvalidGeometry(os.str());
  }
}

UnitCellMesh import_mesh(std::istream& nodes, std::istream& elements, double r, InclusionMass rule) {
  check_radius(r);
  UnitCellMesh mesh;
  mesh.disc_radius = r;
  mesh.mass_rule = rule;

  auto parse_header = [](std::istream& in, const char* what, std::vector<long>& fields) {
    std::istringstream hs(next_data_line(in));
    long x;
    while (hs >> x) fields.push_back(x);
    if (fields.size() < 2 || fields[0] < 0) throw ParseError(std::string("malformed ") + what + " header");
  };

  std::vector<long> nh;
  parse_header(nodes, "node", nh);
  if (nh[1] != 2) throw ParseError("node file must declare dimension 2");
  mesh.vertices.resize(nh[0]);
  std::vector<bool> seen(nh[0], false);
  for (long i = 0; i < nh[0]; ++i) {
    std::istringstream ls(next_data_line(nodes));
    long idx;
    double x, y;
    if (!(ls >> idx >> x >> y)) throw ParseError("malformed node line " + std::to_string(i + 2));
    if (idx < 1 || idx > nh[0] || seen[idx - 1]) throw ParseError("bad node index " + std::to_string(idx));
    seen[idx - 1] = true;
    mesh.vertices[idx - 1] = {x, y};
  }

  std::vector<long> eh;
  parse_header(elements, "element", eh);
  if (eh[1] != 3) throw ParseError("element file must declare 3 vertices per element");
  const long n_attr = eh.size() > 2 ? eh[2] : 0;
  if (n_attr != 0 && n_attr != 1) throw ParseError("element file may carry 0 or 1 attributes");
  mesh.triangles.resize(eh[0]);
  std::vector<int> region(eh[0], 0);
  std::vector<bool> tseen(eh[0], false);
  for (long i = 0; i < eh[0]; ++i) {
    std::istringstream ls(next_data_line(elements));
    long idx, a, b, c;
    if (!(ls >> idx >> a >> b >> c)) throw ParseError("malformed element line " + std::to_string(i + 2));
    if (idx < 1 || idx > eh[0] || tseen[idx - 1]) throw ParseError("bad element index " + std::to_string(idx));
    tseen[idx - 1] = true;
    for (long v : {a, b, c}) {
      if (v < 1 || v > nh[0]) throw ParseError("element " + std::to_string(idx) + " references missing node");
    }
    mesh.triangles[idx - 1] = {static_cast<int>(a - 1), static_cast<int>(b - 1), static_cast<int>(c - 1)};
    if (n_attr == 1) {
      long reg;
      if (!(ls >> reg) || (reg != 0 && reg != 1)) throw ParseError("element " + std::to_string(idx) + " region must be 0 or 1");
      region[idx - 1] = static_cast<int>(reg);
    }
  }

  validate_mesh(mesh);
  mesh.h = longest_edge(mesh);
  if (n_attr == 1) {
    mesh.mass_rule = InclusionMass::Tagged;
    mesh.material_tag.resize(mesh.n_triangles());
    mesh.inclusion_weight.resize(mesh.n_triangles());
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
      mesh.material_tag[t] = region[t] ? Material::Inclusion : Material::Background;
      mesh.inclusion_weight[t] = region[t] ? 1.0 : 0.0;
    }
  } else {
    classify_materials(mesh);
  }
  build_periodic_dof_map(mesh);  // NonMatchingBoundary surfaces at import time
  return mesh;
}

UnitCellMesh import_mesh_files(const std::string& node_file, const std::string& ele_file, double r,
                               InclusionMass rule) {
  std::ifstream nodes(node_file), elements(ele_file);
  if (!nodes) throw ParseError("cannot open node file " + node_file);
  if (!elements) throw ParseError("cannot open element file " + ele_file);
  return import_mesh(nodes, elements, r, rule);
}

void export_mesh(const UnitCellMesh& mesh, std::ostream& nodes, std::ostream& elements, bool with_attributes) {
  nodes.precision(17);
  nodes << mesh.n_vertices() << " 2\n";
  for (std::size_t v = 0; v < mesh.n_vertices(); ++v) {
    nodes << v + 1 << ' ' << mesh.vertices[v][0] << ' ' << mesh.vertices[v][1] << '\n';
  }
  elements << mesh.n_triangles() << " 3 " << (with_attributes ? 1 : 0) << '\n';
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    elements << t + 1 << ' ' << tri[0] + 1 << ' ' << tri[1] + 1 << ' ' << tri[2] + 1;
    if (with_attributes) elements << ' ' << static_cast<int>(mesh.material_tag[t]);
    elements << '\n';
  }
}

double inclusion_tagged_area(const UnitCellMesh& mesh) {
  double a = 0.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    if (mesh.material_tag[t] == Material::Inclusion) a += mesh.area(t);
  }
  return a;
}

double total_area(const UnitCellMesh& mesh) {
  double a = 0.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) a += mesh.area(t);
  return a;
}

}  // namespace phoband

#include "ocfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <utility>

#include "ocfem/errors.hpp"

namespace ocfem {

namespace {

std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

double dist(const Vec2& p, const Vec2& q) { return std::hypot(q.x - p.x, q.y - p.y); }

double signed_area2(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
  return (p1.x - p0.x) * (p2.y - p0.y) - (p1.y - p0.y) * (p2.x - p0.x);
}

}  // namespace

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
           std::vector<BoundaryEdge> boundary_edges)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      boundary_edges_(std::move(boundary_edges)) {
  for (const auto& t : triangles_) {
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      if (a >= 0 && b >= 0 && a < num_vertices() && b < num_vertices())
        h_ = std::max(h_, dist(vertices_[a], vertices_[b]));
    }
  }
  validate();
}

double Mesh::triangle_area(int t) const {
  const auto& tri = triangles_[t];
  return 0.5 * signed_area2(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
}

double Mesh::edge_length(int a, int b) const { return dist(vertices_[a], vertices_[b]); }

std::vector<int> Mesh::vertices_on(BoundaryLabel label) const {
  std::vector<int> out;
  for (const auto& e : boundary_edges_) {
    if (e.label == label) {
      out.push_back(e.a);
      out.push_back(e.b);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void Mesh::validate() const {
  if (num_vertices() < 3) throw ValidationError("mesh: fewer than 3 vertices");
  if (num_triangles() < 1) throw ValidationError("mesh: no triangles");
  if (boundary_edges_.empty()) throw ValidationError("mesh: no boundary edges");

  for (const auto& v : vertices_) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y))
      throw ValidationError("mesh: non-finite vertex coordinates");
  }

  {
    std::vector<int> order(vertices_.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
      if (vertices_[i].x != vertices_[j].x) return vertices_[i].x < vertices_[j].x;
      return vertices_[i].y < vertices_[j].y;
    });
    for (size_t i = 1; i < order.size(); ++i) {
      const Vec2& p = vertices_[order[i - 1]];
      const Vec2& q = vertices_[order[i]];
      if (p.x == q.x && p.y == q.y)
        throw ValidationError("mesh: duplicate vertex coordinates");
    }
  }

  std::map<std::pair<int, int>, int> incidence;
  double hmax = 0.0;
  for (size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int k = 0; k < 3; ++k) {
      if (tri[k] < 0 || tri[k] >= num_vertices())
        throw ValidationError("mesh: triangle vertex index out of range");
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw ValidationError("mesh: triangle with repeated vertex");
    double area2 = signed_area2(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
    if (!(area2 > 0.0))
      throw ValidationError("mesh: triangle " + std::to_string(t) +
                            " is degenerate or not counterclockwise");
    for (int k = 0; k < 3; ++k) {
      int a = tri[k], b = tri[(k + 1) % 3];
      ++incidence[edge_key(a, b)];
      hmax = std::max(hmax, dist(vertices_[a], vertices_[b]));
    }
  }
  if (hmax != h_) throw ValidationError("mesh: cached mesh size is stale");

  for (const auto& [key, count] : incidence) {
    if (count > 2) throw ValidationError("mesh: edge shared by more than two triangles");
  }

  bool has_g1 = false, has_g2 = false;
  std::map<std::pair<int, int>, int> boundary_seen;
  for (const auto& e : boundary_edges_) {
    if (e.a < 0 || e.b < 0 || e.a >= num_vertices() || e.b >= num_vertices() || e.a == e.b)
      throw ValidationError("mesh: invalid boundary edge endpoints");
    auto it = incidence.find(edge_key(e.a, e.b));
    if (it == incidence.end())
      throw ValidationError("mesh: boundary edge is not a triangle edge");
    if (it->second != 1)
      throw ValidationError("mesh: boundary edge is interior to the triangulation");
    if (++boundary_seen[edge_key(e.a, e.b)] > 1)
      throw ValidationError("mesh: duplicate boundary edge");
    (e.label == BoundaryLabel::gamma1 ? has_g1 : has_g2) = true;
  }
  for (const auto& [key, count] : incidence) {
    if (count == 1 && boundary_seen.find(key) == boundary_seen.end())
      throw ValidationError("mesh: unlabeled boundary edge");
  }
  if (!has_g1 || !has_g2)
    throw ValidationError("mesh: boundary must carry both Gamma1 and Gamma2");
}

MeshPtr build_unit_square(int n, const std::set<Side>& gamma1_sides) {
  if (n < 1) throw ValidationError("build_unit_square: n must be at least 1");
  if (gamma1_sides.empty() || gamma1_sides.size() >= 4)
    throw ValidationError("build_unit_square: Gamma1 must be a proper nonempty side set");

  const int m = n + 1;
  auto idx = [m](int i, int j) { return j * m + i; };

  std::vector<Vec2> vertices(static_cast<size_t>(m) * m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i)
      vertices[idx(i, j)] = {static_cast<double>(i) / n, static_cast<double>(j) / n};

  // Every cell is split along the (i,j)-(i+1,j+1) diagonal.
  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(2 * static_cast<size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      triangles.push_back({idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)});
      triangles.push_back({idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)});
    }
  }

  auto label_of = [&gamma1_sides](Side s) {
    return gamma1_sides.count(s) ? BoundaryLabel::gamma1 : BoundaryLabel::gamma2;
  };
  std::vector<BoundaryEdge> edges;
  edges.reserve(4 * static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    edges.push_back({idx(i, 0), idx(i + 1, 0), label_of(Side::bottom)});
  for (int j = 0; j < n; ++j)
    edges.push_back({idx(n, j), idx(n, j + 1), label_of(Side::right)});
  for (int i = n; i > 0; --i)
    edges.push_back({idx(i, n), idx(i - 1, n), label_of(Side::top)});
  for (int j = n; j > 0; --j)
    edges.push_back({idx(0, j), idx(0, j - 1), label_of(Side::left)});

  return std::make_shared<const Mesh>(std::move(vertices), std::move(triangles),
                                      std::move(edges));
}

MeshPtr refine_uniform(const Mesh& mesh) {
  std::vector<Vec2> vertices = mesh.vertices();

  // Midpoint vertices appended in sorted edge-key order.
  std::map<std::pair<int, int>, int> midpoint;
  for (const auto& tri : mesh.triangles())
    for (int k = 0; k < 3; ++k) midpoint[edge_key(tri[k], tri[(k + 1) % 3])] = -1;
  for (auto& [key, id] : midpoint) {
    id = static_cast<int>(vertices.size());
    const Vec2& p = mesh.vertices()[key.first];
    const Vec2& q = mesh.vertices()[key.second];
    vertices.push_back({0.5 * (p.x + q.x), 0.5 * (p.y + q.y)});
  }

  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(4 * mesh.triangles().size());
  for (const auto& tri : mesh.triangles()) {
    int a = tri[0], b = tri[1], c = tri[2];
    int ab = midpoint[edge_key(a, b)];
    int bc = midpoint[edge_key(b, c)];
    int ca = midpoint[edge_key(c, a)];
    triangles.push_back({a, ab, ca});
    triangles.push_back({ab, b, bc});
    triangles.push_back({ca, bc, c});
    triangles.push_back({ab, bc, ca});
  }

  std::vector<BoundaryEdge> edges;
  edges.reserve(2 * mesh.boundary_edges().size());
  for (const auto& e : mesh.boundary_edges()) {
    int m = midpoint[edge_key(e.a, e.b)];
    edges.push_back({e.a, m, e.label});
    edges.push_back({m, e.b, e.label});
  }

  return std::make_shared<const Mesh>(std::move(vertices), std::move(triangles),
                                      std::move(edges));
}

double boundary_measure(const Mesh& mesh, BoundaryLabel label) {
  double total = 0.0;
  for (const auto& e : mesh.boundary_edges())
    if (e.label == label) total += mesh.edge_length(e.a, e.b);
  return total;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  char buf[80];
  for (const auto& v : mesh.vertices()) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g\n", v.x, v.y);
    os << buf;
  }
  for (const auto& t : mesh.triangles()) os << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : mesh.boundary_edges())
    os << "e " << e.a << ' ' << e.b << ' '
       << (e.label == BoundaryLabel::gamma1 ? "Gamma1" : "Gamma2") << '\n';
}

PointLocator::PointLocator(const Mesh& mesh) : mesh_(&mesh) {
  xlo_ = ylo_ = 1e300;
  xhi_ = yhi_ = -1e300;
  for (const auto& v : mesh.vertices()) {
    xlo_ = std::min(xlo_, v.x);
    xhi_ = std::max(xhi_, v.x);
    ylo_ = std::min(ylo_, v.y);
    yhi_ = std::max(yhi_, v.y);
  }
  nx_ = std::max(1, static_cast<int>(std::sqrt(mesh.num_triangles() / 2.0)));
  cells_.resize(static_cast<size_t>(nx_) * nx_);
  const double wx = std::max(xhi_ - xlo_, 1e-300);
  const double wy = std::max(yhi_ - ylo_, 1e-300);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    double bx0 = 1e300, bx1 = -1e300, by0 = 1e300, by1 = -1e300;
    for (int k = 0; k < 3; ++k) {
      const Vec2& p = mesh.vertices()[tri[k]];
      bx0 = std::min(bx0, p.x);
      bx1 = std::max(bx1, p.x);
      by0 = std::min(by0, p.y);
      by1 = std::max(by1, p.y);
    }
    auto clampi = [this](int i) { return std::clamp(i, 0, nx_ - 1); };
    int i0 = clampi(static_cast<int>((bx0 - xlo_) / wx * nx_ - 0.5));
    int i1 = clampi(static_cast<int>((bx1 - xlo_) / wx * nx_ + 0.5));
    int j0 = clampi(static_cast<int>((by0 - ylo_) / wy * nx_ - 0.5));
    int j1 = clampi(static_cast<int>((by1 - ylo_) / wy * nx_ + 0.5));
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) cells_[static_cast<size_t>(j) * nx_ + i].push_back(t);
  }
}

int PointLocator::cell_of(double x, double y) const {
  const double wx = std::max(xhi_ - xlo_, 1e-300);
  const double wy = std::max(yhi_ - ylo_, 1e-300);
  int i = std::clamp(static_cast<int>((x - xlo_) / wx * nx_), 0, nx_ - 1);
  int j = std::clamp(static_cast<int>((y - ylo_) / wy * nx_), 0, nx_ - 1);
  return j * nx_ + i;
}

int PointLocator::locate(double x, double y, std::array<double, 3>& bary) const {
  const double tol = -1e-12;
  auto test = [&](int t) {
    const auto& tri = mesh_->triangles()[t];
    const Vec2& p0 = mesh_->vertices()[tri[0]];
    const Vec2& p1 = mesh_->vertices()[tri[1]];
    const Vec2& p2 = mesh_->vertices()[tri[2]];
    double det = signed_area2(p0, p1, p2);
    double b0 = ((p1.x - x) * (p2.y - y) - (p1.y - y) * (p2.x - x)) / det;
    double b1 = ((p2.x - x) * (p0.y - y) - (p2.y - y) * (p0.x - x)) / det;
    double b2 = 1.0 - b0 - b1;
    if (b0 >= tol && b1 >= tol && b2 >= tol) {
      bary = {b0, b1, b2};
      return true;
    }
    return false;
  };
  // the grid lookup needs in-range coordinates; the containment test does not
  for (int t : cells_[cell_of(std::clamp(x, xlo_, xhi_), std::clamp(y, ylo_, yhi_))])
    if (test(t)) return t;
  for (int t = 0; t < mesh_->num_triangles(); ++t)
    if (test(t)) return t;
  return -1;
}

}  // namespace ocfem

#include "ocfem/fem.hpp"

#include <algorithm>
#include <cmath>

#include "ocfem/errors.hpp"

namespace ocfem {

namespace {

void check_tag(const Mesh& mesh, const std::vector<double>& values, SpaceTag tag,
               double lift) {
  if (static_cast<int>(values.size()) != mesh.num_vertices())
    throw ValidationError("fe function: value count differs from vertex count");
  if (tag == SpaceTag::vh) return;
  const double required = tag == SpaceTag::v0h ? 0.0 : lift;
  for (int v : mesh.vertices_on(BoundaryLabel::gamma1)) {
    if (values[v] != required)
      throw ValidationError("fe function: Gamma1 nodal values violate the space tag");
  }
}

struct TriGeom {
  double area;
  double b[3], c[3];  // grad lambda_i = (b_i, c_i) / (2 area)
};

TriGeom tri_geom(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles()[t];
  const Vec2& p0 = mesh.vertices()[tri[0]];
  const Vec2& p1 = mesh.vertices()[tri[1]];
  const Vec2& p2 = mesh.vertices()[tri[2]];
  TriGeom g;
  g.b[0] = p1.y - p2.y;
  g.b[1] = p2.y - p0.y;
  g.b[2] = p0.y - p1.y;
  g.c[0] = p2.x - p1.x;
  g.c[1] = p0.x - p2.x;
  g.c[2] = p1.x - p0.x;
  g.area = 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p1.y - p0.y) * (p2.x - p0.x));
  return g;
}

struct QuadPoint {
  double l0, l1, l2, w;
};

// Degree-5 rule, 7 points, weights normalized to a unit-area triangle.
std::array<QuadPoint, 7> quad_rule() {
  const double s15 = std::sqrt(15.0);
  const double a1 = (6.0 + s15) / 21.0, w1 = (155.0 + s15) / 1200.0;
  const double a2 = (6.0 - s15) / 21.0, w2 = (155.0 - s15) / 1200.0;
  return {{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0},
           {a1, a1, 1.0 - 2.0 * a1, w1},
           {a1, 1.0 - 2.0 * a1, a1, w1},
           {1.0 - 2.0 * a1, a1, a1, w1},
           {a2, a2, 1.0 - 2.0 * a2, w2},
           {a2, 1.0 - 2.0 * a2, a2, w2},
           {1.0 - 2.0 * a2, a2, a2, w2}}};
}

}  // namespace

FeFunction::FeFunction(MeshPtr mesh, std::vector<double> values, SpaceTag tag, double lift)
    : mesh_(std::move(mesh)), values_(std::move(values)), tag_(tag), lift_(lift) {
  if (!mesh_) throw ValidationError("fe function: null mesh");
  check_tag(*mesh_, values_, tag_, lift_);
}

FeFunction FeFunction::constant(MeshPtr mesh, double value, SpaceTag tag) {
  if (!mesh) throw ValidationError("fe function: null mesh");
  std::vector<double> values(mesh->num_vertices(), value);
  return FeFunction(std::move(mesh), std::move(values), tag, value);
}

FeFunction FeFunction::zero(MeshPtr mesh, SpaceTag tag) {
  if (!mesh) throw ValidationError("fe function: null mesh");
  std::vector<double> values(mesh->num_vertices(), 0.0);
  return FeFunction(std::move(mesh), std::move(values), tag, 0.0);
}

BoundaryTrace::BoundaryTrace(MeshPtr mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
  if (!mesh_) throw ValidationError("boundary trace: null mesh");
  nodes_ = mesh_->vertices_on(BoundaryLabel::gamma2);
  if (values_.size() != nodes_.size())
    throw ValidationError("boundary trace: value count differs from Gamma2 node count");
}

BoundaryTrace BoundaryTrace::zero(MeshPtr mesh) {
  if (!mesh) throw ValidationError("boundary trace: null mesh");
  std::vector<double> values(mesh->vertices_on(BoundaryLabel::gamma2).size(), 0.0);
  return BoundaryTrace(std::move(mesh), std::move(values));
}

SparseSymMatrix assemble_domain_mass(const Mesh& mesh) {
  std::vector<Triplet> triplets;
  triplets.reserve(9 * mesh.triangles().size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const double a = mesh.triangle_area(t);
    if (!(a > 0.0)) throw ValidationError("assembly: degenerate triangle");
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        triplets.push_back({tri[i], tri[j], a / 12.0 * (i == j ? 2.0 : 1.0)});
  }
  return SparseSymMatrix::from_triplets(mesh.num_vertices(), std::move(triplets));
}

SparseSymMatrix assemble_stiffness(const Mesh& mesh) {
  std::vector<Triplet> triplets;
  triplets.reserve(9 * mesh.triangles().size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const TriGeom g = tri_geom(mesh, t);
    if (!(g.area > 0.0)) throw ValidationError("assembly: degenerate triangle");
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        triplets.push_back(
            {tri[i], tri[j], (g.b[i] * g.b[j] + g.c[i] * g.c[j]) / (4.0 * g.area)});
  }
  return SparseSymMatrix::from_triplets(mesh.num_vertices(), std::move(triplets));
}

SparseSymMatrix assemble_boundary_mass(const Mesh& mesh, BoundaryLabel label) {
  std::vector<Triplet> triplets;
  for (const auto& e : mesh.boundary_edges()) {
    if (e.label != label) continue;
    const double len = mesh.edge_length(e.a, e.b);
    if (!(len > 0.0)) throw ValidationError("assembly: degenerate boundary edge");
    const int idx[2] = {e.a, e.b};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        triplets.push_back({idx[i], idx[j], len / 6.0 * (i == j ? 2.0 : 1.0)});
  }
  return SparseSymMatrix::from_triplets(mesh.num_vertices(), std::move(triplets));
}

Forms assemble_forms(MeshPtr mesh) {
  if (!mesh) throw ValidationError("assemble_forms: null mesh");
  Forms f;
  f.mesh = mesh;
  f.mass = assemble_domain_mass(*mesh);
  f.stiffness = assemble_stiffness(*mesh);
  f.boundary_mass_g1 = assemble_boundary_mass(*mesh, BoundaryLabel::gamma1);
  f.boundary_mass_g2 = assemble_boundary_mass(*mesh, BoundaryLabel::gamma2);
  return f;
}

FeFunction interpolate(MeshPtr mesh, const ScalarField& f) {
  if (!mesh) throw ValidationError("interpolate: null mesh");
  std::vector<double> values(mesh->num_vertices());
  for (int i = 0; i < mesh->num_vertices(); ++i) {
    const Vec2& p = mesh->vertices()[i];
    values[i] = f(p.x, p.y);
  }
  return FeFunction(std::move(mesh), std::move(values));
}

BoundaryTrace interpolate_gamma2(MeshPtr mesh, const ScalarField& f) {
  if (!mesh) throw ValidationError("interpolate_gamma2: null mesh");
  auto nodes = mesh->vertices_on(BoundaryLabel::gamma2);
  std::vector<double> values(nodes.size());
  for (size_t k = 0; k < nodes.size(); ++k) {
    const Vec2& p = mesh->vertices()[nodes[k]];
    values[k] = f(p.x, p.y);
  }
  return BoundaryTrace(std::move(mesh), std::move(values));
}

BoundaryTrace project_gamma2(MeshPtr mesh, const ScalarField& f) {
  if (!mesh) throw ValidationError("project_gamma2: null mesh");
  auto nodes = mesh->vertices_on(BoundaryLabel::gamma2);
  std::vector<int> pos(mesh->num_vertices(), -1);
  for (size_t k = 0; k < nodes.size(); ++k) pos[nodes[k]] = static_cast<int>(k);

  // Edgewise 2-point Gauss load; quadrature points avoid the corner nodes,
  // so one-sided data remains well defined there.
  std::vector<double> rhs(nodes.size(), 0.0);
  const double t0 = 0.5 - 0.5 / std::sqrt(3.0);
  const double t1 = 0.5 + 0.5 / std::sqrt(3.0);
  for (const auto& e : mesh->boundary_edges()) {
    if (e.label != BoundaryLabel::gamma2) continue;
    const Vec2& pa = mesh->vertices()[e.a];
    const Vec2& pb = mesh->vertices()[e.b];
    const double len = mesh->edge_length(e.a, e.b);
    for (double t : {t0, t1}) {
      const double x = pa.x + t * (pb.x - pa.x);
      const double y = pa.y + t * (pb.y - pa.y);
      const double v = f(x, y) * 0.5 * len;
      rhs[pos[e.a]] += v * (1.0 - t);
      rhs[pos[e.b]] += v * t;
    }
  }

  SparseSymMatrix mass =
      assemble_boundary_mass(*mesh, BoundaryLabel::gamma2).restricted(nodes, nodes);
  std::vector<double> values = spd_solve(mass, rhs, nullptr, {1e-13, 0});
  return BoundaryTrace(std::move(mesh), std::move(values));
}

double norm(const Forms& forms, const FeFunction& u, NormKind kind) {
  const auto& x = u.values();
  switch (kind) {
    case NormKind::h:
      return std::sqrt(std::max(0.0, forms.mass.inner(x, x)));
    case NormKind::v0:
      return std::sqrt(std::max(0.0, forms.stiffness.inner(x, x)));
    case NormKind::v:
      return std::sqrt(std::max(0.0, forms.mass.inner(x, x) + forms.stiffness.inner(x, x)));
  }
  return 0.0;
}

double norm_q(const Forms& forms, const BoundaryTrace& q) {
  std::vector<double> ext = extend_trace(*forms.mesh, q);
  return std::sqrt(std::max(0.0, forms.boundary_mass_g2.inner(ext, ext)));
}

double control_norm(const Forms& forms, const ControlPair& c) {
  const double ng = norm(forms, c.g, NormKind::h);
  const double nq = norm_q(forms, c.q);
  return std::sqrt(ng * ng + nq * nq);
}

std::vector<double> extend_trace(const Mesh& mesh, const BoundaryTrace& q) {
  std::vector<double> out(mesh.num_vertices(), 0.0);
  for (size_t k = 0; k < q.nodes().size(); ++k) out[q.nodes()[k]] = q.values()[k];
  return out;
}

BoundaryTrace restrict_trace(MeshPtr mesh, const std::vector<double>& vertex_values) {
  if (!mesh) throw ValidationError("restrict_trace: null mesh");
  auto nodes = mesh->vertices_on(BoundaryLabel::gamma2);
  std::vector<double> values(nodes.size());
  for (size_t k = 0; k < nodes.size(); ++k) values[k] = vertex_values[nodes[k]];
  return BoundaryTrace(std::move(mesh), std::move(values));
}

double l2_error(const Mesh& mesh, const FeFunction& u, const ScalarField& exact) {
  const auto rule = quad_rule();
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const Vec2& p0 = mesh.vertices()[tri[0]];
    const Vec2& p1 = mesh.vertices()[tri[1]];
    const Vec2& p2 = mesh.vertices()[tri[2]];
    const double area = mesh.triangle_area(t);
    for (const auto& qp : rule) {
      const double x = qp.l0 * p0.x + qp.l1 * p1.x + qp.l2 * p2.x;
      const double y = qp.l0 * p0.y + qp.l1 * p1.y + qp.l2 * p2.y;
      const double uh = qp.l0 * u.values()[tri[0]] + qp.l1 * u.values()[tri[1]] +
                        qp.l2 * u.values()[tri[2]];
      const double d = uh - exact(x, y);
      sum += qp.w * area * d * d;
    }
  }
  return std::sqrt(sum);
}

double h1semi_error(const Mesh& mesh, const FeFunction& u, const ScalarField& dx,
                    const ScalarField& dy) {
  const auto rule = quad_rule();
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const TriGeom g = tri_geom(mesh, t);
    const Vec2& p0 = mesh.vertices()[tri[0]];
    const Vec2& p1 = mesh.vertices()[tri[1]];
    const Vec2& p2 = mesh.vertices()[tri[2]];
    double gx = 0.0, gy = 0.0;
    for (int i = 0; i < 3; ++i) {
      gx += u.values()[tri[i]] * g.b[i] / (2.0 * g.area);
      gy += u.values()[tri[i]] * g.c[i] / (2.0 * g.area);
    }
    for (const auto& qp : rule) {
      const double x = qp.l0 * p0.x + qp.l1 * p1.x + qp.l2 * p2.x;
      const double y = qp.l0 * p0.y + qp.l1 * p1.y + qp.l2 * p2.y;
      const double ex = gx - dx(x, y);
      const double ey = gy - dy(x, y);
      sum += qp.w * g.area * (ex * ex + ey * ey);
    }
  }
  return std::sqrt(sum);
}

double evaluate(const FeFunction& u, const PointLocator& locator, double x, double y) {
  std::array<double, 3> bary;
  const int t = locator.locate(x, y, bary);
  if (t < 0) throw ValidationError("evaluate: point outside the mesh");
  const auto& tri = u.mesh()->triangles()[t];
  return bary[0] * u.values()[tri[0]] + bary[1] * u.values()[tri[1]] +
         bary[2] * u.values()[tri[2]];
}

FeFunction interpolate_onto(const FeFunction& src, MeshPtr target) {
  if (!target) throw ValidationError("interpolate_onto: null target mesh");
  PointLocator locator(*src.mesh());
  std::vector<double> values(target->num_vertices());
  for (int i = 0; i < target->num_vertices(); ++i) {
    const Vec2& p = target->vertices()[i];
    values[i] = evaluate(src, locator, p.x, p.y);
  }
  return FeFunction(std::move(target), std::move(values));
}

BoundaryTrace transfer_gamma2(const BoundaryTrace& src, MeshPtr target) {
  if (!target) throw ValidationError("transfer_gamma2: null target mesh");
  const Mesh& smesh = *src.mesh();
  std::vector<int> pos(smesh.num_vertices(), -1);
  for (size_t k = 0; k < src.nodes().size(); ++k) pos[src.nodes()[k]] = static_cast<int>(k);

  auto tnodes = target->vertices_on(BoundaryLabel::gamma2);
  std::vector<double> values(tnodes.size());
  for (size_t k = 0; k < tnodes.size(); ++k) {
    const Vec2& p = target->vertices()[tnodes[k]];
    bool found = false;
    for (const auto& e : smesh.boundary_edges()) {
      if (e.label != BoundaryLabel::gamma2) continue;
      const Vec2& pa = smesh.vertices()[e.a];
      const Vec2& pb = smesh.vertices()[e.b];
      const double ex = pb.x - pa.x, ey = pb.y - pa.y;
      const double len2 = ex * ex + ey * ey;
      const double cross = (p.x - pa.x) * ey - (p.y - pa.y) * ex;
      if (cross * cross > 1e-24 * len2) continue;
      const double t = ((p.x - pa.x) * ex + (p.y - pa.y) * ey) / len2;
      if (t < -1e-12 || t > 1.0 + 1e-12) continue;
      values[k] = (1.0 - t) * src.values()[pos[e.a]] + t * src.values()[pos[e.b]];
      found = true;
      break;
    }
    if (!found)
      throw ValidationError("transfer_gamma2: target node is not on the source Gamma2");
  }
  return BoundaryTrace(std::move(target), std::move(values));
}

}  // namespace ocfem

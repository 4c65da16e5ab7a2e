#pragma once

#include <functional>
#include <vector>

#include "ocfem/mesh.hpp"
#include "ocfem/sparse.hpp"

namespace ocfem {

// Membership claim for a nodal function: the full P1 space Vh, the subspace
// V0h vanishing at Gamma1 vertices, or the affine family Kh of functions
// equal to a fixed lift value at Gamma1 vertices.
enum class SpaceTag { vh, v0h, kh };

class FeFunction {
 public:
  FeFunction(MeshPtr mesh, std::vector<double> values, SpaceTag tag = SpaceTag::vh,
             double lift = 0.0);

  static FeFunction constant(MeshPtr mesh, double value, SpaceTag tag = SpaceTag::vh);
  static FeFunction zero(MeshPtr mesh, SpaceTag tag = SpaceTag::vh);

  const MeshPtr& mesh() const { return mesh_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  SpaceTag tag() const { return tag_; }
  double lift() const { return lift_; }
  int size() const { return static_cast<int>(values_.size()); }

 private:
  MeshPtr mesh_;
  std::vector<double> values_;
  SpaceTag tag_;
  double lift_;
};

// Nodal values on the Gamma2 vertices (sorted ascending), i.e. a continuous
// piecewise-linear function on the Gamma2 edge mesh.
class BoundaryTrace {
 public:
  BoundaryTrace(MeshPtr mesh, std::vector<double> values);

  static BoundaryTrace zero(MeshPtr mesh);

  const MeshPtr& mesh() const { return mesh_; }
  const std::vector<int>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  int size() const { return static_cast<int>(values_.size()); }

 private:
  MeshPtr mesh_;
  std::vector<int> nodes_;
  std::vector<double> values_;
};

// Distributed control g paired with a boundary control q on Gamma2.
struct ControlPair {
  FeFunction g;
  BoundaryTrace q;
};

// The assembled bilinear forms of one mesh.
struct Forms {
  MeshPtr mesh;
  SparseSymMatrix mass;            // (u, v) over the domain
  SparseSymMatrix stiffness;       // (grad u, grad v)
  SparseSymMatrix boundary_mass_g1;
  SparseSymMatrix boundary_mass_g2;
};

SparseSymMatrix assemble_domain_mass(const Mesh& mesh);
SparseSymMatrix assemble_stiffness(const Mesh& mesh);
SparseSymMatrix assemble_boundary_mass(const Mesh& mesh, BoundaryLabel label);
Forms assemble_forms(MeshPtr mesh);

using ScalarField = std::function<double(double, double)>;

FeFunction interpolate(MeshPtr mesh, const ScalarField& f);
BoundaryTrace interpolate_gamma2(MeshPtr mesh, const ScalarField& f);

// L2(Gamma2) projection onto the trace space. Unlike nodal interpolation it
// is well defined for data with jumps at boundary corners, and pairing the
// result against traces of Vh functions reproduces the exact boundary load.
BoundaryTrace project_gamma2(MeshPtr mesh, const ScalarField& f);

enum class NormKind { h, v0, v };  // L2, energy seminorm, full V norm

double norm(const Forms& forms, const FeFunction& u, NormKind kind);
double norm_q(const Forms& forms, const BoundaryTrace& q);
double control_norm(const Forms& forms, const ControlPair& c);

// Zero extension of a trace to a full vertex vector, and the reverse
// restriction of vertex values to Gamma2 nodes.
std::vector<double> extend_trace(const Mesh& mesh, const BoundaryTrace& q);
BoundaryTrace restrict_trace(MeshPtr mesh, const std::vector<double>& vertex_values);

// Quadrature norms of the error against a smooth exact field (degree-5 rule).
double l2_error(const Mesh& mesh, const FeFunction& u, const ScalarField& exact);
double h1semi_error(const Mesh& mesh, const FeFunction& u, const ScalarField& dx,
                    const ScalarField& dy);

double evaluate(const FeFunction& u, const PointLocator& locator, double x, double y);

// Nodal interpolation of a P1 function onto another mesh of the same domain.
FeFunction interpolate_onto(const FeFunction& src, MeshPtr target);
// Same for a Gamma2 trace; both meshes must label the same boundary parts.
BoundaryTrace transfer_gamma2(const BoundaryTrace& src, MeshPtr target);

}  // namespace ocfem

#ifndef BERGER_OPERATORS_HPP
#define BERGER_OPERATORS_HPP

#include <Eigen/Sparse>
#include <array>
#include <memory>
#include <vector>

#include "berger/field.hpp"
#include "berger/geometry.hpp"

namespace berger
{
  struct PhysicsParams
  {
    double gamma = 0.0;  // in-plane parameter, >= 0
    double mu = 0.3;     // Poisson modulus in (0, 1]; 1 for the hinged runs
    double mu1 = 0.0;    // free-edge boundary stiffness, >= 0
    Field load;          // static pressure p; empty field means zero

    void validate() const;
  };

  /// 3/5-point centered Laplacian at every non-ghost node. Boundary values
  /// reach one ghost layer, so the field's ghosts must be closed.
  Field laplacian(const Field& u);

  /// Composition laplacian(laplacian(u)), evaluated at interior nodes.
  Field biharmonic(const Field& u);

  /// Gradient component (axis 0 or 1) at every non-ghost node: centered at
  /// interior nodes, one-sided second order at boundary nodes. Ghost-free.
  Field gradient_component(const Field& u, int axis);

  /// Trapezoid quadrature of |grad u|^2.
  double gradient_norm_sq(const Field& u);

  /// gamma - ||grad u||^2
  double berger_coefficient(const Field& u, const PhysicsParams& params);

  /// [u, v] = u_xx v_yy + u_yy v_xx - 2 u_xy v_xy at interior nodes (2D only).
  Field von_karman_bracket(const Field& u, const Field& v);

  /// a(u, v) = int(lap u lap v - (1 - mu)[u, v]) + mu1 * int_{free} u v.
  /// With mu = 1 this is (lap u, lap v).
  double bilinear_a(const Field& u, const Field& v, const PhysicsParams& params);

  /// One-sided second-order outward normal derivative at the nodes of a
  /// segment, ordered as Mesh::segment_nodes.
  std::vector<double> normal_derivative_trace(const Field& u, Segment s);

  /// Same trace at every boundary node, storage-indexed (corners use the
  /// x-edge direction they are assigned to). Zero off-boundary.
  std::vector<double> normal_trace_all(const Field& u);

  /// One-sided second normal derivative d2u/dnu2 at boundary nodes via the
  /// three-point interior stencil (first-order; feeds trace reports only).
  std::vector<double> second_normal_trace_all(const Field& u);

  /// Tangential derivative along the edge of a boundary nodal function
  /// (storage-indexed input/output); centered along the edge, one-sided at
  /// edge ends.
  std::vector<double> tangential_derivative_boundary(const Mesh& mesh,
                                                     const std::vector<double>& b);

  /// Boundary quadrature of a storage-indexed nodal function (corner weight 0).
  double integrate_boundary(const Mesh& mesh, const std::vector<double>& b);

  /// One node of the damped part of the boundary closure.
  struct DampedBoundaryNode
  {
    int storage_id = -1;    // boundary node carrying the feedback
    int load_unknown = -1;  // unknown receiving the closure load
    double load_coeff = 0;  // dv/dt contribution per unit damping value
    // velocity argument of the damping: sum of trace_coeffs[k] * v[trace_unknowns[k]]
    std::array<int, 2> trace_unknowns{-1, -1};
    std::array<double, 2> trace_coeffs{0.0, 0.0};
  };

  /// Ghost-eliminated discrete operators for one configuration on one mesh.
  struct DiscreteSystem
  {
    std::shared_ptr<const Mesh> mesh;
    Configuration config;
    double mu1 = 0.0;
    int n_unknowns = 0;
    std::vector<int> unknown_of_storage;  // -1 where pinned/ghost
    std::vector<int> storage_of_unknown;
    Eigen::SparseMatrix<double> stiffness;  // biharmonic with homogeneous closure
    Eigen::SparseMatrix<double> laplace;    // Dirichlet Laplacian (zero row at a free end)
    std::vector<DampedBoundaryNode> damped_nodes;

    Eigen::VectorXd restrict_field(const Field& f) const;
    void scatter(const Eigen::VectorXd& x, Field& f) const;  // unknowns only
  };

  DiscreteSystem assemble_discrete_system(std::shared_ptr<const Mesh> mesh,
                                          double mu1 = 0.0);

  struct EigenvalueOptions
  {
    double tolerance = 1e-8;
    int max_iterations = 500;
  };

  /// Smallest eigenvalue of the configuration's homogeneous biharmonic
  /// operator by inverse power iteration. Throws on non-convergence.
  double smallest_eigenvalue(Configuration config, const Mesh& mesh,
                             double mu1 = 0.0, EigenvalueOptions opts = {});

}  // namespace berger

#endif

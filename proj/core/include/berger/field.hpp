#ifndef BERGER_FIELD_HPP
#define BERGER_FIELD_HPP

#include <functional>
#include <memory>
#include <vector>

#include "berger/geometry.hpp"

namespace berger
{
  /// Scalar grid function including the two ghost layers.
  ///
  /// Ghost values are derived data: analytic sampling fills them from the
  /// formula; trajectory states get them from the boundary closure. Operators
  /// that reach into the ghost layers require ghosts_valid.
  struct Field
  {
    std::shared_ptr<const Mesh> mesh;
    std::vector<double> values;  // storage-indexed
    bool ghosts_valid = false;

    Field() = default;
    explicit Field(std::shared_ptr<const Mesh> m)
      : mesh(std::move(m)), values(mesh->storage_size(), 0.0)
    {}

    double& at(int i, int j = 0) { return values[mesh->index(i, j)]; }
    double at(int i, int j = 0) const { return values[mesh->index(i, j)]; }

    bool empty() const { return !mesh; }

    static Field zeros(std::shared_ptr<const Mesh> m)
    {
      Field f(std::move(m));
      f.ghosts_valid = true;
      return f;
    }

    /// Samples f(x, y) at every node, ghosts included.
    static Field sample(std::shared_ptr<const Mesh> m,
                        const std::function<double(double, double)>& f);
  };

  Field operator-(const Field& a, const Field& b);

  /// Trapezoid quadrature of a nodal function over the domain.
  double integrate(const Field& f);
  /// Trapezoid quadrature of the product fg over the domain.
  double inner(const Field& f, const Field& g);
  /// sqrt(inner(f, f))
  double l2_norm(const Field& f);
  /// Max over non-ghost nodes of |f|.
  double max_abs(const Field& f);

}  // namespace berger

#endif

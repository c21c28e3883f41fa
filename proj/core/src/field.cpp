#include "berger/field.hpp"

#include <cmath>
#include <stdexcept>

namespace berger
{
  Field Field::sample(std::shared_ptr<const Mesh> m,
                      const std::function<double(double, double)>& f)
  {
    Field out(std::move(m));
    const Mesh& mesh = *out.mesh;
    const int jlo = mesh.dim == 2 ? -2 : 0;
    const int jhi = mesh.dim == 2 ? mesh.ny + 1 : 0;
    for (int j = jlo; j <= jhi; ++j)
      for (int i = -2; i <= mesh.nx + 1; ++i)
        out.values[mesh.index(i, j)] = f(mesh.x(i), mesh.y(j));
    out.ghosts_valid = true;
    return out;
  }

  Field operator-(const Field& a, const Field& b)
  {
    if (a.mesh != b.mesh)
      throw std::invalid_argument("field mesh mismatch");
    Field out(a.mesh);
    for (std::size_t k = 0; k < out.values.size(); ++k)
      out.values[k] = a.values[k] - b.values[k];
    out.ghosts_valid = a.ghosts_valid && b.ghosts_valid;
    return out;
  }

  double integrate(const Field& f)
  {
    const Mesh& mesh = *f.mesh;
    double sum = 0.0;
    for (int id = 0; id < mesh.storage_size(); ++id)
      if (mesh.area_weight[id] != 0.0)
        sum += mesh.area_weight[id] * f.values[id];
    return sum;
  }

  double inner(const Field& f, const Field& g)
  {
    if (f.mesh != g.mesh)
      throw std::invalid_argument("field mesh mismatch");
    const Mesh& mesh = *f.mesh;
    double sum = 0.0;
    for (int id = 0; id < mesh.storage_size(); ++id)
      if (mesh.area_weight[id] != 0.0)
        sum += mesh.area_weight[id] * f.values[id] * g.values[id];
    return sum;
  }

  double l2_norm(const Field& f) { return std::sqrt(inner(f, f)); }

  double max_abs(const Field& f)
  {
    const Mesh& mesh = *f.mesh;
    double m = 0.0;
    for (int id = 0; id < mesh.storage_size(); ++id)
      if (mesh.kind[id] == NodeKind::Interior || mesh.kind[id] == NodeKind::Boundary)
        m = std::max(m, std::abs(f.values[id]));
    return m;
  }

}  // namespace berger

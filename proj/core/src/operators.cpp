#include "berger/operators.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>

namespace berger
{
  void PhysicsParams::validate() const
  {
    if (!(gamma >= 0.0))
      throw std::invalid_argument("gamma must be >= 0");
    if (!(mu > 0.0 && mu <= 1.0))
      throw std::invalid_argument("mu must lie in (0, 1]");
    if (!(mu1 >= 0.0))
      throw std::invalid_argument("mu1 must be >= 0");
  }

  namespace
  {
    void require_ghosts(const Field& u, const char* op)
    {
      if (!u.ghosts_valid)
        throw std::invalid_argument(std::string(op) +
                                    ": ghost values are not closed");
    }

    bool is_node(const Mesh& m, int id)
    {
      return m.kind[id] == NodeKind::Interior || m.kind[id] == NodeKind::Boundary;
    }
  }  // namespace

  Field laplacian(const Field& u)
  {
    require_ghosts(u, "laplacian");
    const Mesh& m = *u.mesh;
    Field out(u.mesh);
    const double ax = 1.0 / (m.hx * m.hx);
    if (m.dim == 1)
      {
        for (int i = 0; i < m.nx; ++i)
          out.at(i) = ax * (u.at(i - 1) - 2.0 * u.at(i) + u.at(i + 1));
      }
    else
      {
        const double ay = 1.0 / (m.hy * m.hy);
        for (int j = 0; j < m.ny; ++j)
          for (int i = 0; i < m.nx; ++i)
            out.at(i, j) =
              ax * (u.at(i - 1, j) - 2.0 * u.at(i, j) + u.at(i + 1, j)) +
              ay * (u.at(i, j - 1) - 2.0 * u.at(i, j) + u.at(i, j + 1));
      }
    out.ghosts_valid = false;
    return out;
  }

  Field biharmonic(const Field& u)
  {
    require_ghosts(u, "biharmonic");
    const Mesh& m = *u.mesh;
    const Field z = laplacian(u);
    Field out(u.mesh);
    const double ax = 1.0 / (m.hx * m.hx);
    if (m.dim == 1)
      {
        for (int i = 1; i < m.nx - 1; ++i)
          out.at(i) = ax * (z.at(i - 1) - 2.0 * z.at(i) + z.at(i + 1));
      }
    else
      {
        const double ay = 1.0 / (m.hy * m.hy);
        for (int j = 1; j < m.ny - 1; ++j)
          for (int i = 1; i < m.nx - 1; ++i)
            out.at(i, j) =
              ax * (z.at(i - 1, j) - 2.0 * z.at(i, j) + z.at(i + 1, j)) +
              ay * (z.at(i, j - 1) - 2.0 * z.at(i, j) + z.at(i, j + 1));
      }
    out.ghosts_valid = false;
    return out;
  }

  Field gradient_component(const Field& u, int axis)
  {
    const Mesh& m = *u.mesh;
    if (axis < 0 || axis >= m.dim)
      throw std::invalid_argument("gradient axis out of range");
    Field out(u.mesh);
    const double h = axis == 0 ? m.hx : m.hy;
    const int nmax = axis == 0 ? m.nx : m.ny;
    auto val = [&](int i, int j, int k) {
      return axis == 0 ? u.at(k, j) : u.at(i, k);
    };
    for (int j = 0; j < m.ny; ++j)
      for (int i = 0; i < m.nx; ++i)
        {
          const int k = axis == 0 ? i : j;
          double g;
          if (k == 0)
            g = (-3.0 * val(i, j, 0) + 4.0 * val(i, j, 1) - val(i, j, 2)) /
                (2.0 * h);
          else if (k == nmax - 1)
            g = (3.0 * val(i, j, nmax - 1) - 4.0 * val(i, j, nmax - 2) +
                 val(i, j, nmax - 3)) /
                (2.0 * h);
          else
            g = (val(i, j, k + 1) - val(i, j, k - 1)) / (2.0 * h);
          out.at(i, j) = g;
        }
    out.ghosts_valid = false;
    return out;
  }

  double gradient_norm_sq(const Field& u)
  {
    const Mesh& m = *u.mesh;
    const Field gx = gradient_component(u, 0);
    double sum = 0.0;
    if (m.dim == 1)
      {
        for (int id = 0; id < m.storage_size(); ++id)
          if (m.area_weight[id] != 0.0)
            sum += m.area_weight[id] * gx.values[id] * gx.values[id];
        return sum;
      }
    const Field gy = gradient_component(u, 1);
    for (int id = 0; id < m.storage_size(); ++id)
      if (m.area_weight[id] != 0.0)
        sum += m.area_weight[id] * (gx.values[id] * gx.values[id] +
                                    gy.values[id] * gy.values[id]);
    return sum;
  }

  double berger_coefficient(const Field& u, const PhysicsParams& params)
  {
    return params.gamma - gradient_norm_sq(u);
  }

  Field von_karman_bracket(const Field& u, const Field& v)
  {
    if (u.mesh != v.mesh)
      throw std::invalid_argument("von Karman bracket: mesh mismatch");
    const Mesh& m = *u.mesh;
    if (m.dim != 2)
      throw std::invalid_argument("von Karman bracket requires a rectangle mesh");
    Field out(u.mesh);
    const double ax = 1.0 / (m.hx * m.hx);
    const double ay = 1.0 / (m.hy * m.hy);
    const double axy = 1.0 / (4.0 * m.hx * m.hy);
    for (int j = 1; j < m.ny - 1; ++j)
      for (int i = 1; i < m.nx - 1; ++i)
        {
          const double uxx = ax * (u.at(i - 1, j) - 2 * u.at(i, j) + u.at(i + 1, j));
          const double uyy = ay * (u.at(i, j - 1) - 2 * u.at(i, j) + u.at(i, j + 1));
          const double vxx = ax * (v.at(i - 1, j) - 2 * v.at(i, j) + v.at(i + 1, j));
          const double vyy = ay * (v.at(i, j - 1) - 2 * v.at(i, j) + v.at(i, j + 1));
          const double uxy = axy * (u.at(i + 1, j + 1) - u.at(i + 1, j - 1) -
                                    u.at(i - 1, j + 1) + u.at(i - 1, j - 1));
          const double vxy = axy * (v.at(i + 1, j + 1) - v.at(i + 1, j - 1) -
                                    v.at(i - 1, j + 1) + v.at(i - 1, j - 1));
          out.at(i, j) = uxx * vyy + uyy * vxx - 2.0 * uxy * vxy;
        }
    out.ghosts_valid = false;
    return out;
  }

  double bilinear_a(const Field& u, const Field& v, const PhysicsParams& params)
  {
    if (u.mesh != v.mesh)
      throw std::invalid_argument("bilinear form: mesh mismatch");
    const Mesh& m = *u.mesh;
    const Field lu = laplacian(u);
    const Field lv = laplacian(v);
    double sum = inner(lu, lv);
    if (m.dim == 2 && params.mu != 1.0)
      {
        const Field br = von_karman_bracket(u, v);
        double bsum = 0.0;
        for (int id = 0; id < m.storage_size(); ++id)
          if (m.kind[id] == NodeKind::Interior)
            bsum += m.area_weight[id] * br.values[id];
        sum -= (1.0 - params.mu) * bsum;
      }
    if (params.mu1 != 0.0)
      {
        for (Segment s : m.segments())
          {
            if (m.role(s) != SegmentRole::FreeDamped)
              continue;
            for (auto [i, j] : m.segment_nodes(s))
              {
                const int id = m.index(i, j);
                sum += params.mu1 * m.boundary_weight[id] * u.values[id] *
                       v.values[id];
              }
          }
      }
    return sum;
  }

  namespace
  {
    double one_sided_normal(const Field& u, int i, int j, Segment s)
    {
      const Mesh& m = *u.mesh;
      switch (s)
        {
          case Segment::XLow:
            return (3 * u.at(0, j) - 4 * u.at(1, j) + u.at(2, j)) / (2 * m.hx);
          case Segment::XHigh:
            return (3 * u.at(m.nx - 1, j) - 4 * u.at(m.nx - 2, j) +
                    u.at(m.nx - 3, j)) /
                   (2 * m.hx);
          case Segment::YLow:
            return (3 * u.at(i, 0) - 4 * u.at(i, 1) + u.at(i, 2)) / (2 * m.hy);
          case Segment::YHigh:
            return (3 * u.at(i, m.ny - 1) - 4 * u.at(i, m.ny - 2) +
                    u.at(i, m.ny - 3)) /
                   (2 * m.hy);
        }
      return 0.0;
    }

    double one_sided_second_normal(const Field& u, int i, int j, Segment s)
    {
      const Mesh& m = *u.mesh;
      switch (s)
        {
          case Segment::XLow:
            return (u.at(0, j) - 2 * u.at(1, j) + u.at(2, j)) / (m.hx * m.hx);
          case Segment::XHigh:
            return (u.at(m.nx - 1, j) - 2 * u.at(m.nx - 2, j) +
                    u.at(m.nx - 3, j)) /
                   (m.hx * m.hx);
          case Segment::YLow:
            return (u.at(i, 0) - 2 * u.at(i, 1) + u.at(i, 2)) / (m.hy * m.hy);
          case Segment::YHigh:
            return (u.at(i, m.ny - 1) - 2 * u.at(i, m.ny - 2) +
                    u.at(i, m.ny - 3)) /
                   (m.hy * m.hy);
        }
      return 0.0;
    }
  }  // namespace

  std::vector<double> normal_derivative_trace(const Field& u, Segment s)
  {
    const Mesh& m = *u.mesh;
    const auto nodes = m.segment_nodes(s);  // throws if the segment is absent
    std::vector<double> out;
    out.reserve(nodes.size());
    for (auto [i, j] : nodes)
      out.push_back(one_sided_normal(u, i, j, s));
    return out;
  }

  std::vector<double> normal_trace_all(const Field& u)
  {
    const Mesh& m = *u.mesh;
    std::vector<double> out(m.storage_size(), 0.0);
    for (int id = 0; id < m.storage_size(); ++id)
      if (m.kind[id] == NodeKind::Boundary)
        {
          const Segment s = static_cast<Segment>(m.segment[id]);
          // recover (i, j) from the storage id
          const int i = (id % m.row_stride) - 2;
          const int j = m.dim == 2 ? (id / m.row_stride) - 2 : 0;
          out[id] = one_sided_normal(u, i, j, s);
        }
    return out;
  }

  std::vector<double> second_normal_trace_all(const Field& u)
  {
    const Mesh& m = *u.mesh;
    std::vector<double> out(m.storage_size(), 0.0);
    for (int id = 0; id < m.storage_size(); ++id)
      if (m.kind[id] == NodeKind::Boundary)
        {
          const Segment s = static_cast<Segment>(m.segment[id]);
          const int i = (id % m.row_stride) - 2;
          const int j = m.dim == 2 ? (id / m.row_stride) - 2 : 0;
          out[id] = one_sided_second_normal(u, i, j, s);
        }
    return out;
  }

  std::vector<double> tangential_derivative_boundary(const Mesh& mesh,
                                                     const std::vector<double>& b)
  {
    std::vector<double> out(mesh.storage_size(), 0.0);
    if (mesh.dim == 1)
      return out;
    for (Segment s : mesh.segments())
      {
        const auto nodes = mesh.segment_nodes(s);
        const double h =
          (s == Segment::XLow || s == Segment::XHigh) ? mesh.hy : mesh.hx;
        const int n = static_cast<int>(nodes.size());
        for (int k = 0; k < n; ++k)
          {
            const int id = mesh.index(nodes[k][0], nodes[k][1]);
            double d;
            if (k == 0)
              d = (-3 * b[id] + 4 * b[mesh.index(nodes[1][0], nodes[1][1])] -
                   b[mesh.index(nodes[2][0], nodes[2][1])]) /
                  (2 * h);
            else if (k == n - 1)
              d = (3 * b[id] - 4 * b[mesh.index(nodes[n - 2][0], nodes[n - 2][1])] +
                   b[mesh.index(nodes[n - 3][0], nodes[n - 3][1])]) /
                  (2 * h);
            else
              d = (b[mesh.index(nodes[k + 1][0], nodes[k + 1][1])] -
                   b[mesh.index(nodes[k - 1][0], nodes[k - 1][1])]) /
                  (2 * h);
            // orient along tau: tau points in +axis direction iff its
            // component is positive
            const auto t = mesh.tangent[id];
            const double sign =
              (s == Segment::XLow || s == Segment::XHigh) ? t[1] : t[0];
            out[id] = sign * d;
          }
      }
    return out;
  }

  double integrate_boundary(const Mesh& mesh, const std::vector<double>& b)
  {
    double sum = 0.0;
    for (int id = 0; id < mesh.storage_size(); ++id)
      if (mesh.boundary_weight[id] != 0.0)
        sum += mesh.boundary_weight[id] * b[id];
    return sum;
  }

  Eigen::VectorXd DiscreteSystem::restrict_field(const Field& f) const
  {
    Eigen::VectorXd x(n_unknowns);
    for (int k = 0; k < n_unknowns; ++k)
      x[k] = f.values[storage_of_unknown[k]];
    return x;
  }

  void DiscreteSystem::scatter(const Eigen::VectorXd& x, Field& f) const
  {
    for (int k = 0; k < n_unknowns; ++k)
      f.values[storage_of_unknown[k]] = x[k];
  }

  namespace
  {
    DiscreteSystem assemble_hd(std::shared_ptr<const Mesh> mesh)
    {
      const Mesh& m = *mesh;
      DiscreteSystem sys;
      sys.mesh = mesh;
      sys.config = m.config;
      sys.unknown_of_storage.assign(m.storage_size(), -1);
      for (int j = 0; j < m.ny; ++j)
        for (int i = 0; i < m.nx; ++i)
          {
            const int id = m.index(i, j);
            if (m.kind[id] == NodeKind::Interior)
              {
                sys.unknown_of_storage[id] = sys.n_unknowns++;
                sys.storage_of_unknown.push_back(id);
              }
          }

      // Dirichlet Laplacian on the interior unknowns
      std::vector<Eigen::Triplet<double>> trip;
      const double ax = 1.0 / (m.hx * m.hx);
      const double ay = m.dim == 2 ? 1.0 / (m.hy * m.hy) : 0.0;
      for (int k = 0; k < sys.n_unknowns; ++k)
        {
          const int id = sys.storage_of_unknown[k];
          const int i = (id % m.row_stride) - 2;
          const int j = m.dim == 2 ? (id / m.row_stride) - 2 : 0;
          double diag = -2.0 * ax - (m.dim == 2 ? 2.0 * ay : 0.0);
          trip.emplace_back(k, k, diag);
          auto add = [&](int ii, int jj, double c) {
            const int nid = m.index(ii, jj);
            const int nk = sys.unknown_of_storage[nid];
            if (nk >= 0)
              trip.emplace_back(k, nk, c);
            // boundary neighbours carry u = 0 and drop out
          };
          add(i - 1, j, ax);
          add(i + 1, j, ax);
          if (m.dim == 2)
            {
              add(i, j - 1, ay);
              add(i, j + 1, ay);
            }
        }
      sys.laplace.resize(sys.n_unknowns, sys.n_unknowns);
      sys.laplace.setFromTriplets(trip.begin(), trip.end());
      // hinged biharmonic: square of the Dirichlet Laplacian
      sys.stiffness = (sys.laplace * sys.laplace).pruned();

      // damped closure at all non-corner boundary nodes
      for (Segment s : m.segments())
        for (auto [i, j] : m.segment_nodes(s))
          {
            if (m.is_corner(i, j))
              continue;
            const int id = m.index(i, j);
            DampedBoundaryNode d;
            d.storage_id = id;
            const double h = m.normal_spacing(s);
            int i1, j1, i2, j2;
            switch (s)
              {
                case Segment::XLow:
                  i1 = 1; j1 = j; i2 = 2; j2 = j;
                  break;
                case Segment::XHigh:
                  i1 = m.nx - 2; j1 = j; i2 = m.nx - 3; j2 = j;
                  break;
                case Segment::YLow:
                  i1 = i; j1 = 1; i2 = i; j2 = 2;
                  break;
                default:
                  i1 = i; j1 = m.ny - 2; i2 = i; j2 = m.ny - 3;
                  break;
              }
            d.load_unknown = sys.unknown_of_storage[m.index(i1, j1)];
            d.load_coeff = 1.0 / (h * h);
            d.trace_unknowns = {sys.unknown_of_storage[m.index(i1, j1)],
                                sys.unknown_of_storage[m.index(i2, j2)]};
            d.trace_coeffs = {-4.0 / (2.0 * h), 1.0 / (2.0 * h)};
            sys.damped_nodes.push_back(d);
          }
      return sys;
    }

    DiscreteSystem assemble_fcd(std::shared_ptr<const Mesh> mesh, double mu1)
    {
      const Mesh& m = *mesh;
      const int n = m.nx;
      DiscreteSystem sys;
      sys.mesh = mesh;
      sys.config = m.config;
      sys.mu1 = mu1;
      sys.unknown_of_storage.assign(m.storage_size(), -1);
      for (int i = 1; i < n; ++i)  // clamped node 0 pinned; free node included
        {
          sys.unknown_of_storage[m.index(i)] = sys.n_unknowns++;
          sys.storage_of_unknown.push_back(m.index(i));
        }
      auto uk = [&](int i) { return sys.unknown_of_storage[m.index(i)]; };

      const double h = m.hx;
      const double h2 = h * h, h4 = h2 * h2;
      std::vector<Eigen::Triplet<double>> ktrip, ltrip;
      auto K = [&](int row, int col, double c) {
        if (col >= 1 && col <= n - 1)
          ktrip.emplace_back(uk(row), uk(col), c);
      };
      // clamped end: ghost mirror u(-1) = u(1)
      K(1, 1, 7.0 / h4);
      K(1, 2, -4.0 / h4);
      K(1, 3, 1.0 / h4);
      for (int i = 2; i <= n - 3; ++i)
        {
          K(i, i - 2, 1.0 / h4);
          K(i, i - 1, -4.0 / h4);
          K(i, i, 6.0 / h4);
          K(i, i + 1, -4.0 / h4);
          K(i, i + 2, 1.0 / h4);
        }
      // free-end rows after eliminating the two ghosts with
      // u_xx(L) = 0 and u_xxx(L) - mu1 u(L) = feedback
      K(n - 2, n - 1, -2.0 / h4);
      K(n - 2, n - 2, 5.0 / h4);
      K(n - 2, n - 3, -4.0 / h4);
      K(n - 2, n - 4, 1.0 / h4);
      K(n - 1, n - 1, 2.0 / h4 + 2.0 * mu1 / h);
      K(n - 1, n - 2, -4.0 / h4);
      K(n - 1, n - 3, 2.0 / h4);

      auto L = [&](int row, int col, double c) {
        if (col >= 1 && col <= n - 1)
          ltrip.emplace_back(uk(row), uk(col), c);
      };
      for (int i = 1; i <= n - 2; ++i)
        {
          L(i, i - 1, 1.0 / h2);
          L(i, i, -2.0 / h2);
          L(i, i + 1, 1.0 / h2);
        }
      // free node: u_xx(L) = 0 by the closure, so the row vanishes

      sys.stiffness.resize(sys.n_unknowns, sys.n_unknowns);
      sys.stiffness.setFromTriplets(ktrip.begin(), ktrip.end());
      sys.laplace.resize(sys.n_unknowns, sys.n_unknowns);
      sys.laplace.setFromTriplets(ltrip.begin(), ltrip.end());

      DampedBoundaryNode d;
      d.storage_id = m.index(n - 1);
      d.load_unknown = uk(n - 1);
      d.load_coeff = -2.0 / h;  // dv/dt -= (2/h) g(v(L))
      d.trace_unknowns = {uk(n - 1), -1};
      d.trace_coeffs = {1.0, 0.0};  // the feedback argument is u_t(L) itself
      sys.damped_nodes.push_back(d);
      return sys;
    }
  }  // namespace

  DiscreteSystem assemble_discrete_system(std::shared_ptr<const Mesh> mesh,
                                          double mu1)
  {
    if (mesh->config == Configuration::FCD1D)
      return assemble_fcd(mesh, mu1);
    return assemble_hd(mesh);
  }

  double smallest_eigenvalue(Configuration config, const Mesh& mesh, double mu1,
                             EigenvalueOptions opts)
  {
    if (config != mesh.config)
      throw std::invalid_argument("configuration does not match the mesh");
    // The mesh is shared immutable state; alias it without ownership for the
    // assembly helper.
    auto alias = std::shared_ptr<const Mesh>(&mesh, [](const Mesh*) {});
    const DiscreteSystem sys = assemble_discrete_system(alias, mu1);

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(sys.stiffness);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("smallest_eigenvalue: factorization failed");

    Eigen::VectorXd x = Eigen::VectorXd::Ones(sys.n_unknowns);
    x.normalize();
    double lambda = 0.0;
    for (int it = 0; it < opts.max_iterations; ++it)
      {
        Eigen::VectorXd y = lu.solve(x);
        y.normalize();
        const double next = y.dot(sys.stiffness * y) / y.dot(y);
        x.swap(y);
        if (it > 0 && std::abs(next - lambda) <= opts.tolerance * std::abs(next))
          return next;
        lambda = next;
      }
    throw std::runtime_error(
      "smallest_eigenvalue: inverse power iteration did not converge within " +
      std::to_string(opts.max_iterations) + " iterations");
  }

}  // namespace berger

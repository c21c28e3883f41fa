#include "berger/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace berger
{
  std::string to_string(Configuration c)
  {
    switch (c)
      {
        case Configuration::HD1D:
          return "HD1D";
        case Configuration::HD2D:
          return "HD2D";
        case Configuration::FCD1D:
          return "FCD1D";
      }
    return "?";
  }

  std::string to_string(Segment s)
  {
    switch (s)
      {
        case Segment::XLow:
          return "x-low";
        case Segment::XHigh:
          return "x-high";
        case Segment::YLow:
          return "y-low";
        case Segment::YHigh:
          return "y-high";
      }
    return "?";
  }

  std::string to_string(SegmentRole r)
  {
    switch (r)
      {
        case SegmentRole::Clamped:
          return "clamped";
        case SegmentRole::FreeDamped:
          return "free-damped";
        case SegmentRole::HingedDamped:
          return "hinged-damped";
      }
    return "?";
  }

  DomainSpec DomainSpec::hinged_interval(double length)
  {
    DomainSpec s;
    s.kind = DomainKind::Interval;
    s.extents = {length, 0.0};
    s.partition = {{Segment::XLow, SegmentRole::HingedDamped},
                   {Segment::XHigh, SegmentRole::HingedDamped}};
    return s;
  }

  DomainSpec DomainSpec::hinged_rectangle(double lx, double ly)
  {
    DomainSpec s;
    s.kind = DomainKind::Rectangle;
    s.extents = {lx, ly};
    s.partition = {{Segment::XLow, SegmentRole::HingedDamped},
                   {Segment::XHigh, SegmentRole::HingedDamped},
                   {Segment::YLow, SegmentRole::HingedDamped},
                   {Segment::YHigh, SegmentRole::HingedDamped}};
    return s;
  }

  DomainSpec DomainSpec::clamped_free_interval(double length)
  {
    DomainSpec s;
    s.kind = DomainKind::Interval;
    s.extents = {length, 0.0};
    s.partition = {{Segment::XLow, SegmentRole::Clamped},
                   {Segment::XHigh, SegmentRole::FreeDamped}};
    return s;
  }

  void DomainSpec::validate() const
  {
    if (!(extents[0] > 0.0))
      throw std::invalid_argument("domain extent along x must be positive");
    if (kind == DomainKind::Rectangle && !(extents[1] > 0.0))
      throw std::invalid_argument("domain extent along y must be positive");

    const std::vector<Segment> required =
      kind == DomainKind::Interval
        ? std::vector<Segment>{Segment::XLow, Segment::XHigh}
        : std::vector<Segment>{Segment::XLow, Segment::XHigh, Segment::YLow,
                               Segment::YHigh};
    for (Segment s : required)
      if (partition.find(s) == partition.end())
        throw std::invalid_argument("boundary partition misses segment " +
                                    to_string(s));
    configuration_of(*this);
  }

  Configuration configuration_of(const DomainSpec& spec)
  {
    auto role = [&](Segment s) {
      auto it = spec.partition.find(s);
      if (it == spec.partition.end())
        throw std::invalid_argument("boundary partition misses segment " +
                                    to_string(s));
      return it->second;
    };

    if (spec.kind == DomainKind::Rectangle)
      {
        for (Segment s :
             {Segment::XLow, Segment::XHigh, Segment::YLow, Segment::YHigh})
          if (role(s) != SegmentRole::HingedDamped)
            throw std::invalid_argument(
              "rectangle supports only the all-hinged configuration; segment " +
              to_string(s) + " is " + to_string(role(s)));
        return Configuration::HD2D;
      }

    const SegmentRole lo = role(Segment::XLow);
    const SegmentRole hi = role(Segment::XHigh);
    if (lo == SegmentRole::HingedDamped && hi == SegmentRole::HingedDamped)
      return Configuration::HD1D;
    if ((lo == SegmentRole::Clamped && hi == SegmentRole::FreeDamped) ||
        (lo == SegmentRole::FreeDamped && hi == SegmentRole::Clamped))
      {
        if (lo != SegmentRole::Clamped)
          throw std::invalid_argument(
            "clamped/free interval must be clamped at x = 0");
        return Configuration::FCD1D;
      }
    throw std::invalid_argument("boundary partition matches no configuration: " +
                                to_string(lo) + " / " + to_string(hi));
  }

  std::vector<Segment> Mesh::segments() const
  {
    if (dim == 1)
      return {Segment::XLow, Segment::XHigh};
    return {Segment::XLow, Segment::XHigh, Segment::YLow, Segment::YHigh};
  }

  std::vector<std::array<int, 2>> Mesh::segment_nodes(Segment s) const
  {
    std::vector<std::array<int, 2>> nodes;
    if (dim == 1)
      {
        if (s == Segment::XLow)
          nodes.push_back({0, 0});
        else if (s == Segment::XHigh)
          nodes.push_back({nx - 1, 0});
        else
          throw std::invalid_argument("segment " + to_string(s) +
                                      " not present on the interval");
        return nodes;
      }
    switch (s)
      {
        case Segment::XLow:
          for (int j = 0; j < ny; ++j)
            nodes.push_back({0, j});
          break;
        case Segment::XHigh:
          for (int j = 0; j < ny; ++j)
            nodes.push_back({nx - 1, j});
          break;
        case Segment::YLow:
          for (int i = 0; i < nx; ++i)
            nodes.push_back({i, 0});
          break;
        case Segment::YHigh:
          for (int i = 0; i < nx; ++i)
            nodes.push_back({i, ny - 1});
          break;
      }
    return nodes;
  }

  std::shared_ptr<const Mesh> build_mesh(const DomainSpec& spec,
                                         std::array<int, 2> resolution)
  {
    spec.validate();
    auto mesh = std::make_shared<Mesh>();
    mesh->spec = spec;
    mesh->config = configuration_of(spec);
    mesh->dim = spec.dim();
    mesh->nx = resolution[0];
    mesh->ny = mesh->dim == 2 ? resolution[1] : 1;
    if (mesh->nx < 5 || (mesh->dim == 2 && mesh->ny < 5))
      throw std::invalid_argument("resolution must be >= 5 nodes per axis");

    mesh->hx = spec.extents[0] / (mesh->nx - 1);
    mesh->hy = mesh->dim == 2 ? spec.extents[1] / (mesh->ny - 1) : 0.0;
    mesh->row_stride = mesh->nx + 4;
    mesh->storage_rows = mesh->dim == 2 ? mesh->ny + 4 : 1;

    const int n = mesh->storage_size();
    mesh->kind.assign(n, NodeKind::Ghost2);
    mesh->segment.assign(n, -1);
    mesh->area_weight.assign(n, 0.0);
    mesh->boundary_weight.assign(n, 0.0);
    mesh->normal.assign(n, {0.0, 0.0});
    mesh->tangent.assign(n, {0.0, 0.0});

    auto ghost_depth = [](int i, int nmax) {
      if (i >= 0 && i < nmax)
        return 0;
      return (i == -1 || i == nmax) ? 1 : 2;
    };

    const int jlo = mesh->dim == 2 ? -2 : 0;
    const int jhi = mesh->dim == 2 ? mesh->ny + 1 : 0;
    for (int j = jlo; j <= jhi; ++j)
      for (int i = -2; i <= mesh->nx + 1; ++i)
        {
          const int id = mesh->index(i, j);
          const int gx = ghost_depth(i, mesh->nx);
          const int gy = mesh->dim == 2 ? ghost_depth(j, mesh->ny) : 0;
          const int g = std::max(gx, gy);
          if (g == 2)
            {
              mesh->kind[id] = NodeKind::Ghost2;
              continue;
            }
          if (g == 1)
            {
              mesh->kind[id] = NodeKind::Ghost1;
              continue;
            }

          const bool bx = (i == 0 || i == mesh->nx - 1);
          const bool by = mesh->dim == 2 && (j == 0 || j == mesh->ny - 1);
          // tensor trapezoid area weight
          double w = (mesh->dim == 2 ? mesh->hx * mesh->hy : mesh->hx);
          if (bx)
            w *= 0.5;
          if (by)
            w *= 0.5;
          mesh->area_weight[id] = w;

          if (!bx && !by)
            {
              mesh->kind[id] = NodeKind::Interior;
              continue;
            }
          mesh->kind[id] = NodeKind::Boundary;

          if (bx && by)
            {
              // corner: diagonal normal, zero boundary weight
              const double sx = (i == 0) ? -1.0 : 1.0;
              const double sy = (j == 0) ? -1.0 : 1.0;
              const double r = std::sqrt(0.5);
              mesh->normal[id] = {sx * r, sy * r};
              mesh->tangent[id] = {-sy * r, sx * r};
              mesh->segment[id] =
                static_cast<signed char>(i == 0 ? Segment::XLow : Segment::XHigh);
              continue;
            }
          if (bx)
            {
              const Segment s = (i == 0) ? Segment::XLow : Segment::XHigh;
              mesh->segment[id] = static_cast<signed char>(s);
              const double sx = (i == 0) ? -1.0 : 1.0;
              mesh->normal[id] = {sx, 0.0};
              mesh->tangent[id] = {0.0, sx};
              mesh->boundary_weight[id] = mesh->dim == 2 ? mesh->hy : 1.0;
            }
          else
            {
              const Segment s = (j == 0) ? Segment::YLow : Segment::YHigh;
              mesh->segment[id] = static_cast<signed char>(s);
              const double sy = (j == 0) ? -1.0 : 1.0;
              mesh->normal[id] = {0.0, sy};
              mesh->tangent[id] = {-sy, 0.0};
              mesh->boundary_weight[id] = mesh->hx;
            }
        }
    return mesh;
  }

  StarShapedReport check_star_shaped(const DomainSpec& spec,
                                     std::array<double, 2> x0)
  {
    spec.validate();
    if (!std::isfinite(x0[0]) || !std::isfinite(x0[1]))
      throw std::invalid_argument("star-shaped anchor must be finite");

    StarShapedReport rep;
    if (spec.kind == DomainKind::Interval)
      {
        const double lo = (0.0 - x0[0]) * (-1.0);
        const double hi = (spec.extents[0] - x0[0]) * (1.0);
        rep.min_over_boundary = std::min(lo, hi);
      }
    else
      {
        const double lx = spec.extents[0], ly = spec.extents[1];
        // (x - x0).nu is constant along each straight edge
        const double ex_lo = x0[0];        // edge x=0,  nu=(-1,0)
        const double ex_hi = lx - x0[0];   // edge x=lx, nu=(+1,0)
        const double ey_lo = x0[1];        // edge y=0,  nu=(0,-1)
        const double ey_hi = ly - x0[1];   // edge y=ly, nu=(0,+1)
        double m = std::min(std::min(ex_lo, ex_hi), std::min(ey_lo, ey_hi));
        // corners with the diagonal normal
        const double r = std::sqrt(0.5);
        for (double cx : {0.0, lx})
          for (double cy : {0.0, ly})
            {
              const double nx = (cx == 0.0 ? -r : r);
              const double ny = (cy == 0.0 ? -r : r);
              m = std::min(m, (cx - x0[0]) * nx + (cy - x0[1]) * ny);
            }
        rep.min_over_boundary = m;
      }
    rep.satisfied = rep.min_over_boundary >= 0.0;
    return rep;
  }

  FluxField flux_field(std::shared_ptr<const Mesh> mesh, std::array<double, 2> x0)
  {
    FluxField f;
    f.mesh = mesh;
    f.anchor = x0;
    f.hx_values.assign(mesh->storage_size(), 0.0);
    f.hy_values.assign(mesh->storage_size(), 0.0);
    const int jlo = mesh->dim == 2 ? -2 : 0;
    const int jhi = mesh->dim == 2 ? mesh->ny + 1 : 0;
    for (int j = jlo; j <= jhi; ++j)
      for (int i = -2; i <= mesh->nx + 1; ++i)
        {
          const int id = mesh->index(i, j);
          f.hx_values[id] = mesh->x(i) - x0[0];
          f.hy_values[id] = mesh->dim == 2 ? mesh->y(j) - x0[1] : 0.0;
        }
    return f;
  }

}  // namespace berger

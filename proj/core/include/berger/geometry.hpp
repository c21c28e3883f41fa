#ifndef BERGER_GEOMETRY_HPP
#define BERGER_GEOMETRY_HPP

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace berger
{
  enum class DomainKind
  {
    Interval,
    Rectangle
  };

  /// Role of a boundary segment in the active boundary-condition set.
  enum class SegmentRole
  {
    Clamped,      // u = du/dnu = 0
    FreeDamped,   // free edge with velocity feedback in the shear condition
    HingedDamped  // u = 0, moment feedback through the damping law
  };

  /// Boundary segments of the interval / axis-aligned rectangle.
  enum class Segment : int
  {
    XLow  = 0,
    XHigh = 1,
    YLow  = 2,
    YHigh = 3
  };

  enum class Configuration
  {
    HD1D,  // hinged-damped interval
    HD2D,  // hinged-damped rectangle
    FCD1D  // clamped/free-damped interval
  };

  std::string to_string(Configuration c);
  std::string to_string(Segment s);
  std::string to_string(SegmentRole r);

  struct DomainSpec
  {
    DomainKind kind = DomainKind::Interval;
    std::array<double, 2> extents{1.0, 1.0};  // [Lx, Ly]; Ly ignored for the interval
    std::map<Segment, SegmentRole> partition;

    int dim() const { return kind == DomainKind::Interval ? 1 : 2; }

    static DomainSpec hinged_interval(double length = 1.0);
    static DomainSpec hinged_rectangle(double lx = 1.0, double ly = 1.0);
    static DomainSpec clamped_free_interval(double length = 1.0);

    /// Throws std::invalid_argument on non-positive extents or an
    /// incomplete/contradictory partition.
    void validate() const;
  };

  /// Infers the configuration from the boundary partition; throws when the
  /// partition matches none of HD1D/HD2D/FCD1D.
  Configuration configuration_of(const DomainSpec& spec);

  enum class NodeKind : unsigned char
  {
    Interior,
    Boundary,
    Ghost1,
    Ghost2
  };

  /// Structured mesh with two ghost layers beyond every boundary.
  ///
  /// Storage is a single row-major array covering [-2, nx+1] x [-2, ny+1]
  /// (j fixed to 0 in 1D). Non-ghost node (i, j) has coordinates
  /// (i*hx, j*hy). Interior quadrature weights are tensor trapezoid weights;
  /// boundary weights are trapezoid per edge with corner weight zero.
  struct Mesh
  {
    DomainSpec spec;
    Configuration config;
    int dim = 1;
    int nx = 0, ny = 1;
    double hx = 0.0, hy = 0.0;

    std::vector<NodeKind> kind;          // storage-indexed
    std::vector<signed char> segment;    // storage-indexed; -1 if not a boundary node
    std::vector<double> area_weight;     // storage-indexed; 0 on ghosts
    std::vector<double> boundary_weight; // storage-indexed; 0 off-boundary and at corners
    std::vector<std::array<double, 2>> normal;   // storage-indexed; boundary nodes only
    std::vector<std::array<double, 2>> tangent;  // tau = (-nu2, nu1)

    int row_stride = 0;   // nx + 4
    int storage_rows = 1; // ny + 4 in 2D, 1 in 1D

    int storage_size() const { return row_stride * storage_rows; }
    int index(int i, int j = 0) const
    {
      return (dim == 2 ? (j + 2) * row_stride : 0) + (i + 2);
    }
    double x(int i) const { return i * hx; }
    double y(int j) const { return dim == 2 ? j * hy : 0.0; }
    bool in_grid(int i, int j = 0) const
    {
      return i >= 0 && i < nx && (dim == 1 || (j >= 0 && j < ny));
    }
    bool is_corner(int i, int j = 0) const
    {
      return dim == 2 && (i == 0 || i == nx - 1) && (j == 0 || j == ny - 1);
    }
    SegmentRole role(Segment s) const { return spec.partition.at(s); }

    /// Grid spacing in the normal direction of a segment.
    double normal_spacing(Segment s) const
    {
      return (s == Segment::XLow || s == Segment::XHigh) ? hx : hy;
    }

    /// Boundary nodes of a segment as (i, j) pairs, ordered along the edge,
    /// corners included.
    std::vector<std::array<int, 2>> segment_nodes(Segment s) const;
    std::vector<Segment> segments() const;

    double domain_measure() const
    {
      return dim == 2 ? spec.extents[0] * spec.extents[1] : spec.extents[0];
    }
  };

  /// Builds the structured mesh. resolution = nodes per axis (>= 5 each).
  std::shared_ptr<const Mesh> build_mesh(const DomainSpec& spec,
                                         std::array<int, 2> resolution);

  struct StarShapedReport
  {
    double min_over_boundary = 0.0;
    bool satisfied = false;
  };

  /// Evaluates min over the boundary of (x - x0) . nu; straight edges make
  /// the per-edge values constant, corners use the normalized diagonal normal.
  StarShapedReport check_star_shaped(const DomainSpec& spec,
                                     std::array<double, 2> x0);

  /// Affine flux field h(x) = x - x0 sampled at every node (ghosts included).
  struct FluxField
  {
    std::shared_ptr<const Mesh> mesh;
    std::array<double, 2> anchor{0.0, 0.0};
    std::vector<double> hx_values;  // storage-indexed, component 1
    std::vector<double> hy_values;  // storage-indexed, component 2 (zero in 1D)
  };

  FluxField flux_field(std::shared_ptr<const Mesh> mesh, std::array<double, 2> x0);

}  // namespace berger

#endif

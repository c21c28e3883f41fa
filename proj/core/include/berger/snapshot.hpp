#ifndef BERGER_SNAPSHOT_HPP
#define BERGER_SNAPSHOT_HPP

#include <string>

#include "berger/dynamics.hpp"

namespace berger
{
  /// Binary snapshot container: magic "BPLT", format version u32, grid dims
  /// u32 x 2 (ny = 1 on the interval), time f64, then the non-ghost u values
  /// row-major f64 little-endian, then v likewise.
  void write_snapshot(const std::string& path, const PlateState& state);

  /// Reads a snapshot onto the given mesh; throws on magic/version/dimension
  /// mismatch. Ghost values are left unset (close_state_ghosts re-derives
  /// them).
  PlateState read_snapshot(const std::string& path,
                           std::shared_ptr<const Mesh> mesh);

}  // namespace berger

#endif

#pragma once

#include <iosfwd>
#include <string>

#include "idks/model.hpp"

namespace idks {

// Versioned binary model dump (magic "IDKSMDL1", little-endian fields):
// header (d, omega, psi, t, window_start), window points oldest-first,
// per-partitioning sources / centers / squared radii, the assignment matrix
// (column-major, logical row order) and the count table. Round-trips
// bit-exactly: save(load(bytes)) reproduces bytes.
class Snapshot {
 public:
  static void save(const Model& m, std::ostream& out);
  static void save_file(const Model& m, const std::string& path);
  static Model load(std::istream& in);  // throws StateError on malformed input
  static Model load_file(const std::string& path);
};

}  // namespace idks

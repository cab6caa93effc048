#include "idks/snapshot.hpp"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "idks/errors.hpp"

namespace idks {
namespace {

constexpr char kMagic[8] = {'I', 'D', 'K', 'S', 'M', 'D', 'L', '1'};

template <class T>
void put(std::ostream& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw StateError("snapshot: truncated input");
  return v;
}

template <class T>
void put_span(std::ostream& out, const T* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
}

template <class T>
void get_span(std::istream& in, T* data, std::size_t count) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
  if (!in) throw StateError("snapshot: truncated input");
}

}  // namespace

void Snapshot::save(const Model& m, std::ostream& out) {
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, 1);  // version
  put<std::uint64_t>(out, m.d_);
  put<std::uint64_t>(out, m.omega_);
  put<std::uint64_t>(out, m.psi_);
  put<std::uint64_t>(out, m.t_);
  put<std::uint64_t>(out, m.window_start_);

  const std::vector<double> window = m.window_copy();
  put_span(out, window.data(), window.size());

  for (const Partitioning& p : m.parts_) {
    put_span(out, p.source_indices().data(), p.psi());
    put_span(out, p.center_data(0), p.psi() * p.dim());
    put_span(out, p.radii_sq().data(), p.psi());
  }

  // assignment matrix in logical row order, column-major
  for (std::uint32_t j = 0; j < m.t_; ++j)
    for (std::size_t r = 0; r < m.omega_; ++r)
      put<std::int32_t>(out, m.assignment(r, j));

  put_span(out, m.counts_.data(), m.counts_.size());
  if (!out) throw StateError("snapshot: write failure");
}

Model Snapshot::load(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw StateError("snapshot: bad magic (not a model snapshot)");
  const auto version = get<std::uint32_t>(in);
  if (version != 1) throw StateError("snapshot: unsupported version " + std::to_string(version));

  Model m;
  m.d_ = static_cast<std::size_t>(get<std::uint64_t>(in));
  m.omega_ = static_cast<std::size_t>(get<std::uint64_t>(in));
  m.psi_ = static_cast<std::uint32_t>(get<std::uint64_t>(in));
  m.t_ = static_cast<std::uint32_t>(get<std::uint64_t>(in));
  m.window_start_ = get<std::uint64_t>(in);
  if (m.d_ == 0 || m.omega_ == 0 || m.psi_ < 2 || m.t_ < 1)
    throw StateError("snapshot: invalid header fields");

  m.base_ = 0;
  m.points_.resize(m.omega_ * m.d_);
  get_span(in, m.points_.data(), m.points_.size());

  m.parts_.reserve(m.t_);
  for (std::uint32_t j = 0; j < m.t_; ++j) {
    std::vector<std::uint64_t> sources(m.psi_);
    std::vector<double> centers(static_cast<std::size_t>(m.psi_) * m.d_);
    std::vector<double> radii_sq(m.psi_);
    get_span(in, sources.data(), sources.size());
    get_span(in, centers.data(), centers.size());
    get_span(in, radii_sq.data(), radii_sq.size());
    m.parts_.push_back(
        Partitioning::from_raw(m.d_, std::move(centers), std::move(radii_sq), std::move(sources)));
  }

  m.entries_.resize(static_cast<std::size_t>(m.t_) * m.omega_);
  get_span(in, m.entries_.data(), m.entries_.size());
  for (std::int32_t e : m.entries_)
    if (e != kUnassigned && (e < 0 || e >= static_cast<std::int32_t>(m.psi_)))
      throw StateError("snapshot: assignment entry out of range");

  m.counts_.resize(static_cast<std::size_t>(m.t_) * m.psi_);
  get_span(in, m.counts_.data(), m.counts_.size());
  return m;
}

void Snapshot::save_file(const Model& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StateError("snapshot: cannot open '" + path + "' for writing");
  save(m, out);
}

Model Snapshot::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StateError("snapshot: cannot open '" + path + "'");
  return load(in);
}

}  // namespace idks

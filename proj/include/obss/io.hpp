// Snapshot file format (OBSS) and a small CSV writer.
//
// OBSS layout: magic "OBSS", version u32 = 1, then n, n, n as u32,
// box_side as f64, component count u32, then one physical-space f64
// little-endian array per component in x-fastest order.
#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "obss/field.hpp"

namespace obss {

struct FieldSnapshot {
  PeriodicGrid grid;
  std::vector<std::vector<double>> components;
};

namespace detail {
template <class T>
void write_raw(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
void read_raw(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}
}  // namespace detail

inline void write_obss(const std::string& path, const FieldSnapshot& snap) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  os.write("OBSS", 4);
  detail::write_raw(os, std::uint32_t{1});
  for (int i = 0; i < 3; ++i)
    detail::write_raw(os, static_cast<std::uint32_t>(snap.grid.n));
  detail::write_raw(os, snap.grid.box_side);
  detail::write_raw(os, static_cast<std::uint32_t>(snap.components.size()));
  for (const auto& c : snap.components)
    os.write(reinterpret_cast<const char*>(c.data()),
             static_cast<std::streamsize>(c.size() * sizeof(double)));
  if (!os) throw NumericalError("short write: " + path);
}

inline FieldSnapshot read_obss(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (std::memcmp(magic, "OBSS", 4) != 0)
    throw ConfigError("bad magic in " + path);
  std::uint32_t version = 0;
  detail::read_raw(is, version);
  if (version != 1)
    throw ConfigError("unsupported OBSS version in " + path);
  std::uint32_t nx = 0, ny = 0, nz = 0, ncomp = 0;
  detail::read_raw(is, nx);
  detail::read_raw(is, ny);
  detail::read_raw(is, nz);
  FieldSnapshot snap;
  detail::read_raw(is, snap.grid.box_side);
  detail::read_raw(is, ncomp);
  if (nx != ny || ny != nz) throw ConfigError("non-cubic OBSS grid");
  snap.grid.n = static_cast<int>(nx);
  snap.components.resize(ncomp);
  for (auto& c : snap.components) {
    c.resize(snap.grid.size());
    is.read(reinterpret_cast<char*>(c.data()),
            static_cast<std::streamsize>(c.size() * sizeof(double)));
  }
  if (!is) throw ConfigError("truncated OBSS file: " + path);
  return snap;
}

inline FieldSnapshot snapshot_of(const SpectralScalarField& f) {
  return FieldSnapshot{f.grid(), {f.to_physical()}};
}

inline FieldSnapshot snapshot_of(const SpectralVectorField& v) {
  return FieldSnapshot{v.grid(),
                       {v[0].to_physical(), v[1].to_physical(),
                        v[2].to_physical()}};
}

// ---------------------------------------------------------------------------
// CSV with deterministic %.17g formatting.

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : os_(path) {
    if (!os_) throw ConfigError("cannot open for writing: " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
      os_ << (i ? "," : "") << header[i];
    os_ << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      os_ << (i ? "," : "") << cells[i];
    os_ << "\n";
  }

  static std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
  static std::string num(int v) { return std::to_string(v); }

 private:
  std::ofstream os_;
};

}  // namespace obss

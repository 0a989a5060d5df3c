#pragma once

/// \file checkpoint.hpp
/// \brief Versioned binary checkpoints of a physical field.
///
/// Layout (little-endian host order):
///   magic "LLBCKPT\0" | u32 version | i32 dim | i32 grid components |
///   i32 field components | i32 boundary | i32 n[3] | f64 lengths[3] |
///   u64 count | f64 values[count] |
///   u32 crc32 over everything before it

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include <boost/crc.hpp>

#include "errors.hpp"
#include "field.hpp"
#include "grid.hpp"

namespace llbar {

inline constexpr char kCheckpointMagic[8] = {'L', 'L', 'B', 'C', 'K', 'P', 'T', '\0'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

template <class T>
void put(std::vector<char>& buf, const T& v) {
  const char* p = reinterpret_cast<const char*>(&v);
  buf.insert(buf.end(), p, p + sizeof(T));
}

class ByteReader {
 public:
  explicit ByteReader(const std::vector<char>& buf) : buf_(buf) {}
  template <class T>
  T get() {
    if (pos_ + sizeof(T) > buf_.size()) throw IoError("checkpoint truncated");
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::size_t pos() const noexcept { return pos_; }

 private:
  const std::vector<char>& buf_;
  std::size_t pos_ = 0;
};

inline std::uint32_t crc32(const char* data, std::size_t n) {
  boost::crc_32_type crc;
  crc.process_bytes(data, n);
  return crc.checksum();
}

}  // namespace detail

inline std::vector<char> checkpoint_bytes(const Field& u) {
  const Grid& g = u.grid();
  std::vector<char> buf(kCheckpointMagic, kCheckpointMagic + 8);
  detail::put(buf, kCheckpointVersion);
  detail::put(buf, static_cast<std::int32_t>(g.dim()));
  detail::put(buf, static_cast<std::int32_t>(g.components()));
  detail::put(buf, static_cast<std::int32_t>(u.components()));
  detail::put(buf, static_cast<std::int32_t>(g.boundary()));
  for (int a = 0; a < 3; ++a) detail::put(buf, static_cast<std::int32_t>(g.n(a)));
  for (int a = 0; a < 3; ++a) detail::put(buf, g.length(a));
  detail::put(buf, static_cast<std::uint64_t>(u.values().size()));
  for (double v : u.values()) detail::put(buf, v);
  detail::put(buf, detail::crc32(buf.data(), buf.size()));
  return buf;
}

inline void checkpoint_save(const Field& u, const std::string& path) {
  const auto buf = checkpoint_bytes(u);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed writing checkpoint: " + path);
}

inline Field checkpoint_from_bytes(const std::vector<char>& buf,
                                   const std::optional<Grid>& expected = std::nullopt) {
  if (buf.size() < 8 + sizeof(std::uint32_t) ||
      std::memcmp(buf.data(), kCheckpointMagic, 8) != 0)
    throw IoError("not a checkpoint file");
  const std::size_t body = buf.size() - sizeof(std::uint32_t);
  std::uint32_t stored;
  std::memcpy(&stored, buf.data() + body, sizeof stored);
  if (detail::crc32(buf.data(), body) != stored)
    throw IoError("checkpoint checksum mismatch (corrupt or truncated file)");

  detail::ByteReader r(buf);
  for (int i = 0; i < 8; ++i) r.get<char>();
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion)
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  const int dim = r.get<std::int32_t>();
  const int m = r.get<std::int32_t>();
  const int ncomp = r.get<std::int32_t>();
  const int boundary = r.get<std::int32_t>();
  std::array<int, 3> n{};
  std::array<double, 3> len{};
  for (auto& v : n) v = r.get<std::int32_t>();
  for (auto& v : len) v = r.get<double>();
  const auto count = r.get<std::uint64_t>();
  if (boundary != 0 && boundary != 1) throw IoError("checkpoint has an invalid boundary tag");

  Grid g = [&] {
    try {
      return Grid(dim, m, n, len, static_cast<Boundary>(boundary));
    } catch (const ConfigError& e) {
      throw IoError(std::string("checkpoint has invalid grid metadata: ") + e.what());
    }
  }();
  if (expected && !(*expected == g))
    throw IoError("checkpoint grid does not match the expected grid");
  if (ncomp < 1) throw IoError("checkpoint has an invalid component count");
  Field u(g, ncomp);
  if (count != u.values().size() || r.pos() + count * sizeof(double) != body)
    throw IoError("checkpoint value count does not match its grid metadata");
  for (auto& v : u.values()) v = r.get<double>();
  return u;
}

inline Field checkpoint_load(const std::string& path,
                             const std::optional<Grid>& expected = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return checkpoint_from_bytes(buf, expected);
}

}  // namespace llbar

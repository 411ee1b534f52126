#pragma once

// Binary field format (little-endian throughout):
//   "HFLD" | u16 version=1 | u8 d | u8 q | d x f64 Hurst | d x u32 cells
//   | d x f64 origin | d x f64 extent | u64 seed | u8 generator tag | u8 flags
//   | prod(cells+1) x f64 node values, row-major with the last axis fastest.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hfield/core.hpp"
#include "hfield/errors.hpp"

namespace hfield {

inline constexpr std::array<char, 4> kFieldMagic{'H', 'F', 'L', 'D'};
inline constexpr std::uint16_t kFieldVersion = 1;

namespace detail {

class ByteWriter {
 public:
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  template <class U>
  void uint(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) buf_.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFFu));
  }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
  const std::vector<unsigned char>& bytes() const noexcept { return buf_; }

 private:
  std::vector<unsigned char> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::vector<unsigned char> data) : buf_(std::move(data)) {}
  void need(std::size_t n, const char* what) {
    if (pos_ + n > buf_.size())
      throw TruncatedError(std::string("field file truncated while reading ") + what);
  }
  template <class U>
  U uint(const char* what) {
    need(sizeof(U), what);
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<U>(buf_[pos_ + i]) << (8 * i));
    pos_ += sizeof(U);
    return v;
  }
  double f64(const char* what) { return std::bit_cast<double>(uint<std::uint64_t>(what)); }
  std::size_t remaining() const noexcept { return buf_.size() - pos_; }
  const unsigned char* cursor() const noexcept { return buf_.data() + pos_; }
  void skip(std::size_t n) { pos_ += n; }

 private:
  std::vector<unsigned char> buf_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<unsigned char> encode_field(const FieldRealization& f) {
  const auto& g = f.grid();
  const std::size_t d = g.dims();
  if (d > 255) throw UnsupportedError("field dimension exceeds format limit");
  if (f.hurst().q() > 255) throw UnsupportedError("order q exceeds format limit");
  detail::ByteWriter w;
  w.raw(kFieldMagic.data(), kFieldMagic.size());
  w.uint<std::uint16_t>(kFieldVersion);
  w.uint<std::uint8_t>(static_cast<std::uint8_t>(d));
  w.uint<std::uint8_t>(static_cast<std::uint8_t>(f.hurst().q()));
  for (std::size_t i = 0; i < d; ++i) w.f64(f.hurst()[i]);
  for (std::size_t i = 0; i < d; ++i) {
    if (g.cells(i) > 0xFFFFFFFFu) throw UnsupportedError("cells per axis exceed u32");
    w.uint<std::uint32_t>(static_cast<std::uint32_t>(g.cells(i)));
  }
  for (std::size_t i = 0; i < d; ++i) w.f64(g.origin()[i]);
  for (std::size_t i = 0; i < d; ++i) w.f64(g.extent()[i]);
  w.uint<std::uint64_t>(f.seed());
  w.uint<std::uint8_t>(static_cast<std::uint8_t>(f.tag()));
  w.uint<std::uint8_t>(f.flags());
  for (double v : f.values()) w.f64(v);
  return w.bytes();
}

inline FieldRealization decode_field(std::vector<unsigned char> bytes) {
  detail::ByteReader r(std::move(bytes));
  r.need(4, "magic");
  if (std::memcmp(r.cursor(), kFieldMagic.data(), 4) != 0) throw BadMagicError("not an HFLD field file (bad magic)");
  r.skip(4);
  const auto version = r.uint<std::uint16_t>("version");
  if (version != kFieldVersion)
    throw VersionError("unsupported HFLD version " + std::to_string(version));
  const std::size_t d = r.uint<std::uint8_t>("dimension");
  const int q = r.uint<std::uint8_t>("order");
  if (d == 0) throw FormatError("field file declares zero dimensions");
  std::vector<double> h(d), origin(d), extent(d);
  std::vector<std::size_t> cells(d);
  for (auto& x : h) x = r.f64("Hurst values");
  for (auto& c : cells) c = r.uint<std::uint32_t>("cells per axis");
  for (auto& x : origin) x = r.f64("origin");
  for (auto& x : extent) x = r.f64("extent");
  const auto seed = r.uint<std::uint64_t>("seed");
  const auto tag = r.uint<std::uint8_t>("generator tag");
  const auto flags = r.uint<std::uint8_t>("flags");
  if (tag > static_cast<std::uint8_t>(GeneratorTag::gaussian_exact)) throw FormatError("unknown generator tag");
  GridSpec grid(MultiIndex(origin), MultiIndex(extent), cells);
  const std::size_t n = grid.node_count();
  if (r.remaining() < n * 8) throw TruncatedError("field payload truncated");
  if (r.remaining() > n * 8) throw FormatError("trailing bytes after field payload");
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = r.f64("payload");
    if (std::isnan(values[i])) throw NanPayloadError("NaN in field payload at node " + std::to_string(i));
  }
  return FieldRealization(std::move(grid), std::move(values), HurstIndex(std::move(h), q), seed,
                          static_cast<GeneratorTag>(tag), flags);
}

inline void write_field(const FieldRealization& f, const std::string& path) {
  const auto bytes = encode_field(f);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path);
}

inline FieldRealization read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_field(std::move(bytes));
}

/// One node per line: coordinates then value.
inline void write_field_csv(const FieldRealization& f, std::ostream& os) {
  const auto& g = f.grid();
  const std::size_t d = g.dims();
  for (std::size_t i = 0; i < d; ++i) os << (i ? "," : "") << ((f.flags() & field_flags::time_axis) && i == 0 ? std::string("t") : "x" + std::to_string(i + 1));
  os << ",value\n";
  std::ostringstream line;
  line << std::setprecision(17);
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    const auto idx = g.unflatten_node(k);
    line.str("");
    for (std::size_t i = 0; i < d; ++i) line << g.node_coord(i, idx[i]) << ',';
    line << f.values()[k] << '\n';
    os << line.str();
  }
}

}  // namespace hfield

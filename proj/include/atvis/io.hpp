#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "atvis/forward.hpp"
#include "atvis/image.hpp"
#include "atvis/metrics.hpp"

// CSM1 container: "CSM1", u32 version, u32 dtype, u32 ndim, ndim x u32 dims,
// row-major payload, then optionally a u32 byte length followed by UTF-8
// key=value lines. All integers and floats little-endian.
namespace atvis::io {

enum class DType : std::uint32_t { real = 0, complex = 1, mask = 2 };

inline constexpr std::array<char, 4> kMagic{'C', 'S', 'M', '1'};
inline constexpr std::uint32_t kVersion = 1;

using Metadata = std::vector<std::pair<std::string, std::string>>;

struct MatrixFile {
  DType dtype = DType::complex;
  std::vector<std::uint32_t> dims;
  std::vector<double> real;
  std::vector<cplx> complex;
  std::vector<std::uint8_t> mask;
  Metadata metadata;

  [[nodiscard]] std::size_t element_count() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }
  [[nodiscard]] std::string meta(const std::string& key, const std::string& fallback = "") const {
    for (const auto& [k, v] : metadata)
      if (k == key) return v;
    return fallback;
  }
};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}
inline void put_f64(std::string& out, double x) {
  const auto v = std::bit_cast<std::uint64_t>(x);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

class Reader {
 public:
  explicit Reader(std::string bytes) : buf_(std::move(bytes)) {}
  [[nodiscard]] std::size_t remaining() const { return buf_.size() - pos_; }
  void need(std::size_t n) const {
    if (remaining() < n) throw IoError("CSM1: truncated file");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(buf_[pos_++]);
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::string buf_;
  std::size_t pos_ = 0;
};

inline std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void spit(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write failed for " + path);
}

}  // namespace detail

[[nodiscard]] inline std::string encode(const MatrixFile& m) {
  if (m.dims.empty()) throw IoError("CSM1: at least one dimension required");
  for (auto d : m.dims)
    if (d < 1) throw IoError("CSM1: dimensions must be >= 1");
  const std::size_t n = m.element_count();
  const std::size_t have = m.dtype == DType::real ? m.real.size() : m.dtype == DType::complex ? m.complex.size() : m.mask.size();
  if (have != n) throw IoError("CSM1: payload length does not match dims");

  std::string out(kMagic.begin(), kMagic.end());
  detail::put_u32(out, kVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(m.dtype));
  detail::put_u32(out, static_cast<std::uint32_t>(m.dims.size()));
  for (auto d : m.dims) detail::put_u32(out, d);
  switch (m.dtype) {
    case DType::real:
      for (double v : m.real) detail::put_f64(out, v);
      break;
    case DType::complex:
      for (const auto& v : m.complex) {
        detail::put_f64(out, v.real());
        detail::put_f64(out, v.imag());
      }
      break;
    case DType::mask:
      for (auto v : m.mask) out.push_back(static_cast<char>(v != 0 ? 1 : 0));
      break;
  }
  if (!m.metadata.empty()) {
    std::string meta;
    for (const auto& [k, v] : m.metadata) meta += k + "=" + v + "\n";
    detail::put_u32(out, static_cast<std::uint32_t>(meta.size()));
    out += meta;
  }
  return out;
}

[[nodiscard]] inline MatrixFile decode(std::string bytes) {
  detail::Reader in(std::move(bytes));
  const std::string magic = in.bytes(4);
  if (magic != std::string(kMagic.begin(), kMagic.end())) throw IoError("CSM1: bad magic");
  if (in.u32() != kVersion) throw IoError("CSM1: unsupported version");
  MatrixFile m;
  const std::uint32_t dt = in.u32();
  if (dt > 2) throw IoError("CSM1: unknown dtype");
  m.dtype = static_cast<DType>(dt);
  const std::uint32_t ndim = in.u32();
  if (ndim == 0) throw IoError("CSM1: ndim must be >= 1");
  for (std::uint32_t i = 0; i < ndim; ++i) {
    m.dims.push_back(in.u32());
    if (m.dims.back() == 0) throw IoError("CSM1: dimensions must be >= 1");
  }
  const std::size_t n = m.element_count();
  switch (m.dtype) {
    case DType::real:
      in.need(8 * n);
      m.real.resize(n);
      for (auto& v : m.real) v = in.f64();
      break;
    case DType::complex:
      in.need(16 * n);
      m.complex.resize(n);
      for (auto& v : m.complex) {
        const double re = in.f64();
        v = cplx(re, in.f64());
      }
      break;
    case DType::mask:
      in.need(n);
      m.mask.resize(n);
      for (auto& v : m.mask) {
        v = in.u8();
        if (v > 1) throw IoError("CSM1: mask bytes must be 0 or 1");
      }
      break;
  }
  if (in.remaining() > 0) {
    const std::uint32_t len = in.u32();
    std::istringstream meta(in.bytes(len));
    for (std::string line; std::getline(meta, line);) {
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw IoError("CSM1: malformed metadata line");
      m.metadata.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
    if (in.remaining() > 0) throw IoError("CSM1: trailing bytes after metadata");
  }
  return m;
}

inline void write_matrix(const std::string& path, const MatrixFile& m) { detail::spit(path, encode(m)); }
[[nodiscard]] inline MatrixFile read_matrix(const std::string& path) { return decode(detail::slurp(path)); }

inline void write_image(const std::string& path, const ComplexImage& u, Metadata meta = {}) {
  MatrixFile m;
  m.dtype = DType::complex;
  m.dims = {static_cast<std::uint32_t>(u.rows()), static_cast<std::uint32_t>(u.cols())};
  m.complex.assign(u.begin(), u.end());
  m.metadata = std::move(meta);
  write_matrix(path, m);
}

inline void write_real(const std::string& path, const RealImage& u, Metadata meta = {}) {
  MatrixFile m;
  m.dtype = DType::real;
  m.dims = {static_cast<std::uint32_t>(u.rows()), static_cast<std::uint32_t>(u.cols())};
  m.real.assign(u.begin(), u.end());
  m.metadata = std::move(meta);
  write_matrix(path, m);
}

/// Channel stack of equally sized planes as a 3D complex array.
inline void write_stack(const std::string& path, const std::vector<ComplexImage>& planes, Metadata meta = {}) {
  if (planes.empty()) throw IoError("write_stack: no planes");
  MatrixFile m;
  m.dtype = DType::complex;
  m.dims = {static_cast<std::uint32_t>(planes.size()), static_cast<std::uint32_t>(planes[0].rows()),
            static_cast<std::uint32_t>(planes[0].cols())};
  for (const auto& p : planes) {
    if (!p.same_shape(planes[0])) throw DimensionError("write_stack: plane shape mismatch");
    m.complex.insert(m.complex.end(), p.begin(), p.end());
  }
  m.metadata = std::move(meta);
  write_matrix(path, m);
}

inline void write_mask(const std::string& path, const SamplingMask& mask, Metadata meta = {}) {
  MatrixFile m;
  m.dtype = DType::mask;
  m.dims = {static_cast<std::uint32_t>(mask.rows()), static_cast<std::uint32_t>(mask.cols())};
  m.mask = mask.bytes();
  m.metadata = std::move(meta);
  write_matrix(path, m);
}

/// Reads a 2D real or complex file, or a 3D stack, as complex planes.
[[nodiscard]] inline std::vector<ComplexImage> to_planes(const MatrixFile& m) {
  if (m.dtype == DType::mask) throw IoError("expected image data, found a mask");
  if (m.dims.size() != 2 && m.dims.size() != 3) throw IoError("expected a 2D image or 3D stack");
  const std::size_t planes = m.dims.size() == 3 ? m.dims[0] : 1;
  const std::size_t rows = m.dims[m.dims.size() - 2];
  const std::size_t cols = m.dims.back();
  std::vector<ComplexImage> out;
  for (std::size_t p = 0; p < planes; ++p) {
    ComplexImage u(rows, cols);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const std::size_t j = p * rows * cols + i;
      u[i] = m.dtype == DType::complex ? m.complex[j] : cplx(m.real[j]);
    }
    out.push_back(std::move(u));
  }
  return out;
}

[[nodiscard]] inline ComplexImage read_image(const std::string& path) {
  auto planes = to_planes(read_matrix(path));
  if (planes.size() != 1) throw IoError(path + ": expected a single 2D image");
  return std::move(planes.front());
}

[[nodiscard]] inline SamplingMask to_mask(const MatrixFile& m) {
  if (m.dtype != DType::mask || m.dims.size() != 2) throw IoError("expected a 2D mask");
  return {m.dims[0], m.dims[1], m.mask};
}

[[nodiscard]] inline SamplingMask read_mask(const std::string& path) { return to_mask(read_matrix(path)); }

/// Shortest round-trip decimal text, independent of the C locale.
[[nodiscard]] inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw IoError("number formatting failed");
  return {buf.data(), end};
}

/// `# key=value` parameter lines, a header, then one row per iteration.
/// The rlne column appears only when a reference was supplied.
inline void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace, bool with_rlne,
                            const Metadata& params = {}) {
  for (const auto& [k, v] : params) os << "# " << k << "=" << v << '\n';
  os << (with_rlne ? "iter,beta,rlne,l1_eps_res,l1_eps_n,d1,elapsed_ms\n" : "iter,beta,l1_eps_res,l1_eps_n,d1,elapsed_ms\n");
  for (const auto& t : trace) {
    os << t.iter << ',' << format_number(t.beta) << ',';
    if (with_rlne) os << format_number(t.rlne) << ',';
    os << format_number(t.l1_eps_res) << ',' << format_number(t.l1_eps_n) << ',' << format_number(t.d1) << ','
       << format_number(t.elapsed_ms) << '\n';
  }
}

/// Binary PGM (P5); values are divided by their maximum and mapped to 0..255.
inline void write_pgm(const std::string& path, const RealImage& u) {
  double hi = 0.0;
  for (double v : u) hi = std::max(hi, v);
  std::string out = "P5\n" + std::to_string(u.cols()) + " " + std::to_string(u.rows()) + "\n255\n";
  for (double v : u) {
    const double s = hi > 0.0 ? std::clamp(v / hi, 0.0, 1.0) : 0.0;
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * s))));
  }
  detail::spit(path, out);
}

}  // namespace atvis::io

#include "hiflab/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace hiflab {

namespace {

constexpr char kMagic[4] = {'H', 'I', 'F', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((bits >> (8 * k)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

double get_f64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int k = 7; k >= 0; --k) bits = (bits << 8) | p[k];
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("io", "cannot open for writing: " + path);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("io", "short write: " + path);
}

std::string header(const Grid& g, PayloadKind kind) {
  std::string bytes;
  bytes.append(kMagic, 4);
  put_u32(bytes, kVersion);
  put_u32(bytes, static_cast<std::uint32_t>(g.nx()));
  put_u32(bytes, static_cast<std::uint32_t>(g.ny()));
  put_u32(bytes, static_cast<std::uint32_t>(kind));
  return bytes;
}

}  // namespace

void write_field(const ScalarField& field, const std::string& path) {
  require_finite(field.values(), "write_field");
  std::string bytes = header(field.grid(), PayloadKind::scalar);
  for (double v : field.values()) put_f64(bytes, v);
  write_bytes(path, bytes);
}

void write_field(const MatrixField& field, const std::string& path) {
  require_finite(field.a11(), "write_field");
  require_finite(field.a12(), "write_field");
  require_finite(field.a22(), "write_field");
  std::string bytes = header(field.grid(), PayloadKind::sym2x2);
  for (double v : field.a11()) put_f64(bytes, v);
  for (double v : field.a12()) put_f64(bytes, v);
  for (double v : field.a22()) put_f64(bytes, v);
  write_bytes(path, bytes);
}

FieldFile read_field_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("io", "cannot open: " + path);
  std::string bytes((std::istreambuf_iterator<char>(is)),
                    std::istreambuf_iterator<char>());
  if (bytes.size() < 20) throw IoError("truncated payload", "file shorter than header: " + path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (std::memcmp(p, kMagic, 4) != 0) throw IoError("bad magic", "bad magic: " + path);
  if (get_u32(p + 4) != kVersion) {
    throw IoError("version mismatch", "unsupported version in " + path);
  }
  const std::uint32_t nx = get_u32(p + 8);
  const std::uint32_t ny = get_u32(p + 12);
  const std::uint32_t kind = get_u32(p + 16);
  if (nx < 3 || ny < 3 || nx > (1u << 20) || ny > (1u << 20)) {
    throw IoError("bad header", "implausible dimensions in " + path);
  }
  const std::size_t n = static_cast<std::size_t>(nx) * ny;
  const std::size_t planes = kind == 0 ? 1 : 3;
  if (kind > 1) throw IoError("bad header", "unknown payload kind in " + path);
  if (bytes.size() != 20 + 8 * n * planes) {
    throw IoError("truncated payload", "payload size mismatch: " + path);
  }

  Grid grid(static_cast<int>(nx), static_cast<int>(ny));
  auto read_plane = [&](std::size_t plane) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) {
      v[k] = get_f64(p + 20 + 8 * (plane * n + k));
      if (!std::isfinite(v[k])) {
        throw IoError("non-finite values", "non-finite value in " + path);
      }
    }
    return v;
  };

  FieldFile out;
  out.kind = static_cast<PayloadKind>(kind);
  if (out.kind == PayloadKind::scalar) {
    out.scalar = ScalarField(grid, read_plane(0));
  } else {
    MatrixField m(grid);
    m.a11() = read_plane(0);
    m.a12() = read_plane(1);
    m.a22() = read_plane(2);
    out.matrix = std::move(m);
  }
  return out;
}

ScalarField read_scalar_field(const std::string& path) {
  FieldFile f = read_field_file(path);
  if (f.kind != PayloadKind::scalar) {
    throw IoError("bad header", "expected scalar payload: " + path);
  }
  return *std::move(f.scalar);
}

MatrixField read_matrix_field(const std::string& path) {
  FieldFile f = read_field_file(path);
  if (f.kind != PayloadKind::sym2x2) {
    throw IoError("bad header", "expected matrix payload: " + path);
  }
  return *std::move(f.matrix);
}

}  // namespace hiflab

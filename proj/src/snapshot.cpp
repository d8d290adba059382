#include "jflow/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "jflow/error.hpp"

namespace jflow {

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

constexpr char kMagic[4] = {'J', 'F', 'L', 'D'};

void put_u32(std::vector<char>& buf, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  buf.insert(buf.end(), b, b + 4);
}

void put_f64(std::vector<char>& buf, double v) {
  char b[8];
  std::memcpy(b, &v, 8);
  buf.insert(buf.end(), b, b + 8);
}

std::vector<char> header(const GridShape& shape, std::uint32_t components) {
  std::vector<char> buf(kMagic, kMagic + 4);
  put_u32(buf, kSnapshotVersion);
  for (int d : shape.n) put_u32(buf, static_cast<std::uint32_t>(d));
  put_u32(buf, components);
  return buf;
}

void write_bytes(const std::filesystem::path& path, const std::vector<char>& buf) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot open " + path.string() + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw UsageError("write failed: " + path.string());
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const ScalarField& f) {
  auto buf = header(f.shape(), 1);
  buf.reserve(buf.size() + 8 * f.size());
  for (double v : f.values()) put_f64(buf, v);
  write_bytes(path, buf);
}

void write_snapshot(const std::filesystem::path& path, const FormField& f) {
  auto buf = header(f.shape(), 4);
  buf.reserve(buf.size() + 32 * f.size());
  for (const auto& x : f.values()) {
    put_f64(buf, x.a11);
    put_f64(buf, x.a22);
    put_f64(buf, x.a12.real());
    put_f64(buf, x.a12.imag());
  }
  write_bytes(path, buf);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open snapshot " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto fail = [&](const char* why) -> Snapshot {
    throw UsageError(path.string() + ": " + why);
  };
  if (buf.size() < 28 || std::memcmp(buf.data(), kMagic, 4) != 0) return fail("not a JFLD file");
  auto u32_at = [&](std::size_t off) {
    std::uint32_t v;
    std::memcpy(&v, buf.data() + off, 4);
    return v;
  };
  if (u32_at(4) != kSnapshotVersion) return fail("unsupported JFLD version");
  GridShape shape;
  for (int a = 0; a < 4; ++a) shape.n[a] = static_cast<int>(u32_at(8 + 4 * a));
  const std::uint32_t comps = u32_at(24);
  if (comps != 1 && comps != 4) return fail("bad component count");
  for (int d : shape.n) {
    if (d <= 0) return fail("bad grid dimension");
  }
  const std::size_t npts = shape.size();
  if (buf.size() != 28 + 8 * comps * npts) return fail("sample count does not match header");

  const char* p = buf.data() + 28;
  auto next = [&p] {
    double v;
    std::memcpy(&v, p, 8);
    p += 8;
    return v;
  };
  if (comps == 1) {
    ScalarField f(shape);
    for (std::size_t i = 0; i < npts; ++i) f[i] = next();
    return f;
  }
  FormField f(shape);
  for (std::size_t i = 0; i < npts; ++i) {
    auto& x = f[i];
    x.a11 = next();
    x.a22 = next();
    const double re = next();
    x.a12 = Complex(re, next());
  }
  return f;
}

ScalarField read_scalar_snapshot(const std::filesystem::path& path) {
  auto s = read_snapshot(path);
  if (auto* f = std::get_if<ScalarField>(&s)) return std::move(*f);
  throw UsageError(path.string() + ": expected a scalar field snapshot");
}

FormField read_form_snapshot(const std::filesystem::path& path) {
  auto s = read_snapshot(path);
  if (auto* f = std::get_if<FormField>(&s)) return std::move(*f);
  throw UsageError(path.string() + ": expected a form field snapshot");
}

}  // namespace jflow

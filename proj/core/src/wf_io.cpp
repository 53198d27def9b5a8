#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "chernoff/grid.hpp"

namespace chernoff {
namespace {

constexpr char kMagic[16] = {'C', 'H', 'E', 'R', 'N', 'O', 'F', 'F',
                             '-', 'W', 'F', '\0', '\0', '\0', '\0', '\0'};

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff),
               char((v >> 24) & 0xff)};
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = char((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void put_f64(std::ostream& out, double d) { put_u64(out, std::bit_cast<std::uint64_t>(d)); }

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4] = {};
  in.read(reinterpret_cast<char*>(b), 4);
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
         (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
}

double get_f64(std::istream& in) {
  unsigned char b[8] = {};
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace

void write_wf(const WaveFunction& f, std::ostream& out) {
  const Grid& g = *f.grid();
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, static_cast<std::uint32_t>(g.dim()));
  for (std::size_t m = 0; m < g.dim(); ++m)
    put_u32(out, static_cast<std::uint32_t>(g.n(m)));
  for (std::size_t m = 0; m < g.dim(); ++m) put_f64(out, g.length(m));
  for (const cxd& z : f.values()) {
    put_f64(out, z.real());
    put_f64(out, z.imag());
  }
  if (!out) throw std::runtime_error("write_wf: stream write failed");
}

void write_wf(const WaveFunction& f, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("write_wf: cannot open " + path.string());
  write_wf(f, out);
}

WaveFunction read_wf(std::istream& in) {
  char magic[16] = {};
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("read_wf: bad magic (not a wavefunction dump)");
  const std::uint32_t d = get_u32(in);
  if (!in || d == 0 || d > 16) throw std::runtime_error("read_wf: bad dimension");
  std::vector<std::size_t> n(d);
  std::vector<double> len(d);
  for (auto& v : n) v = get_u32(in);
  for (auto& v : len) v = get_f64(in);
  if (!in) throw std::runtime_error("read_wf: truncated header");
  auto grid = make_grid(std::move(n), std::move(len));
  std::vector<cxd> values(grid->size());
  for (auto& z : values) {
    const double re = get_f64(in);
    const double im = get_f64(in);
    z = cxd(re, im);
  }
  if (!in) throw std::runtime_error("read_wf: truncated payload");
  return WaveFunction(std::move(grid), std::move(values));
}

WaveFunction read_wf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_wf: cannot open " + path.string());
  return read_wf(in);
}

}  // namespace chernoff

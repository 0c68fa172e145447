#include "phi4/io.hpp"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace phi4::io {

namespace {
constexpr char kMagic[8] = {'P', 'H', 'I', '4', 'F', 'L', 'D', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<char*>(b), 4);
}

void put_f64(std::ostream& os, double x) {
  std::uint64_t v;
  std::memcpy(&v, &x, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<char*>(b), 8);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double x;
  std::memcpy(&x, &v, 8);
  return x;
}
}  // namespace

void write_snapshot(const std::string& path, const RealField& field) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open snapshot for writing: " + path);
  os.write(kMagic, 8);
  put_u32(os, static_cast<std::uint32_t>(field.grid.points_per_side));
  put_f64(os, field.grid.side_length);
  for (double v : field.values) put_f64(os, v);
  if (!os) throw Error("snapshot write failed: " + path);
}

RealField read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open snapshot: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw Error("bad snapshot magic: " + path);
  std::uint32_t n = get_u32(is);
  double M = get_f64(is);
  RealField f(TorusGrid::make(M, static_cast<int>(n)));
  for (auto& v : f.values) v = get_f64(is);
  if (!is) throw Error("snapshot truncated: " + path);
  return f;
}

void append_csv(const std::string& path, const std::string& header,
                const std::vector<std::string>& rows) {
  bool fresh = !std::filesystem::exists(path);
  std::ofstream os(path, std::ios::app);
  if (!os) throw Error("cannot open csv: " + path);
  if (fresh) os << header << "\n";
  for (const auto& r : rows) os << r << "\n";
}

std::string read_text(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error("cannot open file for writing: " + path);
  os << content;
}

}  // namespace phi4::io

#include <chisel/field_io.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chisel {

namespace {

void put_le64(std::ostream& os, double x) {
  uint64_t u;
  std::memcpy(&u, &x, 8);
  if constexpr (std::endian::native == std::endian::big) {
    u = __builtin_bswap64(u);
  }
  char buf[8];
  std::memcpy(buf, &u, 8);
  os.write(buf, 8);
}

double get_le64(std::istream& is) {
  char buf[8];
  is.read(buf, 8);
  uint64_t u;
  std::memcpy(&u, buf, 8);
  if constexpr (std::endian::native == std::endian::big) {
    u = __builtin_bswap64(u);
  }
  double x;
  std::memcpy(&x, &u, 8);
  return x;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void write_field_binary(std::ostream& os, const StripGrid& g, const BulkField& f, double time) {
  os << g.nx << " " << g.ny << " " << fmt(g.lx) << " " << fmt(g.ly) << " " << fmt(time) << "\n";
  for (double x : f.v) put_le64(os, x);
}

void write_field_binary(const std::string& path, const StripGrid& g, const BulkField& f,
                        double time) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_field_binary(os, g, f, time);
}

FieldSnapshot read_field_binary(std::istream& is) {
  FieldSnapshot s;
  std::string header;
  std::getline(is, header);
  std::istringstream hs(header);
  if (!(hs >> s.nx >> s.ny >> s.lx >> s.ly >> s.time))
    throw std::runtime_error("bad field snapshot header: " + header);
  s.field = BulkField(s.nx, s.ny);
  for (double& x : s.field.v) x = get_le64(is);
  if (!is) throw std::runtime_error("truncated field snapshot");
  return s;
}

FieldSnapshot read_field_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_field_binary(is);
}

void write_field_csv(std::ostream& os, const StripGrid& g, const BulkField& f) {
  os << "x,y,value\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      os << fmt(i * g.hx) << "," << fmt(j * g.hy) << "," << fmt(f.at(i, j)) << "\n";
}

void write_field_csv(const std::string& path, const StripGrid& g, const BulkField& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_field_csv(os, g, f);
}

}  // namespace chisel

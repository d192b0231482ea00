#pragma once

#include <chisel/grid.hpp>

#include <iosfwd>
#include <string>

namespace chisel {

// Snapshot format: one ASCII header line "nx ny lx ly time" followed by
// nx*ny little-endian float64 values in row-major (y-major) order.
void write_field_binary(std::ostream& os, const StripGrid& g, const BulkField& f, double time);
void write_field_binary(const std::string& path, const StripGrid& g, const BulkField& f,
                        double time);

struct FieldSnapshot {
  int nx = 0, ny = 0;
  double lx = 0.0, ly = 0.0;
  double time = 0.0;
  BulkField field;
};
FieldSnapshot read_field_binary(std::istream& is);
FieldSnapshot read_field_binary(const std::string& path);

// CSV rows "x,y,value" with a header line.
void write_field_csv(std::ostream& os, const StripGrid& g, const BulkField& f);
void write_field_csv(const std::string& path, const StripGrid& g, const BulkField& f);

}  // namespace chisel

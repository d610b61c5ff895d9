#pragma once

#include <iosfwd>
#include <string>

#include "choquard/field.hpp"

namespace choquard {

// CHQF binary layout (little-endian):
//   "CHQF" | u32 version = 1 | u32 dim | u32 n | f64 L | n^dim f64 values, row-major.

void write_chqf(std::ostream& out, const Field& u);
Field read_chqf(std::istream& in);

void write_chqf(const std::string& path, const Field& u);
Field read_chqf(const std::string& path);

/// One line per node: i0[,i1[,i2]],x0[,x1[,x2]],value with a header row.
void write_field_csv(std::ostream& out, const Field& u);
void write_field_csv(const std::string& path, const Field& u);

}  // namespace choquard

#pragma once

#include <string>
#include <vector>

#include "phi4/grid.hpp"

namespace phi4::io {

// Binary field snapshot: magic "PHI4FLD1", little-endian u32 N, little-endian
// f64 M, then N*N little-endian f64 values, row-major.
void write_snapshot(const std::string& path, const RealField& field);
RealField read_snapshot(const std::string& path);

// Append-only CSV: writes the header iff the file does not exist yet.
void append_csv(const std::string& path, const std::string& header,
                const std::vector<std::string>& rows);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& content);

}  // namespace phi4::io

#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "etd/imaging.hpp"

namespace etd::app {

// I/O failure; the message starts with the path involved.
struct IOError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "%.17g"
std::string fmt_real(double v);

// Writes to a temporary file in the same directory, then renames it over
// path. Parent directories are created.
void atomic_write(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

// Boundary data: header x1..xd, re_u1..re_ud, im_u1..im_ud; one row per node.
std::string field_csv(const BoundaryGrid& grid, const ComplexVecField& f);
// Parses field_csv output; checks the node coordinates against grid.
ComplexVecField parse_field_csv(const std::string& text, const BoundaryGrid& grid, const std::string& path);

// Image values: header x,y[,z],value; lattice order.
std::string image_csv(const SearchGrid& grid, const std::vector<double>& values);

// Plain PGM (P2, max 255) linearly normalized from [min, max]. Rows run
// from the largest to the smallest second coordinate, columns along the
// first. In 3D the slice through the middle node of the third axis is used.
struct PgmImage {
    std::string text;
    double min = 0.0;
    double max = 0.0;
};
PgmImage image_pgm(const SearchGrid& grid, const std::vector<double>& values);

// Writes <stem>.csv, <stem>.pgm and <stem>.pgm.json according to formats.
void write_image(const std::string& dir, const std::string& stem, const SearchGrid& grid,
                 const std::vector<double>& values, const std::vector<std::string>& formats);

}  // namespace etd::app

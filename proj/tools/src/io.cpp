#include "etd_app/io.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace etd::app {

namespace fs = std::filesystem;

std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    static std::atomic<unsigned> counter{0};
    const fs::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path(), ec);
        if (ec) throw IOError(p.parent_path().string() + ": cannot create directory: " + ec.message());
    }
    const fs::path tmp = p.string() + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IOError(tmp.string() + ": cannot open for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            fs::remove(tmp, ec);
            throw IOError(tmp.string() + ": write failed");
        }
    }
    fs::rename(tmp, p, ec);
    if (ec) {
        std::error_code ec2;
        fs::remove(tmp, ec2);
        throw IOError(path + ": rename failed: " + ec.message());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError(path + ": cannot open for reading");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_json(const std::string& path, const nlohmann::json& j) { atomic_write(path, j.dump(2) + "\n"); }

nlohmann::json read_json(const std::string& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw IOError(path + ": " + e.what());
    }
}

std::string field_csv(const BoundaryGrid& grid, const ComplexVecField& f) {
    const int d = grid.d;
    std::string s;
    for (int i = 1; i <= d; ++i) s += "x" + std::to_string(i) + ",";
    for (int i = 1; i <= d; ++i) s += "re_u" + std::to_string(i) + ",";
    for (int i = 1; i <= d; ++i) s += "im_u" + std::to_string(i) + (i == d ? "\n" : ",");
    for (std::size_t n = 0; n < grid.size(); ++n) {
        for (int i = 0; i < d; ++i) s += fmt_real(grid.points[n][i]) + ",";
        for (int i = 0; i < d; ++i) s += fmt_real(f.values[n][i].real()) + ",";
        for (int i = 0; i < d; ++i) s += fmt_real(f.values[n][i].imag()) + (i == d - 1 ? "\n" : ",");
    }
    return s;
}

ComplexVecField parse_field_csv(const std::string& text, const BoundaryGrid& grid, const std::string& path) {
    const int d = grid.d;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw IOError(path + ": empty file");
    ComplexVecField f = zero_field(d, grid.size());
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (n >= grid.size()) throw IOError(path + ": more rows than boundary nodes");
        std::vector<double> v;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) {
            try {
                v.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw IOError(path + ": row " + std::to_string(n + 2) + ": bad number '" + cell + "'");
            }
        }
        if (static_cast<int>(v.size()) != 3 * d)
            throw IOError(path + ": row " + std::to_string(n + 2) + ": expected " + std::to_string(3 * d) + " columns");
        for (int i = 0; i < d; ++i) {
            if (std::abs(v[i] - grid.points[n][i]) > 1e-12 * (1.0 + grid.R))
                throw IOError(path + ": row " + std::to_string(n + 2) + ": node does not match the boundary grid");
            f.values[n][i] = cplx(v[d + i], v[2 * d + i]);
        }
        ++n;
    }
    if (n != grid.size()) throw IOError(path + ": fewer rows than boundary nodes");
    return f;
}

std::string image_csv(const SearchGrid& grid, const std::vector<double>& values) {
    static const char* names[] = {"x", "y", "z"};
    std::string s;
    for (int i = 0; i < grid.d; ++i) s += std::string(names[i]) + ",";
    s += "value\n";
    for (std::size_t t = 0; t < grid.size(); ++t) {
        for (int i = 0; i < grid.d; ++i) s += fmt_real(grid.points[t][i]) + ",";
        s += fmt_real(values[t]) + "\n";
    }
    return s;
}

PgmImage image_pgm(const SearchGrid& grid, const std::vector<double>& values) {
    if (!grid.is_lattice()) throw std::invalid_argument("image_pgm needs a lattice");
    const int nx = grid.n[0], ny = grid.n[1];
    const int k = grid.d == 3 ? grid.n[2] / 2 : 0;
    std::vector<double> slice;
    for (int iy = ny - 1; iy >= 0; --iy)
        for (int ix = 0; ix < nx; ++ix) slice.push_back(values[grid.index(ix, iy, k)]);
    PgmImage img;
    img.min = *std::min_element(slice.begin(), slice.end());
    img.max = *std::max_element(slice.begin(), slice.end());
    const double span = img.max - img.min;
    std::string s = "P2\n" + std::to_string(nx) + " " + std::to_string(ny) + "\n255\n";
    for (int r = 0; r < ny; ++r) {
        for (int c = 0; c < nx; ++c) {
            const double v = slice[static_cast<std::size_t>(r) * nx + c];
            const int g = span > 0.0 ? static_cast<int>(std::lround(255.0 * (v - img.min) / span)) : 0;
            s += std::to_string(g) + (c == nx - 1 ? "\n" : " ");
        }
    }
    img.text = std::move(s);
    return img;
}

void write_image(const std::string& dir, const std::string& stem, const SearchGrid& grid,
                 const std::vector<double>& values, const std::vector<std::string>& formats) {
    const auto has = [&](const char* f) { return std::find(formats.begin(), formats.end(), f) != formats.end(); };
    const std::string base = (fs::path(dir) / stem).string();
    if (has("csv")) atomic_write(base + ".csv", image_csv(grid, values));
    if (has("pgm") && grid.is_lattice()) {
        const auto pgm = image_pgm(grid, values);
        atomic_write(base + ".pgm", pgm.text);
        write_json(base + ".pgm.json", {{"min", pgm.min}, {"max", pgm.max}});
    }
}

}  // namespace etd::app

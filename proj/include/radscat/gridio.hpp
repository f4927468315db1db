#ifndef RADSCAT_GRIDIO_HPP
#define RADSCAT_GRIDIO_HPP

// Text output of grids, residual maps and time-domain frames.
//
// Grid files start with two comment lines:
//   # nx ny xmin xmax ymin ymax k
//   # <nx> <ny> <xmin> <xmax> <ymin> <ymax> <k>
// followed by nx*ny rows `x y re im` (x fastest). Residual maps and frames
// use the same header with rows `x y value`. Masked residual points are
// written as `nan`. Every number is printed with %.17g so files round-trip.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "radscat/assembly.hpp"
#include "radscat/timedomain.hpp"

namespace radscat::io {

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

inline File open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  File f(std::fopen(path.c_str(), "w"));
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

inline void header(std::FILE* f, const Grid& g, double k) {
  std::fprintf(f, "# nx ny xmin xmax ymin ymax k\n");
  std::fprintf(f, "# %d %d %.17g %.17g %.17g %.17g %.17g\n", g.nx, g.ny, g.xmin, g.xmax, g.ymin, g.ymax, k);
}

inline void finish(File& f, const std::filesystem::path& path) {
  if (std::ferror(f.get()) || std::fclose(f.release()) != 0) throw std::runtime_error("error writing " + path.string());
}

}  // namespace detail

inline void write_field(const std::filesystem::path& path, const WaveField& w) {
  auto f = detail::open_for_write(path);
  detail::header(f.get(), w.grid, w.k);
  for (int j = 0; j < w.grid.ny; ++j) {
    for (int i = 0; i < w.grid.nx; ++i) {
      const cplx v = w.values[w.grid.index(i, j)];
      std::fprintf(f.get(), "%.17g %.17g %.17g %.17g\n", w.grid.x(i), w.grid.y(j), v.real(), v.imag());
    }
  }
  detail::finish(f, path);
}

inline void write_scalar(const std::filesystem::path& path, const Grid& g, double k, const std::vector<double>& v,
                         const std::vector<bool>* masked = nullptr) {
  if (v.size() != g.size()) throw std::invalid_argument("write_scalar: size mismatch");
  auto f = detail::open_for_write(path);
  detail::header(f.get(), g, k);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t n = g.index(i, j);
      if (masked && (*masked)[n]) {
        std::fprintf(f.get(), "%.17g %.17g nan\n", g.x(i), g.y(j));
      } else {
        std::fprintf(f.get(), "%.17g %.17g %.17g\n", g.x(i), g.y(j), v[n]);
      }
    }
  }
  detail::finish(f, path);
}

inline void write_residual(const std::filesystem::path& path, const ResidualMap& r, double k) {
  write_scalar(path, r.grid, k, r.values, &r.masked);
}

/// Grid file with `x y re im` rows parsed back.
struct GridFile {
  Grid grid;
  double k = 0.0;
  std::vector<std::vector<double>> rows;
};

inline GridFile read_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  GridFile g;
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  if (std::sscanf(line.c_str(), "# %d %d %lf %lf %lf %lf %lf", &g.grid.nx, &g.grid.ny, &g.grid.xmin, &g.grid.xmax,
                  &g.grid.ymin, &g.grid.ymax, &g.k) != 7) {
    throw std::runtime_error(path.string() + ": bad header");
  }
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::vector<double> row;
    for (std::string w; ss >> w;) row.push_back(w == "nan" ? std::nan("") : std::stod(w));
    g.rows.push_back(std::move(row));
  }
  return g;
}

/// Writes frame_<i>.dat for every frame plus frames.txt listing
/// `index time file`.
inline void write_frames(const std::filesystem::path& dir, const Grid& g, double band_limit,
                         const std::vector<Frame>& frames) {
  std::filesystem::create_directories(dir);
  auto index = detail::open_for_write(dir / "frames.txt");
  std::fprintf(index.get(), "# index time file\n");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03zu.dat", i);
    write_scalar(dir / name, g, band_limit, frames[i].values);
    std::fprintf(index.get(), "%zu %.17g %s\n", i, frames[i].t, name);
  }
  detail::finish(index, dir / "frames.txt");
}

}  // namespace radscat::io

#endif  // RADSCAT_GRIDIO_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wassfem/errors.hpp"
#include "wassfem/io.hpp"

namespace wassfem {
namespace {

// Next header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in, const std::string& path) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  if (tok.empty()) throw FormatError(path + ": truncated PGM header");
  return tok;
}

int pgm_int(std::istream& in, const std::string& path, const char* what) {
  const std::string tok = pgm_token(in, path);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw FormatError(path + ": bad PGM " + what + " '" + tok + "'");
  }
}

}  // namespace

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ": cannot open image");
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || (magic[1] != '2' && magic[1] != '5')) {
    throw FormatError(path + ": not a P2/P5 graymap");
  }
  const bool binary = magic[1] == '5';
  GrayImage img;
  img.width = pgm_int(in, path, "width");
  img.height = pgm_int(in, path, "height");
  img.maxval = pgm_int(in, path, "maxval");
  if (img.width < 1 || img.height < 1) throw FormatError(path + ": empty image");
  if (img.maxval < 1 || img.maxval > 65535) throw FormatError(path + ": maxval out of range");
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  img.pixels.resize(n);
  if (binary) {
    // pgm_token consumed exactly one whitespace byte after maxval
    const int bytes = img.maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(n * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw FormatError(path + ": truncated pixel data");
    for (std::size_t i = 0; i < n; ++i) {
      img.pixels[i] = bytes == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) img.pixels[i] = pgm_int(in, path, "pixel");
  }
  for (int v : img.pixels) {
    if (v < 0 || v > img.maxval) throw FormatError(path + ": pixel value exceeds maxval");
  }
  return img;
}

void write_pgm(const std::string& path, const GrayImage& image) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "P2\n" << image.width << ' ' << image.height << '\n' << image.maxval << '\n';
  for (int r = 0; r < image.height; ++r) {
    for (int c = 0; c < image.width; ++c) out << (c ? " " : "") << image.at(c, r);
    out << '\n';
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

double discrete_mass(const MSpace& m, std::span<const double> values) {
  if (values.size() != static_cast<std::size_t>(m.num_dofs())) {
    throw ArgumentError("discrete_mass: size mismatch");
  }
  const int nk = m.points_per_cell();
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += m.weight(static_cast<int>(i % nk)) * values[i];
  return s;
}

namespace {

// Bilinear interpolation between pixel centres; the image spans the box.
double sample_image(const GrayImage& img, const Box& box, const Point& x) {
  const int dim = box.dim;
  const double u = (x[0] - box.lower[0]) / box.extent(0) * img.width - 0.5;
  const double v = dim == 2 ? (box.upper[1] - x[1]) / box.extent(1) * img.height - 0.5 : 0.0;
  const auto split = [](double s, int n, int& i0, int& i1, double& f) {
    s = std::clamp(s, 0.0, static_cast<double>(n - 1));
    i0 = std::min(static_cast<int>(std::floor(s)), n - 1);
    i1 = std::min(i0 + 1, n - 1);
    f = s - i0;
  };
  int c0, c1, r0, r1;
  double fc, fr;
  split(u, img.width, c0, c1, fc);
  split(v, dim == 2 ? img.height : 1, r0, r1, fr);
  const double top = (1.0 - fc) * img.at(c0, r0) + fc * img.at(c1, r0);
  const double bot = (1.0 - fc) * img.at(c0, r1) + fc * img.at(c1, r1);
  return ((1.0 - fr) * top + fr * bot) / img.maxval;
}

}  // namespace

std::vector<double> load_density(const DensitySpec& spec, const MSpace& m, const std::string& base_dir) {
  const SpatialMesh& mesh = m.spatial();
  const int dim = mesh.dim();
  std::vector<double> vals;
  switch (spec.kind) {
    case DensitySpec::Kind::Gaussian: {
      if (!(spec.sigma > 0.0)) throw ArgumentError("gaussian density: sigma must be positive");
      if (spec.centers.empty()) throw ArgumentError("gaussian density: no centres");
      const double s2 = 2.0 * spec.sigma * spec.sigma;
      vals = sample_m(m, [&](const Point& x) {
        double sum = 0.0;
        for (const auto& c : spec.centers) {
          double r2 = 0.0;
          for (int a = 0; a < dim; ++a) r2 += (x[a] - c[a]) * (x[a] - c[a]);
          sum += std::exp(-r2 / s2);
        }
        return spec.amplitude * sum;
      });
      break;
    }
    case DensitySpec::Kind::Constant:
      vals.assign(m.num_dofs(), spec.value);
      break;
    case DensitySpec::Kind::Image: {
      std::filesystem::path p(spec.path);
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      const GrayImage img = read_pgm(p.string());
      const Box& box = mesh.domain();
      vals = sample_m(m, [&](const Point& x) { return sample_image(img, box, x); });
      const double mx = *std::max_element(vals.begin(), vals.end());
      if (!(mx > 0.0)) throw ArgumentError(p.string() + ": degenerate density (all-black image)");
      const double floor = 1e-8 * mx;
      for (double& v : vals) v = std::max(v, floor);
      break;
    }
  }
  if (spec.normalize || spec.kind == DensitySpec::Kind::Image) {
    const double mass = discrete_mass(m, vals);
    if (!(mass > 0.0)) throw ArgumentError("density: degenerate density (zero mass)");
    for (double& v : vals) v /= mass;
  }
  return vals;
}

}  // namespace wassfem

#include "wassfem/mesh.hpp"

#include <cmath>
#include <sstream>

#include "wassfem/errors.hpp"

namespace wassfem {

std::array<int, 2> SpatialMesh::multi_index(int grid_index) const {
  if (dim_ == 1) return {grid_index, 0};
  return {grid_index / cells_[1], grid_index % cells_[1]};
}

int SpatialMesh::linear_index(const std::array<int, 2>& mi) const {
  if (dim_ == 1) return mi[0];
  return mi[0] * cells_[1] + mi[1];
}

int SpatialMesh::neighbor(int active, int axis, int side) const {
  auto mi = multi_index(active_cells_[active]);
  mi[axis] += side;
  if (mi[axis] < 0 || mi[axis] >= cells_[axis]) return -1;
  return grid_to_active_[linear_index(mi)];
}

Box SpatialMesh::cell_box(int active) const {
  const auto mi = multi_index(active_cells_[active]);
  Box b;
  b.dim = dim_;
  for (int a = 0; a < dim_; ++a) {
    b.lower[a] = domain_.lower[a] + mi[a] * spacing_[a];
    b.upper[a] = b.lower[a] + spacing_[a];
  }
  return b;
}

double SpatialMesh::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= spacing_[a];
  return v;
}

double SpatialMesh::active_volume() const { return num_active() * cell_volume(); }

SpatialMesh build_spatial_mesh(const Box& domain, std::array<int, 2> cells_per_axis,
                               const std::vector<Box>& obstacles) {
  if (domain.dim < 1 || domain.dim > 2) throw ArgumentError("spatial mesh: dim must be 1 or 2");
  SpatialMesh m;
  m.dim_ = domain.dim;
  m.domain_ = domain;
  m.cells_ = {1, 1};
  for (int a = 0; a < m.dim_; ++a) {
    if (cells_per_axis[a] < 1) throw ArgumentError("spatial mesh: cells per axis must be >= 1");
    if (!(domain.extent(a) > 0.0)) throw ArgumentError("spatial mesh: degenerate domain");
    m.cells_[a] = cells_per_axis[a];
    m.spacing_[a] = domain.extent(a) / cells_per_axis[a];
  }

  constexpr double kAlignTol = 1e-12;
  for (const Box& ob : obstacles) {
    if (ob.dim != m.dim_) throw ArgumentError("spatial mesh: obstacle dimension mismatch");
    for (int a = 0; a < m.dim_; ++a) {
      for (double c : {ob.lower[a], ob.upper[a]}) {
        const double s = (c - domain.lower[a]) / m.spacing_[a];
        const double snapped = std::round(s);
        if (std::abs(s - snapped) * m.spacing_[a] > kAlignTol || snapped < 0 ||
            snapped > m.cells_[a]) {
          std::ostringstream os;
          os.precision(17);
          os << "obstacle edge " << c << " on axis " << a << " is not on a grid line";
          throw AlignmentError(os.str(), a, c);
        }
      }
      if (!(ob.upper[a] > ob.lower[a])) throw ArgumentError("spatial mesh: degenerate obstacle");
    }
  }

  const int n = m.cells_[0] * (m.dim_ == 2 ? m.cells_[1] : 1);
  m.active_mask_.assign(n, true);
  m.grid_to_active_.assign(n, -1);
  for (int g = 0; g < n; ++g) {
    const auto mi = m.multi_index(g);
    Point centre{};
    for (int a = 0; a < m.dim_; ++a) centre[a] = domain.lower[a] + (mi[a] + 0.5) * m.spacing_[a];
    for (const Box& ob : obstacles) {
      if (ob.contains(centre)) {
        m.active_mask_[g] = false;
        break;
      }
    }
    if (m.active_mask_[g]) {
      m.grid_to_active_[g] = static_cast<int>(m.active_cells_.size());
      m.active_cells_.push_back(g);
    }
  }
  if (m.active_cells_.empty()) throw ArgumentError("spatial mesh: no active cells");
  return m;
}

SpaceTimeMesh::SpaceTimeMesh(SpatialMesh spatial, int n_time)
    : spatial_(std::move(spatial)), n_time_(n_time) {
  if (n_time < 1) throw ArgumentError("space-time mesh: n_time must be >= 1");
}

Box SpaceTimeMesh::cell_box(int st_cell) const {
  const int j = st_cell / spatial_.num_active();
  const int l = st_cell % spatial_.num_active();
  const Box s = spatial_.cell_box(l);
  Box b;
  b.dim = spatial_.dim() + 1;
  b.lower[0] = interval_start(j);
  b.upper[0] = interval_start(j + 1);
  for (int a = 0; a < spatial_.dim(); ++a) {
    b.lower[a + 1] = s.lower[a];
    b.upper[a + 1] = s.upper[a];
  }
  return b;
}

SpaceTimeMesh build_spacetime_mesh(SpatialMesh spatial, int n_time) {
  return SpaceTimeMesh(std::move(spatial), n_time);
}

std::vector<LateralFacet> spatial_boundary_faces(const SpatialMesh& mesh) {
  std::vector<LateralFacet> out;
  for (int l = 0; l < mesh.num_active(); ++l) {
    for (int a = 0; a < mesh.dim(); ++a) {
      for (int side : {-1, 1}) {
        if (mesh.neighbor(l, a, side) < 0) out.push_back({0, l, a, side});
      }
    }
  }
  return out;
}

std::vector<LateralFacet> boundary_facets(const SpaceTimeMesh& mesh) {
  const auto faces = spatial_boundary_faces(mesh.spatial());
  std::vector<LateralFacet> out;
  out.reserve(faces.size() * mesh.num_intervals());
  for (int j = 0; j < mesh.num_intervals(); ++j) {
    for (LateralFacet f : faces) {
      f.interval = j;
      out.push_back(f);
    }
  }
  return out;
}

}  // namespace wassfem

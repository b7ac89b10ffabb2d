#pragma once

#include <array>
#include <vector>

#include "wassfem/quad.hpp"

namespace wassfem {

/// Uniform rectangular grid on a box (1D or 2D) with obstacle cells removed.
///
/// Grid cells are addressed by a multi-index (ix[, iy]) whose linear index
/// varies fastest in the last axis. Active cells get a compact index in
/// increasing grid order.
class SpatialMesh {
 public:
  SpatialMesh() = default;

  int dim() const { return dim_; }
  const Box& domain() const { return domain_; }
  int cells_per_axis(int axis) const { return cells_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  int num_grid_cells() const { return static_cast<int>(active_mask_.size()); }
  int num_active() const { return static_cast<int>(active_cells_.size()); }

  bool is_active_grid(int grid_index) const { return active_mask_[grid_index]; }
  /// Compact active index for a grid cell, or -1 if inactive.
  int active_index(int grid_index) const { return grid_to_active_[grid_index]; }
  int grid_index(int active) const { return active_cells_[active]; }

  std::array<int, 2> multi_index(int grid_index) const;
  int linear_index(const std::array<int, 2>& mi) const;
  /// Active index of the neighbour across the face (axis, side), or -1 when
  /// the face is on the domain boundary or adjacent to an obstacle.
  int neighbor(int active, int axis, int side) const;

  Box cell_box(int active) const;
  double cell_volume() const;
  /// Sum of active cell volumes.
  double active_volume() const;

 private:
  friend SpatialMesh build_spatial_mesh(const Box&, std::array<int, 2>, const std::vector<Box>&);

  int dim_ = 0;
  Box domain_;
  std::array<int, 2> cells_{1, 1};
  std::array<double, 2> spacing_{1.0, 1.0};
  std::vector<bool> active_mask_;
  std::vector<int> active_cells_;
  std::vector<int> grid_to_active_;
};

/// Builds the grid on `domain` (dim = domain.dim, 1 or 2). Obstacle boxes
/// must have every edge on a grid line; cells whose centres lie inside an
/// obstacle are deactivated. Throws AlignmentError otherwise.
SpatialMesh build_spatial_mesh(const Box& domain, std::array<int, 2> cells_per_axis,
                               const std::vector<Box>& obstacles = {});

/// Lateral facet of the space-time mesh: spatial face of an active cell
/// times one time interval.
struct LateralFacet {
  int interval = 0;
  int cell = 0;  // active spatial index
  int axis = 0;  // spatial axis of the normal
  int side = 1;  // +1 or -1; outward normal = side * e_axis
};

/// Tensor product of a uniform partition of [0,1] with a spatial mesh.
class SpaceTimeMesh {
 public:
  SpaceTimeMesh() = default;
  SpaceTimeMesh(SpatialMesh spatial, int n_time);

  const SpatialMesh& spatial() const { return spatial_; }
  int num_intervals() const { return n_time_; }
  double dt() const { return 1.0 / n_time_; }
  double interval_start(int j) const { return static_cast<double>(j) / n_time_; }
  int num_cells() const { return n_time_ * spatial_.num_active(); }
  /// Space-time cell index; time interval is the slow index.
  int cell_index(int interval, int active) const { return interval * spatial_.num_active() + active; }
  /// Space-time box with axis 0 = time, axes 1.. = space.
  Box cell_box(int st_cell) const;
  int space_time_dim() const { return spatial_.dim() + 1; }

 private:
  SpatialMesh spatial_;
  int n_time_ = 1;
};

SpaceTimeMesh build_spacetime_mesh(SpatialMesh spatial, int n_time);

/// Spatial boundary faces (domain boundary and obstacle boundary).
std::vector<LateralFacet> spatial_boundary_faces(const SpatialMesh& mesh);

/// All lateral facets over all time intervals; t = 0 and t = 1 slices are
/// not included.
std::vector<LateralFacet> boundary_facets(const SpaceTimeMesh& mesh);

}  // namespace wassfem

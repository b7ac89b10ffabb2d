#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "wassfem/errors.hpp"
#include "wassfem/mesh.hpp"

using namespace wassfem;

namespace {

Box box1(double lo, double hi) {
  Box b;
  b.dim = 1;
  b.lower[0] = lo;
  b.upper[0] = hi;
  return b;
}

Box box2(double x0, double x1, double y0, double y1) {
  Box b;
  b.dim = 2;
  b.lower = {x0, y0, 0.0};
  b.upper = {x1, y1, 0.0};
  return b;
}

std::vector<Box> obstacle_boxes() {
  return {box2(-0.2, 0.2, -1.0, -0.7), box2(-0.2, 0.2, -0.5, -0.1), box2(-0.2, 0.2, 0.1, 0.5),
          box2(-0.2, 0.2, 0.7, 1.0)};
}

// Independent count: cells whose centres fall inside any obstacle.
int masked_cells(int n, double lo, double h, const std::vector<Box>& obs) {
  int masked = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double cx = lo + (i + 0.5) * h;
      const double cy = lo + (j + 0.5) * h;
      for (const Box& o : obs) {
        if (cx > o.lower[0] && cx < o.upper[0] && cy > o.lower[1] && cy < o.upper[1]) {
          ++masked;
          break;
        }
      }
    }
  }
  return masked;
}

}  // namespace

TEST_CASE("unit square without obstacles") {
  const SpatialMesh m = build_spatial_mesh(box2(0, 1, 0, 1), {4, 4});
  CHECK(m.num_active() == 16);
  CHECK(m.dim() == 2);
  CHECK(std::abs(m.active_volume() - 1.0) <= 1e-12);
  const SpaceTimeMesh st(m, 1);
  CHECK(boundary_facets(st).size() == 16);
  CHECK(build_spacetime_mesh(m, 4).num_cells() == 64);
}

TEST_CASE("1D mesh facets") {
  const SpatialMesh m = build_spatial_mesh(box1(0, 1), {8, 1});
  CHECK(m.num_active() == 8);
  const auto faces = spatial_boundary_faces(m);
  REQUIRE(faces.size() == 2);
  std::set<std::pair<int, int>> got;
  for (const auto& f : faces) got.insert({f.cell, f.side});
  CHECK(got.count({0, -1}) == 1);
  CHECK(got.count({7, 1}) == 1);
  CHECK(boundary_facets(SpaceTimeMesh(m, 4)).size() == 8);
}

TEST_CASE("obstacle domain") {
  const auto obs = obstacle_boxes();
  const SpatialMesh m = build_spatial_mesh(box2(-1, 1, -1, 1), {20, 20}, obs);
  CHECK(m.num_active() == 400 - masked_cells(20, -1.0, 0.1, obs));
  CHECK(m.num_active() == 344);
  CHECK(std::abs(m.active_volume() - (4.0 - 0.56)) <= 1e-12);
  const SpaceTimeMesh st(m, 10);
  CHECK(st.num_cells() == 3440);

  // perimeter edge count of the masked grid, counted independently
  int perimeter = 0;
  for (int a = 0; a < m.num_active(); ++a) {
    const auto mi = m.multi_index(m.grid_index(a));
    const int nb[4][2] = {{mi[0] - 1, mi[1]}, {mi[0] + 1, mi[1]}, {mi[0], mi[1] - 1}, {mi[0], mi[1] + 1}};
    for (const auto& q : nb) {
      if (q[0] < 0 || q[0] >= 20 || q[1] < 0 || q[1] >= 20 || !m.is_active_grid(m.linear_index({q[0], q[1]}))) {
        ++perimeter;
      }
    }
  }
  // outer 80 - 2 * 4 under the edge obstacles, + 2 * 10 + 2 * 16 around the obstacles
  CHECK(perimeter == 124);
  CHECK(spatial_boundary_faces(m).size() == static_cast<std::size_t>(perimeter));
  CHECK(boundary_facets(st).size() == static_cast<std::size_t>(10 * perimeter));
}

TEST_CASE("misaligned obstacle is rejected") {
  const std::vector<Box> obs{box2(-0.25, 0.2, -1.0, -0.7)};
  try {
    build_spatial_mesh(box2(-1, 1, -1, 1), {20, 20}, obs);
    FAIL("expected AlignmentError");
  } catch (const AlignmentError& e) {
    CHECK(e.axis() == 0);
    CHECK(e.coordinate() == doctest::Approx(-0.25));
  }
}

TEST_CASE("index maps and neighbours") {
  const auto obs = obstacle_boxes();
  const SpatialMesh m = build_spatial_mesh(box2(-1, 1, -1, 1), {20, 20}, obs);
  std::map<std::pair<int, int>, int> interior_faces;
  for (int a = 0; a < m.num_active(); ++a) {
    const int g = m.grid_index(a);
    CHECK(m.active_index(g) == a);
    CHECK(m.linear_index(m.multi_index(g)) == g);
    for (int axis = 0; axis < 2; ++axis) {
      for (int side : {-1, 1}) {
        const int nb = m.neighbor(a, axis, side);
        if (nb >= 0) {
          CHECK(m.neighbor(nb, axis, -side) == a);
          ++interior_faces[{std::min(a, nb), std::max(a, nb)}];
        }
      }
    }
  }
  for (const auto& [key, count] : interior_faces) CHECK(count == 2);
  for (const auto& f : spatial_boundary_faces(m)) CHECK(m.neighbor(f.cell, f.axis, f.side) == -1);
}

TEST_CASE("space-time cells") {
  const SpatialMesh m = build_spatial_mesh(box1(0, 2), {4, 1});
  const SpaceTimeMesh st(m, 1);
  CHECK(st.num_intervals() == 1);
  const Box b = st.cell_box(st.cell_index(0, 3));
  CHECK(b.dim == 2);
  CHECK(b.lower[0] == 0.0);
  CHECK(b.upper[0] == 1.0);
  CHECK(b.lower[1] == doctest::Approx(1.5));
  CHECK(b.upper[1] == doctest::Approx(2.0));
  const SpaceTimeMesh st5(m, 5);
  CHECK(st5.interval_start(5 - 1) + st5.dt() == doctest::Approx(1.0));
}

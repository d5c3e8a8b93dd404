#pragma once

#include <string>
#include <vector>

#include "gravomg/mesh_io.hpp"

namespace corpus {

struct Entry {
  std::string name;
  gravomg::SurfaceData data;
};

/// Generated meshes: icospheres at subdivisions 2-5, tori, noisy variants
/// and an open grid.
std::vector<Entry> meshes();
/// Synthetic point clouds.
std::vector<Entry> clouds();
/// meshes() followed by clouds().
std::vector<Entry> all();

gravomg::Index vertex_count(const gravomg::SurfaceData& data);

}  // namespace corpus

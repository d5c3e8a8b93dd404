#pragma once

#include <array>
#include <filesystem>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "gravomg/sparse.hpp"

namespace gravomg {

using Vec3 = Eigen::Vector3d;
using Face = std::array<Index, 3>;
/// Unordered vertex pair, stored with first < second.
using Edge = std::pair<Index, Index>;

struct TriangleMesh {
  std::vector<Vec3> positions;
  std::vector<Face> faces;

  Index num_vertices() const { return static_cast<Index>(positions.size()); }
  Index num_faces() const { return static_cast<Index>(faces.size()); }

  /// Throws DimensionError on an out-of-range index or a face that repeats a vertex.
  void validate() const;
};

struct PointCloud {
  std::vector<Vec3> positions;
};

/// Points plus an undirected simple graph on them. Edges are deduplicated,
/// oriented (lo, hi), sorted, and free of self-loops; adjacency lists are
/// the same edge set indexed per vertex, each sorted ascending.
class SurfaceGraph {
public:
  SurfaceGraph() = default;
  SurfaceGraph(std::vector<Vec3> positions, std::vector<Edge> edges);

  Index num_vertices() const { return static_cast<Index>(positions_.size()); }
  Index num_edges() const { return static_cast<Index>(edges_.size()); }

  const std::vector<Vec3>& positions() const { return positions_; }
  const Vec3& position(Index i) const { return positions_[i]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Index>& neighbors(Index i) const { return adjacency_[i]; }

  double edge_length(Index i, Index j) const { return (positions_[i] - positions_[j]).norm(); }

private:
  std::vector<Vec3> positions_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Index>> adjacency_;
};

using SurfaceData = std::variant<TriangleMesh, PointCloud>;

/// ASCII Wavefront OBJ. Polygons are fan triangulated; faces that repeat a
/// vertex are dropped. Normals, texture coordinates and groups are ignored.
TriangleMesh load_obj(const std::filesystem::path& path);

/// ASCII or binary little-endian PLY. Returns a PointCloud when there is no
/// face element (or it is empty), a TriangleMesh otherwise.
SurfaceData load_ply(const std::filesystem::path& path);

/// Dispatches on the file extension (.obj / .ply).
SurfaceData load_surface(const std::filesystem::path& path);

void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path);

SurfaceGraph mesh_to_graph(const TriangleMesh& mesh);

inline constexpr int kDefaultKnn = 8;

/// Symmetrized k-nearest-neighbour graph: {i, j} is an edge when either
/// point selects the other. Distance ties go to the lower index.
SurfaceGraph knn_graph(const PointCloud& cloud, int k = kDefaultKnn);

/// Graph for either kind of input; point clouds use knn_graph(k).
SurfaceGraph surface_graph(const SurfaceData& data, int k = kDefaultKnn);

double average_edge_length(const SurfaceGraph& graph);

}  // namespace gravomg

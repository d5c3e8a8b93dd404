#include "gravomg/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "gravomg/errors.hpp"

namespace gravomg {

void TriangleMesh::validate() const {
  const Index n = num_vertices();
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Face& t = faces[f];
    for (Index v : t) {
      if (v < 0 || v >= n)
        throw DimensionError("face " + std::to_string(f) + " references vertex " + std::to_string(v) +
                             " of " + std::to_string(n));
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw DimensionError("face " + std::to_string(f) + " repeats a vertex");
  }
}

SurfaceGraph::SurfaceGraph(std::vector<Vec3> positions, std::vector<Edge> edges)
    : positions_(std::move(positions)) {
  const Index n = num_vertices();
  edges_.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw DimensionError("edge (" + std::to_string(a) + ", " + std::to_string(b) + ") out of range");
    if (a == b) continue;
    edges_.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  adjacency_.assign(static_cast<std::size_t>(n), {});
  for (auto [a, b] : edges_) {
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  for (auto& list : adjacency_) std::sort(list.begin(), list.end());
}

namespace {

std::string trim(const std::string& s) {
  auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

void append_fan(const std::vector<Index>& polygon, std::vector<Face>& faces) {
  for (std::size_t k = 1; k + 1 < polygon.size(); ++k) {
    Face f{polygon[0], polygon[k], polygon[k + 1]};
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) continue;
    faces.push_back(f);
  }
}

// ---------------------------------------------------------------- PLY

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::optional<PlyType> parse_ply_type(const std::string& name) {
  if (name == "char" || name == "int8") return PlyType::Int8;
  if (name == "uchar" || name == "uint8") return PlyType::UInt8;
  if (name == "short" || name == "int16") return PlyType::Int16;
  if (name == "ushort" || name == "uint16") return PlyType::UInt16;
  if (name == "int" || name == "int32") return PlyType::Int32;
  if (name == "uint" || name == "uint32") return PlyType::UInt32;
  if (name == "float" || name == "float32") return PlyType::Float32;
  if (name == "double" || name == "float64") return PlyType::Float64;
  return std::nullopt;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::Float32;
  bool is_list = false;
  PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;

  std::optional<std::size_t> find(std::string_view prop) const {
    for (std::size_t i = 0; i < properties.size(); ++i)
      if (properties[i].name == prop) return i;
    return std::nullopt;
  }
};

class PlyBody {
public:
  PlyBody(std::istream& in, bool binary) : in_(in), binary_(binary) {}

  double read(PlyType type, const std::string& element) {
    return binary_ ? read_binary(type, element) : read_ascii(element);
  }

private:
  double read_ascii(const std::string& element) {
    double v;
    if (!(in_ >> v)) throw ParseError("PLY body ended early while reading element '" + element + "'");
    return v;
  }

  template <typename T>
  T read_raw(const std::string& element) {
    unsigned char bytes[sizeof(T)];
    if (!in_.read(reinterpret_cast<char*>(bytes), sizeof(T)))
      throw ParseError("PLY body ended early while reading element '" + element + "'");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T v;
    std::memcpy(&v, bytes, sizeof(T));
    return v;
  }

  double read_binary(PlyType type, const std::string& element) {
    switch (type) {
      case PlyType::Int8: return read_raw<std::int8_t>(element);
      case PlyType::UInt8: return read_raw<std::uint8_t>(element);
      case PlyType::Int16: return read_raw<std::int16_t>(element);
      case PlyType::UInt16: return read_raw<std::uint16_t>(element);
      case PlyType::Int32: return read_raw<std::int32_t>(element);
      case PlyType::UInt32: return read_raw<std::uint32_t>(element);
      case PlyType::Float32: return read_raw<float>(element);
      case PlyType::Float64: return read_raw<double>(element);
    }
    return 0.0;
  }

  std::istream& in_;
  bool binary_;
};

}  // namespace

TriangleMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());

  TriangleMesh mesh;
  std::vector<std::size_t> face_lines;
  std::string line;
  std::size_t line_no = 0;
  std::vector<Index> polygon;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string tag;
    if (!(tokens >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(tokens >> p.x() >> p.y() >> p.z())) throw ParseError("malformed vertex record", line_no);
      if (!p.allFinite()) throw ParseError("non-finite vertex coordinate", line_no);
      mesh.positions.push_back(p);
    } else if (tag == "f") {
      polygon.clear();
      std::string corner;
      while (tokens >> corner) {
        // "i", "i/t", "i//n", "i/t/n": only the position index matters.
        std::string head = corner.substr(0, corner.find('/'));
        long long idx = 0;
        try {
          std::size_t used = 0;
          idx = std::stoll(head, &used);
          if (used != head.size()) throw std::invalid_argument(head);
        } catch (const std::exception&) {
          throw ParseError("malformed face index '" + corner + "'", line_no);
        }
        if (idx == 0) throw ParseError("face index 0 is invalid (OBJ indices are 1-based)", line_no);
        // Negative indices count back from the most recent vertex.
        Index resolved = idx > 0 ? static_cast<Index>(idx - 1) : mesh.num_vertices() + static_cast<Index>(idx);
        polygon.push_back(resolved);
      }
      if (polygon.size() < 3) throw ParseError("face with fewer than 3 vertices", line_no);
      append_fan(polygon, mesh.faces);
      face_lines.resize(mesh.faces.size(), line_no);
    }
  }
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    for (Index v : mesh.faces[f]) {
      if (v < 0 || v >= mesh.num_vertices())
        throw ParseError("face index " + std::to_string(v + 1) + " out of range (" +
                             std::to_string(mesh.num_vertices()) + " vertices)",
                         face_lines[f]);
    }
  }
  return mesh;
}

SurfaceData load_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());

  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || trim(line) != "ply") throw ParseError("missing 'ply' magic", 1);

  bool binary = false;
  bool have_format = false;
  std::vector<PlyElement> elements;
  bool header_done = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(trim(line));
    std::string keyword;
    if (!(tokens >> keyword)) continue;
    if (keyword == "format") {
      std::string encoding, version;
      tokens >> encoding >> version;
      if (encoding == "ascii") {
        binary = false;
      } else if (encoding == "binary_little_endian") {
        binary = true;
      } else {
        throw UnsupportedFormatError("unsupported PLY encoding '" + encoding + "'", line_no);
      }
      have_format = true;
    } else if (keyword == "comment" || keyword == "obj_info") {
      continue;
    } else if (keyword == "element") {
      PlyElement e;
      long long count = -1;
      if (!(tokens >> e.name >> count) || count < 0) throw ParseError("malformed element line", line_no);
      e.count = static_cast<std::size_t>(count);
      elements.push_back(std::move(e));
    } else if (keyword == "property") {
      if (elements.empty()) throw ParseError("property before any element", line_no);
      PlyProperty prop;
      std::string type_name;
      if (!(tokens >> type_name)) throw ParseError("malformed property line", line_no);
      if (type_name == "list") {
        std::string count_name, item_name;
        if (!(tokens >> count_name >> item_name >> prop.name))
          throw ParseError("malformed list property", line_no);
        auto count_type = parse_ply_type(count_name);
        auto item_type = parse_ply_type(item_name);
        if (!count_type || !item_type)
          throw UnsupportedFormatError("unsupported list property type in '" + trim(line) + "'", line_no);
        prop.is_list = true;
        prop.count_type = *count_type;
        prop.type = *item_type;
      } else {
        auto type = parse_ply_type(type_name);
        if (!type) throw UnsupportedFormatError("unsupported property type '" + type_name + "'", line_no);
        if (!(tokens >> prop.name)) throw ParseError("property without a name", line_no);
        prop.type = *type;
      }
      elements.back().properties.push_back(std::move(prop));
    } else if (keyword == "end_header") {
      header_done = true;
      break;
    } else {
      throw ParseError("unknown PLY header keyword '" + keyword + "'", line_no);
    }
  }
  if (!header_done) throw ParseError("PLY header has no end_header", line_no);
  if (!have_format) throw ParseError("PLY header has no format line", line_no);

  const PlyElement* vertex_element = nullptr;
  const PlyElement* face_element = nullptr;
  for (const auto& e : elements) {
    if (e.name == "vertex") vertex_element = &e;
    if (e.name == "face") face_element = &e;
  }
  if (!vertex_element) throw ParseError("PLY has no vertex element");
  std::size_t axis[3];
  const char* axis_names[3] = {"x", "y", "z"};
  for (int a = 0; a < 3; ++a) {
    auto found = vertex_element->find(axis_names[a]);
    if (!found) throw ParseError(std::string("PLY vertex element lacks property '") + axis_names[a] + "'");
    if (vertex_element->properties[*found].is_list)
      throw UnsupportedFormatError(std::string("PLY vertex property '") + axis_names[a] + "' is a list");
    axis[a] = *found;
  }
  std::optional<std::size_t> index_prop;
  if (face_element) {
    index_prop = face_element->find("vertex_indices");
    if (!index_prop) index_prop = face_element->find("vertex_index");
    if (!index_prop || !face_element->properties[*index_prop].is_list)
      throw UnsupportedFormatError("PLY face element lacks a vertex_indices list");
  }

  PlyBody body(in, binary);
  std::vector<Vec3> positions;
  std::vector<Face> faces;
  std::vector<double> scalars;
  std::vector<Index> polygon;
  for (const auto& e : elements) {
    const bool is_vertex = &e == vertex_element;
    const bool is_face = &e == face_element;
    if (is_vertex) positions.reserve(e.count);
    for (std::size_t item = 0; item < e.count; ++item) {
      scalars.assign(e.properties.size(), 0.0);
      for (std::size_t p = 0; p < e.properties.size(); ++p) {
        const PlyProperty& prop = e.properties[p];
        if (!prop.is_list) {
          scalars[p] = body.read(prop.type, e.name);
          continue;
        }
        const double count = body.read(prop.count_type, e.name);
        if (count < 0 || count != std::floor(count)) throw ParseError("bad list length in element '" + e.name + "'");
        const bool keep = is_face && index_prop && p == *index_prop;
        if (keep) polygon.clear();
        for (long long k = 0; k < static_cast<long long>(count); ++k) {
          const double v = body.read(prop.type, e.name);
          if (keep) polygon.push_back(static_cast<Index>(v));
        }
        if (keep) {
          if (polygon.size() < 3) throw ParseError("PLY face " + std::to_string(item) + " has fewer than 3 vertices");
          append_fan(polygon, faces);
        }
      }
      if (is_vertex) {
        Vec3 pos(scalars[axis[0]], scalars[axis[1]], scalars[axis[2]]);
        if (!pos.allFinite()) throw ParseError("non-finite PLY vertex " + std::to_string(item));
        positions.push_back(pos);
      }
    }
  }

  if (!face_element || face_element->count == 0) {
    if (positions.empty()) throw DegenerateInputError("PLY point cloud has no points");
    return PointCloud{std::move(positions)};
  }
  TriangleMesh mesh{std::move(positions), std::move(faces)};
  for (std::size_t f = 0; f < mesh.faces.size(); ++f)
    for (Index v : mesh.faces[f])
      if (v < 0 || v >= mesh.num_vertices())
        throw ParseError("PLY face index " + std::to_string(v) + " out of range (" +
                         std::to_string(mesh.num_vertices()) + " vertices)");
  return mesh;
}

SurfaceData load_surface(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".obj") return load_obj(path);
  if (ext == ".ply") return load_ply(path);
  throw UnsupportedFormatError("unrecognized input extension '" + ext + "' (expected .obj or .ply)");
}

void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(17);
  for (const Vec3& p : mesh.positions) out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const Face& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

SurfaceGraph mesh_to_graph(const TriangleMesh& mesh) {
  mesh.validate();
  std::vector<Edge> edges;
  edges.reserve(mesh.faces.size() * 3);
  for (const Face& f : mesh.faces) {
    edges.emplace_back(f[0], f[1]);
    edges.emplace_back(f[1], f[2]);
    edges.emplace_back(f[2], f[0]);
  }
  return SurfaceGraph(mesh.positions, std::move(edges));
}

SurfaceGraph knn_graph(const PointCloud& cloud, int k) {
  const Index n = static_cast<Index>(cloud.positions.size());
  if (n < 2) throw DegenerateInputError("k-nearest-neighbour graph needs at least 2 points");
  if (k < 1 || k >= n)
    throw DimensionError("k = " + std::to_string(k) + " must satisfy 1 <= k < " + std::to_string(n));
  for (const Vec3& p : cloud.positions)
    if (!p.allFinite()) throw DegenerateInputError("point cloud has a non-finite coordinate");

  // Brute force; fine for the point counts this library targets per call.
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * k);
  std::vector<std::pair<double, Index>> candidates(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      candidates[c++] = {(cloud.positions[i] - cloud.positions[j]).squaredNorm(), j};
    }
    std::partial_sort(candidates.begin(), candidates.begin() + k, candidates.end());
    for (int m = 0; m < k; ++m) edges.emplace_back(i, candidates[m].second);
  }
  return SurfaceGraph(cloud.positions, std::move(edges));
}

SurfaceGraph surface_graph(const SurfaceData& data, int k) {
  if (const auto* mesh = std::get_if<TriangleMesh>(&data)) return mesh_to_graph(*mesh);
  return knn_graph(std::get<PointCloud>(data), k);
}

double average_edge_length(const SurfaceGraph& graph) {
  if (graph.num_edges() == 0) throw DegenerateInputError("average edge length of a graph without edges");
  double sum = 0.0;
  for (auto [a, b] : graph.edges()) sum += graph.edge_length(a, b);
  return sum / static_cast<double>(graph.num_edges());
}

}  // namespace gravomg

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include "gravomg/errors.hpp"
#include "gravomg/mesh_io.hpp"
#include "gravomg/shapes.hpp"
#include "support/oracles.hpp"

using namespace gravomg;

namespace {

std::filesystem::path write(const std::string& name, const std::string& text) {
  static const auto dir = oracle::scratch_dir("mesh_io");
  oracle::write_file(dir / name, text);
  return dir / name;
}

const char* kTriangle = "v 0 0 0\nv 1 0 0\nv 0 1 0\n";

}  // namespace

TEST_CASE("load_obj") {
  SUBCASE("minimal triangle") {
    TriangleMesh m = load_obj(write("tri.obj", std::string(kTriangle) + "f 1 2 3\n"));
    CHECK(m.num_vertices() == 3);
    REQUIRE(m.num_faces() == 1);
    CHECK(m.faces[0] == Face{0, 1, 2});
  }
  SUBCASE("quad is fan triangulated") {
    TriangleMesh m = load_obj(write("quad.obj", std::string(kTriangle) + "v 1 1 0\nf 1 2 3 4\n"));
    REQUIRE(m.num_faces() == 2);
    CHECK(m.faces[0] == Face{0, 1, 2});
    CHECK(m.faces[1] == Face{0, 2, 3});
  }
  SUBCASE("out-of-range index names the face line") {
    try {
      load_obj(write("bad.obj", std::string(kTriangle) + "# comment\nf 1 2 9\n"));
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 5);
      CHECK(std::string(e.what()).find("line 5") != std::string::npos);
    }
  }
  SUBCASE("texture and normal references, negative indices, comments") {
    TriangleMesh m = load_obj(write("vtn.obj", std::string(kTriangle) +
                                                   "vn 0 0 1\nvt 0 0\n# c\ng group\nf -3/1/1 -2/1/1 -1//1\n"));
    REQUIRE(m.num_faces() == 1);
    CHECK(m.faces[0] == Face{0, 1, 2});
  }
  SUBCASE("faces repeating a vertex are dropped") {
    TriangleMesh m = load_obj(write("rep.obj", std::string(kTriangle) + "f 1 1 2\nf 1 2 3\n"));
    CHECK(m.num_faces() == 1);
  }
  SUBCASE("malformed records") {
    CHECK_THROWS_AS(load_obj(write("m1.obj", "v 0 0\n")), ParseError);
    CHECK_THROWS_AS(load_obj(write("m2.obj", std::string(kTriangle) + "f 1 2\n")), ParseError);
    CHECK_THROWS_AS(load_obj(write("m3.obj", std::string(kTriangle) + "f 1 x 3\n")), ParseError);
    CHECK_THROWS_AS(load_obj(write("m4.obj", std::string(kTriangle) + "f 0 1 2\n")), ParseError);
    CHECK_THROWS_AS(load_obj("/nonexistent/file.obj"), ParseError);
  }
}

TEST_CASE("load_ply") {
  const std::string header4 = "ply\nformat ascii 1.0\nelement vertex 4\nproperty float x\nproperty float y\n"
                              "property float z\n";
  const std::string body4 = "0 0 0\n1 0 0\n0 1 0\n1 1 0\n";
  SUBCASE("no face element gives a point cloud") {
    SurfaceData d = load_ply(write("pc.ply", header4 + "end_header\n" + body4));
    REQUIRE(std::holds_alternative<PointCloud>(d));
    CHECK(std::get<PointCloud>(d).positions.size() == 4);
  }
  SUBCASE("zero faces gives a point cloud") {
    SurfaceData d = load_ply(
        write("pc0.ply", header4 + "element face 0\nproperty list uchar int vertex_indices\nend_header\n" + body4));
    CHECK(std::holds_alternative<PointCloud>(d));
  }
  SUBCASE("two faces give a mesh") {
    SurfaceData d = load_ply(write("m.ply", header4 + "element face 2\nproperty list uchar int vertex_indices\n"
                                                      "end_header\n" + body4 + "3 0 1 2\n3 1 3 2\n"));
    REQUIRE(std::holds_alternative<TriangleMesh>(d));
    CHECK(std::get<TriangleMesh>(d).num_faces() == 2);
  }
  SUBCASE("body shorter than the header claims") {
    const std::string h10 = "ply\nformat ascii 1.0\nelement vertex 10\nproperty float x\nproperty float y\n"
                            "property float z\nend_header\n";
    std::string body;
    for (int i = 0; i < 9; ++i) body += "0 0 " + std::to_string(i) + "\n";
    CHECK_THROWS_AS(load_ply(write("short.ply", h10 + body)), ParseError);
  }
  SUBCASE("unsupported features") {
    CHECK_THROWS_AS(load_ply(write("be.ply", "ply\nformat binary_big_endian 1.0\nelement vertex 0\nend_header\n")),
                    UnsupportedFormatError);
    CHECK_THROWS_AS(load_ply(write("ty.ply", "ply\nformat ascii 1.0\nelement vertex 1\nproperty quad x\n"
                                             "end_header\n0\n")),
                    UnsupportedFormatError);
    CHECK_THROWS_AS(load_ply(write("nomagic.ply", "plx\n")), ParseError);
    CHECK_THROWS_AS(load_ply(write("noend.ply", "ply\nformat ascii 1.0\nelement vertex 1\n")), ParseError);
  }
  SUBCASE("binary little endian with extra properties") {
    const auto path = std::filesystem::path(write("bin.ply", ""));
    std::ofstream out(path, std::ios::binary);
    out << "ply\nformat binary_little_endian 1.0\nelement vertex 3\nproperty double x\nproperty float y\n"
           "property float z\nproperty uchar red\nelement face 1\nproperty list uchar uint vertex_indices\n"
           "end_header\n";
    for (int i = 0; i < 3; ++i) {
      double x = i;
      float y = static_cast<float>(i * 2), z = 0.5f;
      unsigned char red = 7;
      out.write(reinterpret_cast<const char*>(&x), sizeof x);
      out.write(reinterpret_cast<const char*>(&y), sizeof y);
      out.write(reinterpret_cast<const char*>(&z), sizeof z);
      out.write(reinterpret_cast<const char*>(&red), 1);
    }
    unsigned char count = 3;
    out.write(reinterpret_cast<const char*>(&count), 1);
    for (std::uint32_t v : {0u, 1u, 2u}) out.write(reinterpret_cast<const char*>(&v), sizeof v);
    out.close();
    SurfaceData d = load_ply(path);
    REQUIRE(std::holds_alternative<TriangleMesh>(d));
    const auto& m = std::get<TriangleMesh>(d);
    CHECK(m.positions[2] == Vec3(2.0, 4.0, 0.5));
    CHECK(m.faces[0] == Face{0, 1, 2});
  }
}

TEST_CASE("mesh_to_graph") {
  TriangleMesh one{{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {{0, 1, 2}}};
  CHECK(mesh_to_graph(one).num_edges() == 3);
  TriangleMesh two = one;
  two.positions.emplace_back(1, 1, 0);
  two.faces.push_back({1, 3, 2});
  CHECK(mesh_to_graph(two).num_edges() == 5);

  const TriangleMesh ico = shapes::icosphere(2);
  SurfaceGraph g = mesh_to_graph(ico);
  CHECK(g.num_vertices() == 162);
  CHECK(ico.num_faces() == 320);
  CHECK(g.num_vertices() - g.num_edges() + ico.num_faces() == 2);
  CHECK(g.num_edges() == 480);
}

TEST_CASE("property: graph adjacency is symmetric and matches the edge set") {
  for (const TriangleMesh& mesh : {shapes::icosphere(3), shapes::torus(1.0, 0.3, 20, 10), shapes::grid(7, 5)}) {
    SurfaceGraph g = mesh_to_graph(mesh);
    std::size_t half_edges = 0;
    for (Index i = 0; i < g.num_vertices(); ++i) {
      const auto& adj = g.neighbors(i);
      CHECK(std::is_sorted(adj.begin(), adj.end()));
      for (Index j : adj) {
        CHECK(j != i);
        const auto& back = g.neighbors(j);
        CHECK(std::binary_search(back.begin(), back.end(), i));
        CHECK(std::binary_search(g.edges().begin(), g.edges().end(), Edge{std::min(i, j), std::max(i, j)}));
      }
      half_edges += adj.size();
    }
    CHECK(half_edges == 2 * g.edges().size());
  }
}

TEST_CASE("knn_graph") {
  PointCloud line{{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)}};
  SurfaceGraph g = knn_graph(line, 1);
  CHECK(g.edges() == std::vector<Edge>{{0, 1}, {1, 2}});

  PointCloud cloud = shapes::fibonacci_sphere(12);
  CHECK(knn_graph(cloud, 11).num_edges() == 66);

  SUBCASE("duplicates still give a valid graph") {
    PointCloud dup{{Vec3(0, 0, 0), Vec3(0, 0, 0), Vec3(0, 0, 0), Vec3(5, 0, 0)}};
    SurfaceGraph d = knn_graph(dup, 1);
    // 0 and 1 pick each other (index tie-break), 2 picks 0, 3 picks 0.
    CHECK(d.edges() == std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}});
  }
  SUBCASE("degree is at least one") {
    SurfaceGraph s = knn_graph(shapes::random_torus_points(1.0, 0.3, 300, 4), 1);
    for (Index i = 0; i < s.num_vertices(); ++i) CHECK(!s.neighbors(i).empty());
  }
  CHECK_THROWS_AS(knn_graph(PointCloud{{Vec3(0, 0, 0)}}, 1), DegenerateInputError);
  CHECK_THROWS_AS(knn_graph(line, 3), DimensionError);
  CHECK_THROWS_AS(knn_graph(line, 0), DimensionError);
}

TEST_CASE("average_edge_length") {
  CHECK(average_edge_length(oracle::unit_path(3)) == 1.0);
  SurfaceGraph two({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(4, 0, 0)}, {{0, 1}, {1, 2}});
  CHECK(average_edge_length(two) == 2.0);
  const double s = 0.7;
  TriangleMesh tri{{Vec3(0, 0, 0), Vec3(s, 0, 0), Vec3(s / 2, s * std::sqrt(3.0) / 2, 0)}, {{0, 1, 2}}};
  CHECK(average_edge_length(mesh_to_graph(tri)) == doctest::Approx(s).epsilon(1e-15));
  CHECK_THROWS_AS(average_edge_length(SurfaceGraph({Vec3(0, 0, 0)}, {})), DegenerateInputError);
}

TEST_CASE("property: OBJ write and reload round trip") {
  auto dir = oracle::scratch_dir("roundtrip");
  for (const TriangleMesh& mesh : {shapes::perturbed(shapes::icosphere(2), 0.2, 9), shapes::torus(2.0, 0.5, 9, 7)}) {
    write_obj(mesh, dir / "m.obj");
    TriangleMesh back = load_obj(dir / "m.obj");
    REQUIRE(back.num_vertices() == mesh.num_vertices());
    REQUIRE(back.num_faces() == mesh.num_faces());
    for (Index i = 0; i < mesh.num_vertices(); ++i) CHECK((back.positions[i] - mesh.positions[i]).norm() <= 1e-6);
    CHECK(back.faces == mesh.faces);
  }
}

TEST_CASE("load_surface dispatches on the extension") {
  CHECK(std::holds_alternative<TriangleMesh>(load_surface(write("d.obj", std::string(kTriangle) + "f 1 2 3\n"))));
  CHECK_THROWS_AS(load_surface(write("d.stl", "solid")), UnsupportedFormatError);
}

TEST_CASE("TriangleMesh::validate") {
  TriangleMesh m{{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {{0, 1, 3}}};
  CHECK_THROWS_AS(m.validate(), DimensionError);
  m.faces = {{0, 1, 1}};
  CHECK_THROWS_AS(m.validate(), DimensionError);
  m.faces = {{0, 1, 2}};
  CHECK_NOTHROW(m.validate());
}

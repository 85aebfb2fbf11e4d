#include <catch_amalgamated.hpp>

#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "trussprec/generators.hpp"
#include "trussprec/io.hpp"
#include "trussprec/rigidity.hpp"
#include "trussprec/truss.hpp"

using namespace trussprec;
using Catch::Matchers::WithinAbs;

namespace {

Truss bowtie() {
  std::vector<Vec2> p{{0, 0}, {0, 1}, {1, 0.5}, {2, 0}, {2, 1}};
  std::vector<Element> e{{0, 1, 1}, {0, 2, 1}, {1, 2, 1}, {2, 3, 1}, {2, 4, 1}, {3, 4, 1}};
  return Truss(p, e);
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kInvalidInput;
}

}  // namespace

TEST_CASE("faces are inferred from 3-cycles") {
  // 2x2 cells, 9 vertices, both-direction counts worked by hand
  Truss grid = gen_grid(3, 3);
  std::vector<Element> elements(grid.elements().begin(), grid.elements().end());
  auto faces = infer_faces(grid.positions(), elements);
  CHECK(faces.size() == 8);
  for (const auto& f : faces) CHECK(std::is_sorted(f.begin(), f.end()));
  CHECK(std::is_sorted(faces.begin(), faces.end()));

  std::vector<Vec2> quad{{0, 0}, {1, 0}, {1.2, 1}, {0, 0.9}};
  std::vector<Element> cycle{{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 3, 1}};
  CHECK(infer_faces(quad, cycle).empty());

  // triangle with a hub: the outer 3-cycle holds a vertex, so only 3 faces
  std::vector<Vec2> hub{{0, 0}, {3, 0}, {1, 2}, {1.3, 0.7}};
  std::vector<Element> spokes{{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {0, 3, 1}, {1, 3, 1}, {2, 3, 1}};
  auto hf = infer_faces(hub, spokes);
  CHECK(hf == std::vector<Face>{{0, 1, 3}, {0, 2, 3}, {1, 2, 3}});
}

TEST_CASE("collinear triangle is rejected") {
  std::vector<Vec2> p{{0, 0}, {1, 0}, {2, 0}};
  std::vector<Element> e{{0, 1, 1}, {1, 2, 1}, {0, 2, 1}};
  CHECK(code_of([&] { infer_faces(p, e); }) == ErrorCode::kDegenerateFace);
}

TEST_CASE("truss validation") {
  std::vector<Vec2> tri{{0, 0}, {1, 0}, {0, 1}};
  std::vector<Element> ok{{0, 1, 1}, {1, 2, 1}, {0, 2, 1}};
  CHECK_NOTHROW(Truss(tri, ok));

  std::vector<Vec2> twin{{0, 0}, {0, 0}, {0, 1}};
  CHECK(code_of([&] { Truss(twin, ok); }) == ErrorCode::kZeroLengthElement);

  auto dup = ok;
  dup.push_back({1, 0, 2.0});
  CHECK(code_of([&] { Truss(tri, dup); }) == ErrorCode::kInvalidInput);

  auto soft = ok;
  soft[0].gamma = 0.0;
  CHECK(code_of([&] { Truss(tri, soft); }) == ErrorCode::kInvalidInput);

  std::vector<Vec2> four{{0, 0}, {1, 0}, {0, 1}, {3, 3}};
  auto dangling = ok;
  dangling.push_back({2, 3, 1});
  CHECK(code_of([&] { Truss(four, dangling); }) == ErrorCode::kInvalidInput);

  // explicit face covering a vertex
  std::vector<Vec2> hub{{0, 0}, {3, 0}, {1, 2}, {1.3, 0.7}};
  std::vector<Element> spokes{{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {0, 3, 1}, {1, 3, 1}, {2, 3, 1}};
  std::vector<Face> covering{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  CHECK(code_of([&] { Truss(hub, spokes, covering); }) == ErrorCode::kInvalidInput);

  std::vector<Element> partial{{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {0, 3, 1}, {1, 3, 1}};
  CHECK(code_of([&] { Truss(hub, partial, std::vector<Face>{{0, 1, 3}, {0, 1, 2}, {1, 2, 3}}); }) ==
        ErrorCode::kInvalidInput);
}

TEST_CASE("element endpoints are stored in ascending order") {
  std::vector<Vec2> tri{{0, 0}, {1, 0}, {0, 1}};
  Truss t(tri, {{1, 0, 1}, {2, 1, 1}, {2, 0, 1}});
  for (const auto& e : t.elements()) CHECK(e.i < e.j);
  CHECK(t.find_element(0, 2).has_value());
  CHECK(t.find_element(2, 0) == t.find_element(0, 2));
}

TEST_CASE("rigidity graph of the 2x2 grid") {
  Truss grid = gen_grid(3, 3);
  RigidityGraph q(grid);
  CHECK(q.node_count() == 8);
  CHECK(q.edge_count() == 8);
  for (int e = 0; e < q.edge_count(); ++e) {
    const auto& fe = q.graph().edge(e);
    const auto& a = grid.face(fe.u);
    const auto& b = grid.face(fe.v);
    std::set<int> common;
    for (int x : a)
      if (std::find(b.begin(), b.end(), x) != b.end()) common.insert(x);
    REQUIRE(common.size() == 2);
    const auto& el = grid.element(q.shared_element(e));
    CHECK(common == std::set<int>{el.i, el.j});
  }
}

TEST_CASE("stiff connectivity") {
  auto bt = bowtie();
  auto sc = is_stiffly_connected(bt);
  CHECK_FALSE(sc.stiffly_connected);
  REQUIRE(sc.witness_vertex.has_value());
  CHECK(*sc.witness_vertex == 2);

  CHECK(is_stiffly_connected(gen_grid(5, 5)).stiffly_connected);
  CHECK(is_stiffly_connected(gen_path(7)).stiffly_connected);

  // two triangles joined by one element only at a vertex pair: fine
  // two disjoint triangles: rigidity graph disconnected
  std::vector<Vec2> p{{0, 0}, {1, 0}, {0, 1}, {5, 0}, {6, 0}, {5, 1}};
  Truss apart(p, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1}, {3, 5, 1}});
  auto s2 = is_stiffly_connected(apart);
  CHECK_FALSE(s2.stiffly_connected);
  CHECK_FALSE(s2.witness_vertex.has_value());
}

TEST_CASE("grid and path generators") {
  Truss g22 = gen_grid(2, 2);
  CHECK(g22.vertex_count() == 4);
  CHECK(g22.element_count() == 5);
  CHECK(g22.face_count() == 2);

  Truss g33 = gen_grid(3, 3);
  CHECK(g33.vertex_count() == 9);
  CHECK(g33.element_count() == 16);
  CHECK(g33.face_count() == 8);

  for (int r : {2, 4, 7})
    for (int c : {2, 3, 6}) {
      Truss g = gen_grid(r, c);
      CHECK(g.element_count() == r * (c - 1) + c * (r - 1) + (r - 1) * (c - 1));
      CHECK(g.face_count() == 2 * (r - 1) * (c - 1));
    }

  Truss p10 = gen_path(10);
  CHECK(p10.vertex_count() == 12);
  CHECK(p10.element_count() == 21);
  CHECK(p10.face_count() == 10);
  CHECK(gen_path(11).vertex_count() == 13);

  auto q = quality_bounds(gen_path(5));
  CHECK_THAT(degrees(q.theta_min), WithinAbs(60.0, 1e-9));
  CHECK_THAT(q.length_min, WithinAbs(1.0, 1e-12));
  CHECK_THAT(q.length_max, WithinAbs(1.0, 1e-12));
}

TEST_CASE("jittered grids keep their quality and structure") {
  for (unsigned long long seed = 1; seed <= 10; ++seed) {
    Truss g = gen_grid(8, 6, 0.3, seed);
    auto q = quality_bounds(g);
    CHECK(degrees(q.theta_min) >= 20.0);
    CHECK(is_stiffly_connected(g).stiffly_connected);
    // the explicit faces agree with the inferred ones
    std::vector<Element> el(g.elements().begin(), g.elements().end());
    auto inferred = infer_faces(g.positions(), el);
    std::vector<Face> given(g.faces().begin(), g.faces().end());
    std::sort(given.begin(), given.end());
    CHECK(inferred == given);
  }
  // same seed, same truss
  Truss a = gen_grid(5, 5, 0.25, 42), b = gen_grid(5, 5, 0.25, 42);
  for (int v = 0; v < a.vertex_count(); ++v) CHECK(a.position(v) == b.position(v));
}

TEST_CASE("every element lies in one or two faces on generated trusses") {
  for (const Truss& t : {gen_grid(6, 5, 0.2, 3), gen_path(9), curled_path(12)}) {
    std::vector<int> count(t.element_count(), 0);
    for (int f = 0; f < t.face_count(); ++f)
      for (int e : t.face_elements(f)) ++count[e];
    for (int c : count) CHECK((c == 1 || c == 2));
  }
}

TEST_CASE("truss text format round trip") {
  Truss g = gen_grid(4, 3, 0.2, 9);
  std::stringstream ss;
  write_truss(ss, g);
  Truss back = read_truss(ss);
  REQUIRE(back.vertex_count() == g.vertex_count());
  REQUIRE(back.element_count() == g.element_count());
  REQUIRE(back.face_count() == g.face_count());
  for (int v = 0; v < g.vertex_count(); ++v) CHECK(back.position(v) == g.position(v));
  for (int e = 0; e < g.element_count(); ++e) {
    CHECK(back.element(e).i == g.element(e).i);
    CHECK(back.element(e).j == g.element(e).j);
    CHECK(back.element(e).gamma == g.element(e).gamma);
  }
  for (int f = 0; f < g.face_count(); ++f) CHECK(back.face(f) == g.face(f));
}

TEST_CASE("truss reader errors and inference") {
  std::istringstream bad("v 0 0\nv 1 0\nq 1 2\n");
  CHECK(code_of([&] { read_truss(bad); }) == ErrorCode::kParse);
  std::istringstream shortline("v 0\n");
  CHECK(code_of([&] { read_truss(shortline); }) == ErrorCode::kParse);

  std::istringstream noface("# triangle\nv 0 0\nv 1 0 # corner\nv 0 1\n\ne 0 1 1\ne 1 2 2.5\ne 0 2 1\n");
  Truss t = read_truss(noface);
  CHECK(t.face_count() == 1);
  CHECK(t.element(1).gamma == 2.5);
}

#include <catch_amalgamated.hpp>

#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "trussprec/fretsaw.hpp"
#include "trussprec/generators.hpp"
#include "trussprec/io.hpp"
#include "trussprec/tree.hpp"

using namespace trussprec;

namespace {

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

// copies of v = components of the faces around v, two faces joined when an
// H edge between them shares an element through v. Brute force flood fill.
int expected_copies(const Truss& t, const RigidityGraph& q, const std::vector<int>& h) {
  int total = 0;
  for (int v = 0; v < t.vertex_count(); ++v) {
    std::vector<int> fs;
    for (int f = 0; f < t.face_count(); ++f) {
      const auto& face = t.face(f);
      if (std::find(face.begin(), face.end(), v) != face.end()) fs.push_back(f);
    }
    std::map<int, int> comp;
    int count = 0;
    for (int start : fs) {
      if (comp.count(start)) continue;
      ++count;
      std::vector<int> stack{start};
      comp[start] = count;
      while (!stack.empty()) {
        int f = stack.back();
        stack.pop_back();
        for (int e : h) {
          const auto& fe = q.graph().edge(e);
          if (fe.u != f && fe.v != f) continue;
          int g = fe.u == f ? fe.v : fe.u;
          const auto& el = t.element(q.shared_element(e));
          if (el.i != v && el.j != v) continue;
          if (!comp.count(g)) {
            comp[g] = count;
            stack.push_back(g);
          }
        }
      }
    }
    total += count;
  }
  return total;
}

std::vector<int> all_edges(const RigidityGraph& q) {
  std::vector<int> e(q.edge_count());
  std::iota(e.begin(), e.end(), 0);
  return e;
}

}  // namespace

TEST_CASE("full rigidity graph leaves the truss unsplit") {
  Truss t = gen_grid(5, 5, 0.2, 4);
  RigidityGraph q(t);
  auto tau = default_tau(t);
  auto ext = fretsaw(t, q, all_edges(q), tau);
  CHECK(ext.copy_count() == t.vertex_count());
  CHECK(ext.extended.element_count() == t.element_count());
  for (int f = 0; f < t.face_count(); ++f) CHECK(ext.extended.face(f) == t.face(f));
  auto props = check_fretsaw(t, q, all_edges(q), tau, ext);
  CHECK(props.ok());
  CHECK(props.edges_outside_subgraph == 0);
}

TEST_CASE("spanning trees split vertices by the component count") {
  for (unsigned seed : {1u, 2u, 3u}) {
    Truss t = gen_grid(6, 7, 0.25, seed);
    RigidityGraph q(t);
    auto tau = default_tau(t);
    for (const auto& h : {bfs_tree(q.graph(), 0), spanning_tree_low_stretch(q.graph()),
                          bfs_tree(q.graph(), q.node_count() - 1)}) {
      auto ext = fretsaw(t, q, h, tau);
      CHECK(ext.copy_count() == expected_copies(t, q, h));
      CHECK(ext.copy_count() > t.vertex_count());
      auto props = check_fretsaw(t, q, h, tau, ext);
      CHECK(props.anchors_kept);
      CHECK(props.subgraph_preserved);
      CHECK(props.extra_subgraph_edges == 0);
      CHECK(props.edges_outside_subgraph == 0);
      CHECK(props.stiffly_connected);
      CHECK(props.ok());

      // each extended face sits on copies of the original face's vertices
      for (int f = 0; f < t.face_count(); ++f) {
        std::set<int> orig;
        for (int v : ext.extended.face(f)) orig.insert(ext.vertex_to_original[v]);
        CHECK(orig == std::set<int>(t.face(f).begin(), t.face(f).end()));
      }
      // copies sit where the original does
      for (int v = 0; v < ext.copy_count(); ++v)
        CHECK(ext.extended.position(v) == t.position(ext.vertex_to_original[v]));
    }
  }
}

TEST_CASE("tree plus extra edges keeps at most that many outside edges") {
  Truss t = gen_grid(6, 6, 0.15, 9);
  RigidityGraph q(t);
  auto tau = default_tau(t);
  auto tree = bfs_tree(q.graph(), 0);
  std::vector<char> in_tree(q.edge_count(), 0);
  for (int e : tree) in_tree[e] = 1;
  std::vector<int> extras;
  for (int e = 0; e < q.edge_count(); ++e)
    if (!in_tree[e]) extras.push_back(e);
  std::mt19937 rng(3);
  std::shuffle(extras.begin(), extras.end(), rng);
  for (int k : {1, 3, 7, 15}) {
    auto h = tree;
    h.insert(h.end(), extras.begin(), extras.begin() + k);
    auto ext = fretsaw(t, q, h, tau);
    auto props = check_fretsaw(t, q, h, tau, ext);
    CHECK(props.extra_subgraph_edges == k);
    CHECK(props.edges_outside_subgraph <= k);
    CHECK(props.ok());
    CHECK(ext.copy_count() == expected_copies(t, q, h));
  }
}

TEST_CASE("lifted stiffness is sandwiched between A and 2A") {
  Truss t = gen_grid(5, 6, 0.2, 12);
  RigidityGraph q(t);
  auto tau = default_tau(t);
  auto ext = fretsaw(t, q, spanning_tree_low_stretch(q.graph()), tau);
  auto a = assemble(t);
  auto b = assemble(ext.extended);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    Vector x(t.dof_count());
    for (auto& v : x) v = nd(rng);
    double xa = x.dot(a.multiply(x));
    Vector y = ext.lift(x);
    double yb = y.dot(b.multiply(y));
    CHECK(yb >= xa * (1 - 1e-10));
    CHECK(yb <= 2 * xa * (1 + 1e-10));
  }
  // collapse is the transpose of lift
  Vector x = Vector::Random(t.dof_count());
  Vector y = Vector::Random(ext.extended.dof_count());
  CHECK(std::abs(ext.lift(x).dot(y) - x.dot(ext.collapse(y))) < 1e-12);
}

TEST_CASE("fretsaw input errors") {
  Truss t = gen_grid(4, 4);
  RigidityGraph q(t);
  auto tau = default_tau(t);
  auto tree = bfs_tree(q.graph(), 0);

  std::vector<int> missing(tree.begin(), tree.end() - 1);
  // dropping a tree edge either orphans a leaf face or disconnects
  auto c = code_of([&] { fretsaw(t, q, missing, tau); });
  CHECK((c == ErrorCode::kNotSpanning || c == ErrorCode::kNotConnected));

  std::vector<int> lone{tree[0]};
  CHECK(code_of([&] { fretsaw(t, q, lone, tau); }) == ErrorCode::kNotSpanning);

  auto bad_tau = tau;
  bad_tau[0] = t.face_count() - 1;
  CHECK(code_of([&] { fretsaw(t, q, tree, bad_tau); }) == ErrorCode::kInvalidInput);

  std::vector<Vec2> p{{0, 0}, {0, 1}, {1, 0.5}, {2, 0}, {2, 1}};
  Truss bowtie(p, {{0, 1, 1}, {0, 2, 1}, {1, 2, 1}, {2, 3, 1}, {2, 4, 1}, {3, 4, 1}});
  RigidityGraph qb(bowtie);
  CHECK(code_of([&] { fretsaw(bowtie, qb, std::vector<int>{}, default_tau(bowtie)); }) ==
        ErrorCode::kNotStifflyConnected);

  std::vector<Vec2> p2{{0, 0}, {1, 0}, {0, 1}, {5, 5}};
  // vertex 3 in no face cannot even be built: the element 2-3 lies in no face
  CHECK_THROWS_AS(Truss(p2, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {2, 3, 1}}), Error);
}

TEST_CASE("extension map sidecar round trip") {
  Truss t = gen_grid(4, 5, 0.1, 2);
  RigidityGraph q(t);
  auto ext = fretsaw(t, q, bfs_tree(q.graph(), 0), default_tau(t));
  std::stringstream ss;
  write_extension_map(ss, ext);
  auto m = read_extension_map(ss);
  CHECK(m.vertex_to_original == ext.vertex_to_original);
  CHECK(m.face_to_original == ext.face_to_original);
}

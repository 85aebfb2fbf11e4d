#pragma once

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boyer_myrvold_planar_test.hpp>
#include <span>
#include <utility>

namespace trussprec {

inline bool is_planar(int vertex_count, std::span<const std::pair<int, int>> edges) {
  using G = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
  G g(vertex_count);
  for (auto [a, b] : edges)
    if (a != b) boost::add_edge(a, b, g);
  return boost::boyer_myrvold_planarity_test(g);
}

}  // namespace trussprec

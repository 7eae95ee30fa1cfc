#pragma once
// Directed acyclic graphs over named nodes, with d-separation queries.

#include <string>
#include <utility>
#include <vector>

namespace apcalc {

struct Dag {
  std::vector<std::string> names;
  std::vector<std::vector<int>> parents;  // parents[v] = indices of v's parents

  int add_node(const std::string& name);
  int index_of(const std::string& name) const;  // -1 when absent
  int require(const std::string& name) const;   // throws when absent
  void add_edge(int from, int to);
  void add_edge(const std::string& from, const std::string& to);  // nodes must exist
  bool has_edge(int from, int to) const;
  std::vector<std::vector<int>> children() const;
  std::vector<int> ancestors(const std::vector<int>& seeds) const;    // includes seeds
  std::vector<int> descendants(const std::vector<int>& seeds) const;  // includes seeds
  void assert_acyclic() const;
};

using EdgeList = std::vector<std::pair<std::string, std::string>>;

// True when a and b are d-separated given z in the graph with removed_edges
// deleted. Active-trail reachability with the usual collider rule: a collider
// passes the trail only if it or one of its descendants is in z.
bool d_separated(const Dag& g, const std::string& a, const std::string& b,
                 const std::vector<std::string>& z, const EdgeList& removed_edges = {});

}  // namespace apcalc

#include "apcalc/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace apcalc {

int Dag::add_node(const std::string& name) {
  if (index_of(name) >= 0) throw std::invalid_argument("duplicate node: " + name);
  names.push_back(name);
  parents.emplace_back();
  return static_cast<int>(names.size()) - 1;
}

int Dag::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

int Dag::require(const std::string& name) const {
  const int i = index_of(name);
  if (i < 0) throw std::invalid_argument("unknown node: " + name);
  return i;
}

void Dag::add_edge(int from, int to) {
  if (from == to) throw std::invalid_argument("self edge");
  if (!has_edge(from, to)) parents[to].push_back(from);
}

void Dag::add_edge(const std::string& from, const std::string& to) {
  add_edge(require(from), require(to));
}

bool Dag::has_edge(int from, int to) const {
  const auto& p = parents[to];
  return std::find(p.begin(), p.end(), from) != p.end();
}

std::vector<std::vector<int>> Dag::children() const {
  std::vector<std::vector<int>> ch(names.size());
  for (std::size_t v = 0; v < parents.size(); ++v)
    for (int p : parents[v]) ch[p].push_back(static_cast<int>(v));
  return ch;
}

std::vector<int> Dag::ancestors(const std::vector<int>& seeds) const {
  std::vector<char> in(names.size(), 0);
  std::vector<int> stack = seeds;
  for (int s : seeds) in[s] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int p : parents[v])
      if (!in[p]) {
        in[p] = 1;
        stack.push_back(p);
      }
  }
  std::vector<int> out;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (in[i]) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> Dag::descendants(const std::vector<int>& seeds) const {
  const auto ch = children();
  std::vector<char> in(names.size(), 0);
  std::vector<int> stack = seeds;
  for (int s : seeds) in[s] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int c : ch[v])
      if (!in[c]) {
        in[c] = 1;
        stack.push_back(c);
      }
  }
  std::vector<int> out;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (in[i]) out.push_back(static_cast<int>(i));
  return out;
}

void Dag::assert_acyclic() const {
  // Kahn's algorithm; leftover nodes mean a cycle.
  std::vector<int> indeg(names.size(), 0);
  for (const auto& p : parents) (void)p;
  for (std::size_t v = 0; v < parents.size(); ++v)
    indeg[v] = static_cast<int>(parents[v].size());
  const auto ch = children();
  std::vector<int> queue;
  for (std::size_t v = 0; v < indeg.size(); ++v)
    if (indeg[v] == 0) queue.push_back(static_cast<int>(v));
  std::size_t seen = 0;
  while (!queue.empty()) {
    const int v = queue.back();
    queue.pop_back();
    ++seen;
    for (int c : ch[v])
      if (--indeg[c] == 0) queue.push_back(c);
  }
  if (seen != names.size()) throw std::invalid_argument("graph has a cycle");
}

bool d_separated(const Dag& g, const std::string& a, const std::string& b,
                 const std::vector<std::string>& z, const EdgeList& removed_edges) {
  Dag h = g;
  for (const auto& [from, to] : removed_edges) {
    const int f = h.require(from);
    const int t = h.require(to);
    auto& p = h.parents[t];
    p.erase(std::remove(p.begin(), p.end(), f), p.end());
  }
  h.assert_acyclic();

  const int src = h.require(a);
  const int dst = h.require(b);
  std::vector<char> in_z(h.names.size(), 0);
  std::vector<int> z_idx;
  for (const auto& name : z) {
    const int i = h.require(name);
    in_z[i] = 1;
    z_idx.push_back(i);
  }
  if (in_z[src] || in_z[dst])
    throw std::invalid_argument("query nodes may not appear in the conditioning set");

  std::vector<char> z_anc(h.names.size(), 0);
  for (int v : h.ancestors(z_idx)) z_anc[v] = 1;

  const auto ch = h.children();
  // Trail state: (node, direction). up = trail arrived from a child below,
  // down = trail arrived from a parent above.
  enum { kUp = 0, kDown = 1 };
  std::vector<char> visited(2 * h.names.size(), 0);
  std::vector<std::pair<int, int>> stack{{src, kUp}};
  while (!stack.empty()) {
    auto [v, dir] = stack.back();
    stack.pop_back();
    char& seen = visited[2 * static_cast<std::size_t>(v) + dir];
    if (seen) continue;
    seen = 1;
    if (v == dst && !in_z[v]) return false;
    if (dir == kUp && !in_z[v]) {
      for (int p : h.parents[v]) stack.push_back({p, kUp});
      for (int c : ch[v]) stack.push_back({c, kDown});
    } else if (dir == kDown) {
      if (!in_z[v])
        for (int c : ch[v]) stack.push_back({c, kDown});
      if (z_anc[v])  // collider (or conditioned chain head) opens upward
        for (int p : h.parents[v]) stack.push_back({p, kUp});
    }
  }
  return true;
}

}  // namespace apcalc

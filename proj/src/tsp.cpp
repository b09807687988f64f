#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>

#include "ktraj/optimizer.hpp"

namespace ktraj {
namespace {

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

struct Edge {
  float d2;
  uint16_t a;
  uint16_t b;
};

}  // namespace

std::vector<int> tsp_greedy(const std::vector<Vec2>& points) {
  const int m = static_cast<int>(points.size());
  if (m < 2) throw std::invalid_argument("tsp_greedy: need at least 2 points");
  if (m > 65535) throw std::invalid_argument("tsp_greedy: too many points");
  if (m == 2) return {0, 1};

  std::vector<Edge> edges;
  edges.reserve(static_cast<size_t>(m) * (m - 1) / 2);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const Vec2 d = points[j] - points[i];
      edges.push_back({static_cast<float>(d.x * d.x + d.y * d.y), static_cast<uint16_t>(i),
                       static_cast<uint16_t>(j)});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& l, const Edge& r) {
    if (l.d2 != r.d2) return l.d2 < r.d2;
    if (l.a != r.a) return l.a < r.a;
    return l.b < r.b;
  });

  std::vector<int> degree(m, 0);
  std::vector<std::array<int, 2>> adj(m, {-1, -1});
  DisjointSet dsu(m);
  int accepted = 0;
  for (const Edge& e : edges) {
    if (accepted == m - 1) break;
    const int a = e.a, b = e.b;
    if (degree[a] >= 2 || degree[b] >= 2) continue;
    if (dsu.find(a) == dsu.find(b)) continue;  // premature cycle
    dsu.unite(a, b);
    adj[a][degree[a]++] = b;
    adj[b][degree[b]++] = a;
    ++accepted;
  }

  // Walk the single open path starting from the lowest-index endpoint.
  int start = -1;
  for (int i = 0; i < m; ++i) {
    if (degree[i] == 1) {
      start = i;
      break;
    }
  }
  std::vector<int> order;
  order.reserve(m);
  int prev = -1, cur = start;
  while (cur != -1) {
    order.push_back(cur);
    const int next = adj[cur][0] != prev ? adj[cur][0] : adj[cur][1];
    prev = cur;
    cur = next;
  }
  if (static_cast<int>(order.size()) != m) {
    throw numeric_error("tsp_greedy: failed to build a full path");
  }
  return order;
}

double path_length(const std::vector<Vec2>& points) {
  double len = 0.0;
  for (size_t i = 0; i + 1 < points.size(); ++i) len += (points[i + 1] - points[i]).norm();
  return len;
}

double path_length(const std::vector<Vec2>& points, const std::vector<int>& order) {
  double len = 0.0;
  for (size_t i = 0; i + 1 < order.size(); ++i) {
    len += (points[order[i + 1]] - points[order[i]]).norm();
  }
  return len;
}

}  // namespace ktraj

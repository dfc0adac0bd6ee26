#include "thermoform/graph.hpp"

#include <algorithm>

namespace thermoform {

int strongly_connected_components(const std::vector<std::vector<int>>& succ, std::vector<int>& comp) {
  const int n = static_cast<int>(succ.size());
  std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
  std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
  std::vector<int> stack;
  comp.assign(static_cast<std::size_t>(n), -1);
  int counter = 0, count = 0;
  struct Frame {
    int v;
    std::size_t next;
  };
  std::vector<Frame> call;
  for (int root = 0; root < n; ++root) {
    if (index[static_cast<std::size_t>(root)] >= 0) continue;
    call.push_back({root, 0});
    while (!call.empty()) {
      Frame& f = call.back();
      const auto v = static_cast<std::size_t>(f.v);
      if (f.next == 0 && index[v] < 0) {
        index[v] = low[v] = counter++;
        stack.push_back(f.v);
        on_stack[v] = 1;
      }
      if (f.next < succ[v].size()) {
        const int w = succ[v][f.next++];
        const auto wi = static_cast<std::size_t>(w);
        if (index[wi] < 0) {
          call.push_back({w, 0});
        } else if (on_stack[wi]) {
          low[v] = std::min(low[v], index[wi]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        for (;;) {
          const int w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = 0;
          comp[static_cast<std::size_t>(w)] = count;
          if (w == f.v) break;
        }
        ++count;
      }
      const int done = f.v;
      call.pop_back();
      if (!call.empty()) {
        const auto p = static_cast<std::size_t>(call.back().v);
        low[p] = std::min(low[p], low[static_cast<std::size_t>(done)]);
      }
    }
  }
  return count;
}

bool component_has_cycle(const std::vector<std::vector<int>>& succ, const std::vector<int>& comp, int c) {
  for (std::size_t v = 0; v < succ.size(); ++v) {
    if (comp[v] != c) continue;
    for (int w : succ[v])
      if (comp[static_cast<std::size_t>(w)] == c) return true;
  }
  return false;
}

}  // namespace thermoform

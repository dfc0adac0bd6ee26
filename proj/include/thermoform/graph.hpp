#ifndef THERMOFORM_GRAPH_HPP
#define THERMOFORM_GRAPH_HPP

#include <vector>

namespace thermoform {

/// Strongly connected components (Tarjan, iterative). comp[v] is the
/// component index of v; components come out in reverse topological order.
/// Returns the number of components.
int strongly_connected_components(const std::vector<std::vector<int>>& succ, std::vector<int>& comp);

/// True when the component has at least one edge inside it (a cycle).
bool component_has_cycle(const std::vector<std::vector<int>>& succ, const std::vector<int>& comp, int c);

}  // namespace thermoform

#endif  // THERMOFORM_GRAPH_HPP

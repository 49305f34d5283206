#pragma once

#include <string>
#include <vector>

#include "cvrp/instance.hpp"

namespace cvrp {

// Deterministic SVG route map: labeled nodes at scaled coordinates plus one
// closed, colored loop through the depot per non-empty route.
std::string render_routes_svg(const Instance& instance,
                              const std::vector<std::vector<int>>& routes,
                              int width = 800, int height = 800);

}  // namespace cvrp

#pragma once

#include <cstdlib>
#include <string>
#include <vector>

#include "cvrp/instance.hpp"

namespace testutil {

inline std::string data_path(const std::string& name) {
    const char* dir = std::getenv("CVRP_DATA_DIR");
    return (dir ? std::string(dir) : std::string("data")) + "/" + name;
}

// depot at coords[0] (demand ignored there), customers after
inline cvrp::Instance make_instance(
    const std::string& name,
    const std::vector<std::pair<double, double>>& coords,
    const std::vector<int>& demands, int trucks, int capacity) {
    std::vector<cvrp::Node> nodes;
    nodes.push_back({0, coords[0].first, coords[0].second, 0});
    for (size_t i = 1; i < coords.size(); ++i)
        nodes.push_back({static_cast<int>(i), coords[i].first, coords[i].second,
                         demands[i - 1]});
    return {name, std::move(nodes), trucks, capacity};
}

}  // namespace testutil

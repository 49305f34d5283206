#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cvrp/common.hpp"

namespace cvrp {

// Node ids are 0-based internally; node 0 is always the depot.
struct Node {
    int id = 0;
    double x = 0.0;
    double y = 0.0;
    int demand = 0;

    Point point() const { return {x, y}; }
};

enum class EdgeWeightKind { Euc2D };

// Immutable CVRP problem model parsed from a VRPLib file.
class Instance {
public:
    Instance(std::string name, std::vector<Node> nodes, int truck_count,
             int truck_capacity);

    const std::string& name() const { return name_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    const Node& depot() const { return nodes_[0]; }
    const Node& node(int id) const { return nodes_.at(static_cast<size_t>(id)); }
    int size() const { return static_cast<int>(nodes_.size()); }
    int customer_count() const { return size() - 1; }
    int truck_count() const { return truck_count_; }
    int truck_capacity() const { return truck_capacity_; }
    EdgeWeightKind edge_weight_kind() const { return EdgeWeightKind::Euc2D; }
    int total_demand() const;

private:
    std::string name_;
    std::vector<Node> nodes_;
    int truck_count_;
    int truck_capacity_;
};

// TSPLIB EUC_2D: round-to-nearest-integer Euclidean distance. All routing
// costs and QUBO coefficients use this; FCM uses fractional_distance.
inline int distance(const Node& a, const Node& b) {
    return static_cast<int>(
        std::llround(std::hypot(a.x - b.x, a.y - b.y)));
}

inline int distance(const Point& a, const Point& b) {
    return static_cast<int>(std::llround(fractional_distance(a, b)));
}

// Parses VRPLib keyword sections. Truck count comes from the "-kN" suffix of
// NAME when present, else from a COMMENT listing "No of trucks"; an explicit
// override wins over both.
Instance parse_instance(std::istream& in,
                        std::optional<int> truck_count_override = {});
Instance parse_instance(const std::string& text,
                        std::optional<int> truck_count_override = {});
Instance load_instance(const std::string& path,
                       std::optional<int> truck_count_override = {});

}  // namespace cvrp

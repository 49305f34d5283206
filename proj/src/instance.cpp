#include "cvrp/instance.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <regex>
#include <sstream>

namespace cvrp {

namespace {

struct Section {
    std::string keyword;
    std::string value;  // for "KEY : value" lines
};

// VRPLib header line: "KEYWORD : value". Section markers have no colon.
std::optional<Section> split_header(const std::string& line) {
    auto colon = line.find(':');
    Section s;
    if (colon == std::string::npos) {
        s.keyword = line;
    } else {
        s.keyword = line.substr(0, colon);
        s.value = line.substr(colon + 1);
    }
    auto trim = [](std::string& t) {
        auto b = t.find_first_not_of(" \t\r");
        auto e = t.find_last_not_of(" \t\r");
        t = (b == std::string::npos) ? std::string{} : t.substr(b, e - b + 1);
    };
    trim(s.keyword);
    trim(s.value);
    if (s.keyword.empty()) return std::nullopt;
    return s;
}

int parse_int(const std::string& text, int line_no, const char* what) {
    try {
        size_t pos = 0;
        int v = std::stoi(text, &pos);
        while (pos < text.size() &&
               (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\r')) {
            ++pos;
        }
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": expected integer for " + what + ", got '" + text +
                         "'");
    }
}

std::optional<int> trucks_from_name(const std::string& name) {
    std::smatch m;
    static const std::regex re("-k(\\d+)\\s*$");
    if (std::regex_search(name, m, re)) return std::stoi(m[1]);
    return std::nullopt;
}

std::optional<int> trucks_from_comment(const std::string& comment) {
    std::smatch m;
    static const std::regex re("No of trucks\\s*:?\\s*(\\d+)",
                               std::regex::icase);
    if (std::regex_search(comment, m, re)) return std::stoi(m[1]);
    return std::nullopt;
}

}  // namespace

Instance::Instance(std::string name, std::vector<Node> nodes, int truck_count,
                   int truck_capacity)
    : name_(std::move(name)),
      nodes_(std::move(nodes)),
      truck_count_(truck_count),
      truck_capacity_(truck_capacity) {
    if (nodes_.empty()) throw ValidationError("instance has no nodes");
    if (truck_count_ < 1) throw ValidationError("truck count must be >= 1");
    if (truck_capacity_ <= 0) throw ValidationError("truck capacity must be > 0");
    if (nodes_[0].demand != 0)
        throw ValidationError("depot node has nonzero demand");
    int max_demand = 0;
    for (size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].id != static_cast<int>(i))
            throw ValidationError("node ids are not contiguous");
        if (nodes_[i].demand < 0)
            throw ValidationError("negative demand at node " +
                                  std::to_string(i));
        max_demand = std::max(max_demand, nodes_[i].demand);
    }
    if (max_demand >= truck_capacity_ && nodes_.size() > 1)
        throw ValidationError("truck capacity " +
                              std::to_string(truck_capacity_) +
                              " does not exceed max single demand " +
                              std::to_string(max_demand));
    long long total = total_demand();
    if (total > static_cast<long long>(truck_count_) * truck_capacity_)
        throw ValidationError("total demand " + std::to_string(total) +
                              " exceeds fleet capacity " +
                              std::to_string(truck_count_ * truck_capacity_));
}

int Instance::total_demand() const {
    return std::accumulate(nodes_.begin(), nodes_.end(), 0,
                           [](int acc, const Node& n) { return acc + n.demand; });
}

Instance parse_instance(std::istream& in,
                        std::optional<int> truck_count_override) {
    std::string name;
    std::string comment;
    std::optional<int> dimension;
    std::optional<int> capacity;
    std::string edge_weight_type;
    bool saw_coords = false, saw_demands = false;
    std::vector<Point> coords;
    std::vector<int> demands;
    int depot_file_id = 1;
    bool saw_depot_section = false;

    std::string line;
    int line_no = 0;
    enum class Mode { Header, Coords, Demands, Depot } mode = Mode::Header;

    while (std::getline(in, line)) {
        ++line_no;
        auto sec = split_header(line);
        if (!sec) continue;
        const std::string& kw = sec->keyword;

        if (kw == "NODE_COORD_SECTION") { mode = Mode::Coords; saw_coords = true; continue; }
        if (kw == "DEMAND_SECTION") { mode = Mode::Demands; saw_demands = true; continue; }
        if (kw == "DEPOT_SECTION") { mode = Mode::Depot; saw_depot_section = true; continue; }
        if (kw == "EOF") break;

        if (mode == Mode::Header) {
            if (kw == "NAME") name = sec->value;
            else if (kw == "COMMENT") comment = sec->value;
            else if (kw == "DIMENSION") dimension = parse_int(sec->value, line_no, "DIMENSION");
            else if (kw == "CAPACITY") capacity = parse_int(sec->value, line_no, "CAPACITY");
            else if (kw == "EDGE_WEIGHT_TYPE") edge_weight_type = sec->value;
            // unknown header keys are ignored
            continue;
        }

        std::istringstream fields(line);
        if (mode == Mode::Coords) {
            std::string id_s, x_s, y_s;
            if (!(fields >> id_s >> x_s >> y_s))
                throw ParseError("line " + std::to_string(line_no) +
                                 ": malformed coordinate line");
            int id = parse_int(id_s, line_no, "node id");
            double x, y;
            try {
                x = std::stod(x_s);
                y = std::stod(y_s);
            } catch (const std::exception&) {
                throw ParseError("line " + std::to_string(line_no) +
                                 ": non-numeric coordinate");
            }
            if (id != static_cast<int>(coords.size()) + 1)
                throw ParseError("line " + std::to_string(line_no) +
                                 ": node ids must be 1-based and contiguous");
            coords.push_back({x, y});
        } else if (mode == Mode::Demands) {
            std::string id_s, d_s;
            if (!(fields >> id_s >> d_s))
                throw ParseError("line " + std::to_string(line_no) +
                                 ": malformed demand line");
            int id = parse_int(id_s, line_no, "node id");
            int d = parse_int(d_s, line_no, "demand");
            if (id != static_cast<int>(demands.size()) + 1)
                throw ParseError("line " + std::to_string(line_no) +
                                 ": demand ids must be 1-based and contiguous");
            demands.push_back(d);
        } else if (mode == Mode::Depot) {
            int v = parse_int(sec->keyword, line_no, "depot id");
            if (v == -1) continue;
            depot_file_id = v;
        }
    }

    if (!dimension) throw ParseError("missing DIMENSION section");
    if (!capacity) throw ParseError("missing CAPACITY section");
    if (!saw_coords) throw ParseError("missing NODE_COORD_SECTION");
    if (!saw_demands) throw ParseError("missing DEMAND_SECTION");
    if (!saw_depot_section) depot_file_id = 1;
    if (!edge_weight_type.empty() && edge_weight_type != "EUC_2D")
        throw ParseError("unsupported EDGE_WEIGHT_TYPE '" + edge_weight_type +
                         "' (only EUC_2D)");
    if (static_cast<int>(coords.size()) != *dimension)
        throw ParseError("NODE_COORD_SECTION has " +
                         std::to_string(coords.size()) + " entries, DIMENSION is " +
                         std::to_string(*dimension));
    if (demands.size() != coords.size())
        throw ParseError("DEMAND_SECTION has " + std::to_string(demands.size()) +
                         " entries, DIMENSION is " + std::to_string(*dimension));
    if (depot_file_id < 1 || depot_file_id > *dimension)
        throw ParseError("depot id " + std::to_string(depot_file_id) +
                         " out of range");

    std::optional<int> trucks = truck_count_override;
    if (!trucks) trucks = trucks_from_name(name);
    if (!trucks) trucks = trucks_from_comment(comment);
    if (!trucks)
        throw ParseError(
            "cannot determine truck count: no -kN name suffix, no 'No of "
            "trucks' comment, no override");

    // Re-index: file depot id -> internal 0, remaining nodes keep file order.
    std::vector<Node> nodes;
    nodes.reserve(coords.size());
    int depot0 = depot_file_id - 1;
    nodes.push_back({0, coords[depot0].x, coords[depot0].y, demands[depot0]});
    for (int i = 0; i < *dimension; ++i) {
        if (i == depot0) continue;
        nodes.push_back({static_cast<int>(nodes.size()), coords[i].x,
                         coords[i].y, demands[i]});
    }

    return Instance(name, std::move(nodes), *trucks, *capacity);
}

Instance parse_instance(const std::string& text,
                        std::optional<int> truck_count_override) {
    std::istringstream in(text);
    return parse_instance(in, truck_count_override);
}

Instance load_instance(const std::string& path,
                       std::optional<int> truck_count_override) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open instance file: " + path);
    return parse_instance(in, truck_count_override);
}

}  // namespace cvrp

#include "cvrp/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <sstream>

namespace cvrp {

namespace {

constexpr std::array<const char*, 10> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    s << v;
    return s.str();
}

}  // namespace

std::string render_routes_svg(const Instance& instance,
                              const std::vector<std::vector<int>>& routes,
                              int width, int height) {
    for (const auto& route : routes)
        for (int id : route)
            if (id < 0 || id >= instance.size())
                throw ArgumentError("route references unknown node id " +
                                    std::to_string(id));

    double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
    double min_y = min_x, max_y = max_x;
    for (const auto& node : instance.nodes()) {
        min_x = std::min(min_x, node.x);
        max_x = std::max(max_x, node.x);
        min_y = std::min(min_y, node.y);
        max_y = std::max(max_y, node.y);
    }
    const double margin = 30.0;
    const double span_x = std::max(max_x - min_x, 1e-9);
    const double span_y = std::max(max_y - min_y, 1e-9);
    const double scale = std::min((width - 2 * margin) / span_x,
                                  (height - 2 * margin) / span_y);
    auto sx = [&](double x) { return margin + (x - min_x) * scale; };
    // SVG y grows downward; flip so plots read like the coordinate plane
    auto sy = [&](double y) { return height - margin - (y - min_y) * scale; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
        << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (size_t r = 0; r < routes.size(); ++r) {
        if (routes[r].empty()) continue;
        const char* color = kPalette[r % kPalette.size()];
        svg << "<path d=\"M " << fmt(sx(instance.depot().x)) << " "
            << fmt(sy(instance.depot().y));
        for (int id : routes[r])
            svg << " L " << fmt(sx(instance.node(id).x)) << " "
                << fmt(sy(instance.node(id).y));
        svg << " Z\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\"/>\n";
    }

    for (const auto& node : instance.nodes()) {
        const bool depot = node.id == 0;
        svg << "<circle cx=\"" << fmt(sx(node.x)) << "\" cy=\"" << fmt(sy(node.y))
            << "\" r=\"" << (depot ? 6 : 4) << "\" fill=\""
            << (depot ? "black" : "#cccccc")
            << "\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
        svg << "<text x=\"" << fmt(sx(node.x) + 6) << "\" y=\""
            << fmt(sy(node.y) - 6) << "\" font-size=\"9\" font-family=\"monospace\">"
            << node.id << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace cvrp

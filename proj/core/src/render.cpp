#include "bidmdp/render.hpp"

#include <iomanip>
#include <sstream>
#include <utility>

namespace bidmdp {

namespace {

const char* direction_label(Direction d) {
  return d == Direction::DownwardClosed ? "reach" : "safe";
}

struct Xy {
  double x;
  double y;
};

/// Fill polygon of a set inside the unit square, staircase boundary
/// first.  The boundary prefix is returned separately so it can be
/// stroked bold.
std::pair<std::vector<Xy>, std::size_t> unit_polygon(const StaircaseSet& set) {
  std::vector<Xy> pts;
  const auto& corners = set.corners();
  if (corners.empty()) {
    return {pts, 0};
  }
  if (set.direction() == Direction::DownwardClosed) {
    // Boundary climbs from (B0, 0) over the corners, then runs right to
    // the budget-1 edge; the fill closes along the bottom.
    pts.push_back({corners.front().B.to_double(), 0.0});
    for (std::size_t k = 0; k < corners.size(); ++k) {
      if (k > 0) {
        pts.push_back({corners[k].B.to_double(), corners[k - 1].p.to_double()});
      }
      pts.push_back({corners[k].B.to_double(), corners[k].p.to_double()});
    }
    const std::size_t boundary = pts.size();
    pts.push_back({1.0, corners.back().p.to_double()});
    pts.push_back({1.0, 0.0});
    return {pts, boundary};
  }
  // Upward-closed: boundary runs right from (0, p0) over the corners,
  // then up to the probability-1 edge; the fill closes along the top.
  pts.push_back({0.0, corners.front().p.to_double()});
  for (std::size_t k = 0; k < corners.size(); ++k) {
    if (k > 0) {
      pts.push_back({corners[k - 1].B.to_double(), corners[k].p.to_double()});
    }
    pts.push_back({corners[k].B.to_double(), corners[k].p.to_double()});
  }
  const std::size_t boundary = pts.size();
  pts.push_back({corners.back().B.to_double(), 1.0});
  pts.push_back({0.0, 1.0});
  return {pts, boundary};
}

void append_points(std::ostringstream& out, const std::vector<Xy>& pts, std::size_t count,
                   double ox, double oy, double side) {
  out << std::fixed << std::setprecision(2);
  for (std::size_t k = 0; k < count; ++k) {
    if (k > 0) out << ' ';
    out << ox + pts[k].x * side << ',' << oy + (1.0 - pts[k].y) * side;
  }
}

} // namespace

std::string csv_header() { return "vertex,iteration,direction,B,p"; }

void append_csv_rows(std::string& out, const Mdp& mdp, const ValueMap& map) {
  for (std::size_t v = 0; v < map.sets.size(); ++v) {
    const StaircaseSet& set = map.sets[v];
    for (const Point& corner : set.corners()) {
      out += mdp.name(static_cast<VertexId>(v));
      out += ',';
      out += std::to_string(map.iteration);
      out += ',';
      out += direction_label(set.direction());
      out += ',';
      out += corner.B.frac();
      out += ',';
      out += corner.p.frac();
      out += '\n';
    }
  }
}

std::string render_csv(const Mdp& mdp, const std::vector<ValueMap>& maps) {
  std::string out = csv_header();
  out += '\n';
  for (const ValueMap& map : maps) {
    append_csv_rows(out, mdp, map);
  }
  return out;
}

std::string render_svg(const Mdp& mdp, const std::vector<ValueMap>& maps) {
  constexpr double kSide = 120.0;
  constexpr double kGap = 26.0;
  constexpr double kMargin = 40.0;
  const std::size_t columns = mdp.size();
  const std::size_t rows = maps.size();
  const double width = kMargin + columns * (kSide + kGap);
  const double height = kMargin + rows * (kSide + kGap);

  std::ostringstream svg;
  svg << std::fixed << std::setprecision(2);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "  <rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

  for (std::size_t r = 0; r < rows; ++r) {
    const ValueMap& map = maps[r];
    for (std::size_t c = 0; c < columns && c < map.sets.size(); ++c) {
      const double ox = kMargin + c * (kSide + kGap);
      const double oy = kMargin + r * (kSide + kGap);
      const StaircaseSet& set = map.sets[c];
      svg << "  <g>\n";
      svg << "    <rect x=\"" << ox << "\" y=\"" << oy << "\" width=\"" << kSide
          << "\" height=\"" << kSide << "\" fill=\"#fbfbfb\" stroke=\"#999999\"/>\n";
      const auto [pts, boundary] = unit_polygon(set);
      if (!pts.empty()) {
        std::ostringstream fill;
        append_points(fill, pts, pts.size(), ox, oy, kSide);
        svg << "    <polygon points=\"" << fill.str()
            << "\" fill=\"#b8cbe4\" stroke=\"none\"/>\n";
        std::ostringstream edge;
        append_points(edge, pts, boundary, ox, oy, kSide);
        svg << "    <polyline points=\"" << edge.str()
            << "\" fill=\"none\" stroke=\"#1f3864\" stroke-width=\"2\"/>\n";
      }
      svg << "    <text x=\"" << ox << "\" y=\"" << oy - 6.0
          << "\" font-family=\"sans-serif\" font-size=\"11\">"
          << mdp.name(static_cast<VertexId>(c)) << ", " << direction_label(set.direction())
          << " i=" << map.iteration << "</text>\n";
      svg << "  </g>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

} // namespace bidmdp

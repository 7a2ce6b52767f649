#pragma once
/// CSV and SVG emission for staircase value-map traces.

#include <string>
#include <vector>

#include "bidmdp/bellman.hpp"
#include "bidmdp/mdp.hpp"

namespace bidmdp {

/// Header line of the corner dump: `vertex,iteration,direction,B,p`.
std::string csv_header();

/// Appends one corner row per canonical corner of every set in the map
/// (no header); rationals are rendered as num/den.
void append_csv_rows(std::string& out, const Mdp& mdp, const ValueMap& map);

/// Full corner dump of a map sequence, header included.
std::string render_csv(const Mdp& mdp, const std::vector<ValueMap>& maps);

/// Grid of shaded staircase panels, one column per vertex and one row
/// per map.  Each panel is a unit-square viewport with the set filled
/// and its staircase boundary drawn bold.
std::string render_svg(const Mdp& mdp, const std::vector<ValueMap>& maps);

} // namespace bidmdp

#pragma once

// Text outputs: CSV tables, JSON documents and static SVG plots. Numbers in
// CSV and SVG are printed with 17 significant digits.

#include "charfol/curvature.hpp"
#include "charfol/distance.hpp"
#include "charfol/foliation.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace charfol {

/// "%.17g".
std::string fmt(double x);

/// Lexicographic order by location, used for every point listing.
void sort_points(std::vector<CharPoint>& pts);

std::string charpoints_csv(const std::vector<CharPoint>& pts);
nlohmann::json charpoints_json(const std::vector<CharPoint>& pts);

/// t, x, y, z, cumulative_length.
std::string trajectory_csv(const Trajectory& tr);
/// The same with leading leaf and direction columns, for several leaves.
std::string trajectories_csv(const std::vector<Trajectory>& trs);
nlohmann::json trajectory_summary_json(const Trajectory& tr);

/// eps, K_eps, det_B, ratio, abs_error.
std::string limit_csv(const LimitStudy& st, const std::vector<CurvatureReport>& reports);
nlohmann::json limit_json(const LimitStudy& st, const std::vector<CurvatureReport>& reports);

nlohmann::json verdict_json(const DistanceVerdict& v);
nlohmann::json graph_json(const FoliationGraph& g);

nlohmann::json skeleton_json(const Skeleton& sk);

/// Foliation plot: leaves as polylines and characteristic points as circles
/// colored by class, in parameter space for parametric fields and in an
/// orthographic projection otherwise.
std::string foliation_svg(const CharVectorField& X, const std::vector<CharPoint>& pts,
                          const std::vector<Trajectory>& leaves, const std::string& title = "");

}  // namespace charfol

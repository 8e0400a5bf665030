#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "modclass/experiments.hpp"

namespace modclass {

inline constexpr char kCsvHeader[] = "sweep_var,sweep_value,pe,ci_low,ci_high,trials,scenario,snr_db,seed";

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Header plus one row per point, curves in order.
std::string curves_to_csv(std::span<const PeCurve> curves);

/// Inverse of curves_to_csv for the columns it writes. Consecutive rows with
/// the same (scenario, snr_db, sweep_var, seed) form one curve.
std::vector<PeCurve> curves_from_csv(std::string_view text);

/// Writes through a temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

void write_csv(std::span<const PeCurve> curves, const std::filesystem::path& path);
void write_csv(const PeCurve& curve, const std::filesystem::path& path);
std::vector<PeCurve> read_csv(const std::filesystem::path& path);

inline constexpr double kPlotFloor = 1e-4;

/// SVG with a log-scaled Pe axis, one series per curve and CI whiskers.
/// Points with Pe below the floor are drawn at the floor and annotated.
std::string render_svg(std::span<const PeCurve> curves, const std::string& title = "");
void render_plot(std::span<const PeCurve> curves, const std::filesystem::path& path, const std::string& title = "");

}  // namespace modclass

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "clm/moo.hpp"
#include "clm/trajectory.hpp"

namespace clm::svg {

struct Series {
    std::string label;
    std::string color = "#1f77b4";
    std::vector<Vec2> points;
    bool close = false;
};

struct Marker {
    std::string label;
    Vec2 at;
    std::string color = "#d62728";
};

/// Static trajectory overlay with optional feature markers. No timestamps
/// are embedded, so identical inputs give identical bytes.
std::string trajectory_plot(const std::vector<Series>& series, const std::vector<Marker>& markers,
                            int width = 860, int height = 620);

/// 2-D objective scatter (higher dimensions are projected onto the first
/// two axes) with rank-0 and an optional knee highlighted.
std::string archive_scatter(const moo::ParetoArchive& a, std::optional<std::size_t> knee_index,
                            int width = 720, int height = 560);

void write(const std::filesystem::path& path, const std::string& svg_text);

}  // namespace clm::svg

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "clm/fallible.hpp"
#include "clm/linkage.hpp"
#include "clm/metrics.hpp"
#include "clm/moo.hpp"
#include "clm/trajectory.hpp"

namespace clm::io {

/// Mechanism parameter file: {"schema":1, "topology", "params":{name:value},
/// "units":"mm-rad", optional "period_s", "branches", "suspect", "note"}.
struct MechanismFile {
    ParamVector params;
    double period_s = 0.5;
    Branches branches;
    bool suspect = false;
    std::string note;
};

struct IoError {
    std::string message;  // includes byte offset diagnostics on parse errors
};

template <typename T>
using IoResult = std::variant<T, IoError>;

IoResult<MechanismFile> read_mechanism(const std::filesystem::path& path);
void write_mechanism(const std::filesystem::path& path, const MechanismFile& m);

/// Resolves a mechanism path, falling back to $CLM_FIXTURES/<path>.
std::filesystem::path resolve_fixture_path(const std::filesystem::path& path);

/// CSV with header t,x,y; walking trajectories carry a "# phase=swing" line.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& t,
                          bool swing_phase = false);
IoResult<Trajectory> read_trajectory_csv(const std::filesystem::path& path);

std::string report_to_json(const PerformanceReport& rep);
std::string report_to_csv_row(const PerformanceReport& rep);
std::string report_csv_header();

/// JSONL: first line {"schema":1,"provenance":...}, then one individual per
/// line {genome, objectives, violations, rank, generation}.
void write_archive_jsonl(const std::filesystem::path& path, const moo::ParetoArchive& a);
IoResult<moo::ParetoArchive> read_archive_jsonl(const std::filesystem::path& path);

std::string archive_to_jsonl(const moo::ParetoArchive& a);

struct RunManifest {
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string git_describe;
    double wall_time_s = 0.0;
    std::vector<std::string> outputs;
    bool extrapolation = false;
};

/// Written atomically (temp file + rename); exactly one per output directory.
void write_manifest(const std::filesystem::path& dir, const RunManifest& m);

/// FNV-1a hash of a canonical string, hex-encoded.
std::string content_hash(const std::string& text);

/// Atomic text write helper.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

/// Leg layout file: {"legs":[{"id","origin":[x,y],"phase"}], "gait"}.
IoResult<LegLayout> read_layout(const std::filesystem::path& path);

}  // namespace clm::io

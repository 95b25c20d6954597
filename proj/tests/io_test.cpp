#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "clm/io.hpp"
#include "clm/target_curves.hpp"

using namespace clm;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    auto dir = fs::temp_directory_path() / "clm_io_test";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("mechanism files round-trip") {
    io::MechanismFile m;
    m.params.topology = Topology::four_bar;
    m.params.values = {0.2, 0.1, 5.0, -3.0, 20, 80, 70, 60, 35, -10};
    m.period_s = 0.25;
    m.branches = {-1, +1};
    const auto path = temp_dir() / "mech.json";
    io::write_mechanism(path, m);
    auto back = io::read_mechanism(path);
    REQUIRE(std::holds_alternative<io::MechanismFile>(back));
    const auto& r = std::get<io::MechanismFile>(back);
    CHECK(r.params.topology == Topology::four_bar);
    CHECK(r.params.values == m.params.values);
    CHECK(r.period_s == 0.25);
    CHECK(r.branches.dyad1 == -1);
}

TEST_CASE("malformed mechanism json reports a diagnostic") {
    const auto path = temp_dir() / "broken.json";
    std::ofstream(path) << "{\"topology\": \"four_bar\", \"params\": {";
    auto r = io::read_mechanism(path);
    REQUIRE(std::holds_alternative<io::IoError>(r));
    CHECK(!std::get<io::IoError>(r).message.empty());
}

TEST_CASE("trajectory csv round-trip keeps samples and phase") {
    const auto t = cycloid_bt_target({}, 360);
    const auto path = temp_dir() / "bt.csv";
    io::write_trajectory_csv(path, t, false);
    auto back = io::read_trajectory_csv(path);
    REQUIRE(std::holds_alternative<Trajectory>(back));
    const auto& r = std::get<Trajectory>(back);
    CHECK(r.size() == t.size());
    CHECK(r.closed);
    for (std::size_t i = 0; i < t.size(); i += 37) CHECK(dist(r.points[i], t.points[i]) < 1e-9);

    Trajectory wt = t;
    wt.closed = false;
    io::write_trajectory_csv(temp_dir() / "wt.csv", wt, true);
    auto wback = io::read_trajectory_csv(temp_dir() / "wt.csv");
    REQUIRE(std::holds_alternative<Trajectory>(wback));
    CHECK(!std::get<Trajectory>(wback).closed);
}

TEST_CASE("archives round-trip through jsonl") {
    moo::ParetoArchive a;
    a.provenance = {"subtask1", 42, 7};
    for (int i = 0; i < 3; ++i) {
        moo::Individual ind;
        ind.genome = {1.0 * i, 2.0 * i};
        ind.objectives = {0.5 * i};
        ind.violations = {-1.0};
        ind.rank = 0;
        ind.generation = i;
        a.individuals.push_back(ind);
    }
    const auto path = temp_dir() / "archive.jsonl";
    io::write_archive_jsonl(path, a);
    auto back = io::read_archive_jsonl(path);
    REQUIRE(std::holds_alternative<moo::ParetoArchive>(back));
    const auto& r = std::get<moo::ParetoArchive>(back);
    CHECK(r.provenance.subtask == "subtask1");
    CHECK(r.provenance.seed == 7);
    REQUIRE(r.individuals.size() == 3);
    CHECK(r.individuals[2].genome == std::vector<double>{2.0, 4.0});
}

TEST_CASE("manifest is written atomically with a content hash") {
    const auto dir = temp_dir() / "run1";
    fs::create_directories(dir);
    io::RunManifest m;
    m.command = "clm synth";
    m.config_hash = io::content_hash("{}");
    m.seed = 99;
    m.git_describe = "test";
    m.outputs = {"x0.json"};
    io::write_manifest(dir, m);
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(!fs::exists(dir / "manifest.json.tmp"));
    CHECK(io::content_hash("{}") == io::content_hash("{}"));
    CHECK(io::content_hash("{}") != io::content_hash("{ }"));
}

TEST_CASE("fixture path resolution uses CLM_FIXTURES") {
    const char* env = std::getenv("CLM_FIXTURES");
    if (!env) return;
    const auto resolved = io::resolve_fixture_path("no_such_file_anywhere.json");
    CHECK(resolved == fs::path("no_such_file_anywhere.json"));
}

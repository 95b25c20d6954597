#include "clm/io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace clm::io {

using nlohmann::json;

IoResult<MechanismFile> read_mechanism(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return IoError{"cannot open " + path.string()};
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        return IoError{path.string() + ": " + e.what()};
    }
    MechanismFile m;
    try {
        auto topo = topology_from_name(j.at("topology").get<std::string>());
        if (!topo) return IoError{"unknown topology in " + path.string()};
        m.params.topology = *topo;
        const auto& names = topology_param_names(*topo);
        const json& params = j.at("params");
        m.params.values.clear();
        for (const auto& name : names) {
            if (!params.contains(name))
                return IoError{path.string() + ": missing parameter " + name};
            m.params.values.push_back(params.at(name).get<double>());
        }
        m.period_s = j.value("period_s", 0.5);
        if (j.contains("branches") && j["branches"].is_array() && j["branches"].size() >= 2) {
            m.branches.dyad1 = j["branches"][0].get<int>() >= 0 ? +1 : -1;
            m.branches.dyad2 = j["branches"][1].get<int>() >= 0 ? +1 : -1;
        }
        m.suspect = j.value("suspect", false);
        m.note = j.value("note", std::string{});
    } catch (const json::exception& e) {
        return IoError{path.string() + ": " + e.what()};
    }
    return m;
}

void write_mechanism(const std::filesystem::path& path, const MechanismFile& m) {
    json params = json::object();
    const auto& names = topology_param_names(m.params.topology);
    for (std::size_t i = 0; i < names.size(); ++i) params[names[i]] = m.params.values[i];
    json j{{"schema", 1},
           {"topology", topology_name(m.params.topology)},
           {"params", params},
           {"units", "mm-rad"},
           {"period_s", m.period_s},
           {"branches", {m.branches.dyad1, m.branches.dyad2}}};
    if (m.suspect) j["suspect"] = true;
    if (!m.note.empty()) j["note"] = m.note;
    write_text_atomic(path, j.dump(2) + "\n");
}

std::filesystem::path resolve_fixture_path(const std::filesystem::path& path) {
    if (std::filesystem::exists(path)) return path;
    if (const char* env = std::getenv("CLM_FIXTURES")) {
        const auto alt = std::filesystem::path(env) / path;
        if (std::filesystem::exists(alt)) return alt;
    }
    return path;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& t,
                          bool swing_phase) {
    std::ostringstream out;
    if (swing_phase) out << "# phase=swing\n";
    out << "t,x,y\n";
    const std::size_t n = t.size();
    const double span = t.closed ? t.period_T : t.period_T / 2.0;
    const std::size_t denom = t.closed ? n : (n > 1 ? n - 1 : 1);
    out.precision(17);
    for (std::size_t i = 0; i < n; ++i) {
        out << (span * static_cast<double>(i) / static_cast<double>(denom)) << ','
            << t.points[i].x << ',' << t.points[i].y << '\n';
    }
    write_text_atomic(path, out.str());
}

IoResult<Trajectory> read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return IoError{"cannot open " + path.string()};
    Trajectory t;
    std::string line;
    bool swing = false, header_seen = false;
    std::vector<double> times;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.find("phase=swing") != std::string::npos) swing = true;
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            continue;  // t,x,y
        }
        std::istringstream row(line);
        std::string cell;
        double vals[3];
        for (int k = 0; k < 3; ++k) {
            if (!std::getline(row, cell, ',')) return IoError{path.string() + ": short row"};
            try {
                vals[k] = std::stod(cell);
            } catch (...) {
                return IoError{path.string() + ": bad number '" + cell + "'"};
            }
        }
        times.push_back(vals[0]);
        t.points.push_back({vals[1], vals[2]});
    }
    if (t.points.size() < 2) return IoError{path.string() + ": too few samples"};
    t.closed = !swing;
    const double span = times.back() - times.front();
    t.period_T = t.closed ? span * static_cast<double>(t.size()) /
                                static_cast<double>(t.size() - 1)
                          : span * 2.0;
    return t;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string report_to_json(const PerformanceReport& r) {
    json j{{"schema", 1},  {"h_s", r.h_s},       {"S", r.S},       {"theta1", r.theta1},
           {"theta2", r.theta2}, {"I", r.I},     {"h_m", r.h_m},   {"h_bar", r.h_bar},
           {"psi2", r.psi2},     {"psi4", r.psi4}, {"mse", opt(r.mse)}, {"fourier", opt(r.fourier)},
           {"l_s", r.l_s},       {"l_w", r.l_w}};
    return j.dump(2);
}

std::string report_csv_header() {
    return "h_s,S,theta1,theta2,I,h_m,h_bar,psi2,psi4,mse,l_s,l_w";
}

std::string report_to_csv_row(const PerformanceReport& r) {
    std::ostringstream out;
    out.precision(12);
    out << r.h_s << ',' << r.S << ',' << r.theta1 << ',' << r.theta2 << ',' << r.I << ','
        << r.h_m << ',' << r.h_bar << ',' << r.psi2 << ',' << r.psi4 << ',';
    if (r.mse) out << *r.mse;
    out << ',' << r.l_s << ',' << r.l_w;
    return out.str();
}

std::string archive_to_jsonl(const moo::ParetoArchive& a) {
    std::ostringstream out;
    json head{{"schema", 1},
              {"provenance",
               {{"subtask", a.provenance.subtask},
                {"generation", a.provenance.generation},
                {"seed", a.provenance.seed}}}};
    out << head.dump() << '\n';
    for (const auto& ind : a.individuals) {
        json j{{"genome", ind.genome},
               {"objectives", ind.objectives},
               {"violations", ind.violations},
               {"rank", ind.rank},
               {"generation", ind.generation}};
        out << j.dump() << '\n';
    }
    return out.str();
}

void write_archive_jsonl(const std::filesystem::path& path, const moo::ParetoArchive& a) {
    write_text_atomic(path, archive_to_jsonl(a));
}

IoResult<moo::ParetoArchive> read_archive_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return IoError{"cannot open " + path.string()};
    moo::ParetoArchive a;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            return IoError{path.string() + ": " + e.what()};
        }
        if (first && j.contains("provenance")) {
            a.provenance.subtask = j["provenance"].value("subtask", std::string{});
            a.provenance.generation = j["provenance"].value("generation", 0);
            a.provenance.seed = j["provenance"].value("seed", 0ULL);
            first = false;
            continue;
        }
        first = false;
        moo::Individual ind;
        ind.genome = j.value("genome", std::vector<double>{});
        ind.objectives = j.value("objectives", std::vector<double>{});
        ind.violations = j.value("violations", std::vector<double>{});
        ind.rank = j.value("rank", 0);
        ind.generation = j.value("generation", 0);
        a.individuals.push_back(std::move(ind));
    }
    return a;
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
    json j{{"schema", 1},
           {"command", m.command},
           {"config_hash", m.config_hash},
           {"seed", m.seed},
           {"git_describe", m.git_describe},
           {"wall_time_s", m.wall_time_s},
           {"outputs", m.outputs}};
    if (m.extrapolation) j["extrapolation"] = true;
    write_text_atomic(dir / "manifest.json", j.dump(2) + "\n");
}

std::string content_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << text;
    }
    std::filesystem::rename(tmp, path);
}

IoResult<LegLayout> read_layout(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return IoError{"cannot open " + path.string()};
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        return IoError{path.string() + ": " + e.what()};
    }
    LegLayout layout;
    layout.gait = j.value("gait", std::string{"quad"}) == "biped" ? Gait::biped : Gait::quad;
    try {
        for (const auto& leg : j.at("legs")) {
            LegPlacement p;
            p.id = leg.at("id").get<std::string>();
            p.origin = {leg.at("origin")[0].get<double>(), leg.at("origin")[1].get<double>()};
            p.phase = leg.value("phase", 0.0);
            layout.legs.push_back(p);
        }
    } catch (const json::exception& e) {
        return IoError{path.string() + ": " + e.what()};
    }
    return layout;
}

}  // namespace clm::io

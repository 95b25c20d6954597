// clm: evaluate, trace, synthesize and plot closed-chain leg mechanisms.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "clm/hier_pipeline.hpp"
#include "clm/io.hpp"
#include "clm/linkage.hpp"
#include "clm/metrics.hpp"
#include "clm/rtclm.hpp"
#include "clm/svg.hpp"
#include "clm/target_curves.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace clm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitKinematic = 2;
constexpr int kExitOptimization = 3;

std::uint64_t pick_seed(std::optional<std::uint64_t> flag) {
    if (flag) return *flag;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

int fail_input(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    return kExitInput;
}

/// --target accepts a trajectory CSV or a JSON cycloid spec
/// {"type":"cycloid","L":...,"H":...,"T":...}.
std::optional<Trajectory> load_target(const std::string& spec, int n, CycloidSpec* spec_out) {
    if (spec.empty() || spec == "cycloid") {
        CycloidSpec cs;
        if (spec_out) *spec_out = cs;
        return cycloid_bt_target(cs, n);
    }
    const auto path = io::resolve_fixture_path(spec);
    if (path.extension() == ".csv") {
        auto t = io::read_trajectory_csv(path);
        if (std::holds_alternative<io::IoError>(t)) return std::nullopt;
        return resample_closed(std::get<Trajectory>(t), n);
    }
    std::ifstream in(path);
    if (!in) return std::nullopt;
    try {
        json j = json::parse(in);
        CycloidSpec cs;
        cs.L = j.value("L", 300.0);
        cs.H = j.value("H", 100.0);
        cs.T = j.value("T", 2.0);
        if (spec_out) *spec_out = cs;
        return cycloid_bt_target(cs, n, j.value("flip_y", false));
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

json report_json(const PerformanceReport& rep) { return json::parse(io::report_to_json(rep)); }

int run_eval(const std::string& mech_path, const std::string& target_spec, bool csv,
             const std::string& mode, int n, std::optional<double> period_flag) {
    auto loaded = io::read_mechanism(io::resolve_fixture_path(mech_path));
    if (std::holds_alternative<io::IoError>(loaded))
        return fail_input(std::get<io::IoError>(loaded).message);
    auto mech = std::get<io::MechanismFile>(loaded);
    if (period_flag) mech.period_s = *period_flag;
    if (auto why = mech.params.invalid_reason()) return fail_input(*why);

    Trajectory bt;
    if (mech.params.topology == Topology::rtclm_seven_bar) {
        auto solved = rtclm::coupling_solve(mech.params, mech.branches);
        if (!solved) {
            std::cerr << "infeasible: " << solved.fault().describe() << "\n";
            return kExitKinematic;
        }
        const auto m = mode == "auxiliary" ? rtclm::Mode::auxiliary : rtclm::Mode::primary;
        auto traced = rtclm::trace_mode(*solved, m, n, mech.period_s);
        if (!traced) {
            std::cerr << "infeasible: " << traced.fault().describe() << "\n";
            return kExitKinematic;
        }
        bt = *traced;
    } else {
        auto traced = trace_bt(mech.params, n, mech.branches, {mech.period_s, +1});
        if (!traced) {
            std::cerr << "infeasible: " << traced.fault().describe() << "\n";
            return kExitKinematic;
        }
        bt = *traced;
    }

    auto fp = find_feature_points(bt);
    if (!fp) {
        std::cerr << "infeasible: " << fp.fault().describe() << "\n";
        return kExitKinematic;
    }
    auto rep = performance_report(bt, *fp);
    if (!rep) {
        std::cerr << "infeasible: " << rep.fault().describe() << "\n";
        return kExitKinematic;
    }
    if (!target_spec.empty()) {
        auto target = load_target(target_spec, n, nullptr);
        if (!target) return fail_input("cannot load target " + target_spec);
        if (auto m = mse(bt, *target)) rep->mse = *m;
        rep->fourier = fourier_distance(bt, *target);
    }
    if (csv) {
        std::cout << io::report_csv_header() << "\n" << io::report_to_csv_row(*rep) << "\n";
    } else {
        std::cout << io::report_to_json(*rep) << "\n";
    }
    return kExitOk;
}

int run_trace(const std::string& mech_path, int n, bool with_wt, const std::string& layout_path,
              const std::string& out_prefix, const std::string& mode) {
    auto loaded = io::read_mechanism(io::resolve_fixture_path(mech_path));
    if (std::holds_alternative<io::IoError>(loaded))
        return fail_input(std::get<io::IoError>(loaded).message);
    const auto mech = std::get<io::MechanismFile>(loaded);
    if (auto why = mech.params.invalid_reason()) return fail_input(*why);

    Trajectory bt;
    if (mech.params.topology == Topology::rtclm_seven_bar) {
        auto solved = rtclm::coupling_solve(mech.params, mech.branches);
        if (!solved) {
            std::cerr << "infeasible: " << solved.fault().describe() << "\n";
            return kExitKinematic;
        }
        const auto m = mode == "auxiliary" ? rtclm::Mode::auxiliary : rtclm::Mode::primary;
        auto traced = rtclm::trace_mode(*solved, m, n, mech.period_s);
        if (!traced) {
            std::cerr << "infeasible: " << traced.fault().describe() << "\n";
            return kExitKinematic;
        }
        bt = *traced;
    } else {
        auto traced = trace_bt(mech.params, n, mech.branches, {mech.period_s, +1});
        if (!traced) {
            std::cerr << "infeasible: " << traced.fault().describe() << "\n";
            return kExitKinematic;
        }
        bt = *traced;
    }
    io::write_trajectory_csv(out_prefix + "_bt.csv", bt, false);
    std::vector<std::string> written{out_prefix + "_bt.csv"};

    if (with_wt || !layout_path.empty()) {
        auto fp = find_feature_points(bt);
        if (!fp) {
            std::cerr << "infeasible: " << fp.fault().describe() << "\n";
            return kExitKinematic;
        }
        if (with_wt) {
            auto wt = bt_to_wt(bt, *fp);
            if (!wt) {
                std::cerr << "infeasible: " << wt.fault().describe() << "\n";
                return kExitKinematic;
            }
            io::write_trajectory_csv(out_prefix + "_wt.csv", *wt, true);
            written.push_back(out_prefix + "_wt.csv");
        }
        if (!layout_path.empty()) {
            auto layout = io::read_layout(layout_path);
            if (std::holds_alternative<io::IoError>(layout))
                return fail_input(std::get<io::IoError>(layout).message);
            auto mw = multi_wt_layout(bt, *fp, std::get<LegLayout>(layout));
            if (!mw) {
                std::cerr << "infeasible: " << mw.fault().describe() << "\n";
                return kExitKinematic;
            }
            const auto& legs = std::get<LegLayout>(layout).legs;
            for (std::size_t i = 0; i < mw->positioned.size(); ++i) {
                const std::string leg_id = i < legs.size() ? legs[i].id : std::to_string(i);
                const auto path = out_prefix + "_wt_" + leg_id + ".csv";
                io::write_trajectory_csv(path, mw->positioned[i], true);
                written.push_back(path);
            }
            json dx{{"schema", 1},
                    {"dx_ab", mw->dx_ab},
                    {"dx_bc", mw->dx_bc},
                    {"dx_cd", mw->dx_cd},
                    {"stride", mw->stride}};
            io::write_text_atomic(out_prefix + "_dx.json", dx.dump(2) + "\n");
            written.push_back(out_prefix + "_dx.json");
        }
    }
    for (const auto& w : written) std::cout << w << "\n";
    return kExitOk;
}

json incumbent_json(const hier::Incumbent& inc) {
    json j;
    j["f"] = {inc.eval.f1, inc.eval.f2, inc.eval.f3, inc.eval.f4, inc.eval.f5};
    j["fourier"] = inc.eval.fourier;
    if (inc.eval.report) j["report"] = report_json(*inc.eval.report);
    return j;
}

void write_incumbent_files(const fs::path& dir, const std::string& name, Topology topo,
                           const hier::Incumbent& inc, const CycloidSpec& spec, int n,
                           std::vector<std::string>& outputs) {
    io::MechanismFile m;
    m.params.topology = topo;
    m.params.values = inc.genome;
    m.branches = inc.eval.branches;
    m.period_s = spec.T;
    io::write_mechanism(dir / (name + ".json"), m);
    outputs.push_back(name + ".json");
    auto bt = trace_bt(m.params, n, m.branches, {m.period_s, +1});
    if (bt) {
        io::write_trajectory_csv(dir / ("trace_" + name + ".csv"), *bt, false);
        outputs.push_back("trace_" + name + ".csv");
    }
}

int run_synth(const std::string& topology_name_str, const std::string& target_spec,
              const std::string& out_dir, std::optional<std::uint64_t> seed_flag, int pop,
              int gens, int n, int jobs, bool single_level, bool full_budget) {
    auto topo = topology_from_name(topology_name_str);
    if (!topo) return fail_input("unknown topology " + topology_name_str);
    if (*topo == Topology::rtclm_seven_bar)
        return fail_input("use `clm rtclm` for the reconfigurable mechanism");

    hier::PipelineConfig cfg;
    cfg.algo.population = pop;
    cfg.algo.generations = gens;
    cfg.algo.jobs = jobs;
    cfg.algo.seed = pick_seed(seed_flag);
    cfg.n_trace = n;
    cfg.full_budget = full_budget;
    if (!load_target(target_spec, n, &cfg.target_spec))
        return fail_input("cannot load target " + target_spec);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    Timer timer;
    std::vector<std::string> outputs;

    json config{{"schema", 1},
                {"topology", topology_name_str},
                {"population", cfg.algo.population},
                {"generations", cfg.algo.generations},
                {"crossover_fraction", cfg.algo.crossover_fraction},
                {"mutation_fraction", cfg.algo.mutation_fraction},
                {"seed", cfg.algo.seed},
                {"n_trace", cfg.n_trace},
                {"target", {{"L", cfg.target_spec.L}, {"H", cfg.target_spec.H},
                            {"T", cfg.target_spec.T}}},
                {"single_level", single_level},
                {"full_budget", full_budget}};
    io::write_text_atomic(dir / "config.json", config.dump(2) + "\n");
    outputs.push_back("config.json");

    io::RunManifest manifest;
    manifest.command = single_level ? "clm synth --single-level" : "clm synth";
    manifest.config_hash = io::content_hash(config.dump());
    manifest.seed = cfg.algo.seed;
    manifest.git_describe = CLM_GIT_DESCRIBE;

    if (single_level) {
        auto res = hier::run_single_level(*topo, cfg);
        if (!res) {
            std::cerr << "optimization failed: " << res.fault().describe() << "\n";
            return kExitOptimization;
        }
        io::write_archive_jsonl(dir / "archive_single.jsonl", res->archive);
        outputs.push_back("archive_single.jsonl");
        json report;
        const char* names[3] = {"min_f1", "min_f4", "min_f5"};
        const hier::Incumbent* incs[3] = {&res->min_f1, &res->min_f4, &res->min_f5};
        for (int k = 0; k < 3; ++k) {
            write_incumbent_files(dir, names[k], *topo, *incs[k], cfg.target_spec, n, outputs);
            report[names[k]] = incumbent_json(*incs[k]);
        }
        io::write_text_atomic(dir / "report.json", report.dump(2) + "\n");
        outputs.push_back("report.json");
        svg::write(dir / "front_single.svg", svg::archive_scatter(res->archive, std::nullopt));
        outputs.push_back("front_single.svg");
        manifest.wall_time_s = timer.seconds();
        manifest.outputs = outputs;
        io::write_manifest(dir, manifest);
        std::cout << "single-level baseline written to " << out_dir << "\n";
        return kExitOk;
    }

    auto run = hier::run_pipeline(*topo, cfg);
    if (!run) {
        std::cerr << "optimization failed: " << run.fault().describe() << "\n";
        return kExitOptimization;
    }
    const hier::Incumbent* incs[4] = {&run->x0, &run->x1, &run->x2, &run->x3};
    const char* names[4] = {"x0", "x1", "x2", "x3"};
    json report;
    for (int k = 0; k < 4; ++k) {
        write_incumbent_files(dir, names[k], *topo, *incs[k], cfg.target_spec, n, outputs);
        report[names[k]] = incumbent_json(*incs[k]);
    }
    io::write_text_atomic(dir / "report.json", report.dump(2) + "\n");
    outputs.push_back("report.json");
    const moo::ParetoArchive* archives[3] = {&run->s1, &run->s2, &run->s3};
    for (int k = 0; k < 3; ++k) {
        const std::string stem = "archive_s" + std::to_string(k + 1);
        io::write_archive_jsonl(dir / (stem + ".jsonl"), *archives[k]);
        outputs.push_back(stem + ".jsonl");
        svg::write(dir / ("front_s" + std::to_string(k + 1) + ".svg"),
                   svg::archive_scatter(*archives[k], std::nullopt));
        outputs.push_back("front_s" + std::to_string(k + 1) + ".svg");
    }
    manifest.wall_time_s = timer.seconds();
    manifest.outputs = outputs;
    io::write_manifest(dir, manifest);
    std::cout << "design run written to " << out_dir << "\n"
              << "x3 f = " << report["x3"]["f"].dump() << "\n";
    return kExitOk;
}

int run_rtclm(double h6, double h4, const std::string& out_dir,
              std::optional<std::uint64_t> seed_flag, int pop, int gens, int n, int jobs) {
    rtclm::StepwiseConfig cfg;
    cfg.algo.population = pop;
    cfg.algo.generations = gens;
    cfg.algo.jobs = jobs;
    cfg.algo.seed = pick_seed(seed_flag);
    cfg.n_trace = n;
    rtclm::Targets targets{h6, h4};

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    Timer timer;

    auto res = rtclm::stepwise_optimize(targets, cfg);

    std::vector<std::string> outputs;
    json config{{"schema", 1},      {"h6", h6},
                {"h4", h4},         {"population", cfg.algo.population},
                {"generations", cfg.algo.generations},
                {"crossover_fraction", cfg.algo.crossover_fraction},
                {"mutation_fraction", cfg.algo.mutation_fraction},
                {"seed", cfg.algo.seed}, {"n_trace", cfg.n_trace}};
    io::write_text_atomic(dir / "config.json", config.dump(2) + "\n");
    outputs.push_back("config.json");

    if (!res.genome.empty()) {
        io::MechanismFile m;
        m.params.topology = Topology::rtclm_seven_bar;
        m.params.values = res.genome;
        if (res.design) m.branches = res.design->branches;
        io::write_mechanism(dir / "design.json", m);
        outputs.push_back("design.json");
        if (res.design) {
            json derived{{"phi_A", res.design->phi_A},
                         {"phi_H_l", res.design->phi_H_l},
                         {"phi_H_r", res.design->phi_H_r},
                         {"dy_EH", res.design->dy_EH},
                         {"a2", res.design->a2},
                         {"b2", res.design->b2},
                         {"DF", res.design->df_len},
                         {"CF", res.design->cf_len},
                         {"coupling_residual", res.design->coupling_residual}};
            json full{{"schema", 1},
                      {"achieved", {{"h6", res.achieved_h6}, {"h4", res.achieved_h4}}},
                      {"f", {res.f1, res.f2}},
                      {"derived", derived},
                      {"reached_threshold", res.reached_threshold},
                      {"target_unreached", res.target_unreached}};
            io::write_text_atomic(dir / "result.json", full.dump(2) + "\n");
            outputs.push_back("result.json");
            for (auto [mode, name] : {std::pair{rtclm::Mode::primary, "primary"},
                                      std::pair{rtclm::Mode::auxiliary, "auxiliary"}}) {
                auto t = rtclm::trace_mode(*res.design, mode, n);
                if (t) {
                    io::write_trajectory_csv(dir / ("trace_" + std::string(name) + ".csv"), *t,
                                             false);
                    outputs.push_back("trace_" + std::string(name) + ".csv");
                }
            }
        }
    }
    io::write_archive_jsonl(dir / "archive_stage1.jsonl", res.stage1);
    io::write_archive_jsonl(dir / "archive_stage2.jsonl", res.stage2);
    outputs.push_back("archive_stage1.jsonl");
    outputs.push_back("archive_stage2.jsonl");

    io::RunManifest manifest;
    manifest.command = "clm rtclm";
    manifest.config_hash = io::content_hash(config.dump());
    manifest.seed = cfg.algo.seed;
    manifest.git_describe = CLM_GIT_DESCRIBE;
    manifest.wall_time_s = timer.seconds();
    manifest.outputs = outputs;
    manifest.extrapolation = res.extrapolation;
    io::write_manifest(dir, manifest);

    std::cout << "achieved h6 = " << res.achieved_h6 << " mm (deviation "
              << std::abs(res.achieved_h6 - h6) << " mm)\n"
              << "achieved h4 = " << res.achieved_h4 << " mm (deviation "
              << std::abs(res.achieved_h4 - h4) << " mm)\n";
    if (res.extrapolation) std::cout << "warning: targets outside the demonstrated range\n";
    if (res.target_unreached) {
        std::cout << "target unreached; best-so-far written\n";
        return kExitOptimization;
    }
    return kExitOk;
}

int run_plot(const std::vector<std::string>& inputs, const std::string& out) {
    std::vector<svg::Series> series;
    std::vector<svg::Marker> markers;
    const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b"};
    std::size_t color = 0;
    for (const auto& input : inputs) {
        const fs::path path = io::resolve_fixture_path(input);
        if (path.extension() == ".jsonl") {
            auto archive = io::read_archive_jsonl(path);
            if (std::holds_alternative<io::IoError>(archive))
                return fail_input(std::get<io::IoError>(archive).message);
            const auto& a = std::get<moo::ParetoArchive>(archive);
            if (a.individuals.empty()) return fail_input("empty archive: " + input);
            std::optional<std::size_t> knee;
            auto knees = moo::knee_points(a, 1);
            if (knees.ok() && !knees->empty()) {
                for (std::size_t i = 0; i < a.individuals.size(); ++i)
                    if (a.individuals[i].genome == (*knees)[0].genome) knee = i;
            }
            svg::write(out, svg::archive_scatter(a, knee));
            std::cout << out << "\n";
            return kExitOk;
        }
        auto t = io::read_trajectory_csv(path);
        if (std::holds_alternative<io::IoError>(t))
            return fail_input(std::get<io::IoError>(t).message);
        const auto& traj = std::get<Trajectory>(t);
        svg::Series s;
        s.label = path.filename().string();
        s.color = palette[color++ % 5];
        s.points = traj.points;
        s.close = traj.closed;
        series.push_back(s);
        if (traj.closed && traj.size() >= 64 && traj.size() % 2 == 0) {
            if (auto fp = find_feature_points(traj)) {
                markers.push_back({"t1", fp->t1.point});
                markers.push_back({"t2", fp->t2.point});
                markers.push_back({"t3", fp->t3.point});
                markers.push_back({"t4", fp->t4.point});
                markers.push_back({"t5", fp->t5.point});
                if (fp->t6) markers.push_back({"t6", fp->t6->point});
                if (fp->t7) markers.push_back({"t7", fp->t7->point});
                if (fp->t8) markers.push_back({"t8", fp->t8->point});
            }
        }
    }
    if (series.empty()) return fail_input("no inputs");
    svg::write(out, svg::trajectory_plot(series, markers));
    std::cout << out << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"closed-chain leg mechanism design toolkit"};
    app.require_subcommand(1);

    // eval
    std::string mech, target, mode = "primary";
    bool as_csv = false;
    int n = 3600;
    std::optional<double> period;
    auto* eval = app.add_subcommand("eval", "evaluate a mechanism parameter file");
    eval->add_option("mechanism", mech)->required();
    eval->add_option("--target", target, "target trajectory (csv, cycloid json, or 'cycloid')");
    eval->add_flag("--csv", as_csv, "emit one CSV row instead of JSON");
    eval->add_option("--mode", mode)->check(CLI::IsMember({"primary", "auxiliary"}));
    eval->add_option("--n", n, "sample count");
    double period_value = 0.0;
    auto* period_opt = eval->add_option("--period", period_value, "drive period in seconds");

    // trace
    std::string tmech, layout, prefix = "trace";
    std::string tmode = "primary";
    bool with_wt = false;
    int tn = 360;
    auto* trace = app.add_subcommand("trace", "dump BT/WT trajectories as CSV");
    trace->add_option("mechanism", tmech)->required();
    trace->add_option("--n", tn);
    trace->add_flag("--wt", with_wt, "also write the walking trajectory");
    trace->add_option("--layout", layout, "leg layout JSON for positioned WTs");
    trace->add_option("--out", prefix, "output path prefix");
    trace->add_option("--mode", tmode)->check(CLI::IsMember({"primary", "auxiliary"}));

    // synth
    std::string topology = "stephenson1", starget, sout = "design_run";
    std::optional<std::uint64_t> seed;
    std::uint64_t seed_value = 0;
    int pop = 60, gens = 150, sn = 360, jobs = 1;
    bool single_level = false, full_budget = false;
    auto* synth = app.add_subcommand("synth", "run the hierarchical design pipeline");
    synth->add_option("--topology", topology)
        ->check(CLI::IsMember({"watt1", "stephenson1", "stephenson3", "four_bar"}));
    synth->add_option("--target", starget);
    synth->add_option("--out", sout)->required();
    auto* seed_opt = synth->add_option("--seed", seed_value);
    synth->add_option("--pop", pop);
    synth->add_option("--gens", gens, "generations per stage");
    synth->add_option("--n", sn);
    synth->add_option("--jobs", jobs, "evaluation parallelism");
    synth->add_flag("--single-level", single_level, "five-objective direct baseline");
    synth->add_flag("--full-budget", full_budget, "population 200");

    // rtclm
    double h6 = 50.0, h4 = 220.0;
    std::string rout = "rtclm_run";
    std::uint64_t rseed_value = 0;
    int rpop = 50, rgens = 50, rn = 360, rjobs = 1;
    auto* rcmd = app.add_subcommand("rtclm", "two-stage reconfigurable-mechanism design");
    rcmd->add_option("--h6", h6, "primary-mode crossing height target (mm)");
    rcmd->add_option("--h4", h4, "auxiliary-mode crossing height target (mm)");
    rcmd->add_option("--out", rout)->required();
    auto* rseed_opt = rcmd->add_option("--seed", rseed_value);
    rcmd->add_option("--pop", rpop);
    rcmd->add_option("--gens", rgens);
    rcmd->add_option("--n", rn);
    rcmd->add_option("--jobs", rjobs);

    // plot
    std::vector<std::string> plot_inputs;
    std::string svg_out = "plot.svg";
    auto* plot = app.add_subcommand("plot", "render trajectories or archives as SVG");
    plot->add_option("inputs", plot_inputs)->required();
    plot->add_option("--svg", svg_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    if (*period_opt) period = period_value;

    try {
        if (eval->parsed()) return run_eval(mech, target, as_csv, mode, n, period);
        if (trace->parsed()) return run_trace(tmech, tn, with_wt, layout, prefix, tmode);
        if (synth->parsed()) {
            if (*seed_opt) seed = seed_value;
            return run_synth(topology, starget, sout, seed, pop, gens, sn, jobs, single_level,
                             full_budget);
        }
        if (rcmd->parsed()) {
            std::optional<std::uint64_t> rs;
            if (*rseed_opt) rs = rseed_value;
            return run_rtclm(h6, h4, rout, rs, rpop, rgens, rn, rjobs);
        }
        if (plot->parsed()) return run_plot(plot_inputs, svg_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}

#include "ptc/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "ptc/oracle.hpp"
#include "ptc/serialization.hpp"

namespace ptc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Index retained_count(const RealVector& normalized_sv, double eps) {
    Index count = 0;
    for (Index i = 0; i < normalized_sv.size(); ++i)
        if (normalized_sv(i) >= eps) ++count;
    return count;
}

}  // namespace

void write_trajectory_csv(const fs::path& path, const Trajectory& t) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "t";
    for (const auto& [name, series] : t.observables)
        os << ",re_" << name << ",im_" << name;
    os << ",trace_dev\n";
    for (size_t i = 0; i < t.times.size(); ++i) {
        os << fmt17(t.times[i]);
        for (const auto& [name, series] : t.observables)
            os << "," << fmt17(series[i].real()) << "," << fmt17(series[i].imag());
        os << "," << fmt17(t.trace_deviation[i]) << "\n";
    }
}

Trajectory read_trajectory_csv(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    std::string header;
    std::getline(is, header);
    std::vector<std::string> cols;
    {
        std::stringstream ss(header);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    Trajectory t;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() != cols.size())
            throw std::runtime_error("malformed trajectory row in " + path.string());
        for (size_t c = 0; c < cols.size(); ++c) {
            if (cols[c] == "t") t.times.push_back(vals[c]);
            else if (cols[c] == "trace_dev") t.trace_deviation.push_back(vals[c]);
            else if (cols[c].rfind("re_", 0) == 0)
                t.observables[cols[c].substr(3)].emplace_back(vals[c], 0.0);
            else if (cols[c].rfind("im_", 0) == 0) {
                auto& series = t.observables[cols[c].substr(3)];
                series.back() = Complex(series.back().real(), vals[c]);
            }
        }
    }
    return t;
}

void write_spectrum_csv(const fs::path& path, const RealVector& sv) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "index,sigma_normalized\n";
    for (Index i = 0; i < sv.size(); ++i)
        os << i << "," << fmt17(sv(i)) << "\n";
}

RunSummary run_experiment(const ExperimentConfig& cfg, const fs::path& outdir,
                          int threads) {
    cfg.validate();
    fs::create_directories(outdir);
    const Index n = cfg.grid.steps();
    const auto modes = cfg.build_modes();

    const ContractionResult contraction =
        contract(modes, n, cfg.policy, cfg.plan, threads);

    const SystemPropagator sys = SystemPropagator::constant(
        cfg.system_hamiltonian(), cfg.grid.dt, n, cfg.propagation.half_step);
    const Trajectory traj = propagate(contraction.pt, sys, cfg.initial_state(),
                                      {occupation_observable()});

    write_trajectory_csv(outdir / cfg.outputs.trajectory_csv, traj);

    RunSummary summary;
    summary.scheme = cfg.plan.scheme == Scheme::tree ? "tree"
                     : cfg.plan.scheme == Scheme::sequential_preselect
                         ? "sequential_preselect"
                         : "sequential";
    summary.epsilon = cfg.policy.epsilon_max;
    summary.range_factor = cfg.policy.range_factor;
    summary.n_sweeps = cfg.policy.n_sweeps;
    summary.steps = n;
    summary.max_bond = contraction.pt.max_bond();
    summary.contraction_seconds = contraction.seconds;
    summary.combinations = static_cast<int>(contraction.records.size());
    summary.unstable = traj.unstable;
    summary.first_unstable_step = traj.first_unstable_step;

    // singular-value spectrum at the middle bond
    if (n >= 2) {
        const Index mid = std::max<Index>(1, std::min(n - 1, n / 2));
        const RealVector sv = sv_spectrum(contraction.pt, mid);
        write_spectrum_csv(outdir / cfg.outputs.spectrum_csv, sv);
        summary.mid_bond_retained = retained_count(sv, cfg.policy.epsilon_max);
    }

    // timing report: wall clock around contraction only
    {
        json jt;
        jt["total_seconds"] = contraction.seconds;
        jt["combinations"] = json::array();
        for (const auto& r : contraction.records)
            jt["combinations"].push_back({{"layer", r.layer},
                                          {"left", r.left},
                                          {"right", r.right},
                                          {"pre_max_bond", r.pre_max_bond},
                                          {"post_max_bond", r.post_max_bond},
                                          {"seconds", r.seconds}});
        std::ofstream os(outdir / cfg.outputs.timing_json);
        os << jt.dump(2) << "\n";
    }

    if (!cfg.outputs.ptmpo_cache.empty())
        save_ptmpo((outdir / cfg.outputs.ptmpo_cache).string(), contraction.pt);

    if (!cfg.outputs.reference_trajectory.empty()) {
        const Trajectory ref = read_trajectory_csv(cfg.outputs.reference_trajectory);
        summary.compression_error_vs_reference = compression_error(traj, ref);
    }

    {
        json js;
        js["scheme"] = summary.scheme;
        js["epsilon"] = summary.epsilon;
        js["range_factor"] = summary.range_factor;
        js["n_sweeps"] = summary.n_sweeps;
        js["steps"] = summary.steps;
        js["max_bond"] = summary.max_bond;
        js["mid_bond_retained"] = summary.mid_bond_retained;
        js["contraction_seconds"] = summary.contraction_seconds;
        js["combinations"] = summary.combinations;
        js["unstable"] = summary.unstable;
        js["first_unstable_step"] = summary.first_unstable_step;
        if (summary.compression_error_vs_reference >= 0)
            js["compression_error"] = summary.compression_error_vs_reference;
        js["config"] = json::parse(config_to_json(cfg));
        std::ofstream os(outdir / cfg.outputs.summary_json);
        os << js.dump(2) << "\n";
    }
    return summary;
}

CompareReport compare_runs(const fs::path& run_a, const fs::path& run_b) {
    CompareReport rep;

    auto load_summary = [](const fs::path& dir) {
        std::ifstream is(dir / "summary.json");
        if (!is) throw std::runtime_error("missing summary.json in " + dir.string());
        json j;
        is >> j;
        return j;
    };
    const json sa = load_summary(run_a);
    const json sb = load_summary(run_b);

    const Trajectory ta = read_trajectory_csv(run_a / "trajectory.csv");
    const Trajectory tb = read_trajectory_csv(run_b / "trajectory.csv");
    rep.compression_error = compression_error(ta, tb);

    rep.max_bond_ratio =
        sa.at("max_bond").get<double>() / sb.at("max_bond").get<double>();
    rep.time_ratio = sa.at("contraction_seconds").get<double>() /
                     sb.at("contraction_seconds").get<double>();

    const std::string cache_a =
        sa.at("config").at("outputs").value("ptmpo_cache", "");
    const std::string cache_b =
        sb.at("config").at("outputs").value("ptmpo_cache", "");
    if (!cache_a.empty() && !cache_b.empty() && fs::exists(run_a / cache_a) &&
        fs::exists(run_b / cache_b)) {
        const ProcessTensor pa = load_ptmpo((run_a / cache_a).string());
        const ProcessTensor pb = load_ptmpo((run_b / cache_b).string());
        rep.has_distance = true;
        rep.tensor_distance = tensor_distance(pa, pb);
        rep.cancellation_warning = rep.tensor_distance < 0;
    }
    return rep;
}

}  // namespace ptc

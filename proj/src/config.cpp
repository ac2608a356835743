#include "ptc/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ptc {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const std::string& path) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw config_error("unknown key '" + path + it.key() + "'");
}

double require_number(const json& j, const std::string& key,
                      const std::string& path) {
    if (!j.contains(key))
        throw config_error("missing field '" + path + key + "'");
    if (!j.at(key).is_number())
        throw config_error("field '" + path + key + "' must be a number");
    return j.at(key).get<double>();
}

}  // namespace

Index GridConfig::steps() const {
    const double ratio = t_end / dt;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, std::abs(ratio)))
        throw config_error("grid: t_end/dt is not an integer number of steps");
    if (rounded < 1) throw config_error("grid: fewer than one step");
    return static_cast<Index>(rounded);
}

void ExperimentConfig::validate() const {
    if (schema_version != 1) throw config_error("unsupported schema_version");
    if (model.kind != "spin_boson" && model.kind != "fermionic")
        throw config_error("model.kind must be spin_boson or fermionic");
    if (model.n_modes < 1) throw config_error("model.n_modes must be >= 1");
    grid.steps();
    try {
        policy.validate();
        plan.validate();
    } catch (const invalid_input& e) {
        throw config_error(e.what());
    }
    if (propagation.initial_state != "ground" &&
        propagation.initial_state != "excited" &&
        propagation.initial_state != "xplus" && propagation.initial_state != "mixed")
        throw config_error("propagation.initial_state must be one of "
                           "ground|excited|xplus|mixed");
    if (model.kind == "fermionic" && plan.trotter != Trotter::symmetric_alternating)
        throw config_error(
            "fermionic models require trotter = symmetric_alternating");
}

std::vector<EnvironmentMode> ExperimentConfig::build_modes() const {
    if (model.kind == "spin_boson")
        return discretize_bosonic(model.spectral_density, model.omega_max,
                                  model.n_modes, model.mode_dim, model.temperature,
                                  grid.dt, projector(2, 1));
    return fermionic_modes(model.omega_min, model.omega_max, model.n_modes,
                           grid.dt, model.initially_occupied);
}

Matrix ExperimentConfig::system_hamiltonian() const {
    return 0.5 * propagation.sx_coefficient * pauli_x() +
           0.5 * propagation.sz_coefficient * pauli_z();
}

Matrix ExperimentConfig::initial_state() const {
    Matrix rho = Matrix::Zero(2, 2);
    if (propagation.initial_state == "ground") rho(0, 0) = 1.0;
    else if (propagation.initial_state == "excited") rho(1, 1) = 1.0;
    else if (propagation.initial_state == "xplus") rho.setConstant(0.5);
    else rho = 0.5 * Matrix::Identity(2, 2);
    return rho;
}

namespace {

Scheme parse_scheme(const std::string& s) {
    if (s == "sequential") return Scheme::sequential;
    if (s == "sequential_preselect") return Scheme::sequential_preselect;
    if (s == "tree") return Scheme::tree;
    throw config_error("plan.scheme must be sequential|sequential_preselect|tree");
}

Ordering parse_ordering(const std::string& s) {
    if (s == "increasing_frequency") return Ordering::increasing_frequency;
    if (s == "decreasing_frequency") return Ordering::decreasing_frequency;
    if (s == "increasing_coupling") return Ordering::increasing_coupling;
    if (s == "random") return Ordering::random;
    if (s == "as_given") return Ordering::as_given;
    throw config_error("plan.ordering must be increasing_frequency|"
                       "decreasing_frequency|increasing_coupling|random|as_given");
}

Trotter parse_trotter(const std::string& s) {
    if (s == "first_order") return Trotter::first_order;
    if (s == "symmetric_alternating") return Trotter::symmetric_alternating;
    throw config_error("plan.trotter must be first_order|symmetric_alternating");
}

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::sequential: return "sequential";
        case Scheme::sequential_preselect: return "sequential_preselect";
        case Scheme::tree: return "tree";
    }
    return "tree";
}

std::string ordering_name(Ordering o) {
    switch (o) {
        case Ordering::increasing_frequency: return "increasing_frequency";
        case Ordering::decreasing_frequency: return "decreasing_frequency";
        case Ordering::increasing_coupling: return "increasing_coupling";
        case Ordering::random: return "random";
        case Ordering::as_given: return "as_given";
    }
    return "as_given";
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }

    ExperimentConfig cfg;
    reject_unknown(j, {"schema_version", "model", "grid", "policy", "plan",
                       "propagation", "outputs"},
                   "");
    if (!j.contains("schema_version"))
        throw config_error("missing field 'schema_version'");
    cfg.schema_version = j.at("schema_version").get<int>();

    if (!j.contains("model")) throw config_error("missing field 'model'");
    const json& jm = j.at("model");
    reject_unknown(jm,
                   {"kind", "n_modes", "omega_max", "mode_dim", "temperature",
                    "spectral_density", "omega_min", "initially_occupied"},
                   "model.");
    cfg.model.kind = jm.value("kind", "");
    cfg.model.n_modes = static_cast<int>(require_number(jm, "n_modes", "model."));
    if (cfg.model.kind == "spin_boson") {
        cfg.model.omega_max = require_number(jm, "omega_max", "model.");
        cfg.model.mode_dim =
            static_cast<Index>(require_number(jm, "mode_dim", "model."));
        cfg.model.temperature = require_number(jm, "temperature", "model.");
        if (jm.contains("spectral_density")) {
            const json& js = jm.at("spectral_density");
            reject_unknown(js, {"c_e", "c_h", "omega_e", "omega_h"},
                           "model.spectral_density.");
            cfg.model.spectral_density.c_e = require_number(js, "c_e", "sd.");
            cfg.model.spectral_density.c_h = require_number(js, "c_h", "sd.");
            cfg.model.spectral_density.omega_e = require_number(js, "omega_e", "sd.");
            cfg.model.spectral_density.omega_h = require_number(js, "omega_h", "sd.");
        }
    } else if (cfg.model.kind == "fermionic") {
        cfg.model.omega_min = require_number(jm, "omega_min", "model.");
        cfg.model.omega_max = require_number(jm, "omega_max", "model.");
        cfg.model.initially_occupied = jm.value("initially_occupied", true);
    }

    if (!j.contains("grid")) throw config_error("missing field 'grid'");
    const json& jg = j.at("grid");
    reject_unknown(jg, {"dt", "t_end"}, "grid.");
    cfg.grid.dt = require_number(jg, "dt", "grid.");
    cfg.grid.t_end = require_number(jg, "t_end", "grid.");

    if (!j.contains("policy")) throw config_error("missing field 'policy'");
    const json& jp = j.at("policy");
    reject_unknown(jp, {"epsilon", "range_factor", "n_sweeps", "preselect"},
                   "policy.");
    cfg.policy.epsilon_max = require_number(jp, "epsilon", "policy.");
    cfg.policy.range_factor = jp.value("range_factor", 1.0);
    cfg.policy.n_sweeps = jp.value("n_sweeps", 1);
    cfg.policy.preselect = jp.value("preselect", false);

    if (!j.contains("plan")) throw config_error("missing field 'plan'");
    const json& jl = j.at("plan");
    reject_unknown(jl, {"scheme", "ordering", "trotter", "seed"}, "plan.");
    cfg.plan.scheme = parse_scheme(jl.value("scheme", "tree"));
    cfg.plan.ordering =
        parse_ordering(jl.value("ordering", "increasing_frequency"));
    cfg.plan.trotter = parse_trotter(jl.value("trotter", "symmetric_alternating"));
    if (jl.contains("seed")) cfg.plan.seed = jl.at("seed").get<std::uint64_t>();

    if (j.contains("propagation")) {
        const json& jq = j.at("propagation");
        reject_unknown(jq,
                       {"sx_coefficient", "sz_coefficient", "initial_state",
                        "half_step"},
                       "propagation.");
        cfg.propagation.sx_coefficient = jq.value("sx_coefficient", 0.0);
        cfg.propagation.sz_coefficient = jq.value("sz_coefficient", 0.0);
        cfg.propagation.initial_state = jq.value("initial_state", "ground");
        cfg.propagation.half_step = jq.value("half_step", true);
    }

    if (j.contains("outputs")) {
        const json& jo = j.at("outputs");
        reject_unknown(jo,
                       {"trajectory_csv", "spectrum_csv", "timing_json",
                        "summary_json", "ptmpo_cache", "reference_trajectory"},
                       "outputs.");
        cfg.outputs.trajectory_csv = jo.value("trajectory_csv", "trajectory.csv");
        cfg.outputs.spectrum_csv = jo.value("spectrum_csv", "spectrum.csv");
        cfg.outputs.timing_json = jo.value("timing_json", "timing.json");
        cfg.outputs.summary_json = jo.value("summary_json", "summary.json");
        cfg.outputs.ptmpo_cache = jo.value("ptmpo_cache", "");
        cfg.outputs.reference_trajectory = jo.value("reference_trajectory", "");
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw config_error("cannot open config file " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return parse_config(os.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["schema_version"] = cfg.schema_version;
    json jm;
    jm["kind"] = cfg.model.kind;
    jm["n_modes"] = cfg.model.n_modes;
    jm["omega_max"] = cfg.model.omega_max;
    if (cfg.model.kind == "spin_boson") {
        jm["mode_dim"] = cfg.model.mode_dim;
        jm["temperature"] = cfg.model.temperature;
        jm["spectral_density"] = {{"c_e", cfg.model.spectral_density.c_e},
                                  {"c_h", cfg.model.spectral_density.c_h},
                                  {"omega_e", cfg.model.spectral_density.omega_e},
                                  {"omega_h", cfg.model.spectral_density.omega_h}};
    } else {
        jm["omega_min"] = cfg.model.omega_min;
        jm["initially_occupied"] = cfg.model.initially_occupied;
    }
    j["model"] = jm;
    j["grid"] = {{"dt", cfg.grid.dt}, {"t_end", cfg.grid.t_end}};
    j["policy"] = {{"epsilon", cfg.policy.epsilon_max},
                   {"range_factor", cfg.policy.range_factor},
                   {"n_sweeps", cfg.policy.n_sweeps},
                   {"preselect", cfg.policy.preselect}};
    json jl = {{"scheme", scheme_name(cfg.plan.scheme)},
               {"ordering", ordering_name(cfg.plan.ordering)},
               {"trotter", cfg.plan.trotter == Trotter::first_order
                               ? "first_order"
                               : "symmetric_alternating"}};
    if (cfg.plan.seed) jl["seed"] = *cfg.plan.seed;
    j["plan"] = jl;
    j["propagation"] = {{"sx_coefficient", cfg.propagation.sx_coefficient},
                        {"sz_coefficient", cfg.propagation.sz_coefficient},
                        {"initial_state", cfg.propagation.initial_state},
                        {"half_step", cfg.propagation.half_step}};
    j["outputs"] = {{"trajectory_csv", cfg.outputs.trajectory_csv},
                    {"spectrum_csv", cfg.outputs.spectrum_csv},
                    {"timing_json", cfg.outputs.timing_json},
                    {"summary_json", cfg.outputs.summary_json},
                    {"ptmpo_cache", cfg.outputs.ptmpo_cache},
                    {"reference_trajectory", cfg.outputs.reference_trajectory}};
    return j.dump(2);
}

}  // namespace ptc

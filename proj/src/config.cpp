#include "latrg/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "latrg/util.hpp"

namespace latrg {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw config_error("config error at " + path + ": " + what);
}

const ordered_json& require(const ordered_json& j, const std::string& path,
                            const char* key) {
    if (!j.contains(key)) fail(path + "/" + key, "missing required field");
    return j.at(key);
}

double require_number(const ordered_json& j, const std::string& path,
                      const char* key) {
    const auto& v = require(j, path, key);
    if (!v.is_number()) fail(path + "/" + key, "expected a number");
    return v.get<double>();
}

SiteSpace parse_site(const ordered_json& j, const std::string& path) {
    const std::string kind = require(j, path, "kind").get<std::string>();
    if (kind == "finite_spin") {
        auto values = require(j, path, "values").get<std::vector<double>>();
        std::vector<double> weights;
        if (j.contains("weights"))
            weights = j.at("weights").get<std::vector<double>>();
        else
            weights.assign(values.size(), 1.0);
        return SiteSpace::finite_spin(values, weights);
    }
    if (kind == "unit_interval") {
        const int order = j.value("order", 16);
        if (order < 1) fail(path + "/order", "quadrature order must be positive");
        return SiteSpace::unit_interval(order, j.value("mc_width", 0.1));
    }
    if (kind == "real_line") {
        const int order = j.value("order", 32);
        if (order < 1) fail(path + "/order", "quadrature order must be positive");
        return SiteSpace::real_line(order, j.value("mc_width", 0.5));
    }
    fail(path + "/kind", "unknown site space kind '" + kind + "'");
}

PairWeight parse_pair_weight(const ordered_json& j, const std::string& path,
                             const SiteSpace& site) {
    const std::string kind = require(j, path, "kind").get<std::string>();
    if (kind == "ising")
        return PairWeight::ising(site, require_number(j, path, "K"));
    if (kind == "matrix")
        return PairWeight::from_matrix(
            site, require(j, path, "values").get<std::vector<std::vector<double>>>());
    if (kind == "constant")
        return PairWeight::constant(site, j.value("value", 1.0));
    fail(path + "/kind", "unknown pair weight kind '" + kind + "'");
}

ExpCouplingFamily parse_exp_y(const ordered_json& j, const std::string& path) {
    const std::string kind = require(j, path, "kind").get<std::string>();
    if (kind == "constant") {
        const double v = j.value("value", 1.0);
        return ExpCouplingFamily::make([v](double) { return v; }, true);
    }
    if (kind == "affine") {
        const double a = require_number(j, path, "a");
        const double b = require_number(j, path, "b");
        return ExpCouplingFamily::make([a, b](double s) { return a + b * s; }, true);
    }
    fail(path + "/kind", "unknown exp coupling profile '" + kind + "'");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }

    ExperimentConfig cfg;
    cfg.raw = j;
    cfg.config_hash = hex64(fnv1a64(json_text));

    const auto& lat = require(j, "", "lattice");
    cfg.lattice.base = static_cast<int>(require_number(lat, "/lattice", "b"));
    cfg.lattice.dim = static_cast<int>(require_number(lat, "/lattice", "d"));
    const auto& n = require(lat, "/lattice", "n");
    if (!n.is_array() || n.size() != 2)
        fail("/lattice/n", "expected a pair [n0, n1]");
    cfg.lattice.n0 = n[0].get<int>();
    cfg.lattice.n1 = n[1].get<int>();
    try {
        cfg.lattice.validate();
    } catch (const std::exception& e) {
        fail("/lattice", e.what());
    }

    cfg.site = parse_site(require(j, "", "site"), "/site");

    const auto& act = require(j, "", "action");
    cfg.action_kind = require(act, "/action", "kind").get<std::string>();
    if (cfg.action_kind == "none") {
        cfg.family.action_at = [](const LatticeSpec&) -> ActionVariant {
            return NoAction{};
        };
    } else if (cfg.action_kind == "scalar") {
        ScalarActionParams p;
        p.lambda0 = act.value("lambda0", 0.0);
        if (act.contains("lambdas"))
            p.lambdas = act.at("lambdas").get<std::vector<double>>();
        const std::string kin = act.value("kinetic", "squared_difference");
        if (kin == "squared_difference")
            p.kinetic_form = KineticForm::SquaredDifference;
        else if (kin == "linear")
            p.kinetic_form = KineticForm::LinearAsWritten;
        else
            fail("/action/kinetic", "expected squared_difference or linear");
        try {
            p.validate();
        } catch (const std::exception& e) {
            fail("/action", e.what());
        }
        cfg.family.action_at = [p](const LatticeSpec&) -> ActionVariant { return p; };
    } else if (cfg.action_kind == "face_coupling") {
        const PairWeight w =
            parse_pair_weight(require(act, "/action", "w"), "/action/w", cfg.site);
        if (!w.nonnegative_on_nodes())
            fail("/action/w", "coupling must be non-negative");
        if (!w.symmetric_on_nodes())
            fail("/action/w", "coupling must be symmetric");
        cfg.family = make_face_coupling_family([w](const LatticeSpec&) { return w; });
    } else if (cfg.action_kind == "ultra_local") {
        const auto& wj = require(act, "/action", "w");
        auto table = require(wj, "/action/w", "values").get<std::vector<double>>();
        if (static_cast<int>(table.size()) != cfg.site.node_count())
            fail("/action/w/values", "size must match the site node count");
        for (double v : table)
            if (v < 0.0 || v > 1.0)
                fail("/action/w/values", "ultra-local weight must lie in [0,1]");
        const SiteSpace site = cfg.site;
        const SiteObservable w = SiteObservable::from_table(site, table);
        cfg.family = make_ultra_local_family([w](const LatticeSpec&) { return w; });
    } else if (cfg.action_kind == "exp_coupling") {
        if (cfg.site.kind() != SiteKind::UnitInterval)
            fail("/action", "exp_coupling requires the unit_interval site space");
        const ExpCouplingFamily h = parse_exp_y(require(act, "/action", "y"),
                                                "/action/y");
        cfg.family = make_exp_coupling_action_family(h, cfg.site);
    } else {
        fail("/action/kind", "unknown action kind '" + cfg.action_kind + "'");
    }

    const std::string bs = j.value("blockspin", std::string("decimation"));
    if (bs == "decimation")
        cfg.blockspin = BlockSpinKind::Decimation;
    else if (bs == "block_average")
        cfg.blockspin = BlockSpinKind::BlockAverage;
    else
        fail("/blockspin", "expected decimation or block_average");

    int k0_max = 1, k1_max = 0;
    if (j.contains("k_range")) {
        k0_max = j.at("k_range").value("k0_max", 1);
        k1_max = j.at("k_range").value("k1_max", 0);
        if (k0_max < 0 || k1_max < 0) fail("/k_range", "bounds must be non-negative");
    }
    for (int k0 = 0; k0 <= k0_max; ++k0)
        for (int k1 = 0; k1 <= k1_max; ++k1) cfg.k_range.push_back({k0, k1});

    if (!j.contains("seed")) fail("/seed", "missing required field (seeds are explicit)");
    cfg.seed = j.at("seed").get<std::uint64_t>();

    if (j.contains("estimator")) {
        const auto& est = j.at("estimator");
        const std::string kind = require(est, "/estimator", "kind").get<std::string>();
        if (kind == "exact") {
            ExactEstimator ex;
            ex.cap = est.value("cap", std::int64_t(1) << 24);
            cfg.exact_cap = ex.cap;
            cfg.estimator = ex;
        } else if (kind == "metropolis") {
            MetropolisEstimator mc;
            mc.seed = est.contains("seed") ? est.at("seed").get<std::uint64_t>()
                                           : cfg.seed;
            mc.burn_in_sweeps = est.value("burn_in_sweeps", 500);
            mc.measure_sweeps = est.value("measure_sweeps", 4000);
            mc.sweeps_per_measure = est.value("sweeps_per_measure", 1);
            mc.chains = est.value("chains", 4);
            mc.proposal_width = est.value("proposal_width", 0.0);
            mc.jackknife_blocks = est.value("jackknife_blocks", 32);
            cfg.estimator = mc;
        } else {
            fail("/estimator/kind", "expected exact or metropolis");
        }
    }

    static const std::set<std::string> known_tasks = {
        "rgflow",       "rp-check",     "invariance-check", "renorm-check",
        "duality-check", "correlate",   "axioms-check"};
    if (j.contains("tasks")) {
        for (const auto& t : j.at("tasks")) {
            const std::string name = t.get<std::string>();
            if (!known_tasks.count(name))
                fail("/tasks", "unknown task '" + name + "'");
            cfg.tasks.push_back(name);
        }
    }

    if (j.contains("output")) cfg.output_dir = j.at("output").value("dir", "");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace latrg

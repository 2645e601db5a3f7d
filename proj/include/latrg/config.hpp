#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "latrg/action.hpp"
#include "latrg/blockspin.hpp"
#include "latrg/gibbs.hpp"
#include "latrg/lattice.hpp"
#include "latrg/renorm.hpp"
#include "latrg/sitespace.hpp"

namespace latrg {

// One experiment: lattice + site space + action family + estimator + tasks.
// Parsed from a single JSON document; every field is echoed back into the
// report so results stay traceable, and all randomness flows from `seed`.
struct ExperimentConfig {
    LatticeSpec lattice;
    SiteSpace site;
    ActionFamily family;
    std::string action_kind;  // none|scalar|face_coupling|ultra_local|exp_coupling
    BlockSpinKind blockspin = BlockSpinKind::Decimation;
    std::vector<RefinementStep> k_range;
    Estimator estimator = ExactEstimator{};
    std::int64_t exact_cap = std::int64_t(1) << 24;
    std::uint64_t seed = 0;
    std::vector<std::string> tasks;
    std::string output_dir;

    nlohmann::ordered_json raw;
    std::string config_hash;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

}  // namespace latrg

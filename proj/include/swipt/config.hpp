#pragma once

#include "swipt/experiments.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace swipt {

struct PaprJob {
    RVec mu_grid{0.0};  // 0 means no companding
    double lo_db = 4.0;
    double hi_db = 14.0;
    double step_db = 0.25;
    double level = 1e-3;  // exceedance used for the reduction summary
};

struct BerJob {
    RVec ebn0_db{0.0, 4.0, 8.0};
    std::vector<ChannelKind> channels{ChannelKind::Awgn};
    std::vector<Technique> techniques{Technique::Baseline};
};

struct SweepJob {
    std::optional<SweepAxis> axis;
    RVec values;
};

struct RateEnergyJob {
    RVec rho;  // empty -> 0, 0.05, ..., 1
    RVec ibo_db{2.0, 4.0, 6.0, 8.0};
    double h_gain2 = 1.0;
    double p_rf_tx = 1.0;  // W
    int n_symbols = 100;
};

struct E2eJob {
    std::vector<ChannelKind> channels{ChannelKind::Awgn, ChannelKind::RiceFlat, ChannelKind::RayleighFlat,
                                      ChannelKind::RayleighMultitap};
};

struct RunConfig {
    Scenario scenario;
    int threads = 1;
    std::string out_dir = ".";
    bool svg = false;
    PaprJob papr;
    BerJob ber;
    SweepJob sweep;
    RateEnergyJob rate_energy;
    E2eJob e2e;
};

// Unknown keys and wrong types raise ConfigError naming the JSON path.
RunConfig parse_config(const nlohmann::json& j);
nlohmann::json read_config_file(const std::string& path);
RunConfig load_config(const std::string& path);

// FNV-1a over the canonical (sorted-key, compact) JSON dump; threads and out do
// not change results and are left out.
std::string config_hash(const nlohmann::json& j);

}  // namespace swipt

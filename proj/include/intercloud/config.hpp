#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "intercloud/ids.hpp"
#include "intercloud/report.hpp"

namespace intercloud::sim {

enum class ScenarioKind {
    DoubleSpend,
    Disagreement,
    Corruption,
    GossipMeasure,
    RippleTrace,
    EconomySoak,
};

const char* to_string(ScenarioKind k);

enum class TopologyType { Ring, Path, Complete, Random };

enum class GossipMode { Flood, KappaRandom };

struct GossipParams {
    int kappa = 5;
    int rounds = 3;
    SimTime delta_min = 1;
    GossipMode mode = GossipMode::Flood;
};

// Scenario configuration. The JSON schema is versioned and strict: unknown
// fields anywhere are rejected so runs stay reproducible.
struct ScenarioConfig {
    int version = 1;
    ScenarioKind kind = ScenarioKind::DoubleSpend;
    std::uint64_t seed = 1;
    std::string scheme = "hashed";

    // epoch
    SimTime t_ep = 1000;
    Epoch epochs = 2;

    // population
    std::size_t watchers = 35;
    std::size_t juniors = 12;
    std::size_t clients = 2;

    // topology over the whole population
    TopologyType topology = TopologyType::Random;
    std::size_t extra_edges = 64;
    std::size_t topo_nodes = 0;  // ripple_trace only; 0 = population size

    // swarm sizing
    double c = 35.0;
    std::uint64_t n_cap = 1u << 20;

    // stakes (µINTER)
    MicroInter stream_inter = 35 * kMicroPerInter;
    MicroInter node_stake = kMicroPerInter;
    MicroInter genesis_total = 0;  // 0 = derived from streams + stakes + slack

    // adversary
    std::size_t adversary_watchers = 0;
    Rational junior_fraction = Rational(0);
    bool suppress_pocs = true;
    bool eclipse_clients = false;

    GossipParams gossip;

    // double_spend
    std::string ds_variant = "concurrent";  // sequential | concurrent | divergent_hash
    std::int64_t ds_balance = 100;
    std::int64_t ds_amount1 = 100;
    std::int64_t ds_amount2 = 100;

    // disagreement
    std::string dis_mode = "sufficiency";  // sufficiency | necessity
    std::size_t dis_runs = 1;

    // corruption
    std::size_t colluding = 1;
    std::size_t cor_runs = 1;
    MicroInter gain_g = kMicroPerInter;
    bool covert = false;  // second attestation shown only to adversaries

    // gossip_measure
    std::size_t gm_trials = 100000;
    std::size_t gm_population = 97;  // juniors incl. the initial holder

    // ripple_trace
    std::string rt_suite = "single";  // single | random_suite
    std::size_t rt_topologies = 1000;
    std::size_t rt_max_nodes = 200;
    MicroInter fee_per_hop = 1;
    MicroInter initial_fee = 1000000;

    // economy_soak
    std::size_t soak_events = 10000;
    std::size_t soak_streams = 12;
    std::size_t soak_currencies = 3;
    std::size_t soak_nodes = 8;

    std::string inject_fault = "none";  // none | skim_treasury

    std::size_t population() const { return watchers + juniors + clients; }

    Json echo() const;

    // Throws ConfigError on schema violations (unknown/missing fields, bad
    // values, unknown kind).
    static ScenarioConfig from_json(const Json& j);
    static ScenarioConfig from_file(const std::string& path);
};

Rational parse_rational(const Json& value);  // "p/q" string or integer

}  // namespace intercloud::sim

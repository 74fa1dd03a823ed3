#include "intercloud/config.hpp"

#include <fstream>
#include <sstream>

#include "intercloud/errors.hpp"

namespace intercloud::sim {

const char* to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::DoubleSpend: return "double_spend";
        case ScenarioKind::Disagreement: return "disagreement";
        case ScenarioKind::Corruption: return "corruption";
        case ScenarioKind::GossipMeasure: return "gossip_measure";
        case ScenarioKind::RippleTrace: return "ripple_trace";
        case ScenarioKind::EconomySoak: return "economy_soak";
    }
    return "?";
}

namespace {

ScenarioKind kind_from_string(const std::string& s) {
    if (s == "double_spend") return ScenarioKind::DoubleSpend;
    if (s == "disagreement") return ScenarioKind::Disagreement;
    if (s == "corruption") return ScenarioKind::Corruption;
    if (s == "gossip_measure") return ScenarioKind::GossipMeasure;
    if (s == "ripple_trace") return ScenarioKind::RippleTrace;
    if (s == "economy_soak") return ScenarioKind::EconomySoak;
    throw ConfigError("unknown scenario kind: " + s);
}

TopologyType topology_from_string(const std::string& s) {
    if (s == "ring") return TopologyType::Ring;
    if (s == "path") return TopologyType::Path;
    if (s == "complete") return TopologyType::Complete;
    if (s == "random") return TopologyType::Random;
    throw ConfigError("unknown topology type: " + s);
}

const char* to_string(TopologyType t) {
    switch (t) {
        case TopologyType::Ring: return "ring";
        case TopologyType::Path: return "path";
        case TopologyType::Complete: return "complete";
        case TopologyType::Random: return "random";
    }
    return "?";
}

void check_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [k, v] : obj.items())
        if (!allowed.count(k)) throw ConfigError(where + ": unknown field '" + k + "'");
}

template <typename T>
void get_to(const Json& obj, const char* key, T& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    it->get_to(out);
}

}  // namespace

Rational parse_rational(const Json& value) {
    if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
    if (value.is_string()) {
        const std::string s = value.get<std::string>();
        auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return Rational(std::stoll(s));
            std::int64_t num = std::stoll(s.substr(0, slash));
            std::int64_t den = std::stoll(s.substr(slash + 1));
            if (den == 0) throw ConfigError("rational with zero denominator: " + s);
            return Rational(num, den);
        } catch (const std::invalid_argument&) {
            throw ConfigError("malformed rational: " + s);
        } catch (const std::out_of_range&) {
            throw ConfigError("rational out of range: " + s);
        }
    }
    throw ConfigError("expected rational as integer or \"p/q\" string");
}

Json ScenarioConfig::echo() const {
    Json j;
    j["version"] = version;
    j["kind"] = to_string(kind);
    j["seed"] = seed;
    j["scheme"] = scheme;
    Json epoch;
    epoch["t_ep"] = t_ep;
    epoch["epochs"] = epochs;
    j["epoch"] = epoch;
    Json pop;
    pop["watchers"] = watchers;
    pop["juniors"] = juniors;
    pop["clients"] = clients;
    j["population"] = pop;
    Json topo;
    topo["type"] = to_string(topology);
    topo["extra_edges"] = extra_edges;
    if (topo_nodes) topo["nodes"] = topo_nodes;
    j["topology"] = topo;
    Json swarm;
    swarm["c"] = c;
    swarm["n_cap"] = n_cap;
    j["swarm"] = swarm;
    Json stake;
    stake["stream_inter"] = stream_inter;
    stake["node_stake"] = node_stake;
    if (genesis_total) stake["genesis_total"] = genesis_total;
    j["stake"] = stake;
    Json adv;
    adv["watchers"] = adversary_watchers;
    {
        std::ostringstream fr;
        fr << junior_fraction;
        adv["junior_fraction"] = fr.str();
    }
    adv["suppress_pocs"] = suppress_pocs;
    adv["eclipse_clients"] = eclipse_clients;
    j["adversary"] = adv;
    Json gossip_j;
    gossip_j["kappa"] = gossip.kappa;
    gossip_j["rounds"] = gossip.rounds;
    gossip_j["delta_min"] = gossip.delta_min;
    gossip_j["mode"] = gossip.mode == GossipMode::Flood ? "flood" : "kappa_random";
    j["gossip"] = gossip_j;
    Json sc;
    switch (kind) {
        case ScenarioKind::DoubleSpend:
            sc["variant"] = ds_variant;
            sc["balance"] = ds_balance;
            sc["amount1"] = ds_amount1;
            sc["amount2"] = ds_amount2;
            break;
        case ScenarioKind::Disagreement:
            sc["mode"] = dis_mode;
            sc["runs"] = dis_runs;
            break;
        case ScenarioKind::Corruption:
            sc["colluding"] = colluding;
            sc["runs"] = cor_runs;
            sc["gain_g"] = gain_g;
            sc["covert"] = covert;
            break;
        case ScenarioKind::GossipMeasure:
            sc["trials"] = gm_trials;
            sc["population"] = gm_population;
            break;
        case ScenarioKind::RippleTrace:
            sc["suite"] = rt_suite;
            sc["topologies"] = rt_topologies;
            sc["max_nodes"] = rt_max_nodes;
            sc["fee_per_hop"] = fee_per_hop;
            sc["initial_fee"] = initial_fee;
            break;
        case ScenarioKind::EconomySoak:
            sc["events"] = soak_events;
            sc["streams"] = soak_streams;
            sc["currencies"] = soak_currencies;
            sc["nodes"] = soak_nodes;
            break;
    }
    j["scenario"] = sc;
    if (inject_fault != "none") {
        Json dbg;
        dbg["inject_fault"] = inject_fault;
        j["debug"] = dbg;
    }
    return j;
}

ScenarioConfig ScenarioConfig::from_json(const Json& j) {
    check_keys(j, {"version", "kind", "seed", "scheme", "epoch", "population", "topology",
                   "swarm", "stake", "adversary", "gossip", "scenario", "debug"},
               "config");
    ScenarioConfig c;
    if (!j.contains("version")) throw ConfigError("config: missing required field 'version'");
    j.at("version").get_to(c.version);
    if (c.version != 1) throw ConfigError("config: unsupported version");
    if (!j.contains("kind")) throw ConfigError("config: missing required field 'kind'");
    c.kind = kind_from_string(j.at("kind").get<std::string>());
    get_to(j, "seed", c.seed);
    get_to(j, "scheme", c.scheme);

    if (j.contains("epoch")) {
        const Json& e = j.at("epoch");
        check_keys(e, {"t_ep", "epochs"}, "epoch");
        get_to(e, "t_ep", c.t_ep);
        get_to(e, "epochs", c.epochs);
        if (c.t_ep == 0) throw ConfigError("epoch.t_ep must be positive");
    }
    if (j.contains("population")) {
        const Json& p = j.at("population");
        check_keys(p, {"watchers", "juniors", "clients"}, "population");
        get_to(p, "watchers", c.watchers);
        get_to(p, "juniors", c.juniors);
        get_to(p, "clients", c.clients);
    }
    if (j.contains("topology")) {
        const Json& t = j.at("topology");
        check_keys(t, {"type", "extra_edges", "nodes"}, "topology");
        if (t.contains("type")) c.topology = topology_from_string(t.at("type").get<std::string>());
        get_to(t, "extra_edges", c.extra_edges);
        get_to(t, "nodes", c.topo_nodes);
    }
    if (j.contains("swarm")) {
        const Json& s = j.at("swarm");
        check_keys(s, {"c", "n_cap"}, "swarm");
        get_to(s, "c", c.c);
        get_to(s, "n_cap", c.n_cap);
    }
    if (j.contains("stake")) {
        const Json& s = j.at("stake");
        check_keys(s, {"stream_inter", "node_stake", "genesis_total"}, "stake");
        get_to(s, "stream_inter", c.stream_inter);
        get_to(s, "node_stake", c.node_stake);
        get_to(s, "genesis_total", c.genesis_total);
    }
    if (j.contains("adversary")) {
        const Json& a = j.at("adversary");
        check_keys(a, {"watchers", "junior_fraction", "suppress_pocs", "eclipse_clients"},
                   "adversary");
        get_to(a, "watchers", c.adversary_watchers);
        if (a.contains("junior_fraction")) c.junior_fraction = parse_rational(a.at("junior_fraction"));
        get_to(a, "suppress_pocs", c.suppress_pocs);
        get_to(a, "eclipse_clients", c.eclipse_clients);
    }
    if (j.contains("gossip")) {
        const Json& g = j.at("gossip");
        check_keys(g, {"kappa", "rounds", "delta_min", "mode"}, "gossip");
        get_to(g, "kappa", c.gossip.kappa);
        get_to(g, "rounds", c.gossip.rounds);
        get_to(g, "delta_min", c.gossip.delta_min);
        if (g.contains("mode")) {
            const std::string m = g.at("mode").get<std::string>();
            if (m == "flood")
                c.gossip.mode = GossipMode::Flood;
            else if (m == "kappa_random")
                c.gossip.mode = GossipMode::KappaRandom;
            else
                throw ConfigError("gossip.mode must be flood or kappa_random");
        }
        if (c.gossip.kappa < 1) throw ConfigError("gossip.kappa must be >= 1");
        if (c.gossip.rounds < 1) throw ConfigError("gossip.rounds must be >= 1");
    }
    if (j.contains("scenario")) {
        const Json& s = j.at("scenario");
        switch (c.kind) {
            case ScenarioKind::DoubleSpend:
                check_keys(s, {"variant", "balance", "amount1", "amount2"}, "scenario");
                get_to(s, "variant", c.ds_variant);
                get_to(s, "balance", c.ds_balance);
                get_to(s, "amount1", c.ds_amount1);
                get_to(s, "amount2", c.ds_amount2);
                if (c.ds_variant != "sequential" && c.ds_variant != "concurrent" &&
                    c.ds_variant != "divergent_hash")
                    throw ConfigError("double_spend variant must be sequential, concurrent or "
                                      "divergent_hash");
                break;
            case ScenarioKind::Disagreement:
                check_keys(s, {"mode", "runs"}, "scenario");
                get_to(s, "mode", c.dis_mode);
                get_to(s, "runs", c.dis_runs);
                if (c.dis_mode != "sufficiency" && c.dis_mode != "necessity")
                    throw ConfigError("disagreement mode must be sufficiency or necessity");
                break;
            case ScenarioKind::Corruption:
                check_keys(s, {"colluding", "runs", "gain_g", "covert"}, "scenario");
                get_to(s, "colluding", c.colluding);
                get_to(s, "runs", c.cor_runs);
                get_to(s, "gain_g", c.gain_g);
                get_to(s, "covert", c.covert);
                break;
            case ScenarioKind::GossipMeasure:
                check_keys(s, {"trials", "population"}, "scenario");
                get_to(s, "trials", c.gm_trials);
                get_to(s, "population", c.gm_population);
                break;
            case ScenarioKind::RippleTrace:
                check_keys(s, {"suite", "topologies", "max_nodes", "fee_per_hop", "initial_fee"},
                           "scenario");
                get_to(s, "suite", c.rt_suite);
                get_to(s, "topologies", c.rt_topologies);
                get_to(s, "max_nodes", c.rt_max_nodes);
                get_to(s, "fee_per_hop", c.fee_per_hop);
                get_to(s, "initial_fee", c.initial_fee);
                if (c.rt_suite != "single" && c.rt_suite != "random_suite")
                    throw ConfigError("ripple_trace suite must be single or random_suite");
                break;
            case ScenarioKind::EconomySoak:
                check_keys(s, {"events", "streams", "currencies", "nodes"}, "scenario");
                get_to(s, "events", c.soak_events);
                get_to(s, "streams", c.soak_streams);
                get_to(s, "currencies", c.soak_currencies);
                get_to(s, "nodes", c.soak_nodes);
                break;
        }
    }
    if (j.contains("debug")) {
        const Json& d = j.at("debug");
        check_keys(d, {"inject_fault"}, "debug");
        get_to(d, "inject_fault", c.inject_fault);
        if (c.inject_fault != "none" && c.inject_fault != "skim_treasury")
            throw ConfigError("debug.inject_fault must be none or skim_treasury");
    }
    return c;
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    Json j;
    try {
        j = Json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return from_json(j);
}

}  // namespace intercloud::sim

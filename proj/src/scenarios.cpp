#include <algorithm>
#include <numeric>
#include <sstream>

#include "intercloud/errors.hpp"
#include "intercloud/simnet.hpp"

namespace intercloud::sim {

namespace {

constexpr StreamId kWatched = kWatchedStreamId;
constexpr StreamId kReceiverB = kReceiverBId;
constexpr StreamId kReceiverC = kReceiverCId;
constexpr CoinId kCoin = kCurrencyStreamId;

Digest nonce_digest(std::uint64_t n) {
    Encoder e;
    e.tag("intercloud.nonce.v1").u64(n);
    return sha256(e.view());
}

std::string rational_str(const Rational& r) {
    std::ostringstream out;
    out << r;
    return out.str();
}

RunReport base_report(const ScenarioConfig& cfg) {
    RunReport rep;
    rep.kind = to_string(cfg.kind);
    rep.seed = cfg.seed;
    rep.config_echo = cfg.echo();
    return rep;
}

void harvest_world(const SimWorld& w, RunReport& rep) {
    rep.colour_timeline.insert(rep.colour_timeline.end(), w.timeline.begin(), w.timeline.end());
    for (const auto& [key, cert] : w.world_certificates) rep.certificates.push_back(to_json(cert));
    for (const auto& poc : w.world_pocs) {
        Json j = to_json(poc);
        Json fwd = Json::array();
        auto it = w.poc_forwarders.find(poc.id());
        if (it != w.poc_forwarders.end())
            for (NodeId v : it->second) fwd.push_back(v.value);
        j["forwarders"] = std::move(fwd);
        const LotteryPool* pool = w.ledger.pool(poc.id());
        Json tickets = Json::array();
        if (pool != nullptr)
            for (NodeId v : pool->tickets) tickets.push_back(v.value);
        j["tickets"] = std::move(tickets);
        rep.pocs.push_back(std::move(j));
    }
    auto audit = w.ledger.audit();
    Json a;
    a["expected"] = audit.expected;
    a["actual"] = audit.actual;
    a["conserved"] = audit.conserved;
    a["backing_ok"] = !audit.backing_violator.has_value();
    rep.conservation_audits.push_back(std::move(a));
    if (!audit.conserved) rep.violations.push_back("conservation sum drifted");
    if (audit.backing_violator)
        rep.violations.push_back("backing violated at stream " +
                                 std::to_string(audit.backing_violator->value));
}

Json decisions_json(const SimWorld& w) {
    Json arr = Json::array();
    for (const auto& d : w.client_decisions) {
        Json j;
        j["client"] = d.client.value;
        j["stream"] = d.stream.value;
        j["epoch"] = d.epoch;
        j["has_certificate"] = d.has_certificate;
        if (d.has_certificate) j["hash"] = d.hash.hex();
        j["accepted"] = d.accepted;
        arr.push_back(std::move(j));
    }
    return arr;
}

}  // namespace

RunReport run_double_spend(const ScenarioConfig& cfg) {
    RunReport rep = base_report(cfg);
    SimWorld w(cfg);
    w.begin_epoch();
    const SimTime t0 = w.now();

    TransferRequest tx1{kWatched, kReceiverB, kCoin, cfg.ds_amount1, 1, nonce_digest(cfg.seed * 2 + 1)};
    TransferRequest tx2{kWatched, kReceiverC, kCoin, cfg.ds_amount2, 1, nonce_digest(cfg.seed * 2 + 2)};
    if (cfg.ds_variant == "sequential") tx2.lamport_ts = 2;

    // The (honest) Executor serialises concurrent requests and validates each
    // against the post-state of earlier ones.
    auto order = serialize_concurrent({tx1, tx2});
    Json tx_results = Json::array();
    for (std::size_t i = 0; i < order.size(); ++i) {
        auto result = w.ledger.transfer(order[i], t0 + 1 + i);
        Json j;
        j["to"] = order[i].to.value;
        j["amount"] = order[i].amount;
        if (std::holds_alternative<TransferApplied>(result)) {
            j["applied"] = true;
            j["delta"] = std::get<TransferApplied>(result).delta;
        } else {
            j["applied"] = false;
            j["reason"] = to_string(std::get<TransferReject>(result));
        }
        tx_results.push_back(std::move(j));
    }

    std::size_t pocs_before = w.world_pocs.size();
    if (cfg.ds_variant == "divergent_hash") {
        // An adversarial watcher presents a divergent head claim before the
        // Executor's announcement: it signs the canonical hash and a
        // fabricated one, an equivocation honest observers turn into a PoC.
        auto adversaries = w.swarm_members(kWatched, true);
        if (adversaries.empty())
            throw ConfigError("divergent_hash needs at least one adversarial watcher");
        Digest canonical = w.ledger.stream(kWatched).head_hash();
        Encoder e;
        e.tag("intercloud.fakehead.v1").u64(cfg.seed);
        Digest divergent = sha256(e.view());
        for (NodeId a : adversaries) {
            w.broadcast_from(a, w.make_attest_item(a, kWatched, canonical), t0 + 3);
            w.broadcast_from(a, w.make_attest_item(a, kWatched, divergent), t0 + 4);
        }
        // Announce well after the equivocation has flooded.
        w.announce_head(kWatched, canonical, t0 + cfg.t_ep / 2);
    } else {
        w.announce_head(kWatched, w.ledger.stream(kWatched).head_hash(), t0 + 4);
    }

    w.run_to_epoch_end();
    Epoch ep = w.current_epoch();
    std::size_t green_certs = w.world_certificates.count({kWatched, ep});
    std::size_t client_certs = 0;
    for (const auto& d : w.client_decisions)
        if (d.has_certificate) ++client_certs;

    rep.stats["variant"] = cfg.ds_variant;
    rep.stats["transactions"] = tx_results;
    rep.stats["green_certificates"] = green_certs;
    rep.stats["client_certificates"] = client_certs;
    rep.stats["pocs"] = w.world_pocs.size() - pocs_before;
    rep.stats["colour"] = to_string(w.colour(kWatched));
    rep.stats["conflicting_finality"] = w.conflicting_finality_count(kWatched, ep);
    rep.stats["client_decisions"] = decisions_json(w);

    w.begin_epoch();  // closes the epoch; Red streams reset to Yellow here
    harvest_world(w, rep);
    return rep;
}

namespace {

struct DisagreementOutcome {
    std::size_t conflicting = 0;
    bool equivocated = false;
    bool pocs_at_all_clients = false;
    Colour colour = Colour::Yellow;
    std::vector<ColourEvent> timeline;
};

DisagreementOutcome disagreement_run(const ScenarioConfig& cfg, std::uint64_t run_seed) {
    ScenarioConfig run_cfg = cfg;
    run_cfg.seed = run_seed;
    const std::size_t n = cfg.watchers;
    const std::size_t supermajority_break = 2 * n / 3 + 1;  // > 2n/3

    Rng strategy_rng(run_seed ^ 0xd1a9);
    const bool sufficiency = cfg.dis_mode == "sufficiency";
    if (sufficiency) {
        run_cfg.adversary_watchers = supermajority_break;
        run_cfg.eclipse_clients = true;
    } else {
        // Necessity: adversary never exceeds 2n/3 and each client keeps at
        // least one honest path.
        run_cfg.adversary_watchers = std::size_t(strategy_rng.uniform(2 * n / 3 + 1));
        run_cfg.eclipse_clients = false;
    }

    SimWorld w(run_cfg);
    w.begin_epoch();
    const SimTime t0 = w.now();
    const Epoch ep = w.current_epoch();
    const auto swarm = w.swarm(kWatched);
    const std::size_t m1 = supermajority(swarm.size());
    auto adversaries = w.swarm_members(kWatched, true);
    auto honest = w.swarm_members(kWatched, false);
    auto clients = w.clients();
    if (clients.size() < 2) throw ConfigError("disagreement needs two clients");
    NodeId c1 = clients[0];
    NodeId c2 = clients[1];

    Encoder e1, e2;
    e1.tag("intercloud.h1").u64(run_seed);
    e2.tag("intercloud.h2").u64(run_seed);
    const Digest h1 = sha256(e1.view());
    const Digest h2 = sha256(e2.view());
    const Digest h0 = w.ledger.stream(kWatched).head_hash();

    DisagreementOutcome out;

    if (sufficiency) {
        // Phase 2 precondition (II): both clients eclipsed from all honest nodes.
        w.node(c1).eclipsed = true;
        w.node(c2).eclipsed = true;

        // Phase 1: every controlled member signs both hashes; the resulting
        // PoCs stay inside the adversary (suppressed).
        out.equivocated = true;
        std::vector<std::size_t> items_h1, items_h2;
        for (NodeId a : adversaries) {
            items_h1.push_back(w.make_attest_item(a, kWatched, h1));
            items_h2.push_back(w.make_attest_item(a, kWatched, h2));
        }
        // Phase 2: one-sided delivery to each client.
        for (std::size_t i = 0; i < adversaries.size(); ++i) {
            w.deliver(c1, items_h1[i], t0 + 2, adversaries[i]);
            w.deliver(c2, items_h2[i], t0 + 2, adversaries[i]);
        }
        // Phase 3: fabricated gossip digests. Each member claims the rest of
        // the coalition and, when the coalition alone is one short of M1,
        // additionally claims an honest member's attestation.
        for (NodeId a : adversaries) {
            std::set<NodeId> peers1, peers2;
            for (NodeId b : adversaries)
                if (b != a) {
                    peers1.insert(b);
                    peers2.insert(b);
                }
            for (NodeId h : honest) {
                if (peers1.size() >= m1) break;
                peers1.insert(h);
                peers2.insert(h);
            }
            w.deliver(c1, w.make_digest_item(a, kWatched, h1, peers1), t0 + 3, a);
            w.deliver(c2, w.make_digest_item(a, kWatched, h2, peers2), t0 + 3, a);
        }
        // Phase 4 (suppression) is the adversary's default behaviour.
        w.announce_head(kWatched, h0, t0 + 2);
    } else {
        // Randomised adversary inside ¬(I)∧¬(II): partial eclipse, head
        // races, selective equivocation, fabricated digests.
        for (NodeId c : {c1, c2}) {
            NodeState& client = w.node(c);
            client.eclipsed = true;
            std::vector<NodeId> honest_neighbours;
            for (std::size_t nb : w.topology_neighbours(c))
                if (!w.node(NodeId{nb}).adversary) honest_neighbours.push_back(NodeId{nb});
            if (honest_neighbours.empty()) {
                client.eclipsed = false;  // cannot eclipse without severing all paths
            } else {
                client.allowed_honest.insert(
                    honest_neighbours[strategy_rng.uniform(honest_neighbours.size())]);
            }
        }
        const bool equivocate = !adversaries.empty() && strategy_rng.chance(0.8);
        const bool race_heads = strategy_rng.chance(0.5);
        if (race_heads && !honest.empty()) {
            // Fake head presented to a few honest watchers before the real one.
            std::size_t k = 1 + strategy_rng.uniform(std::min<std::size_t>(honest.size(), 3));
            for (std::size_t i = 0; i < k; ++i) {
                NodeId target = honest[strategy_rng.uniform(honest.size())];
                w.deliver(target, w.make_announce_item(kWatched, h1), t0 + 1, target);
            }
        }
        if (equivocate) {
            out.equivocated = true;
            for (NodeId a : adversaries) {
                std::size_t i1 = w.make_attest_item(a, kWatched, h1);
                std::size_t i2 = w.make_attest_item(a, kWatched, h2);
                // Sides go to disjoint honest targets; honest re-gossip leaks
                // them network-wide, which is the point of the theorem.
                if (!honest.empty()) {
                    w.deliver(honest[strategy_rng.uniform(honest.size())], i1, t0 + 2, a);
                    w.deliver(honest[strategy_rng.uniform(honest.size())], i2, t0 + 2, a);
                }
                w.deliver(c1, i1, t0 + 2, a);
                w.deliver(c2, i2, t0 + 2, a);
            }
            // Fabricated digests towards the clients.
            for (NodeId a : adversaries) {
                std::set<NodeId> peers;
                for (NodeId b : adversaries)
                    if (b != a) peers.insert(b);
                for (NodeId h : honest) {
                    if (peers.size() >= m1) break;
                    peers.insert(h);
                }
                w.deliver(c1, w.make_digest_item(a, kWatched, h1, peers), t0 + 3, a);
                w.deliver(c2, w.make_digest_item(a, kWatched, h2, peers), t0 + 3, a);
            }
        }
        w.announce_head(kWatched, h0, t0 + 4);
    }

    w.run_to_epoch_end();
    out.conflicting = w.conflicting_finality_count(kWatched, ep);
    out.colour = w.colour(kWatched);
    if (out.equivocated) {
        bool all = true;
        for (NodeId c : {c1, c2})
            if (w.node(c).in_pocs.empty()) all = false;
        out.pocs_at_all_clients = all;
    }
    w.begin_epoch();
    out.timeline = w.timeline;
    return out;
}

}  // namespace

RunReport run_disagreement(const ScenarioConfig& cfg) {
    RunReport rep = base_report(cfg);
    std::size_t total_conflicting = 0;
    std::size_t runs_with_conflict = 0;
    std::size_t equivocation_runs = 0;
    std::size_t pocs_delivered_runs = 0;
    for (std::size_t i = 0; i < cfg.dis_runs; ++i) {
        auto out = disagreement_run(cfg, cfg.seed + i);
        total_conflicting += out.conflicting;
        if (out.conflicting > 0) ++runs_with_conflict;
        if (out.equivocated) {
            ++equivocation_runs;
            if (out.pocs_at_all_clients) ++pocs_delivered_runs;
        }
        if (i == 0)
            for (const auto& ev : out.timeline) rep.colour_timeline.push_back(ev);
    }
    rep.stats["mode"] = cfg.dis_mode;
    rep.stats["runs"] = cfg.dis_runs;
    rep.stats["conflicting_finality_total"] = total_conflicting;
    rep.stats["runs_with_conflict"] = runs_with_conflict;
    rep.stats["equivocation_runs"] = equivocation_runs;
    rep.stats["runs_pocs_delivered_to_all_clients"] = pocs_delivered_runs;
    return rep;
}

RunReport run_corruption(const ScenarioConfig& cfg) {
    RunReport rep = base_report(cfg);
    Json runs = Json::array();
    Rational payoff_sum = 0;
    std::size_t corrupt_nodes = 0;
    std::size_t evaded = 0;
    MicroInter stake_each = cfg.node_stake;
    bool red_seen = false;
    bool suppressors_paid = false;

    for (std::size_t r = 0; r < cfg.cor_runs; ++r) {
        ScenarioConfig run_cfg = cfg;
        run_cfg.seed = cfg.seed + r;
        run_cfg.adversary_watchers = std::max(run_cfg.adversary_watchers, cfg.colluding);
        // Covert runs need adversarial juniors to receive the hidden side.
        if (cfg.covert && run_cfg.junior_fraction == 0)
            run_cfg.junior_fraction = Rational(1, 3);
        SimWorld w(run_cfg);
        w.begin_epoch();
        const SimTime t0 = w.now();
        const Epoch ep = w.current_epoch();
        auto adversaries = w.swarm_members(kWatched, true);
        if (adversaries.size() < cfg.colluding)
            throw ConfigError("corruption: colluding exceeds adversarial watchers");
        adversaries.resize(cfg.colluding);

        const Digest h0 = w.ledger.stream(kWatched).head_hash();
        Encoder e;
        e.tag("intercloud.corrupt").u64(run_cfg.seed);
        const Digest h_fake = sha256(e.view());

        std::vector<NodeId> adv_juniors;
        for (std::size_t i = 0; i < w.node_count(); ++i) {
            const NodeState& n = w.node(NodeId{i});
            if (n.role == Role::Junior && n.adversary) adv_juniors.push_back(n.id);
        }

        for (NodeId a : adversaries) {
            std::size_t first = w.make_attest_item(a, kWatched, h0);
            std::size_t second = w.make_attest_item(a, kWatched, h_fake);
            w.broadcast_from(a, first, t0 + 1);
            if (cfg.covert) {
                // The conflicting side is shown only to fellow adversaries,
                // who suppress it: detection is impossible this epoch.
                for (NodeId j : adv_juniors) w.deliver(j, second, t0 + 2, a);
            } else {
                w.broadcast_from(a, second, t0 + 2);
            }
        }
        w.announce_head(kWatched, h0, t0 + cfg.t_ep / 2);
        w.run_to_epoch_end();

        std::set<NodeId> implicated = w.world_lol.implicated(kWatched, ep);
        Colour colour = w.colour(kWatched);
        red_seen = red_seen || colour == Colour::Red;
        std::size_t certs = w.world_certificates.count({kWatched, ep});

        w.begin_epoch();  // convictions, slashing, draws, Red → Yellow
        Colour after = w.colour(kWatched);

        Rational run_payoff = 0;
        for (NodeId a : adversaries) {
            ++corrupt_nodes;
            bool convicted = implicated.count(a) > 0;
            if (convicted) {
                run_payoff += Rational(cfg.gain_g) - Rational(stake_each);
            } else {
                ++evaded;
                run_payoff += Rational(cfg.gain_g);
            }
        }
        payoff_sum += run_payoff;

        for (NodeId j : adv_juniors)
            if (w.ledger.lottery_winnings(j) > 0) suppressors_paid = true;

        Json jr;
        jr["seed"] = run_cfg.seed;
        jr["colluding"] = cfg.colluding;
        jr["implicated"] = implicated.size();
        jr["colour_at_epoch_end"] = to_string(colour);
        jr["colour_after_shuffle"] = to_string(after);
        jr["green_certificates"] = certs;
        jr["pocs"] = w.world_pocs.size();
        runs.push_back(std::move(jr));
        if (r == 0) {
            rep.colour_timeline = w.timeline;
            harvest_world(w, rep);
        }
    }

    Rational p_evade = corrupt_nodes == 0 ? Rational(0) : Rational(evaded, corrupt_nodes);
    Rational mean_payoff = corrupt_nodes == 0 ? Rational(0) : payoff_sum / corrupt_nodes;
    Rational bound = corrupt_payoff_bound(Rational(cfg.gain_g), Rational(stake_each), p_evade);

    // Compartmentalisation bound for the configured swarm.
    std::vector<MicroInter> stakes(cfg.watchers, stake_each);
    BribeBound bribe = min_supermajority_bribe(stakes);

    rep.stats["runs"] = runs;
    rep.stats["corrupt_nodes"] = corrupt_nodes;
    rep.stats["evaded"] = evaded;
    rep.stats["p_evade"] = rational_str(p_evade);
    rep.stats["mean_payoff"] = rational_str(mean_payoff);
    rep.stats["payoff_bound"] = rational_str(bound);
    rep.stats["payoff_within_bound"] = mean_payoff <= bound;
    rep.stats["red_seen"] = red_seen;
    rep.stats["suppressors_paid"] = suppressors_paid;
    rep.stats["min_bribe"] = bribe.total.convert_to<std::string>();
    rep.stats["bribe_exceeds_two_thirds_inter"] =
        bribe_exceeds_two_thirds(bribe, cfg.stream_inter);
    return rep;
}

RunReport run_gossip_measure(const ScenarioConfig& cfg) {
    RunReport rep = base_report(cfg);
    Rng rng(cfg.seed);
    Rational f_j = cfg.junior_fraction == 0 ? Rational(1, 3) : cfg.junior_fraction;
    GossipCell cell = run_gossip_cell(rng, f_j, cfg.gossip.kappa, cfg.gossip.rounds,
                                      cfg.gm_trials, cfg.gm_population);
    rep.stats["f_j"] = rational_str(cell.f_j);
    rep.stats["kappa"] = cell.kappa;
    rep.stats["rounds"] = cell.rounds;
    rep.stats["trials"] = cell.trials;
    rep.stats["non_delivered"] = cell.non_delivered;
    rep.stats["empirical_rate"] = cell.empirical();
    rep.stats["analytic_bound"] = cell.bound();
    return rep;
}

RunReport run_ripple_trace(const ScenarioConfig& cfg) {
    RunReport rep = base_report(cfg);
    Rng rng(cfg.seed);

    auto run_one = [&](const Graph& g, std::size_t origin, MicroInter budget, Epoch ep,
                       std::vector<SeenTable>* reuse) {
        std::vector<SeenTable> local(g.size());
        std::vector<SeenTable>& tables = reuse ? *reuse : local;
        RippleMessage msg;
        Encoder e;
        e.tag("intercloud.ripple.payload").u64(rng.next_u64());
        msg.rid = RippleId{StreamId{origin}, sha256(e.view()), ep};
        msg.fee_remaining = budget;
        RippleTrace trace = trace_ripple(g, tables, origin, msg, ep, cfg.fee_per_hop);
        Json j;
        j["nodes"] = g.size();
        j["edges"] = g.edge_count();
        j["origin"] = origin;
        j["processed"] = trace.nodes_processed;
        j["max_hops"] = trace.max_hops;
        j["duplicates_discarded"] = trace.duplicates_discarded;
        j["fee_exhausted"] = trace.fee_exhausted;
        j["quiescent"] = trace.quiescent;
        rep.ripple_traces.push_back(j);
        return trace;
    };

    if (cfg.rt_suite == "single") {
        std::size_t n = cfg.topo_nodes ? cfg.topo_nodes : cfg.population();
        Graph g(0);
        switch (cfg.topology) {
            case TopologyType::Ring: g = Graph::ring(n); break;
            case TopologyType::Path: g = Graph::path(n); break;
            case TopologyType::Complete: g = Graph::complete(n); break;
            case TopologyType::Random: g = Graph::random_connected(rng, n, cfg.extra_edges); break;
        }
        run_one(g, 0, cfg.initial_fee, 1, nullptr);
        rep.stats["suite"] = "single";
        return rep;
    }

    std::size_t violations = 0;
    std::uint64_t max_hops_seen = 0;
    std::size_t retention_checks = 0;
    for (std::size_t t = 0; t < cfg.rt_topologies; ++t) {
        std::size_t n = 2 + rng.uniform(cfg.rt_max_nodes - 1);
        Graph g = Graph::random_connected(rng, n, rng.uniform(2 * n + 1));
        std::size_t origin = rng.uniform(n);
        std::vector<SeenTable> tables(g.size());
        RippleMessage msg;
        Encoder e;
        e.tag("intercloud.ripple.payload").u64(rng.next_u64());
        RippleId rid{StreamId{origin}, sha256(e.view()), 5};
        msg.rid = rid;
        msg.fee_remaining = cfg.initial_fee;
        RippleTrace trace = trace_ripple(g, tables, origin, msg, 5, cfg.fee_per_hop);
        max_hops_seen = std::max(max_hops_seen, trace.max_hops);
        bool ok = trace.quiescent && trace.max_hops <= n && trace.nodes_processed == n &&
                  trace.duplicates_discarded == 2 * g.edge_count() - (n - 1);
        if (!ok) {
            ++violations;
            rep.violations.push_back("ripple trace violation at topology " + std::to_string(t));
        }
        // Cross-epoch retention: duplicates from epoch 5 must be dropped
        // during epochs 5 and 6, and the entry must be gone at 7.
        if (t % 97 == 0) {
            ++retention_checks;
            std::size_t probe = rng.uniform(n);
            auto again5 = process_ripple(tables[probe], msg, 5, g.neighbours(probe), cfg.fee_per_hop);
            tables[probe].evict(6);
            auto again6 = process_ripple(tables[probe], msg, 6, g.neighbours(probe), cfg.fee_per_hop);
            tables[probe].evict(7);
            bool gone = !tables[probe].contains(rid);
            if (again5.discarded != RippleDiscard::DuplicateRid ||
                again6.discarded != RippleDiscard::DuplicateRid || !gone) {
                ++violations;
                rep.violations.push_back("retention violation at topology " + std::to_string(t));
            }
        }
    }
    rep.stats["suite"] = "random_suite";
    rep.stats["topologies"] = cfg.rt_topologies;
    rep.stats["max_hops_seen"] = max_hops_seen;
    rep.stats["retention_checks"] = retention_checks;
    rep.stats["violations"] = violations;
    return rep;
}

RunReport run_economy_soak(const ScenarioConfig& cfg) {
    RunReport rep = base_report(cfg);
    const SignatureScheme& scheme = SignatureScheme::by_name(cfg.scheme);
    Ledger ledger(scheme);
    Rng rng(cfg.seed);

    const StreamId genesis{1'000'000};
    const MicroInter per_stream = 50 * kMicroPerInter;
    const MicroInter per_reserve = 200 * kMicroPerInter;
    const MicroInter per_stake = 10 * kMicroPerInter;
    const MicroInter treasury_seed = 100 * kMicroPerInter;
    MicroInter total = treasury_seed + 100 * kMicroPerInter;
    total += MicroInter(cfg.soak_streams + cfg.soak_nodes) * per_stream;
    total += MicroInter(cfg.soak_currencies) * per_reserve;
    total += MicroInter(cfg.soak_nodes) * per_stake;
    ledger.create_genesis_stream(genesis, total);
    ledger.fund_treasury(genesis, treasury_seed);

    std::vector<StreamId> plain;
    for (std::size_t i = 0; i < cfg.soak_streams; ++i) {
        StreamId id{10 + i};
        ledger.create_stream(id, RulesKind::Plain, per_stream, genesis);
        plain.push_back(id);
    }
    std::vector<StreamId> wallets;
    std::vector<NodeId> soak_nodes;
    std::map<std::uint64_t, KeyPair> node_keys;
    for (std::size_t i = 0; i < cfg.soak_nodes; ++i) {
        NodeId node{500 + i};
        StreamId wallet{1000 + i};
        ledger.create_stream(wallet, RulesKind::Plain, per_stream, genesis);
        ledger.create_vesting(node, per_stake, genesis);
        Encoder e;
        e.tag("intercloud.soaknode").u64(node.value);
        node_keys.emplace(node.value, scheme.keypair_from_seed(sha256(e.view()).view()));
        soak_nodes.push_back(node);
        wallets.push_back(wallet);
    }
    std::vector<CoinId> coins;
    std::vector<StreamId> reserve_ops;
    for (std::size_t i = 0; i < cfg.soak_currencies; ++i) {
        CoinId coin{2'000'000 + i};
        ledger.create_currency_stream(coin, per_reserve, genesis);
        coins.push_back(coin);
        // A dedicated operator stream holds the rate-limited reserve relation.
        StreamId op{3000 + i};
        ledger.create_stream(op, RulesKind::Plain, per_stream, genesis);
        reserve_ops.push_back(op);
        ledger.relations().relate(op, coin, RateLimit::linear(20 * kMicroPerInter, cfg.t_ep),
                                  {coin}, 0);
    }
    std::vector<StreamId> all_holders = plain;
    all_holders.insert(all_holders.end(), wallets.begin(), wallets.end());
    // Relation mesh: each holder can pay a handful of others in every coin.
    std::set<CoinId> permitted(coins.begin(), coins.end());
    for (std::size_t i = 0; i < all_holders.size(); ++i) {
        for (std::size_t k = 1; k <= 3; ++k) {
            StreamId to = all_holders[(i + k) % all_holders.size()];
            if (to == all_holders[i]) continue;
            ledger.relations().relate(all_holders[i], to,
                                      RateLimit::linear(40 * kMicroPerInter, cfg.t_ep),
                                      permitted, 0);
        }
    }

    KeyLookup keys = [&](NodeId id) -> const PublicKey* {
        auto it = node_keys.find(id.value);
        return it == node_keys.end() ? nullptr : &it->second.pub;
    };

    std::size_t applied = 0, rejected = 0, audits_failed = 0;
    Epoch soak_epoch = 0;
    SimTime now = 1;
    std::uint64_t nonce_counter = 1;
    std::vector<Digest> pending_pools;

    const std::size_t fault_at =
        cfg.inject_fault == "skim_treasury" ? cfg.soak_events / 2 : cfg.soak_events + 1;

    for (std::size_t ev = 0; ev < cfg.soak_events; ++ev) {
        now += 1 + rng.uniform(5);
        if (ev == fault_at) ledger.inject_fault_skim_treasury(7);
        std::uint64_t roll = rng.uniform(100);
        if (roll < 50) {
            // transfer
            StreamId from = all_holders[rng.uniform(all_holders.size())];
            auto rels = ledger.relations().from(from);
            if (!rels.empty()) {
                const Relation* rel = rels[rng.uniform(rels.size())];
                CoinId coin = coins[rng.uniform(coins.size())];
                const auto& cinfo = ledger.currencies().at(coin);
                auto bal = ledger.stream(from).balances.find(coin);
                if (cinfo.supply() > 0 && bal != ledger.stream(from).balances.end()) {
                    ExchangeRate rate = ledger.exchange_rate(coin);
                    std::int64_t g = std::gcd(rate.numerator, rate.denominator);
                    std::int64_t step = rate.denominator / g;
                    std::int64_t max_k = bal->second / step;
                    if (max_k > 0) {
                        TransferRequest req{from, rel->to, coin,
                                            step * std::int64_t(1 + rng.uniform(
                                                       std::min<std::int64_t>(max_k, 4))),
                                            nonce_counter, nonce_digest(nonce_counter)};
                        ++nonce_counter;
                        auto result = ledger.transfer(req, now);
                        std::holds_alternative<TransferApplied>(result) ? ++applied : ++rejected;
                    }
                }
            }
        } else if (roll < 63) {
            CoinId coin = coins[rng.uniform(coins.size())];
            StreamId rcpt = all_holders[rng.uniform(all_holders.size())];
            auto out = ledger.emit(coin, 1 + std::int64_t(rng.uniform(20)), rcpt, now);
            out == EmitOutcome::Ok ? ++applied : ++rejected;
        } else if (roll < 72) {
            CoinId coin = coins[rng.uniform(coins.size())];
            StreamId holder = all_holders[rng.uniform(all_holders.size())];
            auto bal = ledger.stream(holder).balances.find(coin);
            if (bal != ledger.stream(holder).balances.end() && bal->second > 0) {
                auto out = ledger.retire(coin, 1 + std::int64_t(rng.uniform(bal->second)), holder,
                                         now);
                out == RetireOutcome::Ok ? ++applied : ++rejected;
            }
        } else if (roll < 80) {
            std::size_t ci = rng.uniform(coins.size());
            Relation* rel = ledger.relations().find(reserve_ops[ci], coins[ci]);
            MicroInter delta = MicroInter(1 + rng.uniform(10'000'000));
            if (rng.chance(0.5)) delta = -delta;
            auto out = ledger.adjust_reserve(coins[ci], delta, reserve_ops[ci], *rel, now);
            out == AdjustOutcome::Ok ? ++applied : ++rejected;
        } else if (roll < 86) {
            NodeId node = soak_nodes[rng.uniform(soak_nodes.size())];
            auto out = ledger.vest_accrue_from_treasury(node, MicroInter(1 + rng.uniform(100'000)),
                                                        now);
            out == VestOutcome::Ok ? ++applied : ++rejected;
        } else if (roll < 92) {
            std::size_t ni = rng.uniform(soak_nodes.size());
            auto out = ledger.vest_withdraw(soak_nodes[ni], MicroInter(1 + rng.uniform(200'000)),
                                            wallets[ni], now);
            out == VestOutcome::Ok ? ++applied : ++rejected;
        } else if (roll < 96) {
            // Scripted conviction: a node equivocates, forwarders get tickets,
            // the stake is slashed into the PoC's pool.
            NodeId node = soak_nodes[rng.uniform(soak_nodes.size())];
            if (ledger.staked(node) > 0) {
                const KeyPair& kp = node_keys.at(node.value);
                Encoder ea, eb;
                ea.tag("soak.h1").u64(rng.next_u64());
                eb.tag("soak.h2").u64(rng.next_u64());
                auto a1 = make_attestation(node, kp, StreamId{1}, sha256(ea.view()), soak_epoch,
                                           scheme);
                auto a2 = make_attestation(node, kp, StreamId{1}, sha256(eb.view()), soak_epoch,
                                           scheme);
                auto poc = detect_conflict(a1, a2, keys, scheme);
                if (poc) {
                    Digest id = poc->id();
                    std::size_t forwarders = 1 + rng.uniform(soak_nodes.size());
                    for (std::size_t f = 0; f < forwarders; ++f)
                        ledger.record_ticket(id, soak_nodes[rng.uniform(soak_nodes.size())]);
                    ledger.slash(node, {id}, now);
                    pending_pools.push_back(id);
                    ++applied;
                }
            }
        } else {
            // epoch boundary
            ++soak_epoch;
            ledger.reset_nonces_all();
            ledger.advance_vesting_window();
            std::vector<RandaoContribution> contribs;
            for (NodeId node : soak_nodes) {
                Encoder e;
                e.tag("soak.reveal").u64(node.value).u64(soak_epoch);
                Bytes reveal = e.take();
                contribs.push_back(
                    {node, sha256(ByteView(reveal.data(), reveal.size())), reveal});
            }
            EpochSeed seed = randao_round(soak_epoch, std::move(contribs)).seed;
            for (const Digest& pool_id : pending_pools) ledger.lottery_draw(seed, pool_id, now);
            pending_pools.clear();
            ++applied;
        }

        auto audit = ledger.audit();
        if (!audit.ok()) {
            ++audits_failed;
            if (rep.violations.empty()) {
                std::ostringstream msg;
                msg << "audit failed at event " << ev << ": expected " << audit.expected
                    << " actual " << audit.actual;
                if (audit.backing_violator)
                    msg << " backing violator stream " << audit.backing_violator->value;
                rep.violations.push_back(msg.str());
            }
        }
    }

    auto final_audit = ledger.audit();
    Json a;
    a["expected"] = final_audit.expected;
    a["actual"] = final_audit.actual;
    a["conserved"] = final_audit.conserved;
    a["backing_ok"] = !final_audit.backing_violator.has_value();
    rep.conservation_audits.push_back(std::move(a));

    rep.stats["events"] = cfg.soak_events;
    rep.stats["applied"] = applied;
    rep.stats["rejected"] = rejected;
    rep.stats["audits_failed"] = audits_failed;
    rep.stats["draws"] = ledger.draws().size();
    rep.stats["final_sum"] = final_audit.actual;
    return rep;
}

RunReport run_scenario(const ScenarioConfig& cfg) {
    switch (cfg.kind) {
        case ScenarioKind::DoubleSpend: return run_double_spend(cfg);
        case ScenarioKind::Disagreement: return run_disagreement(cfg);
        case ScenarioKind::Corruption: return run_corruption(cfg);
        case ScenarioKind::GossipMeasure: return run_gossip_measure(cfg);
        case ScenarioKind::RippleTrace: return run_ripple_trace(cfg);
        case ScenarioKind::EconomySoak: return run_economy_soak(cfg);
    }
    throw ConfigError("unknown scenario kind");
}

}  // namespace intercloud::sim

#include "intercloud/simnet.hpp"

#include <algorithm>
#include <cassert>

#include "intercloud/errors.hpp"

namespace intercloud::sim {

namespace {
constexpr StreamId kGenesisStream = kGenesisStreamId;
constexpr StreamId kWatchedStream = kWatchedStreamId;
constexpr StreamId kReceiverB = kReceiverBId;
constexpr StreamId kReceiverC = kReceiverCId;
constexpr StreamId kCurrencyStream = kCurrencyStreamId;

Digest node_key_seed(NodeId id) {
    Encoder e;
    e.tag("intercloud.nodekey.v1").u64(id.value);
    return sha256(e.view());
}
}  // namespace

void NodeState::epoch_reset() {
    attested.clear();
    heads_seen.clear();
    attesters.clear();
    digest_sent.clear();
    in_attests.clear();
    in_digests.clear();
    in_pocs.clear();
}

SimWorld::SimWorld(const ScenarioConfig& cfg)
    : ledger(SignatureScheme::by_name(cfg.scheme)),
      cfg_(cfg),
      scheme_(&SignatureScheme::by_name(cfg.scheme)),
      rng_(cfg.seed),
      topology_(0),
      watched_(kWatchedStream) {
    build_population();
    auto check = check_epoch_duration(topology_, cfg_.gossip.delta_min, cfg_.t_ep);
    if (!check.ok)
        throw ConfigError("epoch duration too short: t_ep=" + std::to_string(cfg_.t_ep) +
                          " must exceed D*delta_min=" + std::to_string(check.bound) +
                          " (diameter " + std::to_string(check.diameter) + ")");
    build_economy();
}

void SimWorld::build_population() {
    const std::size_t core = cfg_.watchers + cfg_.juniors;
    const std::size_t total = cfg_.population();
    if (cfg_.watchers == 0) throw ConfigError("population.watchers must be positive");

    switch (cfg_.topology) {
        case TopologyType::Ring: topology_ = Graph::ring(core); break;
        case TopologyType::Path: topology_ = Graph::path(core); break;
        case TopologyType::Complete: topology_ = Graph::complete(core); break;
        case TopologyType::Random:
            topology_ = Graph::random_connected(rng_, core, cfg_.extra_edges);
            break;
    }
    // Clients hang off the core with a few access edges each.
    {
        Graph with_clients(total);
        for (std::size_t v = 0; v < core; ++v)
            for (std::size_t w : topology_.neighbours(v))
                if (v < w) with_clients.add_edge(v, w);
        for (std::size_t c = core; c < total; ++c) {
            std::set<std::size_t> picks;
            while (picks.size() < std::min<std::size_t>(3, core))
                picks.insert(rng_.uniform(core));
            for (std::size_t p : picks) with_clients.add_edge(c, p);
        }
        topology_ = std::move(with_clients);
    }

    nodes_.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        NodeState& n = nodes_[i];
        n.id = NodeId{i};
        n.role = i < cfg_.watchers ? Role::Watcher
                                   : (i < core ? Role::Junior : Role::Client);
        n.keys = scheme_->keypair_from_seed(node_key_seed(n.id).view());
    }
    // Adversary: the last `adversary_watchers` of the watch pool plus the
    // configured fraction of juniors.
    if (cfg_.adversary_watchers > cfg_.watchers)
        throw ConfigError("adversary.watchers exceeds the watch pool");
    for (std::size_t i = 0; i < cfg_.adversary_watchers; ++i)
        nodes_[cfg_.watchers - 1 - i].adversary = true;
    if (cfg_.junior_fraction < 0 || cfg_.junior_fraction > 1)
        throw ConfigError("adversary.junior_fraction out of [0,1]");
    std::size_t adv_juniors = static_cast<std::size_t>(
        (Rational(cfg_.juniors) * cfg_.junior_fraction).convert_to<std::int64_t>());
    for (std::size_t i = 0; i < adv_juniors; ++i)
        nodes_[cfg_.watchers + i].adversary = true;
}

void SimWorld::build_economy() {
    const MicroInter reserve = cfg_.ds_balance * kMicroPerInter;
    const MicroInter stakes =
        static_cast<MicroInter>(cfg_.population()) * cfg_.node_stake;
    MicroInter total = cfg_.genesis_total;
    const MicroInter needed =
        cfg_.stream_inter + 2 * kMicroPerInter + reserve + stakes + 10 * kMicroPerInter;
    if (total == 0) total = needed;
    if (total < needed) throw ConfigError("stake.genesis_total cannot fund the world");

    ledger.create_genesis_stream(kGenesisStream, total);
    ledger.create_stream(kWatchedStream, RulesKind::Plain, cfg_.stream_inter, kGenesisStream);
    ledger.create_stream(kReceiverB, RulesKind::Plain, kMicroPerInter, kGenesisStream);
    ledger.create_stream(kReceiverC, RulesKind::Plain, kMicroPerInter, kGenesisStream);
    ledger.create_currency_stream(kCurrencyStream, reserve, kGenesisStream);
    for (const auto& n : nodes_) ledger.create_vesting(n.id, cfg_.node_stake, kGenesisStream);

    ledger.relations().relate(kWatchedStream, kReceiverB, RateLimit::unlimited(),
                              {kCurrencyStream}, 0);
    ledger.relations().relate(kWatchedStream, kReceiverC, RateLimit::unlimited(),
                              {kCurrencyStream}, 0);
    if (cfg_.ds_balance > 0) {
        auto emitted = ledger.emit(kCurrencyStream, cfg_.ds_balance, kWatchedStream, 0);
        if (emitted != EmitOutcome::Ok)
            throw ConfigError("cannot seed the watched stream balance");
    }
}

const std::vector<NodeId>& SimWorld::swarm(StreamId stream) const {
    const SwarmAssignment* a = epoch_state_->assignment(stream);
    if (a == nullptr) throw std::logic_error("no swarm assigned for stream");
    return a->members;
}

std::vector<NodeId> SimWorld::swarm_members(StreamId stream, bool adversarial) const {
    std::vector<NodeId> out;
    for (NodeId v : swarm(stream))
        if (nodes_[v.value].adversary == adversarial) out.push_back(v);
    return out;
}

KeyLookup SimWorld::key_lookup() const {
    return [this](NodeId id) -> const PublicKey* {
        if (id.value >= nodes_.size()) return nullptr;
        return &nodes_[id.value].keys.pub;
    };
}

std::vector<NodeId> SimWorld::clients() const {
    std::vector<NodeId> out;
    for (const auto& n : nodes_)
        if (n.role == Role::Client) out.push_back(n.id);
    return out;
}

std::size_t SimWorld::intern(Item item) {
    auto it = item_index_.find(item.id);
    if (it != item_index_.end()) return it->second;
    std::size_t idx = items_.size();
    item_index_.emplace(item.id, idx);
    items_.push_back(std::move(item));
    return idx;
}

namespace {
bool test_seen(std::vector<bool>& seen, std::size_t idx) {
    if (seen.size() <= idx) seen.resize(idx + 1, false);
    return seen[idx];
}

void mark_seen(std::vector<bool>& seen, std::size_t idx) {
    if (seen.size() <= idx) seen.resize(idx + 1, false);
    seen[idx] = true;
}
}  // namespace

std::size_t SimWorld::make_attest_item(NodeId author, StreamId stream, const Digest& h) {
    Item item;
    item.kind = Item::Kind::Attestation;
    item.att = make_attestation(author, nodes_[author.value].keys, stream, h, current_epoch(),
                                *scheme_);
    item.id = item.att.id();
    return intern(std::move(item));
}

std::size_t SimWorld::make_digest_item(NodeId author, StreamId stream, const Digest& h,
                                       std::set<NodeId> peers) {
    Item item;
    item.kind = Item::Kind::Digest;
    item.dig = make_gossip_digest(author, nodes_[author.value].keys, stream, h, current_epoch(),
                                  std::move(peers), *scheme_);
    item.id = item.dig.id();
    return intern(std::move(item));
}

std::size_t SimWorld::make_poc_item(const ProofOfCorruption& poc) {
    Item item;
    item.kind = Item::Kind::Poc;
    item.poc = poc;
    item.id = poc.id();
    return intern(std::move(item));
}

std::size_t SimWorld::make_announce_item(StreamId stream, const Digest& h) {
    Item item;
    item.kind = Item::Kind::HeadAnnounce;
    item.stream = stream;
    item.head = h;
    Encoder e;
    e.tag("intercloud.announce.v1").u64(stream.value).raw(h.view()).u64(current_epoch());
    item.id = sha256(e.view());
    return intern(std::move(item));
}

void SimWorld::deliver(NodeId to, std::size_t item, SimTime at, NodeId from) {
    queue_.push(Event{at, seq_++, to, from, item});
}

void SimWorld::broadcast_from(NodeId origin, std::size_t item, SimTime at) {
    NodeState& v = nodes_[origin.value];
    mark_seen(v.seen, item);
    if (!v.adversary && !test_seen(world_seen_, item)) {
        // an honest origin holds the item; it enters the world-observer pools
        mark_seen(world_seen_, item);
        const Item& it = items_[item];
        if (it.kind == Item::Kind::Attestation) on_honest_attestation(it.att);
        if (it.kind == Item::Kind::Digest) on_honest_digest(it.dig);
        if (it.kind == Item::Kind::Poc) on_honest_poc(it.poc);
    }
    SimTime saved = clock_;
    clock_ = at;
    relay(v, item);
    clock_ = saved;
}

void SimWorld::announce_head(StreamId stream, const Digest& h, SimTime at) {
    std::size_t item = make_announce_item(stream, h);
    for (NodeId member : swarm(stream)) deliver(member, item, at, member);
}

void SimWorld::gossip_broadcast(NodeId origin, std::size_t item, SimTime at) {
    mark_seen(nodes_[origin.value].seen, item);
    for (int round = 0; round < cfg_.gossip.rounds; ++round) {
        SimTime t = at + static_cast<SimTime>(round) * cfg_.gossip.delta_min;
        // Holder set is evaluated when the round fires via a control event;
        // modelled here directly for determinism: holders known at schedule
        // time plus deliveries landing before the round.
        queue_.push(Event{t, seq_++, NodeId{std::uint64_t(-1)}, origin, item});
    }
}

void SimWorld::begin_epoch() {
    Epoch next = epoch_state_ ? epoch_state_->epoch() + 1 : 0;
    if (epoch_state_) apply_convictions(epoch_state_->epoch());
    epoch_state_.emplace(next, cfg_.t_ep);
    clock_ = epoch_state_->start_time();
    queue_ = {};  // epoch-scoped traffic expires at the shuffle

    std::vector<RandaoContribution> contributions;
    for (const auto& n : nodes_) {
        if (n.convicted) continue;
        Encoder e;
        e.tag("intercloud.reveal.v1").u64(n.id.value).u64(next);
        Bytes reveal = e.take();
        RandaoContribution c;
        c.node = n.id;
        c.reveal = reveal;
        c.commit = sha256(ByteView(reveal.data(), reveal.size()));
        contributions.push_back(std::move(c));
    }
    auto randao = randao_round(next, std::move(contributions));
    epoch_state_->set_seed(randao.seed);

    // Lottery draws for pools funded by last epoch's convictions, using the
    // fresh seed.
    std::vector<Digest> ready;
    for (const auto& [poc_id, pool] : ledger.pools())
        if (pool.pot > 0) ready.push_back(poc_id);
    for (const Digest& poc_id : ready) ledger.lottery_draw(epoch_state_->seed(), poc_id, clock_);

    for (auto& n : nodes_) {
        n.monitor.evict(next);
        n.ripple_seen.evict(next);
        n.epoch_reset();
    }
    world_lol.evict(next);
    world_attests_.clear();
    world_digests_.clear();
    world_attest_count_.clear();
    world_digest_count_.clear();
    ledger.reset_nonces_all();
    ledger.advance_vesting_window();

    // Swarm reassignment for the watched stream.
    const Stream& s = ledger.stream(watched_);
    std::vector<NodeId> pool;
    for (const auto& n : nodes_)
        if (n.role == Role::Watcher && !n.convicted) pool.push_back(n.id);
    std::uint64_t n_target = swarm_size(s.inter, cfg_.c, std::min<std::uint64_t>(pool.size(), cfg_.n_cap));
    std::vector<NodeId> eligible;
    for (NodeId v : pool)
        if (staking_eligible(ledger.staked(v), s.inter, std::max<std::uint64_t>(n_target, 1)))
            eligible.push_back(v);
    std::uint64_t n = std::min<std::uint64_t>(n_target, eligible.size());
    if (n == 0) throw ConfigError("no eligible watchers for the watched stream");
    epoch_state_->assign(watched_, n, eligible);

    set_colour(watched_, Colour::Yellow, /*shuffle_reset=*/true);
}

void SimWorld::apply_convictions(Epoch closed) {
    std::map<NodeId, std::vector<Digest>> convictions;
    for (const auto& [poc, first_seen] : world_lol.entries())
        if (first_seen == closed) convictions[poc.a1.node].push_back(poc.id());
    for (const auto& [node, poc_ids] : convictions) {
        ledger.slash(node, poc_ids, clock_);
        nodes_[node.value].convicted = true;
    }
}

void SimWorld::run_to_epoch_end() {
    const SimTime end = epoch_state_->end_time();
    while (!queue_.empty() && queue_.top().time < end) {
        Event ev = queue_.top();
        queue_.pop();
        clock_ = ev.time;
        process(ev);
    }
    clock_ = end;
    evaluate_clients();
}

void SimWorld::process(const Event& ev) {
    // κ-random gossip round control event
    if (ev.to.value == std::uint64_t(-1)) {
        const Item& item = items_[ev.item];
        std::vector<NodeId> holders;
        for (const auto& n : nodes_) {
            if (n.seen.size() <= ev.item || !n.seen[ev.item]) continue;
            if (n.adversary && cfg_.suppress_pocs && item.kind == Item::Kind::Poc) continue;
            if (n.role == Role::Client) continue;
            holders.push_back(n.id);
        }
        for (NodeId h : holders) {
            for (int k = 0; k < cfg_.gossip.kappa; ++k) {
                std::uint64_t pick = rng_.uniform(nodes_.size() - 1);
                if (pick >= h.value) ++pick;  // uniform over the other nodes
                deliver(NodeId{pick}, ev.item, clock_ + cfg_.gossip.delta_min, h);
            }
        }
        return;
    }

    NodeState& v = nodes_[ev.to.value];
    if (test_seen(v.seen, ev.item)) return;
    if (v.eclipsed && ev.from != v.id) {
        const NodeState& sender = nodes_[ev.from.value];
        if (!sender.adversary && !v.allowed_honest.count(ev.from)) return;  // eclipsed
    }
    v.seen[ev.item] = true;
    const Item& item = items_[ev.item];
    if (v.adversary) {
        if (item.kind == Item::Kind::Poc && !cfg_.suppress_pocs) relay(v, ev.item);
        return;
    }
    handle_honest(v, item, ev.item);
}

namespace {
bool in_vector(const std::vector<NodeId>& v, NodeId id) {
    return std::find(v.begin(), v.end(), id) != v.end();
}
}  // namespace

void SimWorld::handle_honest(NodeState& v, const Item& item, std::size_t idx) {
    const Epoch ep = current_epoch();
    const KeyLookup keys = key_lookup();
    const bool world_novel = !test_seen(world_seen_, idx);
    if (world_novel) mark_seen(world_seen_, idx);

    switch (item.kind) {
        case Item::Kind::HeadAnnounce: {
            v.heads_seen[item.stream].insert(item.head);
            maybe_attest(v, item.stream);
            return;  // announcements go executor → swarm directly, no relay
        }
        case Item::Kind::Attestation: {
            auto intake = v.monitor.observe_attestation(item.att, ep, keys, *scheme_);
            const SwarmAssignment* a = epoch_state_->assignment(item.att.stream);
            if (a != nullptr && item.att.epoch == ep && in_vector(a->members, v.id) &&
                in_vector(a->members, item.att.node)) {
                v.attesters[{item.att.stream, item.att.hash}].insert(item.att.node);
                // A freshly announced head may still be waiting on this node.
                maybe_attest(v, item.att.stream);
                maybe_send_digest(v, item.att.stream, item.att.hash);
            }
            if (v.role == Role::Client) v.in_attests.push_back(item.att);
            if (world_novel) on_honest_attestation(item.att);
            for (const auto& poc : intake.new_pocs) {
                std::size_t pidx = make_poc_item(poc);
                mark_seen(v.seen, pidx);
                if (!test_seen(world_seen_, pidx)) {
                    mark_seen(world_seen_, pidx);
                    on_honest_poc(poc);
                }
                if (v.role != Role::Client) relay(v, pidx);
            }
            if (v.role != Role::Client) relay(v, idx);
            return;
        }
        case Item::Kind::Digest: {
            if (v.role == Role::Client) v.in_digests.push_back(item.dig);
            if (world_novel) on_honest_digest(item.dig);
            if (v.role != Role::Client) relay(v, idx);
            return;
        }
        case Item::Kind::Poc: {
            auto intake = v.monitor.observe_poc(item.poc, ep, keys, *scheme_);
            if (!verify_poc(item.poc, keys, *scheme_)) return;  // malformed: drop silently
            if (v.role == Role::Client) v.in_pocs.push_back(item.poc);
            if (world_novel) on_honest_poc(item.poc);
            if (intake.forward && v.role != Role::Client) relay(v, idx);
            return;
        }
    }
}

void SimWorld::maybe_attest(NodeState& v, StreamId stream) {
    const SwarmAssignment* a = epoch_state_->assignment(stream);
    if (a == nullptr || !in_vector(a->members, v.id)) return;
    if (v.attested.count(stream)) return;
    auto heads = v.heads_seen.find(stream);
    // Honest behaviour: attest only the unique head seen, and only while no
    // PoC for the stream is known this epoch.
    if (heads == v.heads_seen.end() || heads->second.size() != 1) return;
    if (v.monitor.lol().any_for(stream, current_epoch())) return;
    const Digest& h = *heads->second.begin();
    v.attested[stream] = h;
    v.attesters[{stream, h}].insert(v.id);
    std::size_t idx = make_attest_item(v.id, stream, h);
    mark_seen(v.seen, idx);
    if (!test_seen(world_seen_, idx)) {
        mark_seen(world_seen_, idx);
        on_honest_attestation(items_[idx].att);
    }
    relay(v, idx);
    maybe_send_digest(v, stream, h);
}

void SimWorld::maybe_send_digest(NodeState& v, StreamId stream, const Digest& h) {
    if (v.digest_sent.count(stream)) return;
    auto attested = v.attested.find(stream);
    if (attested == v.attested.end() || attested->second != h) return;
    const auto& set = v.attesters[{stream, h}];
    std::size_t others = set.size() - set.count(v.id);
    if (others < supermajority(swarm(stream).size())) return;
    v.digest_sent.insert(stream);
    std::size_t idx = make_digest_item(v.id, stream, h, set);
    mark_seen(v.seen, idx);
    if (!test_seen(world_seen_, idx)) {
        mark_seen(world_seen_, idx);
        on_honest_digest(items_[idx].dig);
    }
    relay(v, idx);
}

void SimWorld::relay(NodeState& v, std::size_t idx) {
    const Item& item = items_[idx];
    if (item.kind == Item::Kind::Poc) {
        auto& fwd = poc_forwarders[item.poc.id()];
        if (!in_vector(fwd, v.id)) {
            fwd.push_back(v.id);
            ledger.record_ticket(item.poc.id(), v.id);
        }
    }
    for (std::size_t nb : topology_.neighbours(v.id.value))
        deliver(NodeId{nb}, idx, clock_ + cfg_.gossip.delta_min, v.id);
}

void SimWorld::on_honest_attestation(const Attestation& a) {
    if (a.epoch != current_epoch()) return;
    world_attests_[a.stream].push_back(a);
    world_attest_count_[{a.stream, a.hash}]++;
    try_world_finality(a.stream);
}

void SimWorld::on_honest_digest(const GossipDigest& g) {
    if (g.epoch != current_epoch()) return;
    world_digests_[g.stream].push_back(g);
    world_digest_count_[{g.stream, g.hash}]++;
    try_world_finality(g.stream);
}

void SimWorld::on_honest_poc(const ProofOfCorruption& poc) {
    if (!world_lol.add(poc, current_epoch())) return;
    world_pocs.push_back(poc);
    StreamId stream = poc.a1.stream;
    if (stream != watched_ || poc.a1.epoch != current_epoch()) return;
    const SwarmAssignment* a = epoch_state_->assignment(stream);
    if (a != nullptr && red_threshold_check(world_lol, stream, current_epoch(), a->members) &&
        colour(stream) != Colour::Red)
        set_colour(stream, Colour::Red, false);
}

void SimWorld::try_world_finality(StreamId stream) {
    if (stream != watched_) return;
    if (colour(stream) != Colour::Yellow) return;
    if (world_lol.any_for(stream, current_epoch())) return;
    const SwarmAssignment* a = epoch_state_->assignment(stream);
    if (a == nullptr) return;
    const std::size_t m1 = supermajority(a->members.size());
    bool plausible = false;
    for (const auto& [key, count] : world_attest_count_) {
        if (key.first != stream || count < m1) continue;
        auto dig = world_digest_count_.find(key);
        if (dig != world_digest_count_.end() && dig->second >= m1) plausible = true;
    }
    if (!plausible) return;
    auto result = evaluate_finality(stream, current_epoch(), a->members, world_attests_[stream],
                                    world_digests_[stream], world_pocs, key_lookup(), *scheme_);
    if (!result.final()) return;
    world_certificates[{stream, current_epoch()}] = result.certificate();
    set_colour(stream, Colour::Green, false);
}

void SimWorld::set_colour(StreamId stream, Colour next, bool shuffle_reset) {
    auto it = colour_.find(stream);
    if (it == colour_.end()) {
        colour_[stream] = StreamColour{next, clock_};
        timeline.push_back({stream, clock_, current_epoch(), next});
        return;
    }
    if (it->second.value == next && !shuffle_reset) return;
    if (!shuffle_reset && !colour_transition_allowed(it->second.value, next))
        throw std::logic_error("forbidden colour transition");
    it->second = StreamColour{next, clock_};
    timeline.push_back({stream, clock_, current_epoch(), next});
}

Colour SimWorld::colour(StreamId stream) const {
    auto it = colour_.find(stream);
    return it == colour_.end() ? Colour::Yellow : it->second.value;
}

void SimWorld::evaluate_clients() {
    const Epoch ep = current_epoch();
    const SwarmAssignment* a = epoch_state_->assignment(watched_);
    if (a == nullptr) return;
    for (const auto& n : nodes_) {
        if (n.role != Role::Client) continue;
        auto result = evaluate_finality(watched_, ep, a->members, n.in_attests, n.in_digests,
                                        n.in_pocs, key_lookup(), *scheme_);
        ClientDecision d;
        d.client = n.id;
        d.stream = watched_;
        d.epoch = ep;
        d.has_certificate = result.final();
        if (result.final()) d.hash = result.certificate().hash;
        switch (n.policy) {
            case FinalityPolicy::RequireGreen: d.accepted = d.has_certificate; break;
            case FinalityPolicy::AcceptYellow: d.accepted = colour(watched_) != Colour::Red; break;
            case FinalityPolicy::WaitAfterRed:
                d.accepted = d.has_certificate && colour(watched_) != Colour::Red;
                break;
        }
        client_decisions.push_back(d);
    }
}

std::size_t SimWorld::conflicting_finality_count(StreamId stream, Epoch epoch) const {
    std::vector<const ClientDecision*> certs;
    for (const auto& d : client_decisions)
        if (d.stream == stream && d.epoch == epoch && d.has_certificate) certs.push_back(&d);
    std::size_t count = 0;
    for (std::size_t i = 0; i < certs.size(); ++i)
        for (std::size_t j = i + 1; j < certs.size(); ++j)
            if (certs[i]->hash != certs[j]->hash) ++count;
    return count;
}

bool gossip_trial_delivered(Rng& rng, std::uint64_t others, std::uint64_t adversaries, int kappa,
                            int rounds) {
    for (int round = 0; round < rounds; ++round)
        for (int k = 0; k < kappa; ++k)
            if (rng.uniform(others) >= adversaries) return true;
    return false;
}

double GossipCell::bound() const {
    double f = f_j.convert_to<double>();
    return std::pow(f, double(kappa) * double(rounds));
}

GossipCell run_gossip_cell(Rng& rng, const Rational& f_j, int kappa, int rounds,
                           std::uint64_t trials, std::uint64_t population) {
    if (population < 2) throw ConfigError("gossip population too small");
    std::uint64_t others = population - 1;
    Rational adv = f_j * Rational(others);
    if (boost::multiprecision::denominator(adv) != 1)
        throw ConfigError("gossip population-1 must make f_j exact");
    GossipCell cell;
    cell.f_j = f_j;
    cell.kappa = kappa;
    cell.rounds = rounds;
    cell.trials = trials;
    std::uint64_t adversaries = adv.convert_to<std::uint64_t>();
    for (std::uint64_t t = 0; t < trials; ++t)
        if (!gossip_trial_delivered(rng, others, adversaries, kappa, rounds)) ++cell.non_delivered;
    return cell;
}

}  // namespace intercloud::sim

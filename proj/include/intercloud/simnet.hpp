#pragma once

#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <vector>

#include "intercloud/config.hpp"
#include "intercloud/consensus.hpp"
#include "intercloud/economy.hpp"
#include "intercloud/epoch.hpp"
#include "intercloud/report.hpp"
#include "intercloud/ripple.hpp"
#include "intercloud/rng.hpp"
#include "intercloud/topology.hpp"

namespace intercloud::sim {

enum class Role { Watcher, Junior, Client };

// Well-known stream ids in scenario worlds.
inline constexpr StreamId kGenesisStreamId{1'000'000};
inline constexpr StreamId kWatchedStreamId{1};
inline constexpr StreamId kReceiverBId{2};
inline constexpr StreamId kReceiverCId{3};
inline constexpr StreamId kCurrencyStreamId{2'000'000};

// Interned immutable protocol message; flood deduplication works on the
// interned index, not the bytes.
struct Item {
    enum class Kind { HeadAnnounce, Attestation, Digest, Poc } kind;
    StreamId stream;       // HeadAnnounce
    Digest head;           // HeadAnnounce
    Attestation att;       // Attestation
    GossipDigest dig;      // Digest
    ProofOfCorruption poc; // Poc
    Digest id;
};

struct NodeState {
    NodeId id;
    Role role = Role::Junior;
    KeyPair keys;
    bool adversary = false;
    bool convicted = false;

    // Client isolation: deliveries from honest senders are dropped, except
    // from allowed_honest (partial eclipse). Adversarial senders always pass.
    bool eclipsed = false;
    std::set<NodeId> allowed_honest;
    FinalityPolicy policy = FinalityPolicy::RequireGreen;

    std::vector<bool> seen;  // per interned item
    JuniorState monitor;     // every honest node cross-checks what it sees
    SeenTable ripple_seen;

    // watcher state, reset each epoch
    std::map<StreamId, Digest> attested;
    std::map<StreamId, std::set<Digest>> heads_seen;
    std::map<std::pair<StreamId, Digest>, std::set<NodeId>> attesters;
    std::set<StreamId> digest_sent;

    // client inbox, reset each epoch
    std::vector<Attestation> in_attests;
    std::vector<GossipDigest> in_digests;
    std::vector<ProofOfCorruption> in_pocs;

    void epoch_reset();
};

struct ClientDecision {
    NodeId client;
    StreamId stream;
    Epoch epoch = 0;
    bool has_certificate = false;
    Digest hash;
    bool accepted = false;  // per the client's finality policy
};

// Deterministic discrete-event world for the consensus scenarios. The event
// loop is single-threaded; identical config+seed gives identical traces.
class SimWorld {
public:
    explicit SimWorld(const ScenarioConfig& cfg);  // throws ConfigError

    // --- time & epochs ---------------------------------------------------
    SimTime now() const { return clock_; }
    Epoch current_epoch() const { return epoch_state_ ? epoch_state_->epoch() : 0; }
    SimTime epoch_end() const { return epoch_state_->end_time(); }

    // Closes the previous epoch (convictions, slashing, RANDAO, lottery
    // draws, swarm reassignment, colour reset) and opens the next one.
    void begin_epoch();
    // Drains the event queue within the current epoch, then evaluates client
    // finality and closes colour bookkeeping.
    void run_to_epoch_end();

    // --- structure ---------------------------------------------------------
    const ScenarioConfig& config() const { return cfg_; }
    NodeState& node(NodeId id) { return nodes_[id.value]; }
    const NodeState& node(NodeId id) const { return nodes_[id.value]; }
    std::size_t node_count() const { return nodes_.size(); }
    const std::vector<NodeId>& swarm(StreamId stream) const;
    std::vector<NodeId> swarm_members(StreamId stream, bool adversarial) const;
    const std::vector<std::size_t>& topology_neighbours(NodeId id) const {
        return topology_.neighbours(id.value);
    }
    KeyLookup key_lookup() const;
    const SignatureScheme& scheme() const { return *scheme_; }
    StreamId watched_stream() const { return watched_; }
    std::vector<NodeId> clients() const;

    // --- scripted actions ---------------------------------------------------
    std::size_t make_attest_item(NodeId author, StreamId stream, const Digest& h);
    std::size_t make_digest_item(NodeId author, StreamId stream, const Digest& h,
                                 std::set<NodeId> peers);
    std::size_t make_poc_item(const ProofOfCorruption& poc);
    std::size_t make_announce_item(StreamId stream, const Digest& h);

    void deliver(NodeId to, std::size_t item, SimTime at, NodeId from);
    // Origin holds the item and floods it to its neighbours.
    void broadcast_from(NodeId origin, std::size_t item, SimTime at);
    // Executor announcement of the epoch head, sent to all swarm members.
    void announce_head(StreamId stream, const Digest& h, SimTime at);

    // Event-driven κ-random gossip round schedule (Lemma-2 mode).
    void gossip_broadcast(NodeId origin, std::size_t item, SimTime at);

    // --- results -----------------------------------------------------------
    Ledger ledger;
    ListOfLiars world_lol;  // union of honest nodes' PoC knowledge
    std::vector<ColourEvent> timeline;
    std::vector<ClientDecision> client_decisions;
    std::map<std::pair<StreamId, Epoch>, FinalityCertificate> world_certificates;
    std::vector<ProofOfCorruption> world_pocs;  // distinct, honest-held
    std::map<Digest, std::vector<NodeId>> poc_forwarders;

    Colour colour(StreamId stream) const;
    std::size_t conflicting_finality_count(StreamId stream, Epoch epoch) const;

    Rng& rng() { return rng_; }

private:
    struct Event {
        SimTime time;
        std::uint64_t seq;
        NodeId to;
        NodeId from;
        std::size_t item;
        bool operator>(const Event& other) const {
            return std::tie(time, seq) > std::tie(other.time, other.seq);
        }
    };

    std::size_t intern(Item item);
    void build_population();
    void build_economy();
    void process(const Event& ev);
    void handle_honest(NodeState& v, const Item& item, std::size_t idx);
    void relay(NodeState& v, std::size_t idx);
    void on_honest_attestation(const Attestation& a);
    void on_honest_digest(const GossipDigest& g);
    void on_honest_poc(const ProofOfCorruption& poc);
    void try_world_finality(StreamId stream);
    void set_colour(StreamId stream, Colour colour, bool shuffle_reset);
    void maybe_attest(NodeState& v, StreamId stream);
    void maybe_send_digest(NodeState& v, StreamId stream, const Digest& h);
    void evaluate_clients();
    void apply_convictions(Epoch closed);

    ScenarioConfig cfg_;
    const SignatureScheme* scheme_;
    Rng rng_;
    Graph topology_;
    std::vector<NodeState> nodes_;
    StreamId watched_;

    std::optional<EpochState> epoch_state_;
    SimTime clock_ = 0;
    std::uint64_t seq_ = 0;
    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue_;

    std::vector<Item> items_;
    std::map<Digest, std::size_t> item_index_;

    // world-observer pools for the current epoch
    std::vector<bool> world_seen_;
    std::map<StreamId, std::vector<Attestation>> world_attests_;
    std::map<StreamId, std::vector<GossipDigest>> world_digests_;
    std::map<std::pair<StreamId, Digest>, std::size_t> world_attest_count_;
    std::map<std::pair<StreamId, Digest>, std::size_t> world_digest_count_;

    std::map<StreamId, StreamColour> colour_;
};

// Scenario drivers; dispatched by run_scenario.
RunReport run_scenario(const ScenarioConfig& cfg);
RunReport run_double_spend(const ScenarioConfig& cfg);
RunReport run_disagreement(const ScenarioConfig& cfg);
RunReport run_corruption(const ScenarioConfig& cfg);
RunReport run_gossip_measure(const ScenarioConfig& cfg);
RunReport run_ripple_trace(const ScenarioConfig& cfg);
RunReport run_economy_soak(const ScenarioConfig& cfg);

// One Lemma-2 containment trial: true iff the item escapes the adversary and
// reaches the client. `others` = junior population excluding the initial
// holder; the first `adversaries` of them suppress.
bool gossip_trial_delivered(Rng& rng, std::uint64_t others, std::uint64_t adversaries, int kappa,
                            int rounds);

struct GossipCell {
    Rational f_j;
    int kappa = 0;
    int rounds = 0;
    std::uint64_t trials = 0;
    std::uint64_t non_delivered = 0;
    double empirical() const { return double(non_delivered) / double(trials); }
    double bound() const;  // f_j^(κ·r)
};

GossipCell run_gossip_cell(Rng& rng, const Rational& f_j, int kappa, int rounds,
                           std::uint64_t trials, std::uint64_t population);

}  // namespace intercloud::sim

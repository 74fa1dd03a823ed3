#pragma once

#include <optional>
#include <set>
#include <vector>

#include "intercloud/crypto.hpp"
#include "intercloud/ids.hpp"
#include "intercloud/topology.hpp"

namespace intercloud {

struct RippleId {
    StreamId origin;
    Digest msg_hash;
    Epoch epoch = 0;
    auto operator<=>(const RippleId&) const = default;
};

// Per-node dedup table; entries live for two epochs.
class SeenTable {
public:
    bool contains(const RippleId& rid) const { return entries_.count(rid) > 0; }
    bool insert(const RippleId& rid) { return entries_.insert(rid).second; }
    // Drops entries with epoch < current − 1.
    void evict(Epoch current);
    std::size_t size() const { return entries_.size(); }

private:
    std::set<RippleId> entries_;
};

struct RippleMessage {
    RippleId rid;
    Bytes payload;
    std::uint64_t hop_count = 0;
    MicroInter fee_remaining = 0;
};

enum class RippleDiscard { DuplicateRid, FeeExhausted };

const char* to_string(RippleDiscard d);

struct RippleOutcome {
    bool processed = false;  // rid inserted and payload handled here
    std::optional<RippleDiscard> discarded;
    std::vector<std::size_t> forward_to;  // neighbour indices
    RippleMessage forwarded;              // copy with fee−δ, hop+1
};

// Dedup → process → fee-gate. A duplicate rid is discarded unprocessed; a
// novel message is processed, then forwarded to all neighbours only if the
// remaining fee covers one more hop (a relay cannot forward gratuitously).
RippleOutcome process_ripple(SeenTable& seen, const RippleMessage& msg, Epoch current,
                             const std::vector<std::size_t>& neighbours,
                             MicroInter fee_per_hop);

struct EpochDurationCheck {
    bool ok = false;
    std::size_t diameter = 0;
    SimTime bound = 0;  // D·δ_min
    bool disconnected = false;
};

// T_ep must exceed D·δ_min so every ripple completes within one epoch.
// Disconnected graphs use the per-component max diameter and set the warning
// flag.
EpochDurationCheck check_epoch_duration(const Graph& topology, SimTime delta_min, SimTime t_ep);

struct RippleTrace {
    std::uint64_t nodes_processed = 0;
    std::uint64_t max_hops = 0;
    std::uint64_t duplicates_discarded = 0;
    std::uint64_t fee_exhausted = 0;
    bool quiescent = false;
};

// Runs one ripple from `origin` to quiescence over per-node seen tables.
RippleTrace trace_ripple(const Graph& topology, std::vector<SeenTable>& tables,
                         std::size_t origin, RippleMessage msg, Epoch current,
                         MicroInter fee_per_hop);

}  // namespace intercloud

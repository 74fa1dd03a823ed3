#include "intercloud/ripple.hpp"

#include <algorithm>
#include <deque>

namespace intercloud {

void SeenTable::evict(Epoch current) {
    if (current < 1) return;
    std::erase_if(entries_, [&](const RippleId& rid) { return rid.epoch < current - 1; });
}

const char* to_string(RippleDiscard d) {
    switch (d) {
        case RippleDiscard::DuplicateRid: return "DuplicateRid";
        case RippleDiscard::FeeExhausted: return "FeeExhausted";
    }
    return "?";
}

RippleOutcome process_ripple(SeenTable& seen, const RippleMessage& msg, Epoch /*current*/,
                             const std::vector<std::size_t>& neighbours,
                             MicroInter fee_per_hop) {
    RippleOutcome out;
    if (seen.contains(msg.rid)) {
        out.discarded = RippleDiscard::DuplicateRid;
        return out;
    }
    seen.insert(msg.rid);
    out.processed = true;
    if (msg.fee_remaining < fee_per_hop) {
        out.discarded = RippleDiscard::FeeExhausted;
        return out;
    }
    out.forward_to = neighbours;
    out.forwarded = msg;
    out.forwarded.fee_remaining = msg.fee_remaining - fee_per_hop;
    out.forwarded.hop_count = msg.hop_count + 1;
    return out;
}

EpochDurationCheck check_epoch_duration(const Graph& topology, SimTime delta_min, SimTime t_ep) {
    EpochDurationCheck check;
    auto info = topology.diameter();
    check.diameter = info.diameter;
    check.disconnected = !info.connected;
    check.bound = static_cast<SimTime>(info.diameter) * delta_min;
    check.ok = t_ep > check.bound;
    return check;
}

RippleTrace trace_ripple(const Graph& topology, std::vector<SeenTable>& tables,
                         std::size_t origin, RippleMessage msg, Epoch current,
                         MicroInter fee_per_hop) {
    RippleTrace trace;
    struct Delivery {
        std::size_t node;
        RippleMessage msg;
    };
    std::deque<Delivery> queue{{origin, std::move(msg)}};
    while (!queue.empty()) {
        auto [node, m] = std::move(queue.front());
        queue.pop_front();
        auto outcome = process_ripple(tables[node], m, current, topology.neighbours(node),
                                      fee_per_hop);
        if (outcome.processed) {
            ++trace.nodes_processed;
            trace.max_hops = std::max(trace.max_hops, m.hop_count);
        }
        if (outcome.discarded == RippleDiscard::DuplicateRid) ++trace.duplicates_discarded;
        if (outcome.discarded == RippleDiscard::FeeExhausted) ++trace.fee_exhausted;
        for (std::size_t next : outcome.forward_to)
            queue.push_back({next, outcome.forwarded});
    }
    trace.quiescent = true;
    return trace;
}

}  // namespace intercloud

#pragma once

#include <map>
#include <optional>
#include <vector>

#include "intercloud/crypto.hpp"
#include "intercloud/ids.hpp"

namespace intercloud {

struct SwarmAssignment {
    StreamId stream;
    Epoch epoch = 0;
    std::vector<NodeId> members;  // sorted by node id
};

struct SecurityParams {
    std::int64_t r = 1;         // max tolerated double-spendings
    double s = 30.0;            // security parameter
    double f_ratio = 1.0 / 3.0; // dishonest fraction, in (0, 1)
    double c = 35.0;            // sizing constant: n = ⌈c·√INTER⌉
    MicroInter inter_base = kMicroPerInter;  // stake level that maps to 35 watchers
};

// n = min(N, ⌈c·√(inter/10^6)⌉); 0 for an unstaked (unwatchable) stream.
std::uint64_t swarm_size(MicroInter inter, double c, std::uint64_t network_size);

// Clerk-set minimum n = ⌈(β/r)·ln(s + 1 + ln(r+2))⌉ with β = s/ln(1/f).
// All logarithms natural. Independent of the network size by construction.
// Throws std::invalid_argument on out-of-range parameters.
std::uint64_t hoepman_min_swarm(std::int64_t r, double s, double f_ratio);

// Calibrated operational swarm size for the base parameters (r=1, s=30,
// f=1/3) under the d>0 variant of the clerk-set bound; fixed constant, not
// recomputed here.
inline constexpr std::uint64_t kOperationalSwarmSize = 35;

// Deterministic sample without replacement: eligible nodes ranked by
// VRF(seed, stream ‖ node), n smallest taken. No node chooses its own
// assignment — the outcome is a pure function of the seed.
// Throws InsufficientEligibleNodes when n exceeds the eligible set.
SwarmAssignment assign_swarm(const Digest& seed, StreamId stream, std::uint64_t n, Epoch epoch,
                             const std::vector<NodeId>& eligible);

// Pro-rata staking requirement: staked·n ≥ inter, exact cross-multiplication.
bool staking_eligible(MicroInter node_staked, MicroInter inter_i, std::uint64_t n_i);

// Per-epoch assignment table. The seed is set only once its RANDAO round has
// completed; querying assignments before that throws.
class EpochState {
public:
    EpochState(Epoch epoch, SimTime t_ep) : epoch_(epoch), t_ep_(t_ep) {}

    Epoch epoch() const { return epoch_; }
    SimTime t_ep() const { return t_ep_; }
    SimTime start_time() const { return epoch_ * t_ep_; }
    SimTime end_time() const { return (epoch_ + 1) * t_ep_; }

    bool seed_ready() const { return seed_.has_value(); }
    void set_seed(EpochSeed seed);
    const EpochSeed& seed() const;  // throws if the RANDAO round has not run

    const SwarmAssignment& assign(StreamId stream, std::uint64_t n,
                                  const std::vector<NodeId>& eligible);
    const SwarmAssignment* assignment(StreamId stream) const;
    const std::map<StreamId, SwarmAssignment>& assignments() const { return assignments_; }

private:
    Epoch epoch_;
    SimTime t_ep_;
    std::optional<EpochSeed> seed_;
    std::map<StreamId, SwarmAssignment> assignments_;
};

}  // namespace intercloud

#include "intercloud/epoch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "intercloud/errors.hpp"

namespace intercloud {

std::uint64_t swarm_size(MicroInter inter, double c, std::uint64_t network_size) {
    if (inter < 0) throw std::invalid_argument("swarm_size: negative stake");
    if (inter == 0) return 0;
    long double whole_inter = static_cast<long double>(inter) / kMicroPerInter;
    long double n = std::ceil(static_cast<long double>(c) * std::sqrt(whole_inter));
    if (n < 1) n = 1;
    auto sized = static_cast<std::uint64_t>(n);
    return std::min(network_size, sized);
}

std::uint64_t hoepman_min_swarm(std::int64_t r, double s, double f_ratio) {
    if (r < 1) throw std::invalid_argument("hoepman_min_swarm: r must be >= 1");
    if (!(s > 0)) throw std::invalid_argument("hoepman_min_swarm: s must be > 0");
    if (!(f_ratio > 0) || !(f_ratio < 1))
        throw std::invalid_argument("hoepman_min_swarm: f_ratio must be in (0, 1)");
    double beta = s / std::log(1.0 / f_ratio);
    double n = beta / static_cast<double>(r) * std::log(s + 1.0 + std::log(static_cast<double>(r) + 2.0));
    return static_cast<std::uint64_t>(std::ceil(n));
}

SwarmAssignment assign_swarm(const Digest& seed, StreamId stream, std::uint64_t n, Epoch epoch,
                             const std::vector<NodeId>& eligible) {
    if (n > eligible.size())
        throw InsufficientEligibleNodes("assign_swarm: swarm larger than eligible set");
    std::vector<std::pair<Digest, NodeId>> ranked;
    ranked.reserve(eligible.size());
    for (NodeId v : eligible) {
        Encoder e;
        e.u64(stream.value).u64(v.value);
        ranked.emplace_back(vrf_eval(seed, ByteView(e.view())).value, v);
    }
    std::sort(ranked.begin(), ranked.end());
    SwarmAssignment a;
    a.stream = stream;
    a.epoch = epoch;
    a.members.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) a.members.push_back(ranked[i].second);
    std::sort(a.members.begin(), a.members.end());
    return a;
}

bool staking_eligible(MicroInter node_staked, MicroInter inter_i, std::uint64_t n_i) {
    if (n_i == 0) throw std::invalid_argument("staking_eligible: empty swarm");
    if (node_staked < 0 || inter_i < 0) return false;
    return static_cast<unsigned __int128>(node_staked) * n_i >=
           static_cast<unsigned __int128>(inter_i);
}

void EpochState::set_seed(EpochSeed seed) {
    if (seed_.has_value())
        throw std::logic_error("EpochState: seed already fixed for this epoch");
    if (seed.epoch != epoch_)
        throw std::logic_error("EpochState: seed epoch mismatch");
    seed_ = seed;
}

const EpochSeed& EpochState::seed() const {
    if (!seed_.has_value())
        throw std::logic_error("EpochState: seed queried before its RANDAO round completed");
    return *seed_;
}

const SwarmAssignment& EpochState::assign(StreamId stream, std::uint64_t n,
                                          const std::vector<NodeId>& eligible) {
    const EpochSeed& s = seed();  // enforces the unpredictability discipline
    auto it = assignments_.find(stream);
    if (it != assignments_.end()) return it->second;
    SwarmAssignment a = assign_swarm(s.seed, stream, n, epoch_, eligible);
    return assignments_.emplace(stream, std::move(a)).first->second;
}

const SwarmAssignment* EpochState::assignment(StreamId stream) const {
    auto it = assignments_.find(stream);
    return it == assignments_.end() ? nullptr : &it->second;
}

}  // namespace intercloud

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "intercloud/epoch.hpp"
#include "intercloud/errors.hpp"
#include "intercloud/rng.hpp"

using namespace intercloud;

TEST_CASE("swarm sizing: base calibration and sqrt scaling") {
    const double c = 35.0;
    const std::uint64_t big_n = 1u << 20;
    CHECK(swarm_size(1 * kMicroPerInter, c, big_n) == 35);
    CHECK(swarm_size(4 * kMicroPerInter, c, big_n) == 70);
    CHECK(swarm_size(16 * kMicroPerInter, c, big_n) == 140);
    CHECK(swarm_size(1'000'000 * kMicroPerInter, c, big_n) == 35'000);
    CHECK(swarm_size(0, c, big_n) == 0);  // unstaked stream is unwatchable
    CHECK(swarm_size(1'000'000 * kMicroPerInter, c, 100) == 100);  // N cap
}

TEST_CASE("sqrt scaling property: quadrupling the stake doubles the swarm") {
    Rng rng(5);
    const double c = 35.0;
    const std::uint64_t big_n = 1u << 30;
    for (int i = 0; i < 2000; ++i) {
        MicroInter inter = MicroInter(1 + rng.uniform(1'000'000'000'000ull));
        std::int64_t n1 = std::int64_t(swarm_size(inter, c, big_n));
        std::int64_t n4 = std::int64_t(swarm_size(4 * inter, c, big_n));
        CHECK(std::abs(n4 - 2 * n1) <= 1);  // ceiling effects only
    }
}

TEST_CASE("hoepman minimum: d=0 bound is 95 for (1, 30, 1/3)") {
    CHECK(hoepman_min_swarm(1, 30.0, 1.0 / 3.0) == 95);
    CHECK(kOperationalSwarmSize == 35);
    CHECK_THROWS_AS(hoepman_min_swarm(1, 30.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(hoepman_min_swarm(0, 30.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(hoepman_min_swarm(1, 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("hoepman minimum is independent of any network size") {
    // No N parameter exists; the result depends only on (r, s, f).
    auto n1 = hoepman_min_swarm(2, 20.0, 0.25);
    auto n2 = hoepman_min_swarm(2, 20.0, 0.25);
    CHECK(n1 == n2);
}

namespace {
std::vector<NodeId> make_nodes(std::size_t n, std::uint64_t base = 0) {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(NodeId{base + i});
    return out;
}

Digest seed_of(const char* s) { return sha256(ByteView(to_bytes(s))); }
}  // namespace

TEST_CASE("assign_swarm is deterministic and samples without replacement") {
    auto eligible = make_nodes(50);
    Digest seed = seed_of("epoch-seed");
    auto a1 = assign_swarm(seed, StreamId{7}, 12, 3, eligible);
    auto a2 = assign_swarm(seed, StreamId{7}, 12, 3, eligible);
    CHECK(a1.members == a2.members);
    CHECK(a1.members.size() == 12);
    std::set<NodeId> distinct(a1.members.begin(), a1.members.end());
    CHECK(distinct.size() == 12);

    auto whole = assign_swarm(seed, StreamId{7}, 50, 3, eligible);
    CHECK(whole.members.size() == 50);
    CHECK_THROWS_AS(assign_swarm(seed, StreamId{7}, 51, 3, eligible),
                    InsufficientEligibleNodes);
}

TEST_CASE("independent streams get independent swarms (hypergeometric overlap)") {
    const std::size_t e_count = 60, n = 12, trials = 1000;
    auto eligible = make_nodes(e_count);
    double mean_expected = double(n) * double(n) / double(e_count);  // 2.4
    double var = double(n) * (double(n) / e_count) * (1.0 - double(n) / e_count) *
                 (double(e_count - n) / double(e_count - 1));
    double sigma_mean = std::sqrt(var / trials);

    double total_overlap = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        Encoder e;
        e.tag("trial-seed").u64(t);
        Digest seed = sha256(e.view());
        auto s1 = assign_swarm(seed, StreamId{1}, n, 0, eligible);
        auto s2 = assign_swarm(seed, StreamId{2}, n, 0, eligible);
        std::set<NodeId> set1(s1.members.begin(), s1.members.end());
        std::size_t overlap = 0;
        for (NodeId v : s2.members) overlap += set1.count(v);
        CHECK(s1.members != s2.members);
        total_overlap += double(overlap);
    }
    double mean = total_overlap / trials;
    CHECK(std::abs(mean - mean_expected) <= 5.0 * sigma_mean);
}

TEST_CASE("shuffle freshness: per-node membership is binomial over many epochs") {
    const std::size_t e_count = 50, n = 10, epochs = 1000;
    auto eligible = make_nodes(e_count);
    std::map<std::uint64_t, std::size_t> hits;
    for (std::size_t ep = 0; ep < epochs; ++ep) {
        Encoder e;
        e.tag("shuffle-seed").u64(ep);
        auto a = assign_swarm(sha256(e.view()), StreamId{3}, n, ep, eligible);
        for (NodeId v : a.members) hits[v.value]++;
    }
    const double p = double(n) / e_count;
    const double expected = epochs * p;
    const double sigma = std::sqrt(epochs * p * (1 - p));
    for (const auto& [node, count] : hits)
        CHECK(std::abs(double(count) - expected) <= 5.0 * sigma);
    CHECK(hits.size() == e_count);
}

TEST_CASE("staking eligibility: exact pro-rata boundary") {
    CHECK(staking_eligible(1 * kMicroPerInter, 35 * kMicroPerInter, 35));
    CHECK_FALSE(staking_eligible(1 * kMicroPerInter - 1, 35 * kMicroPerInter, 35));
    CHECK(staking_eligible(0, 0, 10));
    CHECK(staking_eligible(123, 0, 1));
}

TEST_CASE("epoch state enforces the unpredictability discipline") {
    EpochState state(4, 1000);
    CHECK(state.start_time() == 4000);
    CHECK(state.end_time() == 5000);
    CHECK_FALSE(state.seed_ready());
    auto eligible = make_nodes(10);
    CHECK_THROWS_AS(state.assign(StreamId{1}, 3, eligible), std::logic_error);

    auto randao = randao_round(4, {});
    state.set_seed(randao.seed);
    const auto& a = state.assign(StreamId{1}, 3, eligible);
    CHECK(a.members.size() == 3);
    CHECK(state.assignment(StreamId{1}) != nullptr);
    // assignment is fixed per epoch once queried
    const auto& again = state.assign(StreamId{1}, 3, eligible);
    CHECK(again.members == a.members);

    EpochSeed wrong;
    wrong.epoch = 9;
    EpochState other(5, 1000);
    CHECK_THROWS_AS(other.set_seed(wrong), std::logic_error);
}

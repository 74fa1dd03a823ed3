#include <doctest.h>

#include "intercloud/ripple.hpp"
#include "intercloud/rng.hpp"

using namespace intercloud;

namespace {
RippleId rid_of(std::uint64_t origin, const char* tag, Epoch ep) {
    Encoder e;
    e.tag(tag).u64(origin);
    return RippleId{StreamId{origin}, sha256(e.view()), ep};
}

RippleMessage msg_of(const RippleId& rid, MicroInter fee) {
    RippleMessage m;
    m.rid = rid;
    m.fee_remaining = fee;
    return m;
}
}  // namespace

TEST_CASE("process_ripple: first delivery forwards, duplicate discards") {
    SeenTable seen;
    std::vector<std::size_t> neighbours{1, 2};
    auto rid = rid_of(0, "r", 3);
    auto first = process_ripple(seen, msg_of(rid, 100), 3, neighbours, 1);
    CHECK(first.processed);
    CHECK_FALSE(first.discarded.has_value());
    CHECK(first.forward_to == neighbours);
    CHECK(first.forwarded.fee_remaining == 99);
    CHECK(first.forwarded.hop_count == 1);

    auto dup = process_ripple(seen, msg_of(rid, 100), 3, neighbours, 1);
    CHECK_FALSE(dup.processed);
    CHECK(dup.discarded == RippleDiscard::DuplicateRid);
}

TEST_CASE("process_ripple: fee exhaustion blocks forwarding, not processing") {
    SeenTable seen;
    auto rid = rid_of(1, "r", 3);
    auto out = process_ripple(seen, msg_of(rid, 0), 3, {1}, 1);
    CHECK(out.processed);
    CHECK(out.discarded == RippleDiscard::FeeExhausted);
    CHECK(out.forward_to.empty());
}

TEST_CASE("eviction keeps two epochs") {
    SeenTable seen;
    auto rid = rid_of(2, "r", 5);
    seen.insert(rid);
    seen.evict(6);
    CHECK(seen.contains(rid));  // epoch 5 retained during 6
    seen.evict(7);
    CHECK_FALSE(seen.contains(rid));  // 5 < 7−1 evicted

    SeenTable empty;
    empty.evict(9);
    CHECK(empty.size() == 0);
}

TEST_CASE("epoch duration check against the BFS diameter") {
    Graph path = Graph::path(10);  // D = 9
    auto ok = check_epoch_duration(path, 1, 20);
    CHECK(ok.ok);
    CHECK(ok.diameter == 9);
    auto tight = check_epoch_duration(path, 1, 9);
    CHECK_FALSE(tight.ok);  // needs strictly greater than D·δ_min
    CHECK(tight.bound == 9);

    Graph single(1);
    auto trivial = check_epoch_duration(single, 1, 1);
    CHECK(trivial.ok);
    CHECK(trivial.diameter == 0);

    Graph disconnected(4);
    disconnected.add_edge(0, 1);
    disconnected.add_edge(2, 3);
    auto warn = check_epoch_duration(disconnected, 1, 10);
    CHECK(warn.disconnected);
    CHECK(warn.diameter == 1);  // per-component max
}

TEST_CASE("trace on a ring: every node processes exactly once") {
    Graph ring = Graph::ring(10);
    std::vector<SeenTable> tables(10);
    auto trace = trace_ripple(ring, tables, 0, msg_of(rid_of(0, "ring", 1), 1'000'000), 1, 1);
    CHECK(trace.quiescent);
    CHECK(trace.nodes_processed == 10);
    CHECK(trace.max_hops <= 10);
    CHECK(trace.duplicates_discarded == 2 * 10 - 9);  // 2E − (N−1)
}

TEST_CASE("trace on K5: 5 processed, redundant deliveries discarded") {
    Graph k5 = Graph::complete(5);
    std::vector<SeenTable> tables(5);
    auto trace = trace_ripple(k5, tables, 0, msg_of(rid_of(0, "k5", 1), 1'000'000), 1, 1);
    CHECK(trace.quiescent);
    CHECK(trace.nodes_processed == 5);
    CHECK(trace.duplicates_discarded == 2 * 10 - 4);  // 16 redundant deliveries
}

TEST_CASE("fee covering three hops on a path reaches origin + 3 nodes") {
    Graph path = Graph::path(10);
    std::vector<SeenTable> tables(10);
    auto trace = trace_ripple(path, tables, 0, msg_of(rid_of(0, "path", 1), 3), 1, 1);
    CHECK(trace.quiescent);
    CHECK(trace.nodes_processed == 4);
    CHECK(trace.max_hops == 3);
}

TEST_CASE("termination on random connected topologies") {
    Rng rng(42);
    for (int t = 0; t < 100; ++t) {
        std::size_t n = 2 + rng.uniform(199);
        Graph g = Graph::random_connected(rng, n, rng.uniform(2 * n));
        std::vector<SeenTable> tables(n);
        std::size_t origin = rng.uniform(n);
        auto trace =
            trace_ripple(g, tables, origin, msg_of(rid_of(origin, "rand", 2), 1'000'000), 2, 1);
        REQUIRE(trace.quiescent);
        CHECK(trace.nodes_processed == n);  // ample fee, connected
        CHECK(trace.max_hops <= n);
        // no per-node re-processing: every table holds the rid exactly once
        for (auto& table : tables) CHECK(table.size() == 1);
    }
}

TEST_CASE("fee strictly decreases along every forwarding chain") {
    SeenTable seen;
    auto rid = rid_of(3, "fee", 1);
    auto out = process_ripple(seen, msg_of(rid, 10), 1, {1}, 3);
    CHECK(out.forwarded.fee_remaining == 7);
    SeenTable next;
    auto out2 = process_ripple(next, out.forwarded, 1, {2}, 3);
    CHECK(out2.forwarded.fee_remaining == 4);
    CHECK(out2.forwarded.fee_remaining < out.forwarded.fee_remaining);
}

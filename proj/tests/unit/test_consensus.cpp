#include <doctest.h>

#include <map>

#include "intercloud/consensus.hpp"
#include "intercloud/rng.hpp"

using namespace intercloud;

namespace {

struct Swarm {
    std::map<std::uint64_t, KeyPair> keys;
    std::vector<NodeId> members;
    const SignatureScheme& scheme = SignatureScheme::hashed();

    explicit Swarm(std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            Encoder e;
            e.tag("swarm.key").u64(i);
            keys.emplace(i, scheme.keypair_from_seed(sha256(e.view()).view()));
            members.push_back(NodeId{i});
        }
    }

    KeyLookup lookup() const {
        return [this](NodeId id) -> const PublicKey* {
            auto it = keys.find(id.value);
            return it == keys.end() ? nullptr : &it->second.pub;
        };
    }

    Attestation attest(std::uint64_t node, StreamId stream, const Digest& h, Epoch ep) const {
        return make_attestation(NodeId{node}, keys.at(node), stream, h, ep, scheme);
    }

    GossipDigest digest(std::uint64_t node, StreamId stream, const Digest& h, Epoch ep,
                        std::set<NodeId> peers) const {
        return make_gossip_digest(NodeId{node}, keys.at(node), stream, h, ep, std::move(peers),
                                  scheme);
    }
};

Digest h_of(const char* s) { return sha256(ByteView(to_bytes(s))); }

}  // namespace

TEST_CASE("supermajority threshold") {
    CHECK(supermajority(35) == 24);
    CHECK(supermajority(6) == 4);
    CHECK(supermajority(3) == 2);
    CHECK(supermajority(1) == 1);
}

TEST_CASE("attestation verification") {
    Swarm sw(3);
    auto a = sw.attest(0, StreamId{1}, h_of("h"), 2);
    CHECK(verify_attestation(a, sw.lookup(), sw.scheme));
    auto tampered = a;
    tampered.hash = h_of("other");
    CHECK_FALSE(verify_attestation(tampered, sw.lookup(), sw.scheme));
    auto unknown = a;
    unknown.node = NodeId{99};
    CHECK_FALSE(verify_attestation(unknown, sw.lookup(), sw.scheme));
}

TEST_CASE("detect_conflict yields a PoC exactly for same-slot conflicting pairs") {
    Swarm sw(3);
    StreamId s{7};
    auto a1 = sw.attest(1, s, h_of("h1"), 4);
    auto a2 = sw.attest(1, s, h_of("h2"), 4);
    auto same = sw.attest(1, s, h_of("h1"), 4);
    auto other_epoch = sw.attest(1, s, h_of("h3"), 5);
    auto other_node = sw.attest(2, s, h_of("h2"), 4);

    auto poc = detect_conflict(a1, a2, sw.lookup(), sw.scheme);
    REQUIRE(poc.has_value());
    CHECK(verify_poc(*poc, sw.lookup(), sw.scheme));
    CHECK(poc->a1.hash <= poc->a2.hash);

    CHECK_FALSE(detect_conflict(a1, same, sw.lookup(), sw.scheme).has_value());
    CHECK_FALSE(detect_conflict(a1, other_epoch, sw.lookup(), sw.scheme).has_value());
    CHECK_FALSE(detect_conflict(a1, other_node, sw.lookup(), sw.scheme).has_value());

    auto forged = a2;
    forged.sig.bytes[0] ^= 1;
    CHECK_FALSE(detect_conflict(a1, forged, sw.lookup(), sw.scheme).has_value());
}

TEST_CASE("verify_poc is self-certifying and rejects forgeries") {
    Swarm sw(2);
    StreamId s{7};
    auto poc = detect_conflict(sw.attest(0, s, h_of("x"), 1), sw.attest(0, s, h_of("y"), 1),
                               sw.lookup(), sw.scheme);
    REQUIRE(poc.has_value());

    // The only state needed is the signer's public key.
    const PublicKey pk = sw.keys.at(0).pub;
    KeyLookup only_pk = [&](NodeId) -> const PublicKey* { return &pk; };
    CHECK(verify_poc(*poc, only_pk, sw.scheme));

    auto equal_hashes = *poc;
    equal_hashes.a2 = equal_hashes.a1;
    CHECK_FALSE(verify_poc(equal_hashes, sw.lookup(), sw.scheme));

    auto resigned = *poc;
    resigned.a2.sig = sw.scheme.sign(sw.keys.at(1).secret, ByteView(resigned.a2.signing_bytes()));
    CHECK_FALSE(verify_poc(resigned, sw.lookup(), sw.scheme));

    // round-trip through the canonical encoding
    auto decoded = ProofOfCorruption::decode(ByteView(poc->encode()));
    CHECK(verify_poc(decoded, sw.lookup(), sw.scheme));
    CHECK(decoded.id() == poc->id());
}

namespace {
struct FinalityFixture {
    Swarm sw;
    StreamId stream{1};
    Epoch ep = 3;
    Digest h = h_of("head");
    std::vector<Attestation> attestations;
    std::vector<GossipDigest> digests;
    std::vector<ProofOfCorruption> pocs;

    explicit FinalityFixture(std::size_t n, std::size_t attesters) : sw(n) {
        std::set<NodeId> everyone;
        for (std::size_t i = 0; i < attesters; ++i) everyone.insert(NodeId{i});
        for (std::size_t i = 0; i < attesters; ++i) {
            attestations.push_back(sw.attest(i, stream, h, ep));
            digests.push_back(sw.digest(i, stream, h, ep, everyone));
        }
    }

    FinalityResult evaluate() const {
        return evaluate_finality(stream, ep, sw.members, attestations, digests, pocs, sw.lookup(),
                                 sw.scheme);
    }
};
}  // namespace

TEST_CASE("finality at the 2/3 threshold (n=35, M1=24)") {
    FinalityFixture f(35, 24);
    auto result = f.evaluate();
    REQUIRE(result.final());
    CHECK(result.certificate().hash == f.h);
    CHECK(result.certificate().attestations.size() == 24);

    FinalityFixture short_one(35, 23);
    auto not_final = short_one.evaluate();
    REQUIRE_FALSE(not_final.final());
    CHECK(not_final.not_final().reason == NotFinalReason::ConditionI);
}

TEST_CASE("condition (ii): a digest showing too few peers disqualifies its member") {
    FinalityFixture f(35, 24);
    // One member's digest only shows 20 peers (19 others + itself).
    std::set<NodeId> few;
    for (std::uint64_t i = 0; i < 20; ++i) few.insert(NodeId{i});
    f.digests[0] = f.sw.digest(0, f.stream, f.h, f.ep, few);
    auto result = f.evaluate();
    REQUIRE_FALSE(result.final());
    CHECK(result.not_final().reason == NotFinalReason::ConditionII);
}

TEST_CASE("condition (ii) counts exclude the attester itself") {
    // Exactly M1 attesters whose digests list exactly the attester set: each
    // digest shows M1−1 others, which must fail condition (ii).
    FinalityFixture f(6, 4);
    auto result = f.evaluate();
    REQUIRE_FALSE(result.final());
    CHECK(result.not_final().reason == NotFinalReason::ConditionII);

    // Adding one more attester lifts every digest to M1 others.
    FinalityFixture g(6, 5);
    CHECK(g.evaluate().final());
}

TEST_CASE("condition (iii): any valid PoC for the slot voids finality") {
    FinalityFixture f(35, 30);
    auto poc = detect_conflict(f.sw.attest(2, f.stream, h_of("a"), f.ep),
                               f.sw.attest(2, f.stream, h_of("b"), f.ep), f.sw.lookup(),
                               f.sw.scheme);
    REQUIRE(poc.has_value());
    f.pocs.push_back(*poc);
    auto result = f.evaluate();
    REQUIRE_FALSE(result.final());
    CHECK(result.not_final().reason == NotFinalReason::ConditionIII);
}

TEST_CASE("attestations from non-swarm nodes are ignored but counted") {
    FinalityFixture f(35, 24);
    Swarm outsiders(40);
    f.attestations.push_back(outsiders.attest(39, f.stream, f.h, f.ep));
    auto result = f.evaluate();
    CHECK(result.final());

    FinalityFixture g(35, 23);
    Swarm more(40);
    g.attestations.push_back(more.attest(39, g.stream, g.h, g.ep));
    auto nf = g.evaluate();
    REQUIRE_FALSE(nf.final());
    CHECK(nf.not_final().non_swarm_attestations == 1);
}

TEST_CASE("client-side certificate verification rejects a PoC-voided cert") {
    FinalityFixture f(35, 24);
    auto result = f.evaluate();
    REQUIRE(result.final());
    const auto& cert = result.certificate();
    CHECK(verify_certificate(cert, f.sw.members, {}, f.sw.lookup(), f.sw.scheme));
    auto poc = detect_conflict(f.sw.attest(1, f.stream, h_of("p"), f.ep),
                               f.sw.attest(1, f.stream, h_of("q"), f.ep), f.sw.lookup(),
                               f.sw.scheme);
    CHECK_FALSE(verify_certificate(cert, f.sw.members, {*poc}, f.sw.lookup(), f.sw.scheme));
}

TEST_CASE("red threshold uses exact rational comparison") {
    Swarm sw(35);
    StreamId s{1};
    Epoch ep = 0;
    ListOfLiars lol;
    auto implicate = [&](std::uint64_t node) {
        auto poc = detect_conflict(sw.attest(node, s, h_of("u"), ep),
                                   sw.attest(node, s, h_of("v"), ep), sw.lookup(), sw.scheme);
        REQUIRE(poc.has_value());
        lol.add(*poc, ep);
    };
    for (std::uint64_t i = 0; i < 23; ++i) implicate(i);
    CHECK_FALSE(red_threshold_check(lol, s, ep, sw.members));  // 23 ≤ 2·35/3
    implicate(23);
    CHECK(red_threshold_check(lol, s, ep, sw.members));  // 24 > 2·35/3

    Swarm tiny(3);
    ListOfLiars tiny_lol;
    for (std::uint64_t i = 0; i < 3; ++i) {
        auto poc = detect_conflict(tiny.attest(i, s, h_of("u"), ep),
                                   tiny.attest(i, s, h_of("v"), ep), tiny.lookup(), tiny.scheme);
        tiny_lol.add(*poc, ep);
    }
    CHECK(red_threshold_check(tiny_lol, s, ep, tiny.members));
}

TEST_CASE("colour_of: red beats green beats yellow") {
    Swarm sw(35);
    StreamId s{1};
    ListOfLiars empty_lol;
    FinalityFixture f(35, 24);
    auto cert = f.evaluate().certificate();
    CHECK(colour_of(f.stream, f.ep, &cert, empty_lol, f.sw.members) == Colour::Green);
    CHECK(colour_of(f.stream, f.ep, nullptr, empty_lol, f.sw.members) == Colour::Yellow);

    ListOfLiars red_lol;
    for (std::uint64_t i = 0; i < 24; ++i) {
        auto poc = detect_conflict(f.sw.attest(i, f.stream, h_of("u"), f.ep),
                                   f.sw.attest(i, f.stream, h_of("v"), f.ep), f.sw.lookup(),
                                   f.sw.scheme);
        red_lol.add(*poc, f.ep);
    }
    CHECK(colour_of(f.stream, f.ep, &cert, red_lol, f.sw.members) == Colour::Red);
}

TEST_CASE("colour transitions: red sticky within an epoch") {
    CHECK(colour_transition_allowed(Colour::Yellow, Colour::Green));
    CHECK(colour_transition_allowed(Colour::Yellow, Colour::Red));
    CHECK(colour_transition_allowed(Colour::Green, Colour::Red));
    CHECK_FALSE(colour_transition_allowed(Colour::Red, Colour::Yellow));
    CHECK_FALSE(colour_transition_allowed(Colour::Red, Colour::Green));
    CHECK_FALSE(colour_transition_allowed(Colour::Green, Colour::Yellow));
}

TEST_CASE("junior state emits a PoC on a conflicting attestation and dedups forwards") {
    Swarm sw(4);
    StreamId s{1};
    JuniorState junior;
    auto a1 = sw.attest(0, s, h_of("one"), 2);
    auto a2 = sw.attest(0, s, h_of("two"), 2);

    auto intake1 = junior.observe_attestation(a1, 2, sw.lookup(), sw.scheme);
    CHECK(intake1.new_pocs.empty());
    CHECK(intake1.forward);

    auto intake2 = junior.observe_attestation(a2, 2, sw.lookup(), sw.scheme);
    REQUIRE(intake2.new_pocs.size() == 1);
    CHECK(junior.lol().size() == 1);

    // Duplicates of a stored PoC are kept once and forwarded once per epoch;
    // the detection broadcast was that one forward.
    auto poc = intake2.new_pocs[0];
    auto relay1 = junior.observe_poc(poc, 2, sw.lookup(), sw.scheme);
    CHECK_FALSE(relay1.forward);
    auto relay2 = junior.observe_poc(poc, 2, sw.lookup(), sw.scheme);
    CHECK_FALSE(relay2.forward);
    CHECK(junior.lol().size() == 1);

    // A PoC first learned by receipt forwards exactly once.
    JuniorState other;
    auto relay3 = other.observe_poc(poc, 2, sw.lookup(), sw.scheme);
    CHECK(relay3.forward);
    auto relay4 = other.observe_poc(poc, 2, sw.lookup(), sw.scheme);
    CHECK_FALSE(relay4.forward);
}

TEST_CASE("list of liars retention: two epochs") {
    Swarm sw(2);
    StreamId s{1};
    ListOfLiars lol;
    auto poc5 = detect_conflict(sw.attest(0, s, h_of("a"), 5), sw.attest(0, s, h_of("b"), 5),
                                sw.lookup(), sw.scheme);
    lol.add(*poc5, 5);
    lol.evict(6);
    CHECK(lol.size() == 1);
    lol.evict(7);
    CHECK(lol.size() == 0);
}

TEST_CASE("quorum intersection bound for all n up to 1000") {
    for (std::size_t n = 1; n <= 1000; ++n) {
        std::size_t m1 = supermajority(n);
        std::size_t worst = 2 * m1 >= n ? 2 * m1 - n : 0;
        std::size_t third = (n + 2) / 3;
        CHECK(worst >= third);
        CHECK(worst > 0);
    }
}

TEST_CASE("quorum intersection exhaustive at n=6") {
    const std::size_t n = 6;
    const std::size_t m1 = supermajority(n);  // 4
    std::size_t min_overlap = n;
    for (unsigned f1 = 0; f1 < 64; ++f1) {
        if (std::size_t(__builtin_popcount(f1)) < m1) continue;
        for (unsigned f2 = 0; f2 < 64; ++f2) {
            if (std::size_t(__builtin_popcount(f2)) < m1) continue;
            min_overlap = std::min<std::size_t>(min_overlap,
                                                std::size_t(__builtin_popcount(f1 & f2)));
        }
    }
    CHECK(min_overlap == 2);  // = ⌈6/3⌉ > 0
}

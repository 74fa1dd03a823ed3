#include "intercloud/consensus.hpp"

#include <algorithm>

namespace intercloud {

Bytes Attestation::signing_bytes() const {
    Encoder e;
    e.tag("intercloud.attest.v1").u64(node.value).u64(stream.value).raw(hash.view()).u64(epoch);
    return e.take();
}

Digest Attestation::id() const {
    Encoder e;
    e.raw(ByteView(signing_bytes())).bytes(ByteView(sig.bytes.data(), sig.bytes.size()));
    return sha256(e.view());
}

Attestation make_attestation(NodeId node, const KeyPair& keys, StreamId stream,
                             const Digest& hash, Epoch epoch, const SignatureScheme& scheme) {
    Attestation a;
    a.node = node;
    a.stream = stream;
    a.hash = hash;
    a.epoch = epoch;
    a.sig = scheme.sign(keys.secret, ByteView(a.signing_bytes()));
    return a;
}

bool verify_attestation(const Attestation& a, const KeyLookup& keys,
                        const SignatureScheme& scheme) {
    const PublicKey* pk = keys(a.node);
    if (pk == nullptr) return false;
    return scheme.verify(*pk, ByteView(a.signing_bytes()), a.sig);
}

namespace {
Bytes encode_attestation(const Attestation& a) {
    Encoder e;
    e.u64(a.node.value)
        .u64(a.stream.value)
        .raw(a.hash.view())
        .u64(a.epoch)
        .bytes(ByteView(a.sig.bytes.data(), a.sig.bytes.size()));
    return e.take();
}

Attestation decode_attestation(Decoder& d) {
    Attestation a;
    a.node.value = d.u64();
    a.stream.value = d.u64();
    Bytes h = d.raw(32);
    std::copy(h.begin(), h.end(), a.hash.bytes.begin());
    a.epoch = d.u64();
    a.sig.bytes = d.bytes();
    return a;
}
}  // namespace

Bytes ProofOfCorruption::encode() const {
    // Canonical: lower hash first.
    const Attestation& lo = a1.hash <= a2.hash ? a1 : a2;
    const Attestation& hi = a1.hash <= a2.hash ? a2 : a1;
    Encoder e;
    e.tag("intercloud.poc.v1").raw(ByteView(encode_attestation(lo))).raw(ByteView(encode_attestation(hi)));
    return e.take();
}

ProofOfCorruption ProofOfCorruption::decode(ByteView data) {
    Decoder d(data);
    d.expect_tag("intercloud.poc.v1");
    ProofOfCorruption poc;
    poc.a1 = decode_attestation(d);
    poc.a2 = decode_attestation(d);
    d.finish();
    return poc;
}

Digest ProofOfCorruption::id() const { return sha256(ByteView(encode())); }

std::optional<ProofOfCorruption> detect_conflict(const Attestation& a1, const Attestation& a2,
                                                 const KeyLookup& keys,
                                                 const SignatureScheme& scheme) {
    if (a1.node != a2.node || a1.stream != a2.stream || a1.epoch != a2.epoch) return std::nullopt;
    if (a1.hash == a2.hash) return std::nullopt;
    if (!verify_attestation(a1, keys, scheme) || !verify_attestation(a2, keys, scheme))
        return std::nullopt;
    ProofOfCorruption poc;
    poc.a1 = a1.hash <= a2.hash ? a1 : a2;
    poc.a2 = a1.hash <= a2.hash ? a2 : a1;
    return poc;
}

bool verify_poc(const ProofOfCorruption& poc, const KeyLookup& keys,
                const SignatureScheme& scheme) {
    const auto& a1 = poc.a1;
    const auto& a2 = poc.a2;
    if (a1.node != a2.node || a1.stream != a2.stream || a1.epoch != a2.epoch) return false;
    if (a1.hash == a2.hash) return false;
    return verify_attestation(a1, keys, scheme) && verify_attestation(a2, keys, scheme);
}

std::size_t supermajority(std::size_t n) { return (2 * n + 2) / 3; }

Bytes GossipDigest::signing_bytes() const {
    Encoder e;
    e.tag("intercloud.digest.v1").u64(node.value).u64(stream.value).raw(hash.view()).u64(epoch);
    e.u32(static_cast<std::uint32_t>(attested_peers.size()));
    for (NodeId p : attested_peers) e.u64(p.value);
    return e.take();
}

Digest GossipDigest::id() const {
    Encoder e;
    e.raw(ByteView(signing_bytes())).bytes(ByteView(sig.bytes.data(), sig.bytes.size()));
    return sha256(e.view());
}

GossipDigest make_gossip_digest(NodeId node, const KeyPair& keys, StreamId stream,
                                const Digest& hash, Epoch epoch, std::set<NodeId> attested_peers,
                                const SignatureScheme& scheme) {
    GossipDigest g;
    g.node = node;
    g.stream = stream;
    g.hash = hash;
    g.epoch = epoch;
    g.attested_peers = std::move(attested_peers);
    g.sig = scheme.sign(keys.secret, ByteView(g.signing_bytes()));
    return g;
}

bool verify_gossip_digest(const GossipDigest& g, const KeyLookup& keys,
                          const SignatureScheme& scheme) {
    const PublicKey* pk = keys(g.node);
    if (pk == nullptr) return false;
    return scheme.verify(*pk, ByteView(g.signing_bytes()), g.sig);
}

const char* to_string(NotFinalReason r) {
    switch (r) {
        case NotFinalReason::ConditionI: return "ConditionI";
        case NotFinalReason::ConditionII: return "ConditionII";
        case NotFinalReason::ConditionIII: return "ConditionIII";
    }
    return "?";
}

namespace {
// Peers counted towards condition (ii): swarm members other than the digest's
// own signer.
std::size_t digest_peer_count(const GossipDigest& g, const std::set<NodeId>& swarm_set) {
    std::size_t count = 0;
    for (NodeId p : g.attested_peers)
        if (p != g.node && swarm_set.count(p)) ++count;
    return count;
}
}  // namespace

FinalityResult evaluate_finality(StreamId stream, Epoch epoch,
                                 const std::vector<NodeId>& swarm,
                                 const std::vector<Attestation>& attestations,
                                 const std::vector<GossipDigest>& digests,
                                 const std::vector<ProofOfCorruption>& known_pocs,
                                 const KeyLookup& keys, const SignatureScheme& scheme) {
    const std::set<NodeId> swarm_set(swarm.begin(), swarm.end());
    const std::size_t m1 = supermajority(swarm.size());

    std::size_t non_swarm = 0;
    // hash → attester → attestation (first valid instance per member)
    std::map<Digest, std::map<NodeId, const Attestation*>> by_hash;
    for (const auto& a : attestations) {
        if (a.stream != stream || a.epoch != epoch) continue;
        if (!swarm_set.count(a.node)) {
            ++non_swarm;
            continue;
        }
        if (!verify_attestation(a, keys, scheme)) continue;
        by_hash[a.hash].emplace(a.node, &a);
    }

    auto reject = [&](NotFinalReason reason) {
        return FinalityResult{NotFinal{reason, non_swarm}};
    };

    const Digest* best_hash = nullptr;
    const std::map<NodeId, const Attestation*>* best = nullptr;
    for (const auto& [h, members] : by_hash) {
        if (members.size() >= m1 && (best == nullptr || members.size() > best->size())) {
            best_hash = &h;
            best = &members;
        }
    }
    if (best == nullptr) return reject(NotFinalReason::ConditionI);

    // Condition (ii): qualifying digest per attesting member.
    std::map<NodeId, const GossipDigest*> qualifying;
    for (const auto& g : digests) {
        if (g.stream != stream || g.epoch != epoch || g.hash != *best_hash) continue;
        if (!best->count(g.node)) continue;
        if (digest_peer_count(g, swarm_set) < m1) continue;
        if (!verify_gossip_digest(g, keys, scheme)) continue;
        qualifying.emplace(g.node, &g);
    }
    if (qualifying.size() < m1) return reject(NotFinalReason::ConditionII);

    // Condition (iii): any valid PoC for (stream, epoch) voids finality.
    for (const auto& poc : known_pocs) {
        if (poc.a1.stream == stream && poc.a1.epoch == epoch && verify_poc(poc, keys, scheme))
            return reject(NotFinalReason::ConditionIII);
    }

    FinalityCertificate cert;
    cert.stream = stream;
    cert.hash = *best_hash;
    cert.epoch = epoch;
    for (const auto& [node, g] : qualifying) {
        cert.attestations.push_back(*best->at(node));
        cert.digests.push_back(*g);
    }
    return FinalityResult{std::move(cert)};
}

bool verify_certificate(const FinalityCertificate& cert, const std::vector<NodeId>& swarm,
                        const std::vector<ProofOfCorruption>& client_pocs, const KeyLookup& keys,
                        const SignatureScheme& scheme) {
    auto result = evaluate_finality(cert.stream, cert.epoch, swarm, cert.attestations,
                                    cert.digests, client_pocs, keys, scheme);
    return result.final() && result.certificate().hash == cert.hash;
}

bool ListOfLiars::add(const ProofOfCorruption& poc, Epoch first_seen) {
    Digest id = poc.id();
    if (by_id_.count(id)) return false;
    by_id_.emplace(id, entries_.size());
    entries_.emplace_back(poc, first_seen);
    return true;
}

bool ListOfLiars::any_for(StreamId stream, Epoch epoch) const {
    for (const auto& [poc, seen] : entries_)
        if (poc.a1.stream == stream && poc.a1.epoch == epoch) return true;
    return false;
}

std::set<NodeId> ListOfLiars::implicated(StreamId stream, Epoch epoch) const {
    std::set<NodeId> out;
    for (const auto& [poc, seen] : entries_)
        if (poc.a1.stream == stream && poc.a1.epoch == epoch) out.insert(poc.a1.node);
    return out;
}

void ListOfLiars::evict(Epoch current) {
    std::vector<std::pair<ProofOfCorruption, Epoch>> kept;
    for (auto& e : entries_)
        if (current < 1 || e.second >= current - 1) kept.push_back(std::move(e));
    entries_ = std::move(kept);
    by_id_.clear();
    for (std::size_t i = 0; i < entries_.size(); ++i)
        by_id_.emplace(entries_[i].first.id(), i);
}

bool red_threshold_check(const ListOfLiars& lol, StreamId stream, Epoch epoch,
                         const std::vector<NodeId>& swarm) {
    const std::set<NodeId> swarm_set(swarm.begin(), swarm.end());
    std::size_t count = 0;
    for (NodeId v : lol.implicated(stream, epoch))
        if (swarm_set.count(v)) ++count;
    return 3 * count > 2 * swarm.size();
}

const char* to_string(Colour c) {
    switch (c) {
        case Colour::Green: return "Green";
        case Colour::Yellow: return "Yellow";
        case Colour::Red: return "Red";
    }
    return "?";
}

Colour colour_of(StreamId stream, Epoch epoch, const FinalityCertificate* certificate,
                 const ListOfLiars& lol, const std::vector<NodeId>& swarm) {
    if (red_threshold_check(lol, stream, epoch, swarm)) return Colour::Red;
    if (certificate != nullptr && certificate->stream == stream && certificate->epoch == epoch)
        return Colour::Green;
    return Colour::Yellow;
}

bool colour_transition_allowed(Colour from, Colour to) {
    if (from == to) return true;
    if (from == Colour::Red) return false;
    if (from == Colour::Green && to == Colour::Yellow) return false;
    return true;
}

JuniorState::Intake JuniorState::observe_attestation(const Attestation& a, Epoch current,
                                                     const KeyLookup& keys,
                                                     const SignatureScheme& scheme) {
    Intake intake;
    if (!verify_attestation(a, keys, scheme)) return intake;
    auto& per_hash = seen_[{a.node, a.stream, a.epoch}];
    bool novel = per_hash.emplace(a.hash, a).second;
    if (!novel) return intake;
    intake.forward = true;
    for (const auto& [h, other] : per_hash) {
        if (h == a.hash) continue;
        if (auto poc = detect_conflict(other, a, keys, scheme)) {
            if (lol_.add(*poc, current)) {
                intake.new_pocs.push_back(*poc);
                // Construction counts as this epoch's one broadcast.
                forwarded_.emplace(poc->id(), current);
            }
        }
    }
    return intake;
}

JuniorState::Intake JuniorState::observe_poc(const ProofOfCorruption& poc, Epoch current,
                                             const KeyLookup& keys,
                                             const SignatureScheme& scheme) {
    Intake intake;
    if (!verify_poc(poc, keys, scheme)) return intake;  // dropped, caller may log
    lol_.add(poc, current);
    intake.forward = forwarded_.emplace(poc.id(), current).second;
    return intake;
}

void JuniorState::evict(Epoch current) {
    lol_.evict(current);
    if (current < 1) return;
    std::erase_if(seen_, [&](const auto& kv) { return std::get<2>(kv.first) < current - 1; });
    std::erase_if(forwarded_, [&](const auto& kv) { return kv.second < current - 1; });
}

}  // namespace intercloud

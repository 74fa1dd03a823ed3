#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "intercloud/crypto.hpp"
#include "intercloud/ids.hpp"

namespace intercloud {

// Signed claim: "at epoch ep I have seen no hash other than h for stream i,
// and no Proof of Corruption for it this epoch."
struct Attestation {
    NodeId node;
    StreamId stream;
    Digest hash;
    Epoch epoch = 0;
    Signature sig;

    Bytes signing_bytes() const;
    Digest id() const;
    auto operator<=>(const Attestation&) const = default;
};

using KeyLookup = std::function<const PublicKey*(NodeId)>;

Attestation make_attestation(NodeId node, const KeyPair& keys, StreamId stream,
                             const Digest& hash, Epoch epoch, const SignatureScheme& scheme);
bool verify_attestation(const Attestation& a, const KeyLookup& keys,
                        const SignatureScheme& scheme);

// A pair of conflicting attestations from one signer. Self-certifying:
// verification needs only the signer's public key. Canonical form orders the
// pair by hash so equal conflicts have equal ids.
struct ProofOfCorruption {
    Attestation a1;
    Attestation a2;

    Digest id() const;
    Bytes encode() const;
    static ProofOfCorruption decode(ByteView data);
    auto operator<=>(const ProofOfCorruption&) const = default;
};

std::optional<ProofOfCorruption> detect_conflict(const Attestation& a1, const Attestation& a2,
                                                 const KeyLookup& keys,
                                                 const SignatureScheme& scheme);
bool verify_poc(const ProofOfCorruption& poc, const KeyLookup& keys,
                const SignatureScheme& scheme);

// Supermajority threshold M1 = ⌈2n/3⌉.
std::size_t supermajority(std::size_t n);

// Signed gossip summary: the peers whose own attestations for (stream, hash,
// epoch) this node has received.
struct GossipDigest {
    NodeId node;
    StreamId stream;
    Digest hash;
    Epoch epoch = 0;
    std::set<NodeId> attested_peers;
    Signature sig;

    Bytes signing_bytes() const;
    Digest id() const;
};

GossipDigest make_gossip_digest(NodeId node, const KeyPair& keys, StreamId stream,
                                const Digest& hash, Epoch epoch, std::set<NodeId> attested_peers,
                                const SignatureScheme& scheme);
bool verify_gossip_digest(const GossipDigest& g, const KeyLookup& keys,
                          const SignatureScheme& scheme);

struct FinalityCertificate {
    StreamId stream;
    Digest hash;
    Epoch epoch = 0;
    std::vector<Attestation> attestations;  // the certified member set F
    std::vector<GossipDigest> digests;      // one per member of F
};

enum class NotFinalReason {
    ConditionI,    // fewer than M1 members attested one hash
    ConditionII,   // fewer than M1 members hold a qualifying digest
    ConditionIII,  // a PoC implicates the stream this epoch
};

const char* to_string(NotFinalReason r);

struct NotFinal {
    NotFinalReason reason;
    std::size_t non_swarm_attestations = 0;  // diagnostics
};

struct FinalityResult {
    std::variant<FinalityCertificate, NotFinal> value;
    bool final() const { return std::holds_alternative<FinalityCertificate>(value); }
    const FinalityCertificate& certificate() const { return std::get<FinalityCertificate>(value); }
    const NotFinal& not_final() const { return std::get<NotFinal>(value); }
};

// Evaluates Green-finality from a message set. A member qualifies when it
// attested h and its digest counts ≥ M1 *other* swarm members for h; the
// digest is a signed claim and is not cross-checked against held
// attestations. Any valid PoC for (stream, epoch) voids finality.
FinalityResult evaluate_finality(StreamId stream, Epoch epoch,
                                 const std::vector<NodeId>& swarm,
                                 const std::vector<Attestation>& attestations,
                                 const std::vector<GossipDigest>& digests,
                                 const std::vector<ProofOfCorruption>& known_pocs,
                                 const KeyLookup& keys, const SignatureScheme& scheme);

// Full client-side re-verification of a received certificate, including the
// client's own PoC knowledge.
bool verify_certificate(const FinalityCertificate& cert, const std::vector<NodeId>& swarm,
                        const std::vector<ProofOfCorruption>& client_pocs, const KeyLookup& keys,
                        const SignatureScheme& scheme);

// Verified PoCs held by a node, retained for two epochs.
class ListOfLiars {
public:
    // Returns true if newly inserted.
    bool add(const ProofOfCorruption& poc, Epoch first_seen);
    bool contains(const Digest& poc_id) const { return by_id_.count(poc_id) > 0; }
    bool any_for(StreamId stream, Epoch epoch) const;
    std::set<NodeId> implicated(StreamId stream, Epoch epoch) const;
    void evict(Epoch current);  // drops entries first seen before current−1
    std::size_t size() const { return entries_.size(); }
    const std::vector<std::pair<ProofOfCorruption, Epoch>>& entries() const { return entries_; }

private:
    std::vector<std::pair<ProofOfCorruption, Epoch>> entries_;
    std::map<Digest, std::size_t> by_id_;
};

// True iff strictly more than 2n/3 distinct active members are implicated
// (exact integer comparison: 3·count > 2·n).
bool red_threshold_check(const ListOfLiars& lol, StreamId stream, Epoch epoch,
                         const std::vector<NodeId>& swarm);

enum class Colour { Green, Yellow, Red };

const char* to_string(Colour c);

struct StreamColour {
    Colour value = Colour::Yellow;
    SimTime since = 0;
};

// Red beats Green beats Yellow, per the colour definition.
Colour colour_of(StreamId stream, Epoch epoch, const FinalityCertificate* certificate,
                 const ListOfLiars& lol, const std::vector<NodeId>& swarm);

// Within an epoch Yellow→Green, Yellow→Red and Green→Red are allowed; Red is
// sticky until the next shuffle.
bool colour_transition_allowed(Colour from, Colour to);

enum class FinalityPolicy { RequireGreen, AcceptYellow, WaitAfterRed };

// Per-node monitoring state: cross-checks every incoming attestation against
// stored ones, constructs PoCs, and decides re-broadcasts (a given PoC is
// forwarded at most once per epoch).
class JuniorState {
public:
    struct Intake {
        std::vector<ProofOfCorruption> new_pocs;  // conflicts detected here
        bool forward = false;                     // re-broadcast the incoming item
    };

    Intake observe_attestation(const Attestation& a, Epoch current, const KeyLookup& keys,
                               const SignatureScheme& scheme);
    Intake observe_poc(const ProofOfCorruption& poc, Epoch current, const KeyLookup& keys,
                       const SignatureScheme& scheme);

    const ListOfLiars& lol() const { return lol_; }
    ListOfLiars& lol() { return lol_; }
    void evict(Epoch current);

private:
    // (node, stream, epoch) → hash → attestation (first instance kept)
    std::map<std::tuple<NodeId, StreamId, Epoch>, std::map<Digest, Attestation>> seen_;
    std::set<std::pair<Digest, Epoch>> forwarded_;  // PoC id × epoch dedup
    ListOfLiars lol_;
};

}  // namespace intercloud

#pragma once

#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "intercloud/crypto.hpp"
#include "intercloud/errors.hpp"
#include "intercloud/ids.hpp"

namespace intercloud {

enum class MessageKind : std::uint8_t {
    Content = 0,
    Transfer = 1,
    Emit = 2,
    Retire = 3,
    ReserveAdjust = 4,
    Relate = 5,
    Unrelate = 6,
};

struct Message {
    Digest prev;
    Bytes payload;
    std::uint64_t lamport_ts = 0;
    MessageKind kind = MessageKind::Content;
    Signature author_sig;

    Bytes signing_bytes() const;
    Digest digest() const;
};

// Rules programs are represented by their hash plus an enumerated behaviour;
// a general Rules VM is out of scope.
enum class RulesKind : std::uint8_t {
    Plain = 0,
    SimpleCoin = 1,
    Currency = 2,
};

class Stream {
public:
    Stream(StreamId id, PublicKey owner, RulesKind rules = RulesKind::Plain);

    StreamId id() const { return id_; }
    const PublicKey& owner_key() const { return owner_; }
    RulesKind rules() const { return rules_; }
    const Digest& rules_hash() const { return rules_hash_; }

    const std::vector<Message>& log() const { return log_; }
    // Hash of the latest message; empty_digest() for an empty log.
    Digest head_hash() const;
    std::uint64_t next_lamport_ts() const { return log_.empty() ? 0 : log_.back().lamport_ts + 1; }

    // Builds, signs and appends a new message. Throws AuthError if the signer
    // is not the stream owner.
    const Message& append(ByteView payload, MessageKind kind, const KeyPair& signer,
                          const SignatureScheme& scheme);

    // Replication path: accepts a fully formed message. Throws
    // AppendOnlyViolation if it does not extend the current head, AuthError
    // on a bad signature.
    const Message& ingest(Message msg, const SignatureScheme& scheme);

    // Re-verifies the whole hash chain and all signatures.
    bool verify_chain(const SignatureScheme& scheme) const;

    // Replay guard for transfer nonces, scoped to the current epoch.
    bool nonce_seen(const Digest& nonce) const { return seen_nonces_.count(nonce) > 0; }
    void record_nonce(const Digest& nonce) { seen_nonces_.insert(nonce); }
    void reset_nonces() { seen_nonces_.clear(); }

    // Economic state. Mutated only by the transfer/economy operations, which
    // maintain the backing invariant: inter ≥ Σ_c balances[c]·exRate(c).
    MicroInter inter = 0;
    std::map<CoinId, std::int64_t> balances;

private:
    StreamId id_;
    PublicKey owner_;
    RulesKind rules_;
    Digest rules_hash_;
    std::vector<Message> log_;
    std::set<Digest> seen_nonces_;
};

// Exchange rate as an exact rational: reserve µINTER per `supply` coin units.
struct ExchangeRate {
    MicroInter numerator = 0;   // reserve, µINTER
    std::int64_t denominator = 1;  // supply, coin units; > 0
};

// Rate-limit function window-length → max outflow (µINTER), represented as a
// monotone piecewise-linear table. The default `linear` form is cap·Δt/W,
// growing without saturation, which is what makes the capital-flight bound
// hold at every multiple of the window.
class RateLimit {
public:
    static RateLimit linear(MicroInter cap_per_window, SimTime window);
    static RateLimit table(std::vector<std::pair<SimTime, MicroInter>> points);
    static RateLimit unlimited();

    MicroInter max_outflow(SimTime window_len) const;
    bool is_unlimited() const { return unlimited_; }
    // Window lengths at which trailing-outflow enforcement runs.
    const std::vector<std::pair<SimTime, MicroInter>>& checkpoints() const { return points_; }

private:
    RateLimit() = default;
    bool unlimited_ = false;
    bool saturating_ = false;  // table form saturates beyond the last point
    std::vector<std::pair<SimTime, MicroInter>> points_;
};

// Enforcement is a sliding trailing-window sum: a transfer of value Δ at time
// t is allowed iff, for every checkpoint (W, cap), the outflow during
// (t−W, t] plus Δ stays within cap. This makes the total outflow over any
// window of length k·W at most k·cap, which is the capital-flight bound.
struct Relation {
    StreamId from;
    StreamId to;
    RateLimit limit = RateLimit::unlimited();
    std::set<CoinId> permitted_coins;
    SimTime last_transfer_ts = 0;

    MicroInter trailing_outflow(SimTime now, SimTime window) const;
    bool within_limit(SimTime now, MicroInter delta) const;
    void record_outflow(SimTime now, MicroInter delta);

private:
    std::vector<std::pair<SimTime, MicroInter>> recent_;
};

// Bidirectional relation index; transfers may only flow through relations
// recorded here.
class RelationIndex {
public:
    // Throws DuplicateRelation if (from, to) already exists.
    Relation& relate(StreamId from, StreamId to, RateLimit limit, std::set<CoinId> permitted,
                     SimTime now);
    Relation* find(StreamId from, StreamId to);
    const Relation* find(StreamId from, StreamId to) const;
    std::vector<const Relation*> from(StreamId id) const;
    std::vector<const Relation*> to(StreamId id) const;

private:
    std::map<std::pair<StreamId, StreamId>, Relation> relations_;
};

struct TransferRequest {
    StreamId from;
    StreamId to;
    CoinId coin;
    std::int64_t amount = 0;  // coin units, ≥ 1
    std::uint64_t lamport_ts = 0;
    Digest nonce;
};

enum class TransferReject {
    DuplicateNonce,
    NoRelation,
    CoinNotPermitted,
    ExactArithmetic,
    RateLimited,
    InsufficientBalance,
};

const char* to_string(TransferReject r);

// Validates Def.-of-transfer conditions in order: replay nonce, (i) relation
// pre-exists, (ii) coin permitted, Δ exactly representable, (iii) Δ within
// the rate limit for [last_transfer, now], (iv) balance covers the amount.
// Returns nullopt when valid.
std::optional<TransferReject> validate_transfer(const Stream& sender, const Relation* relation,
                                                const TransferRequest& req, SimTime now,
                                                const ExchangeRate& rate);

// Exact value moved: Δ = amount·numerator/denominator. Empty when the
// division is not exact.
std::optional<MicroInter> transfer_delta(std::int64_t amount, const ExchangeRate& rate);

// The transfer message payload recorded on both logs: amount and the exact
// exchange rate used, so Δ stays auditable after later rate changes.
struct TransferRecord {
    StreamId from;
    StreamId to;
    CoinId coin;
    std::int64_t amount = 0;
    ExchangeRate rate;
    MicroInter delta = 0;
    Digest nonce;
    SimTime time = 0;
    bool outbound = false;  // true on the sender's log

    Bytes encode() const;
    static TransferRecord decode(ByteView payload);
};

struct TransferApplied {
    MicroInter delta = 0;
    const Message* sender_msg = nullptr;
    const Message* receiver_msg = nullptr;
};

// Validates and applies: moves Δ µINTER and the coin amount, appends the
// transfer message to both logs, records the nonce, advances the relation's
// rate-limit window. Zero-sum and backing-preserving by construction.
std::variant<TransferApplied, TransferReject> apply_transfer(
    Stream& sender, const KeyPair& sender_keys, Stream& receiver, const KeyPair& receiver_keys,
    Relation& relation, const TransferRequest& req, const ExchangeRate& rate, SimTime now,
    const SignatureScheme& scheme);

// Total order for concurrent requests against one sender: by lamport_ts,
// ties broken by nonce digest (lexicographic).
std::vector<TransferRequest> serialize_concurrent(std::vector<TransferRequest> requests);

// Sum of outbound transfer Δ values with record time in [t0, t1].
MicroInter outflow(const Stream& stream, SimTime t0, SimTime t1);

}  // namespace intercloud

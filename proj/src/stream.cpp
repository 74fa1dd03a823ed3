#include "intercloud/stream.hpp"

#include <algorithm>

namespace intercloud {

Bytes Message::signing_bytes() const {
    Encoder e;
    e.tag("intercloud.msg.v1")
        .raw(prev.view())
        .u8(static_cast<std::uint8_t>(kind))
        .u64(lamport_ts)
        .bytes(ByteView(payload.data(), payload.size()));
    return e.take();
}

Digest Message::digest() const {
    Encoder e;
    e.raw(ByteView(signing_bytes()))
        .bytes(ByteView(author_sig.bytes.data(), author_sig.bytes.size()));
    return sha256(e.view());
}

Stream::Stream(StreamId id, PublicKey owner, RulesKind rules)
    : id_(id), owner_(std::move(owner)), rules_(rules) {
    Encoder e;
    e.tag("intercloud.rules.v1").u8(static_cast<std::uint8_t>(rules));
    rules_hash_ = sha256(e.view());
}

Digest Stream::head_hash() const {
    return log_.empty() ? empty_digest() : log_.back().digest();
}

const Message& Stream::append(ByteView payload, MessageKind kind, const KeyPair& signer,
                              const SignatureScheme& scheme) {
    if (signer.pub != owner_)
        throw AuthError("append: signer is not the stream owner");
    Message m;
    m.prev = head_hash();
    m.payload.assign(payload.begin(), payload.end());
    m.lamport_ts = next_lamport_ts();
    m.kind = kind;
    m.author_sig = scheme.sign(signer.secret, ByteView(m.signing_bytes()));
    log_.push_back(std::move(m));
    return log_.back();
}

const Message& Stream::ingest(Message msg, const SignatureScheme& scheme) {
    if (msg.prev != head_hash())
        throw AppendOnlyViolation("ingest: message does not extend the current head");
    if (msg.lamport_ts != next_lamport_ts())
        throw AppendOnlyViolation("ingest: lamport timestamp out of sequence");
    if (!scheme.verify(owner_, ByteView(msg.signing_bytes()), msg.author_sig))
        throw AuthError("ingest: signature does not verify against the stream owner");
    log_.push_back(std::move(msg));
    return log_.back();
}

bool Stream::verify_chain(const SignatureScheme& scheme) const {
    Digest prev = empty_digest();
    std::uint64_t ts = 0;
    for (const auto& m : log_) {
        if (m.prev != prev || m.lamport_ts != ts) return false;
        if (!scheme.verify(owner_, ByteView(m.signing_bytes()), m.author_sig)) return false;
        prev = m.digest();
        ++ts;
    }
    return true;
}

RateLimit RateLimit::linear(MicroInter cap_per_window, SimTime window) {
    RateLimit r;
    if (window == 0) throw std::invalid_argument("RateLimit::linear: zero window");
    r.points_ = {{window, cap_per_window}};
    return r;
}

RateLimit RateLimit::table(std::vector<std::pair<SimTime, MicroInter>> points) {
    RateLimit r;
    std::sort(points.begin(), points.end());
    for (std::size_t i = 1; i < points.size(); ++i)
        if (points[i].second < points[i - 1].second)
            throw std::invalid_argument("RateLimit::table: not monotone");
    r.points_ = std::move(points);
    r.saturating_ = true;
    return r;
}

RateLimit RateLimit::unlimited() {
    RateLimit r;
    r.unlimited_ = true;
    return r;
}

MicroInter RateLimit::max_outflow(SimTime window_len) const {
    if (unlimited_) return std::numeric_limits<MicroInter>::max();
    if (points_.empty()) return 0;
    // Linear form: cap·Δt/W without saturation.
    if (!saturating_) {
        const auto [w, cap] = points_[0];
        auto scaled = static_cast<unsigned __int128>(cap) * window_len / w;
        if (scaled > static_cast<unsigned __int128>(std::numeric_limits<MicroInter>::max()))
            return std::numeric_limits<MicroInter>::max();
        return static_cast<MicroInter>(scaled);
    }
    if (window_len >= points_.back().first) return points_.back().second;
    std::pair<SimTime, MicroInter> lo{0, 0};
    for (const auto& p : points_) {
        if (window_len <= p.first) {
            SimTime span = p.first - lo.first;
            if (span == 0) return p.second;
            auto rise = static_cast<unsigned __int128>(p.second - lo.second);
            return lo.second + static_cast<MicroInter>(rise * (window_len - lo.first) / span);
        }
        lo = p;
    }
    return points_.back().second;
}

MicroInter Relation::trailing_outflow(SimTime now, SimTime window) const {
    MicroInter sum = 0;
    for (const auto& [t, delta] : recent_)
        if (t + window > now) sum += delta;
    return sum;
}

bool Relation::within_limit(SimTime now, MicroInter delta) const {
    if (limit.is_unlimited()) return true;
    for (const auto& [window, cap] : limit.checkpoints())
        if (trailing_outflow(now, window) + delta > cap) return false;
    return true;
}

void Relation::record_outflow(SimTime now, MicroInter delta) {
    last_transfer_ts = now;
    recent_.emplace_back(now, delta);
    if (limit.is_unlimited() || limit.checkpoints().empty()) {
        recent_.clear();
        return;
    }
    const SimTime horizon = limit.checkpoints().back().first;
    std::erase_if(recent_, [&](const auto& e) { return e.first + horizon <= now; });
}

Relation& RelationIndex::relate(StreamId from, StreamId to, RateLimit limit,
                                std::set<CoinId> permitted, SimTime now) {
    auto key = std::make_pair(from, to);
    if (relations_.count(key))
        throw DuplicateRelation("relate: relation already exists");
    Relation r;
    r.from = from;
    r.to = to;
    r.limit = std::move(limit);
    r.permitted_coins = std::move(permitted);
    r.last_transfer_ts = now;
    return relations_.emplace(key, std::move(r)).first->second;
}

Relation* RelationIndex::find(StreamId from, StreamId to) {
    auto it = relations_.find({from, to});
    return it == relations_.end() ? nullptr : &it->second;
}

const Relation* RelationIndex::find(StreamId from, StreamId to) const {
    auto it = relations_.find({from, to});
    return it == relations_.end() ? nullptr : &it->second;
}

std::vector<const Relation*> RelationIndex::from(StreamId id) const {
    std::vector<const Relation*> out;
    for (const auto& [key, rel] : relations_)
        if (key.first == id) out.push_back(&rel);
    return out;
}

std::vector<const Relation*> RelationIndex::to(StreamId id) const {
    std::vector<const Relation*> out;
    for (const auto& [key, rel] : relations_)
        if (key.second == id) out.push_back(&rel);
    return out;
}

const char* to_string(TransferReject r) {
    switch (r) {
        case TransferReject::DuplicateNonce: return "DuplicateNonce";
        case TransferReject::NoRelation: return "NoRelation";
        case TransferReject::CoinNotPermitted: return "CoinNotPermitted";
        case TransferReject::ExactArithmetic: return "ExactArithmetic";
        case TransferReject::RateLimited: return "RateLimited";
        case TransferReject::InsufficientBalance: return "InsufficientBalance";
    }
    return "?";
}

std::optional<MicroInter> transfer_delta(std::int64_t amount, const ExchangeRate& rate) {
    if (rate.denominator <= 0) throw UndefinedRate("transfer_delta: zero supply");
    auto num = static_cast<unsigned __int128>(amount) * static_cast<unsigned __int128>(rate.numerator);
    if (num % static_cast<unsigned __int128>(rate.denominator) != 0) return std::nullopt;
    auto q = num / static_cast<unsigned __int128>(rate.denominator);
    if (q > static_cast<unsigned __int128>(std::numeric_limits<MicroInter>::max()))
        return std::nullopt;
    return static_cast<MicroInter>(q);
}

std::optional<TransferReject> validate_transfer(const Stream& sender, const Relation* relation,
                                                const TransferRequest& req, SimTime now,
                                                const ExchangeRate& rate) {
    if (req.amount <= 0) return TransferReject::ExactArithmetic;
    if (sender.nonce_seen(req.nonce)) return TransferReject::DuplicateNonce;
    if (relation == nullptr || relation->from != req.from || relation->to != req.to)
        return TransferReject::NoRelation;
    if (!relation->permitted_coins.count(req.coin)) return TransferReject::CoinNotPermitted;
    auto delta = transfer_delta(req.amount, rate);
    if (!delta) return TransferReject::ExactArithmetic;
    if (!relation->within_limit(now, *delta)) return TransferReject::RateLimited;
    auto bal = sender.balances.find(req.coin);
    std::int64_t have = bal == sender.balances.end() ? 0 : bal->second;
    if (have < req.amount) return TransferReject::InsufficientBalance;
    return std::nullopt;
}

Bytes TransferRecord::encode() const {
    Encoder e;
    e.tag("intercloud.transfer.v1")
        .u64(from.value)
        .u64(to.value)
        .u64(coin.value)
        .i64(amount)
        .i64(rate.numerator)
        .i64(rate.denominator)
        .i64(delta)
        .raw(nonce.view())
        .u64(time)
        .u8(outbound ? 1 : 0);
    return e.take();
}

TransferRecord TransferRecord::decode(ByteView payload) {
    Decoder d(payload);
    d.expect_tag("intercloud.transfer.v1");
    TransferRecord r;
    r.from.value = d.u64();
    r.to.value = d.u64();
    r.coin.value = d.u64();
    r.amount = d.i64();
    r.rate.numerator = d.i64();
    r.rate.denominator = d.i64();
    r.delta = d.i64();
    Bytes nonce = d.raw(32);
    std::copy(nonce.begin(), nonce.end(), r.nonce.bytes.begin());
    r.time = d.u64();
    r.outbound = d.u8() != 0;
    d.finish();
    return r;
}

std::variant<TransferApplied, TransferReject> apply_transfer(
    Stream& sender, const KeyPair& sender_keys, Stream& receiver, const KeyPair& receiver_keys,
    Relation& relation, const TransferRequest& req, const ExchangeRate& rate, SimTime now,
    const SignatureScheme& scheme) {
    if (auto reject = validate_transfer(sender, &relation, req, now, rate)) return *reject;
    MicroInter delta = *transfer_delta(req.amount, rate);

    TransferRecord rec;
    rec.from = req.from;
    rec.to = req.to;
    rec.coin = req.coin;
    rec.amount = req.amount;
    rec.rate = rate;
    rec.delta = delta;
    rec.nonce = req.nonce;
    rec.time = now;

    sender.inter -= delta;
    receiver.inter += delta;
    sender.balances[req.coin] -= req.amount;
    receiver.balances[req.coin] += req.amount;
    if (sender.balances[req.coin] == 0) sender.balances.erase(req.coin);
    sender.record_nonce(req.nonce);
    relation.record_outflow(now, delta);

    TransferApplied applied;
    applied.delta = delta;
    rec.outbound = true;
    applied.sender_msg =
        &sender.append(ByteView(rec.encode()), MessageKind::Transfer, sender_keys, scheme);
    rec.outbound = false;
    applied.receiver_msg =
        &receiver.append(ByteView(rec.encode()), MessageKind::Transfer, receiver_keys, scheme);
    return applied;
}

std::vector<TransferRequest> serialize_concurrent(std::vector<TransferRequest> requests) {
    std::stable_sort(requests.begin(), requests.end(),
                     [](const TransferRequest& a, const TransferRequest& b) {
                         if (a.lamport_ts != b.lamport_ts) return a.lamport_ts < b.lamport_ts;
                         return a.nonce < b.nonce;
                     });
    return requests;
}

MicroInter outflow(const Stream& stream, SimTime t0, SimTime t1) {
    MicroInter total = 0;
    for (const auto& m : stream.log()) {
        if (m.kind != MessageKind::Transfer) continue;
        TransferRecord rec = TransferRecord::decode(ByteView(m.payload.data(), m.payload.size()));
        if (rec.outbound && rec.time >= t0 && rec.time <= t1) total += rec.delta;
    }
    return total;
}

}  // namespace intercloud

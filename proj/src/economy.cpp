#include "intercloud/economy.hpp"

#include <algorithm>

#include "intercloud/errors.hpp"

namespace intercloud {

const char* to_string(EmitOutcome v) {
    switch (v) {
        case EmitOutcome::Ok: return "Ok";
        case EmitOutcome::PolicyError: return "PolicyError";
        case EmitOutcome::BackingViolation: return "BackingViolation";
    }
    return "?";
}

const char* to_string(RetireOutcome v) {
    switch (v) {
        case RetireOutcome::Ok: return "Ok";
        case RetireOutcome::PolicyError: return "PolicyError";
        case RetireOutcome::InsufficientSupply: return "InsufficientSupply";
        case RetireOutcome::InsufficientHolderBalance: return "InsufficientHolderBalance";
        case RetireOutcome::BackingViolation: return "BackingViolation";
    }
    return "?";
}

const char* to_string(AdjustOutcome v) {
    switch (v) {
        case AdjustOutcome::Ok: return "Ok";
        case AdjustOutcome::RateLimited: return "RateLimited";
        case AdjustOutcome::InsufficientReserve: return "InsufficientReserve";
        case AdjustOutcome::BackingViolation: return "BackingViolation";
    }
    return "?";
}

const char* to_string(VestOutcome v) {
    switch (v) {
        case VestOutcome::Ok: return "Ok";
        case VestOutcome::RateLimited: return "RateLimited";
        case VestOutcome::InsufficientVested: return "InsufficientVested";
        case VestOutcome::InsufficientTreasury: return "InsufficientTreasury";
    }
    return "?";
}

Rational corrupt_payoff_bound(const Rational& gain, const Rational& loss,
                              const Rational& p_evade) {
    return gain - (Rational(1) - p_evade) * loss;
}

BribeBound min_supermajority_bribe(const std::vector<MicroInter>& member_stakes) {
    if (member_stakes.empty()) throw std::invalid_argument("min_supermajority_bribe: empty swarm");
    BribeBound b;
    b.members_needed = 2 * member_stakes.size() / 3 + 1;
    b.min_member_stake = *std::min_element(member_stakes.begin(), member_stakes.end());
    b.total = boost::multiprecision::cpp_int(b.members_needed) * b.min_member_stake;
    return b;
}

bool bribe_exceeds_two_thirds(const BribeBound& bound, MicroInter inter_i) {
    return bound.total * 3 > boost::multiprecision::cpp_int(inter_i) * 2;
}

KeyPair Ledger::make_stream_keys(StreamId id) const {
    Encoder e;
    e.tag("intercloud.streamkey.v1").u64(id.value);
    Digest seed = sha256(e.view());
    return scheme_->keypair_from_seed(seed.view());
}

Stream& Ledger::create_genesis_stream(StreamId id, MicroInter total) {
    if (total_ != 0) throw std::logic_error("genesis stream already created");
    if (total <= 0) throw std::invalid_argument("genesis total must be positive");
    total_ = total;
    KeyPair keys = make_stream_keys(id);
    auto [it, inserted] = streams_.emplace(id, Stream(id, keys.pub, RulesKind::Plain));
    if (!inserted) throw std::logic_error("stream id already in use");
    keys_.emplace(id, std::move(keys));
    it->second.inter = total;
    log_event(0, "genesis", "total=" + std::to_string(total));
    return it->second;
}

Stream& Ledger::create_stream(StreamId id, RulesKind rules, MicroInter initial_inter,
                              StreamId funded_from) {
    Stream& funder = stream(funded_from);
    if (initial_inter < 0 || funder.inter < initial_inter)
        throw std::invalid_argument("create_stream: funding stream cannot cover initial weight");
    KeyPair keys = make_stream_keys(id);
    auto [it, inserted] = streams_.emplace(id, Stream(id, keys.pub, rules));
    if (!inserted) throw std::logic_error("stream id already in use");
    keys_.emplace(id, std::move(keys));
    funder.inter -= initial_inter;
    it->second.inter = initial_inter;
    log_event(0, "create_stream", "id=" + std::to_string(id.value));
    return it->second;
}

Stream& Ledger::create_currency_stream(StreamId id, MicroInter initial_reserve,
                                       StreamId funded_from) {
    Stream& funder = stream(funded_from);
    if (initial_reserve < 0 || funder.inter < initial_reserve)
        throw std::invalid_argument("create_currency_stream: reserve exceeds funding weight");
    Stream& s = create_stream(id, RulesKind::Currency, 0, funded_from);
    funder.inter -= initial_reserve;
    CurrencyInfo info;
    info.reserve = initial_reserve;
    currencies_.emplace(id, info);
    log_event(0, "create_currency", "id=" + std::to_string(id.value));
    return s;
}

VestingAccount& Ledger::create_vesting(NodeId node, MicroInter initial_stake,
                                       StreamId funded_from, Rational rate) {
    Stream& funder = stream(funded_from);
    if (initial_stake < 0 || funder.inter < initial_stake)
        throw std::invalid_argument("create_vesting: funding stream cannot cover stake");
    auto [it, inserted] = vesting_.emplace(node, VestingAccount{node, 0, 0, std::move(rate)});
    if (!inserted) throw std::logic_error("vesting account already exists");
    funder.inter -= initial_stake;
    it->second.vested = initial_stake;
    return it->second;
}

Stream& Ledger::stream(StreamId id) {
    auto it = streams_.find(id);
    if (it == streams_.end()) throw std::out_of_range("unknown stream id");
    return it->second;
}

const Stream& Ledger::stream(StreamId id) const {
    auto it = streams_.find(id);
    if (it == streams_.end()) throw std::out_of_range("unknown stream id");
    return it->second;
}

const KeyPair& Ledger::stream_keys(StreamId id) const {
    auto it = keys_.find(id);
    if (it == keys_.end()) throw std::out_of_range("unknown stream id");
    return it->second;
}

ExchangeRate Ledger::exchange_rate(CoinId coin) const {
    auto it = currencies_.find(coin);
    if (it == currencies_.end()) throw UnknownCoin("no currency stream for coin");
    if (it->second.supply() <= 0) throw UndefinedRate("exchange rate undefined: zero supply");
    return ExchangeRate{it->second.reserve, it->second.supply()};
}

Rational Ledger::stream_value(StreamId id) const {
    const Stream& s = stream(id);
    Rational v = 0;
    for (const auto& [coin, amount] : s.balances) {
        if (amount == 0) continue;
        ExchangeRate rate = exchange_rate(coin);
        v += Rational(amount) * Rational(rate.numerator, rate.denominator);
    }
    return v;
}

bool Ledger::backing_ok(StreamId id) const {
    return stream_value(id) <= Rational(stream(id).inter);
}

std::variant<TransferApplied, TransferReject> Ledger::transfer(const TransferRequest& req,
                                                               SimTime now) {
    Stream& sender = stream(req.from);
    Stream& receiver = stream(req.to);
    Relation* rel = relations_.find(req.from, req.to);
    ExchangeRate rate = exchange_rate(req.coin);
    if (auto reject = validate_transfer(sender, rel, req, now, rate)) return *reject;
    auto result = apply_transfer(sender, stream_keys(req.from), receiver, stream_keys(req.to),
                                 *rel, req, rate, now, *scheme_);
    if (std::holds_alternative<TransferApplied>(result))
        log_event(now, "transfer",
                  "from=" + std::to_string(req.from.value) + " to=" + std::to_string(req.to.value) +
                      " coin=" + std::to_string(req.coin.value) +
                      " a=" + std::to_string(req.amount) +
                      " delta=" + std::to_string(std::get<TransferApplied>(result).delta));
    return result;
}

EmitOutcome Ledger::emit(CoinId coin, std::int64_t delta, StreamId recipient, SimTime now) {
    auto it = currencies_.find(coin);
    if (it == currencies_.end()) throw UnknownCoin("emit: no such currency");
    Stream& cs = stream(coin);
    Stream& rcpt = stream(recipient);
    if (delta <= 0 || cs.rules() != RulesKind::Currency) return EmitOutcome::PolicyError;
    CurrencyInfo& info = it->second;

    // Backing re-check at the recipient against the post-emission rate.
    Rational new_rate(info.reserve, info.supply() + delta);
    Rational v = stream_value(recipient);
    auto held = rcpt.balances.find(coin);
    if (held != rcpt.balances.end() && info.supply() > 0)
        v -= Rational(held->second) * Rational(info.reserve, info.supply());
    std::int64_t new_balance = (held == rcpt.balances.end() ? 0 : held->second) + delta;
    v += Rational(new_balance) * new_rate;
    if (v > Rational(rcpt.inter)) return EmitOutcome::BackingViolation;

    info.emitted += delta;
    rcpt.balances[coin] += delta;
    Encoder e;
    e.tag("intercloud.emit.v1").u64(coin.value).i64(delta).u64(recipient.value).u64(now);
    cs.append(ByteView(e.view()), MessageKind::Emit, stream_keys(coin), *scheme_);
    if (recipient != coin)
        rcpt.append(ByteView(e.view()), MessageKind::Emit, stream_keys(recipient), *scheme_);
    log_event(now, "emit",
              "coin=" + std::to_string(coin.value) + " delta=" + std::to_string(delta) +
                  " to=" + std::to_string(recipient.value));
    return EmitOutcome::Ok;
}

RetireOutcome Ledger::retire(CoinId coin, std::int64_t delta, StreamId holder, SimTime now) {
    auto it = currencies_.find(coin);
    if (it == currencies_.end()) throw UnknownCoin("retire: no such currency");
    Stream& cs = stream(coin);
    Stream& h = stream(holder);
    if (delta <= 0 || cs.rules() != RulesKind::Currency) return RetireOutcome::PolicyError;
    CurrencyInfo& info = it->second;
    if (delta > info.supply()) return RetireOutcome::InsufficientSupply;
    auto held = h.balances.find(coin);
    if (held == h.balances.end() || held->second < delta)
        return RetireOutcome::InsufficientHolderBalance;

    // Retirement raises the rate for every remaining holder; reject if any
    // holder's backing would break.
    std::int64_t new_supply = info.supply() - delta;
    if (new_supply > 0) {
        Rational old_rate(info.reserve, info.supply());
        Rational new_rate(info.reserve, new_supply);
        for (const auto& [sid, s] : streams_) {
            auto bal = s.balances.find(coin);
            if (bal == s.balances.end() || bal->second == 0) continue;
            std::int64_t remaining = sid == holder ? bal->second - delta : bal->second;
            if (remaining == 0) continue;
            Rational v = stream_value(sid) - Rational(bal->second) * old_rate +
                         Rational(remaining) * new_rate;
            if (v > Rational(s.inter)) return RetireOutcome::BackingViolation;
        }
    }

    info.retired += delta;
    held->second -= delta;
    if (held->second == 0) h.balances.erase(held);
    Encoder e;
    e.tag("intercloud.retire.v1").u64(coin.value).i64(delta).u64(holder.value).u64(now);
    cs.append(ByteView(e.view()), MessageKind::Retire, stream_keys(coin), *scheme_);
    if (holder != coin)
        h.append(ByteView(e.view()), MessageKind::Retire, stream_keys(holder), *scheme_);
    log_event(now, "retire",
              "coin=" + std::to_string(coin.value) + " delta=" + std::to_string(delta) +
                  " holder=" + std::to_string(holder.value));
    return RetireOutcome::Ok;
}

AdjustOutcome Ledger::adjust_reserve(CoinId coin, MicroInter delta_signed, StreamId counterparty,
                                     Relation& relation, SimTime now) {
    auto it = currencies_.find(coin);
    if (it == currencies_.end()) throw UnknownCoin("adjust_reserve: no such currency");
    CurrencyInfo& info = it->second;
    Stream& other = stream(counterparty);

    MicroInter magnitude = delta_signed < 0 ? -delta_signed : delta_signed;
    if (!relation.within_limit(now, magnitude)) return AdjustOutcome::RateLimited;

    if (delta_signed >= 0) {
        // Deposit funded from the counterparty's weight; its backing must hold.
        if (other.inter < delta_signed) return AdjustOutcome::BackingViolation;
        if (stream_value(counterparty) > Rational(other.inter - delta_signed))
            return AdjustOutcome::BackingViolation;
        other.inter -= delta_signed;
        info.reserve += delta_signed;
    } else {
        if (info.reserve < magnitude) return AdjustOutcome::InsufficientReserve;
        info.reserve -= magnitude;
        other.inter += magnitude;
    }
    relation.record_outflow(now, magnitude);

    Stream& cs = stream(coin);
    Encoder e;
    e.tag("intercloud.reserve.v1").u64(coin.value).i64(delta_signed).u64(counterparty.value).u64(now);
    cs.append(ByteView(e.view()), MessageKind::ReserveAdjust, stream_keys(coin), *scheme_);
    log_event(now, "adjust_reserve",
              "coin=" + std::to_string(coin.value) + " delta=" + std::to_string(delta_signed));
    return AdjustOutcome::Ok;
}

void Ledger::fund_treasury(StreamId from, MicroInter amount) {
    Stream& s = stream(from);
    if (amount < 0 || s.inter < amount)
        throw std::invalid_argument("fund_treasury: stream cannot cover the amount");
    s.inter -= amount;
    treasury_ += amount;
    log_event(0, "fund_treasury", "amount=" + std::to_string(amount));
}

VestOutcome Ledger::vest_accrue_from_treasury(NodeId node, MicroInter earned, SimTime now) {
    if (earned < 0) throw std::invalid_argument("vest_accrue: negative amount");
    if (treasury_ < earned) return VestOutcome::InsufficientTreasury;
    auto it = vesting_.find(node);
    if (it == vesting_.end()) vesting_.emplace(node, VestingAccount{node, 0, 0, Rational(1, 10)});
    treasury_ -= earned;
    vesting_[node].vested += earned;
    log_event(now, "vest_accrue",
              "node=" + std::to_string(node.value) + " earned=" + std::to_string(earned));
    return VestOutcome::Ok;
}

VestOutcome Ledger::vest_withdraw(NodeId node, MicroInter amount, StreamId to_stream,
                                  SimTime now) {
    if (amount < 0) throw std::invalid_argument("vest_withdraw: negative amount");
    auto it = vesting_.find(node);
    if (it == vesting_.end() || it->second.vested < amount) return VestOutcome::InsufficientVested;
    VestingAccount& acct = it->second;
    // withdrawn + amount ≤ rate·vested, exact rational.
    if (Rational(acct.withdrawn_this_window + amount) > acct.rate * Rational(acct.vested))
        return VestOutcome::RateLimited;
    acct.vested -= amount;
    acct.withdrawn_this_window += amount;
    stream(to_stream).inter += amount;
    log_event(now, "vest_withdraw",
              "node=" + std::to_string(node.value) + " amount=" + std::to_string(amount));
    return VestOutcome::Ok;
}

void Ledger::advance_vesting_window() {
    for (auto& [node, acct] : vesting_) acct.withdrawn_this_window = 0;
}

const VestingAccount* Ledger::vesting(NodeId node) const {
    auto it = vesting_.find(node);
    return it == vesting_.end() ? nullptr : &it->second;
}

MicroInter Ledger::staked(NodeId node) const {
    const VestingAccount* acct = vesting(node);
    return acct == nullptr ? 0 : acct->vested;
}

void Ledger::record_ticket(const Digest& poc_id, NodeId forwarder) {
    LotteryPool& pool = pools_[poc_id];
    pool.poc_id = poc_id;
    auto it = std::lower_bound(pool.tickets.begin(), pool.tickets.end(), forwarder);
    if (it != pool.tickets.end() && *it == forwarder) return;
    pool.tickets.insert(it, forwarder);
}

const LotteryPool* Ledger::pool(const Digest& poc_id) const {
    auto it = pools_.find(poc_id);
    return it == pools_.end() ? nullptr : &it->second;
}

MicroInter Ledger::slash(NodeId node, const std::vector<Digest>& convicting_poc_ids,
                         SimTime now) {
    auto it = vesting_.find(node);
    if (it == vesting_.end() || it->second.vested == 0 || convicting_poc_ids.empty()) return 0;
    MicroInter amount = it->second.vested;
    it->second.vested = 0;

    std::vector<Digest> pocs = convicting_poc_ids;
    std::sort(pocs.begin(), pocs.end());
    pocs.erase(std::unique(pocs.begin(), pocs.end()), pocs.end());
    MicroInter share = amount / static_cast<MicroInter>(pocs.size());
    MicroInter remainder = amount % static_cast<MicroInter>(pocs.size());
    for (std::size_t i = 0; i < pocs.size(); ++i) {
        LotteryPool& pool = pools_[pocs[i]];
        pool.poc_id = pocs[i];
        pool.pot += share + (i == 0 ? remainder : 0);
    }
    log_event(now, "slash",
              "node=" + std::to_string(node.value) + " amount=" + std::to_string(amount) +
                  " pools=" + std::to_string(pocs.size()));
    return amount;
}

DrawRecord Ledger::lottery_draw(const EpochSeed& seed_next, const Digest& poc_id, SimTime now) {
    auto it = pools_.find(poc_id);
    if (it == pools_.end()) throw std::out_of_range("lottery_draw: unknown pool");
    LotteryPool& pool = it->second;
    DrawRecord record;
    record.poc_id = poc_id;
    record.pot = pool.pot;
    if (pool.tickets.empty()) {
        treasury_ += pool.pot;
    } else {
        Encoder e;
        e.tag("intercloud.lottery.v1").raw(poc_id.view());
        VrfOutput out = vrf_eval(seed_next.seed, ByteView(e.view()));
        std::uint64_t x = 0;
        for (int i = 0; i < 8; ++i) x = x << 8 | out.value.bytes[i];
        NodeId winner = pool.tickets[x % pool.tickets.size()];
        record.winner = winner;
        auto acct = vesting_.find(winner);
        if (acct == vesting_.end())
            vesting_.emplace(winner, VestingAccount{winner, 0, 0, Rational(1, 10)});
        vesting_[winner].vested += pool.pot;
        winnings_accum_[winner.value] += pool.pot;
    }
    pool.pot = 0;
    draws_.push_back(record);
    log_event(now, "lottery_draw",
              "poc=" + record.poc_id.hex().substr(0, 12) +
                  (record.winner ? " winner=" + std::to_string(record.winner->value)
                                 : " winner=treasury") +
                  " pot=" + std::to_string(record.pot));
    return record;
}

MicroInter Ledger::lottery_winnings(NodeId node) const {
    auto it = winnings_accum_.find(node.value);
    return it == winnings_accum_.end() ? 0 : it->second;
}

MicroInter Ledger::conservation_sum() const {
    MicroInter sum = treasury_;
    for (const auto& [id, s] : streams_) sum += s.inter;
    for (const auto& [id, c] : currencies_) sum += c.reserve;
    for (const auto& [node, acct] : vesting_) sum += acct.vested;
    for (const auto& [id, pool] : pools_) sum += pool.pot;
    return sum;
}

Ledger::Audit Ledger::audit() const {
    Audit a;
    a.expected = total_;
    a.actual = conservation_sum();
    a.conserved = a.expected == a.actual;
    for (const auto& [id, s] : streams_) {
        if (s.inter < 0 || !backing_ok(id)) {
            a.backing_violator = id;
            break;
        }
    }
    return a;
}

void Ledger::reset_nonces_all() {
    for (auto& [id, s] : streams_) s.reset_nonces();
}

void Ledger::log_event(SimTime now, std::string kind, std::string detail) {
    EconomyEvent e;
    e.time = now;
    e.kind = std::move(kind);
    e.detail = std::move(detail);
    e.conservation_sum = conservation_sum();
    events_.push_back(std::move(e));
}

}  // namespace intercloud

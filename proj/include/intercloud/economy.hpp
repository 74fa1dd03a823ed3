#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "intercloud/crypto.hpp"
#include "intercloud/ids.hpp"
#include "intercloud/stream.hpp"

namespace intercloud {

// Extra state of a currency stream: cumulative emissions/retirements and the
// locked Intercoin reserve (counted in no stream's inter weight).
struct CurrencyInfo {
    std::int64_t emitted = 0;
    std::int64_t retired = 0;
    MicroInter reserve = 0;
    std::int64_t supply() const { return emitted - retired; }
};

struct VestingAccount {
    NodeId node;
    MicroInter vested = 0;                 // current staked balance
    MicroInter withdrawn_this_window = 0;  // quota tracker, resets per window
    Rational rate = Rational(1, 10);       // withdrawable fraction per window
};

struct LotteryPool {
    Digest poc_id;
    std::vector<NodeId> tickets;  // distinct forwarders, ascending node id
    MicroInter pot = 0;
};

struct DrawRecord {
    Digest poc_id;
    std::optional<NodeId> winner;  // empty: pot sent to the treasury
    MicroInter pot = 0;
};

enum class EmitOutcome { Ok, PolicyError, BackingViolation };
enum class RetireOutcome { Ok, PolicyError, InsufficientSupply, InsufficientHolderBalance, BackingViolation };
enum class AdjustOutcome { Ok, RateLimited, InsufficientReserve, BackingViolation };
enum class VestOutcome { Ok, RateLimited, InsufficientVested, InsufficientTreasury };

const char* to_string(EmitOutcome v);
const char* to_string(RetireOutcome v);
const char* to_string(AdjustOutcome v);
const char* to_string(VestOutcome v);

// Expected corrupt payoff bound p·g + (1−p)(g−ℓ) = g − (1−p)·ℓ, exact.
Rational corrupt_payoff_bound(const Rational& gain, const Rational& loss,
                              const Rational& p_evade);

// Minimum cost of bribing a supermajority: (⌊2n/3⌋+1)·min member stake.
struct BribeBound {
    std::uint64_t members_needed = 0;
    MicroInter min_member_stake = 0;
    boost::multiprecision::cpp_int total;
};
BribeBound min_supermajority_bribe(const std::vector<MicroInter>& member_stakes);
// total·3 > inter·2, exact.
bool bribe_exceeds_two_thirds(const BribeBound& bound, MicroInter inter_i);

struct EconomyEvent {
    SimTime time = 0;
    Epoch epoch = 0;
    std::string kind;
    std::string detail;
    MicroInter conservation_sum = 0;
};

// All µINTER buckets of one simulated world. Every operation keeps the
// global sum Σ inter + Σ reserves + Σ vesting + Σ pots + treasury constant
// and the backing invariant intact; audit() re-checks both from scratch.
class Ledger {
public:
    explicit Ledger(const SignatureScheme& scheme) : scheme_(&scheme) {}

    // Genesis: fixes the global Intercoin supply held by a funding stream.
    Stream& create_genesis_stream(StreamId id, MicroInter total);
    // Stream creation moves initial weight from an existing funding stream.
    Stream& create_stream(StreamId id, RulesKind rules, MicroInter initial_inter,
                          StreamId funded_from);
    Stream& create_currency_stream(StreamId id, MicroInter initial_reserve, StreamId funded_from);
    // Initial node stake, funded from a stream's weight into the vesting bucket.
    VestingAccount& create_vesting(NodeId node, MicroInter initial_stake, StreamId funded_from,
                                   Rational rate = Rational(1, 10));

    Stream& stream(StreamId id);
    const Stream& stream(StreamId id) const;
    bool has_stream(StreamId id) const { return streams_.count(id) > 0; }
    const KeyPair& stream_keys(StreamId id) const;
    const std::map<StreamId, Stream>& streams() const { return streams_; }
    const std::map<CoinId, CurrencyInfo>& currencies() const { return currencies_; }
    RelationIndex& relations() { return relations_; }
    const RelationIndex& relations() const { return relations_; }
    MicroInter treasury() const { return treasury_; }
    MicroInter total_supply() const { return total_; }
    const SignatureScheme& scheme() const { return *scheme_; }

    // exRate(c) = reserve/supply, exact rational; throws UndefinedRate when
    // supply = 0 and UnknownCoin for a non-currency id.
    ExchangeRate exchange_rate(CoinId coin) const;

    // V_i = Σ_c balance[c]·exRate(c), exact. Throws UndefinedRate if a held
    // coin has zero supply (cannot happen through ledger ops).
    Rational stream_value(StreamId id) const;
    bool backing_ok(StreamId id) const;

    std::variant<TransferApplied, TransferReject> transfer(const TransferRequest& req,
                                                           SimTime now);

    EmitOutcome emit(CoinId coin, std::int64_t delta, StreamId recipient, SimTime now);
    RetireOutcome retire(CoinId coin, std::int64_t delta, StreamId holder, SimTime now);
    AdjustOutcome adjust_reserve(CoinId coin, MicroInter delta_signed, StreamId counterparty,
                                 Relation& relation, SimTime now);

    // Moves weight from a stream into the treasury bucket (funds accruals).
    void fund_treasury(StreamId from, MicroInter amount);

    VestOutcome vest_accrue_from_treasury(NodeId node, MicroInter earned, SimTime now);
    VestOutcome vest_withdraw(NodeId node, MicroInter amount, StreamId to_stream, SimTime now);
    void advance_vesting_window();
    const VestingAccount* vesting(NodeId node) const;
    MicroInter staked(NodeId node) const;

    // One ticket per distinct (node, PoC); ticket order is ascending node id.
    void record_ticket(const Digest& poc_id, NodeId forwarder);
    const LotteryPool* pool(const Digest& poc_id) const;
    const std::map<Digest, LotteryPool>& pools() const { return pools_; }

    // Moves the node's entire staked balance into the convicting PoCs' pools,
    // split equally, remainder to the lexicographically first pool id.
    MicroInter slash(NodeId node, const std::vector<Digest>& convicting_poc_ids, SimTime now);

    // winner = tickets[VRF(seed_next, poc_id) mod |tickets|]; the pot vests
    // to the winner. Empty ticket lists send the pot to the treasury.
    DrawRecord lottery_draw(const EpochSeed& seed_next, const Digest& poc_id, SimTime now);

    const std::vector<DrawRecord>& draws() const { return draws_; }
    MicroInter lottery_winnings(NodeId node) const;

    struct Audit {
        bool conserved = false;
        MicroInter expected = 0;
        MicroInter actual = 0;
        std::optional<StreamId> backing_violator;
        bool ok() const { return conserved && !backing_violator; }
    };
    Audit audit() const;

    const std::vector<EconomyEvent>& events() const { return events_; }
    void reset_nonces_all();

    // Test hook: deliberately corrupts a bucket so audit failure paths can be
    // exercised end to end.
    void inject_fault_skim_treasury(MicroInter amount) { treasury_ -= amount; }

private:
    MicroInter conservation_sum() const;
    void log_event(SimTime now, std::string kind, std::string detail);
    KeyPair make_stream_keys(StreamId id) const;

    const SignatureScheme* scheme_;
    std::map<StreamId, Stream> streams_;
    std::map<StreamId, KeyPair> keys_;
    std::map<CoinId, CurrencyInfo> currencies_;
    std::map<NodeId, VestingAccount> vesting_;
    std::map<Digest, LotteryPool> pools_;
    std::vector<DrawRecord> draws_;
    RelationIndex relations_;
    MicroInter treasury_ = 0;
    MicroInter total_ = 0;
    std::map<std::uint64_t, MicroInter> winnings_accum_;
    std::vector<EconomyEvent> events_;
};

}  // namespace intercloud

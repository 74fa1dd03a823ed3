#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "intercloud/consensus.hpp"
#include "intercloud/economy.hpp"
#include "intercloud/ids.hpp"
#include "intercloud/ripple.hpp"

namespace intercloud::sim {

// Insertion-ordered JSON keeps report bytes stable across runs.
using Json = nlohmann::ordered_json;

struct ColourEvent {
    StreamId stream;
    SimTime time = 0;
    Epoch epoch = 0;
    Colour colour = Colour::Yellow;
};

Json to_json(const Attestation& a);
Json to_json(const ProofOfCorruption& poc);
Json to_json(const GossipDigest& g);
Json to_json(const FinalityCertificate& cert);

struct RunReport {
    Json config_echo;
    std::uint64_t seed = 0;
    std::string kind;

    std::vector<ColourEvent> colour_timeline;
    Json certificates = Json::array();
    Json pocs = Json::array();  // includes forwarding traces and tickets
    Json conservation_audits = Json::array();
    Json ripple_traces = Json::array();
    Json stats = Json::object();
    std::vector<std::string> violations;  // invariant-audit failures, if any

    Json to_json() const;
    std::string to_json_string() const;  // deterministic bytes
    std::string timelines_csv() const;
    std::string stats_csv() const;
    std::string economy_csv(const std::vector<EconomyEvent>& events) const;

    // Writes report.json (+ CSV files when csv=true) under dir.
    void write(const std::string& dir, bool csv, const std::vector<EconomyEvent>& events) const;
};

// Self-contained PoC file for standalone verification:
// {"scheme": ..., "public_key": hex, "poc": hex(canonical encoding)}.
std::string poc_file_string(const ProofOfCorruption& poc, const PublicKey& signer_key,
                            const std::string& scheme_name);
struct PocFile {
    std::string scheme;
    PublicKey signer_key;
    ProofOfCorruption poc;
};
PocFile parse_poc_file(const std::string& text);  // throws on malformed input

}  // namespace intercloud::sim

#include "intercloud/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "intercloud/errors.hpp"

namespace intercloud::sim {

Json to_json(const Attestation& a) {
    Json j;
    j["node"] = a.node.value;
    j["stream"] = a.stream.value;
    j["hash"] = a.hash.hex();
    j["epoch"] = a.epoch;
    j["sig"] = to_hex(ByteView(a.sig.bytes.data(), a.sig.bytes.size()));
    return j;
}

Json to_json(const ProofOfCorruption& poc) {
    Json j;
    j["id"] = poc.id().hex();
    j["node"] = poc.a1.node.value;
    j["stream"] = poc.a1.stream.value;
    j["epoch"] = poc.a1.epoch;
    j["a1"] = to_json(poc.a1);
    j["a2"] = to_json(poc.a2);
    j["binary"] = to_hex(ByteView(poc.encode()));
    return j;
}

Json to_json(const GossipDigest& g) {
    Json j;
    j["node"] = g.node.value;
    j["stream"] = g.stream.value;
    j["hash"] = g.hash.hex();
    j["epoch"] = g.epoch;
    Json peers = Json::array();
    for (NodeId p : g.attested_peers) peers.push_back(p.value);
    j["attested_peers"] = std::move(peers);
    j["sig"] = to_hex(ByteView(g.sig.bytes.data(), g.sig.bytes.size()));
    return j;
}

Json to_json(const FinalityCertificate& cert) {
    Json j;
    j["stream"] = cert.stream.value;
    j["hash"] = cert.hash.hex();
    j["epoch"] = cert.epoch;
    Json atts = Json::array();
    for (const auto& a : cert.attestations) atts.push_back(to_json(a));
    j["attestations"] = std::move(atts);
    Json digs = Json::array();
    for (const auto& g : cert.digests) digs.push_back(to_json(g));
    j["digests"] = std::move(digs);
    return j;
}

Json RunReport::to_json() const {
    Json j;
    j["kind"] = kind;
    j["seed"] = seed;
    j["config"] = config_echo;
    Json timeline = Json::array();
    for (const auto& ev : colour_timeline) {
        Json e;
        e["stream"] = ev.stream.value;
        e["time"] = ev.time;
        e["epoch"] = ev.epoch;
        e["colour"] = to_string(ev.colour);
        timeline.push_back(std::move(e));
    }
    j["colour_timeline"] = std::move(timeline);
    j["certificates"] = certificates;
    j["pocs"] = pocs;
    j["conservation_audits"] = conservation_audits;
    j["ripple_traces"] = ripple_traces;
    j["stats"] = stats;
    j["violations"] = violations;
    return j;
}

std::string RunReport::to_json_string() const { return to_json().dump(2) + "\n"; }

std::string RunReport::timelines_csv() const {
    std::ostringstream out;
    out << "stream,time,epoch,colour\n";
    for (const auto& ev : colour_timeline)
        out << ev.stream.value << ',' << ev.time << ',' << ev.epoch << ','
            << to_string(ev.colour) << '\n';
    return out.str();
}

namespace {
void flatten(const Json& j, const std::string& prefix, std::ostringstream& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
    } else {
        out << prefix << ',' << j.dump() << '\n';
    }
}
}  // namespace

std::string RunReport::stats_csv() const {
    std::ostringstream out;
    out << "key,value\n";
    flatten(stats, "", out);
    return out.str();
}

std::string RunReport::economy_csv(const std::vector<EconomyEvent>& events) const {
    std::ostringstream out;
    out << "time,epoch,kind,detail,conservation_sum\n";
    for (const auto& e : events)
        out << e.time << ',' << e.epoch << ',' << e.kind << ",\"" << e.detail << "\","
            << e.conservation_sum << '\n';
    return out.str();
}

void RunReport::write(const std::string& dir, bool csv,
                      const std::vector<EconomyEvent>& events) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto put = [&](const std::string& name, const std::string& contents) {
        std::ofstream f(fs::path(dir) / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + name + " under " + dir);
        f << contents;
    };
    put("report.json", to_json_string());
    if (csv) {
        put("timelines.csv", timelines_csv());
        put("stats.csv", stats_csv());
        put("economy_events.csv", economy_csv(events));
    }
}

std::string poc_file_string(const ProofOfCorruption& poc, const PublicKey& signer_key,
                            const std::string& scheme_name) {
    Json j;
    j["scheme"] = scheme_name;
    j["public_key"] = to_hex(ByteView(signer_key.bytes.data(), signer_key.bytes.size()));
    j["poc"] = to_hex(ByteView(poc.encode()));
    return j.dump(2) + "\n";
}

PocFile parse_poc_file(const std::string& text) {
    Json j = Json::parse(text);  // throws nlohmann::json::parse_error
    PocFile f;
    f.scheme = j.at("scheme").get<std::string>();
    f.signer_key.bytes = from_hex(j.at("public_key").get<std::string>());
    Bytes poc_bytes = from_hex(j.at("poc").get<std::string>());
    f.poc = ProofOfCorruption::decode(ByteView(poc_bytes.data(), poc_bytes.size()));
    return f;
}

}  // namespace intercloud::sim

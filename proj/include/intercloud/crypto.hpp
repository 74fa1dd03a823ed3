#pragma once

#include <array>
#include <compare>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "intercloud/bytes.hpp"
#include "intercloud/ids.hpp"

namespace intercloud {

// 32-byte content digest (SHA-256).
struct Digest {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const Digest&) const = default;
    std::string hex() const { return to_hex(ByteView(bytes.data(), bytes.size())); }
    ByteView view() const { return ByteView(bytes.data(), bytes.size()); }
    static Digest from_hex_str(std::string_view hex);
};

Digest sha256(ByteView data);

// Digest of the empty byte sequence; genesis messages chain from it.
const Digest& empty_digest();

struct PublicKey {
    Bytes bytes;
    auto operator<=>(const PublicKey&) const = default;
};

struct SecretKey {
    Bytes bytes;
};

struct Signature {
    Bytes bytes;
    auto operator<=>(const Signature&) const = default;
};

struct KeyPair {
    SecretKey secret;
    PublicKey pub;
};

// Pluggable signature scheme. The default is a deterministic keyed-hash
// test scheme: pk = H(tag ‖ sk), sig = H(tag ‖ pk ‖ msg). It is fast and
// reproducible but offers no unforgeability against parties that know the
// public key — fine for a simulator whose adversary is scripted, not for
// real inputs. Ed25519 (libsodium) is available behind the same interface
// for anything that leaves the simulator.
class SignatureScheme {
public:
    virtual ~SignatureScheme() = default;

    virtual std::string name() const = 0;
    virtual KeyPair keypair_from_seed(ByteView seed32) const = 0;
    // Throws MalformedKey if the key has the wrong shape.
    virtual Signature sign(const SecretKey& sk, ByteView msg) const = 0;
    virtual bool verify(const PublicKey& pk, ByteView msg, const Signature& sig) const = 0;

    static const SignatureScheme& hashed();
    static const SignatureScheme& ed25519();
    static const SignatureScheme& by_name(const std::string& name);  // throws ConfigError
};

// VRF realised as value = H(tag ‖ seed ‖ input), proof = canonical input
// encoding. The epoch seed is unpredictable before its RANDAO round
// completes, which is all the swarm-assignment argument needs; the
// simulator enforces that timing explicitly.
struct VrfOutput {
    Digest value;
    Bytes proof;
};

VrfOutput vrf_eval(const Digest& seed, ByteView input);
bool vrf_verify(const Digest& seed, ByteView input, const VrfOutput& out);

struct EpochSeed {
    Epoch epoch = 0;
    Digest seed;
};

struct RandaoContribution {
    NodeId node;
    Digest commit;
    Bytes reveal;
};

struct RandaoResult {
    EpochSeed seed;
    // Contributors whose reveal did not hash to their commit; excluded from
    // the seed and reported as misbehaviour.
    std::vector<NodeId> misbehaved;
};

// Single atomic commit/reveal round. Seed bytes:
//   sha256( tag("intercloud.randao.v1") ‖ u64(epoch) ‖ u32(n_valid) ‖
//           [ u64(node) ‖ bytes(reveal) ]  in ascending node-id order )
// so the result is independent of contribution arrival order.
RandaoResult randao_round(Epoch epoch, std::vector<RandaoContribution> contributions);

}  // namespace intercloud

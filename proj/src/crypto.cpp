#include "intercloud/crypto.hpp"

#include <openssl/evp.h>
#include <sodium.h>

#include <algorithm>
#include <mutex>

#include "intercloud/errors.hpp"

namespace intercloud {

Digest Digest::from_hex_str(std::string_view hex) {
    Bytes raw = from_hex(hex);
    if (raw.size() != 32)
        throw std::invalid_argument("Digest::from_hex_str: need 32 bytes");
    Digest d;
    std::copy(raw.begin(), raw.end(), d.bytes.begin());
    return d;
}

Digest sha256(ByteView data) {
    Digest out;
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.bytes.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != 32)
        throw std::runtime_error("sha256: EVP_Digest failed");
    return out;
}

const Digest& empty_digest() {
    static const Digest d = sha256(ByteView{});
    return d;
}

namespace {

class HashedScheme final : public SignatureScheme {
public:
    std::string name() const override { return "hashed"; }

    KeyPair keypair_from_seed(ByteView seed32) const override {
        if (seed32.size() != 32) throw MalformedKey("hashed: seed must be 32 bytes");
        KeyPair kp;
        kp.secret.bytes.assign(seed32.begin(), seed32.end());
        Encoder e;
        e.tag("intercloud.pk.v1").raw(seed32);
        Digest pk = sha256(e.view());
        kp.pub.bytes.assign(pk.bytes.begin(), pk.bytes.end());
        return kp;
    }

    Signature sign(const SecretKey& sk, ByteView msg) const override {
        KeyPair kp = keypair_from_seed(ByteView(sk.bytes.data(), sk.bytes.size()));
        return sign_with_pk(kp.pub, msg);
    }

    bool verify(const PublicKey& pk, ByteView msg, const Signature& sig) const override {
        if (pk.bytes.size() != 32) throw MalformedKey("hashed: public key must be 32 bytes");
        return sign_with_pk(pk, msg).bytes == sig.bytes;
    }

private:
    static Signature sign_with_pk(const PublicKey& pk, ByteView msg) {
        Encoder e;
        e.tag("intercloud.sig.v1").bytes(ByteView(pk.bytes.data(), pk.bytes.size())).raw(msg);
        Digest d = sha256(e.view());
        Signature s;
        s.bytes.assign(d.bytes.begin(), d.bytes.end());
        return s;
    }
};

class Ed25519Scheme final : public SignatureScheme {
public:
    Ed25519Scheme() {
        static std::once_flag once;
        std::call_once(once, [] {
            if (sodium_init() < 0) throw std::runtime_error("sodium_init failed");
        });
    }

    std::string name() const override { return "ed25519"; }

    KeyPair keypair_from_seed(ByteView seed32) const override {
        if (seed32.size() != crypto_sign_SEEDBYTES)
            throw MalformedKey("ed25519: seed must be 32 bytes");
        KeyPair kp;
        kp.pub.bytes.resize(crypto_sign_PUBLICKEYBYTES);
        kp.secret.bytes.resize(crypto_sign_SECRETKEYBYTES);
        crypto_sign_seed_keypair(kp.pub.bytes.data(), kp.secret.bytes.data(), seed32.data());
        return kp;
    }

    Signature sign(const SecretKey& sk, ByteView msg) const override {
        if (sk.bytes.size() != crypto_sign_SECRETKEYBYTES)
            throw MalformedKey("ed25519: bad secret key size");
        Signature s;
        s.bytes.resize(crypto_sign_BYTES);
        unsigned long long len = 0;
        crypto_sign_detached(s.bytes.data(), &len, msg.data(), msg.size(), sk.bytes.data());
        s.bytes.resize(len);
        return s;
    }

    bool verify(const PublicKey& pk, ByteView msg, const Signature& sig) const override {
        if (pk.bytes.size() != crypto_sign_PUBLICKEYBYTES)
            throw MalformedKey("ed25519: bad public key size");
        if (sig.bytes.size() != crypto_sign_BYTES) return false;
        return crypto_sign_verify_detached(sig.bytes.data(), msg.data(), msg.size(),
                                           pk.bytes.data()) == 0;
    }
};

}  // namespace

const SignatureScheme& SignatureScheme::hashed() {
    static const HashedScheme s;
    return s;
}

const SignatureScheme& SignatureScheme::ed25519() {
    static const Ed25519Scheme s;
    return s;
}

const SignatureScheme& SignatureScheme::by_name(const std::string& name) {
    if (name == "hashed") return hashed();
    if (name == "ed25519") return ed25519();
    throw ConfigError("unknown signature scheme: " + name);
}

VrfOutput vrf_eval(const Digest& seed, ByteView input) {
    Encoder e;
    e.tag("intercloud.vrf.v1").raw(seed.view()).bytes(input);
    VrfOutput out;
    out.value = sha256(e.view());
    Encoder p;
    p.bytes(input);
    out.proof = p.take();
    return out;
}

bool vrf_verify(const Digest& seed, ByteView input, const VrfOutput& out) {
    Encoder p;
    p.bytes(input);
    if (p.view() != out.proof) return false;
    Encoder e;
    e.tag("intercloud.vrf.v1").raw(seed.view()).bytes(input);
    return sha256(e.view()) == out.value;
}

RandaoResult randao_round(Epoch epoch, std::vector<RandaoContribution> contributions) {
    std::sort(contributions.begin(), contributions.end(),
              [](const RandaoContribution& a, const RandaoContribution& b) {
                  return a.node < b.node;
              });
    RandaoResult result;
    std::vector<const RandaoContribution*> valid;
    for (const auto& c : contributions) {
        if (sha256(ByteView(c.reveal.data(), c.reveal.size())) == c.commit)
            valid.push_back(&c);
        else
            result.misbehaved.push_back(c.node);
    }
    Encoder e;
    e.tag("intercloud.randao.v1").u64(epoch).u32(static_cast<std::uint32_t>(valid.size()));
    for (const auto* c : valid)
        e.u64(c->node.value).bytes(ByteView(c->reveal.data(), c->reveal.size()));
    result.seed.epoch = epoch;
    result.seed.seed = sha256(e.view());
    return result;
}

}  // namespace intercloud

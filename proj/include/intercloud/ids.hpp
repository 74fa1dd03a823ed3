#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <compare>
#include <cstdint>

namespace intercloud {

struct NodeId {
    std::uint64_t value = 0;
    auto operator<=>(const NodeId&) const = default;
};

struct StreamId {
    std::uint64_t value = 0;
    auto operator<=>(const StreamId&) const = default;
};

// A local coin is identified by the currency stream that issues it.
using CoinId = StreamId;

using Epoch = std::uint64_t;
using SimTime = std::uint64_t;

// Intercoin amounts in integer micro-INTER. All conservation arithmetic is
// exact; intermediates that can overflow use __int128.
using MicroInter = std::int64_t;
constexpr MicroInter kMicroPerInter = 1'000'000;

using Rational = boost::multiprecision::cpp_rational;

}  // namespace intercloud

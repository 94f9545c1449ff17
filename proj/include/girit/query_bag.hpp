#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace girit {

/// Bag-of-terms realization of a topic: normalized term -> query frequency.
struct QueryBag {
    std::string qid;
    /// Ordered by term so every traversal sums contributions in the same order.
    std::map<std::string, std::uint32_t> terms;
    /// Fingerprint of the analyzer that produced the terms.
    std::string analyzer_fingerprint;

    [[nodiscard]] auto empty() const noexcept -> bool { return terms.empty(); }

    friend auto operator==(QueryBag const&, QueryBag const&) -> bool = default;
};

}  // namespace girit

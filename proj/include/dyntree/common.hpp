#ifndef DYNTREE_COMMON_HPP
#define DYNTREE_COMMON_HPP

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace dyntree {

using NodeId = int;
using TreeNodeId = int;
using ClusterId = int;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Undirected edge key, normalized so that (u,v) == (v,u).
struct EdgeKey {
    NodeId u;
    NodeId v;

    EdgeKey(NodeId a, NodeId b) : u(a < b ? a : b), v(a < b ? b : a) {
        if (a == b) throw std::invalid_argument("EdgeKey: self-loop");
    }
    auto operator<=>(const EdgeKey&) const = default;
};

struct DuplicateEdge : std::runtime_error {
    explicit DuplicateEdge(const std::string& what) : std::runtime_error(what) {}
};
struct MissingEdge : std::runtime_error {
    explicit MissingEdge(const std::string& what) : std::runtime_error(what) {}
};
struct WeightOutOfRange : std::runtime_error {
    explicit WeightOutOfRange(const std::string& what) : std::runtime_error(what) {}
};
struct InvalidParameter : std::runtime_error {
    explicit InvalidParameter(const std::string& what) : std::runtime_error(what) {}
};
struct EmptyDistribution : std::runtime_error {
    explicit EmptyDistribution(const std::string& what) : std::runtime_error(what) {}
};
struct TraceFormatError : std::runtime_error {
    int line;
    TraceFormatError(int ln, const std::string& what)
        : std::runtime_error("line " + std::to_string(ln) + ": " + what), line(ln) {}
};
struct DisconnectedDemand : std::runtime_error {
    explicit DisconnectedDemand(const std::string& what) : std::runtime_error(what) {}
};
// Composition producing a cycle indicates a broken internal invariant, not bad input.
struct CompositionCycle : std::logic_error {
    explicit CompositionCycle(const std::string& what) : std::logic_error(what) {}
};
struct InvariantViolation : std::logic_error {
    explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

inline void require(bool cond, const char* msg) {
    if (!cond) throw InvariantViolation(msg);
}

inline int ceil_log2(double x) {
    int k = 0;
    double p = 1.0;
    while (p < x) {
        p *= 2.0;
        ++k;
    }
    return k;
}

}  // namespace dyntree

#endif

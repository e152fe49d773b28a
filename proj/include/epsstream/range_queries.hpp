#pragma once

#include "epsstream/range_families.hpp"
#include "epsstream/stream_engine.hpp"

#include <stdexcept>
#include <string_view>
#include <vector>

namespace epsstream {

struct CountEstimate {
    Rational estimate;
    Rational additive_bound;
    std::uint64_t n = 0;
};

enum class IcebergVerdict { Above, Below, Uncertain };

inline std::string_view verdict_name(IcebergVerdict v) {
    switch (v) {
        case IcebergVerdict::Above: return "above";
        case IcebergVerdict::Below: return "below";
        case IcebergVerdict::Uncertain: return "uncertain";
    }
    return "?";
}

inline void require_family(const Snapshot& snap, const RangeDescriptor& r) {
    if (kind_of(r) != snap.config.family.kind)
        throw FamilyMismatch("descriptor kind '" + std::string(family_name(kind_of(r))) + "' does not match snapshot family '" +
                             std::string(snap.config.family.name()) + "'");
}

/// Weighted snapshot mass inside r, clamped to [0, n]; off by at most eps*n.
inline CountEstimate approx_count(const Snapshot& snap, const RangeDescriptor& r) {
    require_family(snap, r);
    const Rational n(snap.n);
    Rational est = weighted_count(snap.sample, r);
    est = std::clamp(est, Rational(0), n);
    return {est, snap.sample.eps_bound * n, snap.n};
}

/// Above iff estimate/n >= theta + eps, Below iff estimate/n <= theta - eps.
inline IcebergVerdict iceberg_query(const Snapshot& snap, const RangeDescriptor& r, const Rational& theta) {
    if (theta <= 0 || theta >= 1) throw std::invalid_argument("theta must lie in (0, 1)");
    const CountEstimate c = approx_count(snap, r);
    const Rational fraction = c.estimate / Rational(snap.n);
    const Rational& eps = snap.sample.eps_bound;
    if (fraction >= theta + eps) return IcebergVerdict::Above;
    if (fraction <= theta - eps) return IcebergVerdict::Below;
    return IcebergVerdict::Uncertain;
}

/// Support of the snapshot. Any range holding more than eps*n of the stream
/// has positive snapshot mass, so it contains one of these points.
inline std::vector<Point2> eps_net(const Snapshot& snap) { return snap.sample.points; }

}  // namespace epsstream

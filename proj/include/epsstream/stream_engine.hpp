#pragma once

// Streaming eps-approximation over a binary hierarchy of canonical blocks.
// Block k holds 2^k consecutive arrivals; two equal blocks merge into the next
// level and are reduced with budget (eps/2) * w_k / W, w_k = k^(-1-c).

#include "epsstream/det_sampler.hpp"
#include "epsstream/range_families.hpp"
#include "epsstream/weighted_sample.hpp"

#include <json.hpp>

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace epsstream {

inline constexpr int kEngineFormatVersion = 1;

struct EngineConfig {
    Rational eps = make_rational(1, 4);
    Rational c = 1;
    RangeFamily family = FamilyKind::Halfplane;
    CoordinateScale scale;

    void validate() const {
        if (eps <= 0 || eps >= 1) throw std::invalid_argument("eps must lie in (0, 1)");
        if (c <= 0) throw std::invalid_argument("schedule exponent c must be positive");
    }

    friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

namespace engine_detail {

/// Largest multiple of 2^-64 not above x (x >= 0), minus one more ulp of
/// that grid to cover the error of computing x.
inline Rational rational_below(long double x) {
    const long double scaled = std::floor(std::ldexp(x, 64)) - 2.0L;
    if (scaled <= 0) return 0;
    return Rational(BigInt(scaled), BigInt(1) << 64);
}

inline Rational rational_above(long double x) {
    const long double scaled = std::ceil(std::ldexp(x, 64)) + 2.0L;
    return Rational(BigInt(scaled), BigInt(1) << 64);
}

inline bool is_integer(const Rational& r) { return denominator_of(r) == 1; }

}  // namespace engine_detail

/// w_k = k^(-1-c). Exact for integer c; otherwise a rational lower bound,
/// which only shrinks the budgets.
inline Rational schedule_weight(std::uint64_t k, const Rational& c) {
    if (k == 0) throw std::invalid_argument("schedule index starts at 1");
    if (engine_detail::is_integer(c) && c < 64) {
        const unsigned e = numerator_of(c).convert_to<unsigned>() + 1;
        return Rational(BigInt(1), boost::multiprecision::pow(BigInt(k), e));
    }
    const long double v = std::pow(static_cast<long double>(k), -1.0L - to_long_double(c));
    return engine_detail::rational_below(v * (1.0L - 1e-15L));
}

/// Upper bound on W = sum_{u >= 1} u^(-1-c). For c = 1 a decimal rounding of
/// pi^2/6 upward; otherwise a truncated sum plus the integral tail.
inline Rational schedule_normalizer(const Rational& c) {
    if (c == 1) return make_rational(1644934067, 1000000000);
    const long double e = 1.0L + to_long_double(c);
    constexpr std::uint64_t kTerms = 1000000;
    long double sum = 0;
    for (std::uint64_t u = kTerms; u >= 1; --u) sum += std::pow(static_cast<long double>(u), -e);
    const long double tail = std::pow(static_cast<long double>(kTerms), -(e - 1.0L)) / (e - 1.0L);
    return engine_detail::rational_above((sum + tail) * (1.0L + 1e-12L));
}

inline Rational error_budget(std::uint64_t k, const EngineConfig& cfg, const Rational& normalizer) {
    return cfg.eps / 2 * schedule_weight(k, cfg.c) / normalizer;
}

inline Rational error_budget(std::uint64_t k, const EngineConfig& cfg) {
    return error_budget(k, cfg, schedule_normalizer(cfg.c));
}

inline nlohmann::json config_to_json(const EngineConfig& cfg) {
    return {{"eps", to_string(cfg.eps)},
            {"c", to_string(cfg.c)},
            {"family", std::string(cfg.family.name())},
            {"cap", cfg.family.cap},
            {"scale", cfg.scale.factor()}};
}

inline EngineConfig config_from_json(const nlohmann::json& c) {
    EngineConfig cfg;
    cfg.eps = rational_from_json(c.at("eps"));
    cfg.c = rational_from_json(c.at("c"));
    cfg.family = RangeFamily(parse_family(c.at("family").get<std::string>()), c.at("cap").get<std::size_t>());
    cfg.scale = CoordinateScale(c.at("scale").get<std::int64_t>());
    return cfg;
}

struct LevelSummary {
    unsigned level = 0;
    WeightedSample summary;  // summary.eps_bound == delta
    Rational delta = 0;
    bool reduced = true;  // false when the merge was kept as is

    friend bool operator==(const LevelSummary&, const LevelSummary&) = default;
};

struct Snapshot {
    WeightedSample sample;  // eps_bound carries the configured eps
    std::uint64_t n = 0;
    EngineConfig config;
    Rational certified_error = 0;  // exact bound actually established, <= eps

    friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

struct MemoryFootprint {
    std::size_t points_stored = 0;
    std::size_t levels_occupied = 0;
    std::size_t unreduced_levels = 0;
};

class StreamEngine {
public:
    explicit StreamEngine(EngineConfig cfg) : config_(std::move(cfg)) {
        config_.validate();
        normalizer_ = schedule_normalizer(config_.c);
    }

    const EngineConfig& config() const { return config_; }
    std::uint64_t size() const { return n_; }
    const std::map<unsigned, LevelSummary>& slots() const { return slots_; }
    const Rational& normalizer() const { return normalizer_; }

    Rational budget(unsigned k) const { return error_budget(k, config_, normalizer_); }

    /// Sum of budgets of levels 1..k.
    Rational cumulative_budget(unsigned k) const {
        Rational s = 0;
        for (unsigned u = 1; u <= k; ++u) s += budget(u);
        return s;
    }

    void insert(const Point2& p) {
        if (p.x > kMaxCoordinate || p.x < -kMaxCoordinate || p.y > kMaxCoordinate || p.y < -kMaxCoordinate)
            throw std::invalid_argument("point outside the coordinate range");
        LevelSummary carry;
        carry.summary.points = {p};
        carry.summary.weights = {Rational(1)};
        carry.summary.total_weight = 1;
        while (true) {
            auto it = slots_.find(carry.level);
            if (it == slots_.end()) break;
            carry = merge(it->second, carry);
            slots_.erase(it);
        }
        slots_.emplace(carry.level, std::move(carry));
        ++n_;
    }

    Snapshot snapshot() const {
        if (n_ == 0) throw std::logic_error("snapshot of an empty stream");
        WeightedSample all;
        Rational weighted_delta = 0;
        for (const auto& [level, s] : slots_) {
            all.points.insert(all.points.end(), s.summary.points.begin(), s.summary.points.end());
            all.weights.insert(all.weights.end(), s.summary.weights.begin(), s.summary.weights.end());
            all.total_weight += s.summary.total_weight;
            weighted_delta += s.delta * s.summary.total_weight;
        }
        all.canonicalize();
        all.eps_bound = weighted_delta / all.total_weight;
        Snapshot snap;
        snap.n = n_;
        snap.config = config_;
        if (all.size() >= 2 && all.size() <= config_.family.cap)
            snap.sample = weighted_eps_approx(all, config_.family, config_.eps / 2);
        else
            snap.sample = std::move(all);
        snap.certified_error = snap.sample.eps_bound;
        if (snap.certified_error > config_.eps) throw CertificationError("snapshot exceeds its error bound");
        snap.sample.eps_bound = config_.eps;
        return snap;
    }

    MemoryFootprint memory_footprint() const {
        MemoryFootprint f;
        for (const auto& [level, s] : slots_) {
            f.points_stored += s.summary.size();
            ++f.levels_occupied;
            f.unreduced_levels += s.reduced ? 0 : 1;
        }
        return f;
    }

    nlohmann::json to_json() const {
        nlohmann::json slots = nlohmann::json::array();
        for (const auto& [level, s] : slots_) {
            slots.push_back({{"level", level},
                             {"delta", to_string(s.delta)},
                             {"reduced", s.reduced},
                             {"sample", sample_to_json(s.summary, config_.family, config_.scale)}});
        }
        return {{"version", kEngineFormatVersion},
                {"config", config_to_json(config_)},
                {"n", n_},
                {"slots", std::move(slots)}};
    }

    static StreamEngine from_json(const nlohmann::json& j) {
        try {
            if (j.at("version").get<int>() != kEngineFormatVersion) throw ParseError("unsupported engine state version");
            StreamEngine e(config_from_json(j.at("config")));
            e.n_ = j.at("n").get<std::uint64_t>();
            std::uint64_t total = 0;
            for (const auto& s : j.at("slots")) {
                LevelSummary ls;
                ls.level = s.at("level").get<unsigned>();
                ls.delta = rational_from_json(s.at("delta"));
                ls.reduced = s.at("reduced").get<bool>();
                ls.summary = sample_from_json(s.at("sample")).sample;
                if (ls.summary.total_weight != Rational(BigInt(1) << ls.level))
                    throw ParseError("slot weight does not match its level");
                total += std::uint64_t{1} << ls.level;
                e.slots_.emplace(ls.level, std::move(ls));
            }
            if (total != e.n_) throw ParseError("slot weights do not sum to n");
            return e;
        } catch (const nlohmann::json::exception& ex) {
            throw ParseError(std::string("malformed engine state: ") + ex.what());
        } catch (const std::invalid_argument& ex) {
            throw ParseError(std::string("invalid engine state: ") + ex.what());
        }
    }

private:
    /// Union of two level-k summaries, reduced at the level-(k+1) budget when
    /// that can succeed.
    LevelSummary merge(const LevelSummary& a, const LevelSummary& b) const {
        LevelSummary out;
        out.level = a.level + 1;
        WeightedSample& m = out.summary;
        m.points = a.summary.points;
        m.points.insert(m.points.end(), b.summary.points.begin(), b.summary.points.end());
        m.weights = a.summary.weights;
        m.weights.insert(m.weights.end(), b.summary.weights.begin(), b.summary.weights.end());
        m.total_weight = a.summary.total_weight + b.summary.total_weight;
        m.canonicalize();
        out.delta = (a.delta + b.delta) / 2;
        m.eps_bound = out.delta;
        out.reduced = a.reduced && b.reduced;

        const Rational delta_k = budget(out.level);
        if (m.size() < 2) return out;
        if (m.size() > config_.family.cap || halving_lower_bound(m) > delta_k) {
            out.reduced = false;
            return out;
        }
        WeightedSample r = weighted_eps_approx(m, config_.family, delta_k);
        if (r.size() == m.size()) out.reduced = false;
        out.delta = r.eps_bound;
        out.summary = std::move(r);
        return out;
    }

    EngineConfig config_;
    Rational normalizer_;
    std::uint64_t n_ = 0;
    std::map<unsigned, LevelSummary> slots_;
};

inline constexpr int kSnapshotFormatVersion = 1;

inline nlohmann::json snapshot_to_json(const Snapshot& snap) {
    return {{"version", kSnapshotFormatVersion},
            {"config", config_to_json(snap.config)},
            {"n", snap.n},
            {"certified_error", to_string(snap.certified_error)},
            {"sample", sample_to_json(snap.sample, snap.config.family, snap.config.scale)}};
}

inline Snapshot snapshot_from_json(const nlohmann::json& j) {
    try {
        if (j.at("version").get<int>() != kSnapshotFormatVersion) throw ParseError("unsupported snapshot version");
        Snapshot snap;
        snap.config = config_from_json(j.at("config"));
        snap.config.validate();
        snap.n = j.at("n").get<std::uint64_t>();
        snap.certified_error = rational_from_json(j.at("certified_error"));
        snap.sample = sample_from_json(j.at("sample")).sample;
        if (snap.sample.total_weight != Rational(snap.n)) throw ParseError("snapshot weight does not match n");
        return snap;
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("malformed snapshot: ") + ex.what());
    } catch (const std::invalid_argument& ex) {
        throw ParseError(std::string("invalid snapshot: ") + ex.what());
    }
}

}  // namespace epsstream

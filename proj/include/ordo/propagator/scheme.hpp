#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "ordo/opalg/measure.hpp"

namespace ordo::propagator {

/// Averaging prescription for the potential in one time slice. Every scheme
/// is a tau measure on the segment from the earlier point to the later one.
class SliceScheme {
public:
    enum class Kind { Left, Right, Midpoint, UniformBJ, Mixture };

    static SliceScheme left() { return SliceScheme(Kind::Left, opalg::TauMeasure::point_mass(Rational(0))); }
    static SliceScheme right() { return SliceScheme(Kind::Right, opalg::TauMeasure::point_mass(Rational(1))); }
    static SliceScheme midpoint() { return SliceScheme(Kind::Midpoint, opalg::TauMeasure::weyl()); }
    static SliceScheme uniform_bj() { return SliceScheme(Kind::UniformBJ, opalg::TauMeasure::uniform()); }

    /// Classifies a measure: point masses at 0, 1, 1/2 and Uniform map to the
    /// named schemes, anything else is a Mixture.
    static SliceScheme from_measure(const opalg::TauMeasure& P) {
        if (P.is_uniform()) return uniform_bj();
        const auto atoms = P.atoms();
        if (atoms.size() == 1) {
            if (atoms[0].tau == 0) return left();
            if (atoms[0].tau == 1) return right();
            if (atoms[0].tau == Rational(1, 2)) return midpoint();
        }
        return SliceScheme(Kind::Mixture, P);
    }

    Kind kind() const { return kind_; }
    const opalg::TauMeasure& measure() const { return measure_; }

    std::string name() const {
        switch (kind_) {
        case Kind::Left: return "left";
        case Kind::Right: return "right";
        case Kind::Midpoint: return "midpoint";
        case Kind::UniformBJ: return "bj";
        case Kind::Mixture: return opalg::to_string(measure_);
        }
        return "unknown";
    }

    friend bool operator==(const SliceScheme& a, const SliceScheme& b) { return a.measure_ == b.measure_; }

private:
    SliceScheme(Kind k, opalg::TauMeasure P) : kind_(k), measure_(std::move(P)) {}

    Kind kind_;
    opalg::TauMeasure measure_;
};

/// Accepts every measure spelling of parse_measure (`left`, `right`,
/// `midpoint`, `weyl`, `bj`, `uniform`, `tau:<r>`, `mix:...`).
inline SliceScheme parse_scheme(std::string_view s) { return SliceScheme::from_measure(opalg::parse_measure(s)); }

} // namespace ordo::propagator

#pragma once

#include "mouldcalc/scalar.hpp"

namespace mouldcalc {

/// First-order jet val + d*eps with eps^2 = 0.  The ring of dual numbers over
/// Scalar; every product truncates the eps^2 term exactly.
struct EpsJet {
    Scalar val;
    Scalar d;

    EpsJet() = default;
    EpsJet(Scalar v) : val(std::move(v)) {}                        // NOLINT: implicit by design
    EpsJet(Scalar v, Scalar deriv) : val(std::move(v)), d(std::move(deriv)) {}

    bool is_zero() const { return val.is_zero() && d.is_zero(); }

    friend EpsJet operator+(const EpsJet& a, const EpsJet& b) { return {a.val + b.val, a.d + b.d}; }
    friend EpsJet operator-(const EpsJet& a, const EpsJet& b) { return {a.val - b.val, a.d - b.d}; }
    friend EpsJet operator-(const EpsJet& a) { return {-a.val, -a.d}; }
    friend EpsJet operator*(const EpsJet& a, const EpsJet& b) {
        return {a.val * b.val, a.val * b.d + a.d * b.val};
    }

    /// Invertible iff val != 0: (val + d eps)^-1 = val^-1 - d val^-2 eps.
    EpsJet inv() const {
        if (val.is_zero()) throw division_by_zero("inverse of a jet with zero value part");
        const Scalar vi = val.inv();
        return {vi, -(d * vi * vi)};
    }

    friend EpsJet operator/(const EpsJet& a, const EpsJet& b) { return a * b.inv(); }

    EpsJet& operator+=(const EpsJet& o) { return *this = *this + o; }
    EpsJet& operator-=(const EpsJet& o) { return *this = *this - o; }
    EpsJet& operator*=(const EpsJet& o) { return *this = *this * o; }

    friend bool operator==(const EpsJet& a, const EpsJet& b) {
        return a.val == b.val && a.d == b.d;
    }
    friend bool operator!=(const EpsJet& a, const EpsJet& b) { return !(a == b); }

    std::string str() const { return val.str() + " + (" + d.str() + ")eps"; }
};

} // namespace mouldcalc

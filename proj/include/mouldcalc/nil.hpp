#pragma once

#include "mouldcalc/mould.hpp"
#include "mouldcalc/rng.hpp"
#include "mouldcalc/variance.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mouldcalc {

/// Memoized solver for the universal mould Nil^ on weight sequences.
///
/// The defining relations pin the value of every word from shorter ones:
///   - base: Nil^{} = 0; single letter: 1 if the weight is 0, else 0;
///     all-zero words of length >= 2 are fixed to 0 (an initial condition,
///     matching the vanishing of their shuffle sums, not a consequence of the
///     recursion);
///   - total-weight route, valid whenever |w| != 0:
///       |w| * Nil^w = Nil^{tail} - Nil^{init};
///   - position route, one equation per index i with w_i != 0:
///       w_i * Nil^w = [i=1] Nil^{tail} - [i=r] Nil^{init}
///                     - [i<r] Nil^{conf_i} + [i>1] Nil^{conb_i}.
/// The system is overdetermined; all admissible routes must agree.  Mode
/// first_admissible evaluates one route (total-weight when |w| != 0, else the
/// smallest i with w_i != 0); check_all_positions evaluates every route and
/// throws mould_error on any disagreement, re-verifying memoized values as
/// they are read back.
class NilSolver {
public:
    enum class Mode { first_admissible, check_all_positions };

    explicit NilSolver(Mode mode = Mode::first_admissible) : mode_(mode) {}

    Mode mode() const { return mode_; }
    std::size_t memo_size() const { return memo_.size(); }

    Scalar value(const WeightWord& w) {
        if (auto it = memo_.find(w); it != memo_.end()) {
            if (mode_ == Mode::check_all_positions) verify(w, it->second);
            return it->second;
        }
        Scalar v = compute(w);
        memo_.emplace(w, v);
        return v;
    }

    /// Dia = I - Nil, where I is 1 exactly on single-letter words.
    Scalar dia(const WeightWord& w) {
        const Scalar i = w.length() == 1 ? Scalar(1) : Scalar(0);
        return i - value(w);
    }

    struct Route {
        std::string name;   // "total-weight" or "position i"
        Scalar value;
    };

    struct ConsistencyReport {
        WeightWord word;
        bool base_case = false;   // no route applies; the value is pinned directly
        std::vector<Route> routes;
        bool all_agree = true;
        Scalar value;
    };

    /// Evaluates every admissible route independently and reports agreement.
    ConsistencyReport consistency(const WeightWord& w) {
        ConsistencyReport rep;
        rep.word = w;
        if (auto b = base_value(w)) {
            rep.base_case = true;
            rep.value     = *b;
            return rep;
        }
        rep.routes = all_routes(w);
        rep.value  = rep.routes.front().value;
        for (const Route& r : rep.routes)
            if (!(r.value == rep.value)) rep.all_agree = false;
        return rep;
    }

private:
    std::optional<Scalar> base_value(const WeightWord& w) const {
        if (w.empty()) return Scalar(0);
        if (w.length() == 1) return w.at(1).is_zero() ? Scalar(1) : Scalar(0);
        for (const Scalar& x : w.letters())
            if (!x.is_zero()) return std::nullopt;
        return Scalar(0);
    }

    Scalar route_total(const WeightWord& w) {
        const Scalar tot = total_weight(w);
        return tot.inv() * (value(w.tail()) - value(w.init()));
    }

    Scalar route_position(const WeightWord& w, std::size_t i) {
        const std::size_t r = w.length();
        Scalar rhs;
        if (i == 1) rhs += value(w.tail());
        if (i == r) rhs -= value(w.init());
        if (i < r) rhs -= value(conf(w, i));
        if (i > 1) rhs += value(conb(w, i));
        return w.at(i).inv() * rhs;
    }

    std::vector<Route> all_routes(const WeightWord& w) {
        std::vector<Route> out;
        if (!total_weight(w).is_zero()) out.push_back({"total-weight", route_total(w)});
        for (std::size_t i = 1; i <= w.length(); ++i)
            if (!w.at(i).is_zero())
                out.push_back({"position " + std::to_string(i), route_position(w, i)});
        return out;
    }

    Scalar compute(const WeightWord& w) {
        if (auto b = base_value(w)) return *b;
        if (mode_ == Mode::first_admissible) {
            if (!total_weight(w).is_zero()) return route_total(w);
            for (std::size_t i = 1; i <= w.length(); ++i)
                if (!w.at(i).is_zero()) return route_position(w, i);
            throw mould_error("unreachable: non-base word with no admissible route");
        }
        const std::vector<Route> rs = all_routes(w);
        for (const Route& r : rs)
            if (!(r.value == rs.front().value))
                throw mould_error("evaluation routes disagree at " + to_string(w) + ": " +
                                  rs.front().name + " gives " + rs.front().value.str() + ", " +
                                  r.name + " gives " + r.value.str());
        return rs.front().value;
    }

    // Read-back verification for check_all_positions: every stored value must
    // still satisfy each defining equation.  Recurses through value(), so a
    // read re-checks the whole supporting subtree; word lengths shrink
    // strictly, and the suites only use this mode at short lengths.
    void verify(const WeightWord& w, const Scalar& stored) {
        if (base_value(w)) return;
        for (const Route& r : all_routes(w))
            if (!(r.value == stored))
                throw mould_error("memoized value fails route " + r.name + " at " + to_string(w));
    }

    Mode mode_;
    std::map<WeightWord, Scalar> memo_;
};

/// Nil as a universal mould backed by a shared solver (memo shared across all
/// copies and products built from it).
inline Mould nil_mould(std::shared_ptr<NilSolver> solver) {
    return Mould::universal("Nil", [solver](const WeightWord& w) { return solver->value(w); });
}

inline Mould dia_mould(std::shared_ptr<NilSolver> solver) {
    return Mould::universal("Dia", [solver](const WeightWord& w) { return solver->dia(w); });
}

/// Checks the variance identity that defines Nil, on every word over
/// alphabet + c up to max_len:
///
///   Var_c(Nil) = I_c x Nil - Nil x I_c,   I_c the single-letter indicator of c.
///
/// The variance here sums over every occurrence of c, so the context base is
/// the extended alphabet.  When c is resonant (weight 0) the same identity for
/// Dia = I - Nil is checked as well: it follows because Var_c(I) = I_c x I -
/// I x I_c holds exactly when the weight of c vanishes.
inline CheckResult functional_equation_check(const std::shared_ptr<NilSolver>& solver,
                                             const std::set<Letter>& alphabet,
                                             const Spectrum& lam, const Letter& c,
                                             std::size_t max_len) {
    std::set<Letter> ext = alphabet;
    ext.insert(c);
    const VarianceContext ctx = make_variance_context(c, lam, ext);
    const Mould ic            = dirac_mould(c);

    auto check_one = [&](const Mould& m, const std::string& label) -> std::optional<std::string> {
        const Mould lhs = var_c(m, ctx);
        const Mould rhs = mould_linear(Scalar(1), mould_mul(ic, m), Scalar(-1), mould_mul(m, ic));
        if (auto w = equal_up_to(lhs, rhs, ext, max_len))
            return label + " identity fails at " + to_string(*w) + ": lhs=" + lhs(*w).str() +
                   " rhs=" + rhs(*w).str();
        return std::nullopt;
    };

    const Mould nm = nil_mould(solver).with_spectrum(lam);
    if (auto err = check_one(nm, "Nil")) return {false, *err};
    if (ctx.omega_c.is_zero()) {
        const Mould dm = dia_mould(solver).with_spectrum(lam);
        if (auto err = check_one(dm, "Dia")) return {false, *err};
        return {true, "Nil and Dia identities hold up to length " + std::to_string(max_len)};
    }
    return {true, "Nil identity holds up to length " + std::to_string(max_len)};
}

/// One row of the closed-form value table for short words: a weight pattern
/// in up to three generic symbols, the closed form the solver must reproduce,
/// and the side conditions a sample has to satisfy.  Samples always use
/// pairwise-distinct nonzero symbols; `admissible` adds the row's own
/// conditions on top.
struct NilTableRow {
    std::string pattern;
    std::string formula;
    bool resonant = false;        // every instance has total weight 0
    bool sign_corrected = false;  // formula deliberately differs from the reference table
    std::string note;
    int arity = 0;
    std::function<WeightWord(const std::vector<Scalar>&)> instantiate;
    std::function<Scalar(const std::vector<Scalar>&)> expected;
    std::function<bool(const std::vector<Scalar>&)> admissible;
};

/// Rows for words of the given length (1, 2 or 3).  Symbols are named w, u, v
/// in the patterns.  Two rows carry notes:
///   - (w, 0, 0): reference tables list w^{-2}, but the value is forced to
///     -w^{-2} by the total-weight route (-Nil^{(w,0)} / w) and by alternality
///     of the shuffle of (0) with (w, 0), which gives
///     Nil^{(0,w,0)} + 2 Nil^{(w,0,0)} = 0 with Nil^{(0,w,0)} = 2 w^{-2}.
///     The row is kept with the corrected sign and flagged, never silently
///     fixed.
///   - (w, 0, u): a circulating derivation quotes -2 w^{-1} u^{-1}; the
///     recursion and the route cross-checks confirm -w^{-1} u^{-1}.
inline std::vector<NilTableRow> nil_table_rows(std::size_t length) {
    using S  = std::vector<Scalar>;
    auto yes  = [](const S&) { return true; };
    auto zero = [](const S&) { return Scalar(0); };
    const Scalar z(0), one(1);

    std::vector<NilTableRow> rows;
    auto add = [&rows](NilTableRow r) { rows.push_back(std::move(r)); };

    switch (length) {
    case 1:
        add({"(0)", "1", true, false, "", 0,
             [z](const S&) { return WeightWord{z}; },
             [one](const S&) { return one; }, yes});
        add({"(w)", "0", false, false, "", 1,
             [](const S& s) { return WeightWord{s[0]}; }, zero, yes});
        return rows;
    case 2:
        add({"(w, u)", "0", false, false, "", 2,
             [](const S& s) { return WeightWord{s[0], s[1]}; }, zero,
             [](const S& s) { return !(s[0] + s[1]).is_zero(); }});
        add({"(0, w)", "-1/w", false, false, "", 1,
             [z](const S& s) { return WeightWord{z, s[0]}; },
             [](const S& s) { return -s[0].inv(); }, yes});
        add({"(w, 0)", "1/w", false, false, "", 1,
             [z](const S& s) { return WeightWord{s[0], z}; },
             [](const S& s) { return s[0].inv(); }, yes});
        add({"(0, 0)", "0", true, false, "", 0,
             [z](const S&) { return WeightWord{z, z}; }, zero, yes});
        add({"(w, -w)", "-1/w", true, false, "", 1,
             [](const S& s) { return WeightWord{s[0], -s[0]}; },
             [](const S& s) { return -s[0].inv(); }, yes});
        return rows;
    case 3:
        add({"(w, u, v)", "0", false, false, "", 3,
             [](const S& s) { return WeightWord{s[0], s[1], s[2]}; }, zero,
             [](const S& s) {
                 return !(s[0] + s[1]).is_zero() && !(s[0] + s[2]).is_zero() &&
                        !(s[1] + s[2]).is_zero() && !(s[0] + s[1] + s[2]).is_zero();
             }});
        add({"(w, u, -u)", "-1/(w*u)", false, false, "", 2,
             [](const S& s) { return WeightWord{s[0], s[1], -s[1]}; },
             [](const S& s) { return -(s[0] * s[1]).inv(); },
             [](const S& s) { return !(s[0] + s[1]).is_zero(); }});
        add({"(u, w, -u)", "0", false, false, "", 2,
             [](const S& s) { return WeightWord{s[1], s[0], -s[1]}; }, zero,
             [](const S& s) { return !(s[0] + s[1]).is_zero(); }});
        add({"(w, -w, u)", "1/(w*u)", false, false, "", 2,
             [](const S& s) { return WeightWord{s[0], -s[0], s[1]}; },
             [](const S& s) { return (s[0] * s[1]).inv(); }, yes});
        add({"(0, w, u)", "1/(w*(w+u))", false, false, "", 2,
             [z](const S& s) { return WeightWord{z, s[0], s[1]}; },
             [](const S& s) { return (s[0] * (s[0] + s[1])).inv(); },
             [](const S& s) { return !(s[0] + s[1]).is_zero(); }});
        add({"(w, 0, u)", "-1/(w*u)", false, false,
             "a circulating derivation quotes -2/(w*u); the recursion confirms -1/(w*u)", 2,
             [z](const S& s) { return WeightWord{s[0], z, s[1]}; },
             [](const S& s) { return -(s[0] * s[1]).inv(); },
             [](const S& s) { return !(s[0] + s[1]).is_zero(); }});
        add({"(w, u, 0)", "1/(u*(w+u))", false, false, "", 2,
             [z](const S& s) { return WeightWord{s[0], s[1], z}; },
             [](const S& s) { return (s[1] * (s[0] + s[1])).inv(); },
             [](const S& s) { return !(s[0] + s[1]).is_zero(); }});
        add({"(w, 0, 0)", "-1/w^2", false, true,
             "reference tables list 1/w^2; the total-weight route gives -Nil^(w,0)/w = "
             "-1/w^2, and the shuffle of (0) with (w,0) forces Nil^(0,w,0) + 2*Nil^(w,0,0) "
             "= 0 with Nil^(0,w,0) = 2/w^2; kept with the corrected sign and flagged",
             1, [z](const S& s) { return WeightWord{s[0], z, z}; },
             [](const S& s) { return -(s[0] * s[0]).inv(); }, yes});
        add({"(0, w, 0)", "2/w^2", false, false, "", 1,
             [z](const S& s) { return WeightWord{z, s[0], z}; },
             [](const S& s) { return Scalar(2) * (s[0] * s[0]).inv(); }, yes});
        add({"(0, 0, w)", "-1/w^2", false, false, "", 1,
             [z](const S& s) { return WeightWord{z, z, s[0]}; },
             [](const S& s) { return -(s[0] * s[0]).inv(); }, yes});
        add({"(0, 0, 0)", "0", true, false, "", 0,
             [z](const S&) { return WeightWord{z, z, z}; }, zero, yes});
        add({"(0, w, -w)", "-1/w^2", true, false, "", 1,
             [z](const S& s) { return WeightWord{z, s[0], -s[0]}; },
             [](const S& s) { return -(s[0] * s[0]).inv(); }, yes});
        add({"(w, 0, -w)", "2/w^2", true, false, "", 1,
             [z](const S& s) { return WeightWord{s[0], z, -s[0]}; },
             [](const S& s) { return Scalar(2) * (s[0] * s[0]).inv(); }, yes});
        add({"(w, -w, 0)", "-1/w^2", true, false, "", 1,
             [z](const S& s) { return WeightWord{s[0], -s[0], z}; },
             [](const S& s) { return -(s[0] * s[0]).inv(); }, yes});
        return rows;
    default:
        throw std::invalid_argument("table rows exist for lengths 1, 2 and 3 only");
    }
}

struct NilTableRowReport {
    std::string pattern;
    std::string formula;
    bool resonant = false;
    std::string status;   // "pass" | "documented-discrepancy" | "fail"
    std::size_t samples = 0;
    std::string example;  // one sampled instantiation, or the first mismatch
    std::string note;
};

struct NilTableReport {
    std::size_t length = 0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::vector<NilTableRowReport> rows;
    std::size_t discrepancies = 0;  // rows whose formula is flagged sign-corrected
    bool ok = true;                 // no row failed (flagged rows still count as ok)
};

/// Draws `samples` admissible instantiations per row (distinct nonzero
/// Gaussian-rational symbols, row side conditions) and checks the solver
/// against the row's closed form, exactly.
inline NilTableReport run_nil_table(NilSolver& solver, std::size_t length, std::size_t samples,
                                    std::uint64_t seed) {
    NilTableReport rep;
    rep.length  = length;
    rep.samples = samples;
    rep.seed    = seed;
    Rng rng(seed);

    for (const NilTableRow& row : nil_table_rows(length)) {
        NilTableRowReport rr;
        rr.pattern  = row.pattern;
        rr.formula  = row.formula;
        rr.resonant = row.resonant;
        rr.note     = row.note;
        rr.status   = row.sign_corrected ? "documented-discrepancy" : "pass";
        if (row.sign_corrected) ++rep.discrepancies;

        const std::size_t n = row.arity == 0 ? 1 : samples;
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<Scalar> sym;
            for (int attempt = 0;; ++attempt) {
                if (attempt > 500)
                    throw std::logic_error("sampler cannot satisfy row " + row.pattern);
                sym.clear();
                while (sym.size() < static_cast<std::size_t>(row.arity)) {
                    Scalar s = rng.nonzero_scalar();
                    bool fresh = true;
                    for (const Scalar& t : sym)
                        if (t == s) fresh = false;
                    if (fresh) sym.push_back(s);
                }
                if (row.admissible(sym)) break;
            }
            const WeightWord w = row.instantiate(sym);
            const Scalar got   = solver.value(w);
            const Scalar want  = row.expected(sym);
            ++rr.samples;
            if (got == want) {
                if (rr.example.empty())
                    rr.example = to_string(w) + " -> " + got.str();
            } else {
                rr.status  = "fail";
                rr.example = to_string(w) + " -> " + got.str() + ", table says " + want.str();
                rep.ok     = false;
                break;
            }
        }
        rep.rows.push_back(std::move(rr));
    }
    return rep;
}

} // namespace mouldcalc

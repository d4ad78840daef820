#pragma once

#include "mouldcalc/field_io.hpp"
#include "mouldcalc/nil.hpp"
#include "mouldcalc/sampling.hpp"
#include "mouldcalc/variance.hpp"
#include "mouldcalc/vfield.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace mouldcalc::cli {

/// Exit codes: 0 all requested checks pass, 1 a check failed, 2 input could
/// not be parsed, 3 a mathematical error was raised by the library.  CLI11
/// usage errors keep their own nonzero codes.
enum ExitCode : int { exit_ok = 0, exit_check_failed = 1, exit_parse = 2, exit_math = 3 };

namespace detail {

template <class F>
auto parse_flag(const char* flag, F&& f) {
    try {
        return f();
    } catch (const parse_error& e) {
        throw parse_error(std::string(flag) + ": " + e.what());
    }
}

inline Mould named_mould(const std::string& name, const std::shared_ptr<NilSolver>& solver) {
    if (name == "invfact") return invfact_mould();
    if (name == "La") return linearization_mould();
    if (name == "I") return identity_mould();
    if (name == "unit") return unit_mould();
    if (name == "zero") return constant_mould(Scalar(0));
    if (name == "nil") return nil_mould(solver);
    if (name == "dia") return dia_mould(solver);
    throw parse_error("--mould: unknown mould '" + name +
                      "' (known: invfact, La, I, unit, zero, nil, dia)");
}

inline void check_dim(const char* flag, const Letter& n, std::size_t dim) {
    if (n.dim() != dim)
        throw parse_error(std::string(flag) + ": letter " + n.str() + " has dimension " +
                          std::to_string(n.dim()) + ", expected " + std::to_string(dim));
}

struct ExtractedTerm {
    std::size_t component = 0;  // 1-based
    Monomial exponents;
    Scalar coeff;
};

/// A truncated derivation is pinned down by its columns at the coordinate
/// monomials; read them back as polynomial components.
inline std::vector<ExtractedTerm> derivation_terms(const ScalarMatrix& p,
                                                   const MonomialBasis& basis) {
    std::vector<ExtractedTerm> out;
    for (std::size_t k = 0; k < basis.dim(); ++k) {
        Monomial ek(basis.dim(), 0);
        ek[k]          = 1;
        const auto col = basis.index(ek);
        if (!col) continue;
        for (std::size_t i = 0; i < basis.size(); ++i)
            if (!p(i, *col).is_zero()) out.push_back({k + 1, basis.at(i), p(i, *col)});
    }
    return out;
}

inline void print_terms(std::ostream& out, const std::vector<ExtractedTerm>& terms) {
    for (const ExtractedTerm& t : terms)
        out << "term " << t.component << " " << to_string(t.exponents) << " " << t.coeff.str()
            << "\n";
}

inline json terms_json(const std::vector<ExtractedTerm>& terms) {
    json a = json::array();
    for (const ExtractedTerm& t : terms)
        a.push_back({{"component", t.component},
                     {"exponents", t.exponents},
                     {"coeff", t.coeff.str()}});
    return a;
}

inline std::size_t count_nonzero(const ScalarMatrix& p) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < p.rows(); ++i)
        for (std::size_t j = 0; j < p.cols(); ++j)
            if (!p(i, j).is_zero()) ++n;
    return n;
}

inline void print_matrix(std::ostream& out, const ScalarMatrix& p, const MonomialBasis& basis) {
    for (std::size_t i = 0; i < p.rows(); ++i)
        for (std::size_t j = 0; j < p.cols(); ++j)
            if (!p(i, j).is_zero())
                out << "entry " << to_string(basis.at(i)) << " <- " << to_string(basis.at(j))
                    << " : " << p(i, j).str() << "\n";
}

inline json matrix_json(const ScalarMatrix& p, const MonomialBasis& basis) {
    json a = json::array();
    for (std::size_t i = 0; i < p.rows(); ++i)
        for (std::size_t j = 0; j < p.cols(); ++j)
            if (!p(i, j).is_zero())
                a.push_back({{"target", to_string(basis.at(i))},
                             {"source", to_string(basis.at(j))},
                             {"value", p(i, j).str()}});
    return a;
}

inline json row_json(const NilTableRowReport& r) {
    return {{"pattern", r.pattern}, {"formula", r.formula},   {"resonant", r.resonant},
            {"status", r.status},   {"samples", r.samples},   {"example", r.example},
            {"note", r.note}};
}

} // namespace detail

/// Parses and executes one invocation; everything the command prints goes to
/// `out`, diagnostics to `err`.  Same arguments produce the same bytes.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    using detail::parse_flag;

    CLI::App app{"exact mould calculus for local vector fields"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "text";
    app.add_option("--format", format, "output format: text or structured")
        ->check(CLI::IsMember({"text", "structured"}));

    auto* sc_nil = app.add_subcommand("nil", "evaluate the nilpotent-part mould at a weight word");
    std::string nil_weights;
    sc_nil->add_option("--weights", nil_weights, "comma-separated weights, e.g. \"0,1,0\"")
        ->required();

    auto* sc_table = app.add_subcommand("nil-table", "verify the closed-form value tables");
    std::size_t table_length = 3, table_samples = 100;
    std::uint64_t table_seed = 7;
    sc_table->add_option("--length", table_length, "word length (1, 2 or 3)")
        ->check(CLI::Range(std::size_t{1}, std::size_t{3}))
        ->required();
    sc_table->add_option("--samples", table_samples, "instantiations per row");
    sc_table->add_option("--seed", table_seed, "sampling seed");

    auto* sc_ncheck = app.add_subcommand("nil-check", "cross-check every evaluation route");
    std::string ncheck_weights;
    bool ncheck_all = false;
    sc_ncheck->add_option("--weights", ncheck_weights, "comma-separated weights")->required();
    sc_ncheck->add_flag("--all-routes", ncheck_all, "print each route's value");

    auto* sc_var = app.add_subcommand("variance", "evaluate a variance operator on one word");
    std::string var_mould, var_letter, var_word, var_lambda, var_base;
    sc_var->add_option("--mould", var_mould, "mould name")->required();
    sc_var->add_option("--letter", var_letter, "letter c, e.g. \"(0,2)\"")->required();
    sc_var->add_option("--word", var_word, "word, e.g. \"[(1,1),(2,0)]\"")->required();
    sc_var->add_option("--lambda", var_lambda, "eigenvalues, e.g. \"1,-1\"")->required();
    sc_var->add_option("--base", var_base,
                       "alphabet as a letter list; default: the word's letters plus c");

    auto* sc_act = app.add_subcommand("act", "apply a mould's operator expansion to a field");
    std::string act_field, act_mould, act_emit = "matrix";
    int act_order = 0;
    sc_act->add_option("--field", act_field, "vector-field file")->required();
    sc_act->add_option("--mould", act_mould, "mould name")->required();
    sc_act->add_option("--order", act_order, "truncation degree")
        ->check(CLI::Range(0, 12))
        ->required();
    sc_act->add_option("--emit", act_emit, "matrix or field")
        ->check(CLI::IsMember({"matrix", "field"}));

    auto* sc_dec = app.add_subcommand("decompose", "split a field into commuting parts");
    std::string dec_field;
    int dec_order = 0;
    sc_dec->add_option("--field", dec_field, "vector-field file")->required();
    sc_dec->add_option("--order", dec_order, "truncation degree")
        ->check(CLI::Range(0, 12))
        ->required();

    auto* sc_chk = app.add_subcommand("check", "randomized property suites");
    std::string chk_kind;
    std::uint64_t chk_seed = 0;
    std::size_t chk_trials = 20, chk_maxlen = 4;
    sc_chk->add_option("kind", chk_kind, "derivation, nabla, alternality or functional")
        ->check(CLI::IsMember({"derivation", "nabla", "alternality", "functional"}))
        ->required();
    sc_chk->add_option("--seed", chk_seed, "sampling seed")->required();
    sc_chk->add_option("--trials", chk_trials, "number of random configurations");
    sc_chk->add_option("--maxlen", chk_maxlen, "word-length bound")
        ->check(CLI::Range(std::size_t{1}, std::size_t{6}));

    auto* sc_orc = app.add_subcommand("oracle", "compare conjugation against the variance formula");
    std::string orc_field, orc_letter, orc_mould, orc_coeffs;
    int orc_order = 0;
    sc_orc->add_option("--field", orc_field, "vector-field file")->required();
    sc_orc->add_option("--letter", orc_letter, "letter c")->required();
    sc_orc->add_option("--mould", orc_mould, "mould name")->required();
    sc_orc->add_option("--order", orc_order, "truncation degree")
        ->check(CLI::Range(0, 12))
        ->required();
    sc_orc->add_option("--coeffs", orc_coeffs,
                       "coefficients for the operator at c; default: the field's own operator "
                       "when c is a field letter, otherwise 1 on every valid slot");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }
    const bool structured = format == "structured";

    try {
        if (sc_nil->parsed()) {
            const WeightWord w =
                parse_flag("--weights", [&] { return parse_weight_word(nil_weights); });
            NilSolver solver;
            const Scalar v = solver.value(w);
            if (structured)
                out << json{{"weights", to_string(w)}, {"value", v.str()}}.dump(2) << "\n";
            else
                out << v.str() << "\n";
            return exit_ok;
        }

        if (sc_table->parsed()) {
            NilSolver solver(NilSolver::Mode::check_all_positions);
            const NilTableReport rep = run_nil_table(solver, table_length, table_samples, table_seed);
            if (structured) {
                json rows = json::array();
                for (const auto& r : rep.rows) rows.push_back(detail::row_json(r));
                out << json{{"length", rep.length},
                            {"samples", rep.samples},
                            {"seed", rep.seed},
                            {"rows", rows},
                            {"discrepancies", rep.discrepancies},
                            {"ok", rep.ok}}
                           .dump(2)
                    << "\n";
            } else {
                out << "length " << rep.length << " samples " << rep.samples << " seed "
                    << rep.seed << "\n";
                for (const auto& r : rep.rows) {
                    out << "row " << r.pattern << " -> " << r.formula << " : " << r.status
                        << (r.resonant ? " [resonant]" : "") << "\n";
                    if (!r.example.empty()) out << "  sample " << r.example << "\n";
                    if (!r.note.empty()) out << "  note " << r.note << "\n";
                }
                out << "rows " << rep.rows.size() << " discrepancies " << rep.discrepancies
                    << " " << (rep.ok ? "ok" : "FAIL") << "\n";
            }
            return rep.ok ? exit_ok : exit_check_failed;
        }

        if (sc_ncheck->parsed()) {
            const WeightWord w =
                parse_flag("--weights", [&] { return parse_weight_word(ncheck_weights); });
            NilSolver solver;
            const auto rep = solver.consistency(w);
            if (structured) {
                json routes = json::array();
                for (const auto& r : rep.routes)
                    routes.push_back({{"name", r.name}, {"value", r.value.str()}});
                out << json{{"word", to_string(rep.word)},
                            {"base_case", rep.base_case},
                            {"routes", routes},
                            {"all_agree", rep.all_agree},
                            {"value", rep.value.str()}}
                           .dump(2)
                    << "\n";
            } else {
                out << "word " << to_string(rep.word) << "\n";
                if (rep.base_case) out << "base-case (no route applies)\n";
                if (ncheck_all)
                    for (const auto& r : rep.routes)
                        out << "route " << r.name << " = " << r.value.str() << "\n";
                out << "value " << rep.value.str() << "\n";
                out << "agree " << (rep.all_agree ? "true" : "false") << "\n";
            }
            return rep.all_agree ? exit_ok : exit_check_failed;
        }

        if (sc_var->parsed()) {
            const Letter c   = parse_flag("--letter", [&] { return parse_letter(var_letter); });
            const Word w     = parse_flag("--word", [&] { return parse_word(var_word); });
            const Spectrum lam =
                parse_flag("--lambda", [&] { return parse_spectrum(var_lambda); });
            detail::check_dim("--letter", c, lam.dim());
            for (const Letter& n : w.letters()) detail::check_dim("--word", n, lam.dim());
            std::set<Letter> base;
            if (!var_base.empty())
                for (const Letter& n :
                     parse_flag("--base", [&] { return parse_word(var_base); }).letters())
                    base.insert(n);
            else
                for (const Letter& n : w.letters()) base.insert(n);
            base.insert(c);
            for (const Letter& n : base) detail::check_dim("--base", n, lam.dim());
            auto solver = std::make_shared<NilSolver>();
            Mould m     = detail::named_mould(var_mould, solver);
            if (m.is_universal()) m = m.with_spectrum(lam);
            const auto ctx = make_variance_context(c, lam, base);
            const Scalar v = var_c(m, ctx)(w);
            if (structured) {
                json jbase = json::array();
                for (const Letter& n : base) jbase.push_back(n.str());
                json jlam = json::array();
                for (const Scalar& s : lam.lambda) jlam.push_back(s.str());
                out << json{{"mould", var_mould},
                            {"letter", c.str()},
                            {"word", to_string(w)},
                            {"lambda", jlam},
                            {"base", jbase},
                            {"value", v.str()}}
                           .dump(2)
                    << "\n";
            } else {
                out << v.str() << "\n";
            }
            return exit_ok;
        }

        if (sc_act->parsed()) {
            const PreparedVectorField x = load_field(act_field);
            const MonomialBasis basis(x.dim(), act_order);
            auto solver         = std::make_shared<NilSolver>();
            const Mould m       = detail::named_mould(act_mould, solver);
            const ScalarMatrix p = act(m, x, basis);
            if (act_emit == "field") {
                const CheckResult d = is_derivation(p, basis);
                if (!d.pass)
                    throw mould_error("the action is not a derivation at order " +
                                      std::to_string(act_order) +
                                      "; emit the matrix instead (" + d.detail + ")");
                const auto terms = detail::derivation_terms(p, basis);
                if (structured)
                    out << json{{"order", act_order},
                                {"dim", x.dim()},
                                {"emit", "field"},
                                {"terms", detail::terms_json(terms)}}
                               .dump(2)
                        << "\n";
                else
                    detail::print_terms(out, terms);
            } else {
                if (structured)
                    out << json{{"order", act_order},
                                {"dim", x.dim()},
                                {"basis", basis.size()},
                                {"emit", "matrix"},
                                {"entries", detail::matrix_json(p, basis)}}
                               .dump(2)
                        << "\n";
                else {
                    out << "dim " << x.dim() << " order " << act_order << " basis "
                        << basis.size() << " nonzero " << detail::count_nonzero(p) << "\n";
                    detail::print_matrix(out, p, basis);
                }
            }
            return exit_ok;
        }

        if (sc_dec->parsed()) {
            const PreparedVectorField x = load_field(dec_field);
            const MonomialBasis basis(x.dim(), dec_order);
            auto solver = std::make_shared<NilSolver>();
            const ScalarMatrix nilm = nil_part(x, solver, basis);
            const ScalarMatrix diam = dia_part(x, solver, basis);
            const bool recon        = nilm + diam == field_matrix(x, basis);
            const ScalarMatrix resid = lie_bracket(diam, nilm);
            std::vector<std::size_t> by_degree(static_cast<std::size_t>(dec_order) + 1, 0);
            for (std::size_t i = 0; i < resid.rows(); ++i)
                for (std::size_t j = 0; j < resid.cols(); ++j)
                    if (!resid(i, j).is_zero())
                        ++by_degree[static_cast<std::size_t>(degree(basis.at(j)))];
            const CheckResult dn = is_derivation(nilm, basis);
            const CheckResult dd = is_derivation(diam, basis);
            const bool ok = recon && resid.is_zero() && dn.pass && dd.pass;
            const auto nil_terms = detail::derivation_terms(nilm, basis);
            const auto dia_terms = detail::derivation_terms(diam, basis);
            if (structured) {
                out << json{{"dim", x.dim()},
                            {"order", dec_order},
                            {"nil_terms", detail::terms_json(nil_terms)},
                            {"dia_terms", detail::terms_json(dia_terms)},
                            {"reconstruction_exact", recon},
                            {"residual_by_degree", by_degree},
                            {"nil_derivation", dn.pass},
                            {"dia_derivation", dd.pass},
                            {"ok", ok}}
                           .dump(2)
                    << "\n";
            } else {
                out << "dim " << x.dim() << " order " << dec_order << " basis " << basis.size()
                    << "\n";
                out << "nil-part terms " << nil_terms.size() << "\n";
                detail::print_terms(out, nil_terms);
                out << "dia-part terms " << dia_terms.size() << "\n";
                detail::print_terms(out, dia_terms);
                out << "reconstruction " << (recon ? "exact" : "MISMATCH") << "\n";
                for (std::size_t d = 0; d < by_degree.size(); ++d)
                    out << "residual degree " << d << " : " << by_degree[d] << "\n";
                out << "derivation nil-part " << (dn.pass ? "pass" : "FAIL") << "\n";
                out << "derivation dia-part " << (dd.pass ? "pass" : "FAIL") << "\n";
                out << (ok ? "ok" : "FAIL") << "\n";
            }
            return ok ? exit_ok : exit_check_failed;
        }

        if (sc_chk->parsed()) {
            Rng rng(chk_seed);
            auto solver = std::make_shared<NilSolver>();
            std::size_t failures = 0;
            json jfail           = json::array();
            auto note_failure    = [&](std::size_t trial, const std::string& detail) {
                ++failures;
                if (structured)
                    jfail.push_back({{"trial", trial}, {"detail", detail}});
                else
                    out << "trial " << trial << " FAIL " << detail << "\n";
            };
            for (std::size_t t = 1; t <= chk_trials; ++t) {
                if (chk_kind == "derivation") {
                    const auto a = random_alphabet(rng, 2, static_cast<std::size_t>(rng.int_in(1, 3)));
                    Letter c = random_letter(rng, 2);
                    if (rng.chance(1, 2)) {
                        auto it = a.begin();
                        std::advance(it, rng.int_in(0, static_cast<int>(a.size()) - 1));
                        c = *it;
                    }
                    const Spectrum lam = random_spectrum(rng, 2);
                    std::set<Letter> ext = a;
                    ext.insert(c);
                    const Mould m  = random_tabulated_mould(rng, ext, chk_maxlen, "M");
                    const Mould n  = random_tabulated_mould(rng, ext, chk_maxlen, "N");
                    const auto ctx = make_variance_context(c, lam, ext);
                    const CheckResult res = check_derivation(
                        [&](const Mould& q) { return var_c(q, ctx); }, m, n, ext, chk_maxlen);
                    if (!res.pass) note_failure(t, res.detail);
                } else if (chk_kind == "nabla") {
                    const auto a = random_alphabet(rng, 2, static_cast<std::size_t>(rng.int_in(1, 3)));
                    const Spectrum lam = random_spectrum(rng, 2);
                    const Mould m      = random_tabulated_mould(rng, a, chk_maxlen, "M");
                    const CheckResult res = check_nabla_decomposition(m, a, lam, chk_maxlen);
                    if (!res.pass) note_failure(t, res.detail);
                } else if (chk_kind == "alternality") {
                    const auto a       = random_alphabet(rng, 2, 2);
                    const Spectrum lam = random_spectrum(rng, 2);
                    const Mould tab =
                        tabulate(nil_mould(solver).with_spectrum(lam), a, chk_maxlen);
                    const AlternalityResult res = is_alternal(tab, a, chk_maxlen);
                    if (!res.alternal)
                        note_failure(t, "shuffle sum " + res.sum.str() + " for " +
                                            to_string(res.counterexample->first) + " and " +
                                            to_string(res.counterexample->second));
                } else {
                    const Spectrum lam = random_spectrum(rng, 2);
                    const auto a       = random_alphabet(rng, 2, 2);
                    Letter c = random_letter(rng, 2);
                    if (rng.chance(1, 2)) {
                        auto it = a.begin();
                        std::advance(it, rng.int_in(0, static_cast<int>(a.size()) - 1));
                        c = *it;
                    }
                    const CheckResult res =
                        functional_equation_check(solver, a, lam, c, chk_maxlen);
                    if (!res.pass) note_failure(t, res.detail);
                }
            }
            const bool ok = failures == 0;
            if (structured)
                out << json{{"kind", chk_kind},
                            {"seed", chk_seed},
                            {"trials", chk_trials},
                            {"maxlen", chk_maxlen},
                            {"failures", jfail},
                            {"ok", ok}}
                           .dump(2)
                    << "\n";
            else
                out << "check " << chk_kind << " trials " << chk_trials << " maxlen "
                    << chk_maxlen << " seed " << chk_seed << " failures " << failures << " "
                    << (ok ? "ok" : "FAIL") << "\n";
            return ok ? exit_ok : exit_check_failed;
        }

        if (sc_orc->parsed()) {
            const PreparedVectorField x = load_field(orc_field);
            const Letter c = parse_flag("--letter", [&] { return parse_letter(orc_letter); });
            detail::check_dim("--letter", c, x.dim());
            HomogeneousOp bc = [&] {
                if (!orc_coeffs.empty()) {
                    auto coeff =
                        parse_flag("--coeffs", [&] { return parse_scalar_list(orc_coeffs); });
                    return HomogeneousOp{c, std::move(coeff)};
                }
                if (auto it = x.ops.find(c); it != x.ops.end()) return it->second;
                std::vector<Scalar> coeff(x.dim());
                std::size_t neg = x.dim();
                for (std::size_t i = 0; i < c.comp.size(); ++i)
                    if (c.comp[i] < 0) neg = i;
                for (std::size_t i = 0; i < coeff.size(); ++i)
                    if (neg == x.dim() || neg == i) coeff[i] = Scalar(1);
                return HomogeneousOp{c, std::move(coeff)};
            }();
            auto solver   = std::make_shared<NilSolver>();
            const Mould m = detail::named_mould(orc_mould, solver);
            const OracleReport rep = variance_oracle(m, x, bc, orc_order);
            if (structured)
                out << json{{"field", orc_field},
                            {"letter", c.str()},
                            {"mould", orc_mould},
                            {"order", orc_order},
                            {"pass", rep.pass},
                            {"mismatches", rep.mismatches},
                            {"detail", rep.detail}}
                           .dump(2)
                    << "\n";
            else {
                out << (rep.pass ? "PASS" : "FAIL") << "\n";
                out << rep.detail << "\n";
            }
            return rep.pass ? exit_ok : exit_check_failed;
        }
    } catch (const parse_error& e) {
        err << e.what() << "\n";
        return exit_parse;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return exit_math;
    }
    err << "no subcommand\n";
    return exit_parse;
}

} // namespace mouldcalc::cli

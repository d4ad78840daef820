#pragma once

#include "mouldcalc/epsjet.hpp"
#include "mouldcalc/nil.hpp"
#include "mouldcalc/variance.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mouldcalc {

/// Exponent vector of a monomial x^m; all entries >= 0.
using Monomial = std::vector<int>;

inline int degree(const Monomial& m) {
    int d = 0;
    for (int e : m) d += e;
    return d;
}

inline std::string to_string(const Monomial& m) {
    std::string s = "x^(";
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(m[i]);
    }
    return s + ")";
}

/// The monomial basis {x^m : |m| <= N} in graded lexicographic order: total
/// degree ascending, then plain lexicographic ascending on the exponent
/// vector.  The order is pinned by a regression test; every matrix in this
/// module is expressed on it, so results are reproducible bit for bit.  A
/// consequence used by the truncation-coherence tests: the basis for a
/// smaller degree bound is a prefix of the basis for a larger one.
class MonomialBasis {
public:
    MonomialBasis(std::size_t dim, int max_degree) : dim_(dim), max_degree_(max_degree) {
        if (dim == 0) throw std::invalid_argument("basis needs dimension >= 1");
        if (max_degree < 0) throw std::invalid_argument("basis needs degree >= 0");
        Monomial m(dim, 0);
        auto rec = [&](auto&& self, std::size_t pos, int left) -> void {
            if (pos + 1 == dim) {
                m[pos] = left;
                items_.push_back(m);
                return;
            }
            for (int e = 0; e <= left; ++e) {
                m[pos] = e;
                self(self, pos + 1, left - e);
            }
        };
        for (int d = 0; d <= max_degree; ++d) rec(rec, 0, d);
        // Enumeration above fixes degree d and lets the exponents vary
        // lexicographically, which is exactly graded lex; sort anyway so the
        // order is defined by the comparator, not the generator.
        std::sort(items_.begin(), items_.end(), [](const Monomial& a, const Monomial& b) {
            if (degree(a) != degree(b)) return degree(a) < degree(b);
            return a < b;
        });
        for (std::size_t i = 0; i < items_.size(); ++i) index_.emplace(items_[i], i);
    }

    std::size_t dim() const { return dim_; }
    int max_degree() const { return max_degree_; }
    std::size_t size() const { return items_.size(); }
    const Monomial& at(std::size_t idx) const { return items_.at(idx); }

    /// Index of m, or nullopt when m is not in the basis (degree beyond the
    /// bound, or a negative exponent).
    std::optional<std::size_t> index(const Monomial& m) const {
        const auto it = index_.find(m);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::size_t dim_;
    int max_degree_;
    std::vector<Monomial> items_;
    std::map<Monomial, std::size_t> index_;
};

/// Dense matrix over an exact ring (Scalar or EpsJet): the representation of
/// every truncated operator in this module.  Row-major; rows index target
/// monomials, columns index sources.
template <class R>
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = R(Scalar(1));
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    R& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const R& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    bool is_zero() const {
        for (const R& x : a_)
            if (!x.is_zero()) return false;
        return true;
    }

    friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
    }

    friend DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
        a.require_same_shape(b);
        DenseMatrix out(a.rows_, a.cols_);
        for (std::size_t k = 0; k < a.a_.size(); ++k) out.a_[k] = a.a_[k] + b.a_[k];
        return out;
    }

    friend DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
        a.require_same_shape(b);
        DenseMatrix out(a.rows_, a.cols_);
        for (std::size_t k = 0; k < a.a_.size(); ++k) out.a_[k] = a.a_[k] - b.a_[k];
        return out;
    }

    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("matrix shape mismatch in product");
        DenseMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const R& aik = a(i, k);
                if (aik.is_zero()) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    const R& bkj = b(k, j);
                    if (!bkj.is_zero()) out(i, j) += aik * bkj;
                }
            }
        return out;
    }

    DenseMatrix scaled(const R& s) const {
        DenseMatrix out(rows_, cols_);
        for (std::size_t k = 0; k < a_.size(); ++k) out.a_[k] = a_[k] * s;
        return out;
    }

private:
    void require_same_shape(const DenseMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("matrix shape mismatch");
    }

    std::size_t rows_ = 0, cols_ = 0;
    std::vector<R> a_;
};

using ScalarMatrix = DenseMatrix<Scalar>;
using JetMatrix    = DenseMatrix<EpsJet>;

namespace detail {

// Coefficients may only sit where the target exponent n + e_i stays
// non-negative; with at most one -1 in n this means a -1 component confines
// the support to that component.
inline void check_op_support(const Letter& n, const std::vector<bool>& nonzero) {
    if (!n.prepared_valid())
        throw std::invalid_argument("letter " + n.str() + " is not prepared-form valid");
    if (nonzero.size() != n.comp.size())
        throw std::invalid_argument("operator coefficient count differs from letter dimension");
    for (std::size_t i = 0; i < nonzero.size(); ++i) {
        if (!nonzero[i]) continue;
        for (std::size_t j = 0; j < n.comp.size(); ++j)
            if (j != i && n.comp[j] < 0)
                throw std::invalid_argument("operator at letter " + n.str() +
                                            " has a coefficient outside its valid support");
    }
}

} // namespace detail

/// A homogeneous first-order operator B_n = sum_i a_i x^{n+e_i} d/dx_i; on
/// monomials, B_n(x^m) = <a, m> x^{n+m}.  Raises degree by |n| >= 1.
struct HomogeneousOp {
    Letter n;
    std::vector<Scalar> coeff;

    HomogeneousOp(Letter letter, std::vector<Scalar> a) : n(std::move(letter)), coeff(std::move(a)) {
        std::vector<bool> nz(coeff.size());
        for (std::size_t i = 0; i < coeff.size(); ++i) nz[i] = !coeff[i].is_zero();
        detail::check_op_support(n, nz);
    }

    std::size_t dim() const { return coeff.size(); }

    bool is_zero() const {
        for (const Scalar& c : coeff)
            if (!c.is_zero()) return false;
        return true;
    }

    /// <a, m>: the eigenfactor of B_n on x^m.
    Scalar pairing(const Monomial& m) const {
        Scalar s;
        for (std::size_t i = 0; i < coeff.size(); ++i)
            if (m[i] != 0 && !coeff[i].is_zero()) s += coeff[i] * Scalar(m[i]);
        return s;
    }
};

/// Same operator shape with jet coefficients a + b*eps; carries the
/// eps-expansion of a conjugated field.
struct EpsHomogeneousOp {
    Letter n;
    std::vector<EpsJet> coeff;

    EpsHomogeneousOp(Letter letter, std::vector<EpsJet> a) : n(std::move(letter)), coeff(std::move(a)) {
        std::vector<bool> nz(coeff.size());
        for (std::size_t i = 0; i < coeff.size(); ++i) nz[i] = !coeff[i].is_zero();
        detail::check_op_support(n, nz);
    }

    std::size_t dim() const { return coeff.size(); }

    bool is_zero() const {
        for (const EpsJet& c : coeff)
            if (!c.is_zero()) return false;
        return true;
    }

    EpsJet pairing(const Monomial& m) const {
        EpsJet s;
        for (std::size_t i = 0; i < coeff.size(); ++i)
            if (m[i] != 0 && !coeff[i].is_zero()) s += coeff[i] * EpsJet{Scalar(m[i]), Scalar(0)};
        return s;
    }
};

/// X = X_lin + sum_{n in A(X)} B_n with X_lin the diagonal part given by the
/// spectrum.  Keys equal their operator's letter; no zero operator stored.
struct PreparedVectorField {
    Spectrum lam;
    std::map<Letter, HomogeneousOp> ops;

    std::size_t dim() const { return lam.lambda.size(); }

    std::set<Letter> alphabet() const {
        std::set<Letter> a;
        for (const auto& [n, b] : ops) a.insert(n);
        return a;
    }
};

inline PreparedVectorField make_field(Spectrum lam, const std::vector<HomogeneousOp>& ops) {
    PreparedVectorField x;
    x.lam = std::move(lam);
    for (const HomogeneousOp& b : ops) {
        if (b.dim() != x.lam.lambda.size())
            throw std::invalid_argument("operator dimension differs from spectrum");
        if (b.is_zero()) continue;
        if (!x.ops.emplace(b.n, b).second)
            throw std::invalid_argument("duplicate operator for letter " + b.n.str());
    }
    return x;
}

/// One monomial term coeff * x^exponents * d/dx_component of a field.
struct FieldTerm {
    std::size_t component = 0;  // 1-based
    Monomial exponents;
    Scalar coeff;
};

/// Groups terms into homogeneous operators: the term c x^m d_i contributes c
/// to coefficient i of B_n with n = m - e_i.  Diagonal linear terms x_i d_i
/// must restate lambda_i and are skipped (the linear part lives in the
/// spectrum); any other letter with |n| < 1 is rejected, which covers
/// off-diagonal linear and constant terms.
inline PreparedVectorField parse_field(const std::vector<FieldTerm>& terms, Spectrum lam) {
    const std::size_t d = lam.lambda.size();
    std::map<Letter, std::vector<Scalar>> acc;
    for (const FieldTerm& t : terms) {
        if (t.component < 1 || t.component > d)
            throw std::invalid_argument("term component index " + std::to_string(t.component) +
                                        " outside 1.." + std::to_string(d));
        if (t.exponents.size() != d)
            throw std::invalid_argument("term exponent vector has wrong dimension");
        for (int e : t.exponents)
            if (e < 0) throw std::invalid_argument("term exponents must be non-negative");
        if (t.coeff.is_zero()) continue;
        Letter n{t.exponents};
        n.comp[t.component - 1] -= 1;
        if (n.degree() < 1) {
            const bool diagonal_linear =
                degree(t.exponents) == 1 && t.exponents[t.component - 1] == 1;
            if (diagonal_linear) {
                if (t.coeff != lam.lambda[t.component - 1])
                    throw std::invalid_argument(
                        "diagonal linear term does not match the spectrum at component " +
                        std::to_string(t.component));
                continue;
            }
            throw std::invalid_argument("term yields letter " + n.str() +
                                        " of degree < 1 (not prepared form)");
        }
        auto [it, fresh] = acc.emplace(n, std::vector<Scalar>(d));
        if (fresh && !n.prepared_valid())
            throw std::invalid_argument("term yields invalid letter " + n.str());
        it->second[t.component - 1] += t.coeff;
    }
    std::vector<HomogeneousOp> ops;
    for (auto& [n, a] : acc) {
        HomogeneousOp b(n, std::move(a));
        if (!b.is_zero()) ops.push_back(std::move(b));
    }
    return make_field(std::move(lam), ops);
}

/// Truncated polynomial as coordinates on a MonomialBasis.
using Polynomial = std::vector<Scalar>;

/// B_n applied to p, dropping monomials past the basis degree bound.
inline Polynomial apply_op(const HomogeneousOp& b, const Polynomial& p, const MonomialBasis& basis) {
    if (p.size() != basis.size()) throw std::invalid_argument("polynomial length != basis size");
    Polynomial out(basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j) {
        if (p[j].is_zero()) continue;
        const Scalar beta = b.pairing(basis.at(j));
        if (beta.is_zero()) continue;
        Monomial target = basis.at(j);
        for (std::size_t i = 0; i < target.size(); ++i) target[i] += b.n.comp[i];
        if (auto idx = basis.index(target)) out[*idx] += beta * p[j];
    }
    return out;
}

namespace detail {

template <class Op, class R>
DenseMatrix<R> op_matrix_impl(const Op& b, const MonomialBasis& basis) {
    if (b.dim() != basis.dim()) throw std::invalid_argument("operator dimension != basis dimension");
    DenseMatrix<R> out(basis.size(), basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j) {
        const R beta = b.pairing(basis.at(j));
        if (beta.is_zero()) continue;
        Monomial target = basis.at(j);
        for (std::size_t i = 0; i < target.size(); ++i) target[i] += b.n.comp[i];
        if (auto idx = basis.index(target)) out(*idx, j) = beta;
    }
    return out;
}

} // namespace detail

inline ScalarMatrix op_matrix(const HomogeneousOp& b, const MonomialBasis& basis) {
    return detail::op_matrix_impl<HomogeneousOp, Scalar>(b, basis);
}

inline JetMatrix op_matrix(const EpsHomogeneousOp& b, const MonomialBasis& basis) {
    return detail::op_matrix_impl<EpsHomogeneousOp, EpsJet>(b, basis);
}

/// Diagonal matrix of X_lin: x^m is an eigenvector with eigenvalue <m, lambda>.
inline ScalarMatrix xlin_matrix(const Spectrum& lam, const MonomialBasis& basis) {
    if (lam.lambda.size() != basis.dim())
        throw std::invalid_argument("spectrum dimension != basis dimension");
    ScalarMatrix out(basis.size(), basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j) {
        const Monomial& m = basis.at(j);
        Scalar w;
        for (std::size_t i = 0; i < m.size(); ++i)
            if (m[i] != 0) w += lam.lambda[i] * Scalar(m[i]);
        out(j, j) = w;
    }
    return out;
}

/// Full matrix of X = X_lin + sum B_n.
inline ScalarMatrix field_matrix(const PreparedVectorField& x, const MonomialBasis& basis) {
    ScalarMatrix out = xlin_matrix(x.lam, basis);
    for (const auto& [n, b] : x.ops) out = out + op_matrix(b, basis);
    return out;
}

/// Composition along a word: the first letter acts first, so as matrices
/// B_w = M_{B_{w_r}} * ... * M_{B_{w_1}}.  The empty word is the identity.
/// A regression test pins this orientation; reversing it silently breaks the
/// variance comparison downstream.
inline ScalarMatrix compose_word(const std::map<Letter, HomogeneousOp>& ops, const Word& w,
                                 const MonomialBasis& basis) {
    ScalarMatrix acc = ScalarMatrix::identity(basis.size());
    for (std::size_t i = 1; i <= w.length(); ++i) {
        const auto it = ops.find(w.at(i));
        if (it == ops.end())
            throw std::invalid_argument("word letter " + w.at(i).str() + " has no operator");
        acc = op_matrix(it->second, basis) * acc;
    }
    return acc;
}

inline ScalarMatrix compose_word(const PreparedVectorField& x, const Word& w,
                                 const MonomialBasis& basis) {
    return compose_word(x.ops, w, basis);
}

/// Bracket in word-composition order: the left operand acts first, i.e.
/// lie_bracket(P, Q) = mat(Q) mat(P) - mat(P) mat(Q).  With this orientation
/// lie_bracket(B_c, X_lin) = omega(c) B_c on the truncated algebra, and
/// lie_bracket(B_w, X_lin) scales B_w by the word's total weight.
template <class R>
DenseMatrix<R> lie_bracket(const DenseMatrix<R>& p, const DenseMatrix<R>& q) {
    return q * p - p * q;
}

namespace detail {

// Shared depth-first walk for the mould-action sums.  Per start column the
// walk extends the word letter by letter, carrying the product of pairing
// factors; a chain dies as soon as its factor vanishes or its degree leaves
// the basis, so the mould is only evaluated on words whose operator chain
// actually contributes.  Letters raise degree by >= 1, which bounds the word
// length and makes the sum finite and exact at the truncation.
template <class Op, class R, class Emit>
void act_walk(const std::map<Letter, Op>& ops, const MonomialBasis& basis, std::size_t col,
              const Emit& emit) {
    std::vector<Letter> path;
    auto rec = [&](auto&& self, const Monomial& mono, std::size_t idx, const R& chain) -> void {
        for (const auto& [n, b] : ops) {
            const R beta = b.pairing(mono);
            if (beta.is_zero()) continue;
            const R next = beta * chain;
            if (next.is_zero()) continue;
            Monomial target = mono;
            for (std::size_t i = 0; i < target.size(); ++i) target[i] += n.comp[i];
            const auto tidx = basis.index(target);
            if (!tidx) continue;  // degree bound passed; extensions only grow
            path.push_back(n);
            emit(Word(path), *tidx, next);
            self(self, target, *tidx, next);
            path.pop_back();
        }
    };
    rec(rec, basis.at(col), col, R(Scalar(1)));
}

} // namespace detail

/// Act of a mould on a family of operators:
///   sum over words w of A^* with l(w) <= N of  M^w * B_w,
/// including the empty word as M^{empty} * Id.  Exact: words longer than the
/// degree budget have zero matrix.  Mould values are cached per word across
/// columns; singular evaluations only trigger for words whose chains survive.
inline ScalarMatrix act(const Mould& m, const std::map<Letter, HomogeneousOp>& ops,
                        const MonomialBasis& basis) {
    ScalarMatrix out(basis.size(), basis.size());
    std::map<Word, Scalar> cache;
    auto value = [&](const Word& w) -> const Scalar& {
        auto it = cache.find(w);
        if (it == cache.end()) it = cache.emplace(w, m(w)).first;
        return it->second;
    };
    const Scalar empty_val = m(Word{});
    for (std::size_t col = 0; col < basis.size(); ++col) {
        if (!empty_val.is_zero()) out(col, col) += empty_val;
        detail::act_walk<HomogeneousOp, Scalar>(
            ops, basis, col, [&](const Word& w, std::size_t row, const Scalar& chain) {
                const Scalar& mv = value(w);
                if (!mv.is_zero()) out(row, col) += mv * chain;
            });
    }
    return out;
}

/// Field overload: a universal mould without a spectrum is evaluated over the
/// field's weights.
inline ScalarMatrix act(const Mould& m, const PreparedVectorField& x, const MonomialBasis& basis) {
    if (m.is_universal() && !m.spectrum()) return act(m.with_spectrum(x.lam), x.ops, basis);
    return act(m, x.ops, basis);
}

/// A conjugated field over jet coefficients; eps^2 is identically zero.
struct EpsField {
    Spectrum lam;
    std::map<Letter, EpsHomogeneousOp> ops;
};

/// The eps-coefficient of the act sum over a jet field: chains carry jet
/// factors, and a word contributes M^w * (eps part of its chain).  The mould
/// is never evaluated for chains whose eps part vanishes.
inline ScalarMatrix act_eps_part(const Mould& m, const std::map<Letter, EpsHomogeneousOp>& ops,
                                 const MonomialBasis& basis) {
    ScalarMatrix out(basis.size(), basis.size());
    std::map<Word, Scalar> cache;
    auto value = [&](const Word& w) -> const Scalar& {
        auto it = cache.find(w);
        if (it == cache.end()) it = cache.emplace(w, m(w)).first;
        return it->second;
    };
    for (std::size_t col = 0; col < basis.size(); ++col) {
        detail::act_walk<EpsHomogeneousOp, EpsJet>(
            ops, basis, col, [&](const Word& w, std::size_t row, const EpsJet& chain) {
                if (chain.d.is_zero()) return;
                const Scalar& mv = value(w);
                if (!mv.is_zero()) out(row, col) += mv * chain.d;
            });
    }
    return out;
}

/// Conjugation by exp(eps B_c) at eps^2 = 0: X_eps = X + eps [B_c, X],
/// regrouped by letter.
///   - at c: the pure-eps operator omega(c) B_c (merged into an existing B_c);
///   - at c + m for m in A(X): eps [B_c, B_m], a homogeneous operator with
///     coefficient vector <a_m, c> a_c - <a_c, m> a_m (it vanishes whenever
///     c + m would be an invalid letter, so the regrouping is total);
///   - letters whose operator is 0 + 0 eps are pruned.
/// When c is already in A(X) the supplied B_c must be the field's own
/// operator.
inline EpsField eps_conjugate(const PreparedVectorField& x, const HomogeneousOp& bc) {
    const std::size_t d = x.dim();
    if (bc.dim() != d) throw std::invalid_argument("B_c dimension differs from the field");
    if (auto it = x.ops.find(bc.n); it != x.ops.end() && !(it->second.coeff == bc.coeff))
        throw std::invalid_argument("letter " + bc.n.str() +
                                    " is in the alphabet with a different operator");

    auto letter_pairing = [](const std::vector<Scalar>& a, const Letter& n) {
        Scalar s;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (n.comp[i] != 0 && !a[i].is_zero()) s += a[i] * Scalar(n.comp[i]);
        return s;
    };

    std::map<Letter, std::vector<EpsJet>> acc;
    auto add_val = [&](const Letter& n, const std::vector<Scalar>& a) {
        auto [it, fresh] = acc.emplace(n, std::vector<EpsJet>(d));
        for (std::size_t i = 0; i < d; ++i) it->second[i].val += a[i];
    };
    auto add_eps = [&](const Letter& n, const std::vector<Scalar>& a) {
        auto [it, fresh] = acc.emplace(n, std::vector<EpsJet>(d));
        for (std::size_t i = 0; i < d; ++i) it->second[i].d += a[i];
    };

    for (const auto& [n, b] : x.ops) add_val(n, b.coeff);

    const Scalar wc = weight(bc.n, x.lam);
    if (!wc.is_zero()) {
        std::vector<Scalar> scaled(d);
        for (std::size_t i = 0; i < d; ++i) scaled[i] = wc * bc.coeff[i];
        add_eps(bc.n, scaled);
    }

    for (const auto& [n, b] : x.ops) {
        const Scalar amc = letter_pairing(b.coeff, bc.n);   // <a_m, c>
        const Scalar acm = letter_pairing(bc.coeff, n);     // <a_c, m>
        std::vector<Scalar> v(d);
        bool any = false;
        for (std::size_t i = 0; i < d; ++i) {
            v[i] = amc * bc.coeff[i] - acm * b.coeff[i];
            any = any || !v[i].is_zero();
        }
        if (any) add_eps(bc.n + n, v);
    }

    EpsField out;
    out.lam = x.lam;
    for (auto& [n, a] : acc) {
        EpsHomogeneousOp op(n, std::move(a));
        if (!op.is_zero()) out.ops.emplace(n, std::move(op));
    }
    return out;
}

struct OracleReport {
    bool pass = true;
    std::size_t mismatches = 0;
    std::string detail;
};

/// Brute-force comparison of the two sides of the variance statement at
/// truncation degree N, by disjoint code paths:
///   LHS: conjugate X by exp(eps B_c) with jet arithmetic and take the
///        eps-coefficient of the mould action over the conjugated field;
///   RHS: act of Var_c(M) (variance over the base alphabet A(X), so a c
///        outside the alphabet kills words with repeated c) on the operators
///        of X extended by B_c.
/// M must be universal: the conjugated alphabet contains letters outside any
/// finite table.
inline OracleReport variance_oracle(const Mould& m, const PreparedVectorField& x,
                                    const HomogeneousOp& bc, int max_degree) {
    if (!m.is_universal())
        throw std::invalid_argument("the variance comparison needs a universal mould");
    const Mould mm = m.with_spectrum(x.lam);
    const MonomialBasis basis(x.dim(), max_degree);

    const EpsField eps    = eps_conjugate(x, bc);
    const ScalarMatrix lhs = act_eps_part(mm, eps.ops, basis);

    const VarianceContext ctx = make_variance_context(bc.n, x.lam, x.alphabet());
    const Mould vm            = var_c(mm, ctx);
    std::map<Letter, HomogeneousOp> ops = x.ops;
    ops.emplace(bc.n, bc);  // no-op when c is in A(X); equality was enforced
    const ScalarMatrix rhs = act(vm, ops, basis);

    OracleReport rep;
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = 0; j < basis.size(); ++j)
            if (lhs(i, j) != rhs(i, j)) {
                ++rep.mismatches;
                if (rep.pass) {
                    rep.pass   = false;
                    rep.detail = "first mismatch at entry (" + to_string(basis.at(i)) + " <- " +
                                 to_string(basis.at(j)) + "): conjugation side " +
                                 lhs(i, j).str() + ", variance side " + rhs(i, j).str();
                }
            }
    if (rep.pass)
        rep.detail = "conjugation side and variance side agree on all " +
                     std::to_string(basis.size() * basis.size()) + " entries";
    return rep;
}

/// act with the Nil mould over the field's weights.
inline ScalarMatrix nil_part(const PreparedVectorField& x, const std::shared_ptr<NilSolver>& solver,
                             const MonomialBasis& basis) {
    return act(nil_mould(solver).with_spectrum(x.lam), x.ops, basis);
}

/// act with the Dia mould plus the X_lin matrix: the diagonalizable part
/// carries the linear part, so nil_part + dia_part is the field's matrix.
inline ScalarMatrix dia_part(const PreparedVectorField& x, const std::shared_ptr<NilSolver>& solver,
                             const MonomialBasis& basis) {
    return act(dia_mould(solver).with_spectrum(x.lam), x.ops, basis) + xlin_matrix(x.lam, basis);
}

/// exp(theta)(Y) = sum_r ad_theta^r(Y) / r! with ad_theta(Y) = lie_bracket(Y,
/// theta).  max_terms < 0 runs until the term vanishes, which happens for
/// every strictly degree-raising theta; a non-nilpotent theta then raises.
inline ScalarMatrix exp_ad(const ScalarMatrix& theta, const ScalarMatrix& y, int max_terms = -1) {
    ScalarMatrix acc  = y;
    ScalarMatrix term = y;
    const int cap = max_terms >= 0 ? max_terms : static_cast<int>(y.rows()) + 2;
    for (int r = 1; r <= cap; ++r) {
        term = lie_bracket(term, theta).scaled(Scalar(Rational(1, r)));
        if (term.is_zero()) return acc;
        acc = acc + term;
    }
    if (max_terms < 0)
        throw std::invalid_argument("Lie series did not terminate; theta is not nilpotent");
    return acc;
}

/// Truncated Leibniz check: P(x^a x^b) = P(x^a) x^b + x^a P(x^b) for all
/// monomial pairs with |a| + |b| within the basis bound; products past the
/// bound are dropped on both sides, which keeps the test exact for
/// first-order operators.
inline CheckResult is_derivation(const ScalarMatrix& p, const MonomialBasis& basis) {
    if (p.rows() != basis.size() || p.cols() != basis.size())
        throw std::invalid_argument("matrix does not match the basis");
    auto shifted_column = [&](std::size_t col, const Monomial& by) {
        std::vector<Scalar> out(basis.size());
        for (std::size_t u = 0; u < basis.size(); ++u) {
            if (p(u, col).is_zero()) continue;
            Monomial t = basis.at(u);
            for (std::size_t i = 0; i < t.size(); ++i) t[i] += by[i];
            if (auto idx = basis.index(t)) out[*idx] += p(u, col);
        }
        return out;
    };
    for (std::size_t a = 0; a < basis.size(); ++a) {
        for (std::size_t b = a; b < basis.size(); ++b) {
            const Monomial& ma = basis.at(a);
            const Monomial& mb = basis.at(b);
            if (degree(ma) + degree(mb) > basis.max_degree()) continue;
            Monomial mab = ma;
            for (std::size_t i = 0; i < mab.size(); ++i) mab[i] += mb[i];
            const std::size_t ab = *basis.index(mab);
            const auto lhs_col   = shifted_column(a, mb);
            const auto rhs_col   = shifted_column(b, ma);
            for (std::size_t u = 0; u < basis.size(); ++u) {
                const Scalar rhs = lhs_col[u] + rhs_col[u];
                if (p(u, ab) != rhs)
                    return {false, "Leibniz fails on " + to_string(ma) + " * " + to_string(mb) +
                                       " at " + to_string(basis.at(u)) + ": P(fg) has " +
                                       p(u, ab).str() + ", P(f)g + fP(g) has " + rhs.str()};
            }
        }
    }
    return {true, "Leibniz holds on all monomial pairs within the degree bound"};
}

} // namespace mouldcalc

// expr.hpp — operator expressions over the shifts of one system.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary ('*' unary)*
//   unary   := '-' unary | postfix
//   postfix := primary '~'*
//   primary := 'S' n '[' fvec ']' | 'Q' n | 'R' n | 'Rp' n | 'I'
//            | number | '(' number ('+'|'-') [number] 'i' ')' | '(' expr ')'
//   fvec    := fterm (('+' | '-') fterm)*
//   fterm   := [scalar '*'] label
//
// '~' is the adjoint. Offsets in diagnostics are 1-based character positions.

#pragma once

#include "subprod/fock.hpp"

#include <charconv>
#include <cctype>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace subprod {

class ParseError : public std::invalid_argument {
public:
    ParseError(std::size_t offset, const std::string& msg)
        : std::invalid_argument("parse error at offset " + std::to_string(offset) + ": " + msg), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { shift, Q, R, Rp, identity, scalar, adjoint, neg, add, sub, mul };
    Kind kind = Kind::identity;
    int level = 0;
    std::vector<std::pair<cplx, std::string>> fvec;  // shift argument: coefficient, fiber label
    cplx value{0.0, 0.0};                            // scalar literal
    ExprPtr lhs, rhs;                                // rhs unused for unary nodes
    std::set<int> degrees;
};

namespace detail {

inline std::set<int> sum_degrees(const std::set<int>& a, const std::set<int>& b) {
    std::set<int> out;
    for (int i : a)
        for (int j : b) out.insert(i + j);
    return out;
}

}  // namespace detail

inline ExprPtr make_leaf(Expr::Kind k, int level = 0) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->level = level;
    e->degrees = {0};
    return e;
}
inline ExprPtr make_shift(int level, std::vector<std::pair<cplx, std::string>> fvec) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::shift;
    e->level = level;
    e->fvec = std::move(fvec);
    e->degrees = {level};
    return e;
}
inline ExprPtr make_scalar(cplx v) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::scalar;
    e->value = v;
    e->degrees = {0};
    return e;
}
inline ExprPtr make_unary(Expr::Kind k, ExprPtr a) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    if (k == Expr::Kind::adjoint)
        for (int d : a->degrees) e->degrees.insert(-d);
    else
        e->degrees = a->degrees;
    e->lhs = std::move(a);
    return e;
}
inline ExprPtr make_binary(Expr::Kind k, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    if (k == Expr::Kind::mul) {
        e->degrees = detail::sum_degrees(a->degrees, b->degrees);
    } else {
        e->degrees = a->degrees;
        e->degrees.insert(b->degrees.begin(), b->degrees.end());
    }
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

inline bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.level != b.level || a.value != b.value || a.fvec != b.fvec) return false;
    if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs) || static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs))
        return false;
    if (a.lhs && !structurally_equal(*a.lhs, *b.lhs)) return false;
    if (a.rhs && !structurally_equal(*a.rhs, *b.rhs)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_complex(cplx z) {
    std::string s = "(" + format_double(z.real());
    s += std::signbit(z.imag()) ? "-" : "+";
    s += format_double(std::abs(z.imag())) + "i)";
    return s;
}

namespace detail {

inline int precedence(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::add:
        case Expr::Kind::sub: return 1;
        case Expr::Kind::mul: return 2;
        case Expr::Kind::neg: return 3;
        case Expr::Kind::adjoint: return 4;
        default: return 5;
    }
}

inline std::string print_at(const Expr& e, int min_prec);

inline std::string print_node(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::shift: {
            std::string s = "S" + std::to_string(e.level) + "[";
            for (std::size_t i = 0; i < e.fvec.size(); ++i) {
                if (i) s += " + ";
                const auto& [c, label] = e.fvec[i];
                if (c != cplx(1.0, 0.0)) s += format_complex(c) + "*";
                s += label;
            }
            return s + "]";
        }
        case Expr::Kind::Q: return "Q" + std::to_string(e.level);
        case Expr::Kind::R: return "R" + std::to_string(e.level);
        case Expr::Kind::Rp: return "Rp" + std::to_string(e.level);
        case Expr::Kind::identity: return "I";
        case Expr::Kind::scalar: return format_complex(e.value);
        case Expr::Kind::adjoint: return print_at(*e.lhs, 4) + "~";
        case Expr::Kind::neg: return "-" + print_at(*e.lhs, 3);
        case Expr::Kind::add: return print_at(*e.lhs, 1) + " + " + print_at(*e.rhs, 2);
        case Expr::Kind::sub: return print_at(*e.lhs, 1) + " - " + print_at(*e.rhs, 2);
        case Expr::Kind::mul: return print_at(*e.lhs, 2) + "*" + print_at(*e.rhs, 3);
    }
    return "?";
}

inline std::string print_at(const Expr& e, int min_prec) {
    const std::string s = print_node(e);
    return precedence(e) < min_prec ? "(" + s + ")" : s;
}

}  // namespace detail

inline std::string print_expr(const Expr& e) { return detail::print_at(e, 0); }

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class ExprParser {
public:
    ExprParser(std::string_view text, const SubproductSystem& X) : s_(text), X_(X) {}

    ExprPtr parse() {
        skip();
        if (pos_ == s_.size()) fail("empty expression");
        ExprPtr e = expr();
        skip();
        if (pos_ != s_.size()) {
            if (s_[pos_] == ')') fail("unbalanced ')'");
            fail(std::string("unexpected '") + s_[pos_] + "'");
        }
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_ + 1, msg); }
    [[noreturn]] void fail_at(std::size_t p, const std::string& msg) const { throw ParseError(p + 1, msg); }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool peek(char c) {
        skip();
        return pos_ < s_.size() && s_[pos_] == c;
    }
    bool accept(char c) {
        if (peek(c)) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= s_.size()) fail(std::string("expected '") + c + "' before end of input");
            fail(std::string("expected '") + c + "', found '" + s_[pos_] + "'");
        }
    }

    ExprPtr expr() {
        ExprPtr e = term();
        for (;;) {
            if (accept('+'))
                e = make_binary(Expr::Kind::add, e, term());
            else if (accept('-'))
                e = make_binary(Expr::Kind::sub, e, term());
            else
                return e;
        }
    }
    ExprPtr term() {
        ExprPtr e = unary();
        while (accept('*')) e = make_binary(Expr::Kind::mul, e, unary());
        return e;
    }
    ExprPtr unary() {
        if (accept('-')) return make_unary(Expr::Kind::neg, unary());
        return postfix();
    }
    ExprPtr postfix() {
        ExprPtr e = primary();
        while (accept('~')) e = make_unary(Expr::Kind::adjoint, e);
        return e;
    }

    std::optional<double> number_at(std::size_t& p) const {
        std::size_t q = p;
        while (q < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[q])) || s_[q] == '.')) ++q;
        if (q == p) return std::nullopt;
        if (q < s_.size() && (s_[q] == 'e' || s_[q] == 'E')) {
            std::size_t r = q + 1;
            if (r < s_.size() && (s_[r] == '+' || s_[r] == '-')) ++r;
            if (r < s_.size() && std::isdigit(static_cast<unsigned char>(s_[r]))) {
                while (r < s_.size() && std::isdigit(static_cast<unsigned char>(s_[r]))) ++r;
                q = r;
            }
        }
        double v = 0;
        auto res = std::from_chars(s_.data() + p, s_.data() + q, v);
        if (res.ec != std::errc() || res.ptr != s_.data() + q) return std::nullopt;
        p = q;
        return v;
    }

    /// Signed number with optional leading '-', skipping inner whitespace.
    std::optional<double> signed_number_at(std::size_t& p) const {
        std::size_t q = p;
        auto ws = [&] {
            while (q < s_.size() && std::isspace(static_cast<unsigned char>(s_[q]))) ++q;
        };
        ws();
        double sign = 1;
        if (q < s_.size() && s_[q] == '-') {
            sign = -1;
            ++q;
            ws();
        }
        auto v = number_at(q);
        if (!v) return std::nullopt;
        p = q;
        return sign * *v;
    }

    /// Complex literal "(a+bi)" / "(a-bi)" starting at '('; nullopt if the text
    /// is not one (it is then parsed as a parenthesized expression).
    std::optional<cplx> complex_literal() {
        skip();
        if (pos_ >= s_.size() || s_[pos_] != '(') return std::nullopt;
        std::size_t p = pos_ + 1;
        auto ws = [&] {
            while (p < s_.size() && std::isspace(static_cast<unsigned char>(s_[p]))) ++p;
        };
        auto re = signed_number_at(p);
        if (!re) return std::nullopt;
        ws();
        if (p >= s_.size() || (s_[p] != '+' && s_[p] != '-')) return std::nullopt;
        const double sign = s_[p] == '-' ? -1.0 : 1.0;
        ++p;
        ws();
        double im = 1.0;
        if (auto v = number_at(p)) im = *v;
        ws();
        if (p >= s_.size() || s_[p] != 'i') return std::nullopt;
        ++p;
        ws();
        if (p >= s_.size() || s_[p] != ')') return std::nullopt;
        pos_ = p + 1;
        return cplx(*re, sign * im);
    }

    int level_number(const char* what) {
        const std::size_t start = pos_;
        std::size_t q = pos_;
        while (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) ++q;
        if (q == pos_) fail(std::string("expected a level after '") + what + "'");
        int n = 0;
        std::from_chars(s_.data() + pos_, s_.data() + q, n);
        pos_ = q;
        if (n > X_.N) fail_at(start, std::string(what) + std::to_string(n) + ": level exceeds N = " + std::to_string(X_.N));
        return n;
    }

    std::string identifier() {
        skip();
        std::size_t q = pos_;
        while (q < s_.size() && std::isalnum(static_cast<unsigned char>(s_[q]))) ++q;
        std::string id(s_.substr(pos_, q - pos_));
        pos_ = q;
        return id;
    }

    std::pair<cplx, std::string> fterm(int level, double sign) {
        skip();
        cplx coef(1.0, 0.0);
        bool have_coef = false;
        if (auto z = complex_literal()) {
            coef = *z;
            have_coef = true;
        } else {
            std::size_t p = pos_;
            if (auto v = number_at(p)) {
                // a bare number is a label only if the fiber has such a label ("1" at level 0)
                std::size_t after = p;
                while (after < s_.size() && std::isspace(static_cast<unsigned char>(s_[after]))) ++after;
                const bool starred = after < s_.size() && s_[after] == '*';
                if (!starred) {
                    std::string label(s_.substr(pos_, p - pos_));
                    if (X_.fiber_index(level, label)) {
                        pos_ = p;
                        return {cplx(sign, 0.0), label};
                    }
                }
                coef = *v;
                have_coef = true;
                pos_ = p;
            }
        }
        if (have_coef) expect('*');
        skip();
        const std::size_t lstart = pos_;
        const std::string label = identifier();
        if (label.empty()) {
            if (pos_ >= s_.size()) fail("expected a fiber label before end of input");
            fail(std::string("expected a fiber label, found '") + s_[pos_] + "'");
        }
        if (!X_.fiber_index(level, label))
            fail_at(lstart, "unknown fiber label '" + label + "' at level " + std::to_string(level));
        return {coef * sign, label};
    }

    ExprPtr primary() {
        skip();
        if (pos_ >= s_.size()) fail("expected an operand before end of input");
        const char c = s_[pos_];
        if (c == '~') fail("adjoint '~' has no operand");
        if (c == ')') fail("unbalanced ')'");
        if (c == '(') {
            if (auto z = complex_literal()) return make_scalar(*z);
            const std::size_t open = pos_;
            ++pos_;
            ExprPtr e = expr();
            skip();
            if (pos_ >= s_.size()) fail_at(open, "unbalanced '('");
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t p = pos_;
            auto v = number_at(p);
            if (!v) fail("malformed number");
            pos_ = p;
            return make_scalar(cplx(*v, 0.0));
        }
        if (c == 'S') {
            ++pos_;
            const int n = level_number("S");
            expect('[');
            std::vector<std::pair<cplx, std::string>> fv;
            fv.push_back(fterm(n, 1.0));
            for (;;) {
                if (accept('+'))
                    fv.push_back(fterm(n, 1.0));
                else if (accept('-'))
                    fv.push_back(fterm(n, -1.0));
                else
                    break;
            }
            expect(']');
            return make_shift(n, std::move(fv));
        }
        if (c == 'R' && pos_ + 1 < s_.size() && s_[pos_ + 1] == 'p') {
            pos_ += 2;
            return make_leaf(Expr::Kind::Rp, level_number("Rp"));
        }
        if (c == 'R') {
            ++pos_;
            return make_leaf(Expr::Kind::R, level_number("R"));
        }
        if (c == 'Q') {
            ++pos_;
            return make_leaf(Expr::Kind::Q, level_number("Q"));
        }
        if (c == 'I') {
            ++pos_;
            if (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) fail("unknown identifier after 'I'");
            return make_leaf(Expr::Kind::identity);
        }
        fail(std::string("unexpected '") + c + "'");
    }

    std::string_view s_;
    const SubproductSystem& X_;
    std::size_t pos_ = 0;
};

inline ExprPtr parse_expr(std::string_view text, const SubproductSystem& X) { return ExprParser(text, X).parse(); }

// ---------------------------------------------------------------------------
// Evaluation on the truncated Fock space
// ---------------------------------------------------------------------------

inline CVector fiber_vector(const SubproductSystem& X, int level, const std::vector<std::pair<cplx, std::string>>& fvec) {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(X.fiber_dim(level)));
    for (const auto& [c, label] : fvec) {
        auto idx = X.fiber_index(level, label);
        if (!idx) throw std::invalid_argument("unknown fiber label '" + label + "'");
        v(static_cast<Eigen::Index>(*idx)) += c;
    }
    return v;
}

inline FockOperator evaluate(const Expr& e, const FockPtr& f) {
    switch (e.kind) {
        case Expr::Kind::shift: return shift(f, e.level, fiber_vector(f->system, e.level, e.fvec));
        case Expr::Kind::Q: return level_projection(f, e.level);
        case Expr::Kind::R: return partial_projection(f, e.level);
        case Expr::Kind::Rp: return tail_projection(f, e.level);
        case Expr::Kind::identity: return FockOperator::identity(f);
        case Expr::Kind::scalar: return FockOperator::identity(f) * e.value;
        case Expr::Kind::adjoint: return evaluate(*e.lhs, f).adjoint();
        case Expr::Kind::neg: return evaluate(*e.lhs, f) * cplx(-1.0, 0.0);
        case Expr::Kind::add: return evaluate(*e.lhs, f) + evaluate(*e.rhs, f);
        case Expr::Kind::sub: return evaluate(*e.lhs, f) - evaluate(*e.rhs, f);
        case Expr::Kind::mul: return evaluate(*e.lhs, f) * evaluate(*e.rhs, f);
    }
    throw std::logic_error("evaluate: unknown node");
}

}  // namespace subprod

#pragma once

// The seven generating equations of the synthetic dataset. Each is a small
// polynomial over the three variables a, b, c; the label of an instance is
// the index of the equation that produced its result.
//
// Expressions use a restricted grammar:
//
//   expr   := [sign] term (sign term)*
//   term   := factor (('*' | '·') factor)*
//   factor := number | var ['^2']
//   var    := 'a' | 'b' | 'c'
//   sign   := '+' | '-' | '−'
//
// Numbers are nonnegative decimal literals. Nothing else is accepted.

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ldist/error.hpp"
#include "ldist/trace.hpp"

namespace ldist {

inline constexpr std::size_t kNumEquations = 7;

class Equation {
public:
    Equation() = default;

    static Equation parse(std::string_view text) {
        Equation eq;
        eq.text_ = std::string(text);
        Parser p{text};
        eq.terms_ = p.expression();
        if (eq.terms_.empty()) throw ValidationError("empty equation");
        return eq;
    }

    const std::string& text() const noexcept { return text_; }

    double operator()(double a, double b, double c) const {
        const std::array<double, 3> vars{a, b, c};
        double sum = 0.0;
        for (const auto& t : terms_) {
            double prod = t.coefficient;
            for (const auto& f : t.factors) {
                const double v = vars[f.var];
                prod *= f.squared ? v * v : v;
            }
            sum += t.negated ? -prod : prod;
        }
        return sum;
    }

private:
    struct Factor {
        int var;
        bool squared;
    };
    struct Term {
        bool negated = false;
        double coefficient = 1.0;
        std::vector<Factor> factors;
    };

    struct Parser {
        std::string_view s;
        std::size_t pos = 0;

        [[noreturn]] void fail(const std::string& msg) const {
            throw ValidationError("equation '" + std::string(s) + "': " + msg + " at offset " +
                                  std::to_string(pos));
        }
        void skip_ws() {
            while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
        }
        bool eat(std::string_view tok) {
            skip_ws();
            if (s.substr(pos, tok.size()) == tok) {
                pos += tok.size();
                return true;
            }
            return false;
        }
        // Returns +1 / -1 for a sign token, 0 if none.
        int sign() {
            if (eat("+")) return 1;
            if (eat("-") || eat("−")) return -1;
            return 0;
        }

        std::vector<Term> expression() {
            std::vector<Term> terms;
            int sg = sign();
            terms.push_back(term(sg < 0));
            while (true) {
                skip_ws();
                if (pos == s.size()) break;
                sg = sign();
                if (sg == 0) fail("expected '+' or '-'");
                terms.push_back(term(sg < 0));
            }
            return terms;
        }

        Term term(bool negated) {
            Term t;
            t.negated = negated;
            factor(t);
            while (eat("*") || eat("·")) factor(t);
            if (!std::isfinite(t.coefficient)) fail("non-finite coefficient");
            return t;
        }

        void factor(Term& t) {
            skip_ws();
            if (pos == s.size()) fail("unexpected end");
            const char ch = s[pos];
            if (ch == 'a' || ch == 'b' || ch == 'c') {
                ++pos;
                bool squared = false;
                if (eat("^")) {
                    if (!eat("2")) fail("only ^2 is supported");
                    squared = true;
                }
                t.factors.push_back({ch - 'a', squared});
                return;
            }
            if ((ch >= '0' && ch <= '9') || ch == '.') {
                double v = 0.0;
                const char* first = s.data() + pos;
                const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v,
                                                       std::chars_format::fixed);
                if (ec != std::errc()) fail("bad number");
                pos += static_cast<std::size_t>(ptr - first);
                t.coefficient *= v;
                return;
            }
            fail(std::string("unexpected character '") + ch + "'");
        }
    };

    std::string text_;
    std::vector<Term> terms_;
};

using EquationSet = std::array<Equation, kNumEquations>;

/// Default generators: seven low-degree forms, each shifted by 40 * label so
/// the result feature carries most of the class signal.
inline const std::array<std::string_view, kNumEquations> kDefaultEquationTexts{
    "a + b + c",
    "a*b + c + 40",
    "a - b*c + 80",
    "a*b*c + 120",
    "a^2 + b*c + 160",
    "a + b^2 - c + 200",
    "a*c - b + 240",
};

inline EquationSet parse_equation_set(const std::vector<std::string>& texts) {
    if (texts.size() != kNumEquations)
        throw ValidationError("expected exactly 7 equations, got " + std::to_string(texts.size()));
    EquationSet set;
    for (std::size_t k = 0; k < kNumEquations; ++k) set[k] = Equation::parse(texts[k]);

    // Pairwise distinctness, witnessed on a fixed grid of input triples.
    static constexpr std::array<double, 5> grid{-2.5, -1.0, 0.5, 1.5, 3.0};
    for (std::size_t i = 0; i < kNumEquations; ++i) {
        for (std::size_t j = i + 1; j < kNumEquations; ++j) {
            bool differ = false;
            for (double a : grid)
                for (double b : grid)
                    for (double c : grid)
                        differ = differ || set[i](a, b, c) != set[j](a, b, c);
            if (!differ)
                throw ValidationError("equations " + std::to_string(i) + " and " +
                                      std::to_string(j) + " are the same function");
        }
    }
    return set;
}

inline const EquationSet& default_equations() {
    static const EquationSet set = [] {
        std::vector<std::string> texts(kDefaultEquationTexts.begin(), kDefaultEquationTexts.end());
        return parse_equation_set(texts);
    }();
    return set;
}

inline double evaluate_equation(const EquationSet& set, Label id, double a, double b, double c) {
    if (id >= kNumEquations) throw ValidationError("equation id " + std::to_string(id) + " out of range [0,6]");
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c))
        throw ValidationError("equation inputs must be finite");
    return set[id](a, b, c);
}

inline double evaluate_equation(Label id, double a, double b, double c) {
    return evaluate_equation(default_equations(), id, a, b, c);
}

}  // namespace ldist

#include "ewd/terms.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "ewd/errors.hpp"

namespace ewd {
namespace {

double transform_value(FactorTransform t, double x) {
    switch (t) {
        case FactorTransform::Identity: return x;
        case FactorTransform::Log1p: return std::log1p(x);
    }
    return x;
}

double transform_derivative(FactorTransform t, double x) {
    switch (t) {
        case FactorTransform::Identity: return 1.0;
        case FactorTransform::Log1p: return 1.0 / (1.0 + x);
    }
    return 1.0;
}

double ipow(double base, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

}  // namespace

double Predictor::eval(std::span<const double> x) const {
    double sum = 0.0;
    for (const Term& t : terms) {
        double prod = t.coeff;
        for (const TermFactor& f : t.factors) {
            if (static_cast<std::size_t>(f.factor) >= x.size())
                throw DimensionMismatch("predictor references factor beyond point dimension");
            prod *= ipow(transform_value(f.transform, x[f.factor]), f.exponent);
        }
        sum += prod;
    }
    return sum;
}

double Predictor::partial(std::span<const double> x, std::size_t j) const {
    double sum = 0.0;
    for (const Term& t : terms) {
        // product rule over the factors that involve x_j
        for (std::size_t target = 0; target < t.factors.size(); ++target) {
            const TermFactor& f = t.factors[target];
            if (static_cast<std::size_t>(f.factor) != j) continue;
            double prod = t.coeff;
            for (std::size_t i = 0; i < t.factors.size(); ++i) {
                const TermFactor& g = t.factors[i];
                const double v = transform_value(g.transform, x[g.factor]);
                if (i == target) {
                    prod *= f.exponent * ipow(v, f.exponent - 1) *
                            transform_derivative(g.transform, x[g.factor]);
                } else {
                    prod *= ipow(v, g.exponent);
                }
            }
            sum += prod;
        }
    }
    return sum;
}

int Predictor::max_factor_index() const {
    int m = -1;
    for (const Term& t : terms)
        for (const TermFactor& f : t.factors) m = std::max(m, f.factor);
    return m;
}

namespace {

struct Cursor {
    const std::string& s;
    std::size_t i = 0;

    void skip_ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool done() {
        skip_ws();
        return i >= s.size();
    }
    char peek() {
        skip_ws();
        return i < s.size() ? s[i] : '\0';
    }
    bool accept(char c) {
        skip_ws();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError("predictor '" + s + "': " + msg, 1, static_cast<int>(i) + 1);
    }
};

int parse_int(Cursor& c) {
    c.skip_ws();
    std::size_t start = c.i;
    while (c.i < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.i]))) ++c.i;
    if (c.i == start) c.fail("expected integer");
    return std::atoi(c.s.substr(start, c.i - start).c_str());
}

bool starts_number(char ch) { return std::isdigit(static_cast<unsigned char>(ch)) || ch == '.'; }

TermFactor parse_var(Cursor& c) {
    TermFactor f;
    if (c.s.compare(c.i, 7, "log1p(x") == 0) {
        f.transform = FactorTransform::Log1p;
        c.i += 7;
        f.factor = parse_int(c) - 1;
        if (!c.accept(')')) c.fail("expected ')'");
    } else if (c.peek() == 'x') {
        ++c.i;
        f.factor = parse_int(c) - 1;
    } else {
        c.fail("expected variable");
    }
    if (f.factor < 0) c.fail("factor indices are 1-based");
    if (c.accept('^')) f.exponent = parse_int(c);
    if (f.exponent < 1) c.fail("exponent must be >= 1");
    return f;
}

Term parse_term(Cursor& c) {
    Term t;
    bool first = true;
    do {
        c.skip_ws();
        if (starts_number(c.peek()) || (c.peek() == '-' && first)) {
            char* end = nullptr;
            const double v = std::strtod(c.s.c_str() + c.i, &end);
            if (end == c.s.c_str() + c.i) c.fail("expected number");
            c.i = static_cast<std::size_t>(end - c.s.c_str());
            t.coeff *= v;
        } else {
            t.factors.push_back(parse_var(c));
        }
        first = false;
    } while (c.accept('*'));
    return t;
}

}  // namespace

Predictor parse_predictor(const std::string& text) {
    Cursor c{text};
    Predictor p;
    p.terms.push_back(parse_term(c));
    while (c.accept('+')) p.terms.push_back(parse_term(c));
    if (!c.done()) c.fail("trailing characters");
    return p;
}

std::string to_string(const Predictor& p) {
    std::ostringstream os;
    for (std::size_t ti = 0; ti < p.terms.size(); ++ti) {
        const Term& t = p.terms[ti];
        if (ti) os << " + ";
        bool printed = false;
        if (t.coeff != 1.0 || t.factors.empty()) {
            os << t.coeff;
            printed = true;
        }
        for (const TermFactor& f : t.factors) {
            if (printed) os << "*";
            if (f.transform == FactorTransform::Log1p)
                os << "log1p(x" << (f.factor + 1) << ")";
            else
                os << "x" << (f.factor + 1);
            if (f.exponent != 1) os << "^" << f.exponent;
            printed = true;
        }
    }
    return os.str();
}

}  // namespace ewd

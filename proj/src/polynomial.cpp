#include "maxpot/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace maxpot {

Polynomial Polynomial::constant(double c) {
    Polynomial p;
    p.add(Monomial{}, c);
    return p;
}

Polynomial Polynomial::variable(int v, double c) {
    Polynomial p;
    p.add(Monomial{v}, c);
    return p;
}

void Polynomial::add(Monomial m, double c) {
    std::sort(m.begin(), m.end());
    terms_.push_back({std::move(m), c});
}

void Polynomial::add_scaled(const Polynomial& p, double scale) {
    for (const auto& t : p.terms_) terms_.push_back({t.vars, t.coef * scale});
}

void Polynomial::normalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& a, const Term& b) { return a.vars < b.vars; });
    std::vector<Term> out;
    for (auto& t : terms_) {
        if (!out.empty() && out.back().vars == t.vars)
            out.back().coef += t.coef;
        else
            out.push_back(std::move(t));
    }
    std::erase_if(out, [](const Term& t) { return std::abs(t.coef) <= 1e-14; });
    terms_ = std::move(out);
}

int Polynomial::degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, static_cast<int>(t.vars.size()));
    return d;
}

double Polynomial::evaluate(const std::vector<double>& x) const {
    double s = 0;
    for (const auto& t : terms_) {
        double m = t.coef;
        for (int v : t.vars) m *= x[v];
        s += m;
    }
    return s;
}

double Polynomial::constant_term() const {
    double c = 0;
    for (const auto& t : terms_)
        if (t.vars.empty()) c += t.coef;
    return c;
}

std::vector<double> Polynomial::linear_coefficients(int num_vars) const {
    std::vector<double> c(static_cast<std::size_t>(num_vars), 0.0);
    for (const auto& t : terms_) {
        if (t.vars.size() == 1) c[t.vars[0]] += t.coef;
    }
    return c;
}

std::string Polynomial::to_string() const {
    std::string out;
    char buf[64];
    for (const auto& t : terms_) {
        std::snprintf(buf, sizeof buf, "%+.17g", t.coef);
        out += buf;
        for (int v : t.vars) out += " x" + std::to_string(v);
        out += "\n";
    }
    return out;
}

}  // namespace maxpot

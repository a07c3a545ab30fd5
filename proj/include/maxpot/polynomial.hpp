#pragma once

#include <string>
#include <utility>
#include <vector>

namespace maxpot {

// Sorted variable indices; the empty monomial is the constant 1.
using Monomial = std::vector<int>;

class Polynomial {
public:
    struct Term {
        Monomial vars;
        double coef;
    };

    Polynomial() = default;
    static Polynomial constant(double c);
    static Polynomial variable(int v, double c = 1.0);

    void add(Monomial m, double c);
    void add_scaled(const Polynomial& p, double scale = 1.0);
    // Merge equal monomials and drop zero coefficients.
    void normalize();

    const std::vector<Term>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    int degree() const;
    double evaluate(const std::vector<double>& x) const;
    double constant_term() const;
    // Dense coefficient vector of a degree <= 1 polynomial (constant excluded).
    std::vector<double> linear_coefficients(int num_vars) const;
    std::string to_string() const;

private:
    std::vector<Term> terms_;
};

}  // namespace maxpot

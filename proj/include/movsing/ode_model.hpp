#pragma once

// Text DSL for autonomous scalar ODEs and its normalization to a cleared
// differential polynomial.
//
//   expr   := ['-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := base ('^' signed_int)?
//   base   := number ['i'] | name | 'y' '\''* | '(' expr ')'
//
// `y` is the dependent variable; each prime is one derivative. Numbers are
// decimal literals kept exact; a trailing `i` makes a literal imaginary.

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "movsing/scalar.hpp"

namespace movsing {

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
public:
    ParseError(const std::string& message, int line, int column);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

inline constexpr int kMaxDerivativeOrder = 9;

struct AstNode {
    enum class Kind { Constant, Parameter, Derivative, Add, Multiply, Power };

    Kind kind = Kind::Constant;
    GaussRational value;          // Constant
    std::string name;             // Parameter
    int order = 0;                // Derivative: y^(order)
    int exponent = 1;             // Power (nonzero)
    std::vector<int> signs;       // Add: +1 / -1 per child
    std::vector<AstNode> children;

    static AstNode constant(GaussRational v);
    static AstNode parameter(std::string name);
    static AstNode derivative(int order);
    static AstNode add(std::vector<AstNode> terms, std::vector<int> signs);
    static AstNode multiply(std::vector<AstNode> factors);
    static AstNode power(AstNode base, int exponent);

    friend bool operator==(const AstNode& a, const AstNode& b);
};

using OdeAst = AstNode;

/// Parameter bindings (name -> value). Units follow hbar = m = 1.
using ParamEnv = std::map<std::string, GaussRational>;

OdeAst parse_ode(std::string_view text);
std::string unparse(const OdeAst& ast);

/// Evaluates the expression with y^(k) = y_derivs[k].
Complex evaluate(const OdeAst& ast, const ParamEnv& env, std::span<const Complex> y_derivs);

/// Highest derivative order referenced by the expression.
int max_derivative_order(const OdeAst& ast);

/// Degrees signature: derivative order k -> exponent d_k (no zero entries).
using Degrees = std::map<int, int>;

struct DiffMonomial {
    GaussRational coeff;
    Degrees degrees;

    int total_degree() const;
    int max_order() const;  // -1 for the constant monomial
};

class DifferentialPolynomial {
public:
    DifferentialPolynomial() = default;
    /// Merges like monomials, drops zero coefficients and sorts canonically.
    DifferentialPolynomial(std::vector<DiffMonomial> monomials, int clearing_multiplier);

    const std::vector<DiffMonomial>& monomials() const { return monomials_; }
    int clearing_multiplier() const { return clearing_multiplier_; }
    int order() const;
    size_t size() const { return monomials_.size(); }

    Complex evaluate(std::span<const Complex> y_derivs) const;
    std::string str() const;

    friend bool operator==(const DifferentialPolynomial& a, const DifferentialPolynomial& b);

private:
    std::vector<DiffMonomial> monomials_;
    int clearing_multiplier_ = 0;
};

/// Expands the AST, clears negative powers of y by the minimal y^k and
/// merges like monomials. Throws InputError for unbound parameters, negative
/// powers of derivatives, non-monomial negative powers, and equations that are
/// identically zero or constant.
DifferentialPolynomial normalize(const OdeAst& ast, const ParamEnv& env);

struct DeminaCheck {
    bool holds = false;
    int top_degree = 0;
    std::vector<size_t> top_monomials;
};

/// Under y -> lambda*Y, does exactly one monomial carry the top power of lambda?
DeminaCheck check_demina_condition(const DifferentialPolynomial& poly);

}  // namespace movsing

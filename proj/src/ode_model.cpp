#include "movsing/ode_model.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace movsing {

ParseError::ParseError(const std::string& message, int line, int column)
    : InputError("syntax error at line " + std::to_string(line) + ", column " +
                 std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

AstNode AstNode::constant(GaussRational v) {
    AstNode n;
    n.kind = Kind::Constant;
    n.value = std::move(v);
    return n;
}

AstNode AstNode::parameter(std::string name) {
    AstNode n;
    n.kind = Kind::Parameter;
    n.name = std::move(name);
    return n;
}

AstNode AstNode::derivative(int order) {
    if (order < 0 || order > kMaxDerivativeOrder)
        throw InputError("derivative order " + std::to_string(order) + " outside [0, 9]");
    AstNode n;
    n.kind = Kind::Derivative;
    n.order = order;
    return n;
}

AstNode AstNode::add(std::vector<AstNode> terms, std::vector<int> signs) {
    if (terms.empty() || terms.size() != signs.size())
        throw std::invalid_argument("AstNode::add: terms/signs mismatch");
    AstNode n;
    n.kind = Kind::Add;
    n.children = std::move(terms);
    n.signs = std::move(signs);
    return n;
}

AstNode AstNode::multiply(std::vector<AstNode> factors) {
    if (factors.size() < 2) throw std::invalid_argument("AstNode::multiply needs >= 2 factors");
    AstNode n;
    n.kind = Kind::Multiply;
    n.children = std::move(factors);
    return n;
}

AstNode AstNode::power(AstNode base, int exponent) {
    if (exponent == 0) throw InputError("power exponent must be nonzero");
    AstNode n;
    n.kind = Kind::Power;
    n.exponent = exponent;
    n.children.push_back(std::move(base));
    return n;
}

bool operator==(const AstNode& a, const AstNode& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case AstNode::Kind::Constant: return a.value == b.value;
        case AstNode::Kind::Parameter: return a.name == b.name;
        case AstNode::Kind::Derivative: return a.order == b.order;
        case AstNode::Kind::Power:
            return a.exponent == b.exponent && a.children == b.children;
        case AstNode::Kind::Add: return a.signs == b.signs && a.children == b.children;
        case AstNode::Kind::Multiply: return a.children == b.children;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Lexer / parser

namespace {

struct Token {
    enum class Kind { Number, Name, Y, Plus, Minus, Star, Caret, LParen, RParen, End };
    Kind kind = Kind::End;
    std::string text;
    bool imaginary = false;
    int primes = 0;
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.line = line_;
            t.column = col_;
            if (pos_ >= src_.size()) {
                t.kind = Token::Kind::End;
                out.push_back(t);
                return out;
            }
            const char c = src_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                lex_number(t);
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                lex_name(t);
            } else {
                switch (c) {
                    case '+': t.kind = Token::Kind::Plus; break;
                    case '-': t.kind = Token::Kind::Minus; break;
                    case '*': t.kind = Token::Kind::Star; break;
                    case '^': t.kind = Token::Kind::Caret; break;
                    case '(': t.kind = Token::Kind::LParen; break;
                    case ')': t.kind = Token::Kind::RParen; break;
                    default:
                        throw ParseError(std::string("unknown token '") + c + "'", line_, col_);
                }
                t.text = std::string(1, c);
                advance();
            }
            out.push_back(std::move(t));
        }
    }

private:
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    bool at_digit(size_t p) const {
        return p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]));
    }

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
    }

    void lex_number(Token& t) {
        const int line = line_, col = col_;
        std::string text;
        while (at_digit(pos_)) {
            text.push_back(src_[pos_]);
            advance();
        }
        if (pos_ < src_.size() && src_[pos_] == '.') {
            text.push_back('.');
            advance();
            while (at_digit(pos_)) {
                text.push_back(src_[pos_]);
                advance();
            }
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (at_digit(p)) {
                while (pos_ < p) {
                    text.push_back(src_[pos_]);
                    advance();
                }
                while (at_digit(pos_)) {
                    text.push_back(src_[pos_]);
                    advance();
                }
            }
        }
        if (!parse_decimal(text)) throw ParseError("malformed number '" + text + "'", line, col);
        if (pos_ < src_.size() && src_[pos_] == 'i') {
            const size_t p = pos_ + 1;
            const bool ident_follows =
                p < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[p])) || src_[p] == '_');
            if (!ident_follows) {
                t.imaginary = true;
                advance();
            }
        }
        t.kind = Token::Kind::Number;
        t.text = text;
    }

    void lex_name(Token& t) {
        std::string text;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            text.push_back(src_[pos_]);
            advance();
        }
        if (text == "y") {
            t.kind = Token::Kind::Y;
            while (pos_ < src_.size() && src_[pos_] == '\'') {
                ++t.primes;
                advance();
            }
            if (t.primes > kMaxDerivativeOrder)
                throw ParseError("derivative order " + std::to_string(t.primes) +
                                     " exceeds the maximum of 9",
                                 t.line, t.column);
        } else {
            t.kind = Token::Kind::Name;
        }
        t.text = text;
    }

    std::string_view src_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

const char* describe(Token::Kind k) {
    switch (k) {
        case Token::Kind::Number: return "number";
        case Token::Kind::Name: return "name";
        case Token::Kind::Y: return "'y'";
        case Token::Kind::Plus: return "'+'";
        case Token::Kind::Minus: return "'-'";
        case Token::Kind::Star: return "'*'";
        case Token::Kind::Caret: return "'^'";
        case Token::Kind::LParen: return "'('";
        case Token::Kind::RParen: return "')'";
        case Token::Kind::End: return "end of input";
    }
    return "token";
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    AstNode parse_all() {
        AstNode e = parse_expr();
        if (peek().kind != Token::Kind::End) fail("unexpected " + std::string(describe(peek().kind)));
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& take() { return toks_[pos_++]; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, peek().line, peek().column);
    }

    AstNode parse_expr() {
        std::vector<AstNode> terms;
        std::vector<int> signs;
        int sign = 1;
        if (peek().kind == Token::Kind::Minus) {
            take();
            sign = -1;
        }
        terms.push_back(parse_term());
        signs.push_back(sign);
        while (peek().kind == Token::Kind::Plus || peek().kind == Token::Kind::Minus) {
            sign = take().kind == Token::Kind::Minus ? -1 : 1;
            terms.push_back(parse_term());
            signs.push_back(sign);
        }
        if (terms.size() == 1 && signs[0] == 1) return std::move(terms[0]);
        return AstNode::add(std::move(terms), std::move(signs));
    }

    AstNode parse_term() {
        std::vector<AstNode> factors;
        factors.push_back(parse_factor());
        while (peek().kind == Token::Kind::Star) {
            take();
            factors.push_back(parse_factor());
        }
        if (factors.size() == 1) return std::move(factors[0]);
        return AstNode::multiply(std::move(factors));
    }

    AstNode parse_factor() {
        AstNode base = parse_base();
        if (peek().kind != Token::Kind::Caret) return base;
        take();
        bool paren = false;
        if (peek().kind == Token::Kind::LParen) {
            take();
            paren = true;
        }
        int sign = 1;
        if (peek().kind == Token::Kind::Minus || peek().kind == Token::Kind::Plus) {
            sign = take().kind == Token::Kind::Minus ? -1 : 1;
        }
        const Token& t = peek();
        if (t.kind != Token::Kind::Number || t.imaginary ||
            t.text.find_first_not_of("0123456789") != std::string::npos) {
            fail("expected integer exponent");
        }
        if (t.text.size() > 4) fail("exponent too large");
        const int e = sign * std::stoi(t.text);
        if (e == 0) fail("exponent must be nonzero");
        take();
        if (paren) {
            if (peek().kind != Token::Kind::RParen) fail("expected ')'");
            take();
        }
        return AstNode::power(std::move(base), e);
    }

    AstNode parse_base() {
        const Token& t = peek();
        switch (t.kind) {
            case Token::Kind::Number: {
                const Rational r = *parse_decimal(t.text);
                take();
                return AstNode::constant(t.imaginary ? GaussRational(0, r) : GaussRational(r));
            }
            case Token::Kind::Name: {
                std::string name = t.text;
                take();
                return AstNode::parameter(std::move(name));
            }
            case Token::Kind::Y: {
                const int order = t.primes;
                take();
                return AstNode::derivative(order);
            }
            case Token::Kind::LParen: {
                take();
                AstNode inner = parse_expr();
                if (peek().kind != Token::Kind::RParen) fail("expected ')'");
                take();
                return inner;
            }
            default:
                fail("unexpected " + std::string(describe(t.kind)));
        }
    }

    std::vector<Token> toks_;
    size_t pos_ = 0;
};

}  // namespace

OdeAst parse_ode(std::string_view text) {
    bool blank = true;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (blank) throw ParseError("empty equation", 1, 1);
    return Parser(Lexer(text).run()).parse_all();
}

// ---------------------------------------------------------------------------
// Unparse

namespace {

// Exact decimal for terminating fractions; otherwise "(n*d^-1)".
std::string rational_literal(const Rational& r) {
    BigInt num = boost::multiprecision::numerator(r);
    BigInt den = boost::multiprecision::denominator(r);
    BigInt d = den;
    int twos = 0, fives = 0;
    while (d % 2 == 0) {
        d /= 2;
        ++twos;
    }
    while (d % 5 == 0) {
        d /= 5;
        ++fives;
    }
    if (d != 1) return "(" + num.str() + "*" + den.str() + "^-1)";
    const int places = std::max(twos, fives);
    if (places == 0) return num.str();
    BigInt scaled = num * boost::multiprecision::pow(BigInt(10), places) / den;
    std::string digits = scaled.str();
    if (static_cast<int>(digits.size()) <= places)
        digits = std::string(places - digits.size() + 1, '0') + digits;
    digits.insert(digits.size() - places, ".");
    return digits;
}

bool is_atomic(const AstNode& n) {
    switch (n.kind) {
        case AstNode::Kind::Parameter:
        case AstNode::Kind::Derivative: return true;
        case AstNode::Kind::Constant: {
            const auto& v = n.value;
            if (!v.is_real() && v.real() != 0) return false;
            const Rational part = v.is_real() ? v.real() : v.imag();
            return part >= 0 && rational_literal(part)[0] != '(';
        }
        default: return false;
    }
}

void write(const AstNode& n, std::ostream& os);

void write_constant(const GaussRational& v, std::ostream& os) {
    auto literal = [](const Rational& r, bool imag) {
        std::string s = rational_literal(r);
        if (!imag) return s;
        if (s[0] == '(') return "(" + s + "*1i)";
        return s + "i";
    };
    const bool re_zero = v.real() == 0;
    const bool im_zero = v.imag() == 0;
    if (im_zero) {
        if (v.real() < 0) {
            os << "(-" << literal(-v.real(), false) << ")";
        } else {
            os << literal(v.real(), false);
        }
        return;
    }
    if (re_zero) {
        if (v.imag() < 0) {
            os << "(-" << literal(-v.imag(), true) << ")";
        } else {
            os << literal(v.imag(), true);
        }
        return;
    }
    os << "(";
    if (v.real() < 0) os << "-";
    os << literal(boost::multiprecision::abs(v.real()), false);
    os << (v.imag() < 0 ? " - " : " + ") << literal(boost::multiprecision::abs(v.imag()), true);
    os << ")";
}

void write(const AstNode& n, std::ostream& os) {
    switch (n.kind) {
        case AstNode::Kind::Constant: write_constant(n.value, os); return;
        case AstNode::Kind::Parameter: os << n.name; return;
        case AstNode::Kind::Derivative: os << 'y' << std::string(n.order, '\''); return;
        case AstNode::Kind::Add:
            for (size_t i = 0; i < n.children.size(); ++i) {
                if (i == 0) {
                    if (n.signs[i] < 0) os << "-";
                } else {
                    os << (n.signs[i] < 0 ? " - " : " + ");
                }
                const bool paren = n.children[i].kind == AstNode::Kind::Add;
                if (paren) os << "(";
                write(n.children[i], os);
                if (paren) os << ")";
            }
            return;
        case AstNode::Kind::Multiply:
            for (size_t i = 0; i < n.children.size(); ++i) {
                if (i > 0) os << "*";
                const auto k = n.children[i].kind;
                const bool paren = k == AstNode::Kind::Add || k == AstNode::Kind::Multiply;
                if (paren) os << "(";
                write(n.children[i], os);
                if (paren) os << ")";
            }
            return;
        case AstNode::Kind::Power: {
            const AstNode& base = n.children.front();
            const bool paren = !is_atomic(base);
            if (paren) os << "(";
            write(base, os);
            if (paren) os << ")";
            os << "^" << n.exponent;
            return;
        }
    }
}

}  // namespace

std::string unparse(const OdeAst& ast) {
    std::ostringstream os;
    write(ast, os);
    return os.str();
}

// ---------------------------------------------------------------------------
// Evaluation

int max_derivative_order(const OdeAst& ast) {
    int best = ast.kind == AstNode::Kind::Derivative ? ast.order : -1;
    for (const auto& c : ast.children) best = std::max(best, max_derivative_order(c));
    return best;
}

Complex evaluate(const OdeAst& ast, const ParamEnv& env, std::span<const Complex> y_derivs) {
    switch (ast.kind) {
        case AstNode::Kind::Constant: return ast.value.to_complex();
        case AstNode::Kind::Parameter: {
            auto it = env.find(ast.name);
            if (it == env.end()) throw InputError("unbound parameter '" + ast.name + "'");
            return it->second.to_complex();
        }
        case AstNode::Kind::Derivative:
            if (static_cast<size_t>(ast.order) >= y_derivs.size())
                throw std::invalid_argument("evaluate: missing derivative values");
            return y_derivs[ast.order];
        case AstNode::Kind::Add: {
            Complex acc(0.0, 0.0);
            for (size_t i = 0; i < ast.children.size(); ++i)
                acc += static_cast<double>(ast.signs[i]) * evaluate(ast.children[i], env, y_derivs);
            return acc;
        }
        case AstNode::Kind::Multiply: {
            Complex acc(1.0, 0.0);
            for (const auto& c : ast.children) acc *= evaluate(c, env, y_derivs);
            return acc;
        }
        case AstNode::Kind::Power: {
            const Complex b = evaluate(ast.children.front(), env, y_derivs);
            Complex acc(1.0, 0.0);
            for (int i = 0; i < std::abs(ast.exponent); ++i) acc *= b;
            return ast.exponent < 0 ? Complex(1.0, 0.0) / acc : acc;
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// Differential polynomials

int DiffMonomial::total_degree() const {
    int s = 0;
    for (const auto& [k, d] : degrees) s += d;
    return s;
}

int DiffMonomial::max_order() const { return degrees.empty() ? -1 : degrees.rbegin()->first; }

namespace {

bool canonical_less(const DiffMonomial& a, const DiffMonomial& b) {
    if (a.total_degree() != b.total_degree()) return a.total_degree() > b.total_degree();
    if (a.max_order() != b.max_order()) return a.max_order() > b.max_order();
    // Higher-order derivatives with larger exponents first.
    return std::lexicographical_compare(a.degrees.rbegin(), a.degrees.rend(), b.degrees.rbegin(),
                                        b.degrees.rend(), [](const auto& x, const auto& y) {
                                            return x > y;
                                        });
}

using TermMap = std::map<Degrees, GaussRational>;

void add_term(TermMap& out, const Degrees& deg, const GaussRational& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = out.emplace(deg, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) out.erase(it);
    }
}

TermMap multiply_terms(const TermMap& a, const TermMap& b) {
    TermMap out;
    for (const auto& [da, ca] : a) {
        for (const auto& [db, cb] : b) {
            Degrees d = da;
            for (const auto& [k, e] : db) {
                d[k] += e;
                if (d[k] == 0) d.erase(k);
            }
            add_term(out, d, ca * cb);
        }
    }
    return out;
}

TermMap expand(const AstNode& n, const ParamEnv& env) {
    switch (n.kind) {
        case AstNode::Kind::Constant: {
            TermMap m;
            add_term(m, {}, n.value);
            return m;
        }
        case AstNode::Kind::Parameter: {
            auto it = env.find(n.name);
            if (it == env.end()) throw InputError("unbound parameter '" + n.name + "'");
            TermMap m;
            add_term(m, {}, it->second);
            return m;
        }
        case AstNode::Kind::Derivative: return TermMap{{Degrees{{n.order, 1}}, GaussRational(1)}};
        case AstNode::Kind::Add: {
            TermMap out;
            for (size_t i = 0; i < n.children.size(); ++i) {
                for (const auto& [d, c] : expand(n.children[i], env))
                    add_term(out, d, n.signs[i] < 0 ? -c : c);
            }
            return out;
        }
        case AstNode::Kind::Multiply: {
            TermMap acc{{Degrees{}, GaussRational(1)}};
            for (const auto& c : n.children) acc = multiply_terms(acc, expand(c, env));
            return acc;
        }
        case AstNode::Kind::Power: {
            TermMap base = expand(n.children.front(), env);
            if (n.exponent < 0) {
                if (base.size() != 1)
                    throw InputError("negative power of a non-monomial expression is not supported");
                const auto& [deg, coeff] = *base.begin();
                Degrees inv;
                for (const auto& [k, e] : deg) inv[k] = -e;
                base = TermMap{{inv, GaussRational(1) / coeff}};
            }
            const int e = std::abs(n.exponent);
            if (e > 64) throw InputError("power exponent magnitude above 64 is not supported");
            TermMap acc{{Degrees{}, GaussRational(1)}};
            for (int i = 0; i < e; ++i) acc = multiply_terms(acc, base);
            return acc;
        }
    }
    return {};
}

}  // namespace

DifferentialPolynomial::DifferentialPolynomial(std::vector<DiffMonomial> monomials,
                                               int clearing_multiplier)
    : clearing_multiplier_(clearing_multiplier) {
    if (clearing_multiplier < 0) throw std::invalid_argument("clearing multiplier must be >= 0");
    TermMap merged;
    for (auto& m : monomials) {
        Degrees d;
        for (const auto& [k, e] : m.degrees) {
            if (k < 0 || e < 0) throw std::invalid_argument("monomial degrees must be nonnegative");
            if (e != 0) d[k] = e;
        }
        add_term(merged, d, m.coeff);
    }
    for (auto& [d, c] : merged) monomials_.push_back({c, d});
    std::sort(monomials_.begin(), monomials_.end(), canonical_less);
}

int DifferentialPolynomial::order() const {
    int o = 0;
    for (const auto& m : monomials_) o = std::max(o, m.max_order());
    return o;
}

Complex DifferentialPolynomial::evaluate(std::span<const Complex> y_derivs) const {
    Complex acc(0.0, 0.0);
    for (const auto& m : monomials_) {
        Complex term = m.coeff.to_complex();
        for (const auto& [k, d] : m.degrees) {
            if (static_cast<size_t>(k) >= y_derivs.size())
                throw std::invalid_argument("evaluate: missing derivative values");
            for (int i = 0; i < d; ++i) term *= y_derivs[k];
        }
        acc += term;
    }
    return acc;
}

std::string DifferentialPolynomial::str() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& m : monomials_) {
        GaussRational c = m.coeff;
        bool negative = false;
        if (c.is_real() && c.real() < 0) {
            negative = true;
            c = -c;
        }
        if (first) {
            if (negative) os << "-";
        } else {
            os << (negative ? " - " : " + ");
        }
        first = false;
        std::string factors;
        for (const auto& [k, d] : m.degrees) {
            if (!factors.empty()) factors += "*";
            factors += "y" + std::string(k, '\'');
            if (d != 1) factors += "^" + std::to_string(d);
        }
        const bool unit = c == GaussRational(1);
        if (factors.empty()) {
            os << (c.is_real() ? c.str() : "(" + c.str() + ")");
        } else if (unit) {
            os << factors;
        } else {
            os << (c.is_real() ? c.str() : "(" + c.str() + ")") << "*" << factors;
        }
    }
    return os.str();
}

bool operator==(const DifferentialPolynomial& a, const DifferentialPolynomial& b) {
    if (a.clearing_multiplier_ != b.clearing_multiplier_) return false;
    if (a.monomials_.size() != b.monomials_.size()) return false;
    for (size_t i = 0; i < a.monomials_.size(); ++i) {
        if (a.monomials_[i].coeff != b.monomials_[i].coeff) return false;
        if (a.monomials_[i].degrees != b.monomials_[i].degrees) return false;
    }
    return true;
}

DifferentialPolynomial normalize(const OdeAst& ast, const ParamEnv& env) {
    TermMap terms = expand(ast, env);
    if (terms.empty()) throw InputError("equation is identically zero");
    int clearing = 0;
    for (const auto& [deg, c] : terms) {
        for (const auto& [k, e] : deg) {
            if (e < 0 && k > 0)
                throw InputError("negative powers of derivatives of y are not supported");
            if (e < 0) clearing = std::max(clearing, -e);
        }
    }
    std::vector<DiffMonomial> monomials;
    bool all_constant = true;
    for (const auto& [deg, c] : terms) {
        Degrees d = deg;
        if (clearing > 0) {
            d[0] += clearing;
            if (d[0] == 0) d.erase(0);
        }
        if (!d.empty()) all_constant = false;
        monomials.push_back({c, d});
    }
    if (all_constant) throw InputError("equation reduces to a nonzero constant");
    return DifferentialPolynomial(std::move(monomials), clearing);
}

DeminaCheck check_demina_condition(const DifferentialPolynomial& poly) {
    DeminaCheck out;
    int top = -1;
    for (const auto& m : poly.monomials()) top = std::max(top, m.total_degree());
    out.top_degree = std::max(top, 0);
    for (size_t i = 0; i < poly.monomials().size(); ++i)
        if (poly.monomials()[i].total_degree() == out.top_degree) out.top_monomials.push_back(i);
    out.holds = out.top_monomials.size() == 1;
    return out;
}

}  // namespace movsing

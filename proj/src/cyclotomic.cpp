#include "torwalk/cyclotomic.hpp"

#include <cctype>
#include <stdexcept>

namespace torwalk {

namespace {

void check_level(int level) {
    if (level != 2 && level != 3)
        throw std::invalid_argument("CycInt level must be 2 or 3, got " + std::to_string(level));
}

void check_same_level(const CycInt& x, const CycInt& y) {
    if (x.level != y.level)
        throw std::invalid_argument("CycInt level mismatch: " + std::to_string(x.level) +
                                    " vs " + std::to_string(y.level));
}

}  // namespace

CycInt::CycInt(int level_, mpz_class a_, mpz_class b_)
    : level(level_), a(std::move(a_)), b(std::move(b_)) {
    check_level(level);
    if (level == 2 && b != 0)
        throw std::invalid_argument("level-2 CycInt must have b = 0");
}

CycInt cyc_add(const CycInt& x, const CycInt& y) {
    check_same_level(x, y);
    return CycInt(x.level, x.a + y.a, x.b + y.b);
}

CycInt cyc_sub(const CycInt& x, const CycInt& y) {
    check_same_level(x, y);
    return CycInt(x.level, x.a - y.a, x.b - y.b);
}

CycInt cyc_mul(const CycInt& x, const CycInt& y) {
    check_same_level(x, y);
    // (a+bw)(c+dw) = ac + (ad+bc) w + bd w^2, and w^2 = -1-w at level 3.
    mpz_class ac = x.a * y.a;
    mpz_class bd = x.b * y.b;
    mpz_class cross = x.a * y.b + x.b * y.a;
    return CycInt(x.level, ac - bd, cross - bd);
}

CycInt cyc_neg(const CycInt& x) { return CycInt(x.level, -x.a, -x.b); }

CycInt cyc_conj(const CycInt& x) {
    if (x.level == 2) return x;
    return CycInt(x.level, x.a - x.b, -x.b);
}

bool is_rational(const CycInt& x) { return x.b == 0; }

mpz_class cyc_norm(const CycInt& x) {
    if (x.level == 2) return x.a * x.a;
    return x.a * x.a - x.a * x.b + x.b * x.b;
}

std::array<mpz_class, 4> psi(const CycInt& x) {
    if (x.level != 3) throw std::invalid_argument("psi is defined at level 3 only");
    return {x.a, -x.b, x.b, x.a - x.b};
}

CycInt lift_to_level(const CycInt& x, int level) {
    check_level(level);
    if (x.level == level) return x;
    if (x.level == 2 && level == 3) return CycInt(3, x.a, 0);
    if (!is_rational(x))
        throw std::invalid_argument("cannot restrict " + cyc_to_string(x) + " to level 2");
    return CycInt(2, x.a, 0);
}

std::string cyc_to_string(const CycInt& x) {
    if (x.level == 2 || x.b == 0) return x.a.get_str();
    std::string out;
    if (x.a != 0) out = x.a.get_str();
    if (x.b > 0 && !out.empty()) out += "+";
    if (x.b == -1)
        out += "-";
    else if (x.b != 1)
        out += x.b.get_str() + "*";
    out += "w";
    return out;
}

namespace {

// Parses an optional sign followed by digits; empty digit run means 1.
bool parse_term(const std::string& s, std::size_t& pos, mpz_class& coeff, bool& is_w) {
    std::size_t start = pos;
    bool neg = false;
    while (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
        if (s[pos] == '-') neg = !neg;
        ++pos;
    }
    std::string digits;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) digits += s[pos++];
    if (pos < s.size() && s[pos] == '*') {
        if (digits.empty()) return false;
        ++pos;
    }
    is_w = pos < s.size() && s[pos] == 'w';
    if (is_w) ++pos;
    if (digits.empty()) {
        if (!is_w) return false;
        coeff = 1;
    } else {
        coeff = mpz_class(digits);
    }
    if (neg) coeff = -coeff;
    return pos > start;
}

}  // namespace

CycInt cyc_from_string(int level, const std::string& text) {
    check_level(level);
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw std::invalid_argument("empty CycInt literal");
    mpz_class a = 0, b = 0;
    std::size_t pos = 0;
    while (pos < s.size()) {
        mpz_class coeff;
        bool is_w = false;
        if (!parse_term(s, pos, coeff, is_w))
            throw std::invalid_argument("bad CycInt literal: " + text);
        (is_w ? b : a) += coeff;
    }
    return CycInt(level, a, b);
}

}  // namespace torwalk

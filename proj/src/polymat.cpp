#include "torwalk/polymat.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>

namespace torwalk {

namespace {

void check_poly_level(const CycPoly& f, const CycPoly& g) {
    if (f.level != g.level)
        throw std::invalid_argument("CycPoly level mismatch");
}

CycInt lzero(int level) { return CycInt::integer(level, 0); }
CycInt lone(int level) { return CycInt::integer(level, 1); }

}  // namespace

bool CycPoly::is_monic() const {
    return !coeffs.empty() && coeffs.back() == lone(level);
}

CycInt CycPoly::coeff(int i) const {
    if (i < 0 || i >= static_cast<int>(coeffs.size())) return lzero(level);
    return coeffs[i];
}

CycPoly CycPoly::constant(const CycInt& c) {
    CycPoly f{c.level, {}};
    if (!c.is_zero()) f.coeffs.push_back(c);
    return f;
}

CycPoly CycPoly::t(int level) {
    return CycPoly{level, {lzero(level), lone(level)}};
}

CycPoly make_poly(int level, std::vector<CycInt> coeffs) {
    for (const CycInt& c : coeffs)
        if (c.level != level) throw std::invalid_argument("coefficient level mismatch");
    while (!coeffs.empty() && coeffs.back().is_zero()) coeffs.pop_back();
    return CycPoly{level, std::move(coeffs)};
}

CycPoly make_int_poly(int level, const std::vector<long>& coeffs) {
    std::vector<CycInt> cs;
    cs.reserve(coeffs.size());
    for (long v : coeffs) cs.push_back(CycInt::integer(level, v));
    return make_poly(level, std::move(cs));
}

CycPoly poly_add(const CycPoly& f, const CycPoly& g) {
    check_poly_level(f, g);
    std::vector<CycInt> out(std::max(f.coeffs.size(), g.coeffs.size()), lzero(f.level));
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = cyc_add(f.coeff(static_cast<int>(i)), g.coeff(static_cast<int>(i)));
    return make_poly(f.level, std::move(out));
}

CycPoly poly_sub(const CycPoly& f, const CycPoly& g) { return poly_add(f, poly_neg(g)); }

CycPoly poly_neg(const CycPoly& f) {
    std::vector<CycInt> out = f.coeffs;
    for (CycInt& c : out) c = cyc_neg(c);
    return CycPoly{f.level, std::move(out)};
}

CycPoly poly_mul(const CycPoly& f, const CycPoly& g) {
    check_poly_level(f, g);
    if (f.is_zero() || g.is_zero()) return CycPoly::zero(f.level);
    std::vector<CycInt> out(f.coeffs.size() + g.coeffs.size() - 1, lzero(f.level));
    for (std::size_t i = 0; i < f.coeffs.size(); ++i)
        for (std::size_t j = 0; j < g.coeffs.size(); ++j)
            out[i + j] = cyc_add(out[i + j], cyc_mul(f.coeffs[i], g.coeffs[j]));
    return make_poly(f.level, std::move(out));
}

CycPoly poly_scale(const CycInt& c, const CycPoly& f) {
    if (c.level != f.level) throw std::invalid_argument("scale level mismatch");
    std::vector<CycInt> out = f.coeffs;
    for (CycInt& x : out) x = cyc_mul(c, x);
    return make_poly(f.level, std::move(out));
}

CycInt poly_eval(const CycPoly& f, const CycInt& x) {
    if (x.level != f.level) throw std::invalid_argument("eval level mismatch");
    CycInt acc = lzero(f.level);
    for (auto it = f.coeffs.rbegin(); it != f.coeffs.rend(); ++it)
        acc = cyc_add(cyc_mul(acc, x), *it);
    return acc;
}

CycPoly poly_derivative(const CycPoly& f) {
    if (f.degree() < 1) return CycPoly::zero(f.level);
    std::vector<CycInt> out(f.coeffs.size() - 1, lzero(f.level));
    for (std::size_t i = 1; i < f.coeffs.size(); ++i)
        out[i - 1] = cyc_mul(CycInt::integer(f.level, static_cast<long>(i)), f.coeffs[i]);
    return make_poly(f.level, std::move(out));
}

std::pair<CycPoly, CycPoly> poly_divmod_monic(const CycPoly& f, const CycPoly& g) {
    check_poly_level(f, g);
    if (!g.is_monic()) throw std::invalid_argument("divisor must be monic");
    const int m = g.degree();
    if (f.degree() < m) return {CycPoly::zero(f.level), f};
    std::vector<CycInt> r = f.coeffs;
    std::vector<CycInt> q(f.coeffs.size() - m, lzero(f.level));
    for (int i = static_cast<int>(q.size()) - 1; i >= 0; --i) {
        CycInt c = r[i + m];
        q[i] = c;
        if (c.is_zero()) continue;
        for (int j = 0; j < m; ++j) r[i + j] = cyc_sub(r[i + j], cyc_mul(c, g.coeffs[j]));
        r[i + m] = lzero(f.level);
    }
    r.resize(m);
    return {make_poly(f.level, std::move(q)), make_poly(f.level, std::move(r))};
}

CycPoly poly_conj(const CycPoly& f) {
    std::vector<CycInt> out = f.coeffs;
    for (CycInt& c : out) c = cyc_conj(c);
    return CycPoly{f.level, std::move(out)};
}

bool is_integer_poly(const CycPoly& f) {
    return std::all_of(f.coeffs.begin(), f.coeffs.end(),
                       [](const CycInt& c) { return is_rational(c); });
}

CycPoly poly_to_level(const CycPoly& f, int level) {
    std::vector<CycInt> out;
    out.reserve(f.coeffs.size());
    for (const CycInt& c : f.coeffs) out.push_back(lift_to_level(c, level));
    return CycPoly{level, std::move(out)};
}

RingMatrix::RingMatrix(int level_, int dim_) : level(level_), dim(dim_) {
    if (dim < 0) throw std::invalid_argument("negative matrix dimension");
    entries.assign(static_cast<std::size_t>(dim) * dim, lzero(level));
}

RingMatrix RingMatrix::identity(int level, int dim) {
    RingMatrix m(level, dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = lone(level);
    return m;
}

bool RingMatrix::is_identity() const { return *this == identity(level, dim); }

RingMatrix mat_mul(const RingMatrix& x, const RingMatrix& y) {
    if (x.level != y.level || x.dim != y.dim)
        throw std::invalid_argument("matrix level/dimension mismatch");
    RingMatrix out(x.level, x.dim);
    for (int i = 0; i < x.dim; ++i)
        for (int k = 0; k < x.dim; ++k) {
            const CycInt& a = x.at(i, k);
            if (a.is_zero()) continue;
            for (int j = 0; j < x.dim; ++j)
                out.at(i, j) = cyc_add(out.at(i, j), cyc_mul(a, y.at(k, j)));
        }
    return out;
}

RingMatrix mat_pow(const RingMatrix& m, long e) {
    if (e < 0) throw std::invalid_argument("negative matrix exponent");
    RingMatrix acc = RingMatrix::identity(m.level, m.dim);
    RingMatrix base = m;
    while (e > 0) {
        if (e & 1) acc = mat_mul(acc, base);
        e >>= 1;
        if (e > 0) base = mat_mul(base, base);
    }
    return acc;
}

CycInt mat_trace(const RingMatrix& m) {
    CycInt s = lzero(m.level);
    for (int i = 0; i < m.dim; ++i) s = cyc_add(s, m.at(i, i));
    return s;
}

CycInt mat_det(const RingMatrix& m) {
    CycPoly f = charpoly(m);
    CycInt c0 = f.coeff(0);
    return (m.dim % 2 == 0) ? c0 : cyc_neg(c0);
}

RingMatrix mat_inverse_unit(const RingMatrix& m) {
    // f(M) = 0 gives M^{-1} = -c_0^{-1} (M^{d-1} + c_{d-1} M^{d-2} + ... + c_1 I),
    // and a unit of norm 1 has inverse conj(c_0).
    CycPoly f = charpoly(m);
    const CycInt c0 = f.coeff(0);
    if (cyc_norm(c0) != 1) throw std::invalid_argument("matrix determinant is not a unit");
    RingMatrix acc(m.level, m.dim);
    RingMatrix pw = RingMatrix::identity(m.level, m.dim);
    for (int j = 1; j <= m.dim; ++j) {
        const CycInt cj = f.coeff(j);
        for (std::size_t e = 0; e < acc.entries.size(); ++e)
            acc.entries[e] = cyc_add(acc.entries[e], cyc_mul(cj, pw.entries[e]));
        if (j < m.dim) pw = mat_mul(pw, m);
    }
    const CycInt scale = cyc_neg(cyc_conj(c0));
    for (CycInt& e : acc.entries) e = cyc_mul(scale, e);
    return acc;
}

RingMatrix mat_to_level(const RingMatrix& m, int level) {
    RingMatrix out(level, m.dim);
    for (std::size_t i = 0; i < m.entries.size(); ++i)
        out.entries[i] = lift_to_level(m.entries[i], level);
    return out;
}

RingMatrix restrict_scalars(const RingMatrix& m) {
    if (m.level != 3) throw std::invalid_argument("restrict_scalars expects level 3");
    RingMatrix out(2, 2 * m.dim);
    for (int i = 0; i < m.dim; ++i)
        for (int j = 0; j < m.dim; ++j) {
            std::array<mpz_class, 4> b = psi(m.at(i, j));
            out.at(2 * i, 2 * j) = CycInt::integer(2, b[0]);
            out.at(2 * i, 2 * j + 1) = CycInt::integer(2, b[1]);
            out.at(2 * i + 1, 2 * j) = CycInt::integer(2, b[2]);
            out.at(2 * i + 1, 2 * j + 1) = CycInt::integer(2, b[3]);
        }
    return out;
}

CycPoly charpoly(const RingMatrix& m) {
    const int d = m.dim;
    if (d < 1) throw std::invalid_argument("charpoly needs dimension >= 1");
    const int lv = m.level;
    // Berkowitz: p_r = T_r p_{r-1} where T_r is the (r+1) x r Toeplitz
    // matrix with first column (1, -a, -s_0, ..., -s_{r-2}),
    // a = M[r-1][r-1], s_k = R M_{r-1}^k C.
    std::vector<CycInt> p{lone(lv)};  // leading coefficient first
    for (int r = 1; r <= d; ++r) {
        std::vector<CycInt> col;
        col.reserve(r + 1);
        col.push_back(lone(lv));
        col.push_back(cyc_neg(m.at(r - 1, r - 1)));
        if (r >= 2) {
            std::vector<CycInt> u(r - 1);
            for (int i = 0; i < r - 1; ++i) u[i] = m.at(i, r - 1);
            for (int k = 0; k <= r - 2; ++k) {
                CycInt s = lzero(lv);
                for (int j = 0; j < r - 1; ++j)
                    s = cyc_add(s, cyc_mul(m.at(r - 1, j), u[j]));
                col.push_back(cyc_neg(s));
                if (k <= r - 3) {
                    std::vector<CycInt> v(r - 1, lzero(lv));
                    for (int i = 0; i < r - 1; ++i)
                        for (int j = 0; j < r - 1; ++j)
                            v[i] = cyc_add(v[i], cyc_mul(m.at(i, j), u[j]));
                    u = std::move(v);
                }
            }
        }
        std::vector<CycInt> q(r + 1, lzero(lv));
        for (int j = 0; j < r; ++j)
            for (int i = j; i <= r; ++i)
                q[i] = cyc_add(q[i], cyc_mul(col[i - j], p[j]));
        p = std::move(q);
    }
    std::vector<CycInt> asc(p.rbegin(), p.rend());
    return make_poly(lv, std::move(asc));
}

mpz_class det_bareiss(int dim, std::vector<mpz_class> a) {
    if (dim < 0 || a.size() != static_cast<std::size_t>(dim) * dim)
        throw std::invalid_argument("det_bareiss shape mismatch");
    if (dim == 0) return 1;
    auto at = [&](int i, int j) -> mpz_class& {
        return a[static_cast<std::size_t>(i) * dim + j];
    };
    mpz_class prev = 1;
    int sign = 1;
    for (int k = 0; k < dim - 1; ++k) {
        if (at(k, k) == 0) {
            int piv = -1;
            for (int i = k + 1; i < dim; ++i)
                if (at(i, k) != 0) {
                    piv = i;
                    break;
                }
            if (piv < 0) return 0;
            for (int j = k; j < dim; ++j) std::swap(at(k, j), at(piv, j));
            sign = -sign;
        }
        for (int i = k + 1; i < dim; ++i) {
            for (int j = k + 1; j < dim; ++j) {
                mpz_class t = at(i, j) * at(k, k) - at(i, k) * at(k, j);
                mpz_divexact(at(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            at(i, k) = 0;
        }
        prev = at(k, k);
    }
    return sign > 0 ? at(dim - 1, dim - 1) : mpz_class(-at(dim - 1, dim - 1));
}

mpz_class discriminant(const CycPoly& f) {
    if (f.level != 2 || !is_integer_poly(f)) throw std::invalid_argument("discriminant needs an integer polynomial");
    if (!f.is_monic() || f.degree() < 1) throw std::invalid_argument("discriminant needs a monic polynomial of degree >= 1");
    const int d = f.degree();
    const CycPoly df = poly_derivative(f);
    const int n = 2 * d - 1;  // Sylvester dimension for (deg d, deg d-1)
    std::vector<mpz_class> s(static_cast<std::size_t>(n) * n, 0);
    auto put = [&](int i, int j, const mpz_class& v) { s[static_cast<std::size_t>(i) * n + j] = v; };
    for (int i = 0; i < d - 1; ++i)
        for (int k = 0; k <= d; ++k) put(i, i + k, f.coeffs[d - k].a);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k <= d - 1; ++k) put(d - 1 + i, i + k, df.coeff(d - 1 - k).a);
    mpz_class res = det_bareiss(n, std::move(s));
    const int sgn = ((static_cast<long>(d) * (d - 1) / 2) % 2 == 0) ? 1 : -1;
    return sgn > 0 ? res : mpz_class(-res);
}

// ---------------------------------------------------------------------------
// Integer factorization under a budget.

namespace {

constexpr long kTrialLimit = 100000;
constexpr long kPollardBudget = 6000000;
constexpr std::size_t kDivisorCap = 200000;

const std::vector<long>& small_primes() {
    static const std::vector<long> primes = [] {
        std::vector<bool> sieve(kTrialLimit + 1, true);
        std::vector<long> out;
        for (long i = 2; i <= kTrialLimit; ++i) {
            if (!sieve[i]) continue;
            out.push_back(i);
            for (long j = i * i; j <= kTrialLimit; j += i) sieve[j] = false;
        }
        return out;
    }();
    return primes;
}

mpz_class pollard_brent(const mpz_class& n, long c0, long& budget) {
    // n odd composite; returns a nontrivial factor or 0 on budget exhaustion.
    for (long c = c0;; c += 2) {
        mpz_class y = 2, g = 1, q = 1, x, ys;
        long r = 1;
        const long blk = 128;
        while (g == 1) {
            x = y;
            for (long i = 0; i < r; ++i) y = (y * y + c) % n;
            for (long k = 0; k < r && g == 1; k += blk) {
                ys = y;
                const long lim = std::min(blk, r - k);
                for (long i = 0; i < lim; ++i) {
                    y = (y * y + c) % n;
                    q = q * abs(x - y) % n;
                }
                g = gcd(q, n);
                budget -= lim;
                if (budget <= 0) return 0;
            }
            r *= 2;
        }
        if (g == n) {
            do {
                ys = (ys * ys + c) % n;
                g = gcd(mpz_class(abs(x - ys)), n);
            } while (g == 1);
        }
        if (g != n) return g;
        // cycle found the trivial factor; retry with another polynomial
    }
}

void factor_rec(const mpz_class& n, std::map<mpz_class, int>& out, long& budget) {
    if (n == 1) return;
    if (mpz_probab_prime_p(n.get_mpz_t(), 30) > 0) {
        ++out[n];
        return;
    }
    if (mpz_perfect_power_p(n.get_mpz_t())) {
        for (unsigned long e = 2; e <= mpz_sizeinbase(n.get_mpz_t(), 2); ++e) {
            mpz_class root, rem;
            mpz_rootrem(root.get_mpz_t(), rem.get_mpz_t(), n.get_mpz_t(), e);
            if (rem == 0) {
                std::map<mpz_class, int> base;
                factor_rec(root, base, budget);
                for (const auto& [p, k] : base) out[p] += k * static_cast<int>(e);
                return;
            }
        }
    }
    mpz_class d = pollard_brent(n, 1, budget);
    if (d == 0) throw FactorBudgetExceeded("integer factorization budget exceeded for " + n.get_str());
    factor_rec(d, out, budget);
    factor_rec(mpz_class(n / d), out, budget);
}

}  // namespace

std::vector<std::pair<mpz_class, int>> factor_integer(const mpz_class& n) {
    if (n == 0) throw std::invalid_argument("cannot factor 0");
    mpz_class m = abs(n);
    std::map<mpz_class, int> found;
    for (long p : small_primes()) {
        if (m == 1) break;
        if (mpz_class(p) * p > m) break;
        while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            ++found[p];
            mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
        }
    }
    if (m > 1) {
        if (mpz_probab_prime_p(m.get_mpz_t(), 30) > 0) {
            ++found[m];
        } else {
            long budget = kPollardBudget;
            factor_rec(m, found, budget);
        }
    }
    return {found.begin(), found.end()};
}

std::vector<mpz_class> positive_divisors(const mpz_class& n) {
    auto factors = factor_integer(n);
    std::vector<mpz_class> divs{1};
    for (const auto& [p, e] : factors) {
        const std::size_t base = divs.size();
        if (base * (e + 1) > kDivisorCap)
            throw FactorBudgetExceeded("divisor enumeration cap exceeded for " + n.get_str());
        mpz_class pk = 1;
        for (int k = 1; k <= e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < base; ++i) divs.push_back(divs[i] * pk);
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

// ---------------------------------------------------------------------------
// Rabin irreducibility certificate over F_p.

namespace {

using ModPoly = std::vector<long>;  // ascending, reduced mod p, no trailing zeros

void mp_trim(ModPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

ModPoly mp_mulmod(const ModPoly& a, const ModPoly& b, const ModPoly& f, long p) {
    if (a.empty() || b.empty()) return {};
    ModPoly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            c[i + j] = (c[i + j] + a[i] * b[j]) % p;
    // reduce mod monic f
    const std::size_t d = f.size() - 1;
    for (std::size_t i = c.size(); i-- > d;) {
        long q = c[i];
        if (q == 0) continue;
        for (std::size_t j = 0; j <= d; ++j)
            c[i - d + j] = ((c[i - d + j] - q * f[j]) % p + p) % p;
    }
    c.resize(d);
    mp_trim(c);
    return c;
}

ModPoly mp_powmod(ModPoly base, mpz_class e, const ModPoly& f, long p) {
    ModPoly acc{1};
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) acc = mp_mulmod(acc, base, f, p);
        e >>= 1;
        if (e > 0) base = mp_mulmod(base, base, f, p);
    }
    return acc;
}

long inv_mod(long a, long p) {
    long r = 1, b = a % p, e = p - 2;
    while (e > 0) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

ModPoly mp_gcd(ModPoly a, ModPoly b, long p) {
    while (!b.empty()) {
        // a mod b
        const long inv = inv_mod(b.back(), p);
        while (a.size() >= b.size()) {
            long q = a.back() * inv % p;
            const std::size_t off = a.size() - b.size();
            for (std::size_t j = 0; j < b.size(); ++j)
                a[off + j] = ((a[off + j] - q * b[j]) % p + p) % p;
            mp_trim(a);
            if (a.empty()) break;
        }
        std::swap(a, b);
    }
    return a;
}

}  // namespace

bool irreducible_mod_p(const CycPoly& f, long p) {
    if (f.level != 2 || !f.is_monic() || f.degree() < 1)
        throw std::invalid_argument("irreducible_mod_p needs a monic integer polynomial");
    const int d = f.degree();
    ModPoly fp(d + 1);
    for (int i = 0; i <= d; ++i)
        fp[i] = static_cast<long>(mpz_fdiv_ui(f.coeffs[i].a.get_mpz_t(), p));
    if (d == 1) return true;
    const ModPoly t{0, 1};
    // Rabin: t^{p^d} = t mod f, and gcd(t^{p^{d/q}} - t, f) = 1 for primes q | d.
    mpz_class pd;
    mpz_ui_pow_ui(pd.get_mpz_t(), p, d);
    ModPoly xd = mp_powmod(t, pd, fp, p);
    if (xd != t) return false;
    std::vector<int> qs;
    for (int q : {2, 3, 5, 7})
        if (d % q == 0) qs.push_back(q);
    for (int q : qs) {
        mpz_class e;
        mpz_ui_pow_ui(e.get_mpz_t(), p, d / q);
        ModPoly xq = mp_powmod(t, e, fp, p);
        // xq - t
        ModPoly diff = xq;
        if (diff.size() < 2) diff.resize(2, 0);
        diff[1] = ((diff[1] - 1) % p + p) % p;
        mp_trim(diff);
        if (diff.empty()) return false;  // t^{p^{d/q}} = t: proper subfield of roots
        ModPoly g = mp_gcd(fp, diff, p);
        if (g.size() != 1) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Reducibility over Z for monic integer polynomials of degree <= 8.

namespace {

void check_factorable(const CycPoly& f) {
    if (f.level != 2 || !is_integer_poly(f))
        throw std::invalid_argument("reducibility test needs an integer polynomial");
    if (!f.is_monic()) throw std::invalid_argument("reducibility test needs a monic polynomial");
    if (f.degree() < 1 || f.degree() > 8)
        throw std::invalid_argument("reducibility test supports degrees 1..8, got " +
                                    std::to_string(f.degree()));
}

std::optional<mpz_class> find_integer_root(const CycPoly& f) {
    // Any integer root divides the constant term (nonzero here).
    const mpz_class c0 = f.coeff(0).a;
    for (const mpz_class& d : positive_divisors(c0)) {
        for (int sgn : {1, -1}) {
            CycInt r = CycInt::integer(2, sgn > 0 ? d : mpz_class(-d));
            if (poly_eval(f, r).is_zero()) return r.a;
        }
    }
    return std::nullopt;
}

CycPoly linear_factor(const mpz_class& root) {
    return make_poly(2, {CycInt::integer(2, mpz_class(-root)), CycInt::integer(2, 1)});
}

// Degree-4 polynomials with no linear factor split, if at all, as a product
// of two monic quadratics (t^2 + a1 t + b1)(t^2 + a2 t + b2).  Matching
// coefficients: b1 b2 = c0, a1 + a2 = c3, b1 + b2 + a1 a2 = c2,
// a1 b2 + a2 b1 = c1.  Enumerate divisor pairs (b1, b2) and solve the
// quadratic z^2 - c3 z + (c2 - b1 - b2) for a1, a2.
std::optional<CycPoly> quartic_split(const CycPoly& f) {
    const mpz_class c0 = f.coeff(0).a, c1 = f.coeff(1).a, c2 = f.coeff(2).a, c3 = f.coeff(3).a;
    for (const mpz_class& d : positive_divisors(c0)) {
        for (int sgn : {1, -1}) {
            mpz_class b1 = sgn > 0 ? d : mpz_class(-d);
            mpz_class b2 = c0 / b1;
            mpz_class disc = c3 * c3 - 4 * (c2 - b1 - b2);
            if (disc < 0 || !mpz_perfect_square_p(disc.get_mpz_t())) continue;
            mpz_class s;
            mpz_sqrt(s.get_mpz_t(), disc.get_mpz_t());
            for (int rs : {1, -1}) {
                mpz_class num = c3 + (rs > 0 ? s : mpz_class(-s));
                if (mpz_odd_p(num.get_mpz_t())) continue;
                mpz_class a1 = num / 2;
                mpz_class a2 = c3 - a1;
                if (a1 * b2 + a2 * b1 != c1) continue;
                return make_poly(2, {CycInt::integer(2, b1), CycInt::integer(2, a1),
                                     CycInt::integer(2, 1)});
            }
        }
    }
    return std::nullopt;
}

constexpr long kKroneckerTupleCap = 40000000;

}  // namespace

std::optional<CycPoly> kronecker_factor(const CycPoly& f) {
    check_factorable(f);
    const int d = f.degree();
    const int h = d / 2;
    if (h < 1) return std::nullopt;
    // Evaluation points 0, 1, -1, 2, -2, ...; a zero value is an integer root.
    std::vector<mpz_class> pts;
    std::vector<mpz_class> vals;
    for (long q = 0; static_cast<int>(pts.size()) < h + 1; q = q > 0 ? -q : -q + 1) {
        CycInt v = poly_eval(f, CycInt::integer(2, q));
        if (v.is_zero()) return linear_factor(q);
        pts.emplace_back(q);
        vals.push_back(v.a);
    }
    // Signed divisor candidates per point; a factor g has g(e_i) | f(e_i).
    std::vector<std::vector<mpz_class>> cand(h + 1);
    long tuples = 1;
    for (int i = 0; i <= h; ++i) {
        for (const mpz_class& dv : positive_divisors(vals[i])) {
            cand[i].push_back(dv);
            if (i > 0) cand[i].push_back(-dv);  // sign of g fixed via g(e_0) > 0
        }
        tuples *= static_cast<long>(cand[i].size());
        if (tuples > kKroneckerTupleCap)
            throw FactorBudgetExceeded("Kronecker tuple enumeration cap exceeded");
    }
    // Lagrange basis: N_i(t) = prod_{j != i} (t - e_j), denominator d_i.
    std::vector<std::vector<mpz_class>> numer(h + 1);
    std::vector<mpz_class> denom(h + 1);
    for (int i = 0; i <= h; ++i) {
        std::vector<mpz_class> ni{1};
        mpz_class di = 1;
        for (int j = 0; j <= h; ++j) {
            if (j == i) continue;
            std::vector<mpz_class> next(ni.size() + 1, 0);
            for (std::size_t k = 0; k < ni.size(); ++k) {
                next[k + 1] += ni[k];
                next[k] -= ni[k] * pts[j];
            }
            ni = std::move(next);
            di *= pts[i] - pts[j];
        }
        numer[i] = std::move(ni);
        denom[i] = di;
    }
    std::vector<std::size_t> idx(h + 1, 0);
    std::vector<mpq_class> coeff(h + 1);
    while (true) {
        for (int k = 0; k <= h; ++k) coeff[k] = 0;
        for (int i = 0; i <= h; ++i) {
            mpq_class w(cand[i][idx[i]], denom[i]);
            w.canonicalize();
            for (std::size_t k = 0; k < numer[i].size(); ++k) coeff[k] += w * numer[i][k];
        }
        int deg = h;
        while (deg >= 0 && coeff[deg] == 0) --deg;
        if (deg >= 1) {
            bool integral = true;
            for (int k = 0; k <= deg && integral; ++k)
                integral = coeff[k].get_den() == 1;
            if (integral && abs(coeff[deg].get_num()) == 1) {
                std::vector<CycInt> gc;
                gc.reserve(deg + 1);
                const bool flip = coeff[deg].get_num() < 0;
                for (int k = 0; k <= deg; ++k) {
                    mpz_class v = coeff[k].get_num();
                    gc.push_back(CycInt::integer(2, flip ? mpz_class(-v) : v));
                }
                CycPoly g = make_poly(2, std::move(gc));
                auto [q, r] = poly_divmod_monic(f, g);
                if (r.is_zero()) return g;
            }
        }
        int pos = 0;
        while (pos <= h && ++idx[pos] == cand[pos].size()) idx[pos++] = 0;
        if (pos > h) break;
    }
    return std::nullopt;
}

std::optional<CycPoly> find_monic_factor(const CycPoly& f, const std::vector<long>& primes) {
    check_factorable(f);
    const int d = f.degree();
    if (d == 1) return std::nullopt;
    if (f.coeff(0).is_zero()) return CycPoly::t(2);
    if (auto root = find_integer_root(f)) return linear_factor(*root);
    // With no integer root, monic cubics and quadratics are irreducible and
    // quartics can only split 2+2.
    if (d <= 3) return std::nullopt;
    if (d == 4) return quartic_split(f);
    for (long p : primes)
        if (irreducible_mod_p(f, p)) return std::nullopt;
    return kronecker_factor(f);
}

bool is_reducible_over_Z(const CycPoly& f, CycPoly* factor, const std::vector<long>& primes) {
    auto g = find_monic_factor(f, primes);
    if (g && factor) *factor = *g;
    return g.has_value();
}

namespace {

bool poly_less(const CycPoly& a, const CycPoly& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    for (int i = a.degree(); i >= 0; --i) {
        const CycInt x = a.coeff(i), y = b.coeff(i);
        if (x.a != y.a) return x.a < y.a;
        if (x.b != y.b) return x.b < y.b;
    }
    return false;
}

void factor_rec_poly(const CycPoly& f, std::vector<CycPoly>& out) {
    if (f.degree() < 1) return;
    auto g = find_monic_factor(f);
    if (!g) {
        out.push_back(f);
        return;
    }
    auto [q, r] = poly_divmod_monic(f, *g);
    if (!r.is_zero()) throw std::logic_error("factor does not divide");
    factor_rec_poly(*g, out);
    factor_rec_poly(q, out);
}

}  // namespace

std::vector<CycPoly> factor_monic_over_Z(const CycPoly& f) {
    check_factorable(f);
    std::vector<CycPoly> out;
    factor_rec_poly(f, out);
    std::sort(out.begin(), out.end(), poly_less);
    return out;
}

// ---------------------------------------------------------------------------
// Text forms.

namespace {

std::string cyc_explicit(const CycInt& c) {
    std::string out = "(" + c.a.get_str();
    out += c.b < 0 ? "-" : "+";
    out += mpz_class(abs(c.b)).get_str() + "*w)";
    return out;
}

std::string monomial(int k) {
    if (k == 0) return "";
    if (k == 1) return "t";
    return "t^" + std::to_string(k);
}

}  // namespace

std::string poly_to_string(const CycPoly& f) {
    if (f.is_zero()) return "0";
    std::string out;
    for (int k = f.degree(); k >= 0; --k) {
        const CycInt c = f.coeff(k);
        if (c.is_zero()) continue;
        const bool neg = c.a < 0 || (c.a == 0 && c.b < 0);
        const CycInt mag = neg ? cyc_neg(c) : c;
        if (out.empty()) {
            if (neg) out += "-";
        } else {
            out += neg ? " - " : " + ";
        }
        std::string cs;
        if (!is_rational(mag))
            cs = cyc_explicit(mag);
        else if (mag.a != 1 || k == 0)
            cs = mag.a.get_str();
        if (k == 0) {
            out += cs;
        } else {
            if (!cs.empty()) cs += "*";
            out += cs + monomial(k);
        }
    }
    return out;
}

CycPoly poly_from_string(int level, const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw std::invalid_argument("empty polynomial literal");
    if (s == "0") return CycPoly::zero(level);
    std::map<int, CycInt> terms;
    std::size_t pos = 0;
    while (pos < s.size()) {
        bool neg = false;
        while (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
            if (s[pos] == '-') neg = !neg;
            ++pos;
        }
        if (pos >= s.size()) throw std::invalid_argument("trailing sign in: " + text);
        CycInt coeff = CycInt::integer(level, 1);
        bool saw_coeff = false;
        if (s[pos] == '(') {
            std::size_t close = s.find(')', pos);
            if (close == std::string::npos) throw std::invalid_argument("unbalanced ( in: " + text);
            coeff = cyc_from_string(level, s.substr(pos + 1, close - pos - 1));
            pos = close + 1;
            saw_coeff = true;
        } else if (std::isdigit(static_cast<unsigned char>(s[pos]))) {
            std::string digits;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
                digits += s[pos++];
            coeff = CycInt::integer(level, mpz_class(digits));
            saw_coeff = true;
        } else if (s[pos] == 'w') {
            coeff = cyc_from_string(level, "w");
            ++pos;
            saw_coeff = true;
        }
        if (pos < s.size() && s[pos] == '*') ++pos;
        int deg = 0;
        if (pos < s.size() && s[pos] == 't') {
            ++pos;
            deg = 1;
            if (pos < s.size() && s[pos] == '^') {
                ++pos;
                std::string digits;
                while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
                    digits += s[pos++];
                if (digits.empty()) throw std::invalid_argument("missing exponent in: " + text);
                deg = std::stoi(digits);
            }
        } else if (!saw_coeff) {
            throw std::invalid_argument("cannot parse term in: " + text);
        }
        if (neg) coeff = cyc_neg(coeff);
        auto [it, fresh] = terms.try_emplace(deg, coeff);
        if (!fresh) it->second = cyc_add(it->second, coeff);
    }
    int dmax = terms.rbegin()->first;
    std::vector<CycInt> coeffs(dmax + 1, lzero(level));
    for (const auto& [k, c] : terms) coeffs[k] = c;
    return make_poly(level, std::move(coeffs));
}

std::string matrix_to_string(const RingMatrix& m) {
    std::string out = "[";
    for (int i = 0; i < m.dim; ++i) {
        out += i ? ", [" : "[";
        for (int j = 0; j < m.dim; ++j) {
            if (j) out += ", ";
            out += cyc_to_string(m.at(i, j));
        }
        out += "]";
    }
    return out + "]";
}

}  // namespace torwalk

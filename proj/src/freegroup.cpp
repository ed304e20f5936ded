#include "torwalk/freegroup.hpp"

#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace torwalk {

namespace {

void check_letter(int rank, int letter) {
    if (letter == 0 || std::abs(letter) > rank)
        throw std::invalid_argument("generator index out of range 1.." + std::to_string(rank));
}

// Push a letter onto a reduced buffer, cancelling against the top.
void push_reduced(std::vector<int>& buf, int letter) {
    if (!buf.empty() && buf.back() == -letter)
        buf.pop_back();
    else
        buf.push_back(letter);
}

void check_ranks(int a, int b) {
    if (a != b) throw std::invalid_argument("rank mismatch");
}

}  // namespace

Word reduce(int rank, std::span<const int> raw) {
    Word w;
    w.rank = rank;
    w.letters.reserve(raw.size());
    for (int l : raw) {
        check_letter(rank, l);
        push_reduced(w.letters, l);
    }
    return w;
}

Word generator_word(int rank, int letter) {
    check_letter(rank, letter);
    return Word{rank, {letter}};
}

Word word_multiply(const Word& a, const Word& b) {
    check_ranks(a.rank, b.rank);
    Word r;
    r.rank = a.rank;
    r.letters = a.letters;
    r.letters.reserve(a.letters.size() + b.letters.size());
    for (int l : b.letters) push_reduced(r.letters, l);
    return r;
}

Word word_invert(const Word& a) {
    Word r;
    r.rank = a.rank;
    r.letters.reserve(a.letters.size());
    for (auto it = a.letters.rbegin(); it != a.letters.rend(); ++it) r.letters.push_back(-*it);
    return r;
}

std::string word_to_string(const Word& w) {
    std::string out;
    for (size_t i = 0; i < w.letters.size(); ++i) {
        if (i) out += ' ';
        int l = w.letters[i];
        out += 'x';
        out += std::to_string(std::abs(l));
        if (l < 0) out += "^-1";
    }
    return out;
}

Word word_from_string(int rank, const std::string& text) {
    std::vector<int> raw;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        if (tok == "1") continue;  // identity token
        if (tok.size() < 2 || tok[0] != 'x')
            throw std::invalid_argument("bad word token '" + tok + "'");
        size_t pos = 1;
        size_t caret = tok.find('^');
        std::string idx = tok.substr(pos, (caret == std::string::npos ? tok.size() : caret) - pos);
        if (idx.empty() || idx.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("bad generator index in '" + tok + "'");
        int i = std::stoi(idx);
        long exp = 1;
        if (caret != std::string::npos) {
            std::string e = tok.substr(caret + 1);
            size_t used = 0;
            try {
                exp = std::stol(e, &used);
            } catch (const std::exception&) {
                throw std::invalid_argument("bad exponent in '" + tok + "'");
            }
            if (used != e.size() || exp == 0)
                throw std::invalid_argument("bad exponent in '" + tok + "'");
        }
        int letter = exp > 0 ? i : -i;
        check_letter(rank, letter);
        for (long j = 0; j < std::labs(exp); ++j) raw.push_back(letter);
    }
    return reduce(rank, raw);
}

Automorphism identity_automorphism(int rank) {
    Automorphism a;
    a.rank = rank;
    for (int i = 1; i <= rank; ++i) a.images.push_back(generator_word(rank, i));
    a.inverse_images = a.images;
    return a;
}

Automorphism inner_automorphism(const Word& w) {
    Automorphism a;
    a.rank = w.rank;
    Word winv = word_invert(w);
    std::vector<Word> inv;
    for (int i = 1; i <= w.rank; ++i) {
        Word x = generator_word(w.rank, i);
        a.images.push_back(word_multiply(word_multiply(winv, x), w));
        inv.push_back(word_multiply(word_multiply(w, x), winv));
    }
    a.inverse_images = std::move(inv);
    return a;
}

Automorphism nielsen_swap(int rank, int i, int j) {
    Automorphism a = identity_automorphism(rank);
    std::swap(a.images[i - 1], a.images[j - 1]);
    a.inverse_images = a.images;
    return a;
}

Automorphism nielsen_inversion(int rank, int i) {
    Automorphism a = identity_automorphism(rank);
    a.images[i - 1] = word_invert(a.images[i - 1]);
    a.inverse_images = a.images;
    return a;
}

Automorphism nielsen_transvection(int rank, int i, int j, int sign) {
    if (i == j) throw std::invalid_argument("transvection needs distinct indices");
    Automorphism a = identity_automorphism(rank);
    a.images[i - 1] = reduce(rank, std::vector<int>{i, sign > 0 ? j : -j});
    auto inv = a.images;
    inv[i - 1] = reduce(rank, std::vector<int>{i, sign > 0 ? -j : j});
    a.inverse_images = std::move(inv);
    return a;
}

Automorphism invert(const Automorphism& a) {
    if (!a.inverse_images) throw std::invalid_argument("automorphism has no inverse images");
    Automorphism r;
    r.rank = a.rank;
    r.images = *a.inverse_images;
    r.inverse_images = a.images;
    return r;
}

Word apply(const Automorphism& phi, const Word& w) {
    check_ranks(phi.rank, w.rank);
    std::vector<int> buf;
    for (int l : w.letters) {
        const Word& img = phi.images[std::abs(l) - 1];
        if (l > 0) {
            for (int m : img.letters) push_reduced(buf, m);
        } else {
            for (auto it = img.letters.rbegin(); it != img.letters.rend(); ++it)
                push_reduced(buf, -*it);
        }
    }
    return Word{w.rank, std::move(buf)};
}

Automorphism compose(const Automorphism& phi, const Automorphism& psi) {
    check_ranks(phi.rank, psi.rank);
    Automorphism r;
    r.rank = phi.rank;
    for (const Word& w : psi.images) r.images.push_back(apply(phi, w));
    if (phi.inverse_images && psi.inverse_images) {
        Automorphism psi_inv;
        psi_inv.rank = psi.rank;
        psi_inv.images = *psi.inverse_images;
        std::vector<Word> inv;
        for (const Word& w : *phi.inverse_images) inv.push_back(apply(psi_inv, w));
        r.inverse_images = std::move(inv);
    }
    return r;
}

AbelianMatrix AbelianMatrix::identity(int n) {
    AbelianMatrix m;
    m.n = n;
    m.entries.assign(static_cast<size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

bool AbelianMatrix::is_identity() const {
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (at(i, j) != (i == j ? 1 : 0)) return false;
    return true;
}

AbelianMatrix abelian_multiply(const AbelianMatrix& a, const AbelianMatrix& b) {
    if (a.n != b.n) throw std::invalid_argument("dimension mismatch");
    AbelianMatrix r;
    r.n = a.n;
    r.entries.assign(static_cast<size_t>(a.n) * a.n, 0);
    for (int i = 0; i < a.n; ++i)
        for (int k = 0; k < a.n; ++k) {
            if (a.at(i, k) == 0) continue;
            for (int j = 0; j < a.n; ++j) r.at(i, j) += a.at(i, k) * b.at(k, j);
        }
    return r;
}

AbelianMatrix abelianization_matrix(const Automorphism& phi) {
    AbelianMatrix m;
    m.n = phi.rank;
    m.entries.assign(static_cast<size_t>(phi.rank) * phi.rank, 0);
    for (int j = 0; j < phi.rank; ++j)
        for (int l : phi.images[j].letters) m.at(std::abs(l) - 1, j) += (l > 0 ? 1 : -1);
    return m;
}

bool is_in_torelli(const Automorphism& phi) {
    return abelianization_matrix(phi).is_identity();
}

std::vector<Automorphism> magnus_generators(int n) {
    if (n < 3) throw std::invalid_argument("Magnus generators require rank >= 3");
    std::vector<Automorphism> gens;
    // K_{ab}: x_a -> x_b^-1 x_a x_b
    for (int a = 1; a <= n; ++a)
        for (int b = 1; b <= n; ++b) {
            if (a == b) continue;
            Automorphism g = identity_automorphism(n);
            g.images[a - 1] = reduce(n, std::vector<int>{-b, a, b});
            auto inv = g.images;
            inv[a - 1] = reduce(n, std::vector<int>{b, a, -b});
            g.inverse_images = std::move(inv);
            gens.push_back(std::move(g));
        }
    // K_{abc}: x_a -> x_a [x_b, x_c], [u,v] = u^-1 v^-1 u v
    for (int a = 1; a <= n; ++a)
        for (int b = 1; b <= n; ++b) {
            if (b == a) continue;
            for (int c = b + 1; c <= n; ++c) {
                if (c == a) continue;
                Automorphism g = identity_automorphism(n);
                g.images[a - 1] = reduce(n, std::vector<int>{a, -b, -c, b, c});
                auto inv = g.images;
                inv[a - 1] = reduce(n, std::vector<int>{a, -c, -b, c, b});
                g.inverse_images = std::move(inv);
                gens.push_back(std::move(g));
            }
        }
    return gens;
}

std::vector<std::string> magnus_generator_names(int n) {
    if (n < 3) throw std::invalid_argument("Magnus generators require rank >= 3");
    std::vector<std::string> names;
    for (int a = 1; a <= n; ++a)
        for (int b = 1; b <= n; ++b)
            if (a != b) names.push_back("K" + std::to_string(a) + std::to_string(b));
    for (int a = 1; a <= n; ++a)
        for (int b = 1; b <= n; ++b) {
            if (b == a) continue;
            for (int c = b + 1; c <= n; ++c)
                if (c != a)
                    names.push_back("K" + std::to_string(a) + std::to_string(b) + std::to_string(c));
        }
    return names;
}

}  // namespace torwalk

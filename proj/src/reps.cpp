#include "torwalk/reps.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "torwalk/version.hpp"

namespace torwalk {

namespace {

int mod_s(long v, int s) {
    int r = static_cast<int>(v % s);
    return r < 0 ? r + s : r;
}

void check_level_s(int s) {
    if (s != 2 && s != 3) throw std::invalid_argument("level must be 2 or 3");
}

}  // namespace

KernelDescriptor::KernelDescriptor(int s_, int n_, std::vector<int> weights_)
    : s(s_), n(n_), weights(std::move(weights_)) {
    check_level_s(s);
    if (n < 2) throw std::invalid_argument("kernel rank must be >= 2");
    if (static_cast<int>(weights.size()) != n)
        throw std::invalid_argument("kernel weight count must equal rank");
    bool nonzero = false;
    for (int& a : weights) {
        a = mod_s(a, s);
        nonzero = nonzero || a != 0;
    }
    if (!nonzero) throw std::invalid_argument("kernel weights must not all vanish");
}

bool KernelDescriptor::canonical() const {
    for (int a : weights)
        if (a != 0) return a == 1;
    return false;
}

bool KernelDescriptor::is_standard() const {
    for (int i = 0; i + 1 < n; ++i)
        if (weights[i] != 0) return false;
    return weights[n - 1] == 1;
}

KernelDescriptor KernelDescriptor::standard(int s, int n) {
    std::vector<int> w(n, 0);
    w[n - 1] = 1;
    return KernelDescriptor(s, n, std::move(w));
}

std::string KernelDescriptor::label() const {
    std::string out = "s" + std::to_string(s) + ":";
    for (int a : weights) out += static_cast<char>('0' + a);
    return out;
}

int chi_eval(const KernelDescriptor& chi, const Word& w) {
    if (w.rank != chi.n) throw std::invalid_argument("chi_eval rank mismatch");
    long acc = 0;
    for (int letter : w.letters) {
        int idx = std::abs(letter) - 1;
        acc += letter > 0 ? chi.weights[idx] : -chi.weights[idx];
    }
    return mod_s(acc, chi.s);
}

std::vector<KernelDescriptor> enumerate_kernels(int n, int s) {
    check_level_s(s);
    std::vector<KernelDescriptor> out;
    long total = 1;
    for (int i = 0; i < n; ++i) total *= s;
    for (long v = 1; v < total; ++v) {
        std::vector<int> w(n);
        long rest = v;
        for (int i = n - 1; i >= 0; --i) {
            w[i] = static_cast<int>(rest % s);
            rest /= s;
        }
        KernelDescriptor chi(s, n, std::move(w));
        if (chi.canonical()) out.push_back(std::move(chi));
    }
    return out;
}

Automorphism standardizing_automorphism(const KernelDescriptor& chi) {
    const int n = chi.n;
    Automorphism sigma = identity_automorphism(n);
    std::vector<int> w = chi.weights;
    auto push = [&](const Automorphism& tau) {
        sigma = compose(sigma, tau);
        std::vector<int> nw(n);
        for (int i = 0; i < n; ++i) {
            long acc = 0;
            for (int letter : tau.images[i].letters) {
                int idx = std::abs(letter) - 1;
                acc += letter > 0 ? w[idx] : -w[idx];
            }
            nw[i] = mod_s(acc, chi.s);
        }
        w = std::move(nw);
    };
    if (w[n - 1] == 0) {
        int p = n - 1;
        while (p >= 0 && w[p] == 0) --p;
        push(nielsen_swap(n, p + 1, n));
    }
    if (w[n - 1] != 1) push(nielsen_inversion(n, n));
    for (int i = 0; i < n - 1; ++i)
        while (w[i] != 0) push(nielsen_transvection(n, i + 1, n, -1));
    return sigma;
}

// ---------------------------------------------------------------------------
// Schreier rewriting.  Transversal for the standard kernel: t_0 = 1 and
// t_c = x_n^{c-s} for 0 < c < s.  With these representatives the symbol
// t_c x_k t_c^{-1} is exactly y_{k,(s-c) mod s}, each x_n crossing 0 -> 1
// contributes z, and every other x_n step is silent.

namespace {

int y_sym(int s, int k, int i) { return 2 + (k - 1) * s + i; }

void push_sym(std::vector<int>& syms, int sym) {
    if (!syms.empty() && syms.back() == -sym)
        syms.pop_back();
    else
        syms.push_back(sym);
}

}  // namespace

std::string schreier_to_string(const SchreierWord& sw) {
    if (sw.syms.empty()) return "1";
    std::string out;
    for (int sym : sw.syms) {
        if (!out.empty()) out += " ";
        int id = std::abs(sym);
        if (id == 1)
            out += "z";
        else {
            int k = (id - 2) / sw.s + 1;
            int i = (id - 2) % sw.s;
            out += "y" + std::to_string(k) + "," + std::to_string(i);
        }
        if (sym < 0) out += "^-1";
    }
    return out;
}

SchreierWord rewrite(const Word& w, int s) {
    check_level_s(s);
    const int n = w.rank;
    KernelDescriptor std_chi = KernelDescriptor::standard(s, n);
    if (chi_eval(std_chi, w) != 0)
        throw std::invalid_argument("rewrite: word lies outside the standard kernel");
    SchreierWord out{n, s, {}};
    int c = 0;
    for (int letter : w.letters) {
        int k = std::abs(letter);
        if (k < n) {
            int i = (s - c) % s;
            int sym = y_sym(s, k, i);
            push_sym(out.syms, letter > 0 ? sym : -sym);
        } else if (letter > 0) {
            if (c == 0) push_sym(out.syms, 1);
            c = (c + 1) % s;
        } else {
            if (c == 1) push_sym(out.syms, -1);
            c = (c + s - 1) % s;
        }
    }
    return out;
}

Word expand(const SchreierWord& sw) {
    std::vector<int> letters;
    for (int sym : sw.syms) {
        int id = std::abs(sym);
        std::vector<int> piece;
        if (id == 1) {
            piece.assign(sw.s, sw.n);
        } else {
            int k = (id - 2) / sw.s + 1;
            int i = (id - 2) % sw.s;
            for (int j = 0; j < i; ++j) piece.push_back(-sw.n);
            piece.push_back(k);
            for (int j = 0; j < i; ++j) piece.push_back(sw.n);
        }
        if (sym < 0) {
            std::reverse(piece.begin(), piece.end());
            for (int& l : piece) l = -l;
        }
        letters.insert(letters.end(), piece.begin(), piece.end());
    }
    return reduce(sw.n, letters);
}

AbelianVector abelianize(const SchreierWord& sw) {
    AbelianVector v;
    v.n = sw.n;
    v.s = sw.s;
    v.c.assign(static_cast<std::size_t>(sw.n - 1) * sw.s, 0);
    v.cz = 0;
    for (int sym : sw.syms) {
        int id = std::abs(sym);
        int d = sym > 0 ? 1 : -1;
        if (id == 1)
            v.cz += d;
        else
            v.c[id - 2] += d;
    }
    return v;
}

bool in_ker_alpha(const AbelianVector& v) {
    if (v.cz != 0) return false;
    for (int k = 0; k < v.n - 1; ++k) {
        mpz_class row = 0;
        for (int i = 0; i < v.s; ++i) row += v.c[static_cast<std::size_t>(k) * v.s + i];
        if (row != 0) return false;
    }
    return true;
}

std::vector<CycInt> module_coordinates(const AbelianVector& v) {
    if (!in_ker_alpha(v))
        throw std::invalid_argument(
            "module_coordinates: vector outside ker(alpha); "
            "the automorphism is not in T_n or rewriting broke");
    std::vector<CycInt> out;
    out.reserve(v.n - 1);
    for (int k = 0; k < v.n - 1; ++k) {
        // y_{k,i} - y_{k,i+1} = xi^i d_k, so the coefficient of xi^i is the
        // partial sum c_{k,0} + ... + c_{k,i}.
        mpz_class run = 0;
        CycInt coord = CycInt::integer(v.s, 0);
        for (int i = 0; i + 1 < v.s; ++i) {
            run += v.c[static_cast<std::size_t>(k) * v.s + i];
            if (i == 0)
                coord.a = run;
            else
                coord.b = run;
        }
        out.push_back(std::move(coord));
    }
    return out;
}

namespace {

RingMatrix rho_standard(const Automorphism& phi, int s) {
    const int n = phi.rank;
    RingMatrix m(s, n - 1);
    for (int k = 1; k < n; ++k) {
        // d_k = y_{k,0} y_{k,1}^{-1} = x_k x_n^{-1} x_k^{-1} x_n
        Word dk = reduce(n, std::array{k, -n, -k, n});
        Word image = apply(phi, dk);
        std::vector<CycInt> col = module_coordinates(abelianize(rewrite(image, s)));
        for (int i = 0; i < n - 1; ++i) m.at(i, k - 1) = col[i];
    }
    return m;
}

}  // namespace

RingMatrix rho(const Automorphism& phi, const KernelDescriptor& chi) {
    if (phi.rank != chi.n) throw std::invalid_argument("rho rank mismatch");
    if (!is_in_torelli(phi))
        throw std::invalid_argument("rho: automorphism is not in the Torelli subgroup");
    if (chi.is_standard()) return rho_standard(phi, chi.s);
    Automorphism sigma = standardizing_automorphism(chi);
    return rho_standard(compose(invert(sigma), compose(phi, sigma)), chi.s);
}

std::vector<const RepBlock*> RepSet::level_blocks(int s) const {
    std::vector<const RepBlock*> out;
    for (const RepBlock& b : blocks)
        if (b.kernel.s == s) out.push_back(&b);
    return out;
}

RepSet build_repset(int n, const std::vector<Automorphism>& generators,
                    const std::vector<std::string>& names) {
    if (generators.size() != names.size())
        throw std::invalid_argument("generator/name count mismatch");
    for (const Automorphism& g : generators)
        if (!is_in_torelli(g))
            throw std::invalid_argument("build_repset: generator outside T_n");
    RepSet rs;
    rs.n = n;
    rs.generator_names = names;
    rs.generators = generators;
    for (int s : {2, 3})
        for (KernelDescriptor& chi : enumerate_kernels(n, s)) {
            Automorphism sigma = standardizing_automorphism(chi);
            rs.blocks.push_back(RepBlock{std::move(chi), std::move(sigma), {}});
        }
    const int ng = static_cast<int>(generators.size());
    const int nb = static_cast<int>(rs.blocks.size());
    for (RepBlock& b : rs.blocks) b.matrices.resize(ng);
    std::vector<Automorphism> inverses;
    inverses.reserve(ng);
    for (const Automorphism& g : generators) inverses.push_back(invert(g));
    std::vector<std::string> failures(static_cast<std::size_t>(nb) * ng);
#pragma omp parallel for collapse(2) schedule(dynamic)
    for (int bi = 0; bi < nb; ++bi)
        for (int gi = 0; gi < ng; ++gi) {
            RepBlock& b = rs.blocks[bi];
            try {
                RingMatrix m = rho(generators[gi], b.kernel);
                RingMatrix mi = rho(inverses[gi], b.kernel);
                if (!mat_mul(m, mi).is_identity())
                    throw std::runtime_error("rho(g) rho(g^-1) != I");
                if (cyc_norm(mat_det(m)) != 1)
                    throw std::runtime_error("det rho(g) is not a unit");
                b.matrices[gi] = std::move(m);
            } catch (const std::exception& e) {
                failures[static_cast<std::size_t>(bi) * ng + gi] = e.what();
            }
        }
    for (int bi = 0; bi < nb; ++bi)
        for (int gi = 0; gi < ng; ++gi) {
            const std::string& f = failures[static_cast<std::size_t>(bi) * ng + gi];
            if (!f.empty())
                throw std::runtime_error("build_repset failed at kernel " +
                                         rs.blocks[bi].kernel.label() + ", generator " +
                                         names[gi] + ": " + f);
        }
    return rs;
}

RepSet build_torelli_repset(int n) {
    return build_repset(n, magnus_generators(n), magnus_generator_names(n));
}

std::uint64_t generator_set_hash(const std::vector<Automorphism>& gens) {
    std::uint64_t h = 1469598103934665603ull;
    auto feed = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= 0x1f;
        h *= 1099511628211ull;
    };
    for (const Automorphism& g : gens) {
        feed(std::to_string(g.rank));
        for (const Word& w : g.images) feed(word_to_string(w));
    }
    return h;
}

namespace {

constexpr const char* kRepSchema = "torwalk.repset/1";

nlohmann::ordered_json matrix_to_json(const RingMatrix& m) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (int i = 0; i < m.dim; ++i) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (int j = 0; j < m.dim; ++j) row.push_back(cyc_to_string(m.at(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

RingMatrix matrix_from_json(const nlohmann::json& rows, int s) {
    const int dim = static_cast<int>(rows.size());
    RingMatrix m(s, dim);
    for (int i = 0; i < dim; ++i) {
        if (static_cast<int>(rows[i].size()) != dim)
            throw std::runtime_error("repset cache: ragged matrix");
        for (int j = 0; j < dim; ++j)
            m.at(i, j) = cyc_from_string(s, rows[i][j].get<std::string>());
    }
    return m;
}

nlohmann::ordered_json automorphism_to_json(const Automorphism& a) {
    nlohmann::ordered_json images = nlohmann::ordered_json::array();
    for (const Word& w : a.images) images.push_back(word_to_string(w));
    return images;
}

Automorphism automorphism_from_json(const nlohmann::json& images, int n) {
    std::vector<Word> imgs;
    for (const auto& w : images) imgs.push_back(word_from_string(n, w.get<std::string>()));
    if (static_cast<int>(imgs.size()) != n)
        throw std::runtime_error("repset cache: automorphism image count mismatch");
    return Automorphism{n, std::move(imgs), std::nullopt};
}

}  // namespace

void save_repset(const RepSet& rs, const std::string& path) {
    nlohmann::ordered_json j;
    j["schema"] = kRepSchema;
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(generator_set_hash(rs.generators)));
    {
        std::time_t now = std::time(nullptr);
        std::tm tm{};
        gmtime_r(&now, &tm);
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
        nlohmann::ordered_json manifest;
        manifest["version"] = kVersion;
        manifest["generator_hash"] = hash;
        manifest["written"] = stamp;  // not part of the hash
        j["manifest"] = std::move(manifest);
    }
    j["n"] = rs.n;
    j["generator_hash"] = hash;
    j["generator_names"] = rs.generator_names;
    nlohmann::ordered_json gens = nlohmann::ordered_json::array();
    for (const Automorphism& g : rs.generators) gens.push_back(automorphism_to_json(g));
    j["generators"] = std::move(gens);
    nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
    for (const RepBlock& b : rs.blocks) {
        nlohmann::ordered_json jb;
        jb["s"] = b.kernel.s;
        jb["weights"] = b.kernel.weights;
        jb["sigma"] = automorphism_to_json(b.sigma);
        nlohmann::ordered_json mats = nlohmann::ordered_json::array();
        for (const RingMatrix& m : b.matrices) mats.push_back(matrix_to_json(m));
        jb["matrices"] = std::move(mats);
        blocks.push_back(std::move(jb));
    }
    j["blocks"] = std::move(blocks);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write repset cache: " + path);
    out << j.dump(1) << "\n";
}

RepSet load_repset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read repset cache: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.value("schema", "") != kRepSchema)
        throw std::runtime_error("repset cache: unknown schema " + j.value("schema", "<none>"));
    RepSet rs;
    rs.n = j.at("n").get<int>();
    rs.generator_names = j.at("generator_names").get<std::vector<std::string>>();
    for (const auto& g : j.at("generators"))
        rs.generators.push_back(automorphism_from_json(g, rs.n));
    for (const auto& jb : j.at("blocks")) {
        RepBlock b;
        int s = jb.at("s").get<int>();
        b.kernel = KernelDescriptor(s, rs.n, jb.at("weights").get<std::vector<int>>());
        b.sigma = automorphism_from_json(jb.at("sigma"), rs.n);
        for (const auto& jm : jb.at("matrices")) b.matrices.push_back(matrix_from_json(jm, s));
        rs.blocks.push_back(std::move(b));
    }
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(generator_set_hash(rs.generators)));
    if (j.value("generator_hash", "") != hash)
        throw std::runtime_error("repset cache: generator hash mismatch");
    return rs;
}

void validate_repset(const RepSet& rs) {
    const int ng = static_cast<int>(rs.generators.size());
    if (static_cast<int>(rs.generator_names.size()) != ng)
        throw std::runtime_error("repset: generator/name count mismatch");
    for (int s : {2, 3}) {
        auto expect = enumerate_kernels(rs.n, s);
        auto have = rs.level_blocks(s);
        if (expect.size() != have.size())
            throw std::runtime_error("repset: kernel count mismatch at s = " + std::to_string(s));
        for (std::size_t i = 0; i < expect.size(); ++i)
            if (!(have[i]->kernel == expect[i]))
                throw std::runtime_error("repset: kernel list mismatch at s = " + std::to_string(s));
    }
    for (const RepBlock& b : rs.blocks) {
        if (static_cast<int>(b.matrices.size()) != ng)
            throw std::runtime_error("repset: matrix count mismatch at " + b.kernel.label());
        for (int i = 0; i < rs.n; ++i) {
            Word img = b.sigma.images[i];
            int want = i == rs.n - 1 ? 1 : 0;
            if (chi_eval(b.kernel, img) != want)
                throw std::runtime_error("repset: sigma fails to standardize " + b.kernel.label());
        }
        for (int gi = 0; gi < ng; ++gi) {
            const RingMatrix& m = b.matrices[gi];
            if (m.dim != rs.n - 1 || m.level != b.kernel.s)
                throw std::runtime_error("repset: matrix shape mismatch at " + b.kernel.label());
            if (cyc_norm(mat_det(m)) != 1)
                throw std::runtime_error("repset: non-unit determinant at " + b.kernel.label() +
                                         ", generator " + rs.generator_names[gi]);
        }
    }
    // Full recomputation on the standard kernels keeps validation cheap while
    // still exercising the whole rho pipeline against the cache.
    for (int s : {2, 3}) {
        KernelDescriptor std_chi = KernelDescriptor::standard(s, rs.n);
        for (const RepBlock* b : rs.level_blocks(s)) {
            if (!(b->kernel == std_chi)) continue;
            for (int gi = 0; gi < ng; ++gi)
                if (!(rho(rs.generators[gi], std_chi) == b->matrices[gi]))
                    throw std::runtime_error("repset: cached rho disagrees with recomputation for " +
                                             rs.generator_names[gi] + " at " + std_chi.label());
        }
    }
}

// ---------------------------------------------------------------------------
// Finite-quotient diagnostic.

namespace {

// Residue field F_q as F_p[x]/(x^2+x+1) when ext, else F_p with omega -> root.
struct FieldSpec {
    int p;
    bool ext;
    int omega;  // image of omega when !ext
};

FieldSpec field_for(int s, int q) {
    if (s == 2) {
        for (int p : {2, 3, 5, 7, 11, 13})
            if (q == p) return {p, false, 0};
        throw std::invalid_argument("level 2 needs a prime q <= 13");
    }
    switch (q) {
        case 4: return {2, true, 0};
        case 25: return {5, true, 0};
        case 7: return {7, false, 2};   // 2^3 = 8 = 1 (mod 7)
        case 13: return {13, false, 3};  // 3^3 = 27 = 1 (mod 13)
        default: throw std::invalid_argument("level 3 needs q in {4, 7, 13, 25}");
    }
}

struct FqMat {
    std::vector<int> v;  // pairs (a, b) per entry
    bool operator==(const FqMat&) const = default;
};

struct FqMatHash {
    std::size_t operator()(const FqMat& m) const {
        std::size_t h = 1469598103934665603ull;
        for (int x : m.v) {
            h ^= static_cast<std::size_t>(x) + 1;
            h *= 1099511628211ull;
        }
        return h;
    }
};

FqMat reduce_matrix(const RingMatrix& m, const FieldSpec& f) {
    FqMat out;
    out.v.reserve(m.entries.size() * 2);
    for (const CycInt& c : m.entries) {
        long a = static_cast<long>(mpz_fdiv_ui(c.a.get_mpz_t(), f.p));
        long b = static_cast<long>(mpz_fdiv_ui(c.b.get_mpz_t(), f.p));
        if (f.ext) {
            out.v.push_back(static_cast<int>(a));
            out.v.push_back(static_cast<int>(b));
        } else {
            out.v.push_back(static_cast<int>((a + b * f.omega) % f.p));
            out.v.push_back(0);
        }
    }
    return out;
}

FqMat fq_mul(const FqMat& x, const FqMat& y, int dim, const FieldSpec& f) {
    FqMat out;
    out.v.assign(static_cast<std::size_t>(dim) * dim * 2, 0);
    for (int i = 0; i < dim; ++i)
        for (int k = 0; k < dim; ++k) {
            const int xa = x.v[2 * (i * dim + k)], xb = x.v[2 * (i * dim + k) + 1];
            if (xa == 0 && xb == 0) continue;
            for (int j = 0; j < dim; ++j) {
                const int ya = y.v[2 * (k * dim + j)], yb = y.v[2 * (k * dim + j) + 1];
                // (xa + xb w)(ya + yb w) with w^2 = -1 - w
                int ra = xa * ya - xb * yb;
                int rb = xa * yb + xb * ya - xb * yb;
                int& oa = out.v[2 * (i * dim + j)];
                int& ob = out.v[2 * (i * dim + j) + 1];
                oa = ((oa + ra) % f.p + f.p) % f.p;
                ob = ((ob + rb) % f.p + f.p) % f.p;
            }
        }
    return out;
}

}  // namespace

mpz_class gl_order(int d, int q) {
    mpz_class qd = 1;
    for (int i = 0; i < d; ++i) qd *= q;
    mpz_class out = 1, qi = 1;
    for (int i = 0; i < d; ++i) {
        out *= qd - qi;
        qi *= q;
    }
    return out;
}

ModPrimeReport mod_prime_image_order(const RepSet& rs, const KernelDescriptor& chi, int q,
                                     std::uint64_t cap) {
    const FieldSpec f = field_for(chi.s, q);
    const RepBlock* block = nullptr;
    for (const RepBlock& b : rs.blocks)
        if (b.kernel == chi) block = &b;
    if (!block) throw std::invalid_argument("kernel not present in RepSet");
    const int dim = rs.n - 1;
    std::vector<FqMat> gens;
    for (const RingMatrix& m : block->matrices) gens.push_back(reduce_matrix(m, f));
    FqMat id;
    id.v.assign(static_cast<std::size_t>(dim) * dim * 2, 0);
    for (int i = 0; i < dim; ++i) id.v[2 * (i * dim + i)] = 1;
    std::unordered_set<FqMat, FqMatHash> seen{id};
    std::vector<FqMat> frontier{id};
    ModPrimeReport rep;
    rep.q = q;
    rep.gl_order = gl_order(dim, q);
    rep.sl_order = rep.gl_order / (q - 1);
    while (!frontier.empty()) {
        std::vector<FqMat> next;
        for (const FqMat& m : frontier)
            for (const FqMat& g : gens) {
                FqMat p = fq_mul(m, g, dim, f);
                if (seen.insert(p).second) {
                    next.push_back(std::move(p));
                    if (seen.size() > cap) {
                        rep.capped = true;
                        rep.order = seen.size();
                        return rep;
                    }
                }
            }
        frontier = std::move(next);
    }
    rep.order = seen.size();
    return rep;
}

}  // namespace torwalk

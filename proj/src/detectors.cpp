#include "torwalk/detectors.hpp"

namespace torwalk {

namespace {

void check_cfg(const DetectorConfig& cfg) {
    if (cfg.power_bound < 1) throw std::invalid_argument("power bound must be >= 1");
}

Witness make_witness(std::string detector, std::optional<KernelDescriptor> kernel, int m,
                     std::string condition, CycPoly poly,
                     std::optional<CycPoly> factor = std::nullopt) {
    return Witness{std::move(detector), std::move(kernel), m, std::move(condition),
                   std::move(poly), std::move(factor)};
}

}  // namespace

nlohmann::ordered_json witness_to_json(const Witness& w) {
    nlohmann::ordered_json j;
    j["detector"] = w.detector;
    if (w.kernel) {
        j["kernel"] = w.kernel->weights;
        j["s"] = w.kernel->s;
    }
    j["m"] = w.m;
    j["condition"] = w.condition;
    j["polynomial"] = poly_to_string(w.poly);
    if (w.factor) j["factor"] = poly_to_string(*w.factor);
    return j;
}

bool verify_witness(const Witness& w, const RingMatrix& g) {
    if (w.condition == "reducible") {
        CycPoly f = charpoly(mat_pow(g, w.m));
        if (!(f == w.poly) || !is_reducible_over_Z(f)) return false;
        if (w.factor) {
            auto [q, r] = poly_divmod_monic(f, *w.factor);
            return r.is_zero();
        }
        return true;
    }
    if (w.condition == "integer-poly") {
        CycPoly f = charpoly(mat_pow(g, w.m));
        return f == w.poly && is_integer_poly(f);
    }
    if (w.condition == "discriminant") {
        RingMatrix e = g.level == 3 ? restrict_scalars(g) : g;
        CycPoly f = charpoly(mat_pow(e, w.m));
        return f == w.poly && discriminant(f) == 0;
    }
    if (w.condition == "trace") return is_rational(mat_trace(mat_pow(g, w.m)));
    return false;
}

std::optional<Witness> iwip_certificate(const RepSet& rs, const std::vector<RingMatrix>& mats,
                                        const DetectorConfig& cfg) {
    check_cfg(cfg);
    if (mats.size() != rs.blocks.size())
        throw std::invalid_argument("iwip_certificate: one matrix per kernel required");
    for (std::size_t b = 0; b < mats.size(); ++b)
        if (mats[b].dim != rs.n - 1 || mats[b].level != rs.blocks[b].kernel.s)
            throw std::invalid_argument("iwip_certificate: matrix shape mismatch at block " +
                                        rs.blocks[b].kernel.label());
    std::vector<RingMatrix> pw(mats.size());
    for (std::size_t b = 0; b < mats.size(); ++b)
        pw[b] = RingMatrix::identity(mats[b].level, mats[b].dim);
    for (int m = 1; m <= cfg.power_bound; ++m) {
        for (std::size_t b = 0; b < mats.size(); ++b) {
            pw[b] = mat_mul(pw[b], mats[b]);
            const KernelDescriptor& chi = rs.blocks[b].kernel;
            CycPoly f = charpoly(pw[b]);
            if (chi.s == 2) {
                CycPoly factor;
                if (is_reducible_over_Z(f, &factor, cfg.primes))
                    return make_witness("iwip", chi, m, "reducible", std::move(f),
                                        std::move(factor));
            } else if (is_integer_poly(f)) {
                return make_witness("iwip", chi, m, "integer-poly", std::move(f));
            }
        }
    }
    return std::nullopt;
}

std::optional<Witness> hyperbolic_certificate(const RepSet& rs,
                                              const std::vector<RingMatrix>& mats,
                                              const DetectorConfig& cfg) {
    check_cfg(cfg);
    if (mats.size() != rs.blocks.size())
        throw std::invalid_argument("hyperbolic_certificate: one matrix per kernel required");
    std::vector<std::size_t> idx;
    for (std::size_t b = 0; b < rs.blocks.size(); ++b)
        if (rs.blocks[b].kernel.s == 2) idx.push_back(b);
    std::vector<RingMatrix> pw;
    for (std::size_t b : idx) pw.push_back(RingMatrix::identity(2, mats[b].dim));
    for (int m = 1; m <= cfg.power_bound; ++m)
        for (std::size_t i = 0; i < idx.size(); ++i) {
            pw[i] = mat_mul(pw[i], mats[idx[i]]);
            CycPoly f = charpoly(pw[i]);
            CycPoly factor;
            if (is_reducible_over_Z(f, &factor, cfg.primes))
                return make_witness("hyperbolic", rs.blocks[idx[i]].kernel, m, "reducible",
                                    std::move(f), std::move(factor));
        }
    return std::nullopt;
}

bool gamma_trace_detector(const RingMatrix& g) { return is_rational(mat_trace(g)); }

std::optional<Witness> gamma_zt_detector(const RingMatrix& g, const DetectorConfig& cfg) {
    check_cfg(cfg);
    if (g.level != 3) throw std::invalid_argument("gamma_zt_detector expects level 3");
    RingMatrix pw = RingMatrix::identity(g.level, g.dim);
    for (int m = 1; m <= cfg.power_bound; ++m) {
        pw = mat_mul(pw, g);
        CycPoly f = charpoly(pw);
        if (is_integer_poly(f))
            return make_witness("gamma_zt", std::nullopt, m, "integer-poly", std::move(f));
    }
    return std::nullopt;
}

std::optional<Witness> gamma_multiroot_detector(const RingMatrix& g, const DetectorConfig& cfg) {
    check_cfg(cfg);
    if (g.level != 3) throw std::invalid_argument("gamma_multiroot_detector expects level 3");
    const RingMatrix e = restrict_scalars(g);
    RingMatrix pw = RingMatrix::identity(2, e.dim);
    for (int m = 1; m <= cfg.power_bound; ++m) {
        pw = mat_mul(pw, e);
        CycPoly f = charpoly(pw);
        if (discriminant(f) == 0)
            return make_witness("gamma_multiroot", std::nullopt, m, "discriminant", std::move(f));
    }
    return std::nullopt;
}

std::optional<Witness> reducible_power_detector(const RingMatrix& g, const DetectorConfig& cfg) {
    check_cfg(cfg);
    if (g.level != 2) throw std::invalid_argument("reducible_power_detector expects level 2");
    RingMatrix pw = RingMatrix::identity(2, g.dim);
    for (int m = 1; m <= cfg.power_bound; ++m) {
        pw = mat_mul(pw, g);
        CycPoly f = charpoly(pw);
        CycPoly factor;
        if (is_reducible_over_Z(f, &factor, cfg.primes))
            return make_witness("reducible_power", std::nullopt, m, "reducible", std::move(f),
                                std::move(factor));
    }
    return std::nullopt;
}

std::optional<std::string> check_zt_containment(const RingMatrix& g, const DetectorConfig& cfg) {
    auto zt = gamma_zt_detector(g, cfg);
    if (!zt) return std::nullopt;
    if (gamma_trace_detector(g)) return std::nullopt;
    const RingMatrix e = restrict_scalars(g);
    RingMatrix pw = RingMatrix::identity(2, e.dim);
    const long bound = static_cast<long>(cfg.power_bound) * zt->m;
    for (long m = 1; m <= bound; ++m) {
        pw = mat_mul(pw, e);
        if (discriminant(charpoly(pw)) == 0) return std::nullopt;
    }
    return "containment violation: charpoly(g^" + std::to_string(zt->m) +
           ") = " + poly_to_string(zt->poly) +
           " is integral, trace(g) = " + cyc_to_string(mat_trace(g)) +
           " is irrational, yet no embedded discriminant vanishes for m <= " +
           std::to_string(bound) + "; g = " + matrix_to_string(g);
}

}  // namespace torwalk

#include "ncamgm/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ncamgm/errors.hpp"
#include "ncamgm/rng.hpp"

namespace ncamgm {

std::string family_name(Family f) {
    switch (f) {
        case Family::wishart: return "wishart";
        case Family::diagonal: return "diagonal";
        case Family::projection_jitter: return "projection_jitter";
        case Family::near_uniform: return "near_uniform";
        case Family::scalar: return "scalar";
    }
    return "unknown";
}

Family parse_family(const std::string& name) {
    if (name == "wishart") return Family::wishart;
    if (name == "diagonal") return Family::diagonal;
    if (name == "projection_jitter") return Family::projection_jitter;
    if (name == "near_uniform") return Family::near_uniform;
    if (name == "scalar") return Family::scalar;
    throw input_error("unknown ensemble family: " + name);
}

Ensemble::Ensemble(std::vector<SymMatrix> members) : members_(std::move(members)) {
    if (members_.empty()) throw input_error("Ensemble: needs at least one member");
    const int d = members_.front().dim();
    for (std::size_t i = 0; i < members_.size(); ++i) {
        if (members_[i].dim() != d)
            throw input_error("Ensemble: member " + std::to_string(i) +
                              " has mismatched dimension");
        const LoewnerCertificate cert = psd_certificate(members_[i]);
        if (!cert.holds)
            throw input_error("Ensemble: member " + std::to_string(i) +
                              " is not PSD (min eigenvalue " + std::to_string(cert.min_eig) + ")");
    }
}

SymMatrix Ensemble::member_sum() const {
    SymMatrix s(dim());
    for (const SymMatrix& m : members_) s += m;
    return s;
}

namespace {

SymMatrix random_gaussian_symmetric(SplitMix64& rng, int d, double scale) {
    Matrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = scale * rng.next_normal();
    return SymMatrix(g);
}

SymMatrix wishart_member(SplitMix64& rng, int d, int p) {
    Matrix g(d, p);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < p; ++j) g(i, j) = rng.next_normal();
    SymMatrix w(d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            double s = 0.0;
            for (int k = 0; k < p; ++k) s += g(i, k) * g(j, k);
            w.set(i, j, s);
        }
    return w;
}

SymMatrix projection_member(SplitMix64& rng, int d, int rank, double ridge) {
    // Orthonormal basis via modified Gram-Schmidt; columns redrawn from the
    // stream if they collapse (measure zero with Gaussian draws).
    Matrix q(d, rank);
    for (int col = 0; col < rank; ++col) {
        while (true) {
            for (int i = 0; i < d; ++i) q(i, col) = rng.next_normal();
            for (int prev = 0; prev < col; ++prev) {
                double dot = 0.0;
                for (int i = 0; i < d; ++i) dot += q(i, col) * q(i, prev);
                for (int i = 0; i < d; ++i) q(i, col) -= dot * q(i, prev);
            }
            double norm = 0.0;
            for (int i = 0; i < d; ++i) norm += q(i, col) * q(i, col);
            norm = std::sqrt(norm);
            if (norm > 1e-8) {
                for (int i = 0; i < d; ++i) q(i, col) /= norm;
                break;
            }
        }
    }
    SymMatrix p(d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            double s = 0.0;
            for (int k = 0; k < rank; ++k) s += q(i, k) * q(j, k);
            p.set(i, j, s + (i == j ? ridge : 0.0));
        }
    return p;
}

}  // namespace

Ensemble generate(const EnsembleSpec& spec) {
    if (spec.n < 1) throw input_error("generate: n must be >= 1");
    if (spec.dim < 1) throw input_error("generate: dim must be >= 1");
    if (spec.family == Family::scalar && spec.dim != 1)
        throw input_error("generate: scalar family requires dim == 1");
    if (spec.jitter < 0.0) throw input_error("generate: jitter must be >= 0");
    if (spec.wishart_dof < 0.0) throw input_error("generate: wishart_dof must be >= 0");
    if (spec.proj_rank < 0 || spec.proj_rank > spec.dim)
        throw input_error("generate: proj_rank must be in [0, dim]");

    SplitMix64 rng(spec.seed);
    std::vector<SymMatrix> members;
    members.reserve(spec.n);
    const int d = spec.dim;

    switch (spec.family) {
        case Family::wishart: {
            const int p = spec.wishart_dof > 0.0
                              ? std::max(1, static_cast<int>(std::lround(spec.wishart_dof)))
                              : d;
            for (int i = 0; i < spec.n; ++i) members.push_back(wishart_member(rng, d, p));
            break;
        }
        case Family::diagonal: {
            for (int i = 0; i < spec.n; ++i) {
                std::vector<double> diag(d);
                for (double& v : diag) v = rng.next_double();
                members.push_back(SymMatrix::diagonal(diag));
            }
            break;
        }
        case Family::projection_jitter: {
            const int rank = spec.proj_rank > 0 ? spec.proj_rank : (d + 1) / 2;
            for (int i = 0; i < spec.n; ++i)
                members.push_back(projection_member(rng, d, rank, spec.jitter));
            break;
        }
        case Family::near_uniform: {
            const double base = 1.0 / spec.n;
            for (int i = 0; i < spec.n; ++i) {
                if (spec.jitter == 0.0) {
                    SymMatrix m(d);
                    for (int k = 0; k < d; ++k) m.set(k, k, base);
                    members.push_back(m);
                    continue;
                }
                SymMatrix m = random_gaussian_symmetric(rng, d, spec.jitter);
                for (int k = 0; k < d; ++k) m.set(k, k, m(k, k) + base);
                // Negative eigenvalues clamp to zero to stay inside the PSD cone.
                members.push_back(
                    spectral_transform(m, [](double x) { return std::max(x, 0.0); }));
            }
            break;
        }
        case Family::scalar: {
            for (int i = 0; i < spec.n; ++i) {
                SymMatrix m(1);
                m.set(0, 0, rng.next_double());
                members.push_back(m);
            }
            break;
        }
    }
    return Ensemble(std::move(members));
}

void save_ensemble(const Ensemble& e, const std::string& path) {
    nlohmann::json j;
    j["version"] = 1;
    j["dim"] = e.dim();
    j["n"] = e.size();
    nlohmann::json mats = nlohmann::json::array();
    for (const SymMatrix& m : e.members()) mats.push_back(m.entries());
    j["matrices"] = std::move(mats);

    std::ofstream out(path);
    if (!out) throw input_error("save_ensemble: cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw input_error("save_ensemble: write to " + path + " failed");
}

Ensemble load_ensemble(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("load_ensemble: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw input_error("load_ensemble: " + path + ": " + ex.what());
    }

    if (!j.is_object() || !j.contains("version") || !j["version"].is_number_integer() ||
        j["version"].get<int>() != 1)
        throw input_error("load_ensemble: " + path + ": missing or unsupported version");
    if (!j.contains("dim") || !j["dim"].is_number_integer() ||
        !j.contains("n") || !j["n"].is_number_integer() ||
        !j.contains("matrices") || !j["matrices"].is_array())
        throw input_error("load_ensemble: " + path + ": missing dim/n/matrices fields");

    const int d = j["dim"].get<int>();
    const int n = j["n"].get<int>();
    if (d < 1 || n < 1) throw input_error("load_ensemble: " + path + ": dim and n must be >= 1");
    if (d > 512 || n > 100000)
        throw input_error("load_ensemble: " + path + ": dim or n beyond supported range");
    if (j["matrices"].size() != static_cast<std::size_t>(n))
        throw input_error("load_ensemble: " + path + ": matrices count " +
                          std::to_string(j["matrices"].size()) + " != n " + std::to_string(n));

    std::vector<SymMatrix> members;
    members.reserve(n);
    for (int k = 0; k < n; ++k) {
        const auto& arr = j["matrices"][k];
        if (!arr.is_array() || arr.size() != static_cast<std::size_t>(d) * d)
            throw input_error("load_ensemble: " + path + ": matrix " + std::to_string(k) +
                              " must hold " + std::to_string(d * d) + " reals");
        std::vector<double> raw(static_cast<std::size_t>(d) * d);
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (!arr[i].is_number())
                throw input_error("load_ensemble: " + path + ": matrix " + std::to_string(k) +
                                  " entry " + std::to_string(i) + " is not a number");
            raw[i] = arr[i].get<double>();
        }
        double max_abs = 0.0;
        for (double v : raw) max_abs = std::max(max_abs, std::abs(v));
        for (int r = 0; r < d; ++r)
            for (int c = r + 1; c < d; ++c) {
                const double asym =
                    std::abs(raw[static_cast<std::size_t>(r) * d + c] -
                             raw[static_cast<std::size_t>(c) * d + r]);
                if (asym > 1e-12 * max_abs) {
                    std::ostringstream msg;
                    msg << "load_ensemble: " << path << ": matrix " << k << " entries (" << r
                        << "," << c << ") and (" << c << "," << r << ") differ by " << asym
                        << " (beyond 1e-12 relative)";
                    throw input_error(msg.str());
                }
            }
        members.emplace_back(d, raw);
    }
    return Ensemble(std::move(members));
}

}  // namespace ncamgm

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncamgm/linalg.hpp"

namespace ncamgm {

enum class Family { wishart, diagonal, projection_jitter, near_uniform, scalar };

std::string family_name(Family f);
Family parse_family(const std::string& name);  // input_error on unknown name

// Deterministic recipe for an ensemble: identical spec, identical matrices,
// bit for bit.
struct EnsembleSpec {
    Family family = Family::wishart;
    int n = 3;
    int dim = 3;
    std::uint64_t seed = 0;

    double wishart_dof = 0.0;  // columns of the Gaussian factor; 0 -> dim
    double jitter = 0.0;       // near_uniform perturbation size / projection ridge
    int proj_rank = 0;         // projection rank; 0 -> (dim + 1) / 2
};

// Ordered list of PSD matrices of a shared dimension. Construction validates
// the shared dimension and a PSD certificate per member.
class Ensemble {
public:
    explicit Ensemble(std::vector<SymMatrix> members);

    int size() const noexcept { return static_cast<int>(members_.size()); }
    int dim() const noexcept { return members_.front().dim(); }
    const SymMatrix& operator[](int i) const { return members_[i]; }
    const std::vector<SymMatrix>& members() const noexcept { return members_; }

    SymMatrix member_sum() const;

private:
    std::vector<SymMatrix> members_;
};

Ensemble generate(const EnsembleSpec& spec);

// JSON file format:
//   {"version": 1, "dim": d, "n": n, "matrices": [[d*d reals, row-major], ...]}
// Reals round-trip exactly; load(save(E)) is bitwise identical.
void save_ensemble(const Ensemble& e, const std::string& path);
Ensemble load_ensemble(const std::string& path);

}  // namespace ncamgm

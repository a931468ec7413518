#include "ncamgm/symsum.hpp"

#include <string>
#include <vector>

#include "ncamgm/errors.hpp"

namespace ncamgm {

std::string sum_mode_name(SumMode mode) {
    switch (mode) {
        case SumMode::brute: return "brute";
        case SumMode::fast: return "fast";
        case SumMode::power: return "power";
    }
    return "unknown";
}

double falling_factorial(int n, int m) {
    double p = 1.0;
    for (int i = 0; i < m; ++i) p *= static_cast<double>(n - i);
    return p;
}

TupleSum full_tuple_sum(const Ensemble& e, int m) {
    if (m < 1) throw input_error("full_tuple_sum: m must be >= 1");
    const Matrix base = e.member_sum().to_matrix();
    Matrix acc = base;
    Matrix scratch(e.dim(), e.dim());
    for (int j = 1; j < m; ++j) {
        multiply_into(acc, base, scratch);
        std::swap(acc, scratch);
    }
    return TupleSum{SymMatrix(acc), m, SumMode::power};
}

namespace {

constexpr int kBruteMaxN = 9;

std::vector<Matrix> member_matrices(const Ensemble& e) {
    std::vector<Matrix> out;
    out.reserve(e.size());
    for (int j = 0; j < e.size(); ++j) out.push_back(e[j].to_matrix());
    return out;
}

// Depth-first walk over ordered injective index tuples, carrying the running
// left-to-right prefix product. prefixes[k] holds the product of the first k
// chosen factors; no allocation inside the recursion.
void brute_distinct_recurse(const std::vector<Matrix>& members, int m, int depth,
                            std::vector<bool>& used, std::vector<Matrix>& prefixes,
                            Matrix& acc) {
    if (depth == m) {
        acc += prefixes[m];
        return;
    }
    for (std::size_t j = 0; j < members.size(); ++j) {
        if (used[j]) continue;
        used[j] = true;
        multiply_into(prefixes[depth], members[j], prefixes[depth + 1]);
        brute_distinct_recurse(members, m, depth + 1, used, prefixes, acc);
        used[j] = false;
    }
}

SymMatrix brute_distinct(const Ensemble& e, int m) {
    const int d = e.dim();
    Matrix acc(d, d);
    std::vector<bool> used(e.size(), false);
    std::vector<Matrix> prefixes(m + 1);
    prefixes[0] = Matrix::identity(d);
    for (int k = 1; k <= m; ++k) prefixes[k] = Matrix(d, d);
    const std::vector<Matrix> members = member_matrices(e);
    brute_distinct_recurse(members, m, 0, used, prefixes, acc);
    return SymMatrix(acc);
}

// Set partitions of {0..m-1} as restricted growth strings: block[p] is the
// block id of position p, block[0] = 0, block[p] <= max(block[0..p-1]) + 1.
void enumerate_partitions(int m, int pos, std::vector<int>& block, int next_id,
                          std::vector<std::vector<int>>& out) {
    if (pos == m) {
        out.push_back(block);
        return;
    }
    for (int b = 0; b <= next_id; ++b) {
        block[pos] = b;
        enumerate_partitions(m, pos + 1, block, std::max(next_id, b + 1), out);
    }
}

double partition_mobius(const std::vector<int>& block, int nblocks) {
    std::vector<int> count(nblocks, 0);
    for (int b : block) ++count[b];
    double mu = 1.0;
    for (int c : count) {
        double f = 1.0;
        for (int i = 2; i < c; ++i) f *= static_cast<double>(i);  // (c-1)!
        mu *= ((c - 1) % 2 == 0 ? 1.0 : -1.0) * f;
    }
    return mu;
}

// Sum over all index assignments constant on each block of the partition.
// Blocks that occur at a single position integrate out to T = sum_j A_j;
// the remaining (repeated) blocks are enumerated explicitly, n^r assignments
// with r <= floor(m/2).
SymMatrix partition_constrained_sum(const std::vector<Matrix>& members, int d,
                                    const std::vector<int>& block, const Matrix& total) {
    const int m = static_cast<int>(block.size());
    const int n = static_cast<int>(members.size());
    int nblocks = 0;
    for (int b : block) nblocks = std::max(nblocks, b + 1);
    std::vector<int> count(nblocks, 0);
    for (int b : block) ++count[b];

    std::vector<int> repeated;  // block ids occurring at >= 2 positions
    for (int b = 0; b < nblocks; ++b)
        if (count[b] >= 2) repeated.push_back(b);

    std::vector<int> assign(repeated.size(), 0);
    std::vector<int> slot(nblocks, -1);
    Matrix acc(d, d);
    Matrix prefix(d, d);
    Matrix scratch(d, d);

    while (true) {
        for (std::size_t r = 0; r < repeated.size(); ++r) slot[repeated[r]] = assign[r];
        prefix = (count[block[0]] == 1) ? total : members[slot[block[0]]];
        for (int p = 1; p < m; ++p) {
            const Matrix& factor = (count[block[p]] == 1) ? total : members[slot[block[p]]];
            multiply_into(prefix, factor, scratch);
            std::swap(prefix, scratch);
        }
        acc += prefix;

        // odometer over repeated-block assignments
        std::size_t r = 0;
        while (r < assign.size() && ++assign[r] == n) assign[r++] = 0;
        if (r == assign.size()) break;
    }
    return SymMatrix(acc);
}

SymMatrix fast_distinct(const Ensemble& e, int m) {
    const int d = e.dim();
    const Matrix total = e.member_sum().to_matrix();
    const std::vector<Matrix> members = member_matrices(e);

    std::vector<std::vector<int>> partitions;
    std::vector<int> block(m, 0);
    enumerate_partitions(m, 1, block, 1, partitions);

    SymMatrix acc(d);
    for (const std::vector<int>& part : partitions) {
        int nblocks = 0;
        for (int b : part) nblocks = std::max(nblocks, b + 1);
        const double mu = partition_mobius(part, nblocks);
        acc += mu * partition_constrained_sum(members, d, part, total);
    }
    return acc;
}

}  // namespace

TupleSum distinct_tuple_sum(const Ensemble& e, int m, SumMode mode) {
    if (m < 1) throw input_error("distinct_tuple_sum: m must be >= 1");
    if (mode == SumMode::power)
        throw input_error("distinct_tuple_sum: mode must be brute or fast");
    if (m > e.size()) return TupleSum{SymMatrix(e.dim()), m, mode};

    if (mode == SumMode::brute) {
        if (e.size() > kBruteMaxN)
            throw input_error("distinct_tuple_sum: brute enumeration capped at n <= " +
                              std::to_string(kBruteMaxN));
        return TupleSum{brute_distinct(e, m), m, SumMode::brute};
    }
    if (m > 4)
        throw input_error("distinct_tuple_sum: fast mode supports m <= 4 (got m = " +
                          std::to_string(m) + ")");
    return TupleSum{fast_distinct(e, m), m, SumMode::fast};
}

SymMatrix permutation_expectation(const Ensemble& e, int m) {
    if (m < 1) throw input_error("permutation_expectation: m must be >= 1");
    if (m > e.size())
        throw input_error("permutation_expectation: undefined for m > n (m = " +
                          std::to_string(m) + ", n = " + std::to_string(e.size()) + ")");
    const SumMode mode = (m <= 4) ? SumMode::fast : SumMode::brute;
    TupleSum sum = distinct_tuple_sum(e, m, mode);
    sum.value *= 1.0 / falling_factorial(e.size(), m);
    return sum.value;
}

}  // namespace ncamgm

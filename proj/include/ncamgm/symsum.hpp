#pragma once

#include "ncamgm/ensemble.hpp"
#include "ncamgm/linalg.hpp"

namespace ncamgm {

enum class SumMode { brute, fast, power };

std::string sum_mode_name(SumMode mode);

struct TupleSum {
    SymMatrix value;
    int order = 0;
    SumMode mode = SumMode::brute;
};

// n * (n-1) * ... * (n-m+1) as an exact double (small arguments only).
double falling_factorial(int n, int m);

// Sum of A_{j1} ... A_{jm} over all n^m ordered index tuples. Equal to
// (sum_j A_j)^m, which is how it is computed (mode tag: power).
TupleSum full_tuple_sum(const Ensemble& e, int m);

// Sum of A_{j1} ... A_{jm} over ordered tuples with all indices distinct.
// brute: direct enumeration of the n(n-1)...(n-m+1) injective tuples (n <= 9).
// fast:  inclusion-exclusion over the set-partition lattice, coefficients
//        prod_B (-1)^{|B|-1} (|B|-1)!; O(n) matrix products for m = 3 and
//        O(n^2) for m = 4 (m <= 4 only).
// m > n yields the zero matrix (empty sum) in either mode.
TupleSum distinct_tuple_sum(const Ensemble& e, int m, SumMode mode = SumMode::fast);

// Exact expectation of A_{i1} ... A_{im} when (i1..in) is a uniformly random
// permutation: the distinct-tuple sum scaled by (n-m)!/n!. Requires m <= n.
SymMatrix permutation_expectation(const Ensemble& e, int m);

}  // namespace ncamgm

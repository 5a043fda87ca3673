#pragma once

// Period-forcing orders on the positive integers: the Sharkovskii order
// (t = 1), Baldwin's orders for t >= 2, and their intersection, which is the
// forcing order of the n-od.

#include <set>

namespace stardyn {

// m precedes-or-equals k in the Sharkovskii order, i.e. period k forces m.
bool sharkovskii_le(long long m, long long k);

// Baldwin's order for t >= 2. When t | k the condition reads
// m = 1 or (t | m and m/t precedes k/t in the Sharkovskii order).
bool baldwin_le(long long t, long long m, long long k);

// Intersection of the orders for every t <= n.
bool nod_le(long long n, long long m, long long k);

// {m <= bound : m precedes k in order t}; t = 1 is the Sharkovskii segment.
std::set<long long> forced_periods(long long t, long long k, long long bound);

}  // namespace stardyn

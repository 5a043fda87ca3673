#include "stardyn/forcing_orders.hpp"

#include <stdexcept>

namespace stardyn {

namespace {

struct TwoAdic {
  long long power;  // i in 2^i (2a+1)
  long long odd;    // a
};

TwoAdic split(long long m)
{
  TwoAdic out{0, 0};
  while (m % 2 == 0) {
    m /= 2;
    ++out.power;
  }
  out.odd = (m - 1) / 2;
  return out;
}

void require_positive(long long m, long long k)
{
  if (m < 1 || k < 1)
    throw std::invalid_argument("periods must be positive");
}

}  // namespace

bool sharkovskii_le(long long m, long long k)
{
  require_positive(m, k);
  const auto [i, a] = split(m);
  const auto [j, b] = split(k);
  if (a == 0 && b == 0)
    return i <= j;
  if (a == 0)
    return true;
  if (b == 0)
    return false;
  if (i != j)
    return i > j;
  return a >= b;
}

bool baldwin_le(long long t, long long m, long long k)
{
  if (t < 2)
    throw std::invalid_argument("baldwin_le needs t >= 2");
  require_positive(m, k);
  if (k == 1)
    return m == 1;
  if (m == 1)
    return true;
  if (k % t == 0)
    return m % t == 0 && sharkovskii_le(m / t, k / t);
  if (m == k)
    return true;
  // m = i k + j t with i >= 0, j >= 1.
  for (long long rest = m - t; rest >= 0; rest -= t) {
    if (rest % k == 0)
      return true;
  }
  return false;
}

bool nod_le(long long n, long long m, long long k)
{
  if (n < 1)
    throw std::invalid_argument("nod_le needs n >= 1");
  if (!sharkovskii_le(m, k))
    return false;
  for (long long t = 2; t <= n; ++t) {
    if (!baldwin_le(t, m, k))
      return false;
  }
  return true;
}

std::set<long long> forced_periods(long long t, long long k, long long bound)
{
  if (t < 1 || k < 1 || bound < 1)
    throw std::invalid_argument("forced_periods needs positive arguments");
  std::set<long long> out;
  for (long long m = 1; m <= bound; ++m) {
    if (t == 1 ? sharkovskii_le(m, k) : baldwin_le(t, m, k))
      out.insert(m);
  }
  return out;
}

}  // namespace stardyn

// Certifies a few families and runs a short search, printing one line each.

#include "bsa/construct.hpp"
#include "bsa/search.hpp"

#include <cmath>
#include <cstdio>

int main() {
  using namespace bsa;

  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    const auto fam = lp_basis_family(p, 4);
    const auto r = certify_set(fam.set);
    std::printf("lp-basis p=%-4g n=4  d=%.9f  2^(1/p)=%.9f\n", p, r.report.d, std::pow(2.0, 1.0 / p));
  }

  const auto sum = summing_family(6);
  std::printf("summing n=6        d=%.9f  valid=%d\n", certify_set(sum.set).report.d,
              check_certificate(sum.certificate()).valid);

  const auto sys = auerbach_ascent(NormSpec::lp(3.0, 3));
  const auto pm = plus_minus_family(sys);
  std::printf("plus-minus l3^3    d=%.9f  (%zu points)\n", certify_set(pm.set).report.d, pm.set.size());

  SearchConfig config;
  config.restarts = 1;
  config.iterations = 3000;
  const auto found = max_antipodal_search(NormSpec::lp(2.0, 2), 4, config);
  std::printf("antipodal l2^2 #4  found=%d d=%.6f\n", found.found, found.witness->report.d);
  return 0;
}

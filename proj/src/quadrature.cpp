#include "lwire/quadrature.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "lwire/errors.hpp"

namespace lwire::quad {

namespace {

using Gauss8 = boost::math::quadrature::gauss<double, 8>;

// Boost stores the non-negative half of the symmetric rule.
void add_panel(Rule& r, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const auto& xs = Gauss8::abscissa();
  const auto& ws = Gauss8::weights();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] == 0.0) {
      r.x.push_back(mid);
      r.w.push_back(half * ws[i]);
      continue;
    }
    r.x.push_back(mid - half * xs[i]);
    r.w.push_back(half * ws[i]);
    r.x.push_back(mid + half * xs[i]);
    r.w.push_back(half * ws[i]);
  }
}

}  // namespace

double Rule::apply(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(x[i]);
  return s;
}

Rule uniform(double lo, double hi, int panels) {
  Rule r;
  if (!(hi > lo) || panels < 1) return r;
  const double width = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) add_panel(r, lo + p * width, p + 1 == panels ? hi : lo + (p + 1) * width);
  return r;
}

Rule geometric(double lo, double hi, int panels) {
  Rule r;
  if (!(hi > lo) || panels < 1) return r;
  if (!(lo > 0.0)) throw InvalidArgument("geometric panels need lo > 0");
  const double ratio = std::log(hi / lo) / panels;
  double a = lo;
  for (int p = 0; p < panels; ++p) {
    const double b = p + 1 == panels ? hi : lo * std::exp(ratio * (p + 1));
    add_panel(r, a, b);
    a = b;
  }
  return r;
}

Rule join(Rule a, const Rule& b) {
  a.x.insert(a.x.end(), b.x.begin(), b.x.end());
  a.w.insert(a.w.end(), b.w.begin(), b.w.end());
  return a;
}

}  // namespace lwire::quad

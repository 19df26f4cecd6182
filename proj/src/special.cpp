#include "umcmc/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

namespace umcmc {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_ccdf(double x) { return 0.5 * std::erfc(x * M_SQRT1_2); }

double normal_quantile(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
               45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
               21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }

  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
                1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
              4.6303378461565452959) * r + 1.42343711074968357734) /
            (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
                0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
              2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
                0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
              5.4637849111641143699) * r + 6.6579046435011037772) /
            (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
                7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
              0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -value : value;
}

double normal_log_density(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - kLogSqrt2Pi;
}

std::vector<double> normal_density_crossings(const NormalLaw& p, const NormalLaw& q) {
  // log p(x) - log q(x) = a x^2 + b x + c
  const double vp = p.sd * p.sd;
  const double vq = q.sd * q.sd;
  const double a = 0.5 / vq - 0.5 / vp;
  const double b = p.mean / vp - q.mean / vq;
  const double c = 0.5 * q.mean * q.mean / vq - 0.5 * p.mean * p.mean / vp + std::log(q.sd / p.sd);
  if (a == 0.0) {
    if (b == 0.0) return {};
    return {-c / b};
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return {};
  // Numerically stable roots.
  const double s = std::sqrt(disc);
  const double t = -0.5 * (b + std::copysign(s, b));
  std::vector<double> roots;
  if (t != 0.0) roots.push_back(c / t);
  roots.push_back(t / a);
  std::sort(roots.begin(), roots.end());
  return roots;
}

double normal_overlap(const NormalLaw& p, const NormalLaw& q) {
  if (p.mean == q.mean && p.sd == q.sd) return 1.0;
  const std::vector<double> cuts = normal_density_crossings(p, q);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> edges{-inf};
  edges.insert(edges.end(), cuts.begin(), cuts.end());
  edges.push_back(inf);

  auto mass = [](const NormalLaw& law, double lo, double hi) {
    const double zl = (lo - law.mean) / law.sd;
    const double zh = (hi - law.mean) / law.sd;
    // Use whichever tail keeps the difference well conditioned.
    if (zl > 0.0) return normal_ccdf(zl) - normal_ccdf(zh);
    return normal_cdf(zh) - normal_cdf(zl);
  };

  double overlap = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double lo = edges[i];
    const double hi = edges[i + 1];
    double probe;
    if (std::isinf(lo) && std::isinf(hi)) {
      probe = 0.5 * (p.mean + q.mean);
    } else if (std::isinf(lo)) {
      probe = hi - 1.0 - std::abs(hi);
    } else if (std::isinf(hi)) {
      probe = lo + 1.0 + std::abs(lo);
    } else {
      probe = 0.5 * (lo + hi);
    }
    const bool p_smaller = normal_log_density(probe, p) < normal_log_density(probe, q);
    overlap += mass(p_smaller ? p : q, lo, hi);
  }
  return std::clamp(overlap, 0.0, 1.0);
}

namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, int max_intervals) {
  std::priority_queue<Segment> work;
  Segment first = gauss_kronrod(f, a, b);
  double total = first.value;
  double total_error = first.error;
  work.push(first);
  int intervals = 1;
  while (total_error > abs_tol) {
    if (intervals >= max_intervals) {
      throw QuadratureError("quadrature did not converge: error estimate " +
                            std::to_string(total_error) + " after " +
                            std::to_string(intervals) + " intervals");
    }
    const Segment worst = work.top();
    work.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Segment left = gauss_kronrod(f, worst.a, mid);
    const Segment right = gauss_kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    work.push(left);
    work.push(right);
    ++intervals;
  }
  // Re-sum to shed accumulated rounding from the incremental updates.
  double value = 0.0;
  double error = 0.0;
  while (!work.empty()) {
    value += work.top().value;
    error += work.top().error;
    work.pop();
  }
  return {value, error, intervals};
}

}  // namespace umcmc

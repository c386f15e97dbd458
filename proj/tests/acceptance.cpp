// Acceptance suite: one PASS/FAIL line per criterion, INFO lines for context.
// Usage: acceptance <path-to-lipkin-cli>

#include "lipkin/lipkin.hpp"
#include "oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace lipkin;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << detail << std::endl;
  if (!ok) ++failures;
}

void info(int id, const std::string& detail) { std::cout << "INFO criterion " << id << ": " << detail << std::endl; }

template <class... T>
std::string str(const T&... parts) {
  std::ostringstream s;
  s.precision(10);
  (s << ... << parts);
  return s.str();
}

void guarded(int id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, str("exception: ", e.what()));
  }
}

void criterion1() {
  double worst = 0.0;
  for (int n = 1; n <= 12; ++n)
    for (double lambda : {0.0, 0.5, 1.0, 2.0, 5.0})
      for (Parity p : {Parity::even, Parity::odd}) {
        const auto got = eig_real_tridiag(build_block(n, lambda, p)).values;
        const auto want =
            oracle::real_eigenvalues(oracle::project(oracle::dense_hamiltonian(n, lambda), p == Parity::even ? 0 : 1));
        if (got.size() != want.size()) {
          worst = HUGE_VAL;
          continue;
        }
        for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
      }
  report(1, worst <= 1e-10, str("max |block - dense| over N<=12, 5 couplings, both sectors = ", worst));
}

void criterion2() {
  bool ok = true;
  std::string detail;
  for (auto [lambda, target, tol] : {std::tuple{5.0, -2.6, 0.01}, std::tuple{10.0, -5.05, 0.02}}) {
    const auto t0 = Clock::now();
    const auto s = full_spectrum(4000, lambda);
    const double e = 2.0 * s.merged.front().energy / 4000;
    const double dt = seconds_since(t0);
    ok = ok && std::abs(e - target) <= tol && dt < 10.0;
    detail += str("lambda=", lambda, ": 2E_1/N=", e, " (target ", target, "), ", dt, " s; ");
  }
  report(2, ok, detail);
}

void criterion3() {
  const int n = 2000;
  const auto low = full_spectrum(n, 0.5);
  const double d_low = low.even_values[1] - low.even_values[0];
  const double rel_low = std::abs(d_low - std::sqrt(0.75)) / std::sqrt(0.75);
  const auto high = full_spectrum(n, 3.0);
  const double d_high = high.even_values[1] - high.even_values[0];
  const double rel_high = std::abs(d_high - 4.0) / 4.0;
  report(3, rel_low <= 0.01 && rel_high <= 0.02,
         str("same-sector E_2-E_1: lambda=0.5 -> ", d_low, " (rel dev ", rel_low, " vs 0.01), lambda=3 -> ", d_high,
             " (rel dev ", rel_high, " vs 0.02)"));
  const double merged = lowest_excitation(low);
  info(3, str("lambda=0.5 merged lowest excitation = ", merged, ", rel dev from sqrt(0.75) = ",
              std::abs(merged - std::sqrt(0.75)) / std::sqrt(0.75),
              "; the same-sector spacing spans two quanta at this coupling"));
}

void criterion4() {
  const auto t0 = Clock::now();
  const auto rep = scaling_exponent_eq2(1, {256, 512, 1024, 2048, 4096, 8192}, 1.0);
  const double dt = seconds_since(t0);
  const double slope = rep.slope.value_or(NAN);
  report(4, std::abs(slope + 1.0 / 3.0) <= 0.05 && dt < 120.0, str("slope = ", slope, ", ", dt, " s"));
}

void criterion5() {
  const auto rep = gap_ratio_eq3(2.0, {1024, 2048, 4096, 8192, 16384});
  bool ok = true;
  double prev = HUGE_VAL;
  std::string rs;
  for (const auto& s : rep.samples) {
    ok = ok && s.value >= 0.5 && s.value <= 1.5 && std::abs(s.value - 1.0) <= prev;
    prev = std::abs(s.value - 1.0);
    rs += str(s.value, " ");
  }
  report(5, ok && rep.samples.size() == 5, str("r(N) for N=1024..16384: ", rs));
}

void criterion6() {
  const auto a = ep_refine(2, Parity::even, {0.0, 1.8}, 0.1);
  const auto b = ep_refine(4, Parity::odd, {0.0, 1.2}, 0.1);
  const double da = std::abs(a.lambda_star - cplx{0, 2}), ea = std::abs(a.energy_star);
  const double db = std::abs(b.lambda_star - cplx{0, 4.0 / 3.0}), eb = std::abs(b.energy_star);
  report(6, std::max({da, ea, db, eb}) <= 1e-10,
         str("N=2 even: |dlambda|=", da, " |E*|=", ea, "; N=4 odd: |dlambda|=", db, " |E*|=", eb));
}

// Points no other EP of the sector beats on both counts (closer to the real
// axis and further along it): the row nearest the real axis.
std::vector<ExceptionalPoint> front_row(std::vector<ExceptionalPoint> eps) {
  std::vector<ExceptionalPoint> row;
  for (const auto& p : eps) {
    const bool beaten = std::any_of(eps.begin(), eps.end(), [&](const ExceptionalPoint& q) {
      return q.lambda_star.imag() < p.lambda_star.imag() && q.lambda_star.real() > p.lambda_star.real();
    });
    if (!beaten) row.push_back(p);
  }
  std::sort(row.begin(), row.end(),
            [](const auto& a, const auto& b) { return a.lambda_star.real() < b.lambda_star.real(); });
  return row;
}

void criterion7() {
  const Region strip{1.0, 2.5, 0.0, 1.5};
  double prev = HUGE_VAL;
  bool decreasing = true;
  std::string mins;
  for (int n : {8, 16, 32}) {
    double lowest = HUGE_VAL;
    for (Parity p : {Parity::even, Parity::odd})
      for (const auto& ep : ep_scan(n, p, strip))
        if (ep.lambda_star.real() >= 1.0 && ep.lambda_star.real() <= 2.5)
          lowest = std::min(lowest, ep.lambda_star.imag());
    decreasing = decreasing && lowest < prev;
    prev = lowest;
    mins += str("N=", n, ":", lowest, " ");
  }

  bool labelled = true;
  std::string labels;
  for (Parity p : {Parity::even, Parity::odd}) {
    const auto row = front_row(ep_scan(32, p, strip));
    labels += str(to_string(p), ":");
    labelled = labelled && row.size() >= 2;
    for (std::size_t i = 0; i < row.size(); ++i) {
      try {
        const auto lp = ep_pair_id(row[i]);
        labels += str(" (", lp.k, ",", lp.k_next, ")@", row[i].lambda_star.real());
        labelled = labelled && lp.k == static_cast<int>(i) + 1 && lp.k_next == lp.k + 1;
      } catch (const ConvergenceError& e) {
        labels += " (?)";
        labelled = false;
      }
    }
    labels += "; ";
  }
  report(7, decreasing && labelled, str("(a) min Im lambda*: ", mins, "(b) N=32 front rows ", labels));
}

void criterion8() {
  const int count = near_real_ep_count(32, 2.0, 0.2);
  // x_c(lambda = 2) at the converged size used for its reference value
  const double x_c = critical_x(2000, 2.0);
  const long rounded = std::lround(x_c * 16);
  report(8, count == 4 && rounded == 4,
         str("near_real_ep_count(32, 2, 0.2) = ", count, ", round(16 x_c) = ", rounded, " (x_c = ", x_c, ")"));
  info(8, str("finite-size x_c at N=32 = ", critical_x(32, 2.0)));
  int row = 0;
  double lowest = HUGE_VAL;
  for (Parity p : {Parity::even, Parity::odd})
    for (const auto& ep : front_row(ep_scan(32, p, {1.0, 2.5, 0.0, 1.5}))) {
      if (ep.lambda_star.real() > 1.0 && ep.lambda_star.real() < 2.0) {
        ++row;
        lowest = std::min(lowest, ep.lambda_star.imag());
      }
    }
  info(8, str("EPs of the real-axis sequence with 1 < Re lambda* < 2 (both sectors) = ", row,
              ", lowest Im lambda* = ", lowest));
}

void criterion9() {
  bool ok = true;
  double prev = 0.0;
  std::string detail;
  for (int n : {2, 100, 1000}) {
    const double lambda = 3.0;
    const auto block = build_block(n, lambda, Parity::even);
    std::vector<double> e0(block.size(), 0.0);
    e0[0] = 1.0;
    const auto v = apply_scaled_hamiltonian(block, e0);
    int nonzero = 0;
    for (double c : v) nonzero += c != 0.0;
    const double want = lambda * std::sqrt(2.0 * n * (n - 1.0)) / (double(n) * n);
    const double d0 = std::abs(v[0] + 1.0), d1 = std::abs(v[1] - want);
    const double ratio = v[1] * n / lambda;
    ok = ok && nonzero == 2 && d0 <= 1e-14 && d1 <= 1e-14 && ratio > prev && ratio < std::sqrt(2.0);
    prev = ratio;
    detail += str("N=", n, ": nonzero=", nonzero, " |c0+1|=", d0, " |c1-ref|=", d1, " c1 N/lambda=", ratio, "; ");
  }
  report(9, ok, detail);
}

void criterion10() {
  const auto a = full_spectrum(200, 5.0);
  const double doublet = std::abs(a.even_values[0] - a.odd_values[0]);
  const auto b = full_spectrum(200, 0.5);
  const double split = std::abs(b.even_values[0] - b.odd_values[0]);
  const auto c = full_spectrum(64, 1.7);
  double mirror = 0.0;
  const std::size_t m = c.merged.size();
  for (std::size_t i = 0; i < m; ++i)
    mirror = std::max(mirror, std::abs(c.merged[i].energy + c.merged[m - 1 - i].energy));
  report(10, doublet <= 1e-6 && split >= 0.4 && mirror <= 1e-9,
         str("|E1even-E1odd| at lambda=5: ", doublet, "; at lambda=0.5: ", split, "; max |E_i + E_{N+2-i}| = ", mirror));
}

void criterion11() {
  const int n = 8192;
  const double lambda = 5.0;
  const auto s = full_spectrum(n, lambda);
  const double x_c = critical_x(s);
  bool rms_ok = true, dev_ok = true, shape_ok = true;
  std::string detail = str("x_c=", x_c, "; ");
  for (Side side : {Side::left, Side::right}) {
    const auto t = acid_test(s, x_c, side);
    rms_ok = rms_ok && t.fit.rms_residual <= 1e-3;
    dev_ok = dev_ok && t.max_rel_dev <= 0.05;
    const double sg = side == Side::left ? -1.0 : 1.0;
    double prev_d1 = HUGE_VAL, prev_d2 = 0.0;
    for (double u : {1e-2, 1e-3, 1e-4, 1e-5}) {
      const double d1 = std::abs(fit_derivative(t.fit, x_c + sg * u));
      const double d2 = std::abs(fit_second_derivative(t.fit, x_c + sg * u));
      shape_ok = shape_ok && d1 < prev_d1 && d2 > prev_d2;
      prev_d1 = d1;
      prev_d2 = d2;
    }
    detail += str(to_string(side), ": rms=", t.fit.rms_residual, " max rel dev=", t.max_rel_dev, "; ");
  }
  detail += str("shape over |x-x_c| 1e-2..1e-5 ", shape_ok ? "ok" : "violated");
  report(11, rms_ok && dev_ok && shape_ok, detail);
}

std::string capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    status = -1;
    return out;
  }
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
  const int raw = pclose(p);
  status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return out;
}

void criterion12(const std::string& cli) {
  // the figure-reproduction configs documented in the README
  std::vector<std::string> configs;
  for (const char* l : {"0", "1", "5", "10"})
    configs.push_back(str("spectrum --n 1000 --lambda ", l, " --sector merged --lower-half --format csv"));
  for (const char* l : {"1", "10"}) {
    configs.push_back(str("spectrum --n 1000 --lambda ", l, " --sector merged --lower-half --format csv"));
    configs.push_back(str("spectrum --n 1000 --lambda ", l, " --sector merged --lower-half --derivative --format csv"));
  }
  for (const char* n : {"8", "16", "32"})
    configs.push_back(str("eps --n ", n, " --re-max 3 --im-max 3 --format csv"));
  configs.push_back("scaling --law eq2 --k 1 --n-list 256,512,1024,2048 --format json");

  bool ok = true;
  int failed = 0;
  for (const auto& cfg : configs) {
    int s1 = 0, s2 = 0;
    const std::string cmd = cli + " " + cfg + " 2>/dev/null";
    const auto a = capture(cmd, s1);
    const auto b = capture(cmd, s2);
    const bool good = s1 == 0 && s2 == 0 && !a.empty() && a == b;
    if (!good) {
      ++failed;
      info(12, str("config failed: ", cfg, " (exit ", s1, "/", s2, ", identical=", a == b, ")"));
    }
    ok = ok && good;
  }
  report(12, ok, str(configs.size(), " configs run twice each, ", failed, " failed or differed"));
}

} // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-lipkin-cli>\n";
    return 2;
  }
  const auto t0 = Clock::now();
  guarded(1, criterion1);
  guarded(2, criterion2);
  guarded(3, criterion3);
  guarded(4, criterion4);
  guarded(5, criterion5);
  guarded(6, criterion6);
  guarded(7, criterion7);
  guarded(8, criterion8);
  guarded(9, criterion9);
  guarded(10, criterion10);
  guarded(11, criterion11);
  const std::string cli = argv[1];
  guarded(12, [&] { criterion12(cli); });
  std::cout << (failures == 0 ? "ALL PASS" : str(failures, " criteria FAILED")) << " (" << seconds_since(t0)
            << " s)" << std::endl;
  return failures == 0 ? 0 : 1;
}

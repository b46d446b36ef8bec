#include "doctest.h"

#include <cmath>
#include <vector>

#include "flowctl/common.hpp"
#include "flowctl/kernels.hpp"

using namespace flowctl;

namespace {

std::vector<const kernels::Table*> variants() {
  std::vector<const kernels::Table*> out;
  if (const auto* t = kernels::avx2()) out.push_back(t);
  if (const auto* t = kernels::neon()) out.push_back(t);
  return out;
}

std::vector<double> random_vector(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("backend names parse back") {
  for (auto b : {kernels::Backend::Scalar, kernels::Backend::Avx2, kernels::Backend::Neon}) {
    kernels::Backend parsed{};
    REQUIRE(kernels::parse_backend(kernels::name(b), parsed));
    CHECK(parsed == b);
  }
  kernels::Backend x{};
  CHECK_FALSE(kernels::parse_backend("sse9", x));
}

TEST_CASE("the active table is runnable and scalar can always be selected") {
  const auto& t = kernels::active();
  CHECK(t.dot != nullptr);
  kernels::select(kernels::Backend::Scalar);
  CHECK(kernels::active().backend == kernels::Backend::Scalar);
  kernels::select(kernels::detect());
  CHECK(kernels::table_for(kernels::Backend::Scalar) == &kernels::scalar());
}

TEST_CASE("scalar kernels against direct loops") {
  Rng rng(1);
  const auto& s = kernels::scalar();
  const auto x = random_vector(37, rng), y0 = random_vector(37, rng);
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d += x[i] * y0[i];
  CHECK(s.dot(x.data(), y0.data(), x.size()) == doctest::Approx(d).epsilon(1e-14));
  auto y = y0;
  s.axpy(0.5, x.data(), y.data(), y.size());
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == y0[i] + 0.5 * x[i]);
}

TEST_CASE("SIMD kernels agree with scalar") {
  const auto tables = variants();
  if (tables.empty()) {
    MESSAGE("no SIMD backend available on this machine");
    return;
  }
  Rng rng(2);
  for (const auto* t : tables) {
    for (std::size_t n : {0, 1, 3, 4, 5, 7, 8, 15, 16, 17, 63, 64, 65, 129, 1000}) {
      const auto x = random_vector(n, rng), y0 = random_vector(n, rng);
      const double ds = kernels::scalar().dot(x.data(), y0.data(), n);
      const double dv = t->dot(x.data(), y0.data(), n);
      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i] * y0[i]);
      CHECK(std::abs(ds - dv) <= 1e-13 * std::max(1.0, mag));

      auto ys = y0, yv = y0;
      kernels::scalar().axpy(-1.5, x.data(), ys.data(), n);
      t->axpy(-1.5, x.data(), yv.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ys[i] - yv[i]) <= 1e-15 * std::max(1.0, std::abs(ys[i])));

      auto ps = x, pv = x;
      const auto g = random_vector(n, rng);
      std::vector<double> ms(n, 0.1), mv(n, 0.1), vs(n, 0.2), vv(n, 0.2);
      kernels::AdamCoeffs c;
      c.lr = 1e-3;
      c.bias1 = 1.0 - 0.9 * 0.9;
      c.bias2 = 1.0 - 0.999 * 0.999;
      kernels::scalar().adam(ps.data(), g.data(), ms.data(), vs.data(), n, c);
      t->adam(pv.data(), g.data(), mv.data(), vv.data(), n, c);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(ps[i] == doctest::Approx(pv[i]).epsilon(1e-14));
        CHECK(ms[i] == doctest::Approx(mv[i]).epsilon(1e-14));
        CHECK(vs[i] == doctest::Approx(vv[i]).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("selecting an unavailable backend throws") {
  if (kernels::neon() == nullptr) CHECK_THROWS_AS(kernels::select(kernels::Backend::Neon), Error);
  if (kernels::avx2() == nullptr) CHECK_THROWS_AS(kernels::select(kernels::Backend::Avx2), Error);
}

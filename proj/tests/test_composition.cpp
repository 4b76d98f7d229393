#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "compreg/composition.hpp"

using namespace compreg;

namespace {

std::vector<double> random_parts(std::mt19937_64& gen, std::size_t d,
                                 bool allow_zeros) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(d);
  double sum = 0.0;
  do {
    sum = 0.0;
    for (auto& p : v) {
      p = u(gen);
      if (allow_zeros && u(gen) < 0.25) p = 0.0;
      sum += p;
    }
  } while (sum == 0.0);
  for (auto& p : v) p /= sum;
  return v;
}

}  // namespace

TEST_CASE("construction accepts simplex points and pins the sum") {
  const Composition z({0.2, 0.3, 0.5});
  CHECK(z.dim() == 3);
  CHECK(z[0] == doctest::Approx(0.2).epsilon(1e-15));
  double sum = 0.0;
  for (std::size_t k = 0; k < z.dim(); ++k) sum += z[k];
  CHECK(sum == 1.0);  // exact by construction
}

TEST_CASE("construction rejects bad input by family") {
  CHECK_THROWS_AS(Composition({0.2, -0.1, 0.9}), NegativeInput);
  CHECK_THROWS_AS(Composition({0.0, 0.0, 0.0}), DegenerateInput);
  CHECK_THROWS_AS(Composition({0.5, 0.6}), DegenerateInput);  // sum 1.1
  CHECK_THROWS_AS(Composition({0.3, std::nan("")}), ParseError);
  CHECK_THROWS_AS(Composition({}), DegenerateInput);
}

TEST_CASE("tolerance boundary: 1e-10 off re-closes, 1e-8 off rejects") {
  CHECK_NOTHROW(Composition({0.5, 0.5 + 1e-10}));
  CHECK_THROWS_AS(Composition({0.5, 0.5 + 1e-8}), DegenerateInput);
}

TEST_CASE("closure normalizes any non-negative vector to an exact-sum point") {
  const Composition z = closure({2.0, 3.0, 5.0});
  CHECK(z[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(z[1] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(z[2] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(closure({0.0, 0.0}), DegenerateInput);
  CHECK_THROWS_AS(closure({1.0, -2.0, 4.0}), NegativeInput);
}

TEST_CASE("closure is exactly idempotent") {
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 200; ++rep) {
    const auto d = 2 + gen() % 5;
    const Composition z = closure(random_parts(gen, d, true));
    const Composition again = closure(z.parts());
    CHECK(z == again);  // bit-for-bit
    double sum = 0.0;
    for (std::size_t k = 0; k < z.dim(); ++k) sum += z[k];
    CHECK(sum == 1.0);
  }
}

TEST_CASE("vertex and barycenter") {
  const Composition e2 = Composition::vertex(4, 2);
  CHECK(e2[2] == 1.0);
  CHECK(e2.is_vertex());
  CHECK_FALSE(e2.is_interior());
  const Composition c = Composition::barycenter(4);
  CHECK(c.is_interior());
  CHECK_FALSE(c.is_vertex());
  CHECK(c[0] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("kld oracle values") {
  // 0.3 log(0.3/0.6) + 0.7 log(0.7/0.4), computed independently.
  CHECK(kld(Composition({0.3, 0.7}), Composition({0.6, 0.4})) ==
        doctest::Approx(0.18378689738681217).epsilon(1e-14));
  // Boundary y: 1 * log(1/0.5) = log 2; the zero part contributes nothing.
  CHECK(kld(Composition({1.0, 0.0}), Composition({0.5, 0.5})) ==
        doctest::Approx(0.6931471805599453).epsilon(1e-14));
  // Support violation: y puts mass where mu has none.
  CHECK(std::isinf(kld(Composition({0.5, 0.5}), Composition({1.0, 0.0}))));
  // 0 log 0 = 0 handled on both sides of the support convention.
  CHECK(kld(Composition({1.0, 0.0}), Composition({1.0, 0.0})) == 0.0);
  CHECK_THROWS_AS(kld(Composition({0.5, 0.5}), Composition({0.2, 0.3, 0.5})),
                  DimMismatch);
}

TEST_CASE("kld properties: non-negative, zero iff equal on support") {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 500; ++rep) {
    const auto d = 2 + gen() % 4;
    const Composition y(random_parts(gen, d, true));
    const Composition mu(random_parts(gen, d, false));  // interior mu
    const double v = kld(y, mu);
    CHECK(v >= 0.0);
    CHECK(kld(y, y) == 0.0);
  }
}

TEST_CASE("ilr oracle: pivot coordinates of (1/2, 1/4, 1/4)") {
  // First coordinate sqrt(2/3) * ln(0.5 / sqrt(0.25 * 0.25)) = sqrt(2/3) ln 2,
  // second 0 by symmetry of the trailing parts.
  const auto u = ilr(Composition({0.5, 0.25, 0.25}));
  REQUIRE(u.size() == 2);
  CHECK(u[0] == doctest::Approx(0.5659523030068885).epsilon(1e-14));
  CHECK(u[1] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("ilr oracle: general point and barycenter") {
  const auto u = ilr(Composition({0.2, 0.3, 0.5}));
  CHECK(u[0] == doctest::Approx(-0.5396045620834091).epsilon(1e-13));
  CHECK(u[1] == doctest::Approx(-0.3612082625687801).epsilon(1e-13));
  for (double c : ilr(Composition::barycenter(5)))
    CHECK(c == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("ilr rejects boundary points") {
  CHECK_THROWS_AS(ilr(Composition({1.0, 0.0})), BoundaryPoint);
  CHECK_THROWS_AS(ilr(Composition({0.0, 0.4, 0.6})), BoundaryPoint);
}

TEST_CASE("ilr_inverse maps zero to the barycenter and inverts ilr") {
  CHECK(ilr_inverse({0.0, 0.0})[0] == doctest::Approx(1.0 / 3).epsilon(1e-15));
  const Composition z = ilr_inverse({0.5659523030068885, 0.0});
  CHECK(z[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(z[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(z[2] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("ilr round-trip within 1e-10 on random interior points") {
  std::mt19937_64 gen(13);
  for (int rep = 0; rep < 500; ++rep) {
    const auto d = 2 + gen() % 5;
    const Composition z(random_parts(gen, d, false));
    const Composition back = ilr_inverse(ilr(z));
    for (std::size_t k = 0; k < d; ++k)
      CHECK(back[k] == doctest::Approx(z[k]).epsilon(1e-10));
    // And coordinates round-trip too.
    const auto u = ilr(z);
    const auto u2 = ilr(ilr_inverse(u));
    for (std::size_t k = 0; k + 1 < d; ++k)
      CHECK(u2[k] == doctest::Approx(u[k]).epsilon(1e-10));
  }
}

TEST_CASE("pivot moves the part to the front and preserves parts bit-exactly") {
  const Composition z({0.2, 0.3, 0.5});
  const Composition p = pivot(z, 2);
  CHECK(p[0] == 0.5);
  CHECK(p[1] == 0.2);
  CHECK(p[2] == 0.3);
  CHECK(pivot(z, 0) == z);
  CHECK_THROWS_AS(pivot(z, 3), IndexError);

  std::mt19937_64 gen(17);
  for (int rep = 0; rep < 200; ++rep) {
    const auto d = 2 + gen() % 5;
    const Composition w(random_parts(gen, d, true));
    const auto l = gen() % d;
    const Composition pw = pivot(w, l);
    auto a = w.parts();
    auto b = pw.parts();
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);  // same multiset, no renormalization drift
  }
}

TEST_CASE("dataset validation and row operations") {
  std::vector<Composition> xs = {Composition({0.2, 0.8}), Composition({0.7, 0.3}),
                                 Composition({0.5, 0.5})};
  std::vector<Composition> ys = {Composition({0.1, 0.6, 0.3}),
                                 Composition({0.4, 0.4, 0.2}),
                                 Composition({0.3, 0.3, 0.4})};
  const CompositionDataset data(xs, ys, {"a", "b", "c"});
  CHECK(data.n() == 3);
  CHECK(data.ds() == 2);
  CHECK(data.dr() == 3);

  const auto permuted = data.with_x_permuted({2, 0, 1});
  CHECK(permuted.x(0) == xs[2]);
  CHECK(permuted.y(0) == ys[0]);  // outcomes stay put
  CHECK_THROWS_AS(data.with_x_permuted({0, 0, 1}), InvalidArgument);

  const auto res = data.resample({1, 1, 2});
  CHECK(res.n() == 3);
  CHECK(res.x(0) == xs[1]);
  CHECK(res.x(1) == xs[1]);
  CHECK(res.y(2) == ys[2]);

  const auto dropped = data.without_row(1);
  CHECK(dropped.n() == 2);
  CHECK(dropped.x(1) == xs[2]);
  CHECK(dropped.row_labels()[1] == "c");

  CHECK_THROWS_AS(CompositionDataset({}, {}), EmptyData);
  std::vector<Composition> short_y = {ys[0], ys[1]};
  CHECK_THROWS_AS(CompositionDataset(xs, short_y), DimMismatch);
  std::vector<Composition> ragged = {Composition({0.5, 0.5}),
                                     Composition({0.2, 0.3, 0.5}),
                                     Composition({0.9, 0.1})};
  CHECK_THROWS_AS(CompositionDataset(ragged, ys), DimMismatch);
}

TEST_CASE("vertex compositions are accepted in datasets (boundary support)") {
  std::vector<Composition> xs = {Composition::vertex(2, 0),
                                 Composition::vertex(2, 1)};
  std::vector<Composition> ys = {Composition({1.0, 0.0}), Composition({0.0, 1.0})};
  const CompositionDataset data(xs, ys);
  CHECK(data.x(0).is_vertex());
  CHECK(data.y(1)[1] == 1.0);
}

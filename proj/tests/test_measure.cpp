#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "dualflow/errors.hpp"
#include "dualflow/measure.hpp"
#include "oracles.hpp"

using namespace dualflow;
using oracle::near;

namespace {

// CDF by direct summation, and the W1 distance by fine Riemann sums of |CDF difference|.
double cdf_sum(const std::vector<Atom>& atoms, double x) {
  double s = 0.0;
  for (const Atom& a : atoms) {
    if (a.x <= x) s += a.m;
  }
  return s;
}

double w1_brute(const std::vector<Atom>& p, const std::vector<Atom>& q, double lo, double hi, int n = 400000) {
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = lo + (k + 0.5) * h;
    s += std::abs(cdf_sum(p, x) - cdf_sum(q, x)) * h;
  }
  return s;
}

std::vector<Atom> random_atoms(std::mt19937_64& rng, int n, double total) {
  std::uniform_real_distribution<double> pos(-1.0, 1.0);
  std::uniform_real_distribution<double> w(0.1, 1.0);
  std::vector<Atom> atoms(n);
  double s = 0.0;
  for (auto& a : atoms) {
    a = {pos(rng), w(rng)};
    s += a.m;
  }
  for (auto& a : atoms) a.m *= total / s;
  return atoms;
}

}  // namespace

TEST_CASE("atomic measures are sorted and coalesced") {
  const auto mu = AtomicMeasure::from_atoms({{0.5, 1.0}, {-0.5, 2.0}, {0.5, 0.25}});
  REQUIRE(mu.size() == 2);
  CHECK(mu.atoms()[0].x == -0.5);
  CHECK(mu.atoms()[1].m == 1.25);
  CHECK(mu.total_mass() == 3.25);
  CHECK_THROWS_AS(AtomicMeasure::from_atoms({}), InputError);
  CHECK_THROWS_AS(AtomicMeasure::from_atoms({{0.0, 0.0}}), InputError);
  CHECK_THROWS_AS(AtomicMeasure::from_atoms({{0.0, -1.0}}), InputError);
  CHECK_THROWS_AS(AtomicMeasure::from_atoms({{std::nan(""), 1.0}}), InputError);
}

TEST_CASE("primitive_of_atomic") {
  const auto one = primitive_of_atomic(AtomicMeasure::from_atoms({{0.0, 1.0}}));
  CHECK(one.breakpoints == std::vector<double>{0.0});
  CHECK(one.levels == std::vector<double>{0.0, 1.0});
  const auto two = primitive_of_atomic(AtomicMeasure::from_atoms({{-0.25, 0.5}, {0.25, 0.5}}));
  CHECK(two.levels == std::vector<double>{0.0, 0.5, 1.0});
}

TEST_CASE("sample_to_grid") {
  const GridSpec grid{-1.0, 1.0, 4};
  SUBCASE("atom on a face belongs to that face") {
    const auto f = sample_to_grid(AtomicMeasure::from_atoms({{0.0, 1.0}}), grid);
    CHECK(std::vector<double>(f.u_faces().begin(), f.u_faces().end()) == std::vector<double>{0, 0, 1, 1, 1});
  }
  SUBCASE("uniform density") {
    const auto f = sample_to_grid(UniformDensity{-0.5, 0.5, 1.0}, grid);
    CHECK(std::vector<double>(f.u_faces().begin(), f.u_faces().end()) == std::vector<double>{0, 0, 0.5, 1, 1});
  }
  SUBCASE("triangular density keeps its mass") {
    const auto f = sample_to_grid(TriangularDensity{0.0, 0.5, 2.0}, grid);
    CHECK(f.u_faces()[2] == 1.0);
    CHECK(f.u_faces()[4] == 2.0);
  }
  SUBCASE("atoms outside the open domain are rejected") {
    CHECK_THROWS_AS(sample_to_grid(AtomicMeasure::from_atoms({{1.0, 1.0}}), grid), DomainError);
    CHECK_THROWS_AS(sample_to_grid(AtomicMeasure::from_atoms({{-1.0, 1.0}}), grid), DomainError);
    CHECK_THROWS_AS(sample_to_grid(UniformDensity{-1.0, 0.0, 1.0}, grid), DomainError);
  }
  SUBCASE("cell masses reproduce the atoms exactly") {
    std::mt19937_64 rng(1);
    const auto atoms = AtomicMeasure::from_atoms(random_atoms(rng, 12, 1.7));
    const GridSpec g{-1.5, 1.5, 97};
    const auto f = sample_to_grid(atoms, g);
    for (std::size_t c = 0; c < g.n_cells; ++c) {
      double expected = 0.0;
      for (const Atom& a : atoms.atoms()) {
        if (a.x > g.face(c) && a.x <= g.face(c + 1)) expected += a.m;
      }
      CHECK(near(f.cell_mass(c), expected, 1e-12));
    }
    CHECK(near(f.total_mass(), 1.7, 1e-12));
  }
}

TEST_CASE("grid fields enforce their invariants") {
  const GridSpec grid{0.0, 1.0, 2};
  CHECK_THROWS_AS(GridField::from_faces(grid, {0.0, 0.6, 0.5}, 0.5), InputError);
  CHECK_THROWS_AS(GridField::from_faces(grid, {0.1, 0.2, 0.5}, 0.5), InputError);
  CHECK_THROWS_AS(GridField::from_faces(grid, {0.0, 0.2, 0.5}, 0.6), InputError);
  CHECK_THROWS_AS(GridField::from_faces(grid, {0.0, 0.2}, 0.2), InputError);
  CHECK_THROWS_AS(GridField::from_faces(grid, {0.0, std::nan(""), 0.5}, 0.5), NumericalError);
  CHECK_NOTHROW(GridField::from_faces(grid, {0.0, 0.5 + 1e-15, 0.5}, 0.5));
}

TEST_CASE("extract_atoms") {
  SUBCASE("single atom round trip") {
    for (std::size_t n : {40u, 101u, 800u}) {
      const GridSpec g{-3.0, 1.0, n};
      const auto f = sample_to_grid(AtomicMeasure::from_atoms({{0.0, 1.0}}), g);
      const auto atoms = extract_atoms(f);
      REQUIRE(atoms.size() == 1);
      CHECK(near(atoms[0].m, 1.0, 1e-12));
      CHECK(std::abs(atoms[0].x) <= g.dx());
    }
  }
  SUBCASE("rarefaction profile has no atoms") {
    const GridSpec g{-0.5, 1.5, 200};
    const auto f = sample_to_grid(UniformDensity{0.0, 1.0, 1.0}, g);
    CHECK(extract_atoms(f, 0.1, 3).empty());
  }
  SUBCASE("two atoms in one cell coalesce") {
    const GridSpec g{-1.0, 1.0, 10};
    const auto f = sample_to_grid(AtomicMeasure::from_atoms({{0.01, 0.3}, {0.05, 0.4}}), g);
    const auto atoms = extract_atoms(f);
    REQUIRE(atoms.size() == 1);
    CHECK(near(atoms[0].m, 0.7, 1e-15));
  }
  SUBCASE("well separated atoms round trip") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
      const GridSpec g{-2.0, 2.0, 400};
      std::vector<Atom> atoms;
      for (int k = 0; k < 5; ++k) atoms.push_back({-1.6 + 0.7 * k + 0.1 * std::uniform_real_distribution<double>(-1, 1)(rng),
                                                   std::uniform_real_distribution<double>(0.5, 1.0)(rng)});
      const auto mu = AtomicMeasure::from_atoms(atoms);
      const auto got = extract_atoms(sample_to_grid(mu, g), 0.05 * mu.total_mass(), 5);
      REQUIRE(got.size() == mu.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(std::abs(got[i].x - mu.atoms()[i].x) <= g.dx());
        CHECK(near(got[i].m, mu.atoms()[i].m, 1e-12));
      }
    }
  }
}

TEST_CASE("wasserstein1 examples") {
  const auto d0 = AtomicMeasure::from_atoms({{0.0, 1.0}});
  const auto d1 = AtomicMeasure::from_atoms({{1.0, 1.0}});
  const auto pair = AtomicMeasure::from_atoms({{-0.25, 0.5}, {0.25, 0.5}});
  CHECK(near(wasserstein1(d0, d1), 1.0, 1e-15));
  CHECK(near(wasserstein1(pair, d0), 0.25, 1e-15));
  CHECK(wasserstein1(pair, pair) == 0.0);
  CHECK_THROWS_AS(wasserstein1(d0, AtomicMeasure::from_atoms({{0.0, 2.0}})), InputError);
  // the grid primitive ramps linearly across the cell (-0.5, 0]
  const auto f = sample_to_grid(d0, GridSpec{-1.0, 1.0, 4});
  CHECK(near(wasserstein1(f, d0), 0.25, 1e-15));
  CHECK(near(wasserstein1(d0, f), 0.25, 1e-15));
}

TEST_CASE("wasserstein1 agrees with brute-force CDF integration and is a metric") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = random_atoms(rng, 1 + trial % 4, 1.0);
    const auto q = random_atoms(rng, 1 + (trial + 2) % 5, 1.0);
    const auto r = random_atoms(rng, 3, 1.0);
    const auto mp = AtomicMeasure::from_atoms(p), mq = AtomicMeasure::from_atoms(q), mr = AtomicMeasure::from_atoms(r);
    const double pq = wasserstein1(mp, mq);
    CHECK(near(pq, w1_brute(p, q, -1.0, 1.0), 2e-5));
    CHECK(near(pq, wasserstein1(mq, mp), 1e-15));
    CHECK(pq <= wasserstein1(mp, mr) + wasserstein1(mr, mq) + 1e-12);
  }
}

TEST_CASE("quantile") {
  CHECK(quantile(AtomicMeasure::from_atoms({{3.0, 1.0}}), 0.5) == 3.0);
  const auto f = sample_to_grid(UniformDensity{0.0, 1.0, 1.0}, GridSpec{-1.0, 2.0, 30});
  CHECK(near(quantile(f, 0.25), 0.25, 1e-14));
  const auto two = AtomicMeasure::from_atoms({{-1.0, 0.5}, {1.0, 0.5}});
  CHECK(quantile(two, 0.75) == 1.0);
  CHECK(quantile(two, 0.5) == -1.0);
  CHECK_THROWS_AS(quantile(two, 0.0), InputError);
  CHECK_THROWS_AS(quantile(two, 1.0), InputError);
}

TEST_CASE("quantile inverts the primitive at atom positions and is monotone") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto mu = AtomicMeasure::from_atoms(random_atoms(rng, 6, 2.0));
    double cum = 0.0;
    for (const Atom& a : mu.atoms()) {
      cum += a.m;
      CHECK(quantile(mu, cum - a.m / 2) == a.x);
    }
    double prev = -1e300;
    for (int k = 1; k < 200; ++k) {
      const double x = quantile(mu, 2.0 * k / 200);
      CHECK(x >= prev);
      prev = x;
    }
  }
}

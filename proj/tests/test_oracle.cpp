#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "causalflow/errors.hpp"
#include "causalflow/oracle.hpp"
#include "support/test_support.hpp"

using namespace causalflow;
using test::rel_residual;

namespace {

double binary_entropy(double p) {
  return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

ChannelSpec bsc_spec(double flip) {
  ChannelSpec spec;
  spec.horizon = 1;
  spec.nodes = {
      {"X", 2, {}, {{0.5, 0.5}}},
      {"Y", 2, {{"X", 0}}, {{1.0 - flip, flip}, {flip, 1.0 - flip}}},
  };
  return spec;
}

}  // namespace

TEST_CASE("build_pmf: BSC(0.1) with uniform input") {
  const JointPmf pmf = build_pmf(bsc_spec(0.1));
  REQUIRE(pmf.p.size() == 4);
  // axis order (x1, y1, z1); az == 1 so table is (x, y)
  CHECK(pmf.p[0] == doctest::Approx(0.45).epsilon(1e-15));  // (0,0)
  CHECK(pmf.p[1] == doctest::Approx(0.05).epsilon(1e-15));  // (0,1)
  CHECK(pmf.p[2] == doctest::Approx(0.05).epsilon(1e-15));  // (1,0)
  CHECK(pmf.p[3] == doctest::Approx(0.45).epsilon(1e-15));  // (1,1)
}

TEST_CASE("build_pmf: independent uniform bits are uniform over tuples") {
  ChannelSpec spec;
  spec.horizon = 2;
  spec.nodes = {{"X", 2, {}, {{0.5, 0.5}}}, {"Y", 2, {}, {{0.5, 0.5}}}};
  const JointPmf pmf = build_pmf(spec);
  REQUIRE(pmf.p.size() == 16);
  for (double v : pmf.p) CHECK(v == doctest::Approx(1.0 / 16).epsilon(1e-14));
  for (MeasureKind kind : all_measures()) {
    CHECK(std::abs(oracle_measure(pmf, kind)) < 1e-13);
  }
}

TEST_CASE("build_pmf: relay factorizes as the product of its kernels") {
  const ChannelSpec spec = test::relay_channel_spec(2, 0.2);
  const JointPmf pmf = build_pmf(spec);
  // hand-computed product for configuration x=(1,0), z=(0,1), y=(0,0):
  // p(x1)p(z1|x0=0)p(y1|z0=0) * p(x2)p(z2|x1=1)p(y2|z1=0)
  // = .5*.8*.8 * .5*.8*.8 = 0.1024
  // axis order (x1,y1,z1,x2,y2,z2), cards (2,2,2,2,2,2)
  const long idx = ((((1 * 2 + 0) * 2 + 0) * 2 + 0) * 2 + 0) * 2 + 1;
  CHECK(pmf.p[static_cast<std::size_t>(idx)] ==
        doctest::Approx(0.1024).epsilon(1e-12));
}

TEST_CASE("build_pmf validation") {
  ChannelSpec bad = bsc_spec(0.1);
  bad.nodes[1].kernel[0] = {0.8, 0.1};  // row does not sum to 1
  CHECK_THROWS_AS(build_pmf(bad), Error);

  ChannelSpec cycle;
  cycle.horizon = 1;
  cycle.nodes = {
      {"X", 2, {{"Y", 0}}, {{0.5, 0.5}, {0.5, 0.5}}},
      {"Y", 2, {{"X", 0}}, {{0.5, 0.5}, {0.5, 0.5}}},
  };
  CHECK_THROWS_AS(build_pmf(cycle), Error);

  ChannelSpec huge = test::relay_channel_spec(3);
  huge.max_table = 10;
  CHECK_THROWS_AS(build_pmf(huge), Error);
}

TEST_CASE("BSC(0.1), N=1: DI1 = MI = capacity-style closed form") {
  const JointPmf pmf = build_pmf(bsc_spec(0.1));
  const double expected = std::log(2.0) - binary_entropy(0.1);
  const double di1 = oracle_measure(pmf, MeasureKind::MasseyDi);
  CHECK(std::abs(di1 - expected) < 1e-12);
  CHECK(std::abs(oracle_measure(pmf, MeasureKind::CausalMi) - expected) <
        1e-12);
  CHECK(std::abs(oracle_measure(pmf, MeasureKind::ConditionalMi) - expected) <
        1e-12);
  // stated decimals: 0.531004 bits
  CHECK(di1 / std::log(2.0) == doctest::Approx(0.531004).epsilon(2e-6));
}

TEST_CASE("deterministic copy channel: DI1 = 2 ln 2 at N=2") {
  ChannelSpec spec;
  spec.horizon = 2;
  spec.nodes = {{"X", 2, {}, {{0.5, 0.5}}},
                {"Y", 2, {{"X", 0}}, {{1.0, 0.0}, {0.0, 1.0}}}};
  const JointPmf pmf = build_pmf(spec);
  CHECK(std::abs(oracle_measure(pmf, MeasureKind::MasseyDi) -
                 2.0 * std::log(2.0)) < 1e-12);
  CHECK(std::abs(oracle_measure_kl(pmf, MeasureKind::MasseyDi) -
                 2.0 * std::log(2.0)) < 1e-12);
}

TEST_CASE("transfer entropy of an i.i.d. target is zero") {
  ChannelSpec spec;
  spec.horizon = 3;
  spec.nodes = {
      {"X", 2, {{"Y", 1}}, {{0.9, 0.1}, {0.2, 0.8}}},  // X listens to Y
      {"Y", 2, {}, {{0.5, 0.5}}},                      // Y is i.i.d.
  };
  const JointPmf pmf = build_pmf(spec);
  CHECK(std::abs(oracle_measure(pmf, MeasureKind::SumTransferEntropy)) < 1e-13);
  CHECK(std::abs(oracle_measure_kl(pmf, MeasureKind::SumTransferEntropy)) <
        1e-13);
}

TEST_CASE("relay: implied connectivity vanishes under causal conditioning") {
  const JointPmf pmf = build_pmf(test::relay_channel_spec(3, 0.1));
  const double unconditioned =
      oracle_measure(pmf, MeasureKind::MasseyDi, Direction::XtoY, false);
  const double conditioned =
      oracle_measure(pmf, MeasureKind::MasseyDi, Direction::XtoY, true);
  const double cbi = oracle_measure(pmf, MeasureKind::Cbi, Direction::XtoY, true);
  CHECK(unconditioned > 0.05);
  CHECK(std::abs(conditioned) < 1e-12);
  CHECK(std::abs(cbi) < 1e-12);
}

TEST_CASE("Prop. 1 property: conditionally independent target") {
  // p(y_n | y^{n-1} x^n z^{n-1}) = p(y_n | y^{n-1} z^{n-1}) holds by
  // construction whenever Y only reads Z's past.
  for (std::uint64_t seed : {21ull, 22ull}) {
    ChannelSpec spec = test::relay_channel_spec(3, 0.15 + 0.1 * (seed % 2));
    const JointPmf pmf = build_pmf(spec);
    CHECK(std::abs(oracle_measure(pmf, MeasureKind::MasseyDi)) < 1e-12);
  }
}

TEST_CASE("MAC-with-feedback factorization: CBI is exactly zero") {
  const JointPmf pmf = build_pmf(test::mac_channel_spec(3));
  CHECK(std::abs(oracle_measure(pmf, MeasureKind::Cbi)) < 1e-12);
  CHECK(std::abs(oracle_measure_kl(pmf, MeasureKind::Cbi)) < 1e-12);
}

TEST_CASE("CBI detects an injected direct dependence") {
  for (double weight : {0.05, 0.1, 0.3}) {
    ChannelSpec spec = test::mac_channel_spec(3);
    // blend a same-step copy of X into Y's kernel
    NodeSpec& y = spec.nodes[1];
    y.parents.push_back({"X", 0});
    std::vector<std::vector<double>> kernel;
    for (const std::vector<double>& row : y.kernel) {
      for (int x = 0; x < 2; ++x) {
        std::vector<double> blended(2);
        for (int sym = 0; sym < 2; ++sym) {
          blended[static_cast<std::size_t>(sym)] =
              (1.0 - weight) * row[static_cast<std::size_t>(sym)] +
              weight * (sym == x ? 1.0 : 0.0);
        }
        kernel.push_back(blended);
      }
    }
    y.kernel = kernel;
    const JointPmf pmf = build_pmf(spec);
    CHECK(oracle_measure(pmf, MeasureKind::Cbi) > 1e-5);
  }
}

TEST_CASE("entropy-sum and KL forms agree on random pmfs") {
  int count = 0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const int ax = 2 + static_cast<int>(seed % 2);
    const int ay = 2;
    const int az = 1 + static_cast<int>(seed % 3);
    const int n = 1 + static_cast<int>(seed % 3);
    const JointPmf pmf =
        test::random_pmf(ax, ay, az, n, 900 + seed, seed % 4 == 0 ? 0.2 : 0.0);
    for (MeasureKind kind : all_measures()) {
      for (Direction dir : {Direction::XtoY, Direction::YtoX}) {
        CHECK(std::abs(oracle_measure(pmf, kind, dir) -
                       oracle_measure_kl(pmf, kind, dir)) < 1e-12);
      }
    }
    ++count;
  }
  CHECK(count == 12);
}

TEST_CASE("verify_identities on random pmfs") {
  // The Massey/Kamitake exchange symmetry (prop2) and the source-side chain
  // expansion of causally conditioned MI are exact only without an
  // interacting side process; all other identities hold unconditionally.
  auto is_exchange_item = [](const std::string& name) {
    return name == "prop2_massey_kamitake" ||
           name == "corollary1_dual_expansion";
  };
  SUBCASE("interacting side process: all but the exchange identities") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const JointPmf pmf = test::random_pmf(2, 2, 2, 3, 300 + seed);
      const IdentityReport report = verify_identities(pmf);
      CHECK(report.items.size() >= 12);
      for (const IdentityReport::Item& item : report.items) {
        INFO(item.name);
        if (!is_exchange_item(item.name)) CHECK(item.residual < 1e-11);
      }
    }
  }
  SUBCASE("no side process: every identity") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const JointPmf pmf = test::random_pmf(2, 3, 1, 3, 800 + seed);
      const IdentityReport report = verify_identities(pmf);
      for (const IdentityReport::Item& item : report.items) {
        INFO(item.name);
        CHECK(item.residual < 1e-11);
      }
      CHECK(report.pass(1e-11));
    }
  }
  SUBCASE("interacting side process: exchange gap is real and consistent") {
    const JointPmf pmf = test::random_pmf(2, 2, 2, 3, 1234);
    const double chain_gap =
        std::abs(oracle_measure(pmf, MeasureKind::CausalMi, Direction::XtoY) -
                 oracle_measure(pmf, MeasureKind::CausalMi, Direction::YtoX));
    CHECK(chain_gap > 1e-6);
    const IdentityReport report = verify_identities(pmf);
    for (const IdentityReport::Item& item : report.items) {
      if (item.name == "prop2_massey_kamitake") {
        CHECK(item.residual == doctest::Approx(chain_gap).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("swap-symmetric pmf: corollary-2 residual is exactly zero") {
  // N=1 pmf with p(x,y) = p(y,x)
  JointPmf pmf;
  pmf.ax = pmf.ay = 2;
  pmf.az = 1;
  pmf.horizon = 1;
  pmf.p = {0.4, 0.1, 0.1, 0.4};
  const IdentityReport report = verify_identities(pmf);
  for (const IdentityReport::Item& item : report.items) {
    if (item.name == "corollary2_cbi_symmetry") {
      CHECK(item.residual == 0.0);
    }
  }
}

TEST_CASE("sampling determinism and plug-in consistency") {
  const JointPmf pmf = build_pmf(bsc_spec(0.1));

  SUBCASE("fixed seed reproduces the sample stream") {
    const Eigen::MatrixXi a = sample_from_pmf(pmf, 1000, 55);
    const Eigen::MatrixXi b = sample_from_pmf(pmf, 1000, 55);
    CHECK(a == b);
    const Eigen::MatrixXi c = sample_from_pmf(pmf, 1000, 56);
    CHECK(a != c);
  }
  SUBCASE("plug-in estimate reproduces DI1 within Monte-Carlo error") {
    const Eigen::MatrixXi samples = sample_from_pmf(pmf, 1000000, 77);
    const JointPmf plug_in = estimate_pmf(samples, 2, 2, 1, 1);
    const double expected = std::log(2.0) - binary_entropy(0.1);
    CHECK(std::abs(oracle_measure(plug_in, MeasureKind::MasseyDi) - expected) <
          0.003);
  }
  SUBCASE("zero samples refused") {
    CHECK_THROWS_AS(sample_from_pmf(pmf, 0, 1), Error);
    CHECK_THROWS_AS(estimate_pmf(Eigen::MatrixXi(0, 3), 2, 2, 1, 1), Error);
  }
}

TEST_CASE("pmf validation") {
  JointPmf pmf;
  pmf.ax = pmf.ay = 2;
  pmf.az = 1;
  pmf.horizon = 1;
  pmf.p = {0.5, 0.5, 0.5, 0.5};  // sums to 2
  CHECK_THROWS_AS(pmf.validate(), Error);
  pmf.p = {0.25, 0.25, 0.25};  // wrong size
  CHECK_THROWS_AS(pmf.validate(), Error);
}

#include <doctest.h>

#include <stdexcept>

#include "dtrack/rng.hpp"
#include "dtrack/tdoa.hpp"

using namespace dtrack;

namespace {
const Vec3 kPi(1, 2, 3);
const Vec3 kPj(4, 6, 8);
const Vec3 kP(2, -1, 0.5);
}  // namespace

TEST_CASE("measurement row depends only on the baseline vector") {
  RowVec6 h = linear_row(kPi, kPj);
  RowVec6 want;
  want << 3, 4, 5, 0, 0, 0;
  CHECK((h - want).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(linear_row(kPi, kPi), std::invalid_argument);
}

TEST_CASE("known bias and raw value agree with the affine identity") {
  CHECK(linear_bias(kPi, kPj) == doctest::Approx(-51.0).epsilon(1e-15));
  CHECK(squared_range_diff(kP, kPi, kPj) == doctest::Approx(-46.5).epsilon(1e-15));
  Vec6 x;
  x << kP(0), kP(1), kP(2), 0.4, -0.2, 0.9;  // velocity must not matter
  double hx = linear_row(kPi, kPj) * x;
  CHECK(hx == doctest::Approx(4.5).epsilon(1e-15));
  CHECK(hx + linear_bias(kPi, kPj) == doctest::Approx(-46.5).epsilon(1e-15));
}

TEST_CASE("affine identity holds over random geometries") {
  Rng rng(71);
  for (int it = 0; it < 1000; ++it) {
    Vec3 pi = 10.0 * rng.normal3();
    Vec3 pj = 10.0 * rng.normal3();
    Vec3 p = 10.0 * rng.normal3();
    if ((pi - pj).norm() < 1e-3) continue;
    double lhs = squared_range_diff(p, pi, pj);
    Vec6 x;
    x << p(0), p(1), p(2), rng.normal(), rng.normal(), rng.normal();
    double rhs = linear_row(pi, pj) * x + linear_bias(pi, pj);
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("range difference and its jacobian row") {
  CHECK(range_diff(kP, kPi, kPj) == doctest::Approx(-6.4211436060341622).epsilon(1e-15));
  RowVec6 row = nonlinear_row(kP, kPi, kPj);
  CHECK(row(0) == doctest::Approx(0.43941541847239285).epsilon(1e-12));
  CHECK(row(1) == doctest::Approx(-0.07449758500633497).epsilon(1e-12));
  CHECK(row(2) == doctest::Approx(0.09737363690636747).epsilon(1e-12));
  CHECK(row.tail<3>().isZero(0.0));
  CHECK_THROWS_AS(nonlinear_row(kPi, kPi, kPj), std::runtime_error);
}

TEST_CASE("per-node stacks follow the neighbor order and stay constant") {
  SensorNetwork net = build_topology(Topology::cycle, 4);
  std::vector<Vec3> pos = {Vec3(0, 0, 0), Vec3(5, 0, 0), Vec3(5, 5, 0), Vec3(0, 5, 3)};
  place_sensors(net, pos);
  LinearTdoaModel model = build_linear_model(net);
  REQUIRE(model.H.size() == 4);
  CHECK(model.H[0].rows() == 2);
  // node 0's neighbors are 1 and 3, in that order
  CHECK((model.H[0].row(0) - linear_row(pos[0], pos[1])).cwiseAbs().maxCoeff() == 0.0);
  CHECK((model.H[0].row(1) - linear_row(pos[0], pos[3])).cwiseAbs().maxCoeff() == 0.0);
  CHECK(model.bias[0](0) == doctest::Approx(linear_bias(pos[0], pos[1])).epsilon(1e-15));

  // the stack is geometry-only: rebuilding gives bit-identical matrices
  LinearTdoaModel again = build_linear_model(net);
  for (int i = 0; i < 4; ++i) {
    CHECK((model.H[i] - again.H[i]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((model.bias[i] - again.bias[i]).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("noise-free measurements equal the model prediction") {
  SensorNetwork net = build_topology(Topology::complete, 4);
  std::vector<Vec3> pos = {Vec3(0, 0, 0), Vec3(7, 1, 0), Vec3(3, 6, 2), Vec3(1, 2, 9)};
  place_sensors(net, pos);
  LinearTdoaModel model = build_linear_model(net);
  Vec3 target(4, 4, 4);
  Rng rng(1);
  for (int i = 0; i < 4; ++i) {
    VecX z = measure_linear(model, net, i, target, 0.0, rng);
    Vec6 x;
    x << target(0), target(1), target(2), 0, 0, 0;
    VecX predicted = model.H[i] * x + model.bias[i];
    CHECK((z - predicted).cwiseAbs().maxCoeff() < 1e-12);

    VecX znl = measure_nonlinear(net, i, target, 0.0, rng);
    for (size_t u = 0; u < net.neighbors[i].size(); ++u) {
      double want = range_diff(target, pos[i], pos[net.neighbors[i][u]]);
      CHECK(znl(static_cast<Eigen::Index>(u)) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("noisy measurements are seed-reproducible") {
  SensorNetwork net = build_topology(Topology::cycle, 3);
  place_sensors(net, {Vec3(0, 0, 0), Vec3(4, 0, 0), Vec3(0, 4, 0)});
  LinearTdoaModel model = build_linear_model(net);
  Rng a(33), b(33);
  VecX za = measure_linear(model, net, 0, Vec3(1, 1, 1), 0.5, a);
  VecX zb = measure_linear(model, net, 0, Vec3(1, 1, 1), 0.5, b);
  CHECK((za - zb).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stacked output operators have the block structure") {
  SensorNetwork net = build_topology(Topology::cycle, 3);
  place_sensors(net, {Vec3(0, 0, 0), Vec3(4, 0, 0), Vec3(0, 4, 0)});
  LinearTdoaModel model = build_linear_model(net);
  MatX dh = build_dh(model);
  CHECK(dh.rows() == 6);
  CHECK(dh.cols() == 18);
  // node 1's rows live in the middle block column only
  CHECK(dh.block(2, 0, 2, 6).isZero(0.0));
  CHECK((dh.block(2, 6, 2, 6) - model.H[1]).cwiseAbs().maxCoeff() == 0.0);
  CHECK(dh.block(2, 12, 2, 6).isZero(0.0));

  MatX dh_bar = build_dh_bar(model);
  CHECK(dh_bar.rows() == 18);
  for (int i = 0; i < 3; ++i) {
    MatX want = model.H[i].transpose() * model.H[i];
    CHECK((dh_bar.block(6 * i, 6 * i, 6, 6) - want).cwiseAbs().maxCoeff() < 1e-12);
    // only the position block can be nonzero
    CHECK(dh_bar.block(6 * i, 6 * i + 3, 6, 3).isZero(0.0));
    CHECK(dh_bar.block(6 * i + 3, 6 * i, 3, 6).isZero(0.0));
  }
  CHECK((dh_bar - dh.transpose() * dh).cwiseAbs().maxCoeff() < 1e-12);
}

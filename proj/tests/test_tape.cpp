// Per-op gradient checks for the reverse-mode tape, each op composed into a
// scalar through weighted_sum and compared against central differences.
#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "spanproto/rng.hpp"
#include "spanproto/tape.hpp"

using namespace spanproto;

namespace {

// Registers n random parameters of the given shapes, then runs check().
struct OpHarness {
  ParameterRegistry params;
  Rng rng{12345};

  int add_param(const std::string& name, int rows, int cols, double scale = 1.0) {
    const int idx = params.add(name, rows, cols);
    for (double& x : params.at(idx).value.a) x = scale * rng_normal(rng);
    return idx;
  }

  // builder must construct the loss graph from fresh param leaves.
  double run(const std::function<Var(Tape&)>& builder) {
    params.zero_grads();
    Tape tape;
    Var loss = builder(tape);
    tape.backward(loss);
    auto forward = [&]() {
      Tape t2;
      return t2.val(builder(t2))(0, 0);
    };
    const auto res = gradcheck::check(params, forward);
    EXPECT_LT(res.max_rel_err, 1e-6) << "worst at " << res.worst;
    return res.max_rel_err;
  }
};

}  // namespace

TEST(TapeOps, MatmulAddScaleRowvec) {
  OpHarness h;
  h.add_param("a", 3, 4);
  h.add_param("b", 4, 2);
  h.add_param("v", 1, 2);
  Rng wr(7);
  const Mat w = fixtures::random_mat(wr, 3, 2);
  h.run([&](Tape& t) {
    Var a = t.param(h.params, "a");
    Var b = t.param(h.params, "b");
    Var v = t.param(h.params, "v");
    return weighted_sum(add_rowvec(scale(matmul(a, b), 0.7), v), w);
  });
}

TEST(TapeOps, MatmulNtTanhSoftmax) {
  OpHarness h;
  h.add_param("a", 3, 4);
  h.add_param("b", 5, 4);
  Rng wr(8);
  const Mat w = fixtures::random_mat(wr, 3, 5);
  h.run([&](Tape& t) {
    Var a = t.param(h.params, "a");
    Var b = t.param(h.params, "b");
    return weighted_sum(softmax_rows(tanh_op(matmul_nt(a, b))), w);
  });
}

TEST(TapeOps, GatherConcatOuterSum) {
  OpHarness h;
  h.add_param("a", 4, 1);
  h.add_param("b", 2, 1);
  Rng wr(9);
  const Mat w = fixtures::random_mat(wr, 5, 5);
  h.run([&](Tape& t) {
    Var a = t.param(h.params, "a");
    Var b = t.param(h.params, "b");
    Var g = gather_rows(a, {0, 2, 2});  // repeated row exercises accumulation
    Var s = concat_rows({g, b});        // 5 x 1
    return weighted_sum(outer_sum(s), w);
  });
}

TEST(TapeOps, GroupMeanPairwiseDistHinge) {
  OpHarness h;
  h.add_param("u", 5, 3);
  h.add_param("c", 2, 3);
  h.run([&](Tape& t) {
    Var u = t.param(h.params, "u");
    Var c = t.param(h.params, "c");
    Var protos = group_mean(u, {0, 1, 0, 1, 1}, 2);
    return hinge_mean(pairwise_dist(c, protos), 2.5);
  });
}

TEST(TapeOps, NllOfNegDistance) {
  OpHarness h;
  h.add_param("u", 4, 3);
  h.add_param("c", 3, 3);
  h.run([&](Tape& t) {
    Var u = t.param(h.params, "u");
    Var c = t.param(h.params, "c");
    return nll_of_neg_distance(pairwise_dist(u, c), {0, 2, 1, 2});
  });
}

TEST(TapeOps, BoundaryLoss) {
  OpHarness h;
  h.add_param("f", 4, 4);
  Mat target(4, 4);
  target(0, 1) = 1.0;
  target(2, 2) = 1.0;
  h.run([&](Tape& t) { return boundary_loss(t.param(h.params, "f"), target); });
}

TEST(TapeOps, WeightedSumIsExact) {
  Tape t;
  Mat a(2, 2);
  a(0, 0) = 1;
  a(0, 1) = 2;
  a(1, 0) = 3;
  a(1, 1) = 4;
  Mat w(2, 2);
  w(0, 0) = 1;
  w(0, 1) = 0.5;
  w(1, 0) = -1;
  w(1, 1) = 2;
  EXPECT_DOUBLE_EQ(t.val(weighted_sum(t.input(a), w))(0, 0), 1 + 1 - 3 + 8);
}

TEST(TapeOps, BackwardAccumulatesIntoSharedLeaf) {
  ParameterRegistry params;
  params.add("x", 1, 1);
  params.at("x").value(0, 0) = 3.0;
  Tape t;
  Var x = t.param(params, "x");
  // loss = x * x via two uses of the same leaf
  Var loss = weighted_sum(matmul(x, x), [] {
    Mat w(1, 1);
    w(0, 0) = 1.0;
    return w;
  }());
  params.zero_grads();
  t.backward(loss);
  EXPECT_NEAR(params.at("x").grad(0, 0), 6.0, 1e-12);
}

TEST(TapeOps, GroupMeanRejectsEmptyGroup) {
  Tape t;
  Rng rng(1);
  Var u = t.input(fixtures::random_mat(rng, 3, 2));
  EXPECT_THROW(group_mean(u, {0, 0, 0}, 2), ValidationError);
}

TEST(TapeOps, BoundaryLossRejectsNonFinite) {
  Tape t;
  Mat f(2, 2);
  f(0, 1) = std::numeric_limits<double>::infinity();
  Mat target(2, 2);
  EXPECT_THROW(boundary_loss(t.input(f), target), ValidationError);
}

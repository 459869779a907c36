#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "core/graph.hpp"

using namespace onenet;
using namespace onenet::ag;

namespace {

Mat colvec(std::initializer_list<double> xs) {
    Mat m(static_cast<long>(xs.size()), 1);
    long i = 0;
    for (double x : xs) m(i++, 0) = x;
    return m;
}

// Central-difference gradient of `rebuild` (which must rebuild the same
// scalar function of `at` from scratch) for comparison with backward().
Mat numeric_grad(const std::function<double(const Mat&)>& f, const Mat& at, double h = 1e-6) {
    Mat g = Mat::Zero(at.rows(), at.cols());
    Mat x = at;
    for (long i = 0; i < at.size(); ++i) {
        double orig = x(i);
        x(i) = orig + h;
        double up = f(x);
        x(i) = orig - h;
        double down = f(x);
        x(i) = orig;
        g(i) = (up - down) / (2 * h);
    }
    return g;
}

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

}  // namespace

TEST_CASE("elementary op values") {
    Graph g;
    NodeId x = g.input(colvec({1.0, -2.0, 3.0}));
    NodeId y = g.input(colvec({0.5, 0.5, 0.5}));

    NodeId sum = g.add(x, y);
    NodeId prod = g.mul(x, y);
    NodeId th = g.tanh(x);
    NodeId sg = g.sigmoid(x);
    NodeId sc = g.scale(x, -2.0);
    NodeId ng = g.neg(x);
    NodeId cc = g.concat({x, y});
    NodeId sl = g.slice(cc, 2, 3);
    NodeId pk = g.pick(x, 2);
    NodeId lse = g.logsumexp(x);

    Mat w(2, 3);
    w << 1, 0, 2, 0, -1, 1;
    NodeId mv = g.matvec(g.input(w), x);

    g.forward();
    CHECK(g.value(sum)(0) == doctest::Approx(1.5));
    CHECK(g.value(prod)(1) == doctest::Approx(-1.0));
    CHECK(g.value(th)(2) == doctest::Approx(std::tanh(3.0)));
    CHECK(g.value(sg)(1) == doctest::Approx(1.0 / (1.0 + std::exp(2.0))));
    CHECK(g.value(sc)(0) == doctest::Approx(-2.0));
    CHECK(g.value(ng)(2) == doctest::Approx(-3.0));
    CHECK(g.value(cc).rows() == 6);
    CHECK(g.value(sl)(0) == doctest::Approx(3.0));
    CHECK(g.value(sl)(1) == doctest::Approx(0.5));
    CHECK(g.scalar(pk) == doctest::Approx(3.0));
    CHECK(g.scalar(lse) ==
          doctest::Approx(std::log(std::exp(1.0) + std::exp(-2.0) + std::exp(3.0))));
    CHECK(g.value(mv)(0) == doctest::Approx(7.0));
    CHECK(g.value(mv)(1) == doctest::Approx(5.0));
}

TEST_CASE("matrix picks") {
    Graph g;
    Mat m(2, 3);
    m << 1, 2, 3, 4, 5, 6;
    NodeId n = g.input(m);
    NodeId row = g.pick_row(n, 1);
    NodeId col = g.pick_col(n, 2);
    NodeId entry = g.pick_entry(n, 0, 1);
    g.forward();
    CHECK(g.value(row)(2) == doctest::Approx(6.0));
    CHECK(g.value(col)(0) == doctest::Approx(3.0));
    CHECK(g.scalar(entry) == doctest::Approx(2.0));
}

TEST_CASE("logsumexp is overflow safe") {
    Graph g;
    NodeId x = g.input(colvec({1000.0, 999.0, -1000.0}));
    NodeId y = g.logsumexp(x);
    g.forward();
    CHECK(std::isfinite(g.scalar(y)));
    CHECK(g.scalar(y) == doctest::Approx(1000.0 + std::log1p(std::exp(-1.0))));
    g.backward(y);
    // softmax weights, still finite and normalized
    CHECK(std::isfinite(g.grad(x)(0)));
    CHECK(g.grad(x).sum() == doctest::Approx(1.0));
}

TEST_CASE("forward is repeatable and set_value recomputes") {
    Graph g;
    NodeId x = g.input(3, 1, "x");
    NodeId y = g.logsumexp(g.tanh(x));
    g.set_value(x, colvec({0.1, 0.2, 0.3}));
    g.forward();
    double first = g.scalar(y);
    g.forward();
    CHECK(g.scalar(y) == first);
    g.set_value(x, colvec({1.0, 1.0, 1.0}));
    g.forward();
    CHECK(g.scalar(y) != first);
    CHECK(g.scalar(y) == doctest::Approx(std::log(3.0) + std::tanh(1.0)));
}

TEST_CASE("unset placeholder input is reported by name") {
    Graph g;
    NodeId x = g.input(2, 1, "left-dangling");
    NodeId y = g.logsumexp(x);
    (void)y;
    CHECK_THROWS_WITH_AS(g.forward(), doctest::Contains("left-dangling"), Error);
}

TEST_CASE("shape mismatches are rejected at build time") {
    Graph g;
    NodeId a = g.input(colvec({1, 2, 3}));
    NodeId b = g.input(colvec({1, 2}));
    CHECK_THROWS_AS(g.add(a, b), Error);
    CHECK_THROWS_AS(g.mul(a, b), Error);
    Mat w(2, 2);
    w.setZero();
    CHECK_THROWS_AS(g.matvec(g.input(w), a), Error);
    CHECK_THROWS_AS(g.pick(a, 5), Error);
    CHECK_THROWS_AS(g.slice(a, 2, 3), Error);
}

TEST_CASE("backward demands a scalar") {
    Graph g;
    NodeId a = g.input(colvec({1, 2, 3}));
    g.forward();
    CHECK_THROWS_AS(g.backward(a), Error);
}

TEST_CASE("gradient accumulates when a node fans out") {
    // y = lse(x) + lse(x): gradient must be twice the softmax.
    Graph g;
    NodeId x = g.input(colvec({0.3, -0.7}));
    NodeId y = g.add(g.logsumexp(x), g.logsumexp(x));
    g.forward();
    g.backward(y);
    CHECK(g.grad(x).sum() == doctest::Approx(2.0));

    Graph g2;
    NodeId x2 = g2.input(colvec({0.3, -0.7}));
    NodeId y2 = g2.scale(g2.logsumexp(x2), 2.0);
    g2.forward();
    g2.backward(y2);
    CHECK((g.grad(x) - g2.grad(x2)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("dropout mask applies and routes gradient") {
    Graph g;
    NodeId x = g.input(colvec({2.0, 4.0, 6.0}));
    Mat mask = colvec({0.0, 2.0, 2.0});  // keep=0.5, pre-scaled
    NodeId d = g.dropout(x, mask);
    NodeId y = g.logsumexp(d);
    g.forward();
    CHECK(g.value(d)(0) == doctest::Approx(0.0));
    CHECK(g.value(d)(1) == doctest::Approx(8.0));
    g.backward(y);
    CHECK(g.grad(x)(0) == doctest::Approx(0.0));
    CHECK(g.grad(x)(1) > 0.0);
}

TEST_CASE("seeded dropout keeps expectation roughly constant") {
    Rng rng(7);
    double keep = 0.4;
    Mat x = Mat::Constant(2000, 1, 1.0);
    Graph g;
    NodeId n = g.input(x);
    NodeId d = g.dropout(n, keep, rng);
    g.forward();
    double mean = g.value(d).mean();
    CHECK(mean == doctest::Approx(1.0).epsilon(0.15));
    // surviving entries carry the inverse scale
    for (long i = 0; i < 20; ++i) {
        double v = g.value(d)(i);
        CHECK((v == 0.0 || v == doctest::Approx(1.0 / keep)));
    }
}

TEST_CASE("random graph gradients match finite differences") {
    // Builds ~150 random DAGs mixing every vector op and checks the input
    // gradient against central differences.
    std::mt19937_64 rng(42);
    int graphs_checked = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 150; ++trial) {
        std::uniform_int_distribution<int> dim_d(2, 5);
        const int dim = dim_d(rng);
        std::normal_distribution<double> val(0.0, 1.0);
        Mat x0(dim, 1);
        for (int i = 0; i < dim; ++i) x0(i) = val(rng);
        const uint64_t topo_seed = rng();

        auto build = [&](const Mat& xv) {
            std::mt19937_64 topo(topo_seed);
            Graph g;
            std::vector<NodeId> pool{g.input(xv)};
            std::uniform_int_distribution<int> op_d(0, 7);
            std::uniform_int_distribution<int> depth_d(4, 10);
            int depth = depth_d(topo);
            for (int step = 0; step < depth; ++step) {
                std::uniform_int_distribution<size_t> pick_d(0, pool.size() - 1);
                NodeId a = pool[pick_d(topo)];
                NodeId b = pool[pick_d(topo)];
                switch (op_d(topo)) {
                    case 0: pool.push_back(g.add(a, b)); break;
                    case 1: pool.push_back(g.mul(a, b)); break;
                    case 2: pool.push_back(g.tanh(a)); break;
                    case 3: pool.push_back(g.sigmoid(a)); break;
                    case 4: pool.push_back(g.neg(a)); break;
                    case 5: pool.push_back(g.scale(a, 0.7)); break;
                    case 6: {
                        Mat w(dim, dim);
                        std::mt19937_64 wseed(topo());
                        std::normal_distribution<double> wd(0.0, 0.6);
                        for (long i = 0; i < w.size(); ++i) w(i) = wd(wseed);
                        pool.push_back(g.matvec(g.input(w), a));
                        break;
                    }
                    default:
                        pool.push_back(g.slice(g.concat({a, b}), dim / 2, dim));
                        break;
                }
            }
            NodeId loss = g.logsumexp(pool.back());
            g.forward();
            return std::pair<Graph, NodeId>(std::move(g), loss);
        };

        auto [g, loss] = build(x0);
        g.backward(loss);
        Mat analytic = g.grad(0);
        Mat numeric = numeric_grad(
            [&](const Mat& xv) {
                auto [g2, l2] = build(xv);
                return g2.scalar(l2);
            },
            x0);
        for (long i = 0; i < analytic.size(); ++i)
            worst = std::max(worst, rel_err(analytic(i), numeric(i)));
        ++graphs_checked;
    }
    CHECK(graphs_checked == 150);
    // central differences leave ~1e-4 of truncation noise on near-zero
    // gradients; a wrong backward rule would miss by orders of magnitude
    CHECK(worst < 1e-3);
}

TEST_CASE("mul_scalar and stack gradients match finite differences") {
    Mat x0 = colvec({0.4, -0.2, 0.9});
    auto build = [&](const Mat& xv) {
        Graph g;
        NodeId x = g.input(xv);
        NodeId s = g.pick(x, 1);
        NodeId y = g.mul_scalar(x, s);
        NodeId st = g.stack({g.pick(y, 0), g.pick(y, 2), s});
        NodeId loss = g.logsumexp(st);
        g.forward();
        return std::pair<Graph, NodeId>(std::move(g), loss);
    };
    auto [g, loss] = build(x0);
    g.backward(loss);
    Mat numeric = numeric_grad(
        [&](const Mat& xv) {
            auto [g2, l2] = build(xv);
            return g2.scalar(l2);
        },
        x0);
    for (long i = 0; i < x0.size(); ++i)
        CHECK(rel_err(g.grad(0)(i), numeric(i)) < 1e-6);
}

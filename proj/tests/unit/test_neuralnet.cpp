#include "helpers.hpp"

#include "thermoreg/neuralnet.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace thermo;
using testing::random_matrix;
using testing::random_vector;

namespace {

// Direct loop implementation of the documented parameter layout, used as
// the forward oracle.
double naive_forward(const Network& net, const Vector& input)
{
    const auto& spec = net.spec();
    const auto& lay = net.layout();
    const Vector& p = net.params;
    const int len = spec.input_length;
    std::vector<std::vector<double>> act(static_cast<std::size_t>(len), std::vector<double>(1));
    for (int t = 0; t < len; ++t) {
        act[static_cast<std::size_t>(t)][0] = input(t);
    }
    int channels = 1;
    for (std::size_t l = 0; l < spec.conv_layers.size(); ++l) {
        const int f_count = spec.conv_layers[l].filters;
        const int k = spec.conv_layers[l].kernel_size;
        const int left = (k - 1) / 2;
        std::vector<std::vector<double>> next(static_cast<std::size_t>(len), std::vector<double>(static_cast<std::size_t>(f_count)));
        for (int t = 0; t < len; ++t) {
            for (int f = 0; f < f_count; ++f) {
                double s = p(lay.conv_b[l] + f);
                for (int c = 0; c < channels; ++c) {
                    for (int j = 0; j < k; ++j) {
                        const int src = t + j - left;
                        if (src >= 0 && src < len) {
                            s += p(lay.conv_w[l] + (f * channels + c) * k + j) * act[static_cast<std::size_t>(src)][static_cast<std::size_t>(c)];
                        }
                    }
                }
                next[static_cast<std::size_t>(t)][static_cast<std::size_t>(f)] = std::max(0.0, s);
            }
        }
        act = next;
        channels = f_count;
    }
    const Index flat = static_cast<Index>(len) * channels;
    double out = p(lay.out_b);
    for (int u = 0; u < spec.dense_units; ++u) {
        double s = p(lay.dense_b + u);
        for (Index q = 0; q < flat; ++q) {
            s += p(lay.dense_w + u * flat + q) * act[static_cast<std::size_t>(q / channels)][static_cast<std::size_t>(q % channels)];
        }
        out += p(lay.out_w + u) * std::max(0.0, s);
    }
    return out;
}

NetworkSpec small_spec(int layers, int filters, int k, double l2, int len, int dense = 6)
{
    auto s = uniform_network(layers, filters, k, l2, len);
    s.dense_units = dense;
    return s;
}

} // namespace

TEST_CASE("conv1d: (1,2,3) with a ones kernel of width three")
{
    Matrix x(3, 1);
    x << 1, 2, 3;
    Conv1dKernel k;
    k.filters = 1;
    k.channels = 1;
    k.kernel_size = 3;
    k.weights = {1, 1, 1};
    k.bias = {0};
    const Matrix y = conv1d_forward(x, k);
    CHECK(y(0, 0) == 3.0);
    CHECK(y(1, 0) == 6.0);
    CHECK(y(2, 0) == 5.0);
}

TEST_CASE("conv1d: centred identity kernel returns the input, length is preserved")
{
    Rng rng(1);
    const Matrix x = random_matrix(9, 1, rng);
    Conv1dKernel k;
    k.kernel_size = 3;
    k.weights = {0, 1, 0};
    k.bias = {0};
    CHECK(conv1d_forward(x, k) == x);
    for (const int width : {2, 3}) {
        for (int len = 1; len <= 7; ++len) {
            Conv1dKernel w;
            w.kernel_size = width;
            w.filters = 2;
            w.weights.assign(static_cast<std::size_t>(2 * width), 0.5);
            w.bias = {0, 0};
            const Matrix out = conv1d_forward(random_matrix(len, 1, rng), w);
            CHECK(out.rows() == len);
            CHECK(out.cols() == 2);
        }
    }
}

TEST_CASE("network: spec validation and labels")
{
    CHECK_THROWS_AS(uniform_network(2, 4, 3, 0.0, 10).validate(), ConfigError);
    CHECK_THROWS_AS(uniform_network(2, 16, 5, 0.0, 10).validate(), ConfigError);
    CHECK_THROWS_AS(NetworkSpec{}.validate(), ConfigError);
    const auto s = uniform_network(4, 16, 3, 0.01, 11);
    CHECK_NOTHROW(s.validate());
    CHECK(s.label() == "4 x Conv1D(16)");
    CHECK(NetworkSpec::from_json(s.to_json()) == s);
}

TEST_CASE("network: parameter count matches the layout")
{
    const auto s = small_spec(2, 8, 3, 0.0, 5, 4);
    const Network net(s);
    // conv1 8*1*3+8, conv2 8*8*3+8, dense 4*(5*8)+4, output 4+1
    const Index want = 32 + 200 + 164 + 5;
    CHECK(s.parameter_count() == want);
    CHECK(net.layout().total == want);
    CHECK(net.params.size() == want);
}

TEST_CASE("network: all-zero weights output the output bias")
{
    Network net(small_spec(2, 8, 2, 0.0, 6));
    net.params.setZero();
    net.params(net.layout().out_b) = 36.6;
    Rng rng(2);
    const Vector out = forward(net, random_matrix(5, 6, rng));
    for (Index i = 0; i < 5; ++i) {
        CHECK(out(i) == 36.6);
    }
}

TEST_CASE("network: hand-traced forward pass")
{
    Network net(small_spec(1, 8, 2, 0.0, 2, 1));
    net.params.setZero();
    const auto& lay = net.layout();
    net.params(lay.conv_w[0] + 0) = 1.0;
    net.params(lay.conv_w[0] + 1) = 1.0;
    // flattened index t * filters + f for filter 0
    net.params(lay.dense_w + 0) = 1.0;
    net.params(lay.dense_w + 8) = 1.0;
    net.params(lay.out_w) = 2.0;
    net.params(lay.out_b) = 0.5;
    Matrix x(2, 2);
    x << 1, 2, -1, -2;
    const Vector out = forward(net, x);
    // conv: (1+2, 2+0) = (3, 2); dense 5; output 2 * 5 + 0.5
    CHECK(out(0) == doctest::Approx(10.5));
    CHECK(out(1) == doctest::Approx(0.5));
}

TEST_CASE("network: forward agrees with the loop oracle")
{
    Rng rng(3);
    for (const int k : {2, 3}) {
        const auto net = init_network(small_spec(3, 8, k, 0.01, 7), 11 + static_cast<std::uint64_t>(k), 0.3);
        const Matrix x = random_matrix(6, 7, rng);
        const Vector out = forward(net, x);
        for (Index i = 0; i < 6; ++i) {
            CHECK(out(i) == doctest::Approx(naive_forward(net, x.row(i).transpose())).epsilon(1e-12));
        }
    }
}

TEST_CASE("network: loss is mse plus the conv l2 penalty")
{
    Rng rng(4);
    const auto net = init_network(small_spec(2, 8, 3, 0.05, 5), 5);
    const Matrix x = random_matrix(7, 5, rng);
    const Vector y = random_vector(7, rng);
    const auto parts = loss_and_grad(net, x, y, nullptr);
    CHECK(parts.data == doctest::Approx((forward(net, x) - y).squaredNorm() / 7.0).epsilon(1e-12));
    double pen = 0.0;
    for (std::size_t l = 0; l < 2; ++l) {
        for (const double w : net.conv_kernel(l).weights) {
            pen += 0.05 * w * w;
        }
    }
    CHECK(parts.penalty == doctest::Approx(pen).epsilon(1e-12));
    CHECK(parts.total() == parts.data + parts.penalty);
}

TEST_CASE("network: analytic gradient matches central differences")
{
    Rng rng(5);
    for (const int k : {2, 3}) {
        auto net = init_network(small_spec(2, 8, k, 0.01, 6, 5), 21 + static_cast<std::uint64_t>(k), 0.2);
        const Matrix x = random_matrix(4, 6, rng);
        const Vector y = random_vector(4, rng);
        Vector grad;
        loss_and_grad(net, x, y, &grad);
        REQUIRE(grad.size() == net.params.size());
        const double h = 1e-5;
        int checked = 0;
        int bad = 0;
        for (Index i = 0; i < net.params.size(); ++i) {
            const double keep = net.params(i);
            net.params(i) = keep + h;
            const double up = loss_and_grad(net, x, y, nullptr).total();
            net.params(i) = keep - h;
            const double down = loss_and_grad(net, x, y, nullptr).total();
            net.params(i) = keep;
            const double fd = (up - down) / (2.0 * h);
            const double scale = std::max({std::abs(fd), std::abs(grad(i)), 1e-4});
            ++checked;
            if (std::abs(fd - grad(i)) / scale >= 1e-4) {
                ++bad;
                CAPTURE(i);
                CAPTURE(fd);
                CAPTURE(grad(i));
                CHECK(std::abs(fd - grad(i)) / scale < 1e-4);
            }
        }
        CHECK(checked == net.params.size());
        CHECK(bad == 0);
    }
}

TEST_CASE("adam: zero gradient leaves parameters and one step moves by about lr")
{
    TrainConfig cfg;
    Vector p(3);
    p << 1, -2, 3;
    AdamState st;
    adam_step(p, Vector::Zero(3), st, cfg);
    CHECK(p == Vector((Vector(3) << 1, -2, 3).finished()));

    AdamState fresh;
    Vector q = Vector::Zero(3);
    Vector g(3);
    g << 0.5, -4.0, 1e-3;
    adam_step(q, g, fresh, cfg);
    for (Index i = 0; i < 3; ++i) {
        const double want = -cfg.learning_rate * g(i) / (std::abs(g(i)) + cfg.epsilon);
        CHECK(q(i) == doctest::Approx(want).epsilon(1e-12));
    }
    CHECK(fresh.t == 1);
}

TEST_CASE("training: fixed seed is deterministic and memorizes eight rows")
{
    Rng rng(6);
    const Matrix x = random_matrix(8, 5, rng);
    const Vector y = random_vector(8, rng, 0.5);
    const FeatureMatrix data(x, testing::numbered("t", 5), y);
    const auto spec = small_spec(1, 16, 3, 0.0, 5, 32);
    TrainConfig cfg;
    cfg.epochs = 2000;
    cfg.batch_size = 8;
    cfg.learning_rate = 0.01;
    cfg.seed = 3;
    const auto a = train(spec, cfg, data, FeatureMatrix());
    const auto b = train(spec, cfg, data, FeatureMatrix());
    CHECK(a.final_params == b.final_params);
    const Vector p = a.predict(data, true);
    CHECK((p - y).squaredNorm() / 8.0 < 1e-3);
    CHECK(a.history.size() == 2000);
    CHECK(std::isnan(a.history.back().val_loss));
}

TEST_CASE("training: best-validation checkpoint and artifact round trip")
{
    Rng rng(7);
    const Matrix x = random_matrix(40, 6, rng);
    const Vector y = x.rowwise().sum() * 0.3 + random_vector(40, rng, 0.1);
    const FeatureMatrix data(x, testing::numbered("t", 6), y);
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.seed = 9;
    const auto net = train_with_holdout(small_spec(2, 8, 2, 0.001, 6, 8), cfg, data);
    double best = net.history[0].val_loss;
    int best_epoch = net.history[0].epoch;
    for (const auto& rec : net.history) {
        if (rec.val_loss < best) {
            best = rec.val_loss;
            best_epoch = rec.epoch;
        }
    }
    CHECK(net.best_epoch == best_epoch);
    const auto back = TrainedNetwork::from_json(nlohmann::json::parse(net.to_json().dump()));
    CHECK(back.predict(data) == net.predict(data));
    CHECK(back.best_epoch == net.best_epoch);
    std::ostringstream csv;
    net.write_history_csv(csv);
    const auto text = csv.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 31);
}

TEST_CASE("holdout split: sizes, disjointness and order")
{
    const auto s = holdout_split(50, 0.2, 4);
    CHECK(s.validation.size() == 10);
    CHECK(s.train.size() == 40);
    CHECK(std::is_sorted(s.train.begin(), s.train.end()));
    CHECK(std::is_sorted(s.validation.begin(), s.validation.end()));
    for (const auto v : s.validation) {
        CHECK(!std::binary_search(s.train.begin(), s.train.end(), v));
    }
}

TEST_CASE("training: divergent learning rate raises a numerical error")
{
    Rng rng(8);
    const FeatureMatrix data(random_matrix(16, 4, rng, 1e3), testing::numbered("t", 4), random_vector(16, rng, 1e6));
    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.learning_rate = 1e300;
    CHECK_THROWS_AS(train(small_spec(1, 8, 2, 0.0, 4), cfg, data, FeatureMatrix()), NumericalError);
}

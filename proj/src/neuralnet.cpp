#include "thermoreg/neuralnet.hpp"

#include "thermoreg/csv.hpp"
#include "thermoreg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace thermo {
namespace {

constexpr int kNetworkFormatVersion = 1;

int pad_left(int k) { return (k - 1) / 2; }

// Scratch buffers for one sample's forward and backward pass.
struct Workspace {
    std::vector<std::vector<double>> act; // act[0] is the input; act[l + 1] post-ReLU of conv l
    std::vector<double> hidden;           // post-ReLU dense activations
    std::vector<double> d_act;
    std::vector<double> d_prev;
    std::vector<double> d_hidden;
};

void conv_forward_raw(const double* in, int length, int channels, const double* w, const double* b, int filters,
                      int k, double* out)
{
    const int pl = pad_left(k);
    for (int t = 0; t < length; ++t) {
        double* o = out + static_cast<std::ptrdiff_t>(t) * filters;
        for (int f = 0; f < filters; ++f) {
            o[f] = b[f];
        }
        for (int j = 0; j < k; ++j) {
            const int src = t + j - pl;
            if (src < 0 || src >= length) {
                continue;
            }
            const double* a = in + static_cast<std::ptrdiff_t>(src) * channels;
            for (int f = 0; f < filters; ++f) {
                const double* wf = w + static_cast<std::ptrdiff_t>(f) * channels * k + j;
                double s = 0.0;
                for (int c = 0; c < channels; ++c) {
                    s += wf[c * k] * a[c];
                }
                o[f] += s;
            }
        }
    }
}

class Engine {
public:
    explicit Engine(const Network& net) : net_(net), spec_(net.spec()), lay_(net.layout())
    {
        const int L = spec_.input_length;
        ws_.act.resize(spec_.conv_layers.size() + 1);
        ws_.act[0].resize(static_cast<std::size_t>(L) * spec_.input_channels);
        for (std::size_t l = 0; l < spec_.conv_layers.size(); ++l) {
            ws_.act[l + 1].resize(static_cast<std::size_t>(L) * spec_.conv_layers[l].filters);
        }
        ws_.hidden.resize(static_cast<std::size_t>(spec_.dense_units));
        ws_.d_hidden.resize(ws_.hidden.size());
        std::size_t widest = ws_.act[0].size();
        for (const auto& a : ws_.act) {
            widest = std::max(widest, a.size());
        }
        ws_.d_act.resize(widest);
        ws_.d_prev.resize(widest);
    }

    double forward_row(const Eigen::Ref<const Eigen::RowVectorXd>& x)
    {
        const double* p = net_.params.data();
        const int L = spec_.input_length;
        for (int t = 0; t < L; ++t) {
            ws_.act[0][static_cast<std::size_t>(t)] = x(t);
        }
        int channels = spec_.input_channels;
        for (std::size_t l = 0; l < spec_.conv_layers.size(); ++l) {
            const auto& cl = spec_.conv_layers[l];
            auto& out = ws_.act[l + 1];
            conv_forward_raw(ws_.act[l].data(), L, channels, p + lay_.conv_w[l], p + lay_.conv_b[l], cl.filters,
                             cl.kernel_size, out.data());
            for (double& v : out) {
                v = v > 0.0 ? v : 0.0;
            }
            channels = cl.filters;
        }
        const auto& flat = ws_.act.back();
        const std::size_t nflat = flat.size();
        const double* w1 = p + lay_.dense_w;
        const double* b1 = p + lay_.dense_b;
        const double* w2 = p + lay_.out_w;
        double out = p[lay_.out_b];
        for (int u = 0; u < spec_.dense_units; ++u) {
            const double* row = w1 + static_cast<std::ptrdiff_t>(u) * static_cast<std::ptrdiff_t>(nflat);
            double s = b1[u];
            for (std::size_t i = 0; i < nflat; ++i) {
                s += row[i] * flat[i];
            }
            ws_.hidden[static_cast<std::size_t>(u)] = s > 0.0 ? s : 0.0;
            out += w2[u] * ws_.hidden[static_cast<std::size_t>(u)];
        }
        return out;
    }

    // Accumulates d(scale * (out - y)^2) / d(params) into g, given that
    // forward_row was just called for this sample.
    void backward_row(double d_out, double* g)
    {
        const double* p = net_.params.data();
        const int L = spec_.input_length;
        const auto& flat = ws_.act.back();
        const std::size_t nflat = flat.size();
        const double* w1 = p + lay_.dense_w;
        const double* w2 = p + lay_.out_w;
        g[lay_.out_b] += d_out;
        for (int u = 0; u < spec_.dense_units; ++u) {
            const double h = ws_.hidden[static_cast<std::size_t>(u)];
            g[lay_.out_w + u] += d_out * h;
            ws_.d_hidden[static_cast<std::size_t>(u)] = h > 0.0 ? d_out * w2[u] : 0.0;
        }
        std::fill(ws_.d_act.begin(), ws_.d_act.begin() + static_cast<std::ptrdiff_t>(nflat), 0.0);
        for (int u = 0; u < spec_.dense_units; ++u) {
            const double dh = ws_.d_hidden[static_cast<std::size_t>(u)];
            if (dh == 0.0) {
                continue;
            }
            g[lay_.dense_b + u] += dh;
            double* gw = g + lay_.dense_w + static_cast<std::ptrdiff_t>(u) * static_cast<std::ptrdiff_t>(nflat);
            const double* row = w1 + static_cast<std::ptrdiff_t>(u) * static_cast<std::ptrdiff_t>(nflat);
            for (std::size_t i = 0; i < nflat; ++i) {
                gw[i] += dh * flat[i];
                ws_.d_act[i] += dh * row[i];
            }
        }
        for (std::size_t l = spec_.conv_layers.size(); l-- > 0;) {
            const auto& cl = spec_.conv_layers[l];
            const int F = cl.filters;
            const int k = cl.kernel_size;
            const int C = l == 0 ? spec_.input_channels : spec_.conv_layers[l - 1].filters;
            const int pl = pad_left(k);
            const auto& out = ws_.act[l + 1];
            const auto& in = ws_.act[l];
            const double* w = p + lay_.conv_w[l];
            double* gw = g + lay_.conv_w[l];
            double* gb = g + lay_.conv_b[l];
            const bool need_prev = l > 0;
            if (need_prev) {
                std::fill(ws_.d_prev.begin(), ws_.d_prev.begin() + static_cast<std::ptrdiff_t>(L) * C, 0.0);
            }
            for (int t = 0; t < L; ++t) {
                for (int f = 0; f < F; ++f) {
                    const std::size_t idx = static_cast<std::size_t>(t) * F + f;
                    if (out[idx] <= 0.0) {
                        continue;
                    }
                    const double dz = ws_.d_act[idx];
                    if (dz == 0.0) {
                        continue;
                    }
                    gb[f] += dz;
                    for (int j = 0; j < k; ++j) {
                        const int src = t + j - pl;
                        if (src < 0 || src >= L) {
                            continue;
                        }
                        const double* a = in.data() + static_cast<std::ptrdiff_t>(src) * C;
                        const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(f) * C * k + j;
                        for (int c = 0; c < C; ++c) {
                            gw[base + c * k] += dz * a[c];
                        }
                        if (need_prev) {
                            double* dp = ws_.d_prev.data() + static_cast<std::ptrdiff_t>(src) * C;
                            for (int c = 0; c < C; ++c) {
                                dp[c] += dz * w[base + c * k];
                            }
                        }
                    }
                }
            }
            if (need_prev) {
                std::copy(ws_.d_prev.begin(), ws_.d_prev.begin() + static_cast<std::ptrdiff_t>(L) * C,
                          ws_.d_act.begin());
            }
        }
    }

private:
    const Network& net_;
    const NetworkSpec& spec_;
    const Network::Layout& lay_;
    Workspace ws_;
};

double penalty_and_grad(const Network& net, double* g)
{
    const auto& spec = net.spec();
    const auto& lay = net.layout();
    double pen = 0.0;
    for (std::size_t l = 0; l < spec.conv_layers.size(); ++l) {
        const double l2 = spec.conv_layers[l].l2;
        if (l2 == 0.0) {
            continue;
        }
        for (Index i = lay.conv_w[l]; i < lay.conv_b[l]; ++i) {
            const double w = net.params(i);
            pen += l2 * w * w;
            if (g) {
                g[i] += 2.0 * l2 * w;
            }
        }
    }
    return pen;
}

void check_input(const Network& net, const Matrix& x)
{
    if (x.cols() != net.spec().input_length) {
        throw DataError("network expects " + std::to_string(net.spec().input_length) + " input features, got " +
                        std::to_string(x.cols()));
    }
}

nlohmann::json params_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector json_params(const nlohmann::json& j)
{
    auto v = j.get<std::vector<double>>();
    return Eigen::Map<Vector>(v.data(), static_cast<Index>(v.size()));
}

} // namespace

void NetworkSpec::validate() const
{
    if (conv_layers.empty()) {
        throw ConfigError("network needs at least one convolution layer");
    }
    for (const auto& c : conv_layers) {
        if (c.filters < 8 || c.filters > 64) {
            throw ConfigError("filter count " + std::to_string(c.filters) + " outside [8, 64]");
        }
        if (c.kernel_size != 2 && c.kernel_size != 3) {
            throw ConfigError("kernel size must be 2 or 3");
        }
        if (!(c.l2 >= 0.0)) {
            throw ConfigError("l2 coefficient must be non-negative");
        }
    }
    if (dense_units < 1 || output_units != 1 || input_length < 1 || input_channels != 1) {
        throw ConfigError("network needs dense_units >= 1, one output, one input channel, and input_length >= 1");
    }
}

std::string NetworkSpec::label() const
{
    std::string out;
    std::size_t i = 0;
    while (i < conv_layers.size()) {
        std::size_t j = i;
        while (j < conv_layers.size() && conv_layers[j] == conv_layers[i]) {
            ++j;
        }
        if (!out.empty()) {
            out += " + ";
        }
        out += std::to_string(j - i) + " x Conv1D(" + std::to_string(conv_layers[i].filters) + ")";
        i = j;
    }
    return out;
}

Index NetworkSpec::parameter_count() const { return Network(*this).layout().total; }

nlohmann::json NetworkSpec::to_json() const
{
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& c : conv_layers) {
        layers.push_back({{"filters", c.filters}, {"kernel_size", c.kernel_size}, {"l2", c.l2}});
    }
    return {{"conv_layers", layers},
            {"dense_units", dense_units},
            {"output_units", output_units},
            {"input_length", input_length},
            {"input_channels", input_channels}};
}

NetworkSpec NetworkSpec::from_json(const nlohmann::json& j)
{
    NetworkSpec s;
    for (const auto& c : j.at("conv_layers")) {
        s.conv_layers.push_back(
            {c.at("filters").get<int>(), c.at("kernel_size").get<int>(), c.at("l2").get<double>()});
    }
    s.dense_units = j.value("dense_units", 64);
    s.output_units = j.value("output_units", 1);
    s.input_length = j.at("input_length").get<int>();
    s.input_channels = j.value("input_channels", 1);
    s.validate();
    return s;
}

NetworkSpec uniform_network(int count, int filters, int kernel_size, double l2, int input_length)
{
    NetworkSpec s;
    s.conv_layers.assign(static_cast<std::size_t>(count), ConvLayerSpec{filters, kernel_size, l2});
    s.input_length = input_length;
    s.validate();
    return s;
}

nlohmann::json TrainConfig::to_json() const
{
    return {{"learning_rate", learning_rate}, {"epochs", epochs},   {"batch_size", batch_size},
            {"beta1", beta1},                 {"beta2", beta2},     {"epsilon", epsilon},
            {"seed", seed},                   {"validation_fraction", validation_fraction}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j)
{
    TrainConfig c;
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.beta1 = j.value("beta1", c.beta1);
    c.beta2 = j.value("beta2", c.beta2);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.seed = j.value("seed", c.seed);
    c.validation_fraction = j.value("validation_fraction", c.validation_fraction);
    return c;
}

Matrix conv1d_forward(const Matrix& input, const Conv1dKernel& kernel)
{
    if (kernel.kernel_size != 2 && kernel.kernel_size != 3) {
        throw ConfigError("kernel size must be 2 or 3");
    }
    if (input.cols() != kernel.channels ||
        kernel.weights.size() != static_cast<std::size_t>(kernel.filters) * kernel.channels * kernel.kernel_size ||
        kernel.bias.size() != static_cast<std::size_t>(kernel.filters)) {
        throw DataError("convolution shapes do not match");
    }
    const int L = static_cast<int>(input.rows());
    // Row-major copy so each time step's channels are contiguous.
    std::vector<double> in(static_cast<std::size_t>(L) * kernel.channels);
    for (int t = 0; t < L; ++t) {
        for (int c = 0; c < kernel.channels; ++c) {
            in[static_cast<std::size_t>(t) * kernel.channels + c] = input(t, c);
        }
    }
    std::vector<double> out(static_cast<std::size_t>(L) * kernel.filters);
    conv_forward_raw(in.data(), L, kernel.channels, kernel.weights.data(), kernel.bias.data(), kernel.filters,
                     kernel.kernel_size, out.data());
    Matrix result(L, kernel.filters);
    for (int t = 0; t < L; ++t) {
        for (int f = 0; f < kernel.filters; ++f) {
            result(t, f) = out[static_cast<std::size_t>(t) * kernel.filters + f];
        }
    }
    return result;
}

Network::Network(NetworkSpec spec) : spec_(std::move(spec))
{
    spec_.validate();
    Index pos = 0;
    int channels = spec_.input_channels;
    for (const auto& c : spec_.conv_layers) {
        layout_.conv_w.push_back(pos);
        pos += static_cast<Index>(c.filters) * channels * c.kernel_size;
        layout_.conv_b.push_back(pos);
        pos += c.filters;
        channels = c.filters;
    }
    const Index flat = static_cast<Index>(spec_.input_length) * channels;
    layout_.dense_w = pos;
    pos += flat * spec_.dense_units;
    layout_.dense_b = pos;
    pos += spec_.dense_units;
    layout_.out_w = pos;
    pos += spec_.dense_units;
    layout_.out_b = pos;
    pos += 1;
    layout_.total = pos;
    params = Vector::Zero(pos);
}

Conv1dKernel Network::conv_kernel(std::size_t layer) const
{
    const auto& c = spec_.conv_layers.at(layer);
    Conv1dKernel k;
    k.filters = c.filters;
    k.channels = layer == 0 ? spec_.input_channels : spec_.conv_layers[layer - 1].filters;
    k.kernel_size = c.kernel_size;
    k.weights.assign(params.data() + layout_.conv_w[layer], params.data() + layout_.conv_b[layer]);
    k.bias.assign(params.data() + layout_.conv_b[layer], params.data() + layout_.conv_b[layer] + c.filters);
    return k;
}

void Network::set_conv_kernel(std::size_t layer, const Conv1dKernel& k)
{
    const auto& c = spec_.conv_layers.at(layer);
    const int channels = layer == 0 ? spec_.input_channels : spec_.conv_layers[layer - 1].filters;
    if (k.filters != c.filters || k.channels != channels || k.kernel_size != c.kernel_size ||
        k.weights.size() != static_cast<std::size_t>(c.filters) * channels * c.kernel_size ||
        k.bias.size() != static_cast<std::size_t>(c.filters)) {
        throw DataError("kernel shape does not match layer " + std::to_string(layer));
    }
    std::copy(k.weights.begin(), k.weights.end(), params.data() + layout_.conv_w[layer]);
    std::copy(k.bias.begin(), k.bias.end(), params.data() + layout_.conv_b[layer]);
}

Vector forward(const Network& net, const Matrix& x)
{
    check_input(net, x);
    Engine e(net);
    Vector out(x.rows());
    for (Index i = 0; i < x.rows(); ++i) {
        out(i) = e.forward_row(x.row(i));
    }
    return out;
}

LossParts loss_and_grad(const Network& net, const Matrix& x, const Vector& y, Vector* grad)
{
    check_input(net, x);
    if (x.rows() == 0 || y.size() != x.rows()) {
        throw DataError("loss needs a non-empty batch with one target per row");
    }
    if (grad) {
        grad->setZero(net.params.size());
    }
    Engine e(net);
    const double n = static_cast<double>(x.rows());
    LossParts loss;
    for (Index i = 0; i < x.rows(); ++i) {
        const double r = e.forward_row(x.row(i)) - y(i);
        loss.data += r * r;
        if (grad) {
            e.backward_row(2.0 * r / n, grad->data());
        }
    }
    loss.data /= n;
    loss.penalty = penalty_and_grad(net, grad ? grad->data() : nullptr);
    return loss;
}

Network init_network(const NetworkSpec& spec, std::uint64_t seed, double output_bias)
{
    Network net(spec);
    Rng rng(seed);
    const auto& lay = net.layout();
    auto fill = [&](Index begin, Index end, double limit) {
        for (Index i = begin; i < end; ++i) {
            net.params(i) = rng.uniform(-limit, limit);
        }
    };
    int channels = spec.input_channels;
    for (std::size_t l = 0; l < spec.conv_layers.size(); ++l) {
        const double fan_in = static_cast<double>(channels) * spec.conv_layers[l].kernel_size;
        fill(lay.conv_w[l], lay.conv_b[l], std::sqrt(6.0 / fan_in));
        channels = spec.conv_layers[l].filters;
    }
    const double flat = static_cast<double>(spec.input_length) * channels;
    fill(lay.dense_w, lay.dense_b, std::sqrt(6.0 / flat));
    fill(lay.out_w, lay.out_b, std::sqrt(3.0 / spec.dense_units));
    net.params(lay.out_b) = output_bias;
    return net;
}

void adam_step(Vector& params, const Vector& grad, AdamState& state, const TrainConfig& cfg)
{
    if (state.m.size() != params.size()) {
        state.m = Vector::Zero(params.size());
        state.v = Vector::Zero(params.size());
        state.t = 0;
    }
    ++state.t;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (Index i = 0; i < params.size(); ++i) {
        const double g = grad(i);
        state.m(i) = cfg.beta1 * state.m(i) + (1.0 - cfg.beta1) * g;
        state.v(i) = cfg.beta2 * state.v(i) + (1.0 - cfg.beta2) * g * g;
        const double mhat = state.m(i) / c1;
        const double vhat = state.v(i) / c2;
        params(i) -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
    }
}

Network TrainedNetwork::network(bool final_weights) const
{
    Network net(spec);
    net.params = final_weights ? final_params : best_params;
    return net;
}

Vector TrainedNetwork::predict(const FeatureMatrix& m, bool final_weights) const
{
    if (m.names != feature_names) {
        throw DataError("feature columns do not match the trained network");
    }
    return forward(network(final_weights), m.values);
}

void TrainedNetwork::write_history_csv(std::ostream& out) const
{
    write_csv_row(out, {"epoch", "train_loss", "val_loss"});
    for (const auto& h : history) {
        write_csv_row(out, {std::to_string(h.epoch), format_double(h.train_loss),
                            std::isnan(h.val_loss) ? std::string() : format_double(h.val_loss)});
    }
}

nlohmann::json TrainedNetwork::to_json() const
{
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& h : history) {
        hist.push_back({h.epoch, h.train_loss, std::isnan(h.val_loss) ? nlohmann::json(nullptr) : nlohmann::json(h.val_loss)});
    }
    return {{"format", "thermoreg-network"},
            {"format_version", kNetworkFormatVersion},
            {"spec", spec.to_json()},
            {"config", config.to_json()},
            {"features", feature_names},
            {"best_epoch", best_epoch},
            {"best_params", params_json(best_params)},
            {"final_params", params_json(final_params)},
            {"history", hist}};
}

TrainedNetwork TrainedNetwork::from_json(const nlohmann::json& j)
{
    try {
        if (j.at("format").get<std::string>() != "thermoreg-network" ||
            j.at("format_version").get<int>() != kNetworkFormatVersion) {
            throw ConfigError("unsupported network artifact");
        }
        TrainedNetwork t;
        t.spec = NetworkSpec::from_json(j.at("spec"));
        t.config = TrainConfig::from_json(j.at("config"));
        t.feature_names = j.at("features").get<std::vector<std::string>>();
        t.best_epoch = j.at("best_epoch").get<int>();
        t.best_params = json_params(j.at("best_params"));
        t.final_params = json_params(j.at("final_params"));
        const Index expected = t.spec.parameter_count();
        if (t.best_params.size() != expected || t.final_params.size() != expected) {
            throw ConfigError("network artifact parameter count does not match its spec");
        }
        for (const auto& h : j.at("history")) {
            t.history.push_back({h.at(0).get<int>(), h.at(1).get<double>(),
                                 h.at(2).is_null() ? std::nan("") : h.at(2).get<double>()});
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("network artifact: ") + e.what());
    }
}

HoldoutSplit holdout_split(Index n, double fraction, std::uint64_t seed)
{
    if (!(fraction >= 0.0 && fraction < 1.0)) {
        throw ConfigError("validation fraction must be in [0, 1)");
    }
    auto order = iota_indices(static_cast<std::size_t>(n));
    Rng rng(seed);
    rng.shuffle(order);
    const auto n_val = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    HoldoutSplit s;
    s.validation.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
    s.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
    std::sort(s.validation.begin(), s.validation.end());
    std::sort(s.train.begin(), s.train.end());
    return s;
}

TrainedNetwork train(const NetworkSpec& spec, const TrainConfig& cfg, const FeatureMatrix& train_set,
                     const FeatureMatrix& validation_set)
{
    spec.validate();
    if (train_set.cols() != spec.input_length) {
        throw DataError("network expects " + std::to_string(spec.input_length) + " features, got " +
                        std::to_string(train_set.cols()));
    }
    if (train_set.rows() == 0) {
        throw DataError("cannot train on zero rows");
    }
    if (cfg.epochs < 1 || cfg.batch_size < 1 || !(cfg.learning_rate > 0.0)) {
        throw ConfigError("training needs epochs >= 1, batch_size >= 1 and a positive learning rate");
    }
    const bool has_val = validation_set.rows() > 0;
    if (has_val && validation_set.names != train_set.names) {
        throw DataError("validation columns differ from training columns");
    }
    const Matrix& x = train_set.values;
    const Vector& y = train_set.y();

    TrainedNetwork result;
    result.spec = spec;
    result.config = cfg;
    result.feature_names = train_set.names;

    Network net = init_network(spec, derive_seed(cfg.seed, 0), y.mean());
    Rng order_rng(derive_seed(cfg.seed, 1));
    AdamState adam;
    auto order = iota_indices(static_cast<std::size_t>(x.rows()));
    double best_val = std::numeric_limits<double>::infinity();
    Vector grad;
    Matrix bx;
    Vector by;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        order_rng.shuffle(order);
        double epoch_loss = 0.0;
        Index seen = 0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            const auto b = static_cast<Index>(end - start);
            bx.resize(b, x.cols());
            by.resize(b);
            for (Index i = 0; i < b; ++i) {
                const auto row = static_cast<Index>(order[start + static_cast<std::size_t>(i)]);
                bx.row(i) = x.row(row);
                by(i) = y(row);
            }
            const auto loss = loss_and_grad(net, bx, by, &grad);
            if (!std::isfinite(loss.total()) || !grad.allFinite()) {
                throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) +
                                     "; the learning rate may be too high");
            }
            epoch_loss += loss.total() * static_cast<double>(b);
            seen += b;
            adam_step(net.params, grad, adam, cfg);
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = epoch_loss / static_cast<double>(seen);
        rec.val_loss = std::nan("");
        if (has_val) {
            const Vector pred = forward(net, validation_set.values);
            rec.val_loss = (pred - validation_set.y()).squaredNorm() / static_cast<double>(pred.size());
            if (!std::isfinite(rec.val_loss)) {
                throw NumericalError("non-finite validation loss at epoch " + std::to_string(epoch) +
                                     "; the learning rate may be too high");
            }
            if (rec.val_loss < best_val) {
                best_val = rec.val_loss;
                result.best_epoch = epoch;
                result.best_params = net.params;
            }
        }
        result.history.push_back(rec);
    }
    result.final_params = net.params;
    if (!has_val) {
        result.best_epoch = cfg.epochs;
        result.best_params = net.params;
    }
    return result;
}

TrainedNetwork train_with_holdout(const NetworkSpec& spec, const TrainConfig& cfg, const FeatureMatrix& data)
{
    const auto split = holdout_split(data.rows(), cfg.validation_fraction, derive_seed(cfg.seed, 2));
    return train(spec, cfg, data.take_rows(split.train), data.take_rows(split.validation));
}

} // namespace thermo

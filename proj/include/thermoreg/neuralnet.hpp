#pragma once

#include "thermoreg/feature_matrix.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace thermo {

struct ConvLayerSpec {
    int filters = 16;
    int kernel_size = 3;
    double l2 = 0.01;
    bool operator==(const ConvLayerSpec&) const = default;
};

// Conv1D stack ('same' padding, stride 1, ReLU) -> flatten -> dense ReLU
// -> single linear output.
struct NetworkSpec {
    std::vector<ConvLayerSpec> conv_layers;
    int dense_units = 64;
    int output_units = 1;
    int input_length = 0;
    int input_channels = 1;

    void validate() const;
    std::string label() const;
    Index parameter_count() const;
    nlohmann::json to_json() const;
    static NetworkSpec from_json(const nlohmann::json& j);
    bool operator==(const NetworkSpec&) const = default;
};

// `count` identical conv layers.
NetworkSpec uniform_network(int count, int filters, int kernel_size, double l2, int input_length);

struct TrainConfig {
    double learning_rate = 0.001;
    int epochs = 1000;
    int batch_size = 32;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 0;
    double validation_fraction = 0.2;

    nlohmann::json to_json() const;
    static TrainConfig from_json(const nlohmann::json& j);
};

// One convolution: weights indexed [(f * channels + c) * kernel_size + j].
struct Conv1dKernel {
    int filters = 1;
    int channels = 1;
    int kernel_size = 3;
    std::vector<double> weights;
    std::vector<double> bias;
};

// Input is L x channels; output is L x filters. Zero padding puts
// (k - 1) / 2 zeros on the left and the rest on the right.
Matrix conv1d_forward(const Matrix& input, const Conv1dKernel& kernel);

struct LossParts {
    double data = 0.0;    // mean squared error
    double penalty = 0.0; // sum over conv layers of l2 * ||W||^2
    double total() const { return data + penalty; }
};

// Parameters live in one flat vector: per conv layer weights then biases,
// then the dense weights (units x flattened, row-major) and biases, then
// the output weights and bias. Flattening is time-major (t * filters + f).
class Network {
public:
    Network() = default;
    explicit Network(NetworkSpec spec);

    const NetworkSpec& spec() const { return spec_; }
    Vector params;

    Conv1dKernel conv_kernel(std::size_t layer) const;
    void set_conv_kernel(std::size_t layer, const Conv1dKernel& k);

    // Offsets of each block in `params`.
    struct Layout {
        std::vector<Index> conv_w, conv_b;
        Index dense_w = 0, dense_b = 0, out_w = 0, out_b = 0, total = 0;
    };
    const Layout& layout() const { return layout_; }

private:
    NetworkSpec spec_;
    Layout layout_;
};

// Rows of `x` are samples; columns are the input sequence.
Vector forward(const Network& net, const Matrix& x);

// MSE plus the conv-kernel L2 penalty; fills `grad` when given.
LossParts loss_and_grad(const Network& net, const Matrix& x, const Vector& y, Vector* grad);

// Uniform fan-in initialization: sqrt(6 / fan_in) for hidden layers,
// sqrt(3 / fan_in) for the output; biases zero except the output bias.
Network init_network(const NetworkSpec& spec, std::uint64_t seed, double output_bias = 0.0);

struct AdamState {
    Vector m;
    Vector v;
    long t = 0;
};

void adam_step(Vector& params, const Vector& grad, AdamState& state, const TrainConfig& cfg);

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0; // NaN without a validation set
};

struct TrainedNetwork {
    NetworkSpec spec;
    TrainConfig config;
    std::vector<std::string> feature_names;
    Vector best_params;  // weights at the best validation epoch
    Vector final_params; // weights after the last epoch
    std::vector<EpochRecord> history;
    int best_epoch = 0;

    Network network(bool final_weights = false) const;
    Vector predict(const FeatureMatrix& m, bool final_weights = false) const;
    void write_history_csv(std::ostream& out) const;
    nlohmann::json to_json() const;
    static TrainedNetwork from_json(const nlohmann::json& j);
};

struct HoldoutSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

// Seeded random slice of round(fraction * n) rows; both lists ascending.
HoldoutSplit holdout_split(Index n, double fraction, std::uint64_t seed);

// Mini-batch Adam on shuffled batches. The reported weights come from the
// epoch with the lowest validation MSE (the last epoch without validation).
TrainedNetwork train(const NetworkSpec& spec, const TrainConfig& cfg, const FeatureMatrix& train_set,
                     const FeatureMatrix& validation_set);

// Splits off `cfg.validation_fraction` of the rows, then trains.
TrainedNetwork train_with_holdout(const NetworkSpec& spec, const TrainConfig& cfg, const FeatureMatrix& data);

} // namespace thermo

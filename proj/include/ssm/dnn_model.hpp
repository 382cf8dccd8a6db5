#pragma once
#include <json.hpp>
#include <span>
#include <string>
#include <vector>
#include <ssm/rng.hpp>

namespace ssm::dnn {

enum class NoiseFeature
{
    raw,   ///< sigma2 as is
    log10  ///< log10(sigma2)
};

/// Two-input regression network for the PA factor:
///
///   input_1 (C x H x W) -> conv(k x k, same) -> ReLU -> max-pool
///     -> conv(k x k, same) -> ReLU -> flatten
///   concat input_2 (noise feature) -> dense -> ReLU -> dense(1)
///     -> sigmoid scaled to [beta_min, beta_max]
///
/// Pooling is 2 x 2 where both plane dimensions are at least 2; a dimension
/// of size 1 is pooled with extent 1. Pooling ties pick the first maximum in
/// row-major window order. "Same" convolution pads the bottom/right edges
/// with zeros.
struct NetConfig
{
    int in_channels = 4;
    int height = 2;
    int width = 4;
    int conv1_filters = 8;
    int conv2_filters = 16;
    int kernel = 2;
    int hidden = 32;
    double beta_min = 0.05;
    double beta_max = 0.95;
    NoiseFeature noise_feature = NoiseFeature::log10;

    int pool_h() const { return height >= 2 ? 2 : 1; }
    int pool_w() const { return width >= 2 ? 2 : 1; }
    int pooled_h() const { return height / pool_h(); }
    int pooled_w() const { return width / pool_w(); }
    int flat_size() const { return conv2_filters * pooled_h() * pooled_w(); }
    int input_size() const { return in_channels * height * width; }
};

/// Offsets of each parameter tensor inside the flat parameter vector.
struct ParamLayout
{
    std::size_t conv1_w, conv1_b, conv2_w, conv2_b, fc1_w, fc1_b, fc2_w, fc2_b, total;
    explicit ParamLayout(const NetConfig& cfg);
};

/// Intermediate activations of one forward pass, reused by backward.
struct ForwardCache
{
    std::vector<double> input, conv1, relu1, pooled, conv2, relu2, fc_in, fc1, relu_fc1;
    std::vector<int> pool_argmax;
    double logit = 0.0;
    double squashed = 0.0;
    double output = 0.0;
};

class PaNet
{
public:
    explicit PaNet(NetConfig cfg);

    const NetConfig& config() const { return cfg_; }
    const ParamLayout& layout() const { return layout_; }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    /// He-uniform hidden weights; zero biases and output weights.
    void init_random(RngStream& rng);

    double noise_feature(double sigma2) const;

    /// `planes` holds C*H*W values, channel-major then row-major.
    double forward(std::span<const double> planes, double sigma2, ForwardCache& cache) const;
    double forward(std::span<const double> planes, double sigma2) const;

    /// Accumulates d(loss)/d(params) into `grad` given d(loss)/d(output).
    void backward(const ForwardCache& cache, double dloss_dout, std::vector<double>& grad) const;

private:
    NetConfig cfg_;
    ParamLayout layout_;
    std::vector<double> params_;
};

struct AdamState
{
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    long long step = 0;
    std::vector<double> m, v;

    void update(std::vector<double>& params, const std::vector<double>& grad);
};

nlohmann::json net_to_json(const PaNet& net);
PaNet net_from_json(const nlohmann::json& j);

void save_net(const PaNet& net, const std::string& path);
PaNet load_net(const std::string& path);

} // namespace ssm::dnn

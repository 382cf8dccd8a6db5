#include <algorithm>
#include <cmath>
#include <fstream>
#include <ssm/dnn_model.hpp>
#include <ssm/errors.hpp>

namespace ssm::dnn {
namespace {

// Same-size convolution of in (c_in x h x w) with weights (f x c_in x k x k),
// zero padding past the bottom/right edges.
void conv_forward(const double* in, int c_in, int h, int w, const double* weight, const double* bias, int filters,
                  int k, double* out)
{
    for (int f = 0; f < filters; ++f) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double acc = bias[f];
                for (int c = 0; c < c_in; ++c) {
                    const double* wk = weight + ((f * c_in + c) * k) * k;
                    const double* plane = in + c * h * w;
                    for (int dy = 0; dy < k && y + dy < h; ++dy)
                        for (int dx = 0; dx < k && x + dx < w; ++dx) acc += wk[dy * k + dx] * plane[(y + dy) * w + x + dx];
                }
                out[(f * h + y) * w + x] = acc;
            }
        }
    }
}

// d_in may be null when the input gradient is not needed.
void conv_backward(const double* in, int c_in, int h, int w, const double* weight, int filters, int k,
                   const double* d_out, double* d_weight, double* d_bias, double* d_in)
{
    for (int f = 0; f < filters; ++f) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double g = d_out[(f * h + y) * w + x];
                if (g == 0.0) continue;
                d_bias[f] += g;
                for (int c = 0; c < c_in; ++c) {
                    const std::size_t wbase = static_cast<std::size_t>((f * c_in + c) * k) * k;
                    const double* plane = in + c * h * w;
                    for (int dy = 0; dy < k && y + dy < h; ++dy) {
                        for (int dx = 0; dx < k && x + dx < w; ++dx) {
                            const int idx = (y + dy) * w + x + dx;
                            d_weight[wbase + dy * k + dx] += g * plane[idx];
                            if (d_in) d_in[c * h * w + idx] += g * weight[wbase + dy * k + dx];
                        }
                    }
                }
            }
        }
    }
}

double sigmoid(double z)
{
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

} // namespace

ParamLayout::ParamLayout(const NetConfig& cfg)
{
    const std::size_t k2 = static_cast<std::size_t>(cfg.kernel) * cfg.kernel;
    std::size_t at = 0;
    conv1_w = at; at += static_cast<std::size_t>(cfg.conv1_filters) * cfg.in_channels * k2;
    conv1_b = at; at += cfg.conv1_filters;
    conv2_w = at; at += static_cast<std::size_t>(cfg.conv2_filters) * cfg.conv1_filters * k2;
    conv2_b = at; at += cfg.conv2_filters;
    fc1_w = at;   at += static_cast<std::size_t>(cfg.hidden) * (cfg.flat_size() + 1);
    fc1_b = at;   at += cfg.hidden;
    fc2_w = at;   at += cfg.hidden;
    fc2_b = at;   at += 1;
    total = at;
}

PaNet::PaNet(NetConfig cfg) : cfg_(cfg), layout_(cfg), params_(layout_.total, 0.0)
{
    require(cfg.in_channels >= 1 && cfg.height >= 1 && cfg.width >= 1, "network input dims must be >= 1");
    require(cfg.conv1_filters >= 1 && cfg.conv2_filters >= 1 && cfg.kernel >= 1 && cfg.hidden >= 1,
            "network layer sizes must be >= 1");
    require(cfg.beta_min < cfg.beta_max, "empty output bracket");
}

void PaNet::init_random(RngStream& rng)
{
    std::fill(params_.begin(), params_.end(), 0.0);
    auto fill = [&](std::size_t offset, std::size_t count, int fan_in) {
        const double limit = std::sqrt(6.0 / fan_in);
        for (std::size_t i = 0; i < count; ++i) params_[offset + i] = (2.0 * rng.uniform() - 1.0) * limit;
    };
    const int k2 = cfg_.kernel * cfg_.kernel;
    fill(layout_.conv1_w, layout_.conv1_b - layout_.conv1_w, cfg_.in_channels * k2);
    fill(layout_.conv2_w, layout_.conv2_b - layout_.conv2_w, cfg_.conv1_filters * k2);
    fill(layout_.fc1_w, layout_.fc1_b - layout_.fc1_w, cfg_.flat_size() + 1);
    // Output layer starts at zero: the initial prediction is the bracket midpoint for every input.
}

double PaNet::noise_feature(double sigma2) const
{
    return cfg_.noise_feature == NoiseFeature::log10 ? std::log10(sigma2) : sigma2;
}

double PaNet::forward(std::span<const double> planes, double sigma2) const
{
    ForwardCache cache;
    return forward(planes, sigma2, cache);
}

double PaNet::forward(std::span<const double> planes, double sigma2, ForwardCache& cache) const
{
    const NetConfig& c = cfg_;
    if (static_cast<int>(planes.size()) != c.input_size()) {
        throw DimensionMismatchError("network expects " + std::to_string(c.input_size()) + " inputs, got "
                                     + std::to_string(planes.size()));
    }
    const double* p = params_.data();
    const int h = c.height, w = c.width;
    const int ph = c.pool_h(), pw = c.pool_w();
    const int h1 = c.pooled_h(), w1 = c.pooled_w();

    cache.input.assign(planes.begin(), planes.end());
    cache.conv1.assign(static_cast<std::size_t>(c.conv1_filters) * h * w, 0.0);
    conv_forward(cache.input.data(), c.in_channels, h, w, p + layout_.conv1_w, p + layout_.conv1_b, c.conv1_filters,
                 c.kernel, cache.conv1.data());
    cache.relu1.resize(cache.conv1.size());
    for (std::size_t i = 0; i < cache.conv1.size(); ++i) cache.relu1[i] = std::max(0.0, cache.conv1[i]);

    cache.pooled.assign(static_cast<std::size_t>(c.conv1_filters) * h1 * w1, 0.0);
    cache.pool_argmax.assign(cache.pooled.size(), 0);
    for (int f = 0; f < c.conv1_filters; ++f) {
        for (int y = 0; y < h1; ++y) {
            for (int x = 0; x < w1; ++x) {
                int arg = (f * h + y * ph) * w + x * pw;
                double best = cache.relu1[arg];
                for (int dy = 0; dy < ph; ++dy) {
                    for (int dx = 0; dx < pw; ++dx) {
                        const int idx = (f * h + y * ph + dy) * w + x * pw + dx;
                        if (cache.relu1[idx] > best) {
                            best = cache.relu1[idx];
                            arg = idx;
                        }
                    }
                }
                const int o = (f * h1 + y) * w1 + x;
                cache.pooled[o] = best;
                cache.pool_argmax[o] = arg;
            }
        }
    }

    cache.conv2.assign(static_cast<std::size_t>(c.flat_size()), 0.0);
    conv_forward(cache.pooled.data(), c.conv1_filters, h1, w1, p + layout_.conv2_w, p + layout_.conv2_b,
                 c.conv2_filters, c.kernel, cache.conv2.data());
    cache.relu2.resize(cache.conv2.size());
    for (std::size_t i = 0; i < cache.conv2.size(); ++i) cache.relu2[i] = std::max(0.0, cache.conv2[i]);

    cache.fc_in = cache.relu2;
    cache.fc_in.push_back(noise_feature(sigma2));
    const int n_in = c.flat_size() + 1;
    cache.fc1.assign(c.hidden, 0.0);
    cache.relu_fc1.assign(c.hidden, 0.0);
    for (int i = 0; i < c.hidden; ++i) {
        double acc = p[layout_.fc1_b + i];
        const double* row = p + layout_.fc1_w + static_cast<std::size_t>(i) * n_in;
        for (int k = 0; k < n_in; ++k) acc += row[k] * cache.fc_in[k];
        cache.fc1[i] = acc;
        cache.relu_fc1[i] = std::max(0.0, acc);
    }
    double logit = p[layout_.fc2_b];
    for (int i = 0; i < c.hidden; ++i) logit += p[layout_.fc2_w + i] * cache.relu_fc1[i];
    cache.logit = logit;
    cache.squashed = sigmoid(logit);
    cache.output = c.beta_min + (c.beta_max - c.beta_min) * cache.squashed;
    return cache.output;
}

void PaNet::backward(const ForwardCache& cache, double dloss_dout, std::vector<double>& grad) const
{
    const NetConfig& c = cfg_;
    if (grad.size() != params_.size()) grad.assign(params_.size(), 0.0);
    const double* p = params_.data();
    const int h = c.height, w = c.width;
    const int h1 = c.pooled_h(), w1 = c.pooled_w();
    const int n_in = c.flat_size() + 1;

    const double d_logit = dloss_dout * (c.beta_max - c.beta_min) * cache.squashed * (1.0 - cache.squashed);
    grad[layout_.fc2_b] += d_logit;
    std::vector<double> d_fc1(c.hidden);
    for (int i = 0; i < c.hidden; ++i) {
        grad[layout_.fc2_w + i] += d_logit * cache.relu_fc1[i];
        d_fc1[i] = cache.fc1[i] > 0 ? d_logit * p[layout_.fc2_w + i] : 0.0;
    }

    std::vector<double> d_fc_in(n_in, 0.0);
    for (int i = 0; i < c.hidden; ++i) {
        if (d_fc1[i] == 0.0) continue;
        grad[layout_.fc1_b + i] += d_fc1[i];
        const std::size_t row = layout_.fc1_w + static_cast<std::size_t>(i) * n_in;
        for (int k = 0; k < n_in; ++k) {
            grad[row + k] += d_fc1[i] * cache.fc_in[k];
            d_fc_in[k] += d_fc1[i] * p[row + k];
        }
    }

    std::vector<double> d_conv2(cache.conv2.size());
    for (std::size_t i = 0; i < d_conv2.size(); ++i) d_conv2[i] = cache.conv2[i] > 0 ? d_fc_in[i] : 0.0;

    std::vector<double> d_pooled(cache.pooled.size(), 0.0);
    conv_backward(cache.pooled.data(), c.conv1_filters, h1, w1, p + layout_.conv2_w, c.conv2_filters, c.kernel,
                  d_conv2.data(), grad.data() + layout_.conv2_w, grad.data() + layout_.conv2_b, d_pooled.data());

    std::vector<double> d_conv1(cache.conv1.size(), 0.0);
    for (std::size_t o = 0; o < d_pooled.size(); ++o) d_conv1[cache.pool_argmax[o]] += d_pooled[o];
    for (std::size_t i = 0; i < d_conv1.size(); ++i) {
        if (!(cache.conv1[i] > 0)) d_conv1[i] = 0.0;
    }

    conv_backward(cache.input.data(), c.in_channels, h, w, p + layout_.conv1_w, c.conv1_filters, c.kernel,
                  d_conv1.data(), grad.data() + layout_.conv1_w, grad.data() + layout_.conv1_b, nullptr);
}

void AdamState::update(std::vector<double>& params, const std::vector<double>& grad)
{
    if (m.size() != params.size()) {
        m.assign(params.size(), 0.0);
        v.assign(params.size(), 0.0);
    }
    ++step;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
        params[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + epsilon);
    }
}

namespace {

constexpr const char* model_format = "ssm-pa-net";
constexpr int model_version = 1;

nlohmann::json tensor(const PaNet& net, const char* name, std::vector<int> shape, std::size_t offset)
{
    std::size_t count = 1;
    for (int s : shape) count *= static_cast<std::size_t>(s);
    const auto& p = net.params();
    return {{"name", name}, {"shape", shape},
            {"values", std::vector<double>(p.begin() + static_cast<long>(offset),
                                           p.begin() + static_cast<long>(offset + count))}};
}

} // namespace

nlohmann::json net_to_json(const PaNet& net)
{
    const NetConfig& c = net.config();
    const ParamLayout& l = net.layout();
    nlohmann::json j;
    j["format"] = model_format;
    j["version"] = model_version;
    j["config"] = {{"in_channels", c.in_channels}, {"height", c.height},          {"width", c.width},
                   {"conv1_filters", c.conv1_filters}, {"conv2_filters", c.conv2_filters}, {"kernel", c.kernel},
                   {"hidden", c.hidden},           {"beta_min", c.beta_min},      {"beta_max", c.beta_max},
                   {"noise_feature", c.noise_feature == NoiseFeature::log10 ? "log10" : "raw"}};
    j["tensors"] = {
        tensor(net, "conv1.weight", {c.conv1_filters, c.in_channels, c.kernel, c.kernel}, l.conv1_w),
        tensor(net, "conv1.bias", {c.conv1_filters}, l.conv1_b),
        tensor(net, "conv2.weight", {c.conv2_filters, c.conv1_filters, c.kernel, c.kernel}, l.conv2_w),
        tensor(net, "conv2.bias", {c.conv2_filters}, l.conv2_b),
        tensor(net, "fc1.weight", {c.hidden, c.flat_size() + 1}, l.fc1_w),
        tensor(net, "fc1.bias", {c.hidden}, l.fc1_b),
        tensor(net, "fc2.weight", {1, c.hidden}, l.fc2_w),
        tensor(net, "fc2.bias", {1}, l.fc2_b),
    };
    return j;
}

PaNet net_from_json(const nlohmann::json& j)
{
    try {
        if (j.at("format").get<std::string>() != model_format) throw FormatError("not a PA network file");
        if (j.at("version").get<int>() != model_version) throw FormatError("unsupported model version");
        const auto& jc = j.at("config");
        NetConfig c;
        c.in_channels = jc.at("in_channels").get<int>();
        c.height = jc.at("height").get<int>();
        c.width = jc.at("width").get<int>();
        c.conv1_filters = jc.at("conv1_filters").get<int>();
        c.conv2_filters = jc.at("conv2_filters").get<int>();
        c.kernel = jc.at("kernel").get<int>();
        c.hidden = jc.at("hidden").get<int>();
        c.beta_min = jc.at("beta_min").get<double>();
        c.beta_max = jc.at("beta_max").get<double>();
        c.noise_feature = jc.at("noise_feature").get<std::string>() == "raw" ? NoiseFeature::raw : NoiseFeature::log10;
        PaNet net(c);
        std::vector<double> flat;
        for (const auto& t : j.at("tensors")) {
            const auto values = t.at("values").get<std::vector<double>>();
            flat.insert(flat.end(), values.begin(), values.end());
        }
        if (flat.size() != net.params().size()) throw FormatError("tensor sizes do not match config");
        net.params() = std::move(flat);
        return net;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(e.what());
    }
}

void save_net(const PaNet& net, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << net_to_json(net).dump(1) << '\n';
}

PaNet load_net(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(e.what());
    }
    return net_from_json(j);
}

} // namespace ssm::dnn

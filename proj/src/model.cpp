#include "faithbench/model.hpp"

#include <cmath>
#include <limits>

#include "faithbench/io.hpp"
#include "faithbench/rng.hpp"

namespace faithbench {

namespace {

std::string activation_name(Activation act) {
    return act == Activation::relu ? "relu" : "identity";
}

Activation activation_from_name(const std::string& name) {
    if (name == "relu") return Activation::relu;
    if (name == "identity") return Activation::identity;
    raise(ErrorCode::parse, "unknown activation: " + name);
}

void check_input(const DenseModel& model, Eigen::Index d) {
    require(static_cast<int>(d) == model.input_dim, ErrorCode::shape,
            "input has dimension " + std::to_string(d) + ", model expects " +
                std::to_string(model.input_dim));
}

Eigen::MatrixXd xavier_init(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    const double scale = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) w(i, j) = scale * (2.0 * rng.uniform() - 1.0);
    return w;
}

}  // namespace

std::string arch_tag_name(ArchTag tag) {
    return tag == ArchTag::linear ? "linear" : "dense3";
}

ArchTag arch_tag_from_name(const std::string& name) {
    if (name == "linear") return ArchTag::linear;
    if (name == "dense3") return ArchTag::dense3;
    raise(ErrorCode::parse, "unknown architecture tag: " + name);
}

double sigmoid(double z) {
    double p;
    if (z >= 0.0) {
        p = 1.0 / (1.0 + std::exp(-z));
    } else {
        const double e = std::exp(z);
        p = e / (1.0 + e);
    }
    // Keep the output strictly inside (0, 1) even when exp saturates.
    constexpr double lo = std::numeric_limits<double>::denorm_min();
    constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2;
    return std::min(hi, std::max(lo, p));
}

void DenseModel::validate() const {
    require(!layers.empty(), ErrorCode::shape, "model has no layers");
    require(input_dim > 0, ErrorCode::shape, "model input_dim must be positive");
    Eigen::Index in = input_dim;
    for (const auto& layer : layers) {
        require(layer.W.cols() == in, ErrorCode::shape, "layer dimensions do not chain");
        require(layer.b.size() == layer.W.rows(), ErrorCode::shape, "bias length mismatch");
        in = layer.W.rows();
    }
    require(in == 1, ErrorCode::shape, "final layer must produce a scalar");
    if (tag == ArchTag::linear) {
        require(layers.size() == 1 && layers[0].act == Activation::identity, ErrorCode::shape,
                "linear tag requires exactly one identity layer");
    } else {
        require(layers.size() == 3, ErrorCode::shape, "dense3 tag requires exactly three layers");
        require(layers[0].act == Activation::relu && layers[1].act == Activation::relu,
                ErrorCode::shape, "dense3 hidden activations must be relu");
        require(layers[2].act == Activation::identity, ErrorCode::shape,
                "dense3 output layer must be identity");
    }
}

double DenseModel::logit(const Eigen::VectorXd& x) const {
    check_input(*this, x.size());
    Eigen::VectorXd h = x;
    for (const auto& layer : layers) {
        h = (layer.W * h + layer.b).eval();
        if (layer.act == Activation::relu) h = h.cwiseMax(0.0);
    }
    return h(0);
}

double DenseModel::predict(const Eigen::VectorXd& x) const { return sigmoid(logit(x)); }

Eigen::VectorXd DenseModel::logit_batch(const Eigen::MatrixXd& X) const {
    check_input(*this, X.cols());
    Eigen::MatrixXd h = X;
    for (const auto& layer : layers) {
        h = ((h * layer.W.transpose()).rowwise() + layer.b.transpose()).eval();
        if (layer.act == Activation::relu) h = h.cwiseMax(0.0);
    }
    return h.col(0);
}

Eigen::VectorXd DenseModel::predict_batch(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd z = logit_batch(X);
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = sigmoid(z(i));
    return z;
}

Eigen::VectorXd DenseModel::input_gradient(const Eigen::VectorXd& x, GradientTarget target) const {
    return input_gradient_batch(x.transpose(), target).row(0);
}

Eigen::MatrixXd DenseModel::input_gradient_batch(const Eigen::MatrixXd& X,
                                                 GradientTarget target) const {
    check_input(*this, X.cols());
    const Eigen::Index n = X.rows();

    // Forward pass keeping pre-activations for the relu subgradient.
    std::vector<Eigen::MatrixXd> pre;
    pre.reserve(layers.size());
    Eigen::MatrixXd h = X;
    for (const auto& layer : layers) {
        Eigen::MatrixXd z = (h * layer.W.transpose()).rowwise() + layer.b.transpose();
        pre.push_back(z);
        h = layer.act == Activation::relu ? z.cwiseMax(0.0).eval() : z;
    }

    // d(target)/d(logit): 1 for the logit, sigma'(z) = p(1-p) for probability.
    Eigen::MatrixXd grad(n, 1);
    if (target == GradientTarget::logit) {
        grad.setOnes();
    } else {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double p = sigmoid(pre.back()(i, 0));
            grad(i, 0) = p * (1.0 - p);
        }
    }

    for (size_t li = layers.size(); li-- > 0;) {
        const auto& layer = layers[li];
        if (layer.act == Activation::relu) {
            // relu'(z) with the subgradient at 0 taken as 0.
            grad = grad.cwiseProduct((pre[li].array() > 0.0).cast<double>().matrix());
        }
        grad = (grad * layer.W).eval();
    }
    return grad;
}

Eigen::VectorXd DenseModel::linear_coefficients() const {
    require(tag == ArchTag::linear, ErrorCode::shape, "coefficients require a linear model");
    return layers[0].W.row(0);
}

void TrainConfig::validate() const {
    require(epochs >= 0, ErrorCode::invalid_argument, "epochs must be non-negative");
    require(batch_size >= 1, ErrorCode::invalid_argument, "batch_size must be positive");
    require(learning_rate > 0.0, ErrorCode::invalid_argument, "learning_rate must be positive");
    require(hidden_widths[0] >= 1 && hidden_widths[1] >= 1, ErrorCode::invalid_argument,
            "hidden widths must be positive");
}

double log_loss(const Eigen::VectorXd& probs, const std::vector<int>& y,
                const std::vector<size_t>& idx) {
    require(!idx.empty(), ErrorCode::invalid_argument, "log_loss over an empty index set");
    double total = 0.0;
    for (size_t pos = 0; pos < idx.size(); ++pos) {
        const double p = probs(static_cast<Eigen::Index>(pos));
        total -= y[idx[pos]] == 1 ? std::log(p) : std::log(1.0 - p);
    }
    return total / static_cast<double>(idx.size());
}

DenseModel train(const Dataset& ds, const TrainConfig& cfg, ArchTag tag) {
    cfg.validate();
    const auto train_idx = ds.train_indices();
    require(!train_idx.empty(), ErrorCode::invalid_argument, "train split is empty");

    const int d = static_cast<int>(ds.cols());
    DenseModel model;
    model.tag = tag;
    model.input_dim = d;

    Rng rng(derive_seed(cfg.seed, "init"));
    if (tag == ArchTag::linear) {
        model.layers.push_back({xavier_init(1, d, rng), Eigen::VectorXd::Zero(1), Activation::identity});
    } else {
        const int h1 = cfg.hidden_widths[0];
        const int h2 = cfg.hidden_widths[1];
        model.layers.push_back({xavier_init(h1, d, rng), Eigen::VectorXd::Zero(h1), Activation::relu});
        model.layers.push_back({xavier_init(h2, h1, rng), Eigen::VectorXd::Zero(h2), Activation::relu});
        model.layers.push_back({xavier_init(1, h2, rng), Eigen::VectorXd::Zero(1), Activation::identity});
    }
    model.validate();

    Eigen::MatrixXd Xtrain(train_idx.size(), d);
    Eigen::VectorXd ytrain(train_idx.size());
    for (size_t i = 0; i < train_idx.size(); ++i) {
        Xtrain.row(static_cast<Eigen::Index>(i)) = ds.X.row(static_cast<Eigen::Index>(train_idx[i]));
        ytrain(static_cast<Eigen::Index>(i)) = ds.y[train_idx[i]];
    }

    const size_t n = train_idx.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    Rng shuffler(derive_seed(cfg.seed, "shuffle"));

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffler.shuffle(order);
        for (size_t start = 0; start < n; start += static_cast<size_t>(cfg.batch_size)) {
            const size_t end = std::min(n, start + static_cast<size_t>(cfg.batch_size));
            const Eigen::Index bs = static_cast<Eigen::Index>(end - start);

            Eigen::MatrixXd xb(bs, d);
            Eigen::VectorXd yb(bs);
            for (Eigen::Index i = 0; i < bs; ++i) {
                xb.row(i) = Xtrain.row(static_cast<Eigen::Index>(order[start + static_cast<size_t>(i)]));
                yb(i) = ytrain(static_cast<Eigen::Index>(order[start + static_cast<size_t>(i)]));
            }

            // Forward with cached activations.
            std::vector<Eigen::MatrixXd> acts{xb};
            std::vector<Eigen::MatrixXd> pre;
            Eigen::MatrixXd h = xb;
            for (const auto& layer : model.layers) {
                Eigen::MatrixXd z = (h * layer.W.transpose()).rowwise() + layer.b.transpose();
                pre.push_back(z);
                h = layer.act == Activation::relu ? z.cwiseMax(0.0).eval() : z;
                acts.push_back(h);
            }

            // dL/dz for sigmoid + log-loss.
            Eigen::MatrixXd delta(bs, 1);
            for (Eigen::Index i = 0; i < bs; ++i)
                delta(i, 0) = (sigmoid(pre.back()(i, 0)) - yb(i)) / static_cast<double>(bs);

            for (size_t li = model.layers.size(); li-- > 0;) {
                auto& layer = model.layers[li];
                if (layer.act == Activation::relu)
                    delta = delta.cwiseProduct((pre[li].array() > 0.0).cast<double>().matrix());
                const Eigen::MatrixXd grad_w = delta.transpose() * acts[li];
                const Eigen::VectorXd grad_b = delta.colwise().sum();
                if (li > 0) delta = (delta * layer.W).eval();
                layer.W -= cfg.learning_rate * grad_w;
                layer.b -= cfg.learning_rate * grad_b;
            }
        }

        const Eigen::VectorXd probs = model.predict_batch(Xtrain);
        const double loss = log_loss(probs, ds.y, train_idx);
        require(std::isfinite(loss), ErrorCode::numeric,
                "training diverged (non-finite loss) at epoch " + std::to_string(epoch));
    }
    return model;
}

void save_model(const DenseModel& model, const std::filesystem::path& path) {
    nlohmann::json j;
    j["tag"] = arch_tag_name(model.tag);
    j["input_dim"] = model.input_dim;
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : model.layers) {
        std::vector<double> weights;
        weights.reserve(static_cast<size_t>(layer.W.size()));
        for (Eigen::Index i = 0; i < layer.W.rows(); ++i)
            for (Eigen::Index j2 = 0; j2 < layer.W.cols(); ++j2) weights.push_back(layer.W(i, j2));
        std::vector<double> bias(layer.b.data(), layer.b.data() + layer.b.size());
        layers.push_back({{"rows", layer.W.rows()},
                          {"cols", layer.W.cols()},
                          {"activation", activation_name(layer.act)},
                          {"weights", weights},
                          {"bias", bias}});
    }
    j["layers"] = std::move(layers);
    write_json_file(path, j);
}

DenseModel load_model(const std::filesystem::path& path) {
    const nlohmann::json j = read_json_file(path);
    require(j.contains("tag") && j.contains("layers") && j.contains("input_dim"), ErrorCode::parse,
            "model file missing required fields: " + path.string());
    DenseModel model;
    model.tag = arch_tag_from_name(j["tag"].get<std::string>());
    model.input_dim = j["input_dim"].get<int>();
    for (const auto& lj : j["layers"]) {
        Layer layer;
        const Eigen::Index rows = lj.at("rows").get<Eigen::Index>();
        const Eigen::Index cols = lj.at("cols").get<Eigen::Index>();
        const auto weights = lj.at("weights").get<std::vector<double>>();
        const auto bias = lj.at("bias").get<std::vector<double>>();
        require(static_cast<Eigen::Index>(weights.size()) == rows * cols, ErrorCode::parse,
                "weight array size mismatch in " + path.string());
        require(static_cast<Eigen::Index>(bias.size()) == rows, ErrorCode::parse,
                "bias array size mismatch in " + path.string());
        layer.W.resize(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index c = 0; c < cols; ++c)
                layer.W(i, c) = weights[static_cast<size_t>(i * cols + c)];
        layer.b = Eigen::Map<const Eigen::VectorXd>(bias.data(), rows);
        layer.act = activation_from_name(lj.at("activation").get<std::string>());
        model.layers.push_back(std::move(layer));
    }
    model.validate();
    return model;
}

}  // namespace faithbench

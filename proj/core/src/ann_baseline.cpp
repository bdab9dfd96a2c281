#include "spikefolio/ann_baseline.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "spikefolio/csv.hpp"
#include "spikefolio/rng.hpp"

namespace spikefolio {

void MlpConfig::validate() const {
  if (hidden < 1) throw std::invalid_argument("hidden size must be >= 1");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (learning_rate < 0.0)
    throw std::invalid_argument("learning rate must be >= 0");
  if (batch < 1) throw std::invalid_argument("batch size must be >= 1");
  if (dropout < 0.0 || dropout >= 1.0)
    throw std::invalid_argument("dropout must be in [0, 1)");
  if (window < 2) throw std::invalid_argument("feature window must be >= 2");
}

MlpParams init_mlp(int input_dim, int hidden, int output_dim,
                   std::uint64_t seed) {
  Rng rng(seed);
  auto xavier = [&rng](Eigen::Index rows, Eigen::Index cols) {
    double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        m(r, c) = rng.uniform(-bound, bound);
    return m;
  };
  MlpParams p;
  p.w1 = xavier(hidden, input_dim);
  p.b1 = Eigen::VectorXd::Zero(hidden);
  p.w2 = xavier(output_dim, hidden);
  p.b2 = Eigen::VectorXd::Zero(output_dim);
  return p;
}

Eigen::VectorXd build_features(const Eigen::MatrixXd& window_returns) {
  const Eigen::Index t_count = window_returns.rows();
  const Eigen::Index n = window_returns.cols();
  if (t_count < 2)
    throw std::invalid_argument("build_features needs >= 2 rows");
  Eigen::VectorXd x(3 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double mean = window_returns.col(i).mean();
    double sd = std::sqrt((window_returns.col(i).array() - mean).square().sum() /
                          static_cast<double>(t_count - 1));
    double z_last = sd > 0.0 ? (window_returns(t_count - 1, i) - mean) / sd : 0.0;
    x(3 * i) = mean;
    x(3 * i + 1) = sd;
    x(3 * i + 2) = z_last;
  }
  return x;
}

namespace {

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  Eigen::VectorXd shifted = logits.array() - logits.maxCoeff();
  Eigen::VectorXd e = shifted.array().exp();
  return e / e.sum();
}

}  // namespace

Eigen::VectorXd mlp_forward(const MlpParams& params, const Eigen::VectorXd& x) {
  if (x.size() != params.w1.cols())
    throw std::invalid_argument("mlp_forward: feature dimension mismatch");
  Eigen::VectorXd h = (params.w1 * x + params.b1).cwiseMax(0.0);
  return softmax(params.w2 * h + params.b2);
}

MlpGradients mlp_gradients(const MlpParams& params, const Eigen::VectorXd& x,
                           const Moments& m, const ObjectiveConfig& obj,
                           const Eigen::VectorXd& dropout_mask,
                           double dropout_rate) {
  if (x.size() != params.w1.cols())
    throw std::invalid_argument("mlp_gradients: feature dimension mismatch");
  double keep = 1.0 - dropout_rate;
  Eigen::VectorXd h_lin = params.w1 * x + params.b1;
  Eigen::VectorXd h = h_lin.cwiseMax(0.0);
  Eigen::VectorXd h_drop = h.cwiseProduct(dropout_mask) / keep;
  Eigen::VectorXd logits = params.w2 * h_drop + params.b2;
  Eigen::VectorXd w = softmax(logits);

  MlpGradients g;
  g.loss = -sharpe(w, m, obj);
  Eigen::VectorXd dl_dw = -sharpe_gradient(w, m, obj);
  // softmax jacobian: dl_dz = w .* (dl_dw - <dl_dw, w>)
  Eigen::VectorXd dl_dz = w.cwiseProduct(
      (dl_dw.array() - dl_dw.dot(w)).matrix());
  g.w2 = dl_dz * h_drop.transpose();
  g.b2 = dl_dz;
  Eigen::VectorXd dh_drop = params.w2.transpose() * dl_dz;
  Eigen::VectorXd dh = dh_drop.cwiseProduct(dropout_mask) / keep;
  Eigen::VectorXd dh_lin =
      (h_lin.array() > 0.0).select(dh, Eigen::VectorXd::Zero(dh.size()));
  g.w1 = dh_lin * x.transpose();
  g.b1 = dh_lin;
  return g;
}

AnnTrainResult train_ann(const ReturnMatrix& rm, const MlpConfig& cfg,
                         const ObjectiveConfig& obj) {
  cfg.validate();
  const Eigen::Index t_count = rm.num_periods();
  const Eigen::Index n = rm.num_assets();
  if (n < 1) throw std::invalid_argument("train_ann: empty universe");
  const Eigen::Index window = std::min<Eigen::Index>(cfg.window, t_count);
  if (window < 2)
    throw std::invalid_argument("train_ann: too few return rows");

  AnnTrainResult out;
  out.params = init_mlp(static_cast<int>(3 * n), cfg.hidden,
                        static_cast<int>(n), cfg.seed);
  out.loss_history.reserve(static_cast<std::size_t>(cfg.epochs));

  // Adam state
  MlpParams m1{Eigen::MatrixXd::Zero(cfg.hidden, 3 * n),
               Eigen::VectorXd::Zero(cfg.hidden),
               Eigen::MatrixXd::Zero(n, cfg.hidden), Eigen::VectorXd::Zero(n)};
  MlpParams m2 = m1;
  const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
  double beta1_t = 1.0, beta2_t = 1.0;

  Rng rng(mix_seed(cfg.seed, 0x414e4eULL));
  const Eigen::Index max_start = t_count - window;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    MlpGradients acc;
    acc.w1 = Eigen::MatrixXd::Zero(cfg.hidden, 3 * n);
    acc.b1 = Eigen::VectorXd::Zero(cfg.hidden);
    acc.w2 = Eigen::MatrixXd::Zero(n, cfg.hidden);
    acc.b2 = Eigen::VectorXd::Zero(n);
    double batch_loss = 0.0;

    for (int b = 0; b < cfg.batch; ++b) {
      Eigen::Index start =
          max_start > 0
              ? static_cast<Eigen::Index>(rng.below(
                    static_cast<std::uint64_t>(max_start + 1)))
              : 0;
      Eigen::MatrixXd slice = rm.returns.middleRows(start, window);
      Moments wm = estimate_moments(slice);
      Eigen::VectorXd x = build_features(slice);
      Eigen::VectorXd mask(cfg.hidden);
      for (int h = 0; h < cfg.hidden; ++h)
        mask(h) = (cfg.dropout > 0.0 && rng.uniform() < cfg.dropout) ? 0.0 : 1.0;
      MlpGradients g =
          mlp_gradients(out.params, x, wm, obj, mask, cfg.dropout);
      acc.w1 += g.w1;
      acc.b1 += g.b1;
      acc.w2 += g.w2;
      acc.b2 += g.b2;
      batch_loss += g.loss;
    }
    double inv = 1.0 / cfg.batch;
    acc.w1 *= inv;
    acc.b1 *= inv;
    acc.w2 *= inv;
    acc.b2 *= inv;
    batch_loss *= inv;
    if (!std::isfinite(batch_loss))
      throw std::runtime_error("train_ann: non-finite loss at epoch " +
                               std::to_string(epoch));
    out.loss_history.push_back(batch_loss);

    if (cfg.learning_rate > 0.0) {
      beta1_t *= beta1;
      beta2_t *= beta2;
      auto adam_update = [&](Eigen::MatrixXd& param, Eigen::MatrixXd& mom1,
                             Eigen::MatrixXd& mom2, const Eigen::MatrixXd& g) {
        mom1 = beta1 * mom1 + (1.0 - beta1) * g;
        mom2 = beta2 * mom2.array().matrix() +
               (1.0 - beta2) * g.array().square().matrix();
        Eigen::ArrayXXd mhat = mom1.array() / (1.0 - beta1_t);
        Eigen::ArrayXXd vhat = mom2.array() / (1.0 - beta2_t);
        param.array() -= cfg.learning_rate * mhat / (vhat.sqrt() + adam_eps);
      };
      auto adam_update_v = [&](Eigen::VectorXd& param, Eigen::VectorXd& mom1,
                               Eigen::VectorXd& mom2, const Eigen::VectorXd& g) {
        mom1 = beta1 * mom1 + (1.0 - beta1) * g;
        mom2 = beta2 * mom2.array().matrix() +
               (1.0 - beta2) * g.array().square().matrix();
        Eigen::ArrayXd mhat = mom1.array() / (1.0 - beta1_t);
        Eigen::ArrayXd vhat = mom2.array() / (1.0 - beta2_t);
        param.array() -= cfg.learning_rate * mhat / (vhat.sqrt() + adam_eps);
      };
      adam_update(out.params.w1, m1.w1, m2.w1, acc.w1);
      adam_update_v(out.params.b1, m1.b1, m2.b1, acc.b1);
      adam_update(out.params.w2, m1.w2, m2.w2, acc.w2);
      adam_update_v(out.params.b2, m1.b2, m2.b2, acc.b2);
    }
  }
  return out;
}

namespace {
void write_matrix(std::ofstream& out, const std::string& name,
                  const Eigen::MatrixXd& m) {
  out << name << ' ' << m.rows() << ' ' << m.cols();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out << ' ' << csv::format_double(m(r, c));
  out << '\n';
}

Eigen::MatrixXd read_matrix(std::istream& in, const std::string& expect) {
  std::string name;
  Eigen::Index rows = 0, cols = 0;
  in >> name >> rows >> cols;
  if (!in || name != expect)
    throw std::runtime_error("mlp file: expected field '" + expect + "'");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) in >> m(r, c);
  return m;
}
}  // namespace

void save_mlp(const std::string& path, const MlpParams& params) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write mlp file: " + path);
  out << "spikefolio-mlp v1\n";
  write_matrix(out, "w1", params.w1);
  write_matrix(out, "b1", params.b1);
  write_matrix(out, "w2", params.w2);
  write_matrix(out, "b2", params.b2);
}

MlpParams load_mlp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mlp file: " + path);
  std::string magic, version;
  in >> magic >> version;
  if (magic != "spikefolio-mlp" || version != "v1")
    throw std::runtime_error("mlp file: unsupported format");
  MlpParams p;
  p.w1 = read_matrix(in, "w1");
  p.b1 = read_matrix(in, "b1");
  p.w2 = read_matrix(in, "w2");
  p.b2 = read_matrix(in, "b2");
  return p;
}

}  // namespace spikefolio

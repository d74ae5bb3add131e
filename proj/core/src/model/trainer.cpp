#include "emg/model/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "emg/error.hpp"
#include "emg/gesture.hpp"

namespace emg::model {

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

std::vector<int> select(std::span<const int> v, std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(v[r]);
  return out;
}

DataSplit stratified_split(std::span<const int> labels, const SplitFractions& f, std::uint64_t seed) {
  if (f.train < 0 || f.validation < 0 || f.test < 0 || std::abs(f.train + f.validation + f.test - 1.0) > 1e-9) {
    throw ParameterError("split fractions must be nonnegative and sum to 1");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  Rng rng(seed);
  DataSplit split;
  for (auto& [label, rows] : by_class) {
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto n = static_cast<double>(rows.size());
    const auto n_test = static_cast<std::size_t>(std::floor(f.test * n + 1e-9));
    const auto n_val = static_cast<std::size_t>(std::floor(f.validation * n + 1e-9));
    split.test.insert(split.test.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_test));
    split.validation.insert(split.validation.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_test),
                            rows.begin() + static_cast<std::ptrdiff_t>(n_test + n_val));
    split.train.insert(split.train.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_test + n_val), rows.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.validation.begin(), split.validation.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

double TrainingHistory::best_validation_loss() const {
  if (best_epoch < 0) return std::numeric_limits<double>::quiet_NaN();
  return validation_loss[static_cast<std::size_t>(best_epoch)];
}

TrainedNetwork train_network(const Eigen::MatrixXd& train_x, std::span<const int> train_y, const Eigen::MatrixXd& val_x,
                             std::span<const int> val_y, const TrainConfig& config) {
  if (config.epochs < 1) throw ParameterError("epochs must be >= 1");
  if (config.batch_size < 1) throw ParameterError("batch size must be >= 1");
  if (train_x.rows() == 0 || static_cast<std::size_t>(train_x.rows()) != train_y.size()) {
    throw DataError("training set is empty or mislabeled");
  }
  if (val_x.rows() == 0 || static_cast<std::size_t>(val_x.rows()) != val_y.size()) {
    throw DataError("validation set is empty or mislabeled");
  }

  Rng rng(config.seed ^ 0x7261696eull);
  Mlp model = Mlp::create(static_cast<int>(train_x.cols()), config.hidden, static_cast<int>(kGestureCount),
                          config.dropout, config.seed);
  Adam adam(model, config.adam);

  TrainedNetwork best{model, {}};
  auto& history = best.history;
  double best_loss = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> order(static_cast<std::size_t>(train_x.rows()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  Gradients grads;
  const auto batch = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(order.size(), start + batch);
      const std::span<const std::size_t> rows(order.data() + start, stop - start);
      const Eigen::MatrixXd xb = select_rows(train_x, rows);
      const std::vector<int> yb = select(train_y, rows);
      const DropoutMasks masks = model.sample_dropout(xb.rows(), rng);
      epoch_loss += model.loss_and_gradients(xb, yb, &masks, grads);
      adam.step(model, grads);
      ++batches;
    }
    history.train_loss.push_back(epoch_loss / static_cast<double>(batches));
    const double val = model.loss(val_x, val_y);
    history.validation_loss.push_back(val);
    if (val < best_loss) {
      best_loss = val;
      history.best_epoch = epoch;
      best.model = model;
    }
  }
  return best;
}

TrainResult train(const Eigen::MatrixXd& features, std::span<const int> labels, const TrainConfig& config) {
  if (features.rows() == 0) throw DataError("empty dataset");
  if (static_cast<std::size_t>(features.rows()) != labels.size()) throw DataError("feature/label count mismatch");
  DataSplit split = stratified_split(labels, config.split, config.seed);
  std::array<bool, kGestureCount> present{};
  for (std::size_t r : split.train) {
    const int y = labels[r];
    if (y < 0 || y >= static_cast<int>(kGestureCount)) throw ParameterError("class id out of range");
    present[static_cast<std::size_t>(y)] = true;
  }
  for (std::size_t g = 0; g < kGestureCount; ++g) {
    if (!present[g]) {
      throw DataError("class " + std::string(gesture_name(kAllGestures[g])) + " is absent from the training split");
    }
  }
  const auto train_y = select(labels, split.train);
  const auto val_y = select(labels, split.validation);
  auto trained = train_network(select_rows(features, split.train), train_y, select_rows(features, split.validation),
                               val_y, config);
  TrainResult out{std::move(trained.model), std::move(trained.history), std::move(split), {}};
  if (!out.split.test.empty()) {
    out.test = evaluate(out.model, select_rows(features, out.split.test), select(labels, out.split.test));
  }
  return out;
}

}  // namespace emg::model

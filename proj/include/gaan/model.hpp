#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gaan/dataset.hpp"
#include "gaan/fold.hpp"
#include "gaan/gac.hpp"
#include "gaan/graph.hpp"
#include "gaan/tensor.hpp"

namespace gaan {

struct ModelConfig {
  std::string arch = "GAC(32)-PMF-GAC(64)-PMF-GAC(128)-PMF-GAC(256)-PMF-GMP-Tanh";
  double lambda = 0.5;
  bool learn_lambda = false;
  int encoder_width = 32;
  double recon_weight = 0.0;  // autoencoder reconstruction loss coefficient
  double lr = 0.001;
  int batch_size = 64;
  int max_epochs = 200;
  int patience = 20;
  std::uint64_t seed = 1;

  struct Token {
    enum class Kind { Gac, Pmf, Gmp, Tanh };
    Kind kind = Kind::Gac;
    int width = 0;  // GAC only
  };
  std::vector<Token> tokens;  // filled by parse_arch

  int h_max() const;
  int last_width() const;  // vertex feature width entering the pool
};

// Parses and validates config.arch into config.tokens. Grammar: one or more
// GAC(<width>) each optionally followed by PMF, then GMP, then Tanh. Throws
// ConfigError naming the offending token.
void parse_arch(ModelConfig& config);

struct AutoencodeResult {
  Tensor z;      // n x d_enc, the optimized features fed to the first GAC
  Tensor recon;  // n x d_raw
};

// Feature-optimization layer: z = tanh(x W_enc + b_enc), recon = z W_dec +
// b_dec. The model's tape path computes the same expression.
AutoencodeResult autoencode_features(const Tensor& x, const Tensor& w_enc, const Tensor& b_enc,
                                     const Tensor& w_dec, const Tensor& b_dec);

// One learnable tensor with its Adam moments.
struct ParamEntry {
  std::string name;
  std::string cls;  // parameter class for gradcheck reporting
  Tensor value;
  Tensor m1;
  Tensor m2;
};

struct ModelSnapshot {
  std::vector<Tensor> values;
  std::vector<std::pair<Tensor, Tensor>> bn_running;
  int epoch = -1;
  double metric = 0.0;
};

// Per-graph precomputation: initial one-hot features, the structural folding
// pyramid, and attribute-group assignments at every level.
struct PreparedGraph {
  FoldingPyramid pyramid;
  Tensor x_v0;
  Tensor x_e0;
  std::vector<std::pair<std::vector<int>, std::vector<int>>> groups;  // per level
};

class Model {
 public:
  Model(ModelConfig config, AttributeSchema schema, std::vector<TaskType> task_types,
        std::vector<std::string> task_names);

  PreparedGraph prepare(const AttributedGraph& g) const;

  struct Forward {
    Var logits;  // batch x tasks
    Var recon;   // mean reconstruction loss; invalid when recon_weight == 0
  };
  // Builds the whole batch on one tape. Training mode uses batch statistics
  // for the norm layers (updating running stats) and registers parameters
  // with gradients enabled.
  Forward forward(Tape& t, const std::vector<const PreparedGraph*>& batch, bool training);

  // Eval-mode predictions: sigmoid probabilities for classification tasks,
  // raw outputs for regression tasks.
  Tensor predict(const std::vector<const PreparedGraph*>& batch);

  std::vector<ParamEntry>& params() { return params_; }
  const std::vector<ParamEntry>& params() const { return params_; }
  // Gradients for the last training forward, parallel to params().
  const std::vector<Tensor>& last_grads() const { return last_grads_; }
  void pull_grads(const Tape& t);

  ModelSnapshot snapshot() const;
  void restore(const ModelSnapshot& s);

  void save_checkpoint(const std::string& path) const;
  static Model load_checkpoint(const std::string& path);

  const ModelConfig& config() const { return config_; }
  const AttributeSchema& schema() const { return schema_; }
  const std::vector<TaskType>& task_types() const { return task_types_; }
  const std::vector<std::string>& task_names() const { return task_names_; }
  int tasks() const { return static_cast<int>(task_types_.size()); }

  // Canonical fingerprint of config + schema + tasks; checked on eval.
  std::string config_hash() const;

 private:
  struct GacIdx {
    std::vector<int> w_v, b_v, w_e, b_e;
    int lambda_raw = -1;  // -1 when lambda is a fixed hyperparameter
  };
  struct FoldIdx {
    int alpha = -1, beta = -1, omega = -1, theta = -1;
  };
  struct BnIdx {
    int gamma = -1, shift = -1;
  };

  int add_param(const std::string& name, const std::string& cls, Tensor value);
  void build_parameters();
  Var param_var(Tape& t, int idx, bool training) const;

  ModelConfig config_;
  AttributeSchema schema_;
  std::vector<TaskType> task_types_;
  std::vector<std::string> task_names_;

  std::vector<ParamEntry> params_;
  std::vector<Var> last_param_vars_;  // tape handles from the latest forward
  std::vector<Tensor> last_grads_;
  int enc_w_ = -1, enc_b_ = -1, dec_w_ = -1, dec_b_ = -1;
  std::vector<GacIdx> gac_;
  std::vector<BnIdx> bn_;
  std::vector<FoldIdx> fold_;
  int head_w_ = -1, head_b_ = -1;

  // Running batch-norm statistics per GAC token (eval mode input).
  std::vector<std::pair<Tensor, Tensor>> bn_running_;
  static constexpr double kBnMomentum = 0.9;
};

}  // namespace gaan

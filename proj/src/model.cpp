#include "gaan/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gaan/error.hpp"

namespace gaan {

using nlohmann::json;

int ModelConfig::h_max() const {
  int count = 0;
  for (const Token& t : tokens) count += t.kind == Token::Kind::Pmf ? 1 : 0;
  return count;
}

int ModelConfig::last_width() const {
  int width = 0;
  for (const Token& t : tokens) {
    if (t.kind == Token::Kind::Gac) width = t.width;
  }
  return width;
}

void parse_arch(ModelConfig& config) {
  config.tokens.clear();
  std::vector<std::string> raw;
  std::string token;
  std::istringstream in(config.arch);
  while (std::getline(in, token, '-')) raw.push_back(token);

  bool saw_gmp = false;
  bool saw_tanh = false;
  auto fail = [&](const std::string& t, const std::string& why) {
    throw Error(Error::Kind::ConfigError, "architecture token '" + t + "': " + why);
  };
  for (const std::string& t : raw) {
    if (saw_tanh) fail(t, "nothing may follow Tanh");
    ModelConfig::Token out;
    if (t.rfind("GAC(", 0) == 0 && t.size() > 5 && t.back() == ')') {
      if (saw_gmp) fail(t, "convolution after GMP");
      const std::string num = t.substr(4, t.size() - 5);
      int width = 0;
      try {
        std::size_t used = 0;
        width = std::stoi(num, &used);
        if (used != num.size()) throw std::invalid_argument(num);
      } catch (const std::exception&) {
        fail(t, "width is not an integer");
      }
      if (width <= 0) fail(t, "width must be positive");
      out.kind = ModelConfig::Token::Kind::Gac;
      out.width = width;
    } else if (t == "PMF") {
      if (saw_gmp) fail(t, "fold after GMP");
      if (config.tokens.empty() ||
          config.tokens.back().kind != ModelConfig::Token::Kind::Gac) {
        fail(t, "PMF must follow a GAC block");
      }
      out.kind = ModelConfig::Token::Kind::Pmf;
    } else if (t == "GMP") {
      if (saw_gmp) fail(t, "duplicate GMP");
      saw_gmp = true;
      out.kind = ModelConfig::Token::Kind::Gmp;
    } else if (t == "Tanh") {
      if (!saw_gmp) fail(t, "Tanh is only valid after GMP");
      saw_tanh = true;
      out.kind = ModelConfig::Token::Kind::Tanh;
    } else {
      fail(t, "unknown token");
    }
    config.tokens.push_back(out);
  }
  if (!saw_gmp) {
    throw Error(Error::Kind::ConfigError, "architecture needs a GMP pooling token");
  }
  if (config.last_width() == 0) {
    throw Error(Error::Kind::ConfigError, "architecture needs at least one GAC block");
  }
}

AutoencodeResult autoencode_features(const Tensor& x, const Tensor& w_enc, const Tensor& b_enc,
                                     const Tensor& w_dec, const Tensor& b_dec) {
  Tape t;
  Var z = t.tanh_(t.add_row(t.matmul(t.input(x), t.input(w_enc)), t.input(b_enc)));
  Var recon = t.add_row(t.matmul(z, t.input(w_dec)), t.input(b_dec));
  return AutoencodeResult{t.value(z), t.value(recon)};
}

Model::Model(ModelConfig config, AttributeSchema schema, std::vector<TaskType> task_types,
             std::vector<std::string> task_names)
    : config_(std::move(config)),
      schema_(std::move(schema)),
      task_types_(std::move(task_types)),
      task_names_(std::move(task_names)) {
  if (config_.tokens.empty()) parse_arch(config_);
  if (task_types_.empty()) {
    throw Error(Error::Kind::ConfigError, "model needs at least one task");
  }
  if (config_.learn_lambda && (config_.lambda <= 0.0 || config_.lambda >= 1.0)) {
    throw Error(Error::Kind::ConfigError,
                "learnable lambda needs an initial value strictly inside (0, 1)");
  }
  build_parameters();
}

int Model::add_param(const std::string& name, const std::string& cls, Tensor value) {
  params_.push_back({name, cls, std::move(value), {}, {}});
  ParamEntry& e = params_.back();
  e.m1 = Tensor(e.value.rows(), e.value.cols());
  e.m2 = Tensor(e.value.rows(), e.value.cols());
  return static_cast<int>(params_.size()) - 1;
}

void Model::build_parameters() {
  std::mt19937_64 rng(config_.seed);
  auto uniform_matrix = [&](int rows, int cols) {
    Tensor w(rows, cols);
    const double bound = 1.0 / std::sqrt(static_cast<double>(std::max(1, rows)));
    for (int i = 0; i < w.size(); ++i) w[i] = uniform_symmetric(rng, bound);
    return w;
  };

  const int d_raw_v = schema_.p();
  const int d_enc = config_.encoder_width;
  enc_w_ = add_param("enc.w", "autoencoder", uniform_matrix(d_raw_v, d_enc));
  enc_b_ = add_param("enc.b", "autoencoder", Tensor(1, d_enc));
  dec_w_ = add_param("dec.w", "autoencoder", uniform_matrix(d_enc, d_raw_v));
  dec_b_ = add_param("dec.b", "autoencoder", Tensor(1, d_raw_v));

  int d_v = d_enc;
  int d_e = schema_.q();
  int gac_no = 0;
  int pmf_no = 0;
  for (const auto& token : config_.tokens) {
    if (token.kind == ModelConfig::Token::Kind::Gac) {
      const std::string tag = "gac" + std::to_string(gac_no);
      GacIdx idx;
      for (int i = 0; i < schema_.p(); ++i) {
        idx.w_v.push_back(add_param(tag + ".w_v[" + std::to_string(i) + "]", "W_V",
                                    uniform_matrix(d_v, token.width)));
        idx.b_v.push_back(
            add_param(tag + ".b_v[" + std::to_string(i) + "]", "b_V", Tensor(1, token.width)));
      }
      for (int j = 0; j < schema_.q(); ++j) {
        idx.w_e.push_back(add_param(tag + ".w_e[" + std::to_string(j) + "]", "W_E",
                                    uniform_matrix(d_e, token.width)));
        idx.b_e.push_back(
            add_param(tag + ".b_e[" + std::to_string(j) + "]", "b_E", Tensor(1, token.width)));
      }
      if (config_.learn_lambda) {
        const double logit = std::log(config_.lambda / (1.0 - config_.lambda));
        idx.lambda_raw = add_param(tag + ".lambda_raw", "lambda", Tensor::scalar(logit));
      }
      gac_.push_back(std::move(idx));

      BnIdx bn;
      bn.gamma = add_param(tag + ".bn_gamma", "bn_gamma", Tensor::full(1, token.width, 1.0));
      bn.shift = add_param(tag + ".bn_shift", "bn_shift", Tensor(1, token.width));
      bn_.push_back(bn);
      bn_running_.emplace_back(Tensor(1, token.width), Tensor::full(1, token.width, 1.0));

      d_v = token.width;
      d_e = token.width;
      ++gac_no;
    } else if (token.kind == ModelConfig::Token::Kind::Pmf) {
      const std::string tag = "pmf" + std::to_string(pmf_no);
      FoldIdx idx;
      idx.alpha = add_param(tag + ".alpha", "alpha", Tensor::scalar(1.0));
      idx.beta = add_param(tag + ".beta", "beta", Tensor::scalar(1.0));
      idx.omega = add_param(tag + ".omega", "omega", Tensor::scalar(1.0));
      idx.theta = add_param(tag + ".theta", "theta", Tensor::scalar(1.0));
      fold_.push_back(idx);
      ++pmf_no;
    }
  }
  head_w_ = add_param("head.w", "head", uniform_matrix(config_.last_width(), tasks()));
  head_b_ = add_param("head.b", "head", Tensor(1, tasks()));
  last_grads_.assign(params_.size(), Tensor());
}

PreparedGraph Model::prepare(const AttributedGraph& g) const {
  PreparedGraph out;
  std::vector<std::pair<FoldParams, RingCollapseParams>> layers(
      config_.h_max(), {FoldParams{1.0, 1.0}, RingCollapseParams{1.0, 1.0}});
  out.pyramid = build_pyramid(g, layers);
  AttributedGraph with_features = initial_features(g, schema_);
  out.x_v0 = std::move(with_features.x_v);
  out.x_e0 = std::move(with_features.x_e);
  for (const FoldingLevel& level : out.pyramid.levels) {
    out.groups.push_back(classify_elements(level.graph, schema_));
  }
  return out;
}

Var Model::param_var(Tape& t, int idx, bool training) const {
  return t.input(params_[idx].value, training);
}

Model::Forward Model::forward(Tape& t, const std::vector<const PreparedGraph*>& batch,
                              bool training) {
  const int B = static_cast<int>(batch.size());
  if (B == 0) throw Error(Error::Kind::DimensionMismatch, "empty batch");

  last_param_vars_.clear();
  for (int i = 0; i < isize(params_); ++i) last_param_vars_.push_back(param_var(t, i, training));
  const std::vector<Var>& pv = last_param_vars_;

  // Feature optimization: encode the raw one-hot vertex rows.
  std::vector<Var> xv(B), xe(B);
  Var recon;
  for (int b = 0; b < B; ++b) {
    Var raw = t.input(batch[b]->x_v0);
    xv[b] = t.tanh_(t.add_row(t.matmul(raw, pv[enc_w_]), pv[enc_b_]));
    xe[b] = t.input(batch[b]->x_e0);
    if (config_.recon_weight != 0.0) {
      Var rec = t.add_row(t.matmul(xv[b], pv[dec_w_]), pv[dec_b_]);
      Var err = t.mse_loss(rec, batch[b]->x_v0);
      recon = recon.valid() ? t.add(recon, err) : err;
    }
  }
  if (recon.valid()) recon = t.affine(recon, 1.0 / B, 0.0);

  std::vector<int> level(B, 0);
  std::vector<Var> pooled(B);
  int gac_no = 0;
  int pmf_no = 0;
  for (const auto& token : config_.tokens) {
    switch (token.kind) {
      case ModelConfig::Token::Kind::Gac: {
        const GacIdx& gi = gac_[gac_no];
        GacLayerVars layer;
        for (int i : gi.w_v) layer.w_v.push_back(pv[i]);
        for (int i : gi.b_v) layer.b_v.push_back(pv[i]);
        for (int j : gi.w_e) layer.w_e.push_back(pv[j]);
        for (int j : gi.b_e) layer.b_e.push_back(pv[j]);
        layer.lambda = gi.lambda_raw >= 0 ? t.sigmoid_(pv[gi.lambda_raw])
                                          : t.input(Tensor::scalar(config_.lambda));

        std::vector<Var> fused(B);
        std::vector<int> rows(B);
        for (int b = 0; b < B; ++b) {
          const FoldingLevel& lv = batch[b]->pyramid.levels[level[b]];
          const auto& [vgroup, egroup] = batch[b]->groups[level[b]];
          GacVarOutput out =
              gac_forward_tape(t, xv[b], xe[b], vgroup, egroup, lv.graph.incident, layer);
          fused[b] = out.x_fused;
          xe[b] = out.x_e_out;
          rows[b] = lv.graph.n;
        }
        Var stacked = B == 1 ? fused[0] : t.concat_rows(fused);
        Var normed;
        if (training) {
          Tensor batch_mean, batch_var;
          normed = t.batch_norm_train(stacked, pv[bn_[gac_no].gamma], pv[bn_[gac_no].shift],
                                      &batch_mean, &batch_var);
          auto& [run_mean, run_var] = bn_running_[gac_no];
          for (int c = 0; c < run_mean.cols(); ++c) {
            run_mean.at(0, c) = kBnMomentum * run_mean.at(0, c) + (1 - kBnMomentum) * batch_mean.at(0, c);
            run_var.at(0, c) = kBnMomentum * run_var.at(0, c) + (1 - kBnMomentum) * batch_var.at(0, c);
          }
        } else {
          normed = t.batch_norm_eval(stacked, pv[bn_[gac_no].gamma], pv[bn_[gac_no].shift],
                                     bn_running_[gac_no].first, bn_running_[gac_no].second);
        }
        Var activated = t.tanh_(normed);
        int offset = 0;
        for (int b = 0; b < B; ++b) {
          xv[b] = B == 1 ? activated : t.slice_rows(activated, offset, rows[b]);
          offset += rows[b];
        }
        ++gac_no;
        break;
      }
      case ModelConfig::Token::Kind::Pmf: {
        const FoldIdx& fi = fold_[pmf_no];
        for (int b = 0; b < B; ++b) {
          const FoldingLevel& lv = batch[b]->pyramid.levels[level[b]];
          Var mid_v = fold_vertex_features(t, lv.leaf_plan, xv[b], xe[b], pv[fi.alpha],
                                           pv[fi.beta], pv[fi.omega], pv[fi.theta]);
          Var mid_e = fold_edge_features(t, lv.leaf_plan, xe[b]);
          xv[b] = fold_vertex_features(t, lv.collapse_plan, mid_v, mid_e, pv[fi.alpha],
                                       pv[fi.beta], pv[fi.omega], pv[fi.theta]);
          xe[b] = fold_edge_features(t, lv.collapse_plan, mid_e);
          ++level[b];
        }
        ++pmf_no;
        break;
      }
      case ModelConfig::Token::Kind::Gmp: {
        for (int b = 0; b < B; ++b) pooled[b] = t.mean_rows(xv[b]);
        break;
      }
      case ModelConfig::Token::Kind::Tanh: {
        for (int b = 0; b < B; ++b) pooled[b] = t.tanh_(pooled[b]);
        break;
      }
    }
  }

  std::vector<Var> logit_rows(B);
  for (int b = 0; b < B; ++b) {
    logit_rows[b] = t.add_row(t.matmul(pooled[b], pv[head_w_]), pv[head_b_]);
  }
  Forward fwd;
  fwd.logits = B == 1 ? logit_rows[0] : t.concat_rows(logit_rows);
  fwd.recon = recon;
  return fwd;
}

Tensor Model::predict(const std::vector<const PreparedGraph*>& batch) {
  Tape t;
  Forward fwd = forward(t, batch, false);
  Tensor out = t.value(fwd.logits);
  for (int i = 0; i < out.rows(); ++i) {
    for (int c = 0; c < out.cols(); ++c) {
      if (task_types_[c] == TaskType::Classification) {
        out.at(i, c) = 1.0 / (1.0 + std::exp(-out.at(i, c)));
      }
    }
  }
  return out;
}

void Model::pull_grads(const Tape& t) {
  for (int i = 0; i < isize(params_); ++i) last_grads_[i] = t.grad(last_param_vars_[i]);
}

ModelSnapshot Model::snapshot() const {
  ModelSnapshot s;
  for (const ParamEntry& e : params_) s.values.push_back(e.value);
  s.bn_running = bn_running_;
  return s;
}

void Model::restore(const ModelSnapshot& s) {
  for (int i = 0; i < isize(params_); ++i) params_[i].value = s.values[i];
  bn_running_ = s.bn_running;
}

namespace {

json tensor_to_json(const Tensor& t) {
  json data = json::array();
  for (int i = 0; i < t.size(); ++i) data.push_back(t[i]);
  return json{{"rows", t.rows()}, {"cols", t.cols()}, {"data", std::move(data)}};
}

Tensor tensor_from_json(const json& j) {
  Tensor t(j.at("rows").get<int>(), j.at("cols").get<int>());
  const auto& data = j.at("data");
  if (static_cast<int>(data.size()) != t.size()) {
    throw Error(Error::Kind::CheckpointMismatch, "tensor payload size mismatch");
  }
  for (int i = 0; i < t.size(); ++i) t[i] = data[i].get<double>();
  return t;
}

json config_to_json(const ModelConfig& c) {
  return json{{"arch", c.arch},
              {"lambda", c.lambda},
              {"learn_lambda", c.learn_lambda},
              {"encoder_width", c.encoder_width},
              {"recon_weight", c.recon_weight},
              {"lr", c.lr},
              {"batch_size", c.batch_size},
              {"max_epochs", c.max_epochs},
              {"patience", c.patience},
              {"seed", c.seed}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.arch = j.at("arch").get<std::string>();
  c.lambda = j.at("lambda").get<double>();
  c.learn_lambda = j.at("learn_lambda").get<bool>();
  c.encoder_width = j.at("encoder_width").get<int>();
  c.recon_weight = j.at("recon_weight").get<double>();
  c.lr = j.at("lr").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.max_epochs = j.at("max_epochs").get<int>();
  c.patience = j.at("patience").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  parse_arch(c);
  return c;
}

json schema_to_json(const AttributeSchema& s) {
  json vg = json::array();
  for (const auto& a : s.vertex_groups) {
    vg.push_back(json{{"element", a.element},
                      {"valence", a.valence},
                      {"formal_charge", a.formal_charge},
                      {"extra", a.extra}});
  }
  json eg = json::array();
  for (const auto& a : s.edge_groups) {
    eg.push_back(json{{"bond_order", bond_order_name(a.bond_order)}, {"in_ring", a.in_ring}});
  }
  return json{{"vertex_groups", std::move(vg)}, {"edge_groups", std::move(eg)}};
}

AttributeSchema schema_from_json(const json& j) {
  AttributeSchema s;
  for (const auto& a : j.at("vertex_groups")) {
    VertexAttr v;
    v.element = a.at("element").get<std::string>();
    v.valence = a.at("valence").get<int>();
    v.formal_charge = a.at("formal_charge").get<int>();
    v.extra = a.at("extra").get<std::vector<std::string>>();
    s.vertex_groups.push_back(std::move(v));
  }
  for (const auto& a : j.at("edge_groups")) {
    EdgeAttr e;
    e.bond_order = bond_order_from_name(a.at("bond_order").get<std::string>());
    e.in_ring = a.at("in_ring").get<bool>();
    s.edge_groups.push_back(e);
  }
  return s;
}

void fnv_mix(std::uint64_t& h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  h ^= '|';
  h *= 1099511628211ULL;
}

}  // namespace

std::string Model::config_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  fnv_mix(h, config_.arch);
  fnv_mix(h, std::to_string(config_.lambda));
  fnv_mix(h, config_.learn_lambda ? "1" : "0");
  fnv_mix(h, std::to_string(config_.encoder_width));
  fnv_mix(h, std::to_string(config_.recon_weight));
  for (const auto& a : schema_.vertex_groups) {
    fnv_mix(h, a.element + "/" + std::to_string(a.valence) + "/" +
                   std::to_string(a.formal_charge));
    for (const auto& x : a.extra) fnv_mix(h, x);
  }
  for (const auto& a : schema_.edge_groups) {
    fnv_mix(h, bond_order_name(a.bond_order) + "/" + (a.in_ring ? "r" : "-"));
  }
  for (std::size_t i = 0; i < task_types_.size(); ++i) {
    fnv_mix(h, task_names_[i] + ":" + task_type_name(task_types_[i]));
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

void Model::save_checkpoint(const std::string& path) const {
  json j;
  j["version"] = 1;
  j["config"] = config_to_json(config_);
  j["schema"] = schema_to_json(schema_);
  json tasks = json::array();
  for (std::size_t i = 0; i < task_types_.size(); ++i) {
    tasks.push_back(json{{"name", task_names_[i]}, {"type", task_type_name(task_types_[i])}});
  }
  j["tasks"] = std::move(tasks);
  j["config_hash"] = config_hash();
  json params = json::array();
  for (const ParamEntry& e : params_) {
    json p = tensor_to_json(e.value);
    p["name"] = e.name;
    p["class"] = e.cls;
    params.push_back(std::move(p));
  }
  j["params"] = std::move(params);
  json bn = json::array();
  for (const auto& [mean, var] : bn_running_) {
    bn.push_back(json{{"mean", tensor_to_json(mean)}, {"var", tensor_to_json(var)}});
  }
  j["bn_running"] = std::move(bn);

  std::ofstream out(path);
  if (!out) throw Error(Error::Kind::IoError, "cannot write " + path);
  out << j.dump() << '\n';
}

Model Model::load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Error::Kind::IoError, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Error::Kind::ParseError, path + ": " + e.what());
  }
  try {
    if (j.at("version").get<int>() != 1) {
      throw Error(Error::Kind::CheckpointMismatch, "unknown checkpoint version");
    }
    ModelConfig config = config_from_json(j.at("config"));
    AttributeSchema schema = schema_from_json(j.at("schema"));
    std::vector<TaskType> types;
    std::vector<std::string> names;
    for (const auto& task : j.at("tasks")) {
      names.push_back(task.at("name").get<std::string>());
      types.push_back(task.at("type").get<std::string>() == "classification"
                          ? TaskType::Classification
                          : TaskType::Regression);
    }
    Model model(std::move(config), std::move(schema), std::move(types), std::move(names));
    if (j.at("config_hash").get<std::string>() != model.config_hash()) {
      throw Error(Error::Kind::CheckpointMismatch, "config hash does not match checkpoint");
    }
    const auto& params = j.at("params");
    if (static_cast<int>(params.size()) != isize(model.params_)) {
      throw Error(Error::Kind::CheckpointMismatch, "parameter count mismatch");
    }
    for (int i = 0; i < isize(model.params_); ++i) {
      const auto& p = params[i];
      if (p.at("name").get<std::string>() != model.params_[i].name) {
        throw Error(Error::Kind::CheckpointMismatch,
                    "parameter order mismatch at " + model.params_[i].name);
      }
      Tensor v = tensor_from_json(p);
      if (v.rows() != model.params_[i].value.rows() ||
          v.cols() != model.params_[i].value.cols()) {
        throw Error(Error::Kind::CheckpointMismatch,
                    "parameter shape mismatch at " + model.params_[i].name);
      }
      model.params_[i].value = std::move(v);
    }
    const auto& bn = j.at("bn_running");
    if (bn.size() != model.bn_running_.size()) {
      throw Error(Error::Kind::CheckpointMismatch, "norm-layer count mismatch");
    }
    for (std::size_t i = 0; i < bn.size(); ++i) {
      model.bn_running_[i].first = tensor_from_json(bn[i].at("mean"));
      model.bn_running_[i].second = tensor_from_json(bn[i].at("var"));
    }
    return model;
  } catch (const json::exception& e) {
    throw Error(Error::Kind::ParseError, path + ": " + e.what());
  }
}

}  // namespace gaan

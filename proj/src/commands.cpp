#include "gated/commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "gated/dataset.hpp"
#include "gated/gradcheck.hpp"
#include "gated/model_io.hpp"
#include "gated/mrnn.hpp"
#include "gated/training.hpp"
#include "gated/variants.hpp"

namespace gated {
namespace {

const std::filesystem::path& need_path(const std::optional<std::filesystem::path>& p,
                                       const char* flag) {
  if (!p) throw ConfigError(std::string("missing required flag ") + flag);
  return *p;
}

TrainConfig train_config(const RunConfig& c) {
  TrainConfig t;
  t.loss.kind = parse_loss_kind(c.text("loss"));
  t.loss.hybrid_weight = c.real("hybrid_weight");
  t.corruption.kind = parse_corruption_kind(c.text("corruption"));
  t.corruption.level = c.real("corruption_level");
  t.corruption.target = parse_corruption_target(c.text("corruption_target"));
  t.lr = c.real("lr");
  t.momentum = c.real("momentum");
  t.epochs = c.count("epochs");
  t.batch_size = c.count("batch_size");
  t.seed = c.seed;
  t.validate();
  return t;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_metrics(const RunConfig& c, const std::filesystem::path& model_path,
                   const std::vector<EpochStats>& trace) {
  const std::filesystem::path path =
      c.has("metrics") ? std::filesystem::path(c.text("metrics"))
                       : std::filesystem::path(model_path.string() + ".metrics.csv");
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open metrics file '" + path.string() + "'");
  os << "epoch,mean_loss,wall_ms\n";
  const bool wall = c.flag("wall_clock");
  for (const EpochStats& e : trace) {
    os << e.epoch << ',' << fmt(e.mean_loss) << ',' << (wall ? fmt(e.wall_ms) : std::string("0")) << '\n';
  }
  if (!os) throw std::runtime_error("failed writing metrics file '" + path.string() + "'");
}

std::vector<Vector> blob_centers(std::size_t classes, std::size_t dim, double separation) {
  // Center k is `separation` on the coordinates i with i mod classes == k.
  std::vector<Vector> centers;
  for (std::size_t k = 0; k < classes; ++k) {
    Vector c(dim);
    for (std::size_t i = 0; i < dim; ++i) c[i] = (i % classes == k) ? separation : 0.0;
    centers.push_back(std::move(c));
  }
  return centers;
}

int cmd_gen_data(const RunConfig& c, std::ostream& out) {
  const auto& path = need_path(c.out, "--out");
  c.require("generator");
  Rng rng(c.seed);
  const std::string gen = c.text("generator");
  Dataset data;
  if (gen == "shift") {
    data = gen_shift_pairs(rng, c.count("n"), c.count("width"), c.integer("shift"), c.real("density"));
  } else if (gen == "multishift") {
    data = gen_multi_shift_pairs(rng, c.count("n"), c.count("width"), c.integer_list("shifts"), c.real("density"));
  } else if (gen == "rotation") {
    data = gen_rotation_pairs(rng, c.count("n"), c.count("side"), static_cast<int>(c.integer("angle")), c.real("density"));
  } else if (gen == "blobs") {
    data = gen_blobs(rng, c.count("n"), c.count("dim"),
                     blob_centers(c.count("classes"), c.count("dim"), c.real("separation")), c.real("sigma"));
  } else {
    std::vector<std::size_t> pattern;
    for (long s : c.integer_list("pattern")) {
      if (s < 0) throw ConfigError("pattern symbols must be non-negative");
      pattern.push_back(static_cast<std::size_t>(s));
    }
    data = gen_periodic_sequence(c.count("length"), c.count("alphabet"), pattern);
  }
  save_dataset(path, data);
  out << "wrote " << data.size() << " examples (n_x=" << data.n_x << ", n_y=" << data.n_y
      << ", label_len=" << data.label_len << ") to " << path.string() << "\n";
  return 0;
}

int cmd_train(const RunConfig& c, std::ostream& out) {
  const auto& out_path = need_path(c.out, "--out");
  const Dataset data = load_dataset(need_path(c.data, "--data"));
  const TrainConfig tc = train_config(c);
  GatedModel model = [&] {
    if (c.model) {
      ModelFile f = load_model(*c.model);
      if (auto* g = std::get_if<GaeFile>(&f)) return std::move(g->model);
      throw std::invalid_argument("--model is not a gated autoencoder file");
    }
    Rng rng(c.seed);
    const std::size_t n_h = tc.loss.needs_label() ? data.label_len : c.count("n_h");
    return GatedModel::random({data.n_x, data.n_y, n_h, c.count("n_f")}, parse_tying(c.text("tying")),
                              parse_activation(c.text("act_x")), parse_activation(c.text("act_y")),
                              parse_activation(c.text("act_h")), rng, c.real("init_sigma"));
  }();
  TrainResult result = train(std::move(model), data, tc);
  save_model(out_path, GaeFile{result.model, tc.loss});
  write_metrics(c, out_path, result.trace);
  if (!result.trace.empty()) out << "final mean loss " << fmt(result.trace.back().mean_loss) << "\n";
  out << "wrote model to " << out_path.string() << "\n";
  return 0;
}

std::vector<std::size_t> labels_of(const Dataset& data) {
  std::vector<std::size_t> labels;
  for (const Example& ex : data.examples) labels.push_back(one_hot_index(*ex.label));
  return labels;
}

double purity_of(const ClusteringModel& model, const Dataset& data) {
  std::vector<std::size_t> assign;
  for (const Example& ex : data.examples) assign.push_back(argmax(clustering_forward(model, ex.x).cls));
  return cluster_purity(assign, labels_of(data));
}

int cmd_train_cluster(const RunConfig& c, std::ostream& out) {
  const auto& out_path = need_path(c.out, "--out");
  const Dataset data = load_dataset(need_path(c.data, "--data"));
  TrainConfig tc = train_config(c);
  if (!c.has("loss")) tc.loss = {LossMode::Kind::ReconstructX, 0.5};
  ClusteringModel model = [&] {
    if (c.model) {
      ModelFile f = load_model(*c.model);
      if (auto* cl = std::get_if<ClusteringFile>(&f)) return std::move(cl->model);
      throw std::invalid_argument("--model is not a clustering model file");
    }
    Rng rng(c.seed);
    return ClusteringModel::random(data.n_x, c.count("classes"), c.count("n_h"), c.count("n_f"),
                                   parse_activation(c.text("act_x")), rng, c.real("init_sigma"));
  }();
  ClusteringTrainResult result = clustering_train(std::move(model), data, tc);
  save_model(out_path, ClusteringFile{result.model, tc.loss});
  write_metrics(c, out_path, result.trace);
  if (!result.trace.empty()) out << "final mean loss " << fmt(result.trace.back().mean_loss) << "\n";
  if (data.label_len > 0) out << "purity " << fmt(purity_of(result.model, data)) << "\n";
  out << "wrote model to " << out_path.string() << "\n";
  return 0;
}

int cmd_train_mrnn(const RunConfig& c, std::ostream& out) {
  const auto& out_path = need_path(c.out, "--out");
  const Dataset data = load_dataset(need_path(c.data, "--data"));
  const TrainConfig tc = train_config(c);
  const auto sequences = sequences_from_dataset(data, c.count("seq_len"));
  MRnnModel model = [&] {
    if (c.model) {
      ModelFile f = load_model(*c.model);
      if (auto* m = std::get_if<MRnnModel>(&f)) return std::move(*m);
      throw std::invalid_argument("--model is not an mRNN model file");
    }
    Rng rng(c.seed);
    const double sigma = c.real("init_sigma") < 0.0 ? 0.3 : c.real("init_sigma");
    return MRnnModel::random(data.n_x, c.count("n_h"), c.count("n_f"), rng, sigma);
  }();
  MRnnTrainResult result = mrnn_train(std::move(model), sequences, tc, parse_mrnn_loss(c.text("mrnn_loss")));
  save_model(out_path, result.model);
  write_metrics(c, out_path, result.trace);
  if (!result.trace.empty()) out << "final mean loss " << fmt(result.trace.back().mean_loss) << "\n";
  out << "wrote model to " << out_path.string() << "\n";
  return 0;
}

int cmd_gradcheck(const RunConfig& c, std::ostream& out) {
  const GridReport report = run_gradcheck_grid(c.count("gradcheck_seeds"), c.seed);
  for (const GridEntry& e : report.entries) {
    if (!(e.rel_error < kGradientTolerance)) out << "FAIL " << e.name << " rel_err=" << e.rel_error << "\n";
  }
  out << "checked " << report.entries.size() << " gradients, max relative error "
      << report.max_rel_error() << " (tolerance " << kGradientTolerance << ")\n";
  return report.failures() == 0 ? 0 : 1;
}

double rms(const Vector& a, const Vector& b) {
  return std::sqrt(squared_norm(subtract(a, b).span()) / static_cast<double>(a.size()));
}

int cmd_analogy(const RunConfig& c, std::ostream& out) {
  const auto& out_path = need_path(c.out, "--out");
  const Dataset data = load_dataset(need_path(c.data, "--data"));
  ModelFile f = load_model(need_path(c.model, "--model"));
  const auto* gae = std::get_if<GaeFile>(&f);
  if (gae == nullptr) throw std::invalid_argument("analogy needs a gated autoencoder model");
  if (data.size() < 2) throw std::invalid_argument("analogy needs at least two examples");

  std::ofstream os(out_path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + out_path.string() + "'");
  os << "source,target,rms";
  for (std::size_t i = 0; i < data.n_y; ++i) os << ",y" << i;
  os << "\n";
  double total = 0.0;
  std::size_t scored = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    // Apply pair i's transformation to the next example that underwent the
    // same transformation (same label when labelled), whose y is the truth.
    std::size_t j = (i + 1) % data.size();
    if (data.label_len > 0) {
      while (j != i && !(*data.examples[j].label == *data.examples[i].label)) j = (j + 1) % data.size();
      if (j == i) continue;
    }
    const Example& src = data.examples[i];
    const Example& dst = data.examples[j];
    const Vector fantasy = analogy(gae->model, src.x, src.y, dst.x);
    const double err = rms(fantasy, dst.y);
    total += err;
    ++scored;
    os << i << ',' << j << ',' << fmt(err);
    for (double v : fantasy) os << ',' << fmt(v);
    os << "\n";
  }
  if (scored == 0) throw std::invalid_argument("no example pair shares a transformation");
  out << "analogy mean rms " << fmt(total / static_cast<double>(scored)) << " over " << scored
      << " pairs\n";
  return 0;
}

int cmd_eval(const RunConfig& c, std::ostream& out) {
  const Dataset data = load_dataset(need_path(c.data, "--data"));
  ModelFile f = load_model(need_path(c.model, "--model"));
  if (auto* gae = std::get_if<GaeFile>(&f)) {
    out << "mean loss (" << to_string(gae->loss) << ") " << fmt(mean_loss(gae->model, data, gae->loss)) << "\n";
  } else if (auto* cl = std::get_if<ClusteringFile>(&f)) {
    double total = 0.0;
    for (const Example& ex : data.examples) total += clustering_loss(cl->model, ex.x, ex.x);
    out << "mean loss (reconstruct_x) " << fmt(total / static_cast<double>(data.size())) << "\n";
    if (data.label_len > 0) out << "purity " << fmt(purity_of(cl->model, data)) << "\n";
  } else {
    const auto& m = std::get<MRnnModel>(f);
    SequencePair whole;
    for (const Example& ex : data.examples) {
      whole.inputs.push_back(ex.x);
      whole.targets.push_back(ex.y);
    }
    out << "sequence loss (squared) " << fmt(mrnn_loss(m, whole)) << "\n";
    out << "argmax accuracy " << fmt(mrnn_argmax_accuracy(m, whole)) << "\n";
  }
  return 0;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (!config.command) throw ConfigError("no command given");
    switch (*config.command) {
      case Command::GenData: return cmd_gen_data(config, out);
      case Command::Train: return cmd_train(config, out);
      case Command::TrainCluster: return cmd_train_cluster(config, out);
      case Command::TrainMRnn: return cmd_train_mrnn(config, out);
      case Command::GradCheck: return cmd_gradcheck(config, out);
      case Command::Analogy: return cmd_analogy(config, out);
      case Command::Eval: return cmd_eval(config, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace gated

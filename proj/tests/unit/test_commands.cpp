#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gated/commands.hpp"
#include "gated/model_io.hpp"

using namespace gated;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir = fs::temp_directory_path() / "gated_unit_commands";
  Scratch() { fs::create_directories(dir); }
  ~Scratch() { fs::remove_all(dir); }
  fs::path operator/(const std::string& name) const { return dir / name; }
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

int invoke(const std::string& text, std::ostringstream& out, std::ostringstream& err,
           std::optional<fs::path> o = {}, std::optional<fs::path> data = {},
           std::optional<fs::path> model = {}) {
  RunConfig cfg = parse_config(text);
  cfg.out = o;
  cfg.data = data;
  cfg.model = model;
  return run(cfg, out, err);
}

double trailing_number(const std::string& line, const std::string& key) {
  const auto pos = line.find(key);
  REQUIRE(pos != std::string::npos);
  return std::stod(line.substr(pos + key.size()));
}

}  // namespace

TEST_CASE("train with zero epochs writes the initial model and an empty metrics body") {
  Scratch s;
  std::ostringstream out, err;
  REQUIRE(invoke("command=gen-data\ngenerator=shift\nn=10\nwidth=5", out, err, s / "d.gnd") == 0);
  REQUIRE(invoke("command=train\nepochs=0\nseed=11\nn_h=3\nn_f=4", out, err, s / "m.gnm", s / "d.gnd") == 0);
  Rng rng(11);
  const auto S = ActivationKind::Sigmoid;
  const GatedModel initial = GatedModel::random({5, 5, 3, 4}, TyingMode::Tied, S, S, S, rng);
  CHECK(slurp(s / "m.gnm") == encode_model(GaeFile{initial, LossMode{LossMode::Kind::Symmetric}}));
  CHECK(slurp(s / "m.gnm.metrics.csv") == "epoch,mean_loss,wall_ms\n");
}

TEST_CASE("metrics have one row per epoch") {
  Scratch s;
  std::ostringstream out, err;
  REQUIRE(invoke("command=gen-data\ngenerator=shift\nn=10\nwidth=5", out, err, s / "d.gnd") == 0);
  REQUIRE(invoke("command=train\nepochs=3\nwall_clock=false\nmetrics=" + (s / "m.csv").string(), out, err,
                 s / "m.gnm", s / "d.gnd") == 0);
  std::istringstream csv(slurp(s / "m.csv"));
  std::string line;
  int rows = 0;
  std::getline(csv, line);
  while (std::getline(csv, line)) {
    CHECK(line.substr(line.rfind(',')) == ",0");
    ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("gradcheck command") {
  std::ostringstream out, err;
  CHECK(invoke("command=gradcheck\ngradcheck_seeds=1", out, err) == 0);
  CHECK(trailing_number(out.str(), "max relative error ") < 1e-5);
}

TEST_CASE("analogy with an identity-trained model") {
  Scratch s;
  std::ostringstream out, err;
  REQUIRE(invoke("command=gen-data\ngenerator=shift\nshift=0\nn=1000\nseed=42", out, err, s / "train.gnd") == 0);
  REQUIRE(invoke("command=gen-data\ngenerator=shift\nshift=0\nn=100\nseed=43", out, err, s / "test.gnd") == 0);
  REQUIRE(invoke("command=train\nseed=42\nn_f=32\nn_h=8\ncorruption=masking\ncorruption_level=0.2\n"
                 "init_sigma=0.05",
                 out, err, s / "m.gnm", s / "train.gnd") == 0);
  std::ostringstream report;
  REQUIRE(invoke("command=analogy", report, err, s / "a.csv", s / "test.gnd", s / "m.gnm") == 0);
  CHECK(trailing_number(report.str(), "analogy mean rms ") < 0.1);
}

TEST_CASE("eval reports each model kind") {
  Scratch s;
  std::ostringstream out, err;
  REQUIRE(invoke("command=gen-data\ngenerator=blobs\nn=40\ndim=4\nclasses=2", out, err, s / "b.gnd") == 0);
  REQUIRE(invoke("command=train-cluster\nepochs=2\nn_h=3\nn_f=4", out, err, s / "c.gnm", s / "b.gnd") == 0);
  std::ostringstream ev;
  REQUIRE(invoke("command=eval", ev, err, {}, s / "b.gnd", s / "c.gnm") == 0);
  CHECK(ev.str().find("purity") != std::string::npos);

  REQUIRE(invoke("command=gen-data\ngenerator=period\nlength=40", out, err, s / "p.gnd") == 0);
  REQUIRE(invoke("command=train-mrnn\nepochs=2\nseq_len=8", out, err, s / "r.gnm", s / "p.gnd") == 0);
  std::ostringstream ev2;
  REQUIRE(invoke("command=eval", ev2, err, {}, s / "p.gnd", s / "r.gnm") == 0);
  CHECK(ev2.str().find("accuracy") != std::string::npos);
}

TEST_CASE("failures give a nonzero status and a diagnostic") {
  Scratch s;
  std::ostringstream out, err;
  CHECK(invoke("command=train", out, err, s / "m.gnm") != 0);
  CHECK(err.str().find("--data") != std::string::npos);

  std::ostringstream err2;
  CHECK(invoke("command=train", out, err2, s / "m.gnm", s / "missing.gnd") != 0);
  CHECK(err2.str().find("missing.gnd") != std::string::npos);

  std::ostringstream err3;
  REQUIRE(invoke("command=gen-data\ngenerator=shift\nn=10\nwidth=5", out, err3, s / "d5.gnd") == 0);
  REQUIRE(invoke("command=gen-data\ngenerator=shift\nn=10\nwidth=6", out, err3, s / "d6.gnd") == 0);
  REQUIRE(invoke("command=train\nepochs=0", out, err3, s / "m.gnm", s / "d5.gnd") == 0);
  CHECK(invoke("command=train\nepochs=1", out, err3, s / "m2.gnm", s / "d6.gnd", s / "m.gnm") != 0);
  CHECK(err3.str().find("do not match") != std::string::npos);

  std::ostringstream err4;
  CHECK(invoke("command=gen-data", out, err4, s / "x.gnd") != 0);
  CHECK(err4.str().find("generator") != std::string::npos);
}

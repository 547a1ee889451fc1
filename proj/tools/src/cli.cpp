#include "qoe/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qoe/brisque.hpp"
#include "qoe/error.hpp"
#include "qoe/image_io.hpp"
#include "qoe/pipeline.hpp"
#include "qoe/regression.hpp"
#include "qoe/scores.hpp"
#include "qoe/session.hpp"
#include "qoe/svr_model.hpp"
#include "qoe/synth.hpp"
#include "qoe/text.hpp"

namespace qoe::cli {

namespace {

namespace fs = std::filesystem;
using text::format_double;

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  return in;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

// Prefixes parse errors with the file they came from.
template <class F>
auto with_file(const fs::path& p, F&& f) {
  auto in = open_in(p);
  try {
    return f(in);
  } catch (const ParseError& e) {
    throw ParseError(p.string() + ": " + e.what());
  }
}

std::vector<session::SubjectSession> read_ratings(const fs::path& p) {
  auto sessions = with_file(p, [](std::istream& in) { return session::ingest_ratings(in); });
  if (sessions.empty()) throw ParseError(p.string() + ": no rating rows");
  return sessions;
}

session::BrisqueTable read_brisque(const fs::path& p) {
  return with_file(p, [](std::istream& in) { return session::ingest_brisque_table(in); });
}

std::vector<session::Rating> all_ratings(const std::vector<session::SubjectSession>& sessions) {
  std::vector<session::Rating> out;
  for (const auto& s : sessions) out.insert(out.end(), s.ratings.begin(), s.ratings.end());
  return out;
}

double brisque_of(const session::BrisqueTable& table, const std::string& image, int level) {
  const auto it = table.find({image, level});
  if (it == table.end())
    throw ValidationError("no BRISQUE value for image " + image + " level " + std::to_string(level));
  return it->second;
}

std::string pearson_cell(const std::vector<double>& x, const std::vector<double>& y) {
  try {
    return format_double(scores::pearson(x, y));
  } catch (const DegenerateError&) {
    return "undefined";
  } catch (const DimensionError&) {
    return "undefined";
  }
}

// ---------------------------------------------------------------------------

struct BrisqueArgs {
  std::string image, model, range;
  bool features = false;
};

int cmd_brisque(const BrisqueArgs& a, std::ostream& out) {
  auto model_in = open_in(a.model);
  auto range_in = open_in(a.range);
  const auto model = iqa::load_model(model_in, range_in);
  const auto img = iqa::read_gray(a.image);
  const auto f = iqa::extract_features(img);
  if (a.features) {
    for (std::size_t k = 0; k < f.values.size(); ++k) out << (k ? "," : "") << format_double(f.values[k]);
    out << '\n';
  } else {
    out << format_double(iqa::score(f, model)) << '\n';
  }
  return kOk;
}

struct ScoresArgs {
  std::string ratings, out_dir = ".";
};

int cmd_scores(const ScoresArgs& a, std::ostream& out) {
  const auto ratings = all_ratings(read_ratings(a.ratings));
  const auto mos = scores::mos(ratings);
  const auto dmos = scores::dmos(ratings);
  fs::create_directories(a.out_dir);
  const fs::path path = fs::path(a.out_dir) / "mos_dmos.csv";
  auto f = open_out(path);
  f << "image_id,level,mos,dmos,count\n";
  for (const auto& [key, m] : mos) {
    f << key.image_id << ',' << key.level << ',' << format_double(m.mos) << ',';
    if (const auto d = dmos.find(key); d != dmos.end()) f << format_double(d->second.dmos);
    f << ',' << m.count << '\n';
  }
  out << "wrote " << path.string() << " (" << mos.size() << " rows)\n";
  return kOk;
}

struct CorrelateArgs {
  std::string ratings, brisque;
  bool differential = false;
};

int cmd_correlate(const CorrelateArgs& a, std::ostream& out) {
  const auto ratings = all_ratings(read_ratings(a.ratings));
  const auto table = read_brisque(a.brisque);

  struct Series {
    std::vector<double> q, level, b;
  };
  std::vector<std::string> order;
  std::map<std::string, Series> per_image;
  Series all;
  const auto add = [&](const session::Rating& r, double q) {
    const double b = brisque_of(table, r.image_id, r.level);
    auto [it, inserted] = per_image.try_emplace(r.image_id);
    if (inserted) order.push_back(r.image_id);
    for (Series* s : {&all, &it->second}) {
      s->q.push_back(q);
      s->level.push_back(r.level);
      s->b.push_back(b);
    }
  };
  if (a.differential) {
    for (const auto& d : scores::differential_ratings(ratings)) add(d.rating, d.crushed);
  } else {
    for (const auto& r : ratings) add(r, r.q);
  }

  out << "images,n,pearson_level,pearson_brisque\n";
  const auto row = [&](const std::string& name, const Series& s) {
    out << name << ',' << s.q.size() << ',' << pearson_cell(s.q, s.level) << ',' << pearson_cell(s.q, s.b) << '\n';
  };
  row("all", all);
  for (const auto& image : order) row(image, per_image.at(image));
  return kOk;
}

struct IqxArgs {
  std::string scores, brisque, out_dir = ".";
  bool differential = false;
  int samples = 101;
};

// Either a ratings file or a previously written mos_dmos.csv.
std::vector<std::pair<session::MediaKey, double>> opinion_scores(const IqxArgs& a) {
  std::string header;
  {
    auto in = open_in(a.scores);
    std::getline(in, header);
    if (!header.empty() && header.back() == '\r') header.pop_back();
  }
  std::vector<std::pair<session::MediaKey, double>> out;
  if (header == "image_id,level,mos,dmos,count") {
    auto in = open_in(a.scores);
    std::string line;
    std::getline(in, line);
    for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
      const auto cells = text::split_csv(line);
      if (cells.size() == 1 && cells[0].empty()) continue;
      if (cells.size() != 5) throw ParseError(a.scores + ": expected 5 columns", line_no);
      const session::MediaKey key{cells[0], static_cast<int>(text::parse_integer(cells[1], line_no))};
      const auto v = text::parse_optional_double(a.differential ? cells[3] : cells[2], line_no);
      if (v) out.emplace_back(key, *v);
    }
    return out;
  }
  const auto ratings = all_ratings(read_ratings(a.scores));
  if (a.differential) {
    for (const auto& [key, d] : scores::dmos(ratings)) out.emplace_back(key, d.dmos);
  } else {
    for (const auto& [key, m] : scores::mos(ratings)) out.emplace_back(key, m.mos);
  }
  return out;
}

int cmd_iqx(const IqxArgs& a, std::ostream& out) {
  const auto points = opinion_scores(a);
  const auto table = read_brisque(a.brisque);
  std::vector<double> qos, qoe;
  for (const auto& [key, v] : points) {
    qos.push_back(brisque_of(table, key.image_id, key.level));
    qoe.push_back(v);
  }
  const auto m = regression::fit_iqx(qos, qoe);
  out << "alpha," << format_double(m.alpha) << '\n'
      << "beta," << format_double(m.beta) << '\n'
      << "gamma," << format_double(m.gamma) << '\n'
      << "residual_sum_squares," << format_double(m.residual_sum_squares) << '\n'
      << "iterations," << m.iterations << '\n'
      << "step_converged," << (m.step_converged ? "true" : "false") << '\n';
  if (std::all_of(qoe.begin(), qoe.end(), [&](double v) { return v == qoe.front(); }))
    out << "note,constant opinion scores; the fitted curve is flat\n";

  fs::create_directories(a.out_dir);
  const fs::path path = fs::path(a.out_dir) / "iqx_curve.csv";
  auto f = open_out(path);
  const auto [lo, hi] = std::minmax_element(qos.begin(), qos.end());
  f << "qos,qoe\n";
  for (int k = 0; k < a.samples; ++k) {
    const double x = *lo + (*hi - *lo) * k / (a.samples - 1);
    f << format_double(x) << ',' << format_double(m(x)) << '\n';
  }
  return kOk;
}

struct PredictArgs {
  std::string ratings, brisque, eeg_dir, out_dir = "qoe_out";
  std::string source = "brisque", target = "rating", method = "linear", group = "all";
  std::string error_pooling = "pooled";
  int degree = 1;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  double lambda = 1.0;
  std::size_t stage1_min = 500, stage1_max = 50000, stage2_min = 50, stage2_max = 250;
};

std::string file_safe(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  return out;
}

int cmd_predict(const PredictArgs& a, std::ostream& out, std::ostream& err) {
  pipeline::PredictionSpec spec;
  spec.source = pipeline::parse_source(a.source);
  spec.target = pipeline::parse_target(a.target);
  spec.method = pipeline::parse_method(a.method);
  spec.degree = a.degree;
  spec.workers = a.workers;
  spec.logistic_lambda = a.lambda;
  spec.error_pooling =
      a.error_pooling == "pooled" ? pipeline::ErrorPooling::pooled : pipeline::ErrorPooling::per_run_mean;
  spec.stage1 = {a.stage1_min, a.stage1_max};
  spec.stage2 = {a.stage2_min, a.stage2_max};
  if (a.seed) {
    spec.seed = *a.seed;
  } else if (const char* env = std::getenv("QOE_SEED")) {
    spec.seed = static_cast<std::uint64_t>(text::parse_integer(env, 0));
  }
  spec.validate();
  const auto grouping = pipeline::parse_grouping(a.group);

  auto sessions = read_ratings(a.ratings);
  const auto table = read_brisque(a.brisque);
  if (spec.source != pipeline::Source::brisque) {
    if (a.eeg_dir.empty()) throw ValidationError("--eeg-dir is required for EEG sources");
    for (auto& s : sessions)
      s.trace = with_file(fs::path(a.eeg_dir) / (s.subject_id + ".csv"),
                          [](std::istream& in) { return session::ingest_eeg(in); });
  }
  for (const auto& s : sessions) {
    const auto report = session::validate_session(s);
    for (const auto& f : report.findings)
      if (spec.source != pipeline::Source::brisque || f.kind == session::FindingKind::orphan_rating)
        err << "warning: " << session::to_string(f.kind) << ": " << f.detail << '\n';
  }

  const auto ev = pipeline::evaluate(sessions, table, spec, grouping);
  for (const auto& s : ev.skipped) err << "warning: skipped group " << s.group << ": " << s.reason << '\n';

  const fs::path dir = a.out_dir;
  fs::create_directories(dir / "scatter");
  {
    auto f = open_out(dir / "report.json");
    f << pipeline::to_json(ev).dump(2) << '\n';
  }
  {
    auto f = open_out(dir / "summary.csv");
    f << "group,method,degree,r2,mse,mae,medae,n1,n2,converged\n";
    for (const auto& r : ev.reports) {
      const auto& m = r.stage2.metrics;
      f << r.group << ',' << pipeline::to_string(spec.method) << ',' << spec.degree << ',' << format_double(m.r2)
        << ',' << format_double(m.mse) << ',' << format_double(m.mae) << ',' << format_double(m.medae) << ','
        << r.stage1.runs << ',' << r.stage2.stage.runs << ','
        << (r.stage1.converged && r.stage2.stage.converged ? "true" : "false") << '\n';
    }
  }
  for (const auto& r : ev.reports) {
    auto f = open_out(dir / "scatter" / (file_safe(r.group) + ".csv"));
    f << "actual,predicted\n";
    for (std::size_t k = 0; k < r.stage2.actual.size(); ++k)
      f << format_double(r.stage2.actual[k]) << ',' << format_double(r.stage2.predicted[k]) << '\n';
  }

  for (const auto& r : ev.reports)
    out << r.group << ": R2=" << format_double(r.stage2.metrics.r2) << " MSE=" << format_double(r.stage2.metrics.mse)
        << " runs=" << r.stage1.runs << '+' << r.stage2.stage.runs << '\n';
  return ev.reports.empty() ? kInvalid : kOk;
}

struct SynthArgs {
  std::string config, out_dir;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  synth::SynthConfig config;
  if (!a.config.empty()) {
    auto in = open_in(a.config);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(a.config + ": " + e.what());
    }
    config = synth::config_from_json(j);
  }
  const auto data = synth::generate(config);
  synth::write(data, a.out_dir);
  auto f = open_out(fs::path(a.out_dir) / "config.json");
  f << synth::to_json(config).dump(2) << '\n';
  out << "wrote " << data.sessions.size() << " subjects to " << a.out_dir << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Image quality, opinion score and EEG-based QoE prediction toolkit", "qoe"};
  app.require_subcommand(1);

  BrisqueArgs brisque;
  auto* c_brisque = app.add_subcommand("brisque", "Score an image with a pretrained BRISQUE model");
  c_brisque->add_option("image", brisque.image, "Image file")->required();
  c_brisque->add_option("--model", brisque.model, "libsvm model file")->required();
  c_brisque->add_option("--range", brisque.range, "svm-scale range file")->required();
  c_brisque->add_flag("--features", brisque.features, "Print the 36 features instead of the score");

  ScoresArgs sc;
  auto* c_scores = app.add_subcommand("scores", "Compute MOS and DMOS per image and level");
  c_scores->add_option("ratings", sc.ratings, "Ratings CSV")->required();
  c_scores->add_option("-o,--out-dir", sc.out_dir, "Output directory for mos_dmos.csv");

  CorrelateArgs corr;
  auto* c_corr = app.add_subcommand("correlate", "Pearson correlation of ratings with level and BRISQUE");
  c_corr->add_option("ratings", corr.ratings, "Ratings CSV")->required();
  c_corr->add_option("brisque", corr.brisque, "BRISQUE table CSV")->required();
  c_corr->add_flag("--differential", corr.differential, "Use crushed differential ratings (levels 1..5)");

  IqxArgs iqx;
  auto* c_iqx = app.add_subcommand("iqx", "Fit QoE = alpha exp(-beta QoS) + gamma with BRISQUE as QoS");
  c_iqx->add_option("scores", iqx.scores, "Ratings CSV or mos_dmos.csv")->required();
  c_iqx->add_option("brisque", iqx.brisque, "BRISQUE table CSV")->required();
  c_iqx->add_flag("--differential", iqx.differential, "Fit DMOS instead of MOS");
  c_iqx->add_option("-o,--out-dir", iqx.out_dir, "Output directory for iqx_curve.csv");
  c_iqx->add_option("--samples", iqx.samples, "Curve sample count")->check(CLI::Range(2, 100000));

  PredictArgs pr;
  auto* c_pred = app.add_subcommand("predict", "Repeated random-split prediction with averaged models");
  c_pred->add_option("--ratings", pr.ratings, "Ratings CSV")->required();
  c_pred->add_option("--brisque", pr.brisque, "BRISQUE table CSV")->required();
  c_pred->add_option("--eeg-dir", pr.eeg_dir, "Directory of <subject>.csv EEG traces");
  c_pred->add_option("--source", pr.source, "brisque | eeg | eegz");
  c_pred->add_option("--target", pr.target, "rating | level | brisque");
  c_pred->add_option("--method", pr.method, "linear | bound-linear | logistic");
  c_pred->add_option("--degree", pr.degree, "Polynomial degree")->check(CLI::Range(1, regression::kMaxDegree));
  c_pred->add_option("--group", pr.group, "all | per-image | per-subject");
  c_pred->add_option("--seed", pr.seed, "Master seed (default: $QOE_SEED, else 0)");
  c_pred->add_option("--workers", pr.workers, "Worker threads")->check(CLI::Range(1u, 256u));
  c_pred->add_option("--lambda", pr.lambda, "Logistic L2 strength");
  c_pred->add_option("--error-pooling", pr.error_pooling, "pooled | per-run-mean (stage-two MSE/MAE/MedAE)")
      ->check(CLI::IsMember({"pooled", "per-run-mean"}));
  c_pred->add_option("--stage1-min", pr.stage1_min);
  c_pred->add_option("--stage1-max", pr.stage1_max);
  c_pred->add_option("--stage2-min", pr.stage2_min);
  c_pred->add_option("--stage2-max", pr.stage2_max);
  c_pred->add_option("-o,--out", pr.out_dir, "Output directory");

  SynthArgs syn;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic experiment");
  c_synth->add_option("out_dir", syn.out_dir, "Output directory")->required();
  c_synth->add_option("--config", syn.config, "JSON generator config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }

  try {
    if (c_brisque->parsed()) return cmd_brisque(brisque, out);
    if (c_scores->parsed()) return cmd_scores(sc, out);
    if (c_corr->parsed()) return cmd_correlate(corr, out);
    if (c_iqx->parsed()) return cmd_iqx(iqx, out);
    if (c_pred->parsed()) return cmd_predict(pr, out, err);
    if (c_synth->parsed()) return cmd_synth(syn, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kIoError;
}

}  // namespace qoe::cli

#include "qoe/svr_model.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>

#include "qoe/error.hpp"

namespace qoe::iqa {

namespace {

double parse_double(std::string_view token, std::size_t line) {
  double v = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v))
    throw ParseError("not a finite number: '" + std::string(token) + "'", line);
  return v;
}

long parse_index(std::string_view token, std::size_t line) {
  long v = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ParseError("not an integer: '" + std::string(token) + "'", line);
  return v;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

bool is_blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

void parse_support_vectors(std::istream& in, std::size_t& line_no, SvrModel& m) {
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (is_blank(line)) continue;
    const auto tokens = split_ws(line);
    m.dual_coefficients.push_back(parse_double(tokens[0], line_no));
    FeatureVector sv{};
    long previous = 0;
    for (std::size_t k = 1; k < tokens.size(); ++k) {
      const auto colon = tokens[k].find(':');
      if (colon == std::string::npos) throw ParseError("expected index:value, got '" + tokens[k] + "'", line_no);
      const std::string_view tok(tokens[k]);
      const long index = parse_index(tok.substr(0, colon), line_no);
      if (index <= previous) throw ParseError("feature indices must be strictly increasing", line_no);
      if (index > static_cast<long>(kFeatureCount))
        throw ParseError("feature index " + std::to_string(index) + " exceeds feature count 36", line_no);
      sv[static_cast<std::size_t>(index - 1)] = parse_double(tok.substr(colon + 1), line_no);
      previous = index;
    }
    m.support_vectors.push_back(sv);
  }
}

void parse_model(std::istream& in, SvrModel& m) {
  std::size_t line_no = 0;
  std::optional<double> gamma, rho;
  std::optional<long> total_sv;
  bool kernel_seen = false, type_seen = false, sv_seen = false;

  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (is_blank(line)) continue;
    const auto tokens = split_ws(line);
    const auto& key = tokens[0];
    if (key == "SV") {
      sv_seen = true;
      break;
    }
    if (tokens.size() < 2) throw ParseError("header field '" + key + "' has no value", line_no);
    if (key == "svm_type") {
      if (tokens[1] != "epsilon_svr" && tokens[1] != "nu_svr")
        throw ParseError("unsupported svm_type '" + tokens[1] + "'", line_no);
      type_seen = true;
    } else if (key == "kernel_type") {
      if (tokens[1] != "rbf") throw ParseError("unsupported kernel_type '" + tokens[1] + "'", line_no);
      kernel_seen = true;
    } else if (key == "gamma") {
      gamma = parse_double(tokens[1], line_no);
    } else if (key == "rho") {
      rho = parse_double(tokens[1], line_no);
    } else if (key == "total_sv") {
      total_sv = parse_index(tokens[1], line_no);
    } else if (key == "nr_class" || key == "probA" || key == "probB" || key == "label" || key == "nr_sv" ||
               key == "degree" || key == "coef0") {
      // Present in libsvm files but irrelevant for RBF regression.
    } else {
      throw ParseError("unknown header field '" + key + "'", line_no);
    }
  }

  if (!type_seen) throw ParseError("model header missing field 'svm_type'", line_no);
  if (!kernel_seen) throw ParseError("model header missing field 'kernel_type'", line_no);
  if (!gamma) throw ParseError("model header missing field 'gamma'", line_no);
  if (!rho) throw ParseError("model header missing field 'rho'", line_no);
  if (!sv_seen) throw ParseError("model header missing 'SV' section marker", line_no);
  if (*gamma <= 0.0) throw ParseError("gamma must be positive", line_no);

  m.kernel_gamma = *gamma;
  m.rho = *rho;
  parse_support_vectors(in, line_no, m);
  if (m.support_vectors.empty()) throw ParseError("model has no support vectors", line_no);
  if (total_sv && *total_sv != static_cast<long>(m.support_vectors.size()))
    throw ParseError("total_sv is " + std::to_string(*total_sv) + " but " +
                         std::to_string(m.support_vectors.size()) + " support vectors were read",
                     line_no);
}

std::pair<double, double> parse_pair(const std::string& line, std::size_t line_no) {
  const auto tokens = split_ws(line);
  if (tokens.size() != 2) throw ParseError("expected two numbers", line_no);
  return {parse_double(tokens[0], line_no), parse_double(tokens[1], line_no)};
}

void parse_range(std::istream& in, SvrModel& m) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);

  std::size_t k = 0;
  const auto next = [&]() -> std::pair<std::size_t, std::string> {
    while (k < lines.size() && is_blank(lines[k])) ++k;
    if (k >= lines.size()) throw ParseError("unexpected end of range file", lines.size());
    ++k;
    return {k, lines[k - 1]};
  };
  const auto trimmed = [](std::string s) {
    s.erase(s.find_last_not_of(" \t\r") + 1);
    return s;
  };

  auto [line_no, line] = next();
  if (trimmed(line) == "y") {
    const auto [ln1, bounds] = next();
    const auto [ln2, minmax] = next();
    const auto [lo, hi] = parse_pair(bounds, ln1);
    const auto [mn, mx] = parse_pair(minmax, ln2);
    if (hi == lo) throw ParseError("degenerate target scaling bounds", ln1);
    m.score_range = ScoreMapping{lo, hi, mn, mx};
    std::tie(line_no, line) = next();
  }
  if (trimmed(line) != "x") throw ParseError("expected 'x' section marker", line_no);
  const auto [bounds_line, bounds] = next();
  std::tie(m.scaled_lower, m.scaled_upper) = parse_pair(bounds, bounds_line);

  std::size_t count = 0;
  long previous = 0;
  while (true) {
    while (k < lines.size() && is_blank(lines[k])) ++k;
    if (k >= lines.size()) break;
    const auto [ln, row] = next();
    const auto tokens = split_ws(row);
    if (tokens.size() != 3) throw ParseError("expected 'index min max'", ln);
    const long index = parse_index(tokens[0], ln);
    if (index <= previous) throw ParseError("feature indices must be strictly increasing", ln);
    if (index > static_cast<long>(kFeatureCount))
      throw ParseError("feature index " + std::to_string(index) + " exceeds feature count 36", ln);
    const double lo = parse_double(tokens[1], ln);
    const double hi = parse_double(tokens[2], ln);
    if (hi < lo) throw ParseError("feature upper bound below lower bound", ln);
    m.feature_lower[static_cast<std::size_t>(index - 1)] = lo;
    m.feature_upper[static_cast<std::size_t>(index - 1)] = hi;
    previous = index;
    ++count;
  }
  if (count != kFeatureCount || previous != static_cast<long>(kFeatureCount))
    throw ParseError("range file lists " + std::to_string(count) + " features, expected 36", lines.size());
}

}  // namespace

SvrModel load_model(std::istream& model_text, std::istream& range_text) {
  SvrModel m;
  parse_model(model_text, m);
  parse_range(range_text, m);
  return m;
}

FeatureVector scale_features(const BrisqueFeatures& features, const SvrModel& model) {
  FeatureVector x{};
  const double span = model.scaled_upper - model.scaled_lower;
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    const double lo = model.feature_lower[k];
    const double hi = model.feature_upper[k];
    // svm-scale drops constant features, which reads back as zero.
    x[k] = (hi == lo) ? 0.0 : model.scaled_lower + span * (features[k] - lo) / (hi - lo);
  }
  return x;
}

double score(const BrisqueFeatures& features, const SvrModel& model) {
  const FeatureVector x = scale_features(features, model);
  double decision = -model.rho;
  for (std::size_t j = 0; j < model.support_vectors.size(); ++j) {
    const auto& sv = model.support_vectors[j];
    double dist = 0.0;
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      const double d = x[k] - sv[k];
      dist += d * d;
    }
    decision += model.dual_coefficients[j] * std::exp(-model.kernel_gamma * dist);
  }
  if (!model.score_range) return decision;
  const auto& r = *model.score_range;
  return r.score_min + (decision - r.scaled_lower) * (r.score_max - r.score_min) / (r.scaled_upper - r.scaled_lower);
}

}  // namespace qoe::iqa

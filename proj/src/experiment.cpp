#include "phaseest/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <thread>

#include "format.hpp"
#include "phaseest/errors.hpp"
#include "phaseest/fisher.hpp"
#include "phaseest/rng.hpp"

namespace phaseest {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr const char* kCsvColumns[] = {
    "m",           "A",         "A_stderr",      "V",
    "V_stderr",    "mean_rough", "clamp_count",  "mean_estimate",
    "mean_variance", "ensemble_variance", "n_ok", "n_failed"};

struct Moments {
  double mean = kNaN;
  double sample_var = kNaN;
  std::size_t n = 0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  m.n = xs.size();
  if (xs.empty()) return m;
  double s = 0.0;
  for (double x : xs) s += x;
  m.mean = s / static_cast<double>(xs.size());
  if (xs.size() >= 2) {
    double q = 0.0;
    for (double x : xs) q += (x - m.mean) * (x - m.mean);
    m.sample_var = q / static_cast<double>(xs.size() - 1);
  }
  return m;
}

RunRecord execute(const ExperimentConfig& c, std::int64_t m, int rep) {
  RunRecord rec;
  rec.m = m;
  rec.repetition = rep;
  rec.seed = derive_seed(c.seed, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(rep));
  try {
    TwoStepOptions o;
    o.scheme = c.scheme;
    o.r = c.r;
    o.phi_star = c.phi_star;
    o.m = m;
    o.seed = rec.seed;
    o.grid_size = c.grid_size;
    o.n_rough = c.fixed_n_rough;
    o.reuse_rough_data = c.reuse_rough_data;
    o.clamp_sigmas = c.clamp_sigmas;
    const auto out = run_two_step(o);
    rec.ok = true;
    rec.mean = out.mean;
    rec.variance = out.variance;
    rec.mode = out.mode;
    rec.rough_estimate = c.scheme == Scheme::None ? kNaN : out.plan.rough_estimate;
    rec.n_rough = out.stage1_count;
    rec.clamped = out.plan.clamped;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

Aggregate aggregate(const ExperimentConfig& c, std::int64_t m, const RunRecord* runs, int count) {
  Aggregate a;
  a.m = m;
  std::vector<double> means;
  std::vector<double> vars;
  std::vector<double> roughs;
  for (int i = 0; i < count; ++i) {
    const auto& r = runs[i];
    if (!r.ok) {
      ++a.n_failed;
      continue;
    }
    ++a.n_ok;
    means.push_back(r.mean);
    vars.push_back(r.variance);
    if (c.scheme != Scheme::None) roughs.push_back(r.rough_estimate);
    if (r.clamped) ++a.clamp_count;
  }
  const auto mm = moments(means);
  const auto vm = moments(vars);
  const double scale = static_cast<double>(m) * qfi(c.r);

  a.mean_estimate = mm.mean;
  a.ensemble_variance = mm.sample_var;
  a.mean_variance = vm.mean;
  a.a = mm.mean / c.phi_star;
  a.a_stderr = std::sqrt(mm.sample_var / static_cast<double>(mm.n)) / c.phi_star;
  a.v = std::sqrt(vm.mean * scale);
  a.v_stderr = a.v > 0.0 ? std::sqrt(vm.sample_var / static_cast<double>(vm.n)) * scale / (2.0 * a.v)
                         : kNaN;
  a.mean_rough = moments(roughs).mean;
  return a;
}

double parse_field(const std::string& text) {
  if (text == "nan") return kNaN;
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw IoError("malformed CSV number: '" + text + "'");
  }
  return v;
}

nlohmann::json number(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

void validate(const ExperimentConfig& c) {
  detail::require_nonnegative(c.r, "r");
  detail::require_phase_in_prior(c.phi_star, "phi_star");
  if (!(c.phi_star > 0.0)) throw DomainError("phi_star must be > 0 (A divides by it)");
  if (c.repetitions < 1) throw DomainError("repetitions must be >= 1");
  if (c.grid_size < kMinGridSize) throw DomainError("grid_size must be >= 64");
  if (!(c.clamp_sigmas >= 0.0)) throw DomainError("clamp_sigmas must be >= 0");
  for (std::size_t i = 0; i < c.m_values.size(); ++i) {
    if (c.m_values[i] < 0) throw DomainError("m values must be >= 0");
    if (i > 0 && c.m_values[i] <= c.m_values[i - 1]) {
      throw DomainError("m values must be strictly increasing");
    }
    if (c.scheme != Scheme::None && c.m_values[i] < 16) {
      throw DomainError("adaptive schemes need every m >= 16");
    }
    if (c.fixed_n_rough && (*c.fixed_n_rough < 1 || *c.fixed_n_rough >= c.m_values[i])) {
      throw DomainError("fixed n_rough must satisfy 1 <= n_rough < m for every m");
    }
  }
  if (c.scheme == Scheme::PhaseRetune && !(c.r > 0.0)) {
    throw DomainError("phase retuning needs r > 0");
  }
}

std::vector<std::int64_t> log_grid(std::int64_t lo, std::int64_t hi, int points) {
  if (lo < 1 || hi < lo || points < 1) throw DomainError("log_grid needs 1 <= lo <= hi, points >= 1");
  std::vector<std::int64_t> out;
  if (points == 1) return {lo};
  const double ratio = std::log(static_cast<double>(hi) / static_cast<double>(lo));
  for (int k = 0; k < points; ++k) {
    const double v = static_cast<double>(lo) * std::exp(ratio * k / (points - 1));
    const auto m = k + 1 == points ? hi : static_cast<std::int64_t>(std::llround(v));
    if (out.empty() || m > out.back()) out.push_back(m);
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  ExperimentResult result;
  result.config = config;

  const auto reps = static_cast<std::size_t>(config.repetitions);
  const std::size_t total = config.m_values.size() * reps;
  result.runs.resize(total);

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
      result.runs[i] = execute(config, config.m_values[i / reps], static_cast<int>(i % reps));
    }
  };
  unsigned n_threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  n_threads = std::clamp<unsigned>(n_threads, 1, static_cast<unsigned>(std::max<std::size_t>(total, 1)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t k = 0; k < config.m_values.size(); ++k) {
    result.aggregates.push_back(
        aggregate(config, config.m_values[k], result.runs.data() + k * reps, config.repetitions));
  }
  return result;
}

void write_csv(const ExperimentResult& result, std::ostream& out) {
  using detail::format_double;
  bool first = true;
  for (const char* col : kCsvColumns) {
    out << (first ? "" : ",") << col;
    first = false;
  }
  out << "\r\n";
  for (const auto& a : result.aggregates) {
    out << a.m << ',' << format_double(a.a) << ',' << format_double(a.a_stderr) << ','
        << format_double(a.v) << ',' << format_double(a.v_stderr) << ','
        << format_double(a.mean_rough) << ',' << a.clamp_count << ','
        << format_double(a.mean_estimate) << ',' << format_double(a.mean_variance) << ','
        << format_double(a.ensemble_variance) << ',' << a.n_ok << ',' << a.n_failed << "\r\n";
  }
}

void emit_csv(const ExperimentResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_csv(result, out);
  if (!out.flush()) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<Aggregate> read_aggregates_csv(std::istream& in) {
  std::vector<Aggregate> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != std::size(kCsvColumns)) {
      throw IoError("expected " + std::to_string(std::size(kCsvColumns)) + " CSV fields, got " +
                    std::to_string(f.size()));
    }
    Aggregate a;
    a.m = static_cast<std::int64_t>(parse_field(f[0]));
    a.a = parse_field(f[1]);
    a.a_stderr = parse_field(f[2]);
    a.v = parse_field(f[3]);
    a.v_stderr = parse_field(f[4]);
    a.mean_rough = parse_field(f[5]);
    a.clamp_count = static_cast<int>(parse_field(f[6]));
    a.mean_estimate = parse_field(f[7]);
    a.mean_variance = parse_field(f[8]);
    a.ensemble_variance = parse_field(f[9]);
    a.n_ok = static_cast<int>(parse_field(f[10]));
    a.n_failed = static_cast<int>(parse_field(f[11]));
    rows.push_back(a);
  }
  return rows;
}

void write_json(const ExperimentResult& result, std::ostream& out) {
  const auto& c = result.config;
  nlohmann::json doc;
  doc["config"] = {{"r", c.r},
                   {"phi_star", c.phi_star},
                   {"m_values", c.m_values},
                   {"repetitions", c.repetitions},
                   {"scheme", std::string(to_string(c.scheme))},
                   {"seed", c.seed},
                   {"grid_size", c.grid_size},
                   {"n_rough", c.fixed_n_rough ? nlohmann::json(*c.fixed_n_rough) : nlohmann::json("sqrt_rule")},
                   {"reuse_rough_data", c.reuse_rough_data},
                   {"clamp_sigmas", c.clamp_sigmas}};
  auto& aggs = doc["aggregates"] = nlohmann::json::array();
  for (const auto& a : result.aggregates) {
    aggs.push_back({{"m", a.m},
                    {"A", number(a.a)},
                    {"A_stderr", number(a.a_stderr)},
                    {"V", number(a.v)},
                    {"V_stderr", number(a.v_stderr)},
                    {"mean_rough", number(a.mean_rough)},
                    {"clamp_count", a.clamp_count},
                    {"mean_estimate", number(a.mean_estimate)},
                    {"mean_variance", number(a.mean_variance)},
                    {"ensemble_variance", number(a.ensemble_variance)},
                    {"n_ok", a.n_ok},
                    {"n_failed", a.n_failed}});
  }
  auto& runs = doc["runs"] = nlohmann::json::array();
  for (const auto& r : result.runs) {
    nlohmann::json j = {{"m", r.m}, {"repetition", r.repetition}, {"seed", r.seed}, {"ok", r.ok}};
    if (r.ok) {
      j["mean"] = number(r.mean);
      j["variance"] = number(r.variance);
      j["mode"] = number(r.mode);
      j["rough_estimate"] = number(r.rough_estimate);
      j["n_rough"] = r.n_rough;
      j["clamped"] = r.clamped;
    } else {
      j["error"] = r.error;
    }
    runs.push_back(std::move(j));
  }
  out << doc.dump(2) << '\n';
}

void emit_json(const ExperimentResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_json(result, out);
  if (!out.flush()) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace phaseest

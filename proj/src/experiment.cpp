#include "ris/experiment.hpp"

#include <atomic>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

namespace ris {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Shortest text that parses back to the same double.
std::string fmt_short(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(d)) {
    throw ConfigError("field '" + key + "': expected a number, got '" + v + "'");
  }
  return d;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("field '" + key + "': expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw ConfigError("field '" + key + "': expected true or false, got '" + v + "'");
}

Mode parse_mode(const std::string& v) {
  if (v == "reflective") return Mode::kReflective;
  if (v == "transmissive") return Mode::kTransmissive;
  throw ConfigError("field 'mode': expected reflective or transmissive, got '" + v + "'");
}

ChannelModel parse_channel(const std::string& v) {
  if (v == "parametric") return ChannelModel::kParametric;
  if (v == "geometric") return ChannelModel::kGeometric;
  throw ConfigError("field 'channel_model': expected parametric or geometric, got '" + v + "'");
}

Baseline parse_baseline(const std::string& v) {
  if (v == "proposed") return Baseline::kProposed;
  if (v == "fixed_mc") return Baseline::kFixedMc;
  if (v == "conventional") return Baseline::kConventional;
  throw ConfigError("field 'baselines': unknown baseline '" + v + "'");
}

SweepKind parse_sweep(const std::string& v) {
  if (v == "power") return SweepKind::kPower;
  if (v == "elements") return SweepKind::kElements;
  if (v == "users") return SweepKind::kUsers;
  throw ConfigError("field 'sweep': expected power, elements or users, got '" + v + "'");
}

std::size_t as_count(double v, const char* field) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) {
    throw ConfigError(std::string("field 'values': ") + field + " must be a positive integer, got " +
                      fmt(v));
  }
  return static_cast<std::size_t>(v);
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<T, double>) {
      out += fmt_short(xs[i]);
    } else {
      out += to_string(xs[i]);
    }
  }
  return out;
}

}  // namespace

std::string to_string(Mode m) { return m == Mode::kReflective ? "reflective" : "transmissive"; }

std::string to_string(Baseline b) {
  switch (b) {
    case Baseline::kProposed: return "proposed";
    case Baseline::kFixedMc: return "fixed_mc";
    case Baseline::kConventional: return "conventional";
  }
  return "";
}

std::string to_string(SweepKind s) {
  switch (s) {
    case SweepKind::kPower: return "power";
    case SweepKind::kElements: return "elements";
    case SweepKind::kUsers: return "users";
  }
  return "";
}

std::string to_string(ChannelModel c) {
  return c == ChannelModel::kParametric ? "parametric" : "geometric";
}

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

std::vector<Baseline> ExperimentSpec::resolved_baselines() const {
  if (baselines) return *baselines;
  if (mode == Mode::kReflective) {
    return {Baseline::kProposed, Baseline::kFixedMc, Baseline::kConventional};
  }
  return {Baseline::kProposed, Baseline::kConventional};
}

ScenarioConfig ExperimentSpec::cell_scenario(double sweep_value) const {
  ScenarioConfig sc = scenario;
  sc.P = dbm_to_watt(P_dbm);
  sc.noise_var = dbm_to_watt(noise_dbm);
  switch (sweep) {
    case SweepKind::kPower: sc.P = dbm_to_watt(sweep_value); break;
    case SweepKind::kElements: sc.M = as_count(sweep_value, "element count"); break;
    case SweepKind::kUsers: sc.K = as_count(sweep_value, "user count"); break;
  }
  return sc;
}

void ExperimentSpec::validate() const {
  if (values.empty()) throw ConfigError("field 'values' must not be empty");
  if (trials < 1) throw ConfigError("field 'trials' must be >= 1");
  if (eval_samples < 1) throw ConfigError("field 'eval_samples' must be >= 1");
  if (threads < 1) throw ConfigError("field 'threads' must be >= 1");
  if (!(fixed_mc_magnitude >= 0.0 && fixed_mc_magnitude < 1.0)) {
    throw ConfigError("field 'fixed_mc_magnitude' must lie in [0, 1)");
  }
  const auto bl = resolved_baselines();
  if (bl.empty()) throw ConfigError("field 'baselines' must not be empty");
  for (std::size_t i = 0; i < bl.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (bl[i] == bl[j]) throw ConfigError("field 'baselines': duplicate '" + to_string(bl[i]) + "'");
    }
    if (bl[i] == Baseline::kFixedMc && mode == Mode::kTransmissive) {
      throw ConfigError("field 'baselines': fixed_mc applies to reflective mode only");
    }
  }
  outer.validate();
  inner.validate();
  for (double v : values) {
    const ScenarioConfig sc = cell_scenario(v);
    sc.validate();
    if (channel_model == ChannelModel::kGeometric) {
      if (sc.N % sc.num_bs != 0) throw ConfigError("field 'num_bs' must divide N");
      if (sc.num_bs < sc.K) throw ConfigError("field 'num_bs' must be >= K in geometric mode");
    }
  }
}

void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  ScenarioConfig& sc = spec.scenario;
  if (key == "mode") {
    spec.mode = parse_mode(v);
  } else if (key == "channel_model") {
    spec.channel_model = parse_channel(v);
  } else if (key == "baselines") {
    std::vector<Baseline> bl;
    for (const auto& item : split_list(v)) bl.push_back(parse_baseline(item));
    spec.baselines = bl;
  } else if (key == "sweep") {
    spec.sweep = parse_sweep(v);
  } else if (key == "values") {
    std::vector<double> vals;
    for (const auto& item : split_list(v)) vals.push_back(parse_double(key, item));
    spec.values = vals;
  } else if (key == "trials") {
    spec.trials = parse_uint(key, v);
  } else if (key == "seed") {
    spec.seed = parse_uint(key, v);
  } else if (key == "out") {
    spec.out = v;
  } else if (key == "N") {
    sc.N = parse_uint(key, v);
  } else if (key == "M") {
    sc.M = parse_uint(key, v);
  } else if (key == "K") {
    sc.K = parse_uint(key, v);
  } else if (key == "P_dbm") {
    spec.P_dbm = parse_double(key, v);
  } else if (key == "noise_dbm") {
    spec.noise_dbm = parse_double(key, v);
  } else if (key == "Q_br") {
    sc.Q_br = parse_uint(key, v);
  } else if (key == "Q_ru") {
    sc.Q_ru = parse_uint(key, v);
  } else if (key == "d_ris") {
    sc.d_ris = parse_double(key, v);
  } else if (key == "d_user_min") {
    sc.d_user_min = parse_double(key, v);
  } else if (key == "d_user_max") {
    sc.d_user_max = parse_double(key, v);
  } else if (key == "C0_db") {
    sc.C0 = std::pow(10.0, parse_double(key, v) / 10.0);
  } else if (key == "d0") {
    sc.d0 = parse_double(key, v);
  } else if (key == "eta") {
    sc.eta = parse_double(key, v);
  } else if (key == "eta_bu") {
    sc.eta_bu = parse_double(key, v);
  } else if (key == "num_bs") {
    sc.num_bs = parse_uint(key, v);
  } else if (key == "elevation_deg") {
    sc.elevation_deg = parse_double(key, v);
  } else if (key == "Q") {
    spec.outer.Q = parse_uint(key, v);
  } else if (key == "I_max") {
    spec.outer.I_max = parse_uint(key, v);
  } else if (key == "mu") {
    spec.outer.mu = parse_double(key, v);
  } else if (key == "redraw") {
    spec.outer.redraw = parse_bool(key, v);
  } else if (key == "adaptive_step") {
    spec.outer.adaptive_step = parse_bool(key, v);
  } else if (key == "warm_start") {
    spec.outer.warm_start = parse_bool(key, v);
  } else if (key == "eval_samples") {
    spec.eval_samples = parse_uint(key, v);
  } else if (key == "inner_max_iters") {
    spec.inner.max_iters = parse_uint(key, v);
  } else if (key == "inner_tol") {
    spec.inner.tol = parse_double(key, v);
  } else if (key == "inner_phase_step") {
    spec.inner.phase_step = parse_double(key, v);
  } else if (key == "inner_backtrack") {
    spec.inner.backtrack = parse_double(key, v);
  } else if (key == "fixed_mc_magnitude") {
    spec.fixed_mc_magnitude = parse_double(key, v);
  } else if (key == "threads") {
    spec.threads = parse_uint(key, v);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

ExperimentSpec parse_config(std::istream& in, const std::string& source) {
  ExperimentSpec spec;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(where + "missing key");
    try {
      apply_setting(spec, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return spec;
}

ExperimentSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t trial) {
  return derive_seed(base, Stream::kTrial, trial);
}

ReflectiveScattering fixed_mc_scattering(std::size_t M, double magnitude, std::uint64_t seed) {
  Rng rng(derive_seed(seed, Stream::kFixedCoupling, M));
  CVector aa(static_cast<Eigen::Index>(M));
  for (Eigen::Index i = 0; i < aa.size(); ++i) {
    aa(i) = std::polar(magnitude, uniform(rng, 0.0, 2.0 * std::numbers::pi));
  }
  LosslessPair p = project_lossless(symmetrize(aa), CVector::Ones(aa.size()));
  return ReflectiveScattering::from_spectra(std::move(p.sigma_aa), std::move(p.sigma_ab));
}

HeldOutMetrics evaluate_heldout(const ScenarioConfig& scenario, ChannelModel model,
                                const ScatteringState& state, std::size_t count,
                                std::uint64_t seed, const InnerConfig& inner) {
  const auto samples = generate_batch(model, scenario, seed, Stream::kEvalChannel, count);
  HeldOutMetrics m;
  for (std::size_t q = 0; q < samples.size(); ++q) {
    Rng rng(derive_seed(seed, Stream::kEvalPhase, q));
    const InnerResult r = optimize_inner(samples[q], state, inner, scenario.P, scenario.noise_var, rng);
    m.mean_sum_rate += r.solution.sum_rate;
    m.mean_mse += r.solution.mse;
  }
  m.mean_sum_rate /= static_cast<double>(count);
  m.mean_mse /= static_cast<double>(count);
  return m;
}

CellResult run_cell(const ExperimentSpec& spec, double sweep_value, Baseline baseline,
                    std::size_t trial) {
  CellResult c;
  c.sweep_value = sweep_value;
  c.baseline = baseline;
  c.trial = trial;
  c.seed = trial_seed(spec.seed, trial);
  try {
    ScenarioConfig sc = spec.cell_scenario(sweep_value);
    sc.seed = c.seed;
    sc.validate();
    ScatteringState state;
    const bool reflective = spec.mode == Mode::kReflective;
    switch (baseline) {
      case Baseline::kConventional:
        state = reflective ? ScatteringState(ReflectiveScattering::conventional(sc.M))
                           : ScatteringState(TransmissiveScattering::identity(sc.M));
        break;
      case Baseline::kFixedMc:
        if (!reflective) throw ConfigError("fixed_mc applies to reflective mode only");
        state = fixed_mc_scattering(sc.M, spec.fixed_mc_magnitude, spec.seed);
        break;
      case Baseline::kProposed: {
        OuterConfig outer = spec.outer;
        outer.seed = c.seed;
        if (reflective) {
          ReflectiveRun run = run_algorithm1(sc, spec.channel_model, outer, spec.inner);
          c.iters = run.trace.iterations();
          state = std::move(run.scattering);
        } else {
          TransmissiveRun run = run_algorithm2(sc, spec.channel_model, outer, spec.inner);
          c.iters = run.trace.iterations();
          state = std::move(run.scattering);
        }
        break;
      }
    }
    const HeldOutMetrics m =
        evaluate_heldout(sc, spec.channel_model, state, spec.eval_samples, c.seed, spec.inner);
    c.sum_rate = m.mean_sum_rate;
    c.mse = m.mean_mse;
    c.state = std::move(state);
    c.ok = true;
  } catch (const std::exception& e) {
    c.ok = false;
    c.error = e.what();
  }
  return c;
}

ResultTable run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ResultTable table;
  table.spec = spec;
  const auto bl = spec.resolved_baselines();

  struct Job {
    double value;
    Baseline baseline;
    std::size_t trial;
  };
  std::vector<Job> jobs;
  for (double v : spec.values) {
    for (Baseline b : bl) {
      for (std::size_t t = 0; t < spec.trials; ++t) jobs.push_back({v, b, t});
    }
  }
  table.cells.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      table.cells[i] = run_cell(spec, jobs[i].value, jobs[i].baseline, jobs[i].trial);
    }
  };
  const std::size_t n_threads = std::min(spec.threads, jobs.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t start = 0; start < jobs.size(); start += spec.trials) {
    ResultRow row;
    row.sweep_value = jobs[start].value;
    row.baseline = jobs[start].baseline;
    std::vector<const CellResult*> ok;
    for (std::size_t t = 0; t < spec.trials; ++t) {
      if (table.cells[start + t].ok) ok.push_back(&table.cells[start + t]);
    }
    row.trials = ok.size();
    if (ok.empty()) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.mean_sum_rate = row.std_sum_rate = row.mean_mse = row.iters = nan;
    } else {
      for (const auto* c : ok) {
        row.mean_sum_rate += c->sum_rate;
        row.mean_mse += c->mse;
        row.iters += static_cast<double>(c->iters);
      }
      const double n = static_cast<double>(ok.size());
      row.mean_sum_rate /= n;
      row.mean_mse /= n;
      row.iters /= n;
      double ss = 0.0;
      for (const auto* c : ok) ss += (c->sum_rate - row.mean_sum_rate) * (c->sum_rate - row.mean_sum_rate);
      row.std_sum_rate = ok.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    }
    table.rows.push_back(row);
  }
  return table;
}

std::string results_csv(const ResultTable& table) {
  const ExperimentSpec& s = table.spec;
  std::string out =
      "sweep_name,sweep_value,baseline,mode,channel_model,trials,mean_sum_rate,std_sum_rate,"
      "mean_mse,iters\n";
  for (const auto& r : table.rows) {
    out += to_string(s.sweep) + "," + fmt(r.sweep_value) + "," + to_string(r.baseline) + "," +
           to_string(s.mode) + "," + to_string(s.channel_model) + "," + std::to_string(r.trials) +
           "," + fmt(r.mean_sum_rate) + "," + fmt(r.std_sum_rate) + "," + fmt(r.mean_mse) + "," +
           fmt(r.iters) + "\n";
  }
  return out;
}

std::string manifest_text(const ResultTable& table) {
  const ExperimentSpec& s = table.spec;
  const ScenarioConfig& sc = s.scenario;
  std::vector<std::pair<std::string, std::string>> kv = {
      {"mode", to_string(s.mode)},
      {"channel_model", to_string(s.channel_model)},
      {"baselines", join(s.resolved_baselines())},
      {"sweep", to_string(s.sweep)},
      {"values", join(s.values)},
      {"trials", std::to_string(s.trials)},
      {"seed", std::to_string(s.seed)},
      {"out", s.out},
      {"N", std::to_string(sc.N)},
      {"M", std::to_string(sc.M)},
      {"K", std::to_string(sc.K)},
      {"P_dbm", fmt_short(s.P_dbm)},
      {"noise_dbm", fmt_short(s.noise_dbm)},
      {"Q_br", std::to_string(sc.Q_br)},
      {"Q_ru", std::to_string(sc.Q_ru)},
      {"d_ris", fmt_short(sc.d_ris)},
      {"d_user_min", fmt_short(sc.d_user_min)},
      {"d_user_max", fmt_short(sc.d_user_max)},
      {"C0_db", fmt_short(10.0 * std::log10(sc.C0))},
      {"d0", fmt_short(sc.d0)},
      {"eta", fmt_short(sc.eta)},
      {"eta_bu", fmt_short(sc.eta_bu)},
      {"num_bs", std::to_string(sc.num_bs)},
      {"elevation_deg", fmt_short(sc.elevation_deg)},
      {"Q", std::to_string(s.outer.Q)},
      {"I_max", std::to_string(s.outer.I_max)},
      {"mu", fmt_short(s.outer.mu)},
      {"redraw", s.outer.redraw ? "true" : "false"},
      {"adaptive_step", s.outer.adaptive_step ? "true" : "false"},
      {"warm_start", s.outer.warm_start ? "true" : "false"},
      {"eval_samples", std::to_string(s.eval_samples)},
      {"inner_max_iters", std::to_string(s.inner.max_iters)},
      {"inner_tol", fmt_short(s.inner.tol)},
      {"inner_phase_step", fmt_short(s.inner.phase_step)},
      {"inner_backtrack", fmt_short(s.inner.backtrack)},
      {"fixed_mc_magnitude", fmt_short(s.fixed_mc_magnitude)},
      {"threads", std::to_string(s.threads)},
  };
  std::string out = "# ris_sim run manifest\n# version = " + std::string(kVersion) + "\n";
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  for (const auto& c : table.cells) {
    out += "# cell " + to_string(s.sweep) + "=" + fmt(c.sweep_value) + " baseline=" +
           to_string(c.baseline) + " trial=" + std::to_string(c.trial) +
           " seed=" + std::to_string(c.seed) + (c.ok ? " ok" : " FAILED: " + c.error) + "\n";
  }
  return out;
}

namespace {

std::string cell_file_name(const ResultTable& table, const CellResult& c) {
  return to_string(table.spec.sweep) + "_" + fmt(c.sweep_value) + "_" + to_string(c.baseline) +
         "_t" + std::to_string(c.trial) + ".txt";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw Error("write failed for '" + path.string() + "'");
}

void write_rows(std::ostream& out, const CMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << fmt(m(i, j).real()) << ',' << fmt(m(i, j).imag());
    }
    out << '\n';
  }
}

CMatrix read_rows(std::istream& in, std::size_t rows, std::size_t cols) {
  CMatrix m(rows, cols);
  std::string line;
  for (std::size_t i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw Error("scattering file: truncated data");
    const auto parts = split_list(line);
    if (parts.size() != 2 * cols) throw Error("scattering file: bad row length");
    for (std::size_t j = 0; j < cols; ++j) {
      m(i, j) = cdouble(parse_double("re", parts[2 * j]), parse_double("im", parts[2 * j + 1]));
    }
  }
  return m;
}

}  // namespace

void write_scattering(std::ostream& out, const ScatteringState& state) {
  if (const auto* rs = std::get_if<ReflectiveScattering>(&state)) {
    out << "RIS-SCATTER v1 reflective " << rs->size() << '\n';
    write_rows(out, rs->sigma_aa.transpose());
    write_rows(out, rs->sigma_ab.transpose());
  } else {
    const auto& ts = std::get<TransmissiveScattering>(state);
    out << "RIS-SCATTER v1 transmissive " << ts.size() << '\n';
    write_rows(out, ts.s1);
    write_rows(out, ts.s2);
  }
}

ScatteringState read_scattering(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw Error("scattering file: missing header");
  std::istringstream hs(header);
  std::string magic, version, mode;
  std::size_t M = 0;
  if (!(hs >> magic >> version >> mode >> M) || magic != "RIS-SCATTER" || version != "v1" || M == 0) {
    throw Error("scattering file: bad header '" + header + "'");
  }
  if (mode == "reflective") {
    CVector aa = read_rows(in, 1, M).row(0).transpose();
    CVector ab = read_rows(in, 1, M).row(0).transpose();
    return ReflectiveScattering::from_spectra(std::move(aa), std::move(ab));
  }
  if (mode == "transmissive") {
    CMatrix s1 = read_rows(in, M, M);
    CMatrix s2 = read_rows(in, M, M);
    return TransmissiveScattering{std::move(s1), std::move(s2)};
  }
  throw Error("scattering file: unknown mode '" + mode + "'");
}

void save_scattering(const std::string& path, const ScatteringState& state) {
  std::ostringstream os;
  write_scattering(os, state);
  write_file(path, os.str());
}

ScatteringState load_scattering(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scattering file '" + path + "'");
  return read_scattering(in);
}

void emit_results(const ResultTable& table, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root / "scattering", ec);
  if (ec) throw Error("cannot create '" + (root / "scattering").string() + "': " + ec.message());
  write_file(root / "results.csv", results_csv(table));
  write_file(root / "manifest.txt", manifest_text(table));
  for (const auto& c : table.cells) {
    if (c.ok && c.state) save_scattering((root / "scattering" / cell_file_name(table, c)).string(), *c.state);
  }
}

}  // namespace ris

#include "atwr/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

namespace atwr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kCondenseBelowDb = 15.0;  // auto solver switch point

double log2_safe(double v) { return std::log(v) / std::log(2.0); }

// log2 det(I + rho * gram) for Hermitian PSD gram, via Cholesky.
double logdet2_eye_plus(const ComplexMatrix& gram, double rho) {
  if (rho == 0.0) return 0.0;
  const Eigen::Index n = gram.rows();
  ComplexMatrix a = ComplexMatrix::Identity(n, n) + rho * gram;
  Eigen::LLT<ComplexMatrix> llt(a);
  if (llt.info() != Eigen::Success) {
    return log2_safe(std::abs(a.partialPivLu().determinant()));
  }
  double ld = 0.0;
  const ComplexMatrix l = llt.matrixL();
  for (Eigen::Index i = 0; i < n; ++i) ld += std::log(std::real(l(i, i)));
  return 2.0 * ld / std::log(2.0);
}

// maximize sum_i ln(1 + a_i t_i / (b_i t_i + s2)) s.t. sum c_i t_i <= budget,
// by bisection on the water level; rate returned in bits.
double allocate_relay_modes(const RealVector& a, const RealVector& b, const RealVector& c,
                            double s2, double budget) {
  const Eigen::Index n = a.size();
  if (budget <= 0 || (a.array() <= 0).all()) return 0.0;

  auto fill_t = [&](double mu, RealVector& t) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (a(i) <= 0) {
        t(i) = 0.0;
        continue;
      }
      const double k = a(i) * s2 / (mu * c(i));
      if (k <= s2 * s2) {
        t(i) = 0.0;
        continue;
      }
      const double quad = b(i) * (a(i) + b(i));
      const double lin = s2 * (a(i) + 2.0 * b(i));
      if (quad < 1e-300) {
        t(i) = (k - s2 * s2) / lin;
      } else {
        t(i) = (-lin + std::sqrt(lin * lin + 4.0 * quad * (k - s2 * s2))) / (2.0 * quad);
      }
    }
  };

  double mu_hi = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a(i) > 0) mu_hi = std::max(mu_hi, 2.0 * a(i) / (c(i) * s2));
  }
  double mu_lo = mu_hi * 1e-18;
  RealVector t(n);
  for (int iter = 0; iter < 200; ++iter) {
    const double mu = std::sqrt(mu_lo * mu_hi);
    fill_t(mu, t);
    if (c.dot(t) > budget) {
      mu_lo = mu;
    } else {
      mu_hi = mu;
    }
  }
  fill_t(mu_hi, t);  // feasible side of the bracket
  double rate = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (t(i) > 0) rate += std::log1p(a(i) * t(i) / (b(i) * t(i) + s2));
  }
  return rate / std::log(2.0);
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kBiCt:
      return "bi-ct";
    case Scheme::kBiCp:
      return "bi-cp";
    case Scheme::kOwr:
      return "owr";
    case Scheme::kDirect:
      return "direct";
  }
  return "?";
}

std::optional<Scheme> scheme_from_name(const std::string& name) {
  if (name == "bi-ct") return Scheme::kBiCt;
  if (name == "bi-cp") return Scheme::kBiCp;
  if (name == "owr") return Scheme::kOwr;
  if (name == "direct") return Scheme::kDirect;
  return std::nullopt;
}

void SweepSpec::validate() const {
  if (axis.empty()) throw InvalidInput("sweep: empty axis");
  if (schemes.empty()) throw InvalidInput("sweep: no schemes selected");
  if (realizations < 1) throw InvalidInput("sweep: realizations must be at least 1");
  if (weight_u < 0 || weight_b < 0) throw InvalidInput("sweep: negative weights");
  SystemConfig::make(n_antennas, m_antennas).validate();
  if (scenario == SweepScenario::kCoverageExtension || scenario == SweepScenario::kCoverageHole) {
    geometry.validate();
    for (double d : axis) {
      if (d <= 0) throw InvalidInput("sweep: distances must be positive");
    }
  }
}

double owr_wsr(const ChannelSet& ch, double w_u, double w_b) {
  const int m = ch.config.m_antennas;
  const double s2 = ch.config.sigma2;
  const double s2r = ch.config.sigma2_r;

  auto leg_rate = [&](const ComplexMatrix& h, const ComplexMatrix& g, double rho_src) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eh(h * h.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eg(g.adjoint() * g);
    const RealVector lh = eh.eigenvalues().tail(m).reverse().cwiseMax(0.0);
    const RealVector lg = eg.eigenvalues().tail(m).reverse().cwiseMax(0.0);
    RealVector a(m), b(m), c(m);
    for (int i = 0; i < m; ++i) {
      a(i) = lg(i) * lh(i) * rho_src;
      b(i) = lg(i) * s2r;
      c(i) = rho_src * lh(i) + s2r;
    }
    return allocate_relay_modes(a, b, c, s2, ch.config.p_r);
  };

  const double r_u = leg_rate(ch.h_b, ch.g_u, ch.config.rho_b());  // BS -> RS -> RUE
  const double r_b = leg_rate(ch.h_u, ch.g_b, ch.config.rho_u());  // TUE -> RS -> BS
  return 0.25 * (w_u * r_u + w_b * r_b);
}

double direct_wsr(const ComplexMatrix& h, const ComplexMatrix& g, const DirectPowers& powers,
                  double w_u, double w_b) {
  if (h.rows() != h.cols() || g.rows() != g.cols() || h.rows() != g.rows()) {
    throw DimensionMismatch("direct_wsr: channels must be square and equally sized");
  }
  const double m = static_cast<double>(h.rows());
  const double rho_dl = (powers.p_b + powers.p_r) / (m * powers.sigma2);
  const double rho_ul = powers.p_u / (m * powers.sigma2);
  const double r_u = logdet2_eye_plus(h * h.adjoint(), rho_dl);
  const double r_b = logdet2_eye_plus(g * g.adjoint(), rho_ul);
  return 0.5 * (w_u * r_u + w_b * r_b);
}

BiCpModels bi_cp_models(const ChannelSet& ch, const BiCancellers& bc) {
  const int m = bc.m_antennas;
  const ComplexMatrix gui = inverse_checked(ch.g_u * bc.m_u());
  const ComplexMatrix gbi = inverse_checked(ch.g_b * bc.m_b());
  const ComplexMatrix hui = inverse_checked(bc.f_b() * ch.h_b);
  const ComplexMatrix hbi = inverse_checked(bc.f_u() * ch.h_u);
  const ComplexMatrix coupling = (ch.g_b * bc.m_u()) * gui;

  RealVector rn_hui(m), rn_hbi(m);
  for (int s = 0; s < m; ++s) {
    rn_hui(s) = hui.row(s).squaredNorm();
    rn_hbi(s) = hbi.row(s).squaredNorm();
  }

  BiCpModels models;
  SnrModel& sm = models.snr;
  sm.m_streams = m;
  sm.sigma2 = ch.config.sigma2;
  sm.sigma2_r = ch.config.sigma2_r;
  sm.rho_u = ch.config.rho_u();
  sm.rho_b = ch.config.rho_b();
  sm.a_u = RealVector::Constant(m, sm.rho_b);
  sm.a_b = RealVector::Constant(m, sm.rho_u);
  sm.b_u = RealMatrix::Zero(m, m);
  sm.b_b = RealMatrix::Zero(m, m);
  sm.c_b = RealMatrix::Zero(m, m);
  for (int s = 0; s < m; ++s) {
    const int row = m - 1 - s;
    const int own = m - 1 - s;
    sm.b_u(s, own) = rn_hui(s);
    sm.c_b(s, own) = rn_hbi(s);
    for (int j = 0; j < m; ++j) {
      sm.b_b(s, j) = std::norm(coupling(row, j)) * rn_hui(m - 1 - j);
    }
  }

  PowerModel& pm = models.power;
  pm.p_u.resize(m);
  pm.p_b.resize(m);
  DeltaVector unit = DeltaVector::zero(m);
  for (int j = 0; j < m; ++j) {
    unit.u(j) = 1.0;
    pm.p_u(j) = relay_power(build_bi_cp(ch, bc, unit), ch);
    unit.u(j) = 0.0;
    unit.b(j) = 1.0;
    pm.p_b(j) = relay_power(build_bi_cp(ch, bc, unit), ch);
    unit.b(j) = 0.0;
  }
  return models;
}

StreamSnrEstimates bi_cp_exact_sinrs(const ChannelSet& ch, const BiCancellers& bc,
                                     const DeltaVector& delta) {
  const int m = bc.m_antennas;
  const ComplexMatrix w = build_bi_cp(ch, bc, delta);
  const ComplexMatrix c_u = ch.g_u * w * ch.h_b;
  const ComplexMatrix c_b = ch.g_b * w * ch.h_u;
  const ComplexMatrix gu_w = ch.g_u * w;
  const ComplexMatrix gb_w = ch.g_b * w;
  const double s2r = ch.config.sigma2_r;
  const double s2 = ch.config.sigma2;
  const double rho_u = ch.config.rho_u();
  const double rho_b = ch.config.rho_b();

  StreamSnrEstimates out;
  out.rue.resize(m);
  out.bs.resize(m);
  for (int s = 0; s < m; ++s) {
    const int row = m - 1 - s;
    double noise_u = s2r * gu_w.row(row).squaredNorm() + s2;
    double noise_b = s2r * gb_w.row(row).squaredNorm() + s2;
    double sig_u = std::norm(c_u(row, s)) * rho_b;
    double sig_b = std::norm(c_b(row, s)) * rho_u;
    // No SIC here: any residual off-position leakage counts as interference.
    for (int k = 0; k < m; ++k) {
      if (k == s) continue;
      noise_u += std::norm(c_u(row, k)) * rho_b;
      noise_b += std::norm(c_b(row, k)) * rho_u;
    }
    out.rue(s) = sig_u > 0 ? sig_u / noise_u : 0.0;
    out.bs(s) = sig_b > 0 ? sig_b / noise_b : 0.0;
  }
  return out;
}

double bi_cp_exact_wsr(const ChannelSet& ch, const BiCancellers& bc, const DeltaVector& delta,
                       const Weights& w) {
  const StreamSnrEstimates sinrs = bi_cp_exact_sinrs(ch, bc, delta);
  double rate = 0.0;
  for (int s = 0; s < bc.m_antennas; ++s) {
    rate += w.u(s) * std::log2(1.0 + sinrs.rue(s));
    rate += w.b(s) * std::log2(1.0 + sinrs.bs(s));
  }
  return 0.5 * rate;
}

DeltaVector rescale_to_power(const ChannelSet& ch, const BiCancellers& bc,
                             const DeltaVector& delta, double p_r) {
  const double power = relay_power(build_bi_cp(ch, bc, delta), ch);
  if (power <= 0) return delta;
  const double gamma = p_r / power;  // power is degree-1 homogeneous in delta
  return {delta.u * gamma, delta.b * gamma};
}

double evaluate_scheme(Scheme scheme, const ChannelSet& ch, const Weights& w, SolverMode mode,
                       double min_hop_snr_db, const ComplexMatrix* h_direct,
                       const ComplexMatrix* g_direct, const DirectPowers& direct_powers) {
  const bool condense =
      mode == SolverMode::kCondense || (mode == SolverMode::kAuto && min_hop_snr_db < kCondenseBelowDb);
  auto solve = [&](const SnrModel& sm, const PowerModel& pm) {
    WsrResult res = condense ? maximize_wsr_exact(sm, pm, w, ch.config.p_r)
                             : maximize_wsr_high_snr(sm, pm, w, ch.config.p_r);
    if (res.status != SolveStatus::kOptimal) {
      throw Error(std::string("power allocation failed: ") + to_string(res.status));
    }
    return res;
  };

  switch (scheme) {
    case Scheme::kBiCt: {
      const BiCancellers bc = build_bi_cancellers(ch);
      const TriangularFactors tf = triangularize(ch, bc);
      return solve(snr_model(tf, ch.config), power_model(bc, tf, ch)).wsr_bits_per_hz;
    }
    case Scheme::kBiCp: {
      const BiCancellers bc = build_bi_cancellers(ch);
      const BiCpModels models = bi_cp_models(ch, bc);
      const WsrResult res = solve(models.snr, models.power);
      const DeltaVector d = rescale_to_power(ch, bc, res.delta, ch.config.p_r);
      return bi_cp_exact_wsr(ch, bc, d, w);
    }
    case Scheme::kOwr:
      return owr_wsr(ch, w.u.mean(), w.b.mean());
    case Scheme::kDirect:
      if (h_direct == nullptr || g_direct == nullptr) {
        throw InvalidInput("direct scheme requires direct-link channels");
      }
      return direct_wsr(*h_direct, *g_direct, direct_powers, w.u.mean(), w.b.mean());
  }
  throw InvalidInput("unknown scheme");
}

namespace {

struct RealizationContext {
  LinkGains gains;
  double min_hop_snr_db = 0.0;
  double direct_var_dl = 0.0;  // BS <-> RUE
  double direct_var_ul = 0.0;  // TUE <-> BS
  DirectPowers direct_powers;
};

RealizationContext axis_context(const SweepSpec& spec, double axis_value) {
  RealizationContext ctx;
  switch (spec.scenario) {
    case SweepScenario::kBalanced:
      ctx.gains = snr_parameterized_gains(axis_value, axis_value);
      ctx.min_hop_snr_db = axis_value;
      ctx.direct_var_dl = ctx.gains.h_b2;
      ctx.direct_var_ul = ctx.gains.h_u2;
      ctx.direct_powers = {1.0, 1.0, 1.0, 1.0};
      break;
    case SweepScenario::kUnbalanced:
      ctx.gains = snr_parameterized_gains(spec.snr_b_db, axis_value);
      ctx.min_hop_snr_db = std::min(spec.snr_b_db, axis_value);
      ctx.direct_var_dl = ctx.gains.h_b2;
      ctx.direct_var_ul = ctx.gains.h_u2;
      ctx.direct_powers = {1.0, 1.0, 1.0, 1.0};
      break;
    case SweepScenario::kCoverageExtension:
    case SweepScenario::kCoverageHole: {
      ScenarioGeometry geom = spec.geometry;
      geom.rs_tue_distance_m = axis_value;
      ctx.gains = coverage_link_gains(geom);
      const double min_gain = std::min(std::min(ctx.gains.h_u2, ctx.gains.h_b2),
                                       std::min(ctx.gains.g_u2, ctx.gains.g_b2));
      ctx.min_hop_snr_db = 10.0 * std::log10(min_gain);
      const DirectLinkVariances dv = coverage_direct_variances(geom);
      ctx.direct_var_dl = dv.bs_rue;
      ctx.direct_var_ul = dv.bs_tue;
      const double bw = geom.bandwidth_hz;
      ctx.direct_powers = {dbm_to_mw(per_hz_power_dbm(geom.bs_power_dbm, bw)),
                           dbm_to_mw(per_hz_power_dbm(geom.ue_power_dbm, bw)),
                           dbm_to_mw(per_hz_power_dbm(geom.rs_power_dbm, bw)), 1.0};
      break;
    }
  }
  return ctx;
}

std::string canonical_description(const SweepSpec& spec) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "scenario=" << static_cast<int>(spec.scenario) << ";axis=";
  for (double a : spec.axis) os << a << ",";
  os << ";snr_b=" << spec.snr_b_db << ";n=" << spec.n_antennas << ";m=" << spec.m_antennas
     << ";schemes=";
  for (Scheme s : spec.schemes) os << scheme_name(s) << ",";
  os << ";realizations=" << spec.realizations << ";seed=" << spec.seed
     << ";wu=" << spec.weight_u << ";wb=" << spec.weight_b
     << ";solver=" << static_cast<int>(spec.solver);
  const ScenarioGeometry& g = spec.geometry;
  os << ";geom=" << g.bs_rs_distance_m << "," << g.rs_rue_distance_m << "," << g.bandwidth_hz
     << "," << g.carrier_ghz << "," << g.thermal_noise_dbm_per_hz << "," << g.noise_figure_db
     << "," << g.bs_power_dbm << "," << g.ue_power_dbm << "," << g.rs_power_dbm;
  for (const PathLossParams& p : g.path_loss) {
    os << ";" << p.ref_loss_db << "," << p.ref_distance_m << "," << p.exponent << ","
       << p.penetration_db;
  }
  return os.str();
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, int threads) {
  spec.validate();
  const std::size_t n_axis = spec.axis.size();
  const std::size_t n_schemes = spec.schemes.size();
  const std::size_t k = static_cast<std::size_t>(spec.realizations);
  const bool wants_direct =
      std::find(spec.schemes.begin(), spec.schemes.end(), Scheme::kDirect) != spec.schemes.end();

  std::vector<RealizationContext> contexts(n_axis);
  for (std::size_t a = 0; a < n_axis; ++a) contexts[a] = axis_context(spec, spec.axis[a]);

  const Weights weights = Weights::uniform(spec.m_antennas, spec.weight_u, spec.weight_b);
  std::vector<double> values(n_axis * n_schemes * k, kNaN);

  auto run_one = [&](std::size_t a, std::size_t r) {
    const RealizationContext& ctx = contexts[a];
    RngStream rng = RngStream::substream(spec.seed, a, r);
    SystemConfig cfg = SystemConfig::make(spec.n_antennas, spec.m_antennas, spec.weight_u,
                                          spec.weight_b);
    const ChannelSet ch = build_channel_set(cfg, ctx.gains, rng);
    ComplexMatrix h_direct, g_direct;
    if (wants_direct) {
      h_direct = sample_rayleigh(spec.m_antennas, spec.m_antennas, ctx.direct_var_dl, rng);
      g_direct = sample_rayleigh(spec.m_antennas, spec.m_antennas, ctx.direct_var_ul, rng);
    }
    for (std::size_t s = 0; s < n_schemes; ++s) {
      try {
        values[(a * n_schemes + s) * k + r] =
            evaluate_scheme(spec.schemes[s], ch, weights, spec.solver, ctx.min_hop_snr_db,
                            wants_direct ? &h_direct : nullptr,
                            wants_direct ? &g_direct : nullptr, ctx.direct_powers);
      } catch (const std::exception&) {
        // failure stays NaN and is reported, never averaged as zero
      }
    }
  };

  const std::size_t total = n_axis * k;
  int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min<int>(n_threads, static_cast<int>(total)));
  if (n_threads == 1) {
    for (std::size_t i = 0; i < total; ++i) run_one(i / k, i % k);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
        run_one(i / k, i % k);
      }
    };
    std::vector<std::thread> pool;
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
  }

  SweepResult result;
  result.axis = spec.axis;
  result.schemes = spec.schemes;
  result.seed = spec.seed;
  result.config_hash = fnv1a(canonical_description(spec));
  result.cells.resize(n_axis * n_schemes);
  for (std::size_t a = 0; a < n_axis; ++a) {
    for (std::size_t s = 0; s < n_schemes; ++s) {
      const double* v = &values[(a * n_schemes + s) * k];
      // Fixed index-order accumulation keeps the mean independent of the
      // worker schedule.
      double sum = 0.0;
      std::size_t good = 0;
      for (std::size_t r = 0; r < k; ++r) {
        if (!std::isnan(v[r])) {
          sum += v[r];
          ++good;
        }
      }
      SweepCell cell;
      cell.realizations = static_cast<int>(good);
      cell.failures = static_cast<int>(k - good);
      if (good > 0) {
        cell.mean_wsr = sum / static_cast<double>(good);
        double ss = 0.0;
        for (std::size_t r = 0; r < k; ++r) {
          if (!std::isnan(v[r])) {
            const double d = v[r] - cell.mean_wsr;
            ss += d * d;
          }
        }
        if (good > 1) {
          cell.std_error = std::sqrt(ss / (static_cast<double>(good) * (good - 1.0)));
        }
      }
      result.cells[a * n_schemes + s] = cell;
    }
  }
  return result;
}

void emit_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("emit_csv: cannot open '" + path + "' for writing");
  out << "axis,scheme,mean_wsr_bps_hz,stderr,realizations,failures,seed\n";
  out << std::setprecision(9);
  for (std::size_t a = 0; a < result.axis.size(); ++a) {
    for (std::size_t s = 0; s < result.schemes.size(); ++s) {
      const SweepCell& cell = result.cell(a, s);
      out << result.axis[a] << ',' << scheme_name(result.schemes[s]) << ',' << cell.mean_wsr
          << ',' << cell.std_error << ',' << cell.realizations << ',' << cell.failures << ','
          << result.seed << '\n';
    }
  }
  if (!out.good()) throw IoError("emit_csv: write to '" + path + "' failed");
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& v, const std::string& context) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw InvalidInput("config: bad boolean for " + context + ": '" + v + "'");
}

double parse_number(const std::string& v, const std::string& context) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw InvalidInput("config: bad number for " + context + ": '" + v + "'");
  }
}

}  // namespace

void apply_config_file(SweepSpec& spec, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open '" + path + "'");

  const std::map<std::string, LinkClass> link_sections = {
      {"bs-rs", LinkClass::kBsRs},
      {"rs-tue", LinkClass::kRsTue},
      {"rs-rue", LinkClass::kRsRue},
      {"bs-ue", LinkClass::kBsUe},
  };

  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);

    if (line.front() == '[') {
      if (line.back() != ']') throw InvalidInput("config: malformed section at " + where);
      section = trim(line.substr(1, line.size() - 2));
      if (section != "power" && section != "noise" && section != "system" &&
          link_sections.find(section) == link_sections.end()) {
        throw InvalidInput("config: unknown section [" + section + "] at " + where);
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidInput("config: expected key = value at " + where);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string context = "[" + section + "] " + key + " at " + where;

    if (auto it = link_sections.find(section); it != link_sections.end()) {
      PathLossParams& p = spec.geometry.path_loss[static_cast<int>(it->second)];
      if (key == "ref_loss_db") {
        p.ref_loss_db = parse_number(value, context);
      } else if (key == "ref_distance_m") {
        p.ref_distance_m = parse_number(value, context);
      } else if (key == "exponent") {
        p.exponent = parse_number(value, context);
      } else if (key == "penetration_db") {
        p.penetration_db = parse_number(value, context);
      } else {
        throw InvalidInput("config: unknown key " + context);
      }
    } else if (section == "power") {
      if (key == "bs_dbm") {
        spec.geometry.bs_power_dbm = parse_number(value, context);
      } else if (key == "ue_dbm") {
        spec.geometry.ue_power_dbm = parse_number(value, context);
      } else if (key == "rs_dbm") {
        spec.geometry.rs_power_dbm = parse_number(value, context);
      } else {
        throw InvalidInput("config: unknown key " + context);
      }
    } else if (section == "noise") {
      if (key == "thermal_dbm_per_hz") {
        spec.geometry.thermal_noise_dbm_per_hz = parse_number(value, context);
      } else if (key == "noise_figure_db") {
        spec.geometry.noise_figure_db = parse_number(value, context);
      } else {
        throw InvalidInput("config: unknown key " + context);
      }
    } else if (section == "system") {
      if (key == "carrier_ghz") {
        spec.geometry.carrier_ghz = parse_number(value, context);
      } else if (key == "bandwidth_hz") {
        spec.geometry.bandwidth_hz = parse_number(value, context);
      } else if (key == "per_hz_normalization") {
        spec.geometry.per_hz_normalization = parse_bool(value, context);
      } else if (key == "bs_rs_distance_m") {
        spec.geometry.bs_rs_distance_m = parse_number(value, context);
      } else if (key == "rs_rue_distance_m") {
        spec.geometry.rs_rue_distance_m = parse_number(value, context);
      } else if (key == "bs_height_m") {
        spec.geometry.bs_height_m = parse_number(value, context);
      } else if (key == "rs_height_m") {
        spec.geometry.rs_height_m = parse_number(value, context);
      } else if (key == "ue_height_m") {
        spec.geometry.ue_height_m = parse_number(value, context);
      } else {
        throw InvalidInput("config: unknown key " + context);
      }
    } else {
      throw InvalidInput("config: key outside any section at " + where);
    }
  }
}

}  // namespace atwr

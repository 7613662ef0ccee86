#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>

#include "svoter/dual.hpp"
#include "svoter/env.hpp"
#include "svoter/errors.hpp"
#include "svoter/graphical.hpp"
#include "svoter/harness.hpp"
#include "svoter/io.hpp"
#include "svoter/limitwalk.hpp"
#include "svoter/parallel.hpp"
#include "svoter/stats.hpp"
#include "svoter/voter.hpp"

namespace svoter::harness {

namespace {

using io::CsvWriter;
using stats::MeanSe;

constexpr double kSe = 4.0;  // Monte Carlo tolerance in standard errors

std::string fmt(double x) { return io::format_shortest(x); }

struct Ctx {
  const ExperimentConfig& cfg;
  unsigned threads;
  Report& report;

  StreamFamily family(const std::string& label) const {
    return {cfg.master_seed, cfg.suite + "/" + label};
  }
  std::filesystem::path path(const std::string& name) const { return cfg.output_dir / name; }
  CsvWriter csv(const std::string& name, std::vector<std::string> header) const {
    report.outputs.push_back(path(name).string());
    return CsvWriter(path(name), std::move(header));
  }
};

// One limit environment per master seed, shared by every walk suite. The
// exponential stream is drawn in order, so a deeper truncation extends a
// shallower one.
env::LimitEnvironment reference_environment(const ExperimentConfig& cfg, double alpha,
                                            std::size_t depth) {
  Stream rng = StreamFamily{cfg.master_seed, "limit-environment"}.at(0);
  return env::sample_limit_environment(alpha, depth, rng);
}

// Finite environment shared by the consensus and martingale suites.
env::Environment voter_environment(const ExperimentConfig& cfg, double alpha, std::size_t n) {
  Stream rng = StreamFamily{cfg.master_seed, "voter-environment/alpha=" + fmt(alpha)}.at(0);
  return env::sample_weights(env::TailLaw::pareto(alpha), n, rng);
}

voter::Kernel kernel_of(const ExperimentConfig& cfg, const std::string& key = "kernel") {
  return cfg.text(key) == "alias" ? voter::Kernel::Alias : voter::Kernel::Active;
}

Metric mc_within(std::string name, int criterion, const MeanSe& est, double target,
                 std::string note = {}) {
  return Metric::make(std::move(name), criterion, est.mean, est.se, false, target, kSe * est.se,
                      Kind::Within, std::move(note));
}

Metric exact_zero(std::string name, int criterion, double count, std::string note = {}) {
  return Metric::make(std::move(name), criterion, count, 0.0, true, 0.0, 0.0, Kind::Within,
                      std::move(note));
}

Metric p_value_metric(std::string name, int criterion, double p, double significance,
                      std::string note = {}) {
  return Metric::make(std::move(name), criterion, p, 0.0, true, significance, 0.0, Kind::AtLeast,
                      std::move(note));
}

limitwalk::SiteSet first_sites(std::size_t n) {
  limitwalk::SiteSet s(n);
  std::iota(s.begin(), s.end(), 0u);
  return s;
}

double l1(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::max(a.size(), b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = i < a.size() ? a[i] : 0.0;
    const double y = i < b.size() ? b[i] : 0.0;
    s += std::fabs(x - y);
  }
  return s;
}

// ---------------------------------------------------------------- duality

void duality_suite(Ctx& c) {
  const auto& cfg = c.cfg;
  const std::size_t n = cfg.count("n");
  const std::size_t trials = cfg.count("trials_per_log");
  Stream erng = c.family("environment").at(0);
  const auto environment = env::sample_weights(env::TailLaw::pareto(cfg.real("alpha")), n, erng);
  const double horizon = environment.a_n * cfg.real("horizon_scale");

  struct LogResult {
    std::uint64_t events = 0, cases = 0, mismatches = 0, ones = 0, monotone = 0, replay = 0;
    std::vector<std::uint64_t> counts;
  };
  const auto fam = c.family("logs");
  const auto results = parallel_map(cfg.replicas, c.threads, [&](std::size_t r) {
    Stream rng = fam.at(r);
    const auto log = graphical::generate_log(environment, horizon, rng);
    LogResult out;
    out.events = log.events.size();
    out.counts = graphical::site_counts(log);
    const auto nn = static_cast<std::uint32_t>(n);
    for (std::size_t j = 0; j < trials; ++j) {
      std::vector<std::uint8_t> bits(n);
      for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_u32() & 1u);
      const voter::OpinionState eta0(std::move(bits));
      const std::size_t k = 1 + rng.uniform_index(3);
      graphical::SiteSet a;
      while (a.size() < k) {
        const auto x = rng.uniform_index(nn);
        if (std::find(a.begin(), a.end(), x) == a.end()) a.push_back(x);
      }
      std::sort(a.begin(), a.end());
      const double t = rng.uniform() * horizon;
      const auto [fwd, bwd] = graphical::duality_indicator_pair(log, eta0, a, t);
      ++out.cases;
      out.mismatches += fwd != bwd;
      out.ones += fwd && bwd;

      graphical::SiteSet b = a;
      b.push_back(rng.uniform_index(nn));
      std::sort(b.begin(), b.end());
      b.erase(std::unique(b.begin(), b.end()), b.end());
      const auto da = graphical::backward_dual(log, a, t);
      const auto db = graphical::backward_dual(log, b, t);
      out.monotone += !std::includes(db.begin(), db.end(), da.begin(), da.end());

      const double s = rng.uniform() * t;
      voter::OpinionState mid = eta0;
      graphical::apply_events(log, mid, 0.0, s);
      graphical::apply_events(log, mid, s, t);
      out.replay += !(mid == graphical::forward_voter_at(log, eta0, t));
    }
    return out;
  });

  auto csv = c.csv("duality.csv", {"replica_id", "events", "cases", "mismatches", "indicator_ones", "seed"});
  std::uint64_t cases = 0, mismatches = 0, ones = 0, monotone = 0, replay = 0;
  std::vector<double> observed(n, 0.0);
  for (std::size_t r = 0; r < results.size(); ++r) {
    const auto& x = results[r];
    csv.row({std::uint64_t{r}, x.events, x.cases, x.mismatches, x.ones, fam.provenance(r)});
    cases += x.cases;
    mismatches += x.mismatches;
    ones += x.ones;
    monotone += x.monotone;
    replay += x.replay;
    for (std::size_t s = 0; s < n; ++s) observed[s] += static_cast<double>(x.counts[s]);
  }
  // Per-site event counts, conditioned on their total, are multinomial with
  // cell probabilities (1/w_x) / R.
  const auto rates = environment.rates();
  const double total_rate = stats::pairwise_sum(rates);
  const double total = stats::pairwise_sum(observed);
  std::vector<double> expected(n);
  for (std::size_t s = 0; s < n; ++s) expected[s] = total * rates[s] / total_rate;
  const auto chi = stats::chi_square(observed, expected);

  c.report.add(exact_zero("duality_mismatches", 1, static_cast<double>(mismatches),
                          std::to_string(cases) + " cases"));
  c.report.add(Metric::make("duality_indicator_one_fraction", 0,
                            static_cast<double>(ones) / static_cast<double>(cases),
                            stats::binomial(ones, cases).se, false, 0.0, 0.0, Kind::Diagnostic));
  c.report.add(exact_zero("dual_monotonicity_violations", 0, static_cast<double>(monotone)));
  c.report.add(exact_zero("prefix_replay_violations", 0, static_cast<double>(replay)));
  c.report.add(p_value_metric("site_count_chi_square_p", 0, chi.p_value, 0.01));
}


// ---------------------------------------------------------------- consensus

voter::OpinionState heaviest_site_indicator(const env::Environment& environment) {
  std::vector<std::uint8_t> bits(environment.n, 0);
  bits[0] = 1;  // weights are sorted descending
  return voter::OpinionState(std::move(bits), environment);
}

void consensus_suite(Ctx& c) {
  const auto& cfg = c.cfg;
  const std::size_t n = cfg.count("n");
  const auto kernel = kernel_of(cfg, "kernel");
  auto csv = c.csv("consensus.csv", {"alpha", "replica_id", "outcome", "tau", "events", "seed"});
  for (double alpha : cfg.reals("alphas")) {
    const auto environment = voter_environment(cfg, alpha, n);
    const auto eta0 = heaviest_site_indicator(environment);
    const auto fam = c.family("alpha=" + fmt(alpha));
    const auto started = std::chrono::steady_clock::now();
    const auto est = voter::estimate_consensus_probability(environment, eta0, cfg.replicas, fam,
                                                           c.threads, kernel);
    const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - started;
    c.report.add(Metric::make("estimate_seconds[alpha=" + fmt(alpha) + "]", 0, spent.count(), 0.0, true,
                              0.0, 0.0, Kind::Diagnostic, "wall clock of the Monte Carlo estimate"));
    for (std::size_t r = 0; r < est.per_replica.size(); ++r) {
      const auto& o = est.per_replica[r];
      csv.row({alpha, std::uint64_t{r}, std::int64_t{o.absorbed ? o.result.outcome : -1},
               o.result.tau, o.result.events_used, fam.provenance(r)});
    }
    const double formula = voter::consensus_probability_formula(environment, eta0);
    c.report.add(mc_within("consensus_probability[alpha=" + fmt(alpha) + "]", 2,
                           {est.estimate, est.std_error, 0.0, est.replicas}, formula,
                           std::to_string(est.failures) + " non-absorbed replicas"));

    // Replaying a replica's stream from the flipped start must flip the outcome.
    const std::size_t sym = std::min<std::uint64_t>(cfg.count("symmetry_replicas"), cfg.replicas);
    const voter::Simulator sim(environment, kernel);
    const auto flipped = eta0.flipped();
    const auto broken = parallel_map(sym, c.threads, [&](std::size_t r) -> std::uint8_t {
      Stream rng = fam.at(r);
      const auto& o = est.per_replica[r];
      if (!o.absorbed) return 0;
      const auto res = sim.to_consensus(flipped, rng);
      return res.outcome + o.result.outcome != 1 || res.tau != o.result.tau;
    });
    c.report.add(exact_zero("bit_flip_symmetry_violations[alpha=" + fmt(alpha) + "]", 0,
                            static_cast<double>(std::accumulate(broken.begin(), broken.end(), 0u))));
  }

  // Boundedness of tau / a_N on coupled environments.
  const double alpha = cfg.real("ladder_alpha");
  const auto ladder = cfg.counts("ladder_n");
  const std::size_t nmax = *std::max_element(ladder.begin(), ladder.end());
  Stream chi_rng = c.family("ladder-environment").at(0);
  const auto chi = env::draw_chi(nmax + 1, chi_rng);
  auto lcsv = c.csv("consensus_ladder.csv", {"n", "replica_id", "tau_over_a_n", "events", "seed"});
  std::vector<MeanSe> ratios;
  for (std::size_t nn : ladder) {
    const auto environment = env::coupled_environment(env::TailLaw::pareto(alpha), nn, chi);
    const voter::Simulator sim(environment, kernel_of(cfg, "ladder_kernel"));
    const auto fam = c.family("ladder/n=" + std::to_string(nn));
    const auto res = parallel_map(cfg.count("ladder_replicas"), c.threads, [&](std::size_t r) {
      Stream rng = fam.at(r);
      std::vector<std::uint8_t> bits(nn);
      for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_u32() & 1u);
      return sim.to_consensus(voter::OpinionState(std::move(bits)), rng);
    });
    std::vector<double> x(res.size());
    for (std::size_t r = 0; r < res.size(); ++r) {
      x[r] = res[r].tau / environment.a_n;
      lcsv.row({std::uint64_t{nn}, std::uint64_t{r}, x[r], res[r].events_used, fam.provenance(r)});
    }
    ratios.push_back(stats::mean_se(x));
    c.report.add(Metric::make("mean_tau_over_a_n[n=" + std::to_string(nn) + "]", 0, ratios.back().mean,
                              ratios.back().se, false, 0.0, 0.0, Kind::Diagnostic));
    // The coupled weights are w_i / a_N = xi_i (Gamma_{N+1} / N)^{1/alpha}; dividing
    // out that random scale isolates the N dependence of the dynamics.
    const double gamma = stats::pairwise_sum(std::span(chi).first(nn + 1));
    const double scale = std::pow(gamma / static_cast<double>(nn), 1.0 / alpha);
    c.report.add(Metric::make("mean_tau_over_realized_scale[n=" + std::to_string(nn) + "]", 0,
                              ratios.back().mean / scale, ratios.back().se / scale, false, 0.0, 0.0,
                              Kind::Diagnostic, "scale factor " + fmt(scale)));
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    for (std::size_t j = i + 1; j < ratios.size(); ++j) {
      const double se = std::hypot(ratios[i].se, ratios[j].se);
      worst = std::max(worst, stats::z_score(ratios[j].mean, ratios[i].mean, se));
    }
  }
  c.report.add(Metric::make("consensus_time_upward_trend_z", 4, worst, 1.0, false, kSe, 0.0,
                            Kind::AtMost, "largest standardized increase over ladder pairs"));
}

// ---------------------------------------------------------------- martingale

void martingale_suite(Ctx& c) {
  const auto& cfg = c.cfg;
  const std::size_t n = cfg.count("n");
  const auto kernel = kernel_of(cfg);
  auto csv = c.csv("martingale.csv", {"alpha", "replica_id", "weighted_fraction", "ones", "seed"});
  for (double alpha : cfg.reals("alphas")) {
    const auto environment = voter_environment(cfg, alpha, n);
    const auto eta0 = heaviest_site_indicator(environment);
    const double t = environment.a_n * cfg.real("time_fraction");
    const voter::Simulator sim(environment, kernel);
    const auto fam = c.family("alpha=" + fmt(alpha));
    const auto states = parallel_map(cfg.replicas, c.threads, [&](std::size_t r) {
      Stream rng = fam.at(r);
      const auto s = sim.run_for(eta0, t, rng);
      return std::pair{voter::weighted_fraction(s, environment), s.ones()};
    });
    std::vector<double> x(states.size());
    for (std::size_t r = 0; r < states.size(); ++r) {
      x[r] = states[r].first;
      csv.row({alpha, std::uint64_t{r}, x[r], std::uint64_t{states[r].second}, fam.provenance(r)});
    }
    c.report.add(mc_within("weighted_fraction_mean[alpha=" + fmt(alpha) + "]", 3, stats::mean_se(x),
                           voter::weighted_fraction(eta0, environment)));
  }
}

// ---------------------------------------------------------------- extremes

void extremes_suite(Ctx& c) {
  const auto& cfg = c.cfg;
  const std::size_t n = cfg.count("n");
  const double alpha = cfg.real("alpha");
  const double significance = cfg.real("significance");
  auto csv = c.csv("extremes.csv", {"family", "replica_id", "rescaled_maximum", "seed"});
  for (const auto& law : {env::TailLaw::pareto(alpha), env::TailLaw::log_perturbed(alpha, cfg.real("beta"))}) {
    const std::string name = law.family_name();
    const double a_n = env::scale_constant(law, n);
    const auto fam = c.family(name);
    const auto maxima = parallel_map(cfg.replicas, c.threads, [&](std::size_t r) {
      Stream rng = fam.at(r);
      return env::sample_maximum(law, n, rng) / a_n;
    });
    for (std::size_t r = 0; r < maxima.size(); ++r) {
      csv.row({name, std::uint64_t{r}, maxima[r], fam.provenance(r)});
    }
    const auto ks = stats::ks_test(maxima, [&](double x) { return env::frechet_cdf(x, alpha); });
    c.report.add(p_value_metric("frechet_ks_p[" + name + "]", 5, ks.p_value, significance,
                                "D = " + fmt(ks.statistic)));
    const auto ks_exact = stats::ks_test(
        maxima, [&](double x) { return env::rescaled_maximum_cdf(law, n, a_n, x); });
    c.report.add(p_value_metric("finite_n_ks_p[" + name + "]", 0, ks_exact.p_value, significance));
    // Deterministic distance between the exact finite-N law and the limit.
    double bias = 0.0;
    for (int k = -4000; k <= 4000; ++k) {
      const double x = std::pow(10.0, k / 1000.0);
      bias = std::max(bias, std::fabs(env::rescaled_maximum_cdf(law, n, a_n, x) - env::frechet_cdf(x, alpha)));
    }
    c.report.add(Metric::make("finite_n_bias_sup[" + name + "]", 0, bias, 0.0, true,
                              stats::ks_critical(cfg.replicas, significance), 0.0, Kind::Diagnostic,
                              "target column holds the KS critical distance"));
  }
}

// ---------------------------------------------------------------- excursion

// Simulates from a fresh copy of `fam.at(0)` with a growing horizon until
// `enough` holds. The stream is consumed in path order, so a longer horizon
// only extends the earlier path.
template <class Enough>
limitwalk::WalkPath grow_path(std::span<const double> means, std::uint32_t start, double horizon,
                              const StreamFamily& fam, Enough&& enough) {
  for (;;) {
    Stream rng = fam.at(0);
    auto path = limitwalk::simulate_walk(means, start, horizon, rng);
    if (enough(path)) return path;
    horizon *= 1.5;
  }
}

void excursion_suite(Ctx& c) {
  const auto& cfg = c.cfg;
  const double alpha = cfg.real("alpha");
  const std::size_t m = cfg.count("m"), decay_m = cfg.count("decay_m");
  const auto decay_n = cfg.counts("decay_n");
  const auto xi = reference_environment(cfg, alpha, std::max({cfg.count("depth"), m, decay_m}));
  auto csv = c.csv("excursion.csv", {"experiment", "kind", "length"});

  // Incursions into A = [a_size] of the walk on [m]. The walk starts in A;
  // the first incursion starts at a fixed site rather than at a uniform
  // entrance, so it is dropped.
  const std::size_t a_size = cfg.count("a_size");
  const auto a = first_sites(a_size);
  const auto head = xi.head(m);
  const std::size_t target = cfg.replicas;
  const double inc_mean = limitwalk::incursion_mean_formula(head, a, m);
  const double cycle = inc_mean + limitwalk::excursion_mean_formula(head, a_size, m);
  limitwalk::ExcursionStats st;
  grow_path(head, 0, 1.2 * cycle * static_cast<double>(target + 10), c.family("incursions"),
            [&](const limitwalk::WalkPath& p) {
              st = limitwalk::excursion_stats(p, a);
              return st.complete_incursions().size() >= target + 1;
            });
  auto inc = st.complete_incursions();
  inc.erase(inc.begin());
  inc.resize(target);
  const std::string exp_a = "incursion m=" + std::to_string(m) + " |A|=" + std::to_string(a_size);
  csv.row({exp_a, std::string("T0"), *st.first_hit});
  for (double v : inc) csv.row({exp_a, std::string("I"), v});
  c.report.add(mc_within("incursion_mean", 6, stats::mean_se(inc), inc_mean));
  for (double lambda : cfg.reals("lambdas")) {
    std::vector<double> e(inc.size());
    for (std::size_t i = 0; i < inc.size(); ++i) e[i] = std::exp(-lambda * inc[i]);
    c.report.add(mc_within("incursion_laplace[lambda=" + fmt(lambda) + "]", 6, stats::mean_se(e),
                           limitwalk::incursion_laplace(head, a, m, lambda)));
  }

  // Excursion decay outside [N] for the walk on [decay_m], one path for all N.
  const auto dhead = xi.head(decay_m);
  const std::size_t per_n = cfg.count("decay_excursions");
  double horizon = 0.0;
  for (std::size_t nn : decay_n) {
    const double cyc = limitwalk::incursion_mean_formula(dhead, first_sites(nn), decay_m) +
                       limitwalk::excursion_mean_formula(dhead, nn, decay_m);
    horizon = std::max(horizon, 1.2 * cyc * static_cast<double>(per_n + 10));
  }
  std::map<std::size_t, std::vector<double>> excursions;
  grow_path(dhead, 0, horizon, c.family("decay"), [&](const limitwalk::WalkPath& p) {
    for (std::size_t nn : decay_n) {
      auto ex = limitwalk::excursion_stats(p, first_sites(nn)).complete_excursions();
      if (ex.size() < per_n) return false;
      ex.resize(per_n);
      excursions[nn] = std::move(ex);
    }
    return true;
  });
  std::vector<double> lx, ly, lse;
  for (std::size_t nn : decay_n) {
    const auto& ex = excursions[nn];
    const std::string label = "excursion m=" + std::to_string(decay_m) + " N=" + std::to_string(nn);
    for (double v : ex) csv.row({label, std::string("E"), v});
    const auto est = stats::mean_se(ex);
    c.report.add(mc_within("excursion_mean[N=" + std::to_string(nn) + "]", 0, est,
                           limitwalk::excursion_mean_formula(dhead, nn, decay_m)));
    lx.push_back(std::log(static_cast<double>(nn)));
    ly.push_back(std::log(est.mean));
    lse.push_back(est.se / est.mean);
  }
  const auto fit = stats::linear_fit(lx, ly, lse);
  c.report.add(Metric::make("excursion_decay_slope", 7, fit.slope, fit.slope_se, false, -1.0 / alpha,
                            0.3, Kind::Within,
                            "95% CI [" + fmt(fit.ci_low) + ", " + fmt(fit.ci_high) + "]"));
}

// ---------------------------------------------------------------- stationary

void stationary_suite(Ctx& c) {
  const auto& cfg = c.cfg;
  const double alpha = cfg.real("alpha");
  const std::size_t m = cfg.count("m"), n = cfg.count("n");
  const std::size_t occ_n = cfg.count("occupation_n"), out_m = cfg.count("outside_m");
  const auto xi = reference_environment(cfg, alpha, std::max({cfg.count("depth"), m, occ_n, out_m}));
  const double significance = cfg.real("significance");
  const std::size_t target = cfg.replicas;

  // Trace of the walk on [m] on A = [n].
  const auto head = xi.head(m);
  const auto a = first_sites(n);
  const double per_jump = limitwalk::incursion_mean_formula(head, a, m) * (m - n) / m +
                          limitwalk::excursion_mean_formula(head, n, m) * (m - n) / m;
  limitwalk::WalkPath tr;
  grow_path(head, 0, 1.2 * per_jump * static_cast<double>(target + 10), c.family("trace"),
            [&](const limitwalk::WalkPath& p) {
              tr = limitwalk::trace(p, a);
              return tr.jump_count() >= target;
            });
  std::vector<double> observed(n, 0.0), expected(n, static_cast<double>(target) / n);
  std::vector<double> holding(target);
  auto csv = c.csv("stationary.csv", {"jump", "from", "to", "holding_time", "normalized_holding"});
  for (std::size_t k = 0; k < target; ++k) {
    const auto from = tr.sites[k], to = tr.sites[k + 1];
    const double h = tr.times[k + 1] - tr.times[k];
    observed[to] += 1.0;
    holding[k] = h / xi.xi[from];
    csv.row({std::uint64_t{k}, std::uint64_t{from}, std::uint64_t{to}, h, holding[k]});
  }
  const auto chi = stats::chi_square(observed, expected);
  c.report.add(p_value_metric("trace_jump_chain_chi_square_p", 8, chi.p_value, significance));
  const auto ks = stats::ks_test(holding, [](double x) { return x > 0 ? -std::expm1(-x) : 0.0; });
  c.report.add(p_value_metric("trace_holding_ks_p", 8, ks.p_value, significance));

  // Occupation fractions against mu, by batch means.
  {
    const auto ohead = xi.head(occ_n);
    const double horizon = cfg.real("occupation_horizon");
    const std::size_t batches = cfg.count("occupation_batches");
    Stream rng = c.family("occupation").at(0);
    const auto path = limitwalk::simulate_walk(ohead, 0, horizon, rng);
    const double len = horizon / static_cast<double>(batches);
    std::vector<std::vector<double>> frac(occ_n, std::vector<double>(batches, 0.0));
    for (std::size_t k = 0; k < path.sites.size(); ++k) {
      double lo = path.times[k];
      const double hi = k + 1 < path.times.size() ? path.times[k + 1] : horizon;
      while (lo < hi) {
        const auto b = std::min<std::size_t>(static_cast<std::size_t>(lo / len), batches - 1);
        const double end = std::min(hi, b + 1 == batches ? horizon : (b + 1) * len);
        frac[path.sites[k]][b] += (end - lo) / len;
        lo = end;
      }
    }
    const auto mu = limitwalk::stationary_distribution(ohead);
    double worst = 0.0;
    for (std::size_t x = 0; x < occ_n; ++x) {
      const auto est = stats::mean_se(frac[x]);
      worst = std::max(worst, std::fabs(stats::z_score(est.mean, mu[x], est.se)));
    }
    c.report.add(Metric::make("occupation_max_abs_z", 0, worst, 1.0, false, kSe, 0.0, Kind::AtMost,
                              "batch means over " + std::to_string(batches) + " batches"));
  }

  // Time spent outside [N] before the trace on [N] has run for t.
  {
    const auto mhead = xi.head(out_m);
    const double t = cfg.real("outside_t");
    std::vector<double> means;
    for (std::size_t nn : cfg.counts("outside_n")) {
      const auto fam = c.family("outside/n=" + std::to_string(nn));
      const double guess = 2.0 * (t + limitwalk::time_outside_expectation(mhead, nn, out_m, 0, t)) + 1.0;
      const auto vals = parallel_map(cfg.count("outside_replicas"), c.threads, [&](std::size_t r) {
        double horizon = guess;
        for (;;) {
          Stream rng = fam.at(r);
          const auto path = limitwalk::simulate_walk(mhead, 0, horizon, rng);
          if (const auto phi = limitwalk::trace_inverse_time(path, nn, t)) return *phi - t;
          horizon *= 2.0;
        }
      });
      const auto est = stats::mean_se(vals);
      c.report.add(mc_within("time_outside_mean[N=" + std::to_string(nn) + "]", 0, est,
                             limitwalk::time_outside_expectation(mhead, nn, out_m, 0, t)));
      means.push_back(est.mean);
    }
    double rises = 0.0;
    for (std::size_t i = 1; i < means.size(); ++i) rises += means[i] >= means[i - 1];
    c.report.add(exact_zero("time_outside_non_decreasing_steps", 0, rises));
  }
}

// ---------------------------------------------------------------- coupling

void coupling_suite(Ctx& c) {
  const auto& cfg = c.cfg;
  const std::size_t n = cfg.count("n"), meet_n = cfg.count("meeting_n");
  const auto xi = reference_environment(cfg, cfg.real("alpha"), std::max({cfg.count("depth"), n, meet_n}));
  const auto head = xi.head(n);
  const double xi1 = xi.xi[0];
  const std::uint64_t reps = cfg.replicas;

  auto csv = c.csv("coupling.csv", {"t", "start", "site", "estimate", "exact", "null_se", "z"});
  auto mcsv = c.csv("coupling_matrix.csv", {"t", "row", "col", "value"});
  for (double t : cfg.reals("t_values")) {
    const auto p = limitwalk::semigroup_matrix(head, t);
    double worst = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      const auto est = limitwalk::marginal_estimate(
          head, static_cast<std::int64_t>(x), t, reps,
          c.family("marginal/t=" + fmt(t) + "/x=" + std::to_string(x)), c.threads);
      for (std::size_t y = 0; y < n; ++y) {
        // Standard error under the exact law, so empty cells are not free passes.
        const double se = std::sqrt(p(x, y) * (1.0 - p(x, y)) / static_cast<double>(reps));
        const double z = stats::z_score(est.p[y], p(x, y), se);
        worst = std::max(worst, std::fabs(z));
        csv.row({t, std::uint64_t{x}, std::uint64_t{y}, est.p[y], p(x, y), se, z});
        mcsv.row({t, std::uint64_t{x}, std::uint64_t{y}, p(x, y)});
      }
    }
    c.report.add(Metric::make("marginal_max_abs_z[t=" + fmt(t) + "]", 9, worst, 1.0, false, kSe, 0.0,
                              Kind::AtMost, std::to_string(n * n) + " entries"));
  }

  {
    Stream rng = c.family("adjoint").at(0);
    const auto ts = cfg.reals("t_values");
    double worst = 0.0;
    for (std::size_t k = 0; k < cfg.count("adjoint_trials"); ++k) {
      std::vector<double> f(n), g(n);
      for (auto& v : f) v = 2.0 * rng.uniform() - 1.0;
      for (auto& v : g) v = 2.0 * rng.uniform() - 1.0;
      worst = std::max(worst, limitwalk::self_adjointness_check(xi, n, ts[k % ts.size()], f, g));
    }
    c.report.add(Metric::make("self_adjointness_max", 9, worst, 0.0, true, 1e-10, 0.0, Kind::AtMost));
  }

  const std::size_t points = cfg.count("tv_points");
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k) grid[k] = 5.0 * xi1 * (k + 1) / static_cast<double>(points);
  {
    double worst = -1.0;
    for (double t : grid) {
      for (std::uint32_t x = 0; x < n; ++x) {
        for (std::uint32_t y = x + 1; y < n; ++y) {
          const auto tv = limitwalk::coupled_pair_tv(xi, n, x, y, t);
          worst = std::max(worst, tv.exact_tv - tv.bound);
        }
      }
    }
    c.report.add(Metric::make("coupling_tv_minus_bound_max", 9, worst, 0.0, true, 0.0, 1e-12,
                              Kind::AtMost, "all pairs, " + std::to_string(points) + " grid times"));
  }
  {
    const auto mu = limitwalk::stationary_distribution(head);
    double worst = -1.0;
    for (double t : grid) {
      const auto r = limitwalk::entrance_law_exact(head, t);
      worst = std::max(worst, 0.5 * l1(r, mu) - std::exp(-t / xi1));
    }
    c.report.add(Metric::make("entrance_tv_to_mu_minus_bound_max", 0, worst, 0.0, true, 0.0, 1e-12,
                              Kind::AtMost));
  }
  {
    const double gap = limitwalk::spectral_gap(head);
    c.report.add(Metric::make("spectral_gap_times_xi1", 0, gap * xi1, 0.0, true, 1.0, 0.0,
                              Kind::Diagnostic, gap * xi1 >= 1.0 - 1e-10 ? "gap >= 1/xi_1"
                                                                         : "gap below 1/xi_1"));
  }
  {
    const auto mhead = xi.head(meet_n);
    limitwalk::SiteSet a;
    for (std::size_t z = meet_n / 2; z < meet_n; ++z) a.push_back(static_cast<std::uint32_t>(z));
    const double T = cfg.real("meeting_T");
    const auto est = limitwalk::meeting_probability_estimate(mhead, 0, 1, a, T, cfg.count("meeting_replicas"),
                                                             c.family("meeting"), c.threads);
    const double bound = limitwalk::meeting_probability_bound(mhead, 0, 1, a, T);
    c.report.add(Metric::make("meeting_probability_vs_upper_bound", 0, est.p, est.se, false, bound,
                              kSe * est.se, Kind::AtMost));
    double worst = -1.0, printed = 0.0;
    for (double t : grid) {
      worst = std::max(worst, limitwalk::meeting_probability_lower_bound(head, t) -
                                  limitwalk::meeting_probability_exact(head, 0, 1, t));
      printed = std::max(printed, limitwalk::meeting_probability_lower_bound(head, t, true));
    }
    c.report.add(Metric::make("meeting_lower_bound_minus_exact_max", 0, worst, 0.0, true, 0.0, 1e-12,
                              Kind::AtMost));
    c.report.add(Metric::make("meeting_lower_bound_as_printed_max", 0, printed, 0.0, true, 0.0, 0.0,
                              Kind::Diagnostic, "printed exponent sign leaves the set empty"));
  }
}

// ---------------------------------------------------------------- entrance

void entrance_suite(Ctx& c) {
  const auto& cfg = c.cfg;
  const double alpha = cfg.real("alpha");
  const std::size_t ms = cfg.count("m_small"), ml = cfg.count("m_large");
  const auto xi = reference_environment(cfg, alpha, std::max({cfg.count("depth"), ms, ml}));
  const std::uint64_t reps = cfg.replicas;
  const double C = limitwalk::kEntranceTailConstant;

  std::map<std::pair<std::size_t, double>, limitwalk::MarginalEstimate> cache;
  auto q = [&](std::size_t m, double t) -> const limitwalk::MarginalEstimate& {
    auto it = cache.find({m, t});
    if (it == cache.end()) {
      it = cache.emplace(std::pair{m, t},
                         limitwalk::entrance_law_estimate(
                             xi, m, t, reps, c.family("m=" + std::to_string(m) + "/t=" + fmt(t)), c.threads))
               .first;
    }
    return it->second;
  };

  for (double t : cfg.reals("t_values")) {
    const auto& a = q(ms, t);
    const auto& b = q(ml, t);
    double comb = 0.0;
    for (std::size_t y = 0; y < ml; ++y) {
      const double sa = y < ms ? a.se[y] : 0.0;
      comb += std::hypot(sa, b.se[y]);
    }
    const double tail = 2.0 * C * t * std::pow(static_cast<double>(ms), 1.0 - 1.0 / alpha);
    c.report.add(Metric::make("truncation_l1[t=" + fmt(t) + "]", 10, l1(a.p, b.p), comb, false,
                              kSe * comb + tail, 0.0, Kind::AtMost,
                              "target = 4 * combined se + 2 C t m^(1-1/alpha)"));
  }

  const auto pairs = cfg.reals("semigroup_pairs");
  for (std::size_t i = 0; i + 1 < pairs.size(); i += 2) {
    const double t = pairs[i], s = pairs[i + 1];
    const auto& qt = q(ms, t);
    const auto& qts = q(ms, t + s);
    const auto p = limitwalk::semigroup_matrix(xi, ms, s);
    double dist = 0.0, comb = 0.0;
    for (std::size_t y = 0; y < ms; ++y) {
      double v = 0.0, v2 = 0.0;
      for (std::size_t x = 0; x < ms; ++x) {
        v += qt.p[x] * p(x, y);
        v2 += qt.p[x] * p(x, y) * p(x, y);
      }
      const double var = std::max(0.0, v2 - v * v) / static_cast<double>(reps);
      dist += std::fabs(v - qts.p[y]);
      comb += std::sqrt(var + qts.se[y] * qts.se[y]);
    }
    c.report.add(Metric::make("entrance_semigroup_l1[t=" + fmt(t) + ",s=" + fmt(s) + "]", 10, dist, comb,
                              false, kSe * comb, 0.0, Kind::AtMost));
  }

  auto csv = c.csv("entrance.csv", {"m", "t", "site", "estimate", "se"});
  for (const auto& [key, est] : cache) {
    for (std::size_t y = 0; y < est.p.size(); ++y) {
      csv.row({std::uint64_t{key.first}, key.second, std::uint64_t{y}, est.p[y], est.se[y]});
    }
  }

  for (double t : cfg.reals("tail_t")) {
    const auto& est = q(ml, t);
    for (std::size_t nn : cfg.counts("tail_n")) {
      double tail = 0.0;
      for (std::size_t y = nn; y < ml; ++y) tail += est.p[y];
      const double se = std::sqrt(tail * (1.0 - tail) / static_cast<double>(reps));
      const double bound = C * t * std::pow(static_cast<double>(nn), 1.0 - 1.0 / alpha);
      c.report.add(Metric::make("entrance_tail[t=" + fmt(t) + ",N=" + std::to_string(nn) + "]", 0, tail, se,
                                false, bound, kSe * se, Kind::AtMost));
    }
  }

  {
    const std::size_t n = cfg.count("decomposition_n");
    const auto head = xi.head(n);
    const double t = cfg.real("decomposition_t");
    const std::uint64_t r = cfg.count("decomposition_replicas");
    const auto direct = limitwalk::marginal_estimate(head, 0, t, r, c.family("decomposition/direct"), c.threads);
    const auto assembled = limitwalk::decomposed_marginal(
        head, 0, t,
        [&](double s) {
          return limitwalk::marginal_estimate(head, -1, s, r, c.family("decomposition/s=" + fmt(s)), c.threads);
        },
        static_cast<int>(cfg.count("decomposition_nodes")));
    double worst = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      const double se = std::hypot(direct.se[y], assembled.se[y]);
      worst = std::max(worst, std::fabs(stats::z_score(direct.p[y], assembled.p[y], se)));
    }
    c.report.add(Metric::make("semigroup_decomposition_max_abs_z", 0, worst, 1.0, false, kSe, 0.0, Kind::AtMost));
  }
}

// ---------------------------------------------------------------- coalescence

void coalescence_suite(Ctx& c) {
  const auto& cfg = c.cfg;
  const double alpha = cfg.real("alpha");
  const auto mlist = cfg.counts("m_list");
  const auto truncs = cfg.counts("n_trunc");
  const std::size_t cm = cfg.count("chernoff_m"), cn = cfg.count("chernoff_n_trunc");
  std::size_t depth = std::max(cfg.count("depth"), cn);
  for (auto v : truncs) depth = std::max<std::size_t>(depth, v);
  const auto xi = reference_environment(cfg, alpha, depth);

  auto csv = c.csv("coalescence-scaling.csv", {"n_trunc", "m", "replica_id", "tau", "seed"});
  std::map<std::pair<std::size_t, std::size_t>, MeanSe> means;
  for (std::size_t nt : truncs) {
    for (std::size_t m : mlist) {
      const auto fam = c.family("n=" + std::to_string(nt) + "/m=" + std::to_string(m));
      const auto taus = parallel_map(cfg.replicas, c.threads, [&](std::size_t r) {
        Stream rng = fam.at(r);
        return dual::coalescence_time_sample(xi, nt, m, rng).tau;
      });
      for (std::size_t r = 0; r < taus.size(); ++r) {
        csv.row({std::uint64_t{nt}, std::uint64_t{m}, std::uint64_t{r}, taus[r], fam.provenance(r)});
      }
      means[{nt, m}] = stats::mean_se(taus);
    }
  }
  {
    std::vector<double> lx, ly, lse;
    for (std::size_t m : mlist) {
      const auto& e = means[{truncs.front(), m}];
      lx.push_back(std::log(static_cast<double>(m)));
      ly.push_back(std::log(e.mean));
      lse.push_back(e.se / e.mean);
    }
    const auto fit = stats::linear_fit(lx, ly, lse);
    c.report.add(Metric::make("coalescence_time_slope[n_trunc=" + std::to_string(truncs.front()) + "]", 11,
                              fit.slope, fit.slope_se, false, -1.0 / alpha, 0.3, Kind::Within,
                              "95% CI [" + fmt(fit.ci_low) + ", " + fmt(fit.ci_high) + "]"));
  }
  for (std::size_t i = 1; i < truncs.size(); ++i) {
    for (std::size_t m : mlist) {
      const auto& a = means[{truncs[0], m}];
      const auto& b = means[{truncs[i], m}];
      const double m2 = static_cast<double>(m * m);
      const double se = m2 * std::hypot(a.se, b.se);
      c.report.add(Metric::make("scaled_coalescence_time_difference[m=" + std::to_string(m) + ",n_trunc=" +
                                    std::to_string(truncs[0]) + "vs" + std::to_string(truncs[i]) + "]",
                                11, m2 * (a.mean - b.mean), se, false, 0.0, kSe * se, Kind::Within));
    }
  }

  // Lower-bound walk: J'_t against J_t conditioned on no coalescence by t.
  const std::size_t points = cfg.count("chernoff_points");
  const std::uint64_t reps = cfg.count("chernoff_replicas");
  const double scale = 1.0 / static_cast<double>(cm * cm);
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k) grid[k] = scale * (k + 1) / static_cast<double>(points);
  const double horizon = grid.back();
  struct Pair {
    std::vector<std::int64_t> j;  // -1 once coalesced
    std::vector<std::uint64_t> jp;
  };
  const auto fj = c.family("jumps/system"), fp = c.family("jumps/lower");
  const auto runs = parallel_map(reps, c.threads, [&](std::size_t r) {
    Pair out;
    Stream r1 = fj.at(r), r2 = fp.at(r);
    bool coalesced = false;
    const auto path = dual::coalescing_jump_counts(xi, cn, cm, horizon, r1, coalesced);
    const auto lower = dual::lower_bound_jump_process(xi, cn, cm, horizon, r2);
    const double merge = coalesced ? path.times.back() : std::numeric_limits<double>::infinity();
    for (double t : grid) {
      out.j.push_back(t < merge ? static_cast<std::int64_t>(path.count_at(t)) : -1);
      out.jp.push_back(lower.count_at(t));
    }
    return out;
  });
  auto jcsv = c.csv("coalescence_jumps.csv", {"t", "replica_id", "system_jumps", "lower_bound_jumps"});
  double worst_dom = -std::numeric_limits<double>::infinity(), worst_dom_se = 0.0;
  double worst_ch = -std::numeric_limits<double>::infinity(), worst_ch_se = 0.0;
  for (std::size_t g = 0; g < points; ++g) {
    std::vector<double> j, jp;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      jcsv.row({grid[g], std::uint64_t{r}, runs[r].j[g], runs[r].jp[g]});
      if (runs[r].j[g] >= 0) j.push_back(static_cast<double>(runs[r].j[g]));
      jp.push_back(static_cast<double>(runs[r].jp[g]));
    }
    std::sort(j.begin(), j.end());
    std::sort(jp.begin(), jp.end());
    if (!j.empty()) {
      std::vector<double> ks = j;
      ks.insert(ks.end(), jp.begin(), jp.end());
      std::sort(ks.begin(), ks.end());
      ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
      for (double k : ks) {
        const auto cj = static_cast<std::uint64_t>(std::upper_bound(j.begin(), j.end(), k) - j.begin());
        const auto cp = static_cast<std::uint64_t>(std::upper_bound(jp.begin(), jp.end(), k) - jp.begin());
        if (cj == j.size() && cp == jp.size()) continue;  // both CDFs at 1
        const auto a = stats::binomial(cj, j.size()), b = stats::binomial(cp, jp.size());
        const double se = std::hypot(a.se, b.se);
        const double margin = a.mean - b.mean - kSe * se;
        if (margin > worst_dom) {
          worst_dom = margin;
          worst_dom_se = se;
        }
      }
    }
    const double thr = dual::chernoff_threshold(xi, cn, cm, grid[g]);
    const auto below = static_cast<std::uint64_t>(std::lower_bound(jp.begin(), jp.end(), thr) - jp.begin());
    const auto p = stats::binomial(below, jp.size());
    const double margin = p.mean - dual::chernoff_jump_bound(xi, cn, cm, grid[g]) - kSe * p.se;
    if (margin > worst_ch) {
      worst_ch = margin;
      worst_ch_se = p.se;
    }
  }
  c.report.add(Metric::make("jump_cdf_domination_margin", 13, worst_dom, worst_dom_se, false, 0.0, 0.0,
                            Kind::AtMost, "max of F_J - F_J' - 4 se over grid times and counts"));
  c.report.add(Metric::make("chernoff_bound_margin", 13, worst_ch, worst_ch_se, false, 0.0, 0.0, Kind::AtMost,
                            "max of P(J' < threshold) - bound - 4 se over grid times"));
}

// ---------------------------------------------------------------- coming down

void coming_down_suite(Ctx& c) {
  const auto& cfg = c.cfg;
  const auto truncs = cfg.counts("n_trunc");
  std::size_t depth = cfg.count("depth");
  for (auto v : truncs) depth = std::max<std::size_t>(depth, v);
  const auto xi = reference_environment(cfg, cfg.real("alpha"), depth);
  auto csv = c.csv("coming-down.csv", {"n_trunc", "replica_id", "tau", "seed"});
  std::vector<MeanSe> est;
  for (std::size_t nt : truncs) {
    const auto fam = c.family("n=" + std::to_string(nt));
    const auto taus = parallel_map(cfg.replicas, c.threads, [&](std::size_t r) {
      Stream rng = fam.at(r);
      return dual::tau_infinity_to_one(xi, nt, rng);
    });
    for (std::size_t r = 0; r < taus.size(); ++r) {
      csv.row({std::uint64_t{nt}, std::uint64_t{r}, taus[r], fam.provenance(r)});
    }
    est.push_back(stats::mean_se(taus));
    c.report.add(Metric::make("mean_tau_full_to_one[n_trunc=" + std::to_string(nt) + "]", 0, est.back().mean,
                              est.back().se, false, 0.0, 0.0, Kind::Diagnostic));
  }
  for (std::size_t i = 1; i < est.size(); ++i) {
    const double se = std::hypot(est[0].se, est[i].se);
    c.report.add(Metric::make("tau_full_to_one_difference[" + std::to_string(truncs[0]) + "vs" +
                                  std::to_string(truncs[i]) + "]",
                              12, est[0].mean - est[i].mean, se, false, 0.0, kSe * se, Kind::Within));
  }
}

// ---------------------------------------------------------------- lineage

std::vector<double> lineage_histogram(std::span<const double> means, std::size_t k, double t,
                                      std::uint64_t reps, const StreamFamily& fam, unsigned threads) {
  const auto init = first_sites(k);
  const auto counts = parallel_map(reps, threads, [&](std::size_t r) {
    Stream rng = fam.at(r);
    return dual::evolve_coalescing(means, init, t, rng).count;
  });
  std::vector<double> h(k, 0.0);
  for (auto v : counts) h[v - 1] += 1.0 / static_cast<double>(reps);
  return h;
}

void lineage_suite(Ctx& c) {
  const auto& cfg = c.cfg;
  const double alpha = cfg.real("alpha");
  const auto ladder = cfg.counts("ladder");
  const std::size_t k_sites = cfg.count("k_sites"), depth = cfg.count("depth");
  const double t = cfg.real("t");
  const std::uint64_t reps = cfg.replicas;
  const std::size_t nmax = *std::max_element(ladder.begin(), ladder.end());
  // The reference exponential stream, extended far enough to couple every rung.
  Stream chi_rng = StreamFamily{cfg.master_seed, "limit-environment"}.at(0);
  const auto chi = env::draw_chi(std::max(nmax + 1, depth), chi_rng);
  const auto xi = env::limit_environment_from_chi(alpha, chi, depth);
  const auto law = env::TailLaw::pareto(alpha);

  auto csv = c.csv("lineage-convergence.csv", {"n", "lineages", "distance", "mc_error"});
  for (std::size_t k : cfg.counts("lineages")) {
    std::vector<double> limit, limit_se;
    if (k == 1) {
      const auto p = limitwalk::semigroup_matrix(xi.xi, t);
      for (std::size_t y = 0; y < k_sites; ++y) limit.push_back(p(0, y));
      limit_se.assign(k_sites, 0.0);
    } else {
      limit = lineage_histogram(xi.xi, k, t, reps, c.family("limit/k=" + std::to_string(k)), c.threads);
      for (double p : limit) limit_se.push_back(std::sqrt(p * (1 - p) / static_cast<double>(reps)));
    }
    std::vector<double> dist, err;
    for (std::size_t nn : ladder) {
      const auto environment = env::coupled_environment(law, nn, chi);
      std::vector<double> means(environment.weights);
      for (auto& w : means) w /= environment.a_n;
      const auto fam = c.family("n=" + std::to_string(nn) + "/k=" + std::to_string(k));
      std::vector<double> est, se;
      if (k == 1) {
        const auto m = limitwalk::marginal_estimate(means, 0, t, reps, fam, c.threads);
        est.assign(m.p.begin(), m.p.begin() + static_cast<std::ptrdiff_t>(std::min(k_sites, nn)));
        se.assign(m.se.begin(), m.se.begin() + static_cast<std::ptrdiff_t>(est.size()));
      } else {
        est = lineage_histogram(means, k, t, reps, fam, c.threads);
        for (double p : est) se.push_back(std::sqrt(p * (1 - p) / static_cast<double>(reps)));
      }
      double e = 0.0;
      for (std::size_t y = 0; y < limit.size(); ++y) {
        e += std::hypot(y < se.size() ? se[y] : 0.0, limit_se[y]);
      }
      dist.push_back(l1(est, limit));
      err.push_back(e);
      csv.row({std::uint64_t{nn}, std::uint64_t{k}, dist.back(), e});
      c.report.add(Metric::make("lineage_distance[k=" + std::to_string(k) + ",N=" + std::to_string(nn) + "]", 0,
                                dist.back(), e, false, 0.0, 0.0, Kind::Diagnostic));
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < dist.size(); ++i) decreasing = decreasing && dist[i] < dist[i - 1];
    auto metric = Metric::make("lineage_terminal_distance[k=" + std::to_string(k) + "]", 14, dist.back(),
                               err.back(), false, 0.05, 0.0, Kind::AtMost,
                               decreasing ? "ladder distances strictly decrease" : "ladder not monotone");
    metric.pass = metric.pass || decreasing;
    c.report.add(std::move(metric));
  }
}

}  // namespace

Report run_suite_impl(const ExperimentConfig& cfg) {
  Report report;
  Ctx c{cfg, worker_threads(cfg), report};
  const std::string& s = cfg.suite;
  if (s == "duality") duality_suite(c);
  else if (s == "consensus") consensus_suite(c);
  else if (s == "martingale") martingale_suite(c);
  else if (s == "extremes") extremes_suite(c);
  else if (s == "excursion") excursion_suite(c);
  else if (s == "stationary") stationary_suite(c);
  else if (s == "coupling") coupling_suite(c);
  else if (s == "entrance") entrance_suite(c);
  else if (s == "coalescence-scaling") coalescence_suite(c);
  else if (s == "coming-down") coming_down_suite(c);
  else if (s == "lineage-convergence") lineage_suite(c);
  else throw ConfigError("unknown suite '" + s + "'");
  return report;
}

Report lineage_convergence_experiment(const ExperimentConfig& cfg) {
  if (cfg.suite != "lineage-convergence") {
    ExperimentConfig copy = cfg;
    copy.suite = "lineage-convergence";
    return run_suite(copy);
  }
  return run_suite(cfg);
}

}  // namespace svoter::harness

// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Usage: acceptance_tests [--cli <path-to-mdshrink>] [--only <k>]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mdshrink/linalg.hpp"
#include "mdshrink/parallel.hpp"
#include "mdshrink/rmt.hpp"
#include "mdshrink/rng.hpp"
#include "mdshrink/shrinkage.hpp"
#include "mdshrink/sim.hpp"
#include "mdshrink/stats.hpp"

using namespace mdshrink;

namespace {

int g_failures = 0;
std::string g_cli;

class Criterion {
 public:
  Criterion(int id, std::string name) : id_(id), name_(std::move(name)) {}

  void check(bool ok, const std::string& detail) {
    if (!ok) failed_details_.push_back(detail);
  }

  void note(const std::string& detail) { notes_.push_back(detail); }

  void finish(double seconds) {
    const bool ok = failed_details_.empty();
    std::printf("[%s] criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", id_, name_.c_str(),
                seconds);
    for (const std::string& n : notes_) std::printf("       %s\n", n.c_str());
    for (const std::string& d : failed_details_) std::printf("       ! %s\n", d.c_str());
    if (!ok) ++g_failures;
  }

 private:
  int id_;
  std::string name_;
  std::vector<std::string> notes_;
  std::vector<std::string> failed_details_;
};

class Stopwatch {
 public:
  double secs() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

// ---------------------------------------------------------------------------

void criterion1_formula_suite() {
  Stopwatch sw;
  Criterion cr(1, "formula suite: inversion round trip, branch continuity, optimal loss");
  const std::vector<double> betas{0.1, 0.25, 0.5, 0.9, 1.0};

  double worst_rt = 0.0;
  for (double b : betas) {
    const AspectRatio ar(b);
    const double lp = ar.ell_plus();
    for (int k = 1; k <= 1000; ++k) {
      const double alpha = lp + (100.0 - lp) * k / 1000.0;
      const double err =
          std::abs(ell_inv(lambda_fwd(alpha, ar), ar) - alpha) / std::max(1.0, alpha);
      worst_rt = std::max(worst_rt, err);
    }
  }
  cr.check(worst_rt <= 1e-10, fmt("round trip worst relative error %.3e > 1e-10", worst_rt));
  cr.note(fmt("round trip worst relative error %.3e", worst_rt));

  double worst_lambda = 0.0, worst_delta_cont = 0.0, worst_agree = 0.0;
  for (double b : betas) {
    const AspectRatio ar(b);
    const double lp = ar.ell_plus();
    worst_lambda = std::max(worst_lambda, std::abs(lambda_fwd(lp, ar) - ar.lambda_plus()));
    worst_lambda = std::max(
        worst_lambda, std::abs(lambda_fwd(lp * (1.0 + 1e-12), ar) - ar.lambda_plus()));
    for (int k = 1; k <= 200; ++k) {
      const double alpha = lp + 0.1 * k;
      const double z = 1.0 / alpha;
      worst_delta_cont =
          std::max(worst_delta_cont, std::abs(delta_loss(alpha, z * (1.0 - 1e-13), ar) -
                                              delta_loss(alpha, z * (1.0 + 1e-13), ar)));
      worst_agree = std::max(
          worst_agree, std::abs(optimal_delta(alpha, ar) - delta_loss(alpha, z, ar)));
    }
  }
  cr.check(worst_lambda <= 1e-10,
           fmt("lambda branch continuity error %.3e > 1e-10", worst_lambda));
  cr.check(worst_delta_cont <= 1e-10,
           fmt("loss-surface continuity error %.3e > 1e-10", worst_delta_cont));
  cr.check(worst_agree <= 1e-12,
           fmt("optimal_delta vs delta_loss disagreement %.3e > 1e-12", worst_agree));
  cr.finish(sw.secs());
}

void criterion2_optimality() {
  Stopwatch sw;
  Criterion cr(2, "optimality of the inversion shrinker over the loss surface");
  double worst = -1.0;
  for (double b : {0.25, 0.5, 1.0}) {
    const AspectRatio ar(b);
    const double lp = ar.ell_plus();
    for (int a = 1; a <= 400; ++a) {
      const double alpha = lp + (20.0 - lp) * a / 400.0;
      const double best = delta_loss(alpha, 1.0 / alpha, ar);
      for (int z = 0; z <= 250; ++z) {
        const double zeta = 5.0 * z / 250.0;
        worst = std::max(worst, best - delta_loss(alpha, zeta, ar));
      }
    }
  }
  cr.check(worst <= 1e-12, fmt("optimum exceeded somewhere by %.3e > 1e-12", worst));
  cr.note(fmt("max (optimal - alternative) = %.3e", worst));
  cr.finish(sw.secs());
}

void criterion3_rmt_convergence() {
  Stopwatch sw;
  Criterion cr(3, "RMT convergence at n = 4000 (top eigenvalue, cosine, optimal loss)");
  const int reps = 50, n = 4000, p = 2000;
  const AspectRatio beta(0.5);
  const SpikedModel model({2.0}, 1.0, beta);
  const double delta = optimal_delta(2.0, beta);

  std::vector<double> tops(reps), cos2(reps), losses(reps);
  parallel_for(reps, [&](std::size_t rep) {
    Rng rng = make_stream_rng(20250810, {static_cast<std::uint64_t>(rep)});
    const Eigen::MatrixXd frame = haar_frame(p, 1, rng);
    auto [sample, truth] = gen_spiked_sample(model, n, frame, rng);
    const Eigen::MatrixXd cov = sample_covariance(sample);
    const EigenSystem eig = sym_eig_psd(cov);
    tops[rep] = eig.values(0);
    const double dot = eig.vectors.col(0).dot(frame.col(0));
    cos2[rep] = dot * dot;
    const PrecisionEstimate est = apply_rule(eig, ShrinkageRule::optimal(1.0, beta));
    losses[rep] = op_norm_diff(truth.pseudo_inverse, est.matrix);
  });

  const double med_top = summarize(tops).median;
  const double med_cos = summarize(cos2).median;
  const double med_loss = summarize(losses).median;
  cr.note(fmt("median top eigenvalue %.4f (target 3.75 +- 0.1)", med_top));
  cr.note(fmt("median squared cosine %.4f (target 0.70 +- 0.05)", med_cos));
  cr.note(fmt("median optimal loss %.4f vs asymptote %.4f (10%% band)", med_loss, delta));
  cr.check(std::abs(med_top - 3.75) <= 0.1, "top eigenvalue outside the band");
  cr.check(std::abs(med_cos - 0.7) <= 0.05, "squared cosine outside the band");
  cr.check(std::abs(med_loss - delta) <= 0.1 * delta, "optimal loss off by more than 10%");
  cr.finish(sw.secs());
}

void criterion4_lost_spike() {
  Stopwatch sw;
  Criterion cr(4, "lost-spike floor at ell_1 = 0.5, beta = 1, n = 4000");
  const int reps = 5, n = 4000, p = 4000;
  const AspectRatio beta(1.0);
  const SpikedModel model({0.5}, 1.0, beta);

  std::vector<double> classical(reps), optimal(reps);
  parallel_for(reps, [&](std::size_t rep) {
    Rng rng = make_stream_rng(40404, {static_cast<std::uint64_t>(rep)});
    const Eigen::MatrixXd frame = haar_frame(p, 1, rng);
    auto [sample, truth] = gen_spiked_sample(model, n, frame, rng);
    const EigenSystem eig = sym_eig_psd(sample_covariance(sample));
    classical[rep] = op_norm_diff(truth.pseudo_inverse,
                                  apply_rule(eig, ShrinkageRule::classical(1.0)).matrix);
    optimal[rep] = op_norm_diff(truth.pseudo_inverse,
                                apply_rule(eig, ShrinkageRule::optimal(1.0, beta)).matrix);
  });

  const double med_c = summarize(classical).median;
  const double med_o = summarize(optimal).median;
  cr.note(fmt("median loss classical %.3f, optimal %.3f (floor 0.9/ell = 1.8)", med_c, med_o));
  cr.check(med_c >= 1.8, "classical median below the 1/ell floor");
  cr.check(med_o >= 1.8, "optimal median below the 1/ell floor");
  cr.finish(sw.secs());
}

void criterion5_spiked_reproduction() {
  Stopwatch sw;
  Criterion cr(5, "spiked-study ordering and gap across the (beta, sigma) grid");
  for (int d : {1, 4}) {
    SpikedExperimentConfig cfg;
    cfg.n = 300;
    cfg.reps = 50;
    cfg.master_seed = 1001;
    cfg.spikes.clear();
    for (int i = d; i >= 1; --i) cfg.spikes.push_back(static_cast<double>(i));
    const LossReport report = run_spiked_experiment(cfg);

    double min_gap_strong = 1e300;
    int ordering_violations = 0, gap_violations = 0;
    for (const SpikedCell& cell : report.cells) {
      const double med_c = cell.classical.raw.median;
      const double med_o = cell.optimal.raw.median;
      if (cell.sigma >= 0.45 && med_o > med_c) ++ordering_violations;
      if (cell.sigma >= 0.9 && cell.beta >= 0.4) {
        const double gap = std::log10(med_c) - std::log10(med_o);
        min_gap_strong = std::min(min_gap_strong, gap);
        if (gap <= 0.5) ++gap_violations;
      }
    }
    cr.note(fmt("d=%.0f: min log10 gap over strong-noise cells %.2f",
                static_cast<double>(d), min_gap_strong));
    cr.check(ordering_violations == 0,
             fmt("d=%.0f: optimal median above classical in %.0f cells with sigma >= 0.45",
                 static_cast<double>(d), static_cast<double>(ordering_violations)));
    cr.check(gap_violations == 0,
             fmt("d=%.0f: log10 gap below 0.5 in %.0f strong-noise cells",
                 static_cast<double>(d), static_cast<double>(gap_violations)));
  }
  cr.finish(sw.secs());
}

struct TableEntry {
  double beta, sigma;
  // mean normalized errors: (classical y1, optimal y1, classical y2, optimal y2)
  double values[4];
};

// Reference means for the manifold study (500-repetition published table).
const TableEntry kReferenceTable[] = {
    {0.1, 1.0, {18.78, 0.78, 55.98, 1.32}},
    {0.1, 1.5, {23.72, 1.41, 59.42, 2.59}},
    {0.1, 2.0, {33.54, 2.18, 64.04, 5.19}},
    {0.5, 1.0, {26.86, 2.41, 60.88, 4.06}},
    {0.5, 1.5, {42.66, 4.78, 69.06, 10.65}},
    {0.5, 2.0, {58.59, 9.84, 77.24, 31.52}},
    {1.0, 1.0, {34.70, 4.05, 64.11, 8.39}},
    {1.0, 1.5, {54.72, 10.62, 75.54, 23.97}},
    {1.0, 2.0, {69.65, 21.35, 83.30, 62.99}},
};

int table_mismatches(ErrorConvention convention, Criterion& cr, bool verbose) {
  int mismatches = 0;
  for (const TableEntry& entry : kReferenceTable) {
    ManifoldExperimentConfig cfg;
    cfg.beta = entry.beta;
    cfg.sigma = entry.sigma;
    cfg.reps = 100;
    cfg.master_seed = 2002;
    cfg.convention = convention;
    const ErrorReport report = run_manifold_experiment(cfg);
    const double got[4] = {report.points[0].classical.mean, report.points[0].optimal.mean,
                           report.points[1].classical.mean, report.points[1].optimal.mean};
    for (int k = 0; k < 4; ++k) {
      const double rel = std::abs(got[k] - entry.values[k]) / entry.values[k];
      if (rel > 0.25) ++mismatches;
      if (verbose) {
        cr.note(fmt((std::string("beta=") + std::to_string(entry.beta) +
                     " sigma=" + std::to_string(entry.sigma) +
                     (k < 2 ? " y1 " : " y2 ") + (k % 2 == 0 ? "classical" : "optimal ") +
                     ": measured %.3f vs reference %.2f (rel %.2f)")
                        .c_str(),
                    got[k], entry.values[k], rel));
      }
    }
  }
  return mismatches;
}

void criterion6_manifold_table() {
  Stopwatch sw;
  Criterion cr(6, "manifold-study reference-table reproduction (both error conventions)");
  const int miss_sq = table_mismatches(ErrorConvention::SquaredForm, cr, false);
  cr.note(fmt("squared-form convention: %.0f of 36 cells outside +-25%%",
              static_cast<double>(miss_sq)));
  int miss_rt = -1;
  if (miss_sq > 0) {
    miss_rt = table_mismatches(ErrorConvention::RootForm, cr, false);
    cr.note(fmt("root-form convention: %.0f of 36 cells outside +-25%%",
                static_cast<double>(miss_rt)));
  }
  if (miss_sq > 0 && miss_rt != 0) {
    // Report the measured numbers so the failure is reviewable.
    table_mismatches(ErrorConvention::SquaredForm, cr, true);
  }
  cr.check(miss_sq == 0 || miss_rt == 0,
           "neither error convention matches all 36 reference cells within +-25%");
  cr.finish(sw.secs());
}

std::string read_body(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream body;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    body << line << '\n';
  }
  return body.str();
}

void criterion7_determinism() {
  Stopwatch sw;
  Criterion cr(7, "CLI determinism: equal seeds give byte-identical bodies across thread budgets");
  if (g_cli.empty()) {
    cr.check(false, "no --cli path provided");
    cr.finish(sw.secs());
    return;
  }
  const std::string dir = "/tmp/mdshrink_acceptance";
  std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str());

  const std::vector<std::pair<std::string, std::string>> runs = {
      {"asym", "asym-loss --beta 0.5 1.0 --alpha-min 0.1 --alpha-max 3 --step 0.01"},
      {"curve", "shrinker-curve --beta 1 --sigma 1"},
      {"spiked",
       "spiked-sim --n 80 --beta 0.4 0.8 --sigma 0.45 0.9 --d 2 --reps 3 --seed 99"},
      {"manifold", "manifold-sim --p 20 --beta 0.5 1.0 --sigma 1.0 --reps 3 --seed 99"},
  };
  for (const auto& [name, args] : runs) {
    const std::string out1 = dir + "/" + name + "_1.csv";
    const std::string out2 = dir + "/" + name + "_2.csv";
    const std::string cmd1 = "MDSHRINK_THREADS=2 " + g_cli + " " + args + " --out " + out1;
    const std::string cmd2 = "MDSHRINK_THREADS=1 " + g_cli + " " + args + " --out " + out2;
    const int rc1 = std::system((cmd1 + " > /dev/null 2>&1").c_str());
    const int rc2 = std::system((cmd2 + " > /dev/null 2>&1").c_str());
    cr.check(WEXITSTATUS(rc1) == 0 && WEXITSTATUS(rc2) == 0, name + ": CLI run failed");
    const std::string b1 = read_body(out1);
    const std::string b2 = read_body(out2);
    cr.check(!b1.empty() && b1 == b2, name + ": bodies differ between runs");
  }
  cr.finish(sw.secs());
}

void criterion8_null_spectrum() {
  Stopwatch sw;
  Criterion cr(8, "null-case spectrum inside the extended bulk in >= 99 of 100 runs");
  const int runs = 100, n = 2000, p = 1000;
  const AspectRatio beta(0.5);
  const BulkEdges edges = bulk_edges(beta);
  const SpikedModel model({}, 1.0, beta);

  std::vector<int> inside(runs, 0);
  parallel_for(runs, [&](std::size_t run) {
    Rng rng = make_stream_rng(80808, {static_cast<std::uint64_t>(run)});
    auto [sample, truth] = gen_spiked_sample(model, n, Eigen::MatrixXd::Zero(p, 0), rng);
    const Eigen::VectorXd values = sym_eigvalues(sample_covariance(sample));
    inside[run] = (values(0) <= edges.lambda_plus + 0.1 &&
                   values(values.size() - 1) >= edges.lambda_minus - 0.1)
                      ? 1
                      : 0;
  });
  int count = 0;
  for (int v : inside) count += v;
  cr.note(fmt("%.0f of 100 runs fully inside [lambda- - 0.1, lambda+ + 0.1]",
              static_cast<double>(count)));
  cr.check(count >= 99, "too many runs with eigenvalues outside the extended bulk");
  cr.finish(sw.secs());
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) g_cli = argv[++i];
    if (arg == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
  }

  const auto want = [&](int k) { return only == 0 || only == k; };
  if (want(1)) criterion1_formula_suite();
  if (want(2)) criterion2_optimality();
  if (want(3)) criterion3_rmt_convergence();
  if (want(4)) criterion4_lost_spike();
  if (want(5)) criterion5_spiked_reproduction();
  if (want(6)) criterion6_manifold_table();
  if (want(7)) criterion7_determinism();
  if (want(8)) criterion8_null_spectrum();

  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria failed\n", g_failures);
  return 1;
}

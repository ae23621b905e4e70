#include "qhm/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "qhm/cli/json_writer.hpp"
#include "qhm/cli/operator_file.hpp"
#include "qhm/halfline.hpp"
#include "qhm/metric_lattice.hpp"
#include "qhm/quasi_hermitian.hpp"
#include "qhm/quasi_similarity.hpp"
#include "qhm/spectral_family.hpp"

namespace qhm::cli {

namespace {

struct Options {
  double tol = kDefaultTol;
  double match_tol = kDefaultMatchTol;
  std::string json_out;
  std::string csv_out;
  bool force = false;
  std::uint64_t seed = 0;
  int samples = 8;

  std::vector<std::string> inputs;
  std::string metric_path;
  std::string t_inverse_path;

  double d = -1.0;
  double b = 1.0;
  double box_length = 0.0;
  std::vector<long long> schedule;
  bool d_set = false;
  bool b_set = false;
  bool box_set = false;
  bool schedule_set = false;
};

Json tool_json() {
  Json t;
  t["name"] = std::string(kToolName);
  t["version"] = std::string(kToolVersion);
  return t;
}

Json digest(const Operator& op, std::string_view kind) {
  Json j;
  j["kind"] = std::string(kind);
  j["dim"] = op.dim();
  j["label"] = op.label();
  return j;
}

Json header(std::string_view command) {
  Json j;
  j["tool"] = tool_json();
  j["command"] = std::string(command);
  return j;
}

// "-" means stdout
void emit_artifact(const std::string& target, const std::string& content, std::ostream& out) {
  if (target.empty()) return;
  if (target == "-") {
    out << content;
    return;
  }
  write_atomic(target, content);
}

Json string_list(const std::vector<std::string>& v) {
  Json out = Json::array();
  for (const auto& s : v) out.push_back(s);
  return out;
}

Json complex_points_json(const std::vector<Complex>& v) {
  Json out = Json::array();
  for (const auto& z : v) out.push_back(complex_json(z));
  return out;
}

Json signature_json(const Signature& s) {
  Json j;
  j["positive"] = s.positive;
  j["negative"] = s.negative;
  j["zero"] = s.zero;
  return j;
}

Json metric_json(const MetricOperator& m, double relative_residual) {
  Json j;
  j["eig_min"] = number_or_null(m.eig_min());
  j["eig_max"] = number_or_null(m.eig_max());
  j["condition"] = number_or_null(m.eig_max() / m.eig_min());
  j["residual"] = number_or_null(relative_residual);
  return j;
}

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(6) << x;
  return s.str();
}

Operator load_primary(const std::string& path, std::string* kind = nullptr) {
  const OperatorFile f = load_operator_file(path);
  if (kind) *kind = f.kind == OperatorKind::Dense ? "dense" : "samsonov";
  return f.primary_operator();
}

MetricOperator metric_for(const Operator& a, const Options& opt) {
  if (!opt.metric_path.empty()) return make_metric(load_primary(opt.metric_path), opt.tol);
  return solve_metric(a, opt.tol).canonical;
}

std::vector<Vector> random_vectors(Index dim, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Vector> out;
  for (int k = 0; k < count; ++k) {
    Vector v(dim);
    for (Index i = 0; i < dim; ++i) v(i) = Complex(normal(rng), normal(rng));
    out.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------- analyze

int cmd_analyze(const Options& opt, std::ostream& out) {
  std::string kind;
  const Operator a = load_primary(opt.inputs.at(0), &kind);
  const double tol = opt.tol;

  Json report = header("analyze");
  report["input"] = digest(a, kind);
  Json tols;
  tols["tol"] = tol;
  tols["borderline_reality_factor"] = kBorderlineRealityFactor;
  tols["ill_conditioned_threshold"] = kIllConditionedThreshold;
  report["tolerances"] = tols;

  const Eigensystem es = eig_general(a, tol);
  double max_im = 0;
  for (Index i = 0; i < es.dim(); ++i) max_im = std::max(max_im, std::abs(es.eigenvalues(i).imag()));

  std::string classification;
  Json metric = nullptr, pseudo = nullptr, transform = nullptr;
  std::vector<std::string> warnings;

  if (hermiticity_residual(a.matrix()) <= tol) {
    classification = "hermitian";
    const MetricSolution sol = solve_metric(a, tol);
    metric = metric_json(sol.canonical, sol.relative_residual);
    Json t;
    t["hermiticity_residual"] = number_or_null(quasi_sa_transform(a, sol.canonical, tol).hermiticity_residual);
    transform = t;
  } else {
    try {
      const MetricSolution sol = solve_metric(a, tol);
      classification = "quasi_hermitian_pd";
      metric = metric_json(sol.canonical, sol.relative_residual);
      warnings = sol.warnings;
      const QuasiSelfAdjointTransform tr = quasi_sa_transform(a, sol.canonical, tol, true);
      Json t;
      t["hermiticity_residual"] = number_or_null(tr.hermiticity_residual);
      transform = t;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Defective) {
        classification = "defective";
      } else if (e.kind() == ErrorKind::ComplexSpectrum) {
        try {
          const PseudoMetric pm = solve_pseudo_metric(a, tol);
          classification = "pseudo_hermitian_indefinite";
          Json p;
          p["signature"] = signature_json(pm.signature);
          p["residual"] = number_or_null(pm.residual);
          pseudo = p;
        } catch (const Error& inner) {
          if (inner.kind() == ErrorKind::SpectrumNotConjugateClosed)
            classification = "not_pseudo_hermitian";
          else if (inner.kind() == ErrorKind::Defective)
            classification = "defective";
          else
            throw;
        }
      } else {
        throw;
      }
    }
  }

  report["classification"] = classification;
  Json spectrum;
  spectrum["eigenvalues"] = complex_list_json(es.eigenvalues);
  spectrum["all_real"] = es.all_real(tol);
  spectrum["max_abs_imag"] = number_or_null(max_im);
  spectrum["defective"] = es.defective;
  spectrum["vector_condition"] = number_or_null(es.vector_condition);
  report["spectrum"] = spectrum;
  report["metric"] = metric;
  report["pseudo_metric"] = pseudo;
  report["transform"] = transform;
  report["warnings"] = string_list(warnings);

  out << "classification: " << classification << "\n";
  out << "dim: " << a.dim() << "  max |Im lambda|: " << fmt(max_im) << "\n";
  if (!metric.is_null())
    out << "metric: eig_min " << fmt(metric["eig_min"].get<double>()) << ", residual "
        << fmt(metric["residual"].get<double>()) << "\n";
  if (!pseudo.is_null())
    out << "pseudo-metric signature: (" << pseudo["signature"]["positive"].get<Index>() << ", "
        << pseudo["signature"]["negative"].get<Index>() << ")\n";
  for (const auto& w : warnings) out << "warning: " << w << "\n";
  emit_artifact(opt.json_out, emit_json(report), out);
  return kExitOk;
}

// ----------------------------------------------------------------- metric

int cmd_metric(const Options& opt, std::ostream& out) {
  std::string kind;
  const Operator a = load_primary(opt.inputs.at(0), &kind);
  const MetricSolution sol = solve_metric(a, opt.tol);

  Json report = header("metric");
  report["input"] = digest(a, kind);
  Json tols;
  tols["tol"] = opt.tol;
  report["tolerances"] = tols;
  Json summary = metric_json(sol.canonical, sol.relative_residual);
  summary["absolute_residual"] = number_or_null(sol.residual);
  summary["scale"] = number_or_null(sol.scale);
  summary["vector_condition"] = number_or_null(sol.vector_condition);
  report["summary"] = summary;
  report["eigenvalues"] = complex_list_json(sol.eigenvalues);
  Json freedom = Json::array();
  for (const auto& c : sol.freedom) {
    Json f;
    f["value"] = complex_json(c.value);
    f["begin"] = c.begin;
    f["size"] = c.size;
    freedom.push_back(f);
  }
  report["freedom"] = freedom;
  report["metric"] = operator_to_json(sol.canonical.G().with_label("G"));
  report["eigvec_matrix"] = operator_to_json(sol.eigvec_matrix.with_label("S"));
  report["warnings"] = string_list(sol.warnings);

  out << "metric: dim " << a.dim() << ", eig_min " << fmt(sol.canonical.eig_min()) << ", eig_max "
      << fmt(sol.canonical.eig_max()) << ", relative residual " << fmt(sol.relative_residual) << "\n";
  out << "freedom: " << sol.freedom.size() << " cluster(s)\n";
  for (const auto& w : sol.warnings) out << "warning: " << w << "\n";
  emit_artifact(opt.json_out, emit_json(report), out);
  return kExitOk;
}

// -------------------------------------------------------------- transform

int cmd_transform(const Options& opt, std::ostream& out) {
  std::string kind;
  const Operator a = load_primary(opt.inputs.at(0), &kind);
  const MetricOperator m = metric_for(a, opt);
  const QuasiSelfAdjointTransform tr = quasi_sa_transform(a, m, opt.tol, opt.force);

  std::vector<std::string> warnings;
  if (tr.forced) warnings.push_back("precondition G A = A^dagger G failed; K computed because --force was given");
  if (tr.hermiticity_residual > opt.tol) warnings.push_back("K is not Hermitian within tol");

  Json report = header("transform");
  report["input"] = digest(a, kind);
  Json tols;
  tols["tol"] = opt.tol;
  tols["force"] = opt.force;
  report["tolerances"] = tols;
  report["metric"] = metric_json(m, tr.metric_residual);
  report["hermiticity_residual"] = number_or_null(tr.hermiticity_residual);
  report["forced"] = tr.forced;
  report["eigenvalues"] = complex_list_json(eigenvalues_general(tr.K, opt.tol));
  report["K"] = operator_to_json(tr.K.with_label("K"));
  report["warnings"] = string_list(warnings);

  out << "K: metric residual " << fmt(tr.metric_residual) << ", ||K - K^dagger|| / ||K|| "
      << fmt(tr.hermiticity_residual) << (tr.forced ? " (forced)" : "") << "\n";
  for (const auto& w : warnings) out << "warning: " << w << "\n";
  emit_artifact(opt.json_out, emit_json(report), out);
  return kExitOk;
}

// ------------------------------------------------------------------- qsim

Json intertwiner_json(const IntertwinerReport& r) {
  Json j;
  j["residual"] = number_or_null(r.residual);
  Json sv = Json::array();
  for (double s : r.singular_values) sv.push_back(number_or_null(s));
  j["singular_values"] = sv;
  j["min_sv"] = number_or_null(r.min_sv);
  j["numerical_rank"] = r.numerical_rank;
  j["quasi_affinity"] = r.quasi_affinity;
  j["bounded_inverse_proxy"] = number_or_null(r.bounded_inverse_proxy);
  j["condition"] = number_or_null(r.condition);
  return j;
}

Json match_json(const SpectralMatch& m) {
  Json j;
  Json pairs = Json::array();
  for (const auto& p : m.pairs) {
    Json e;
    e["lambda_a"] = complex_json(p.lambda_a);
    e["lambda_b"] = complex_json(p.lambda_b);
    e["distance"] = number_or_null(p.distance);
    e["m_a"] = p.m_a;
    e["m_b"] = p.m_b;
    pairs.push_back(e);
  }
  j["pairs"] = pairs;
  j["unmatched_a"] = complex_points_json(m.unmatched_a);
  j["unmatched_b"] = complex_points_json(m.unmatched_b);
  j["match_tol"] = m.match_tol;
  j["inclusion"] = m.inclusion();
  j["equality"] = m.equality();
  return j;
}

int cmd_qsim(const Options& opt, std::ostream& out) {
  const Operator a = load_primary(opt.inputs.at(0));
  const Operator b = load_primary(opt.inputs.at(1));
  const Operator t = load_primary(opt.inputs.at(2));

  Json report = header("qsim");
  report["inputs"] = Json::array({digest(a, "A"), digest(b, "B"), digest(t, "T")});
  Json tols;
  tols["tol"] = opt.tol;
  tols["match_tol"] = opt.match_tol;
  report["tolerances"] = tols;

  std::vector<std::string> failures;
  const IntertwinerReport ir = verify_intertwining(a, b, t, opt.tol);
  report["intertwining"] = intertwiner_json(ir);
  const SpectralMatch sm = spectral_comparison(a, b, opt.match_tol);
  report["spectra"] = match_json(sm);

  if (ir.residual > opt.tol) {
    failures.push_back("T A - B T residual " + fmt(ir.residual) + " exceeds tol");
    report["push"] = nullptr;
  } else {
    const PushReport pr = push_eigenvectors(a, b, t, opt.tol);
    Json p;
    p["max_residual"] = number_or_null(pr.max_residual);
    Json pushed = Json::array();
    for (const auto& e : pr.pushed) {
      Json x;
      x["lambda"] = complex_json(e.lambda);
      x["image_norm"] = number_or_null(e.image_norm);
      x["residual"] = number_or_null(e.residual);
      x["ok"] = e.ok;
      pushed.push_back(x);
    }
    p["pushed"] = pushed;
    p["annihilated"] = complex_points_json(pr.annihilated);
    p["passed"] = pr.passed;
    report["push"] = p;
    if (!pr.passed) failures.push_back("a pushed eigenvector is not an eigenvector of B");
    if (ir.quasi_affinity && !sm.inclusion())
      failures.push_back("point spectrum of A is not included in that of B with multiplicities");
  }

  if (!opt.t_inverse_path.empty()) {
    const Operator t_ba = load_primary(opt.t_inverse_path);
    const MutualQsReport mr = mutual_qs_check(a, b, t, t_ba, opt.tol, opt.match_tol);
    Json m;
    m["reverse_intertwining"] = intertwiner_json(mr.ba);
    m["intertwinings_hold"] = mr.intertwinings_hold;
    m["quasi_affinities"] = mr.quasi_affinities;
    m["point_spectra_equal"] = mr.point_spectra_equal;
    m["both_normal"] = mr.both_normal;
    m["unitary_equivalence"] = mr.unitary_equivalence;
    m["bounded_inverses"] = mr.bounded_inverses;
    m["full_spectra_equal"] = mr.full_spectra_equal;
    m["note"] = mr.note;
    m["failures"] = string_list(mr.failures);
    m["passed"] = mr.passed;
    report["mutual"] = m;
    for (const auto& f : mr.failures) failures.push_back("mutual: " + f);
  } else {
    report["mutual"] = nullptr;
  }

  report["passed"] = failures.empty();
  report["failures"] = string_list(failures);

  out << "intertwining residual " << fmt(ir.residual) << ", min singular value " << fmt(ir.min_sv)
      << ", rank " << ir.numerical_rank << "/" << t.dim() << "\n";
  out << "spectra: " << sm.pairs.size() << " matched cluster(s), " << sm.unmatched_a.size() << " unmatched in A, "
      << sm.unmatched_b.size() << " unmatched in B\n";
  for (const auto& f : failures) out << "FAIL: " << f << "\n";
  emit_artifact(opt.json_out, emit_json(report), out);
  return failures.empty() ? kExitOk : kExitVerificationFailed;
}

// --------------------------------------------------------------- spectral

int cmd_spectral(const Options& opt, std::ostream& out) {
  std::string kind;
  const Operator a = load_primary(opt.inputs.at(0), &kind);
  const MetricOperator m = metric_for(a, opt);
  const XFamily xf = x_family(a, m, opt.tol);

  const auto xs = random_vectors(a.dim(), opt.samples, opt.seed);
  const auto etas = random_vectors(a.dim(), opt.samples, opt.seed + 1);
  std::vector<std::pair<Vector, Vector>> samples;
  for (int k = 0; k < opt.samples; ++k) samples.emplace_back(xs[static_cast<size_t>(k)], etas[static_cast<size_t>(k)]);
  const XPropertiesReport pr = x_properties(xf, a, samples, opt.tol);

  Json report = header("spectral");
  report["input"] = digest(a, kind);
  Json tols;
  tols["tol"] = opt.tol;
  tols["seed"] = opt.seed;
  tols["samples"] = opt.samples;
  report["tolerances"] = tols;
  report["metric"] = metric_json(m, quasi_hermiticity_residual(a, m.G()));
  Json steps = Json::array();
  for (size_t k = 0; k < xf.thresholds.size(); ++k) {
    Json s;
    s["lambda"] = xf.thresholds[k];
    s["rank"] = static_cast<Index>(std::lround(xf.step(k).trace().real()));
    s["projector"] = operator_to_json(Operator(xf.step(k), "P"));
    steps.push_back(s);
  }
  report["steps"] = steps;
  report["reconstruction_residual"] = number_or_null(xf.reconstruction_residual);
  Json props;
  props["right_continuous"] = pr.right_continuous;
  props["variation_violations"] = pr.variation_violations;
  props["max_variation_ratio"] = number_or_null(pr.max_variation_ratio);
  props["max_reconstruction_residual"] = number_or_null(pr.max_reconstruction_residual);
  Index limit_failures = 0;
  for (const auto& c : pr.samples)
    if (!c.limits_ok) ++limit_failures;
  props["limit_failures"] = limit_failures;
  props["passed"] = pr.passed;
  report["properties"] = props;

  if (!opt.csv_out.empty()) {
    std::ostringstream csv;
    csv << "sample,lambda,re,im\n";
    char buf[128];
    for (int k = 0; k < opt.samples; ++k) {
      for (const auto& [lambda, value] : x_sample_path(xf, xs[static_cast<size_t>(k)], etas[static_cast<size_t>(k)])) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", k, lambda, value.real(), value.imag());
        csv << buf;
      }
    }
    emit_artifact(opt.csv_out, csv.str(), out);
  }

  out << "spectral family: " << xf.thresholds.size() << " jump(s), reconstruction residual "
      << fmt(xf.reconstruction_residual) << "\n";
  out << "sampled properties: " << (pr.passed ? "pass" : "FAIL") << " (" << pr.variation_violations
      << " variation violation(s), max reconstruction residual " << fmt(pr.max_reconstruction_residual) << ")\n";
  emit_artifact(opt.json_out, emit_json(report), out);
  return pr.passed ? kExitOk : kExitVerificationFailed;
}

// ---------------------------------------------------------------- lattice

int cmd_lattice(const Options& opt, std::ostream& out) {
  std::string kind;
  const Operator g = load_primary(opt.inputs.at(0), &kind);
  const MetricOperator m = make_metric(g, opt.tol);
  const auto samples = random_vectors(g.dim(), opt.samples, opt.seed);
  const LatticeReport lr = verify_lattice(m, samples, opt.tol);

  Json report = header("lattice");
  report["input"] = digest(g, kind);
  Json tols;
  tols["tol"] = opt.tol;
  tols["seed"] = opt.seed;
  tols["samples"] = opt.samples;
  report["tolerances"] = tols;
  report["metric"] = metric_json(m, 0.0);
  report["chain_scale"] = number_or_null(lr.chain_scale);
  Json rows = Json::array();
  for (const auto& s : lr.samples) {
    Json n;
    n["plain"] = number_or_null(s.norms.plain);
    n["g"] = number_or_null(s.norms.g);
    n["g_inv"] = number_or_null(s.norms.g_inv);
    n["rg"] = number_or_null(s.norms.rg);
    n["rg_inv"] = number_or_null(s.norms.rg_inv);
    n["rginv"] = number_or_null(s.norms.rginv);
    n["rginv_inv"] = number_or_null(s.norms.rginv_inv);
    Json r;
    r["norms"] = n;
    r["projective_residual"] = number_or_null(s.projective_residual);
    r["duality_slack"] = number_or_null(s.duality_slack);
    r["duality_witness_residual"] = number_or_null(s.duality_witness_residual);
    r["unitarity_residual"] = number_or_null(s.unitarity_residual);
    r["chain_holds"] = s.chain_holds;
    r["passed"] = s.passed;
    rows.push_back(r);
  }
  report["samples"] = rows;
  report["max_projective_residual"] = number_or_null(lr.max_projective_residual);
  report["max_unitarity_residual"] = number_or_null(lr.max_unitarity_residual);
  report["max_duality_witness_residual"] = number_or_null(lr.max_duality_witness_residual);
  report["max_duality_slack"] = number_or_null(lr.max_duality_slack);
  report["passed"] = lr.passed;
  report["failures"] = string_list(lr.failures);

  out << "lattice: " << lr.samples.size() << " sample(s), " << (lr.passed ? "pass" : "FAIL") << "\n";
  out << "max residuals: projective " << fmt(lr.max_projective_residual) << ", unitarity "
      << fmt(lr.max_unitarity_residual) << ", duality " << fmt(lr.max_duality_witness_residual) << "\n";
  for (const auto& f : lr.failures) out << "FAIL: " << f << "\n";
  emit_artifact(opt.json_out, emit_json(report), out);
  return lr.passed ? kExitOk : kExitVerificationFailed;
}

// --------------------------------------------------------------- samsonov

int cmd_samsonov(const Options& opt, std::ostream& out) {
  HalfLineSpec spec;
  std::vector<Index> schedule{200, 400, 800};
  if (!opt.inputs.empty()) {
    const OperatorFile f = load_operator_file(opt.inputs.front());
    if (f.kind != OperatorKind::Samsonov) throw Error(ErrorKind::ParseError, "samsonov needs a kind=samsonov file");
    spec = *f.samsonov;
    schedule = {spec.n};
  }
  if (opt.d_set) spec.d = opt.d;
  if (opt.b_set) spec.b = opt.b;
  if (opt.box_set)
    spec.box_length = opt.box_length;
  else if (opt.inputs.empty())
    spec.box_length = HalfLineSpec::default_box_length(spec.d);
  if (opt.schedule_set) schedule.assign(opt.schedule.begin(), opt.schedule.end());
  spec.n = schedule.front();

  const SamsonovReport r = samsonov_report(spec, schedule);

  Json report = header("samsonov");
  Json s;
  s["d"] = spec.d;
  s["b"] = spec.b;
  s["box_length"] = spec.box_length;
  s["far_bc"] = "dirichlet";
  s["scheme_order"] = spec.scheme_order;
  report["spec"] = s;
  Json tols;
  tols["floor_epsilon"] = r.floor_epsilon;
  tols["trend_noise_floor"] = kTrendNoiseFloor;
  report["tolerances"] = tols;
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json j;
    j["n"] = row.n;
    j["h"] = row.h;
    j["min_eig_G"] = number_or_null(row.min_eig_G);
    j["gap_to_d2"] = number_or_null(row.gap_to_d2);
    j["residual_full"] = number_or_null(row.residual_full);
    j["residual_interior"] = number_or_null(row.residual_interior);
    j["herm_residual_h"] = number_or_null(row.herm_residual_h);
    j["max_im_lambda_H"] = number_or_null(row.max_im_lambda_H);
    j["min_re_lambda_H"] = number_or_null(row.min_re_lambda_H);
    j["defective_H"] = row.defective_H;
    j["floored_eigenvalues"] = row.floored_eigenvalues;
    Json orders;
    orders["gap"] = row.order_gap ? number_or_null(*row.order_gap) : Json(nullptr);
    orders["residual_full"] = row.order_residual_full ? number_or_null(*row.order_residual_full) : Json(nullptr);
    orders["herm_h"] = row.order_herm_h ? number_or_null(*row.order_herm_h) : Json(nullptr);
    j["order_estimates"] = orders;
    rows.push_back(j);
  }
  report["rows"] = rows;
  Json trends;
  trends["interior_residual_nonincreasing"] = r.interior_residual_nonincreasing;
  trends["im_lambda_nonincreasing"] = r.im_lambda_nonincreasing;
  trends["min_eig_monotone"] = r.min_eig_monotone;
  report["trends"] = trends;
  report["passed"] = r.passed;
  report["failures"] = string_list(r.failures);
  report["notes"] = string_list(r.notes);

  emit_artifact(opt.csv_out, samsonov_csv(r), out);
  for (const auto& row : r.rows)
    out << "n=" << row.n << "  min eig G " << fmt(row.min_eig_G) << "  interior residual "
        << fmt(row.residual_interior) << "  max |Im lambda| " << fmt(row.max_im_lambda_H) << "\n";
  for (const auto& f : r.failures) out << "FAIL: " << f << "\n";
  for (const auto& n : r.notes) out << "note: " << n << "\n";
  emit_artifact(opt.json_out, emit_json(report), out);
  return r.passed ? kExitOk : kExitVerificationFailed;
}

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--tol", opt.tol, "Numerical tolerance")->capture_default_str();
  sub->add_option("--json-out", opt.json_out, "Write the JSON report here ('-' for stdout)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Quasi-Hermitian operator analysis", std::string(kToolName)};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "Classify an operator and summarize its metric");
  analyze->add_option("file", opt.inputs, "Operator file")->required()->expected(1);
  add_common(analyze, opt);

  auto* metric = app.add_subcommand("metric", "Solve G A = A^dagger G for a positive metric");
  metric->add_option("file", opt.inputs, "Operator file")->required()->expected(1);
  add_common(metric, opt);

  auto* transform = app.add_subcommand("transform", "Compute K = G^(1/2) A G^(-1/2)");
  transform->add_option("file", opt.inputs, "Operator file")->required()->expected(1);
  transform->add_option("--metric", opt.metric_path, "Metric operator file (default: canonical metric)");
  transform->add_flag("--force", opt.force, "Compute K even when G A != A^dagger G");
  add_common(transform, opt);

  auto* qsim = app.add_subcommand("qsim", "Check T A = B T and its spectral consequences");
  qsim->add_option("files", opt.inputs, "A, B and T operator files")->required()->expected(3);
  qsim->add_option("--t-inverse", opt.t_inverse_path, "Reverse intertwiner, T' B = A T'");
  qsim->add_option("--match-tol", opt.match_tol, "Eigenvalue matching radius")->capture_default_str();
  add_common(qsim, opt);

  auto* spectral = app.add_subcommand("spectral", "Build X(lambda) and check its properties");
  spectral->add_option("file", opt.inputs, "Operator file")->required()->expected(1);
  spectral->add_option("--metric", opt.metric_path, "Metric operator file (default: canonical metric)");
  spectral->add_option("--samples", opt.samples, "Random (xi, eta) pairs")->capture_default_str()->check(
      CLI::Range(1, 100000));
  spectral->add_option("--seed", opt.seed, "Random seed")->capture_default_str();
  spectral->add_option("--csv-out", opt.csv_out, "Write sample paths as CSV ('-' for stdout)");
  add_common(spectral, opt);

  auto* lattice = app.add_subcommand("lattice", "Evaluate and verify the lattice norms of a metric");
  lattice->add_option("file", opt.inputs, "Metric operator file")->required()->expected(1);
  lattice->add_option("--samples", opt.samples, "Random sample vectors")->capture_default_str()->check(
      CLI::Range(1, 100000));
  lattice->add_option("--seed", opt.seed, "Random seed")->capture_default_str();
  add_common(lattice, opt);

  auto* samsonov = app.add_subcommand("samsonov", "Half-line Robin example under grid refinement");
  samsonov->add_option("file", opt.inputs, "Optional kind=samsonov file")->expected(0, 1);
  auto* d_opt = samsonov->add_option("--d", opt.d, "Real part of the Robin coefficient");
  auto* b_opt = samsonov->add_option("--b", opt.b, "Imaginary part of the Robin coefficient");
  auto* l_opt = samsonov->add_option("--L", opt.box_length, "Box length (default 40/|d|)");
  auto* n_opt = samsonov->add_option("--n", opt.schedule, "Ascending grid sizes, e.g. 200,400,800")->delimiter(',');
  samsonov->add_option("--csv-out", opt.csv_out, "Write report rows as CSV ('-' for stdout)");
  samsonov->add_option("--json-out", opt.json_out, "Write the JSON report here ('-' for stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsageError;
  }
  opt.d_set = d_opt->count() > 0;
  opt.b_set = b_opt->count() > 0;
  opt.box_set = l_opt->count() > 0;
  opt.schedule_set = n_opt->count() > 0;

  try {
    if (analyze->parsed()) return cmd_analyze(opt, out);
    if (metric->parsed()) return cmd_metric(opt, out);
    if (transform->parsed()) return cmd_transform(opt, out);
    if (qsim->parsed()) return cmd_qsim(opt, out);
    if (spectral->parsed()) return cmd_spectral(opt, out);
    if (lattice->parsed()) return cmd_lattice(opt, out);
    if (samsonov->parsed()) return cmd_samsonov(opt, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsageError;
  }
  return kExitUsageError;
}

}  // namespace qhm::cli

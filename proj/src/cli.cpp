#include "semicircle/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include "semicircle/io.hpp"
#include "semicircle/verify.hpp"

namespace semicircle::cli {

namespace {

SinkhornConfig sinkhorn_config(const Options& opt) {
  SinkhornConfig cfg;
  cfg.tol = opt.tol;
  cfg.max_iter = opt.max_iter;
  return cfg;
}

BoundaryLimitConfig density_config(const Options& opt) {
  BoundaryLimitConfig cfg;
  cfg.eps_path = opt.eps;
  cfg.validate();
  return cfg;
}

// Writes to --out when given, else to `out`.
void emit(const Options& opt, std::ostream& out, const std::function<void(std::ostream&)>& write) {
  if (opt.out.empty()) {
    write(out);
    return;
  }
  std::ofstream file(opt.out, std::ios::binary);
  if (!file) throw InvalidInput("cannot open output file '" + opt.out + "'");
  write(file);
}

void emit_json(const Options& opt, std::ostream& out, const io::Json& j) {
  emit(opt, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

// Maps exceptions onto exit codes: malformed input 1, numerical trouble 2.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const io::SchemaError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace

std::vector<double> parse_eps_list(const std::string& text) {
  std::vector<double> out;
  if (!text.empty() && text.back() == ',') throw InvalidInput("--eps: trailing comma");
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InvalidInput("--eps: cannot parse '" + item + "'");
    }
    if (used != item.size()) throw InvalidInput("--eps: cannot parse '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InvalidInput("--eps: empty list");
  return out;
}

int cmd_classify(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const io::PencilDocument doc = io::load_pencil(opt.input);
    ClassifyConfig cfg;
    cfg.sinkhorn = sinkhorn_config(opt);
    cfg.seed = opt.seed;
    const Classification c = classify(doc.pencil, cfg);
    emit_json(opt, out, io::to_json(c));
    return c.verdict == Verdict::Inconclusive ? kUndecided : kOk;
  });
}

int cmd_density(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const io::PencilDocument doc = io::load_pencil(opt.input);
    if (opt.format != "csv" && opt.format != "json") throw InvalidInput("--format must be csv or json");
    if (!(opt.x_max > opt.x_min)) throw InvalidInput("--x-max must exceed --x-min");
    const BoundaryLimitConfig cfg = density_config(opt);
    const CpMap eta = covariance_map(doc.pencil);
    const std::vector<double> xs = linspace(opt.x_min, opt.x_max, opt.points);
    const DensityTable table = density_grid(eta, xs, cfg, opt.threads);

    if (opt.format == "csv")
      emit(opt, out, [&](std::ostream& os) { io::write_csv(os, table); });
    else
      emit_json(opt, out, io::to_json(table));

    io::Json summary;
    try {
      const DensityPoint p0 = density_at(eta, 0.0, cfg);
      summary["f0_status"] = to_string(p0.status);
      summary["f0"] = p0.status == PointStatus::Ok ? io::Json(p0.value) : io::Json(nullptr);
    } catch (const Error& e) {
      summary["f0_status"] = to_string(PointStatus::Failed);
      summary["f0"] = nullptr;
    }
    const SupportEdges edges = support_edges(eta, table, cfg);
    if (edges.found)
      summary["support"] = io::Json::array({edges.lower, edges.upper});
    else
      summary["support"] = nullptr;
    summary["mass"] = table_mass(table);
    try {
      const FkDeterminant fk = fk_determinant(table);
      summary["fk_determinant"] = fk.value;
      summary["log_fk_determinant"] = fk.log_value;
      summary["fk_error_estimate"] = fk.error_estimate;
    } catch (const InvalidInput&) {
      summary["fk_determinant"] = nullptr;
    }
    err << summary.dump() << '\n';
    return kOk;
  });
}

int cmd_scale(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const io::PencilDocument doc = io::load_pencil(opt.input);
    const CpMap eta = covariance_map(doc.pencil);
    ScaleConfig cfg;
    cfg.sinkhorn = sinkhorn_config(opt);
    const SymmetricScaling sc = symmetric_scale(eta, cfg);
    io::Json j;
    j["status"] = to_string(sc.status);
    j["sinkhorn"] = io::to_json(sc.sinkhorn);
    if (sc.certificate) {
      const TraceMinimization tm = trace_minimizer(eta, *sc.certificate);
      j["certificate"] = io::to_json(*sc.certificate);
      j["trace_minimizer"] = io::to_json(tm.certificate);
      j["f0"] = f0_from_certificate(tm.certificate);
    } else {
      j["certificate"] = nullptr;
    }
    emit_json(opt, out, j);
    return sc.status == ScaleStatus::Scaled ? kOk : kUndecided;
  });
}

int cmd_capacity(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const io::PencilDocument doc = io::load_pencil(opt.input);
    CapacityConfig cfg;
    cfg.max_iter = std::min(opt.max_iter, cfg.max_iter);
    emit_json(opt, out, io::to_json(capacity(covariance_map(doc.pencil), cfg)));
    return kOk;
  });
}

int cmd_verify(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const io::PencilDocument doc = io::load_pencil(opt.input);
    VerifyConfig cfg;
    cfg.classify.sinkhorn = sinkhorn_config(opt);
    cfg.classify.seed = opt.seed;
    cfg.density = density_config(opt);
    cfg.seed = opt.seed;
    cfg.trials = opt.trials;
    const VerifyReport report = verify_pencil(doc.pencil, cfg);
    io::Json j = to_json(report);
    if (!doc.name.empty()) j["pencil"] = doc.name;
    emit_json(opt, out, j);
    for (const CheckResult& c : report.checks)
      if (!c.passed) err << "FAILED " << c.name << " measured " << c.measured << " threshold " << c.threshold << '\n';
    return report.all_passed() ? kOk : kBadInput;
  });
}

}  // namespace semicircle::cli

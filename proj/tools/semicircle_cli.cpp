#include <iostream>

#include <CLI11.hpp>

#include "semicircle/cli.hpp"
#include "semicircle/errors.hpp"

int main(int argc, char** argv) {
  using namespace semicircle::cli;
  CLI::App app{"Matrix semicircle toolkit: pencil classification, operator scaling, spectral densities"};
  app.require_subcommand(1);

  Options opt;
  std::string eps_text;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--input", opt.input, "pencil JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output file (default stdout)");
    sub->add_option("--tol", opt.tol, "Sinkhorn DS tolerance")->capture_default_str();
    sub->add_option("--max-iter", opt.max_iter, "iteration budget")->capture_default_str();
    sub->add_option("--seed", opt.seed, "random seed")->capture_default_str();
    sub->add_option("--eps", eps_text, "comma-separated eps path for boundary limits");
    sub->add_option("--x-min", opt.x_min, "density grid start")->capture_default_str();
    sub->add_option("--x-max", opt.x_max, "density grid end")->capture_default_str();
    sub->add_option("--points", opt.points, "density grid size")->capture_default_str();
    sub->add_option("--format", opt.format, "density output: csv or json")->capture_default_str();
    sub->add_option("--threads", opt.threads, "worker threads (0: hardware)");
    sub->add_option("--trials", opt.trials, "verify: trials per property")->capture_default_str();
  };
  auto* classify = app.add_subcommand("classify", "pencil hierarchy verdict");
  auto* density = app.add_subcommand("density", "spectral density table");
  auto* scale = app.add_subcommand("scale", "symmetric DS scaling certificate");
  auto* capacity = app.add_subcommand("capacity", "operator capacity");
  auto* verify = app.add_subcommand("verify", "run the invariant suite on one pencil");
  for (auto* sub : {classify, density, scale, capacity, verify}) common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kBadInput;
  }
  if (!eps_text.empty()) {
    try {
      opt.eps = parse_eps_list(eps_text);
    } catch (const semicircle::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kBadInput;
    }
  }

  if (*classify) return cmd_classify(opt, std::cout, std::cerr);
  if (*density) return cmd_density(opt, std::cout, std::cerr);
  if (*scale) return cmd_scale(opt, std::cout, std::cerr);
  if (*capacity) return cmd_capacity(opt, std::cout, std::cerr);
  return cmd_verify(opt, std::cout, std::cerr);
}

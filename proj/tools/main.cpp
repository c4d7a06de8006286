#include "cli_app.hpp"

int main(int argc, char** argv) {
  using namespace lpgeom;
  CLI::App app{"L^p support functions, polars, Mahler volumes and friends"};
  app.require_subcommand(1);
  cli::Options o;
  const std::vector<std::pair<std::string, std::string>> subs = {
      {"support", "evaluate h_{p,K} on a grid of directions"},
      {"polar", "boundary points of K^{o,p}"},
      {"mahler", "M_p table"},
      {"santalo", "solve for the L^p Santalo point"},
      {"steiner", "iterate Steiner symmetrization and log polar volumes"},
      {"ratio", "M_p(diamond) / M_p(cube) curve"},
      {"isotropic", "C(K), L_K, convexity certificates and slicing bounds"},
      {"verify", "property suite"}};
  for (const auto& [name, help] : subs) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--body", o.body, "named body (cube3, diamond2, ball2, simplex2, simplexmeasure2), inline JSON or a JSON file");
    s->add_option("--p", o.p, "exponents: comma list, a:b:count ranges, 0 and inf");
    s->add_option("--seed", o.seed);
    s->add_option("--quad-dirs", o.quad_dirs, "direction count (0 = per-dimension default)");
    s->add_option("--tol", o.tol, "radial quadrature tolerance");
    s->add_option("--mc-samples", o.mc_samples, "Monte-Carlo oracle samples (0 = off)");
    s->add_option("--out", o.out, "output directory");
    s->add_option("--n", o.n, "dimension (ratio)");
    s->add_option("--points", o.points, "grid size (support, polar)");
    s->add_option("--iterations", o.iterations, "Steiner iterations");
    s->add_flag("--exact", o.exact, "require exact Steiner symmetrals");
    s->add_option("--B", o.B, "convexity constant (default n+1)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    return cli::Runner(sub, o, std::cout).run();
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const CapabilityError& e) {
    std::cerr << "capability error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

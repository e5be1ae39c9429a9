// Wall-clock cost of the deepest fit on N(0, I) samples, one worker,
// printed as a Markdown table.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "regdepth/median.hpp"
#include "regdepth/random.hpp"
#include "regdepth/sim.hpp"

using namespace regdepth;

namespace {

struct Case {
  std::size_t p;
  std::size_t n;
  DepthMode mode;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deepest-fit scaling benchmark"};
  std::uint64_t seed = 1;
  std::size_t reps = 3;
  bool quick = false;
  app.add_option("--seed", seed);
  app.add_option("--reps", reps, "samples per row; the median time is reported");
  app.add_flag("--quick", quick, "small sizes only");
  CLI11_PARSE(app, argc, argv);

  std::vector<Case> cases;
  const auto E = DepthMode::exact;
  const auto A = DepthMode::approximate;
  for (std::size_t n : {25, 50, 100, 200}) cases.push_back({2, n, E});
  if (!quick) cases.push_back({2, 400, E});
  for (std::size_t n : {10, 20, 30}) cases.push_back({3, n, E});
  if (!quick) {
    cases.push_back({3, 50, E});
    cases.push_back({3, 100, E});
    cases.push_back({4, 20, E});
    cases.push_back({4, 30, E});
  }
  for (std::size_t n : {10, 15, 20}) cases.push_back({5, n, E});
  for (std::size_t n : {50, 200}) cases.push_back({3, n, A});
  for (std::size_t n : {50, 200}) cases.push_back({5, n, A});

  std::printf("| p | n | mode | subsets | median seconds | k* (first sample) |\n");
  std::printf("|---|---|------|---------|----------------|-------------------|\n");
  MedianOptions opt;
  opt.workers = 1;
  for (const auto& c : cases) {
    std::vector<double> secs;
    std::size_t k_first = 0;
    std::uint64_t subsets = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto d = gen_std_normal(c.p, c.n, replicate_seed(seed, r));
      const auto t0 = std::chrono::steady_clock::now();
      const auto res = c.mode == E ? k_star_exact(d, opt) : k_star_approx(d, 2000, 200, replicate_seed(seed, r), opt);
      secs.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      if (r == 0) {
        k_first = res.k_star;
        subsets = res.subsets_examined;
      }
    }
    std::sort(secs.begin(), secs.end());
    std::printf("| %zu | %zu | %s | %llu | %.3f | %zu |\n", c.p, c.n, to_string(c.mode),
                static_cast<unsigned long long>(subsets), secs[secs.size() / 2], k_first);
    std::fflush(stdout);
  }
  return 0;
}

// Benchmark of the fiberwise analysis kernel: serial reference vs OpenMP.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <vector>

#include "azumaya/fixtures.hpp"
#include "azumaya/worldvolume.hpp"

using namespace az;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(
               clock::now().time_since_epoch())
        .count();
}

double max_diff(const std::vector<FiberData>& a, const std::vector<FiberData>& b) {
    double worst = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].points.size() != b[i].points.size()) return 1e300;
        for (size_t p = 0; p < a[i].points.size(); ++p)
            worst = std::max(
                worst, (a[i].points[p] - b[i].points[p]).lpNorm<Eigen::Infinity>());
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    int grid = argc > 1 ? std::atoi(argv[1]) : 20000;
    auto map = *builtin_curve_map("example-7.2.2-phi1");

    std::vector<double> xs(grid);
    for (int i = 0; i < grid; ++i)
        xs[i] = map.x0 + (map.x1 - map.x0) * double(i) / double(grid - 1);

    std::printf("fiber kernel benchmark: r=%d n=%d grid=%d threads=%d\n", map.r,
                map.n, grid, omp_get_max_threads());

    double t0 = now_ms();
    auto serial = analyze_fibers_serial(map, xs);
    double t1 = now_ms();
    auto parallel = analyze_fibers_parallel(map, xs);
    double t2 = now_ms();

    const double ts = t1 - t0, tp = t2 - t1;
    std::printf("serial reference : %8.1f ms\n", ts);
    std::printf("openmp kernel    : %8.1f ms\n", tp);
    std::printf("speedup          : %8.2fx\n", ts / tp);
    std::printf("max |serial - parallel| = %.3e\n", max_diff(serial, parallel));
    return max_diff(serial, parallel) == 0.0 ? 0 : 1;
}

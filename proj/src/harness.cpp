#include "hlcp/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "hlcp/ustat.hpp"

namespace hlcp {

namespace {

struct Outcome {
    bool reject = false;
    bool degenerate = false;
};

// Per-series results: outcome[policy][test], block length per policy.
struct SeriesResult {
    std::vector<std::vector<Outcome>> outcome;
    std::vector<std::size_t> block_length;
};

SeriesResult evaluate_series(const TimeSeries& x, const ExperimentGrid& g) {
    const double n = static_cast<double>(x.size());
    const double root_n = std::sqrt(n);

    bool need_hle = false;
    bool need_cusum = false;
    bool need_wmw = false;
    for (TestKind t : g.tests) {
        need_hle |= t == TestKind::HLE;
        need_cusum |= t == TestKind::CUSUM;
        need_wmw |= t == TestKind::WMW;
    }

    const std::vector<double> f = centered_ecdf(x);
    double hle_max = 0.0;
    double cusum_max = 0.0;
    double wmw_max = 0.0;
    double u_hat = 0.0;
    if (need_hle) {
        hle_max = hle_weighted_profile(x).max_abs;
        u_hat = u_hat_zero(x, default_bandwidth(x));
    }
    if (need_cusum) {
        cusum_max = cusum_profile(x).max_abs;
    }
    if (need_wmw) {
        wmw_max = wmw_profile(x).max_abs;
    }

    SeriesResult res;
    res.outcome.resize(g.policies.size());
    res.block_length.resize(g.policies.size());
    for (std::size_t p = 0; p < g.policies.size(); ++p) {
        const SigmaEstimate est = block_length_for(g.policies[p], f);
        res.block_length[p] = est.block_length;
        const double rank_sigma = subsample_sigma(f, est.block_length);
        const double cusum_sigma = need_cusum ? block_variance_sigma(x.values(), est.block_length) : 0.0;
        for (TestKind t : g.tests) {
            Outcome o;
            double stat = 0.0;
            switch (t) {
                case TestKind::HLE:
                    o.degenerate = !(rank_sigma > 0.0 && u_hat > 0.0);
                    if (!o.degenerate) stat = root_n * (u_hat / rank_sigma) * hle_max;
                    break;
                case TestKind::CUSUM:
                    o.degenerate = !(cusum_sigma > 0.0);
                    if (!o.degenerate) stat = cusum_max / (cusum_sigma * root_n);
                    break;
                case TestKind::WMW:
                    o.degenerate = !(rank_sigma > 0.0);
                    if (!o.degenerate) stat = wmw_max / (rank_sigma * n * root_n);
                    break;
            }
            o.reject = !o.degenerate && stat > g.critical_value;
            res.outcome[p].push_back(o);
        }
    }
    return res;
}

std::uint64_t bits_of(double v) { return std::bit_cast<std::uint64_t>(v); }

// All replications of all (phi, nu) cells, each row an ordered list of heights.
std::vector<ResultRow> run_grid(const ExperimentGrid& g, std::span<const double> heights,
                                unsigned threads) {
    g.validate();
    const std::size_t cells = g.phis.size() * g.nus.size();
    const std::size_t reps = g.replications;
    std::vector<InnovationSpec> specs;
    for (double nu : g.nus) {
        specs.push_back(nu == kInfiniteDf ? InnovationSpec::normal() : InnovationSpec::student(nu));
    }

    // results[cell][rep][height]
    std::vector<std::vector<std::vector<SeriesResult>>> results(
        cells, std::vector<std::vector<SeriesResult>>(reps));
    parallel_for(cells * reps, threads, [&](std::size_t job) {
        const std::size_t cell = job / reps;
        const std::size_t rep = job % reps;
        const double phi = g.phis[cell / g.nus.size()];
        const std::size_t nu_idx = cell % g.nus.size();
        Engine rng(derive_seed(g.seed, {bits_of(phi), bits_of(g.nus[nu_idx]), rep}));
        const auto eps = innovation_stream(g.burn_in + g.n, specs[nu_idx], rng);
        const TimeSeries base(ar1_from_innovations(eps, phi, g.burn_in));
        auto& slot = results[cell][rep];
        slot.reserve(heights.size());
        for (double h : heights) {
            slot.push_back(evaluate_series(h == 0.0 ? base : inject_shift(base, h, g.shift_position), g));
        }
    });

    std::vector<ResultRow> rows;
    for (std::size_t cell = 0; cell < cells; ++cell) {
        const double phi = g.phis[cell / g.nus.size()];
        const double nu = g.nus[cell % g.nus.size()];
        for (std::size_t p = 0; p < g.policies.size(); ++p) {
            for (std::size_t t = 0; t < g.tests.size(); ++t) {
                for (std::size_t h = 0; h < heights.size(); ++h) {
                    std::size_t rejected = 0;
                    std::size_t degenerate = 0;
                    std::size_t block_sum = 0;
                    for (std::size_t r = 0; r < reps; ++r) {
                        const SeriesResult& sr = results[cell][r][h];
                        rejected += sr.outcome[p][t].reject ? 1 : 0;
                        degenerate += sr.outcome[p][t].degenerate ? 1 : 0;
                        block_sum += sr.block_length[p];
                    }
                    ResultRow row;
                    row.phi = phi;
                    row.nu = nu;
                    row.policy = g.policies[p];
                    row.test = g.tests[t];
                    row.height = heights[h];
                    row.n = g.n;
                    row.reps = reps;
                    row.rejection_rate = static_cast<double>(rejected) / static_cast<double>(reps);
                    row.mean_block_length =
                        static_cast<double>(block_sum) / static_cast<double>(reps);
                    row.seed = g.seed;
                    row.degenerate = degenerate;
                    rows.push_back(row);
                }
            }
        }
    }
    return rows;
}

std::string format_nu(double nu) {
    return nu == kInfiniteDf ? std::string("inf") : fmt::format("{}", nu);
}

}  // namespace

void ExperimentGrid::validate() const {
    if (n < 8) throw std::invalid_argument("experiment: n must be >= 8");
    if (replications < 1) throw std::invalid_argument("experiment: replications must be >= 1");
    if (phis.empty() || nus.empty() || policies.empty() || tests.empty()) {
        throw std::invalid_argument("experiment: phi, nu, policy and test grids must be non-empty");
    }
    for (double phi : phis) {
        if (!(std::abs(phi) < 1.0)) throw std::invalid_argument("experiment: |phi| must be < 1");
    }
    for (double nu : nus) {
        if (!(nu >= 1.0)) throw std::invalid_argument("experiment: nu must be >= 1 or inf");
    }
    if (!(shift_position > 0.0 && shift_position < 1.0)) {
        throw std::invalid_argument("experiment: shift_position must lie in (0, 1)");
    }
    if (!(critical_value > 0.0)) {
        throw std::invalid_argument("experiment: critical_value must be positive");
    }
    for (std::size_t i = 0; i < heights.size(); ++i) {
        if (!std::isfinite(heights[i]) || heights[i] < 0.0) {
            throw std::invalid_argument("experiment: heights must be finite and >= 0");
        }
        if (i > 0 && !(heights[i] > heights[i - 1])) {
            throw std::invalid_argument("experiment: heights must be strictly increasing");
        }
    }
}

double SizeTable::percent(double phi, double nu, BlockPolicy policy, TestKind test) const {
    for (const ResultRow& r : rows) {
        if (r.phi == phi && r.nu == nu && r.policy == policy && r.test == test) {
            return 100.0 * r.rejection_rate;
        }
    }
    throw std::out_of_range("SizeTable: no such entry");
}

std::vector<double> default_heights(double phi) {
    const int step = phi < 0.2 ? 1 : (phi < 0.6 ? 2 : 4);  // in tenths
    std::vector<double> h;
    for (int i = 1; i <= 10; ++i) h.push_back(static_cast<double>(step * i) / 10.0);
    return h;
}

unsigned parallelism_from_env() {
    if (const char* env = std::getenv("HLCP_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) {
            return static_cast<unsigned>(v);
        }
        throw std::invalid_argument("HLCP_THREADS must be an integer >= 1");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
    if (threads == 0) threads = parallelism_from_env();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

SizeTable run_size_experiment(const ExperimentGrid& grid, unsigned threads) {
    const double zero[] = {0.0};
    SizeTable table;
    table.rows = run_grid(grid, zero, threads);
    table.replications = grid.replications;
    table.seed = grid.seed;
    return table;
}

PowerResult run_power_experiment(const ExperimentGrid& grid, unsigned threads) {
    if (grid.heights.empty()) {
        throw std::invalid_argument("power experiment: height grid is empty");
    }
    PowerResult out;
    out.rows = run_grid(grid, grid.heights, threads);
    // Rows come out grouped by (cell, policy, test) with heights innermost.
    const std::size_t hcount = grid.heights.size();
    for (std::size_t i = 0; i < out.rows.size(); i += hcount) {
        PowerCurve c;
        c.phi = out.rows[i].phi;
        c.nu = out.rows[i].nu;
        c.policy = out.rows[i].policy;
        c.test = out.rows[i].test;
        c.shift_position = grid.shift_position;
        for (std::size_t h = 0; h < hcount; ++h) {
            c.heights.push_back(out.rows[i + h].height);
            c.rates.push_back(out.rows[i + h].rejection_rate);
            c.mean_block_length.push_back(out.rows[i + h].mean_block_length);
        }
        out.curves.push_back(std::move(c));
    }
    return out;
}

std::string results_csv(std::span<const ResultRow> rows) {
    std::string out = kResultsCsvHeader;
    out += '\n';
    for (const ResultRow& r : rows) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.phi, format_nu(r.nu), r.policy.name(),
                           to_string(r.test), r.height, r.n, r.reps, r.rejection_rate,
                           r.mean_block_length, r.seed);
    }
    return out;
}

double bahadur_sup_remainder(const TimeSeries& x, double q, double density) {
    const std::size_t n = x.size();
    const std::vector<double> quant = difference_quantile_profile(x, 0.5);
    // Doubled U-process counts: 2 for g < q, 1 for g == q.
    auto score = [q](double d) -> std::size_t { return d < q ? 2 : (d == q ? 1 : 0); };
    std::size_t twice_hits = 0;
    for (std::size_t j = 1; j < n; ++j) twice_hits += score(x[j] - x[0]);
    double sup = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        if (k > 1) {
            const std::size_t m = k - 1;
            for (std::size_t i = 0; i < m; ++i) twice_hits -= score(x[m] - x[i]);
            for (std::size_t j = m + 1; j < n; ++j) twice_hits += score(x[j] - x[m]);
        }
        const double lambda = static_cast<double>(k) / static_cast<double>(n);
        const double u = static_cast<double>(twice_hits) / (2.0 * static_cast<double>(k * (n - k)));
        const double rem = lambda * (1.0 - lambda) * std::abs(quant[k - 1] - q + (u - 0.5) / density);
        sup = std::max(sup, rem);
    }
    return sup;
}

std::vector<BahadurRow> bahadur_diagnostic(std::span<const std::size_t> ns, std::size_t reps,
                                           std::uint64_t seed, unsigned threads) {
    if (reps < 1) throw std::invalid_argument("bahadur_diagnostic: reps must be >= 1");
    const double density = 1.0 / (2.0 * std::sqrt(std::numbers::pi));
    std::vector<BahadurRow> rows;
    for (std::size_t n : ns) {
        if (n < 2) throw std::invalid_argument("bahadur_diagnostic: n must be >= 2");
        std::vector<double> sups(reps);
        parallel_for(reps, threads, [&](std::size_t r) {
            Engine rng(derive_seed(seed, {n, r}));
            const TimeSeries x(innovation_stream(n, InnovationSpec::normal(), rng));
            sups[r] = bahadur_sup_remainder(x, 0.0, density);
        });
        std::sort(sups.begin(), sups.end());
        const double med = reps % 2 == 1 ? sups[reps / 2] : 0.5 * (sups[reps / 2 - 1] + sups[reps / 2]);
        rows.push_back(BahadurRow{n, reps, med});
    }
    return rows;
}

}  // namespace hlcp

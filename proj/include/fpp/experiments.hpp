#pragma once

// Scripted, reproducible experiments over the library. Every experiment
// consumes a flat key-value Config, runs its replicates on a worker pool
// (indexed result slots, sequential reduce, so output never depends on
// scheduling), and produces an ExperimentReport holding report.json,
// samples.csv, and an optional plot.svg. Runtime-asserted invariants throw
// InvariantViolation; the CLI maps that to exit code 2 and config problems
// to exit code 1.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "busemann.hpp"
#include "config.hpp"
#include "geodesic.hpp"
#include "json_io.hpp"
#include "lattice.hpp"
#include "order.hpp"
#include "shape.hpp"
#include "stats.hpp"
#include "svg.hpp"
#include "weights.hpp"

#ifndef FPP_GIT_HASH
#define FPP_GIT_HASH "unknown"
#endif

namespace fpp {

struct InvariantViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string iso_timestamp()
{
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline nlohmann::json provenance_json()
{
    return {{"git_hash", FPP_GIT_HASH}, {"timestamp", iso_timestamp()}};
}

// ---------------------------------------------------------------- workers

inline unsigned default_workers()
{
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Runs fn(0..count-1) across a pool; fn writes only to its own result slot.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn)
{
    if (workers == 0) workers = default_workers();
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (!failed.load(std::memory_order_relaxed)) {
                const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!error) error = std::current_exception();
                    failed.store(true, std::memory_order_relaxed);
                    return;
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// ----------------------------------------------------------------- config

inline Distribution dist_from_config(const Config& cfg)
{
    const std::string kind = cfg.get_string("dist", "exponential");
    try {
        if (kind == "exponential") return Distribution::exponential(cfg.get_double("rate", 1.0));
        if (kind == "uniform")
            return Distribution::uniform(cfg.get_double("a", 0.0), cfg.get_double("b", 1.0));
        if (kind == "pareto")
            return Distribution::shifted_pareto(cfg.get_double("alpha", 3.0),
                                                cfg.get_double("x_min", 1.0));
        if (kind == "unit") return Distribution::constant(1.0);
        if (kind == "constant") return Distribution::constant(cfg.get_double("value", 1.0));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: bad distribution parameter: ") + e.what());
    }
    throw ConfigError("config: unknown dist '" + kind + "'");
}

struct ExperimentConfig {
    std::string name;
    Distribution dist = Distribution::exponential(1.0);
    std::uint64_t seed_base = 1;
    long long replicates = 1;
    unsigned workers = 0;  // 0 = one per hardware thread
    std::map<std::string, double> tolerances;
    nlohmann::json echo = nlohmann::json::object();
};

inline ExperimentConfig common_config(const Config& cfg, const std::string& name,
                                      long long default_replicates)
{
    ExperimentConfig ec;
    ec.name = name;
    ec.dist = dist_from_config(cfg);
    ec.seed_base = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
    ec.replicates = cfg.get_int("replicates", default_replicates);
    if (ec.replicates < 1) throw ConfigError("config: replicates must be >= 1");
    ec.workers = static_cast<unsigned>(cfg.get_int("workers", 0));
    for (const auto& [k, v] : cfg.items()) {
        ec.echo[k] = v;
        if (k.rfind("tol_", 0) == 0) ec.tolerances[k.substr(4)] = cfg.get_double(k);
    }
    return ec;
}

inline std::vector<int> scale_list(const Config& cfg, const std::string& key,
                                   const std::vector<long long>& fallback)
{
    std::vector<int> out;
    for (long long v : cfg.get_int_list(key, fallback)) out.push_back(static_cast<int>(v));
    for (std::size_t i = 0; i + 1 < out.size(); ++i)
        if (out[i] >= out[i + 1])
            throw ConfigError("config: " + key + " must be strictly increasing");
    if (out.empty()) throw ConfigError("config: " + key + " must be nonempty");
    return out;
}

inline SectorSpec sector_from_config(const Config& cfg, const SectorSpec& fallback)
{
    if (!cfg.has("sector_theta") && !cfg.has("sector_theta1") && !cfg.has("sector_theta2"))
        return fallback;
    try {
        return make_sector(cfg.get_double("sector_theta", fallback.theta),
                           cfg.get_double("sector_theta1", fallback.theta1),
                           cfg.get_double("sector_theta2", fallback.theta2));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: bad sector: ") + e.what());
    }
}

inline Point point_from_config(const Config& cfg, const std::string& key, Point fallback)
{
    if (!cfg.has(key)) return fallback;
    const std::vector<long long> xy = cfg.get_int_list(key);
    if (xy.size() != 2) throw ConfigError("config: " + key + " must be 'x, y'");
    return {static_cast<int>(xy[0]), static_cast<int>(xy[1])};
}

inline SectorSpec wide_sector()
{
    return make_sector(kPi / 2.0, kPi / 4.0, 3.0 * kPi / 4.0);
}

// ----------------------------------------------------------------- report

struct ExperimentReport {
    std::string name;
    nlohmann::json report;
    std::string samples_csv;
    std::string plot_svg;  // empty = no plot

    void save(const std::string& out_dir) const
    {
        namespace fs = std::filesystem;
        fs::create_directories(out_dir);
        save_json(report, (fs::path(out_dir) / "report.json").string());
        std::ofstream csv(fs::path(out_dir) / "samples.csv", std::ios::binary);
        if (!csv) throw std::runtime_error("ExperimentReport: cannot write samples.csv");
        csv << samples_csv;
        if (!plot_svg.empty()) {
            std::ofstream svg(fs::path(out_dir) / "plot.svg", std::ios::binary);
            if (!svg) throw std::runtime_error("ExperimentReport: cannot write plot.svg");
            svg << plot_svg;
        }
    }
};

inline nlohmann::json stats_json(const OnlineStats& s)
{
    nlohmann::json j{{"count", s.count()}};
    if (s.count() > 0) {
        j["mean"] = s.mean();
        j["stddev"] = s.stddev();
        j["std_error"] = s.std_error();
        j["ci95"] = s.ci_halfwidth();
    }
    return j;
}

inline nlohmann::json proportion_json(long long successes, long long trials)
{
    nlohmann::json j{{"successes", successes}, {"trials", trials}};
    if (trials > 0) {
        const auto [lo, hi] = wilson_interval(successes, trials);
        j["phat"] = static_cast<double>(successes) / static_cast<double>(trials);
        j["wilson95_lo"] = lo;
        j["wilson95_hi"] = hi;
    }
    return j;
}

inline nlohmann::json report_skeleton(const ExperimentConfig& ec)
{
    return {{"name", ec.name},
            {"config", ec.echo},
            {"provenance", provenance_json()},
            {"replicates", ec.replicates},
            {"verdicts", nlohmann::json::object()}};
}

// --------------------------------------------------------------- midpoint

// Fraction of replicates whose geodesic from 0 to n*e1 passes through the
// exact midpoint vertex (n/2)*e1, per scale n, with the one-sided trend
// comparison between consecutive scales.
inline ExperimentReport midpoint_probability(const Config& cfg)
{
    ExperimentConfig ec = common_config(cfg, "midpoint", 2000);
    const std::vector<int> n_values = scale_list(cfg, "n_values", {16, 32, 64, 128});
    const long long pad_override = cfg.get_int("box_pad", -1);
    const long long hh_override = cfg.get_int("box_halfheight", -1);
    cfg.reject_unknown();
    for (int n : n_values)
        if (n < 2 || n % 2 != 0) throw ConfigError("config: midpoint n_values must be even and >= 2");

    const long long reps = ec.replicates;
    std::vector<long long> successes;
    CsvWriter csv({"n", "replicate", "seed", "indicator"});
    std::vector<nlohmann::json> per_n;

    for (int n : n_values) {
        const int pad = static_cast<int>(pad_override >= 0 ? pad_override : std::max(16, n / 4));
        const int hh = static_cast<int>(hh_override >= 0 ? hh_override : std::max(16, n / 2));
        const IntRect box{-pad, n + pad, -hh, hh};
        const Point src{0, 0}, dst{n, 0}, mid{n / 2, 0};
        if (!box.contains(src) || !box.contains(dst) || !box.contains(mid))
            throw ConfigError("config: box too small for n = " + std::to_string(n));

        std::vector<std::uint64_t> seeds(reps);
        std::vector<std::uint8_t> hit(reps, 0);
        const std::uint64_t n_stream = derive_seed(ec.seed_base, static_cast<std::uint64_t>(n));
        auto run_one = [&](std::size_t r) {
            seeds[r] = derive_seed(n_stream, static_cast<std::uint64_t>(r));
            const WeightField field(box, seeds[r], ec.dist);
            hit[r] = geodesic(field, src, dst, Restriction::Full).contains(mid) ? 1 : 0;
        };
        parallel_for(static_cast<std::size_t>(reps), ec.workers, run_one);

        // The indicator must be a pure function of the field: re-running the
        // first replicate has to reproduce its slot bit for bit.
        {
            const std::uint8_t recorded = hit[0];
            run_one(0);
            if (hit[0] != recorded)
                throw InvariantViolation("midpoint: replicate indicator is not reproducible");
        }

        long long k = 0;
        for (long long r = 0; r < reps; ++r) {
            k += hit[r];
            csv.row({CsvWriter::cell(n), CsvWriter::cell(r), CsvWriter::cell(seeds[r]),
                     CsvWriter::cell(static_cast<int>(hit[r]))});
        }
        successes.push_back(k);
        nlohmann::json row = proportion_json(k, reps);
        row["n"] = n;
        per_n.push_back(std::move(row));
    }

    bool strictly_decreasing = n_values.size() >= 2;
    nlohmann::json trend = nlohmann::json::array();
    for (std::size_t i = 0; i + 1 < n_values.size(); ++i) {
        const TrendComparison t =
            compare_proportions(successes[i], reps, successes[i + 1], reps);
        strictly_decreasing = strictly_decreasing && t.significantly_decreasing;
        trend.push_back({{"n_from", n_values[i]},
                         {"n_to", n_values[i + 1]},
                         {"significantly_decreasing", t.significantly_decreasing},
                         {"significantly_increasing", t.significantly_increasing}});
    }

    ExperimentReport out;
    out.name = ec.name;
    out.report = report_skeleton(ec);
    out.report["per_n"] = per_n;
    out.report["trend"] = trend;
    out.report["trend_z_one_sided"] = kZOneSided99;
    out.report["verdicts"]["strictly_decreasing_trend"] = strictly_decreasing;
    out.samples_csv = csv.str();

    std::vector<double> xs, ys, lo, hi;
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        xs.push_back(n_values[i]);
        ys.push_back(per_n[i]["phat"].get<double>());
        lo.push_back(per_n[i]["wilson95_lo"].get<double>());
        hi.push_back(per_n[i]["wilson95_hi"].get<double>());
    }
    out.plot_svg = trend_plot_svg(xs, ys, lo, hi, "midpoint-on-geodesic probability vs n");
    return out;
}

// ------------------------------------------------------------ coalescence

// Fraction of replicates whose L-extremal proxies from 0 and from d*e1
// coalesce strictly below line n/2, per (n, d).
inline ExperimentReport coalescence_curve(const Config& cfg)
{
    ExperimentConfig ec = common_config(cfg, "coalescence", 400);
    const std::vector<int> n_values = scale_list(cfg, "n_values", {32, 64, 128});
    std::vector<int> d_values;
    for (long long d : cfg.get_int_list("d_values", {0, 4})) {
        if (d < 0) throw ConfigError("config: d_values must be >= 0");
        d_values.push_back(static_cast<int>(d));
    }
    const SectorSpec sector = sector_from_config(cfg, wide_sector());
    cfg.reject_unknown();

    const long long reps = ec.replicates;
    const int d_max = *std::max_element(d_values.begin(), d_values.end());
    CsvWriter csv({"n_target", "d", "replicate", "seed", "coalesced", "z_x", "z_y"});
    nlohmann::json per_cell = nlohmann::json::array();
    std::map<int, std::vector<long long>> successes_by_d;  // d -> per-n counts

    struct Slot {
        std::uint64_t seed = 0;
        std::vector<std::uint8_t> early;
        std::vector<Point> z;
    };

    for (int n : n_values) {
        const IntRect box{-n - 8, n + d_max + 8, -std::max(8, n / 8), n};
        std::vector<Slot> slots(reps);
        parallel_for(static_cast<std::size_t>(reps), ec.workers, [&](std::size_t r) {
            Slot& s = slots[r];
            s.seed = derive_seed(derive_seed(ec.seed_base, static_cast<std::uint64_t>(n)),
                                 static_cast<std::uint64_t>(r));
            const WeightField field(box, s.seed, ec.dist);
            const ExtremalProxy p0 =
                extremal_proxy(field, {0, 0}, Side::L, sector, n, Restriction::Full);
            for (int d : d_values) {
                const ExtremalProxy pd =
                    extremal_proxy(field, {d, 0}, Side::L, sector, n, Restriction::Full);
                const std::optional<Point> z = coalescence_point(p0.path, pd.path);
                if (!z)
                    throw InvariantViolation(
                        "coalescence: proxies sharing a target failed to coalesce");
                if (d == 0 && !(z->y < n / 2))
                    throw InvariantViolation("coalescence: d = 0 must coalesce at the start");
                s.early.push_back(z->y < n / 2 ? 1 : 0);
                s.z.push_back(*z);
            }
        });

        for (std::size_t di = 0; di < d_values.size(); ++di) {
            long long k = 0;
            for (long long r = 0; r < reps; ++r) {
                const Slot& s = slots[r];
                k += s.early[di];
                csv.row({CsvWriter::cell(n), CsvWriter::cell(d_values[di]), CsvWriter::cell(r),
                         CsvWriter::cell(s.seed), CsvWriter::cell(static_cast<int>(s.early[di])),
                         CsvWriter::cell(s.z[di].x), CsvWriter::cell(s.z[di].y)});
            }
            successes_by_d[d_values[di]].push_back(k);
            nlohmann::json row = proportion_json(k, reps);
            row["n_target"] = n;
            row["d"] = d_values[di];
            per_cell.push_back(std::move(row));
        }
    }

    ExperimentReport out;
    out.name = ec.name;
    out.report = report_skeleton(ec);
    out.report["per_cell"] = per_cell;
    bool all_nondecreasing = true;
    nlohmann::json trend = nlohmann::json::array();
    for (int d : d_values) {
        const std::vector<long long>& ks = successes_by_d[d];
        for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
            const TrendComparison t = compare_proportions(ks[i], reps, ks[i + 1], reps);
            // Nondecreasing = no statistically significant decrease.
            all_nondecreasing = all_nondecreasing && !t.significantly_decreasing;
            trend.push_back({{"d", d},
                             {"n_from", n_values[i]},
                             {"n_to", n_values[i + 1]},
                             {"significantly_decreasing", t.significantly_decreasing}});
        }
    }
    out.report["trend"] = trend;
    out.report["verdicts"]["nondecreasing_trend"] = all_nondecreasing;
    out.samples_csv = csv.str();

    std::vector<double> xs, ys, lo, hi;
    const int d_plot = d_max;
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        const long long k = successes_by_d[d_plot][i];
        const auto [wl, wh] = wilson_interval(k, reps);
        xs.push_back(n_values[i]);
        ys.push_back(static_cast<double>(k) / static_cast<double>(reps));
        lo.push_back(wl);
        hi.push_back(wh);
    }
    out.plot_svg = trend_plot_svg(xs, ys, lo, hi,
                                  "early-coalescence fraction vs n (d = " +
                                      std::to_string(d_plot) + ")");
    return out;
}

// --------------------------------------------------------------- halffull

// Among replicates whose full-plane L-proxy from 0 stays in the upper half
// plane, the fraction whose path equals the half-plane L-proxy on the same
// field, per scale.
inline ExperimentReport half_full_equality(const Config& cfg)
{
    ExperimentConfig ec = common_config(cfg, "halffull", 400);
    const std::vector<int> n_values = scale_list(cfg, "n_values", {32, 64});
    const SectorSpec sector = sector_from_config(cfg, wide_sector());
    cfg.reject_unknown();

    const long long reps = ec.replicates;
    CsvWriter csv({"n_target", "replicate", "seed", "in_halfplane", "equal"});
    nlohmann::json per_n = nlohmann::json::array();
    std::vector<long long> eq_counts, in_counts;

    for (int n : n_values) {
        const IntRect box{-n - 8, n + 8, -std::max(16, n / 4), n};
        struct Slot {
            std::uint64_t seed = 0;
            bool in_h = false, equal = false;
        };
        std::vector<Slot> slots(reps);
        parallel_for(static_cast<std::size_t>(reps), ec.workers, [&](std::size_t r) {
            Slot& s = slots[r];
            s.seed = derive_seed(derive_seed(ec.seed_base, static_cast<std::uint64_t>(n)),
                                 static_cast<std::uint64_t>(r));
            const WeightField field(box, s.seed, ec.dist);
            const ExtremalProxy full =
                extremal_proxy(field, {0, 0}, Side::L, sector, n, Restriction::Full);
            s.in_h = std::all_of(full.path.vertices.begin(), full.path.vertices.end(),
                                 [](Point v) { return v.y >= 0; });
            if (!s.in_h) return;  // excluded from the denominator
            const ExtremalProxy half =
                extremal_proxy(field, {0, 0}, Side::L, sector, n, Restriction::HalfPlane);
            s.equal = full.path.vertices == half.path.vertices;
            if (s.equal && full.path.time != half.path.time)
                throw InvariantViolation("halffull: equal paths with different times");
        });

        long long in_h = 0, eq = 0;
        for (long long r = 0; r < reps; ++r) {
            const Slot& s = slots[r];
            in_h += s.in_h;
            eq += s.in_h && s.equal;
            csv.row({CsvWriter::cell(n), CsvWriter::cell(r), CsvWriter::cell(s.seed),
                     CsvWriter::cell(static_cast<int>(s.in_h)),
                     s.in_h ? CsvWriter::cell(static_cast<int>(s.equal)) : ""});
        }
        in_counts.push_back(in_h);
        eq_counts.push_back(eq);
        nlohmann::json row = proportion_json(eq, in_h);
        row["n_target"] = n;
        row["conditioned_in"] = in_h;
        row["total"] = reps;
        per_n.push_back(std::move(row));
    }

    ExperimentReport out;
    out.name = ec.name;
    out.report = report_skeleton(ec);
    out.report["per_n"] = per_n;
    nlohmann::json trend = nlohmann::json::array();
    bool nondecreasing = true;
    bool trend_defined = true;
    for (std::size_t i = 0; i + 1 < n_values.size(); ++i) {
        if (in_counts[i] == 0 || in_counts[i + 1] == 0) {
            trend_defined = false;
            continue;
        }
        const TrendComparison t =
            compare_proportions(eq_counts[i], in_counts[i], eq_counts[i + 1], in_counts[i + 1]);
        nondecreasing = nondecreasing && !t.significantly_decreasing;
        trend.push_back({{"n_from", n_values[i]},
                         {"n_to", n_values[i + 1]},
                         {"significantly_decreasing", t.significantly_decreasing}});
    }
    out.report["trend"] = trend;
    if (trend_defined)
        out.report["verdicts"]["nondecreasing_trend"] = nondecreasing;
    else
        out.report["verdicts"]["nondecreasing_trend"] = nullptr;
    out.samples_csv = csv.str();
    return out;
}

// ------------------------------------------------------------ competition

// Two-source competition: partition of the box by passage-time argmin, with
// ties resolved toward the (y,x)-first source; the interface is the dual
// path across bichromatic primal edges.
inline ExperimentReport competition_interface(const Config& cfg)
{
    ExperimentConfig ec = common_config(cfg, "competition", 50);
    const int radius = static_cast<int>(cfg.get_int("box_radius", 16));
    const Point s1 = point_from_config(cfg, "source1", {-5, 0});
    const Point s2 = point_from_config(cfg, "source2", {5, 0});
    cfg.reject_unknown();
    if (radius < 1) throw ConfigError("config: box_radius must be >= 1");
    const IntRect box = IntRect::square(radius);
    if (!box.contains(s1) || !box.contains(s2))
        throw ConfigError("config: sources must lie inside the box");
    if (s1 == s2) throw ConfigError("config: two distinct sources are required");
    const Point sa = yx_less(s1, s2) ? s1 : s2;  // tie-winner
    const Point sb = yx_less(s1, s2) ? s2 : s1;

    const long long reps = ec.replicates;
    const int W = box.width(), H = box.height();
    const auto idx = [&](Point p) { return (p.y - box.ylo) * W + (p.x - box.xlo); };

    struct Slot {
        std::uint64_t seed = 0;
        long long ties = 0;
        std::vector<std::uint8_t> owner;         // 0 = sa, 1 = sb
        std::vector<Point> interface_ends;       // odd-degree dual vertices
        std::vector<DualEdge> interface_edges;
        double end_arg1 = 0, end_arg2 = 0;
    };
    std::vector<Slot> slots(reps);

    parallel_for(static_cast<std::size_t>(reps), ec.workers, [&](std::size_t r) {
        Slot& s = slots[r];
        s.seed = derive_seed(ec.seed_base, static_cast<std::uint64_t>(r));
        const WeightField field(box, s.seed, ec.dist);
        const ShortestPathMap ma = shortest_paths(field, sa, Restriction::Full);
        const ShortestPathMap mb = shortest_paths(field, sb, Restriction::Full);

        s.owner.assign(static_cast<std::size_t>(W) * H, 0);
        std::vector<long long> count(2, 0);
        for (int y = box.ylo; y <= box.yhi; ++y)
            for (int x = box.xlo; x <= box.xhi; ++x) {
                const Point p{x, y};
                if (!ma.reached(p) || !mb.reached(p))
                    throw InvariantViolation("competition: box vertex left unlabelled");
                const double da = ma.dist(p), db = mb.dist(p);
                std::uint8_t o;
                if (da < db) {
                    o = 0;
                } else if (db < da) {
                    o = 1;
                } else {
                    o = 0;  // exact tie goes to the (y,x)-first source
                    ++s.ties;
                }
                s.owner[idx(p)] = o;
                ++count[o];
            }
        if (count[0] + count[1] != static_cast<long long>(W) * H)
            throw InvariantViolation("competition: clusters do not partition the box");

        // Each cluster must be connected: flood from its source.
        for (int which = 0; which < 2; ++which) {
            const Point src = which == 0 ? sa : sb;
            std::vector<std::uint8_t> seen(static_cast<std::size_t>(W) * H, 0);
            std::queue<Point> q;
            q.push(src);
            seen[idx(src)] = 1;
            long long visited = 0;
            while (!q.empty()) {
                const Point p = q.front();
                q.pop();
                ++visited;
                const Point nb[4] = {{p.x + 1, p.y}, {p.x - 1, p.y}, {p.x, p.y + 1}, {p.x, p.y - 1}};
                for (Point v : nb)
                    if (box.contains(v) && !seen[idx(v)] && s.owner[idx(v)] == which) {
                        seen[idx(v)] = 1;
                        q.push(v);
                    }
            }
            if (visited != count[which])
                throw InvariantViolation("competition: infected cluster is disconnected");
        }

        // Interface: duals of bichromatic primal edges; a dual edge with
        // anchor a joins dual vertices a and a + (its direction).
        std::unordered_map<Point, int, PointHash> degree;
        for (const EdgeId& e : edges_in(box))
            if (s.owner[idx(e.a())] != s.owner[idx(e.b())]) {
                const DualEdge d = to_dual(e);
                s.interface_edges.push_back(d);
                const Point other = d.dir == Orientation::Horizontal
                                        ? Point{d.anchor.x + 1, d.anchor.y}
                                        : Point{d.anchor.x, d.anchor.y + 1};
                ++degree[d.anchor];
                ++degree[other];
            }
        for (const auto& [v, deg] : degree)
            if (deg % 2 == 1) s.interface_ends.push_back(v);
        if (s.interface_ends.size() != 2)
            throw InvariantViolation("competition: interface is not a single dual path");
        std::sort(s.interface_ends.begin(), s.interface_ends.end(), yx_less);
        const auto dual_arg = [](Point v) {
            double a = std::atan2(v.y + 0.5, v.x + 0.5);
            if (a < 0) a += kTwoPi;
            return a;
        };
        s.end_arg1 = dual_arg(s.interface_ends[0]);
        s.end_arg2 = dual_arg(s.interface_ends[1]);
    });

    CsvWriter csv({"replicate", "seed", "interface_edges", "ties", "end1_arg", "end2_arg"});
    OnlineStats length_stats;
    long long total_ties = 0;
    for (long long r = 0; r < reps; ++r) {
        const Slot& s = slots[r];
        length_stats.add(static_cast<double>(s.interface_edges.size()));
        total_ties += s.ties;
        csv.row({CsvWriter::cell(r), CsvWriter::cell(s.seed),
                 CsvWriter::cell(static_cast<long long>(s.interface_edges.size())),
                 CsvWriter::cell(s.ties), CsvWriter::cell(s.end_arg1),
                 CsvWriter::cell(s.end_arg2)});
    }

    ExperimentReport out;
    out.name = ec.name;
    out.report = report_skeleton(ec);
    out.report["sources"] = {to_json(sa), to_json(sb)};
    out.report["box_radius"] = radius;
    out.report["interface_length"] = stats_json(length_stats);
    out.report["ties_total"] = total_ties;  // exact float collisions, logged
    out.report["verdicts"]["partition_ok"] = true;
    out.report["verdicts"]["clusters_connected"] = true;
    out.report["verdicts"]["single_interface"] = true;
    out.samples_csv = csv.str();

    // Plot the first replicate: ownership dots plus the interface path.
    {
        const Slot& s = slots[0];
        SvgCanvas canvas(box.xlo - 1, box.xhi + 1, box.ylo - 1, box.yhi + 1);
        for (int y = box.ylo; y <= box.yhi; ++y)
            for (int x = box.xlo; x <= box.xhi; ++x)
                canvas.circle({static_cast<double>(x), static_cast<double>(y)}, 1.5,
                              s.owner[idx({x, y})] ? "#fb8500" : "#1f6feb");
        for (const DualEdge& d : s.interface_edges) {
            const Vec2 a{d.anchor.x + 0.5, d.anchor.y + 0.5};
            const Vec2 b = d.dir == Orientation::Horizontal ? Vec2{a.x + 1.0, a.y}
                                                            : Vec2{a.x, a.y + 1.0};
            canvas.line(a, b, "#111111", 2.0);
        }
        canvas.circle({static_cast<double>(sa.x), static_cast<double>(sa.y)}, 4.0, "#1f6feb");
        canvas.circle({static_cast<double>(sb.x), static_cast<double>(sb.y)}, 4.0, "#fb8500");
        out.plot_svg = canvas.str();
    }
    return out;
}

// ------------------------------------------------------------- ferromagnet

// Dual-bond couplings induce a weight field by assigning each primal edge
// the coupling of its crossing dual edge.
inline ExplicitField ferromagnet_weight_map(
    const IntRect& box, const std::unordered_map<DualEdge, double, DualEdgeHash>& couplings)
{
    std::unordered_map<EdgeId, double, EdgeIdHash> weights;
    for (const EdgeId& e : edges_in(box)) {
        const auto it = couplings.find(to_dual(e));
        if (it == couplings.end())
            throw std::invalid_argument("ferromagnet_weight_map: missing coupling for a dual edge");
        if (!(it->second > 0.0))
            throw std::invalid_argument("ferromagnet_weight_map: nonpositive coupling");
        weights.emplace(e, it->second);
    }
    return ExplicitField(box, std::move(weights));
}

// CLI demo around the mapping: build couplings from a reference field, map
// them back, and verify the round trip is exact down to geodesics.
inline ExperimentReport ferromagnet_experiment(const Config& cfg)
{
    ExperimentConfig ec = common_config(cfg, "ferromap", 1);
    const int n = static_cast<int>(cfg.get_int("n", 8));
    cfg.reject_unknown();
    if (n < 1) throw ConfigError("config: n must be >= 1");

    const IntRect box = IntRect::square(n);
    const WeightField ref(box, ec.seed_base, ec.dist);
    std::unordered_map<DualEdge, double, DualEdgeHash> couplings;
    for (const EdgeId& e : edges_in(box)) couplings.emplace(to_dual(e), ref.weight(e));
    const ExplicitField mapped = ferromagnet_weight_map(box, couplings);

    CsvWriter csv({"anchor_x", "anchor_y", "orientation", "weight"});
    for (const EdgeId& e : edges_in(box)) {
        if (!(to_primal(to_dual(e)) == e))
            throw InvariantViolation("ferromap: dual-primal round trip changed an edge");
        if (mapped.weight(e) != ref.weight(e))
            throw InvariantViolation("ferromap: mapped weight differs from the source weight");
        csv.row({CsvWriter::cell(e.anchor.x), CsvWriter::cell(e.anchor.y),
                 e.dir == Orientation::Horizontal ? "h" : "v",
                 CsvWriter::cell(mapped.weight(e))});
    }

    const Geodesic g_ref = geodesic(ref, {-n, -n}, {n, n}, Restriction::Full);
    const Geodesic g_map = geodesic(mapped, {-n, -n}, {n, n}, Restriction::Full);
    if (g_ref.vertices != g_map.vertices || g_ref.time != g_map.time)
        throw InvariantViolation("ferromap: geodesics differ between mapped and direct fields");

    ExperimentReport out;
    out.name = ec.name;
    out.report = report_skeleton(ec);
    out.report["edges"] = static_cast<long long>(edges_in(box).size());
    out.report["corner_geodesic"] = to_json(g_ref);
    out.report["verdicts"]["round_trip_exact"] = true;
    out.report["verdicts"]["field_equal"] = true;
    out.report["verdicts"]["geodesic_equal"] = true;
    out.samples_csv = csv.str();
    return out;
}

// -------------------------------------------------------------- ordering

// Same-source L/R extremal proxies compared on a stable band of lines, with
// the opposite-order criterion as a duality cross-check.
inline ExperimentReport ordering_totality(const Config& cfg)
{
    ExperimentConfig ec = common_config(cfg, "ordering", 300);
    const int n = static_cast<int>(cfg.get_int("n_target", 96));
    const SectorSpec sector = sector_from_config(cfg, wide_sector());
    const int lo = static_cast<int>(cfg.get_int("range_lo", n / 4));
    const int hi = static_cast<int>(cfg.get_int("range_hi", n / 2));
    cfg.reject_unknown();
    if (n < 4) throw ConfigError("config: n_target must be >= 4");
    if (!(0 < lo && lo <= hi && hi < n))
        throw ConfigError("config: need 0 < range_lo <= range_hi < n_target");

    const long long reps = ec.replicates;
    const IntRect box{-n - 8, n + 8, -std::max(16, n / 8), n};
    struct Slot {
        std::uint64_t seed = 0;
        OrderVerdict v, vd;
        bool l0_return = false;  // some path re-enters {y <= 0} after leaving
    };
    std::vector<Slot> slots(reps);
    parallel_for(static_cast<std::size_t>(reps), ec.workers, [&](std::size_t r) {
        Slot& s = slots[r];
        s.seed = derive_seed(ec.seed_base, static_cast<std::uint64_t>(r));
        const WeightField field(box, s.seed, ec.dist);
        const Geodesic gl =
            extremal_proxy(field, {0, 0}, Side::L, sector, n, Restriction::Full).path;
        const Geodesic gr =
            extremal_proxy(field, {0, 0}, Side::R, sector, n, Restriction::Full).path;
        s.v = compare(gl, gr, lo, hi, OrderCriterion::LeftmostIntersection);
        s.vd = compare(gl, gr, lo, hi, OrderCriterion::RightmostIntersection);
        const auto returns_to_l0 = [](const Geodesic& g) {
            bool left = false;
            for (Point p : g.vertices) {
                if (p.y > 0) left = true;
                else if (left) return true;
            }
            return false;
        };
        s.l0_return = returns_to_l0(gl) || returns_to_l0(gr);
    });

    const auto flipped = [](Relation rel) {
        if (rel == Relation::LeftPrecedes) return Relation::RightPrecedes;
        if (rel == Relation::RightPrecedes) return Relation::LeftPrecedes;
        return rel;
    };

    CsvWriter csv({"replicate", "seed", "relation", "first_stable_line", "dual_relation",
                   "dual_agrees"});
    nlohmann::json records = nlohmann::json::array();
    long long determinate = 0, dual_agree = 0;
    long long undet = 0, undet_with_return = 0;  // flip diagnostic
    for (long long r = 0; r < reps; ++r) {
        const Slot& s = slots[r];
        const bool det = s.v.relation != Relation::Undetermined;
        const bool agrees = det && s.vd.relation == flipped(s.v.relation);
        determinate += det;
        dual_agree += agrees;
        if (!det) {
            ++undet;
            undet_with_return += s.l0_return;
        }
        records.push_back(verdict_record(s.seed, n, s.v));
        csv.row({CsvWriter::cell(r), CsvWriter::cell(s.seed), to_string(s.v.relation),
                 CsvWriter::cell(s.v.first_stable_line), to_string(s.vd.relation),
                 CsvWriter::cell(static_cast<int>(agrees))});
    }

    const double min_det = ec.tolerances.count("min_determinate")
                               ? ec.tolerances.at("min_determinate")
                               : 0.95;
    ExperimentReport out;
    out.name = ec.name;
    out.report = report_skeleton(ec);
    out.report["n_target"] = n;
    out.report["range"] = {lo, hi};
    out.report["records"] = records;
    out.report["determinate"] = proportion_json(determinate, reps);
    out.report["duality"] = proportion_json(dual_agree, determinate);
    out.report["undetermined"] = undet;
    out.report["undetermined_with_l0_return"] = undet_with_return;
    out.report["verdicts"]["determinate_fraction_ok"] =
        static_cast<double>(determinate) >= min_det * static_cast<double>(reps);
    out.report["verdicts"]["duality_agrees_on_determinate"] = dual_agree == determinate;
    out.samples_csv = csv.str();
    return out;
}

// ----------------------------------------------------------------- deltah

// Difference of the L- and R-side Busemann estimates for (x, y) in the half
// plane, sector-directed; reports the mean against zero.
inline ExperimentReport delta_h_experiment(const Config& cfg)
{
    ExperimentConfig ec = common_config(cfg, "deltah", 500);
    const int n = static_cast<int>(cfg.get_int("n_target", 128));
    const double half_width = cfg.get_double("sector_halfwidth", kDeltaSectorHalfWidth);
    const SectorSpec sector = sector_from_config(cfg, default_delta_sector(half_width));
    const Point x = point_from_config(cfg, "x", {0, 0});
    const Point y = point_from_config(cfg, "y", {1, 0});
    cfg.reject_unknown();
    if (n < 4) throw ConfigError("config: n_target must be >= 4");
    if (x.y < 0 || y.y < 0) throw ConfigError("config: x and y must lie in the half plane");

    // Box sized to the sector arc plus room for wandering.
    const double c1 = std::cos(sector.theta1) / std::sin(sector.theta1);
    const double c2 = std::cos(sector.theta2) / std::sin(sector.theta2);
    const int arc_lo = static_cast<int>(std::floor(n * std::min(c1, c2)));
    const int arc_hi = static_cast<int>(std::ceil(n * std::max(c1, c2)));
    const IntRect box{std::min({arc_lo, x.x, y.x}) - 16, std::max({arc_hi, x.x, y.x}) + 16, 0, n};
    if (!in_domain(x, box, Restriction::HalfPlane) || !in_domain(y, box, Restriction::HalfPlane))
        throw ConfigError("config: x or y outside the half-plane box");

    const long long reps = ec.replicates;
    struct Slot {
        std::uint64_t seed = 0;
        BusemannSample left, right;
        std::optional<double> delta;
    };
    std::vector<Slot> slots(reps);
    parallel_for(static_cast<std::size_t>(reps), ec.workers, [&](std::size_t r) {
        Slot& s = slots[r];
        s.seed = derive_seed(ec.seed_base, static_cast<std::uint64_t>(r));
        const WeightField field(box, s.seed, ec.dist);
        const ExtremalProxy pl =
            extremal_proxy(field, y, Side::L, sector, n, Restriction::HalfPlane);
        const ExtremalProxy pr =
            extremal_proxy(field, y, Side::R, sector, n, Restriction::HalfPlane);
        s.left = busemann_along(field, x, y, pl.path.vertices, Restriction::HalfPlane,
                                BusemannSide::L);
        s.right = busemann_along(field, x, y, pr.path.vertices, Restriction::HalfPlane,
                                 BusemannSide::R);
        if (s.left.converged_value && s.right.converged_value)
            s.delta = *s.left.converged_value - *s.right.converged_value;
        // The crossing bound |B| <= T(x,y) must hold on every value.
        const double txy = passage_time(field, x, y, Restriction::HalfPlane);
        for (double v : s.left.values)
            if (std::fabs(v) > txy)
                throw InvariantViolation("deltah: Busemann value exceeds the direct time");
        for (double v : s.right.values)
            if (std::fabs(v) > txy)
                throw InvariantViolation("deltah: Busemann value exceeds the direct time");
    });

    CsvWriter csv(busemann_csv_header());
    OnlineStats delta_stats;
    long long zero = 0, unconverged = 0;
    for (long long r = 0; r < reps; ++r) {
        const Slot& s = slots[r];
        append_busemann_row(csv, s.seed, s.left);
        append_busemann_row(csv, s.seed, s.right);
        if (s.delta) {
            delta_stats.add(*s.delta);
            zero += *s.delta == 0.0;
        } else {
            ++unconverged;
        }
    }

    ExperimentReport out;
    out.name = ec.name;
    out.report = report_skeleton(ec);
    out.report["n_target"] = n;
    out.report["sector"] = {sector.theta1, sector.theta2};
    out.report["x"] = to_json(x);
    out.report["y"] = to_json(y);
    out.report["delta"] = stats_json(delta_stats);
    out.report["unconverged"] = unconverged;
    out.report["zero_fraction"] =
        delta_stats.count() ? static_cast<double>(zero) / delta_stats.count() : 0.0;
    const double mean = delta_stats.count() ? delta_stats.mean() : 0.0;
    const double se = delta_stats.count() > 1 ? delta_stats.std_error() : 0.0;
    out.report["verdicts"]["mean_nonpositive_3sigma"] = mean <= 3.0 * se;
    out.report["verdicts"]["ci99_contains_zero"] = std::fabs(mean) <= kZ99 * se;
    out.samples_csv = csv.str();
    return out;
}

// ------------------------------------------------------------------ shape

inline ExperimentReport shape_experiment(const Config& cfg)
{
    ExperimentConfig ec = common_config(cfg, "shape", 64);
    const int n = static_cast<int>(cfg.get_int("n", 48));
    cfg.reject_unknown();
    if (n < 2) throw ConfigError("config: n must be >= 2");

    const FieldFamily family(IntRect::square(n), ec.dist, ec.seed_base);
    const std::vector<double> thetas = default_directions();
    ShapeEstimate est;
    est.n = n;
    est.replicates = static_cast<int>(ec.replicates);
    est.directions.resize(thetas.size());
    parallel_for(thetas.size(), ec.workers, [&](std::size_t i) {
        const GEstimate g = estimate_g(family, thetas[i], n, est.replicates);
        est.directions[i] = {thetas[i], g.ghat, g.ci};
    });

    CsvWriter csv({"theta", "ghat", "ci", "n", "replicates"});
    for (const DirectionEstimate& d : est.directions)
        csv.row({CsvWriter::cell(d.theta), CsvWriter::cell(d.ghat), CsvWriter::cell(d.ci),
                 CsvWriter::cell(n), CsvWriter::cell(ec.replicates)});

    // Symmetry of the estimated norm across the diagonal, in sigma units.
    double max_sigma = 0.0, max_abs = 0.0;
    bool within_ci = true;
    const std::size_t m = est.directions.size();
    for (std::size_t i = 0; i < m / 2; ++i) {
        const DirectionEstimate& a = est.directions[i];          // theta
        const DirectionEstimate& b = est.directions[m - 1 - i];  // pi/2 - theta
        const double diff = std::fabs(a.ghat - b.ghat);
        const double se = std::sqrt(a.ci * a.ci + b.ci * b.ci) / kZ95;
        max_abs = std::max(max_abs, diff);
        if (se > 0) max_sigma = std::max(max_sigma, diff / se);
        if (diff > a.ci + b.ci) within_ci = false;
    }
    if (max_sigma > 5.0)
        throw InvariantViolation("shape: diagonal symmetry broken beyond 5 sigma");
    for (const DirectionEstimate& d : est.directions)
        if (!(d.ghat > 0.0)) throw InvariantViolation("shape: nonpositive norm estimate");

    const TangentLine tangent = fit_tangent(est, kPi / 4.0);

    ExperimentReport out;
    out.name = ec.name;
    out.report = report_skeleton(ec);
    out.report["n"] = n;
    out.report["symmetry_max_abs"] = max_abs;
    out.report["symmetry_max_sigma"] = max_sigma;
    out.report["tangent_pi_4"] = {{"rho", {tangent.rho.x, tangent.rho.y}},
                                  {"contact", {tangent.contact_sector.theta1,
                                               tangent.contact_sector.theta2}},
                                  {"degenerate", tangent.degenerate},
                                  {"tol", tangent.tol}};
    out.report["verdicts"]["symmetry_within_ci"] = within_ci;
    out.report["verdicts"]["all_positive"] = true;
    out.samples_csv = csv.str();
    out.plot_svg = shape_plot_svg(est);
    return out;
}

// -------------------------------------------------------------- dispatch

inline std::vector<std::string> experiment_names()
{
    return {"midpoint", "coalescence", "halffull", "competition",
            "ordering", "deltah",      "shape",    "ferromap"};
}

inline ExperimentReport run_experiment(const std::string& name, const Config& cfg)
{
    if (name == "midpoint") return midpoint_probability(cfg);
    if (name == "coalescence") return coalescence_curve(cfg);
    if (name == "halffull") return half_full_equality(cfg);
    if (name == "competition") return competition_interface(cfg);
    if (name == "ordering") return ordering_totality(cfg);
    if (name == "deltah") return delta_h_experiment(cfg);
    if (name == "shape") return shape_experiment(cfg);
    if (name == "ferromap") return ferromagnet_experiment(cfg);
    throw ConfigError("unknown experiment '" + name + "'");
}

}  // namespace fpp

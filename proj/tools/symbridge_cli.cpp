// Command-line front end: reproducible samplers, rate-function jobs, Bose-gas
// traces, and the acceptance verification suites.
//
// Exit codes: 0 pass, 1 usage/config, 2 numerical failure, 3 acceptance failure.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "symbridge/bosegas.hpp"
#include "symbridge/combinatorics.hpp"
#include "symbridge/ensemble.hpp"
#include "symbridge/kernels.hpp"
#include "symbridge/rates.hpp"
#include "symbridge/rng.hpp"
#include "symbridge/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace symbridge;

namespace {

constexpr const char* kVersion = "0.1.0";

// rng stream tags for the fan-out (documented in the README)
constexpr std::uint64_t kStreamSample = 1;
constexpr std::uint64_t kStreamMixture = 2;

struct GlobalOpts {
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_dir = ".";
};

void atomic_write(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw config_error("cannot write " + path.string());
        out << content;
    }
    fs::rename(tmp, path);
}

void write_manifest(const GlobalOpts& g, const std::string& command, const json& params,
                    const fs::path& prefix) {
    json m;
    m["command"] = command;
    m["version"] = kVersion;
    m["seed"] = g.seed;
    m["threads"] = g.threads;
    m["out_dir"] = g.out_dir;
    m["params"] = params;
    m["generated_at"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::system_clock::now().time_since_epoch())
                            .count();
    atomic_write(prefix.string() + ".manifest.json", m.dump(2) + "\n");
}

std::vector<std::pair<double, double>> parse_box(const std::string& spec) {
    std::vector<std::pair<double, double>> out;
    std::stringstream ss(spec);
    std::string axis;
    while (std::getline(ss, axis, ',')) {
        auto colon = axis.find(':');
        if (colon == std::string::npos)
            throw config_error("box axis must be lo:hi, got '" + axis + "'");
        out.emplace_back(std::stod(axis.substr(0, colon)), std::stod(axis.substr(colon + 1)));
    }
    if (out.empty() || out.size() > 3) throw config_error("box needs 1..3 axes");
    return out;
}

std::vector<int> parse_ints(const std::string& spec) {
    std::vector<int> out;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

PairMeasure load_pair_measure(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open pair measure file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return PairMeasure::from_json(ss.str());
}

// ---------------------------------------------------------------------------

InitialMeasure measure_from_spec(const std::string& atoms_file,
                                 const std::vector<double>& lo,
                                 const std::vector<double>& hi) {
    if (atoms_file.empty()) return InitialMeasure::uniform_box(lo, hi);
    std::ifstream in(atoms_file);
    if (!in) throw config_error("cannot open atoms file: " + atoms_file);
    json j = json::parse(in);
    auto pts = j.at("points").get<std::vector<std::vector<double>>>();
    auto wts = j.at("weights").get<std::vector<double>>();
    std::vector<Point> atoms;
    for (const auto& p : pts) {
        Point a{};
        for (size_t i = 0; i < p.size() && i < kMaxDim; ++i) a[i] = p[i];
        atoms.push_back(a);
    }
    return InitialMeasure::atoms(std::move(atoms), wts,
                                 static_cast<int>(pts.empty() ? 1 : pts[0].size()));
}

int run_sample(const GlobalOpts& g, int n, double beta, int steps, int ensembles,
               const std::string& box, const std::string& weight,
               const std::string& atoms_file, int hist_grid, bool dump_paths,
               const std::string& prefix_name) {
    auto axes = parse_box(box);
    std::vector<double> lo, hi;
    for (auto [a, b] : axes) {
        lo.push_back(a);
        hi.push_back(b);
    }
    const int dim = static_cast<int>(axes.size());
    InitialMeasure m = measure_from_spec(atoms_file, lo, hi);

    std::optional<LogPairWeight> gw;
    if (weight == "gauss-pair") {
        gw = [dim, beta](const Point& x, const Point& y) {
            return log_gaussian_pair(x, y, dim, beta);
        };
    } else if (weight == "inverse-gauss-pair") {
        gw = [dim, beta](const Point& x, const Point& y) {
            return -log_gaussian_pair(x, y, dim, beta);
        };
    } else if (weight != "none") {
        throw config_error("unknown weight '" + weight + "'");
    }

    std::optional<Grid> hist;
    if (hist_grid > 0)
        hist = Grid::make(dim, lo, hi, std::vector<int>(dim, hist_grid));

    fs::path prefix = fs::path(g.out_dir) / prefix_name;
    json params{{"n", n},       {"beta", beta},           {"steps", steps},
                {"ensembles", ensembles}, {"box", box},   {"weight", weight},
                {"atoms", atoms_file},    {"grid", hist_grid}, {"paths", dump_paths},
                {"prefix", prefix_name}};
    write_manifest(g, "sample", params, prefix);

    std::vector<std::string> lines(ensembles);
    std::ostringstream paths_bin;
    auto work = [&](int e) {
        CounterRng rng(CounterRng::derive_key(g.seed, kStreamSample, e));
        EnsembleSample s = sample_sym(m, n, beta, steps, gw ? &*gw : nullptr, rng);
        s.rng_key = CounterRng::derive_key(g.seed, kStreamSample, e);
        std::ostringstream line;
        if (hist) {
            Occupation occ = occupation(s, *hist);
            write_sample_jsonl(line, s, &occ);
        } else {
            write_sample_jsonl(line, s, nullptr);
        }
        lines[e] = line.str();
        return s;
    };

    if (g.threads <= 1 || ensembles == 1) {
        for (int e = 0; e < ensembles; ++e) {
            EnsembleSample s = work(e);
            if (dump_paths) append_paths_binary(paths_bin, s);
            if (dump_paths && e == ensembles - 1)
                atomic_write(prefix.string() + ".paths.json",
                             paths_sidecar_json(s, ensembles) + "\n");
        }
    } else {
        // deterministic ordered reduction: keys depend only on the index
        std::vector<std::thread> pool;
        std::vector<std::string> bins(ensembles);
        for (int w = 0; w < g.threads; ++w)
            pool.emplace_back([&, w]() {
                for (int e = w; e < ensembles; e += g.threads) {
                    EnsembleSample s = work(e);
                    if (dump_paths) {
                        std::ostringstream os;
                        append_paths_binary(os, s);
                        bins[e] = os.str();
                        if (e == ensembles - 1)
                            atomic_write(prefix.string() + ".paths.json",
                                         paths_sidecar_json(s, ensembles) + "\n");
                    }
                }
            });
        for (auto& t : pool) t.join();
        for (auto& b : bins) paths_bin << b;
    }

    std::string all;
    for (auto& l : lines) all += l;
    atomic_write(prefix.string() + ".jsonl", all);
    if (dump_paths) atomic_write(prefix.string() + ".paths.bin", paths_bin.str());
    return 0;
}

int run_mixture(const GlobalOpts& g, const std::string& eta_file, int n, double beta,
                int steps, int ensembles, const std::string& box,
                const std::string& cells, const std::string& prefix_name) {
    auto axes = parse_box(box);
    std::vector<double> lo, hi;
    for (auto [a, b] : axes) {
        lo.push_back(a);
        hi.push_back(b);
    }
    Partition part = Partition::uniform(lo, hi, parse_ints(cells));
    PairMeasure eta = load_pair_measure(eta_file);

    fs::path prefix = fs::path(g.out_dir) / prefix_name;
    json params{{"eta", eta_file}, {"n", n},       {"beta", beta},
                {"steps", steps},  {"box", box},   {"cells", cells},
                {"ensembles", ensembles}, {"prefix", prefix_name}};
    write_manifest(g, "mixture", params, prefix);

    std::string all;
    Eigen::MatrixXd agg = Eigen::MatrixXd::Zero(part.size(), part.size());
    for (int e = 0; e < ensembles; ++e) {
        CounterRng rng(CounterRng::derive_key(g.seed, kStreamMixture, e));
        EnsembleSample s = sample_mixture(eta, n, part, beta, steps, rng);
        s.rng_key = CounterRng::derive_key(g.seed, kStreamMixture, e);
        std::ostringstream line;
        write_sample_jsonl(line, s, nullptr);
        all += line.str();
        agg += endpoint_pairs(s, part).entries();
    }
    atomic_write(prefix.string() + ".jsonl", all);
    agg /= static_cast<double>(ensembles);
    atomic_write(prefix.string() + ".pairs.json", PairMeasure(agg).to_json() + "\n");
    return 0;
}

int run_rate(const GlobalOpts& g, const std::string& job_file, const std::string& track,
             const std::string& prefix_name) {
    std::ifstream in(job_file);
    if (!in) throw config_error("cannot open job file: " + job_file);
    json job = json::parse(in);

    for (const char* key : {"mode", "beta", "grid"})
        if (!job.contains(key))
            throw config_error(std::string("rate job: required key '") + key +
                               "' is missing (no silent physics defaults)");
    BridgeMode mode;
    std::string mode_s = job["mode"].get<std::string>();
    if (mode_s == "canonical") mode = BridgeMode::canonical;
    else if (mode_s == "normalized") mode = BridgeMode::normalized;
    else throw config_error("rate job: mode must be 'canonical' or 'normalized'");

    double beta = job["beta"].get<double>();
    Grid grid = [&] {
        json jg = job["grid"];
        int dim = jg.at("dim").get<int>();
        std::vector<int> n = jg.at("n").is_number_integer()
                                 ? std::vector<int>(dim, jg.at("n").get<int>())
                                 : jg.at("n").get<std::vector<int>>();
        return Grid::make(dim, jg.at("lo").get<std::vector<double>>(),
                          jg.at("hi").get<std::vector<double>>(), n);
    }();

    GridFunction pf = GridFunction::constant(grid, 0.0);
    if (job.contains("p_file")) {
        pf = load_grid_function(job["p_file"].get<std::string>());
        if (!(pf.grid == grid)) throw config_error("rate job: p_file grid mismatch");
    } else if (job.contains("p")) {
        pf = GridFunction(grid, job["p"].get<std::vector<double>>());
    } else {
        throw config_error("rate job: one of 'p' or 'p_file' is required");
    }
    auto p = DensityOnGrid::normalized(pf);

    std::vector<int> cells = job.contains("cells")
                                 ? job["cells"].get<std::vector<int>>()
                                 : std::vector<int>(grid.dim, 10);
    std::vector<double> lo(grid.lo.begin(), grid.lo.begin() + grid.dim);
    std::vector<double> hi(grid.hi.begin(), grid.hi.begin() + grid.dim);
    Partition part = Partition::uniform(lo, hi, cells);

    SaddleOptions opts;
    opts.steps = job.value("steps", 32);
    if (job.contains("tolerances")) {
        const json& t = job["tolerances"];
        opts.f_tol = t.value("f_tol", opts.f_tol);
        opts.max_f_iter = t.value("max_f_iter", opts.max_f_iter);
        opts.max_outer = t.value("max_outer", opts.max_outer);
    }
    std::optional<Eigen::MatrixXd> log_g;
    if (job.contains("log_g")) {
        auto rows = job["log_g"].get<std::vector<std::vector<double>>>();
        Eigen::MatrixXd lg(rows.size(), rows.size());
        for (size_t r = 0; r < rows.size(); ++r)
            for (size_t s = 0; s < rows.size(); ++s) lg(r, s) = rows[r][s];
        log_g = lg;
    }

    fs::path prefix = fs::path(g.out_dir) / prefix_name;
    write_manifest(g, "rate", job, prefix);

    try {
        SaddleState st = solve_J_sym(p, beta, part, mode, log_g, std::nullopt, opts);
        json out;
        out["value"] = st.value;
        out["iterations"] = st.outer_iterations;
        out["q"] = json::parse(st.q.to_json());
        out["f"] = st.f.values;
        out["diagnostics"] = {{"f_grad_norm", st.f_grad_norm},
                              {"marginal_gap", st.q.marginal_gap()},
                              {"track_length", st.value_track.size()}};
        atomic_write(prefix.string() + ".result.json", out.dump(2) + "\n");
        if (!track.empty()) {
            std::ostringstream csv;
            csv << "iteration,value\n";
            for (size_t i = 0; i < st.value_track.size(); ++i)
                csv << i << "," << st.value_track[i] << "\n";
            atomic_write(track, csv.str());
        }
        return 0;
    } catch (const solver_error& e) {
        std::ostringstream csv;
        csv << "iteration,value\n";
        for (size_t i = 0; i < e.value_track.size(); ++i)
            csv << i << "," << e.value_track[i] << "\n";
        atomic_write(prefix.string() + ".history.csv", csv.str());
        std::cerr << "numerical failure: " << e.what() << " (history written to "
                  << prefix.string() + ".history.csv)\n";
        return 2;
    }
}

int run_trace(const GlobalOpts& g, double beta, const std::string& box, int grid_n,
              const std::string& potential, int n_max, const std::string& format,
              const std::string& output, const std::string& prefix_name) {
    auto axes = parse_box(box);
    std::vector<double> lo, hi, lengths;
    for (auto [a, b] : axes) {
        lo.push_back(a);
        hi.push_back(b);
        lengths.push_back(b - a);
    }
    const int dim = static_cast<int>(axes.size());
    Grid grid = Grid::make(dim, lo, hi, std::vector<int>(dim, grid_n));

    GridFunction W = GridFunction::constant(grid, 0.0);
    bool zero_potential = potential == "zero";
    if (potential.rfind("quadratic:", 0) == 0) {
        double c = std::stod(potential.substr(10));
        for (int i = 0; i < grid.points(); ++i) {
            Point x = grid.coord(i);
            double r2 = 0.0;
            for (int a = 0; a < dim; ++a) {
                double mid = 0.5 * (grid.lo[a] + grid.hi[a]);
                r2 += (x[a] - mid) * (x[a] - mid);
            }
            W[i] = c * r2;
        }
    } else if (!zero_potential) {
        GridFunction loaded = load_grid_function(potential);
        if (!(loaded.grid == grid))
            throw config_error("trace: potential file grid must match --box/--grid");
        W = loaded;
    }

    // adaptive truncation: grow K until the recursion accepts the spectrum
    Spectrum spec;
    int k = 8;
    while (true) {
        spec = zero_potential ? analytic_box_spectrum(lengths, k) : spectrum(grid, W, k);
        try {
            partition_recursion(spec, beta, 1);
            break;
        } catch (const numerical_error&) {
            if (!zero_potential && k >= grid.points())
                throw;  // cannot extend a finite-difference spectrum further
            k *= 2;
        }
    }
    PartitionTable table = partition_recursion(spec, beta, n_max);

    // alternate reading beta lambda_Lambda(W) for the report
    double beta_lambda_w;
    if (zero_potential) {
        beta_lambda_w = -beta * spec.energies.front();
    } else {
        beta_lambda_w = beta * principal_eigen(grid, W).lambda;
    }
    LdpReport rep = ldp_check(table, spec, beta, beta_lambda_w);

    fs::path prefix = fs::path(g.out_dir) / prefix_name;
    json params{{"beta", beta},   {"box", box},     {"grid", grid_n},
                {"potential", potential}, {"n_max", n_max}, {"format", format},
                {"levels", static_cast<int>(spec.energies.size())},
                {"spectrum_source", spec.source}, {"prefix", prefix_name}};
    write_manifest(g, "trace", params, prefix);

    std::ostringstream body;
    if (format == "csv") {
        body << "N,logZ,a_N,target,deviation\n";
        for (int N = 1; N <= n_max; ++N)
            body << N << "," << table.logz[N] << "," << rep.a[N - 1] << "," << rep.target
                 << "," << rep.deviation[N - 1] << "\n";
    } else if (format == "json") {
        json out;
        out["beta"] = beta;
        out["target_minus_beta_E1"] = rep.target;
        out["beta_lambda_W"] = *rep.beta_lambda_w;
        out["slope_vs_logN_over_N"] = rep.slope;
        out["logZ"] = table.logz;
        out["a_N"] = rep.a;
        out["deviation"] = rep.deviation;
        out["energies"] = spec.energies;
        out["spectrum_source"] = spec.source;
        body << out.dump(2) << "\n";
    } else {
        throw config_error("trace: --out must be 'json' or 'csv'");
    }
    std::string target = output.empty()
                             ? prefix.string() + (format == "csv" ? ".csv" : ".json")
                             : output;
    atomic_write(target, body.str());
    std::cout << target << "\n";
    return 0;
}

int run_verify(const GlobalOpts& g, const std::string& suite, const std::string& out,
               int jident_grid, int jident_cells, int jident_steps, long long ensembles,
               int particles) {
    VerifyOptions opts;
    opts.seed = g.seed;
    opts.threads = g.threads;
    if (jident_grid > 0) opts.jident_grid = jident_grid;
    if (jident_cells > 0) opts.jident_cells = jident_cells;
    if (jident_steps > 0) opts.jident_steps = jident_steps;
    if (ensembles > 0) opts.lln_ensembles = ensembles;
    if (particles > 0) opts.lln_particles = particles;

    std::vector<Check> checks = verify_suite(suite, opts);
    std::string report = checks_to_json(checks);
    if (out.empty()) {
        std::cout << report << "\n";
    } else {
        atomic_write(out, report + "\n");
    }
    bool all_pass = true;
    for (const Check& c : checks) all_pass &= c.pass;
    return all_pass ? 0 : 3;
}

int run_count(const std::string& eta_file, long long n, const std::string& fixed_r,
              bool brute, long long round_n, long long stirling_n) {
    json out;
    if (stirling_n > 0) {
        StirlingSandwich s = stirling_sandwich(stirling_n);
        out["stirling"] = {{"n", stirling_n},
                           {"ratio", s.ratio},
                           {"lower", s.lower},
                           {"upper", s.upper},
                           {"within", s.within}};
    }
    if (!eta_file.empty()) {
        PairMeasure eta = load_pair_measure(eta_file);
        if (round_n > 0) {
            out["rounded"] = json::parse(round_pair_measure(eta, round_n).to_json());
            out["rounded"]["n"] = round_n;
        } else if (!fixed_r.empty()) {
            std::vector<int> R = parse_ints(fixed_r);
            FixedRCount c = count_sym_fixed_R(R, eta, n);
            out["count_fixed_R"] = c.count.str();
            out["marginal_mismatch"] = c.marginal_mismatch;
            if (brute)
                out["brute_fixed_R"] = brute_force_count_fixed_R(R, eta).str();
        } else {
            out["count_total"] = count_sym_total(eta, n).str();
            if (brute)
                out["brute_total"] = brute_force_count(static_cast<int>(n),
                                                       eta.sigma_size(), eta)
                                         .str();
        }
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_rerun(GlobalOpts g, const std::string& manifest_file) {
    std::ifstream in(manifest_file);
    if (!in) throw config_error("cannot open manifest: " + manifest_file);
    json m = json::parse(in);
    g.seed = m.at("seed").get<std::uint64_t>();
    g.threads = m.at("threads").get<int>();
    g.out_dir = m.at("out_dir").get<std::string>();
    const std::string cmd = m.at("command").get<std::string>();
    const json& p = m.at("params");
    if (cmd == "sample")
        return run_sample(g, p.at("n"), p.at("beta"), p.at("steps"), p.at("ensembles"),
                          p.at("box"), p.at("weight"), p.value("atoms", ""), p.at("grid"),
                          p.at("paths"), p.value("prefix", "sample"));
    if (cmd == "mixture")
        return run_mixture(g, p.at("eta"), p.at("n"), p.at("beta"), p.at("steps"),
                           p.at("ensembles"), p.at("box"), p.at("cells"),
                           p.value("prefix", "mixture"));
    if (cmd == "trace")
        return run_trace(g, p.at("beta"), p.at("box"), p.at("grid"), p.at("potential"),
                         p.at("n_max"), p.at("format"), "", p.value("prefix", "trace"));
    if (cmd == "rate") {
        // the rate manifest embeds the whole job; replay through a temp file
        fs::path tmp = fs::path(g.out_dir) / ".rerun_job.json";
        atomic_write(tmp, p.dump());
        int rc = run_rate(g, tmp.string(), "", "rate");
        fs::remove(tmp);
        return rc;
    }
    throw config_error("rerun: manifest command '" + cmd + "' is not replayable");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symmetrised Brownian-bridge ensembles: samplers, rate functions, "
                 "Bose-gas traces"};
    app.require_subcommand(1);

    GlobalOpts g;
    if (const char* env = std::getenv("SYMBRIDGE_OUT_DIR")) g.out_dir = env;
    if (const char* env = std::getenv("SYMBRIDGE_THREADS")) g.threads = std::atoi(env);
    app.add_option("--seed", g.seed, "master seed for the counter-based streams");
    app.add_option("--threads", g.threads, "worker count for ensemble batches");
    app.add_option("--out-dir", g.out_dir, "output directory");

    // sample
    auto* sample = app.add_subcommand("sample", "symmetrised ensemble sampler");
    int s_n = 0, s_steps = 64, s_ens = 1, s_grid = 0;
    double s_beta = 0.0;
    std::string s_box, s_weight = "none", s_prefix = "sample";
    bool s_paths = false;
    sample->add_option("--n", s_n, "particles per ensemble")->required();
    sample->add_option("--beta", s_beta, "time horizon")->required();
    sample->add_option("--box", s_box, "box lo:hi per axis, comma separated")->required();
    sample->add_option("--steps", s_steps, "time discretization (default 64)");
    sample->add_option("--ensembles", s_ens, "ensemble count");
    sample->add_option("--weight", s_weight, "pair weight: none|gauss-pair|inverse-gauss-pair");
    std::string s_atoms;
    sample->add_option("--atoms", s_atoms,
                       "atomic initial measure JSON {points:[[..]],weights:[..]} "
                       "(default: uniform on the box)");
    sample->add_option("--grid", s_grid, "occupation histogram resolution per axis");
    sample->add_flag("--paths", s_paths, "dump full paths as little-endian float64");
    sample->add_option("--prefix", s_prefix, "output file prefix");

    // mixture
    auto* mixture = app.add_subcommand("mixture", "coarsened cell-pair ensemble sampler");
    std::string m_eta, m_box, m_cells, m_prefix = "mixture";
    int m_n = 0, m_steps = 64, m_ens = 1;
    double m_beta = 0.0;
    mixture->add_option("--eta", m_eta, "pair measure JSON file")->required();
    mixture->add_option("--n", m_n, "paths per ensemble")->required();
    mixture->add_option("--beta", m_beta, "time horizon")->required();
    mixture->add_option("--box", m_box, "box lo:hi per axis")->required();
    mixture->add_option("--cells", m_cells, "cells per axis, comma separated")->required();
    mixture->add_option("--steps", m_steps, "time discretization (default 64)");
    mixture->add_option("--ensembles", m_ens, "ensemble count");
    mixture->add_option("--prefix", m_prefix, "output file prefix");

    // rate
    auto* rate = app.add_subcommand("rate", "variational rate-function solver");
    std::string r_job, r_track, r_prefix = "rate";
    rate->add_option("--job", r_job, "job JSON file")->required();
    rate->add_option("--track", r_track, "write value track CSV here");
    rate->add_option("--prefix", r_prefix, "output file prefix");

    // trace
    auto* trace = app.add_subcommand("trace", "canonical Bose-gas trace recursion");
    double t_beta = 0.0;
    std::string t_box, t_potential, t_format = "csv", t_output, t_prefix = "trace";
    int t_grid = 0, t_nmax = 0;
    trace->add_option("--beta", t_beta, "inverse temperature")->required();
    trace->add_option("--box", t_box, "box lo:hi per axis")->required();
    trace->add_option("--grid", t_grid, "grid points per axis")->required();
    trace->add_option("--potential", t_potential, "zero | quadratic:c | file.json")
        ->required();
    trace->add_option("--n-max", t_nmax, "largest particle number")->required();
    trace->add_option("--out", t_format, "output format: json|csv");
    trace->add_option("--output", t_output, "output path (default <prefix>.<fmt>)");
    trace->add_option("--prefix", t_prefix, "output file prefix");

    // verify
    auto* verify = app.add_subcommand("verify", "acceptance suites");
    std::string v_suite, v_out;
    int v_grid = 0, v_cells = 0, v_steps = 0, v_particles = 0;
    long long v_ens = 0;
    verify->add_option("--suite", v_suite, "counting|rounding|bridge|entropy|jident|lln|trace|all")
        ->required();
    verify->add_option("--out", v_out, "write the JSON report here");
    verify->add_option("--grid", v_grid, "jident grid override");
    verify->add_option("--cells", v_cells, "jident cell override");
    verify->add_option("--steps", v_steps, "jident step override");
    verify->add_option("--ensembles", v_ens, "lln ensemble override");
    verify->add_option("--particles", v_particles, "lln particle override");

    // rerun
    auto* rerun = app.add_subcommand("rerun", "replay a manifest byte-identically");
    std::string rr_manifest;
    rerun->add_option("--manifest", rr_manifest, "manifest JSON written by a previous run")
        ->required();

    // count
    auto* count = app.add_subcommand("count", "exact counting and rounding utilities");
    std::string c_eta, c_fixed;
    long long c_n = 0, c_round = 0, c_stirling = 0;
    bool c_brute = false;
    count->add_option("--eta", c_eta, "pair measure JSON file");
    count->add_option("--n", c_n, "particle count");
    count->add_option("--fixed-R", c_fixed, "label sequence, comma separated");
    count->add_flag("--brute", c_brute, "also run the literal enumeration oracle");
    count->add_option("--round", c_round, "round eta onto the (1/n)-grid");
    count->add_option("--stirling", c_stirling, "evaluate the Stirling sandwich at n");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        fs::create_directories(g.out_dir);
        if (app.got_subcommand(sample))
            return run_sample(g, s_n, s_beta, s_steps, s_ens, s_box, s_weight, s_atoms,
                              s_grid, s_paths, s_prefix);
        if (app.got_subcommand(mixture))
            return run_mixture(g, m_eta, m_n, m_beta, m_steps, m_ens, m_box, m_cells,
                               m_prefix);
        if (app.got_subcommand(rate)) return run_rate(g, r_job, r_track, r_prefix);
        if (app.got_subcommand(trace))
            return run_trace(g, t_beta, t_box, t_grid, t_potential, t_nmax, t_format,
                             t_output, t_prefix);
        if (app.got_subcommand(verify))
            return run_verify(g, v_suite, v_out, v_grid, v_cells, v_steps, v_ens,
                              v_particles);
        if (app.got_subcommand(count))
            return run_count(c_eta, c_n, c_fixed, c_brute, c_round, c_stirling);
        if (app.got_subcommand(rerun)) return run_rerun(g, rr_manifest);
    } catch (const solver_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const precondition_error& e) {
        std::cerr << "precondition violated: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

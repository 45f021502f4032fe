#include "lcid/cli.hpp"

#include "lcid/errors.hpp"
#include "lcid/estimate.hpp"
#include "lcid/identify.hpp"
#include "lcid/io.hpp"
#include "lcid/verification.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace lcid {

namespace {

constexpr const char* kVersion = "1.0.0";

struct Settings {
    std::uint64_t seed = 0;
    int threads = 0;
    bool noTimestamp = false;
    std::string out;
    std::string format = "json";
    std::string surfaceFormat = "csv";

    std::string params;
    std::string other;
    std::string surface;
    std::string surfaceNext;
    std::string grid;
    std::string stage2;
    std::string innovation = "gaussian";
    double df = 8.0;
    long reps = 10000;
    double k = 4.0;

    double mu = 0.1;
    double sigma2e = 1.0;
    double c = 0.0;
    int periods = 20;
    int forcedSteps = 5;

    double epsilonM = 1e-10;
    double delta = 1e-6;
    double searchDelta = 1e-3;
    double reportThreshold = 1e-6;
    int starts = 32;
    long maxEvaluations = 50000;
    bool liftExclusion = false;
    bool noisy = false;
    double zeroTol = 1e-10;
    double consistencyTol = 1e-8;
    bool quick = false;

    std::vector<double> beta{0.3, 0.7};
    std::vector<double> betaTilde{0.6, 0.4};
    std::vector<double> alpha{0.0, 0.0};
    double cMeans = 2.0;
    std::vector<double> betaShared{0.5, 0.5};
    std::vector<double> alphaShared{0.0, 0.0};
    double c0 = 0.0;
    int X = 3;
    int T = 5;
    double mu0 = 1.0;
    double mu1 = 2.0;
    double sigma2e0 = 1.0;
    double sigma2e1 = 2.0;
    double z = 0.5;
};

std::uint64_t default_seed() {
    if (const char* env = std::getenv("LCID_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw InputError(std::string("LCID_SEED is not an unsigned integer: ") + env);
        }
    }
    return 0;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

void collect_options(const CLI::App* app, Json& cfg) {
    for (const CLI::Option* opt : app->get_options()) {
        if (opt->get_lnames().empty()) continue;
        const std::string& name = opt->get_lnames().front();
        if (name == "help" || name == "out") continue;
        if (opt->get_expected_min() == 0) {
            cfg[name] = opt->count() > 0;
        } else if (opt->count() > 0) {
            const auto& r = opt->results();
            if (r.size() == 1) {
                cfg[name] = r.front();
            } else {
                cfg[name] = r;
            }
        } else if (!opt->get_default_str().empty()) {
            cfg[name] = opt->get_default_str();
        } else {
            cfg[name] = nullptr;
        }
    }
}

void require_valid(const ParamFile& pf) {
    const ValidationVerdict v = validate(pf.params, pf.dims);
    if (!v.ok()) throw InputError("invalid parameters: " + v.violations.front());
}

class Runner {
public:
    Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

    int execute(std::vector<std::string> args);

private:
    Json header(const std::string& command) const;
    void emit(const std::string& text) const;
    void emit_json(const std::string& command, Json body) const;
    std::string config_comment(const std::string& command) const;
    SimulationOptions simulation_options() const;

    void cmd_moments();
    void cmd_simulate();
    void cmd_mc_validate();
    void cmd_fit();
    void cmd_demo_distributional();
    void cmd_demo_dynamic();
    void cmd_check();
    void cmd_counterexample(const std::string& which);
    void cmd_recover();
    void cmd_search();
    int cmd_theorems();

    std::ostream& out_;
    std::ostream& err_;
    Settings s_;
    std::vector<const CLI::App*> chain_;
};

Json Runner::header(const std::string& command) const {
    Json cfg = Json::object();
    for (const CLI::App* app : chain_) collect_options(app, cfg);
    Json run = {{"tool", "lcid"}, {"version", kVersion}, {"command", command}, {"seed", s_.seed}, {"config", cfg}};
    if (!s_.noTimestamp) run["timestamp"] = utc_now();
    return run;
}

void Runner::emit(const std::string& text) const {
    if (s_.out.empty()) {
        out_ << text;
        return;
    }
    std::ofstream f(s_.out, std::ios::binary);
    if (!f) throw InputError("cannot write '" + s_.out + "'");
    f << text;
}

void Runner::emit_json(const std::string& command, Json body) const {
    Json doc = {{"run", header(command)}};
    for (auto& [key, value] : body.items()) doc[key] = std::move(value);
    emit(dump(doc));
}

std::string Runner::config_comment(const std::string& command) const { return "config " + header(command).dump(); }

SimulationOptions Runner::simulation_options() const {
    SimulationOptions o;
    if (s_.innovation == "gaussian") {
        o.innovation.kind = Innovation::Kind::Gaussian;
    } else if (s_.innovation == "uniform") {
        o.innovation.kind = Innovation::Kind::Uniform;
    } else if (s_.innovation == "student-t") {
        o.innovation.kind = Innovation::Kind::StudentT;
        o.innovation.df = s_.df;
    } else {
        throw InputError("unknown innovation law '" + s_.innovation + "'");
    }
    return o;
}

void Runner::cmd_moments() {
    const ParamFile pf = read_param_file(s_.params);
    const MomentGrid grid = moment_grid(pf.params, pf.init, pf.dims);
    if (s_.format == "csv") {
        std::ostringstream text;
        text << "# " << config_comment("moments") << '\n';
        write_moments_csv(text, grid);
        emit(text.str());
        return;
    }
    emit_json("moments", {{"params", to_json(pf)}, {"grid", to_json(grid)}});
}

void Runner::cmd_simulate() {
    const ParamFile pf = read_param_file(s_.params);
    Rng rng(RngSpec{s_.seed, 0});
    const Surface surface = simulate_surface(pf.params, pf.init, pf.dims, rng, simulation_options());
    if (s_.surfaceFormat == "json") {
        emit_json("simulate", {{"params", to_json(pf)}, {"surface", matrix_json(surface.values)}});
        return;
    }
    std::ostringstream text;
    write_surface(text, surface, config_comment("simulate"));
    emit(text.str());
}

void Runner::cmd_mc_validate() {
    const ParamFile pf = read_param_file(s_.params);
    const McMoments mc =
        mc_moments(pf.params, pf.init, pf.dims, s_.reps, RngSpec{s_.seed, 0}, simulation_options(), s_.threads);
    const McComparison cmp = compare_moments(mc, moment_grid(pf.params, pf.init, pf.dims), s_.k);
    Json body = {{"params", to_json(pf)}, {"n_reps", mc.nReps}, {"k", s_.k}, {"comparison", to_json(cmp)}};
    body["passed"] = cmp.meanFraction >= 0.99 && cmp.covFraction >= 0.98;
    emit_json("mc-validate", std::move(body));
}

void Runner::cmd_fit() {
    const Surface surface = read_surface_file(s_.surface);
    FitResult fit = fit_lee_carter_stage1(surface);
    if (!s_.stage2.empty()) fit.secondStage = fit_stage2(fit.kappaHat, s_.stage2);
    emit_json("fit", {{"dims", to_json(surface.dims)}, {"fit", to_json(fit)}});
}

void Runner::cmd_demo_distributional() {
    const DistributionalReport rep =
        demo_distributional_constraint(s_.mu, s_.sigma2e, s_.c, s_.periods, s_.reps, RngSpec{s_.seed, 0}, s_.threads);
    emit_json("demo distributional", {{"report", to_json(rep)}});
}

void Runner::cmd_demo_dynamic() {
    Surface shorter;
    Surface longer;
    if (!s_.params.empty()) {
        const ParamFile pf = read_param_file(s_.params);
        Rng rng(RngSpec{s_.seed, 0});
        const PanelDims extended{pf.dims.X, pf.dims.T + 1};
        longer = simulate_surface(pf.params, pf.init, extended, rng, simulation_options());
        shorter = Surface{pf.dims, longer.values.leftCols(pf.dims.T)};
    } else if (!s_.surface.empty() && !s_.surfaceNext.empty()) {
        shorter = read_surface_file(s_.surface);
        longer = read_surface_file(s_.surfaceNext);
    } else {
        throw InputError("demo dynamic needs --params, or both --surface and --surface-next");
    }
    emit_json("demo dynamic", {{"report", to_json(demo_dynamic_constraint(shorter, longer, s_.forcedSteps))}});
}

void Runner::cmd_check() {
    const ParamFile a = read_param_file(s_.params);
    const ParamFile b = read_param_file(s_.other);
    if (!(a.dims == b.dims)) throw InputError("the two parameter files use different dims");
    const EquivalenceReport rep = check_equivalence(a.params, b.params, a.init, a.dims, {s_.epsilonM, s_.delta, true});
    emit_json("identify check", {{"dims", to_json(a.dims)}, {"init", to_json(a.init)}, {"report", to_json(rep)}});
}

void Runner::cmd_counterexample(const std::string& which) {
    const std::string command = "identify counterexample " + which;
    const EquivalenceOptions eq{s_.epsilonM, s_.delta, true};
    if (which == "apc-example1") {
        emit_json(command, {{"X", s_.X}, {"T", s_.T}, {"pair", to_json(counterexample_apc_fullyparam(s_.X, s_.T))}});
        return;
    }
    if (which == "ap-mu0") {
        const auto [a, b] =
            counterexample_ap_means_mu0(to_vector(s_.beta), to_vector(s_.betaTilde), to_vector(s_.alpha), s_.cMeans);
        const PanelDims dims{static_cast<int>(s_.alpha.size()) - 1, s_.T};
        const InitialConditions init{s_.cMeans, 0.0, 0.0};
        const EquivalenceOptions meansOnly{s_.epsilonM, s_.delta, false};
        emit_json(command, {{"dims", to_json(dims)},
                            {"init", to_json(init)},
                            {"means_only", to_json(check_equivalence(a, b, init, dims, meansOnly))},
                            {"full", to_json(check_equivalence(a, b, init, dims, eq))}});
        return;
    }
    if (which == "apc-equal-loadings") {
        ApcRwParams p;
        p.alpha = to_vector(s_.alphaShared);
        p.beta0 = to_vector(s_.betaShared);
        p.beta1 = p.beta0;
        p.mu0 = s_.mu0;
        p.mu1 = s_.mu1;
        p.sigma2_e0 = s_.sigma2e0;
        p.sigma2_e1 = s_.sigma2e1;
        p.sigma2_eps = 0.5;
        const auto [a, b] = counterexample_apc_equal_loadings(p);
        const PanelDims dims{static_cast<int>(s_.alphaShared.size()) - 1, s_.T};
        const InitialConditions init{0.0, s_.c0, 0.0};
        emit_json(command, {{"dims", to_json(dims)}, {"report", to_json(check_equivalence(a, b, init, dims, eq))}});
        return;
    }
    if (which == "apc-x0-trade") {
        ApcRwParams p;
        p.alpha = Eigen::VectorXd::Zero(1);
        p.beta0 = Eigen::VectorXd::Ones(1);
        p.beta1 = p.beta0;
        p.mu0 = s_.mu0;
        p.mu1 = s_.mu1;
        p.sigma2_e0 = s_.sigma2e0;
        p.sigma2_e1 = s_.sigma2e1;
        p.sigma2_eps = 0.5;
        const auto [a, b] = counterexample_apc_x0_variance_trade(p, s_.z);
        const PanelDims dims{0, s_.T};
        emit_json(command, {{"dims", to_json(dims)}, {"z", s_.z}, {"report", to_json(check_equivalence(a, b, {}, dims, eq))}});
        return;
    }
    throw InputError("unknown counterexample '" + which + "'");
}

void Runner::cmd_recover() {
    const RecoveryOptions options{s_.noisy, s_.zeroTol, s_.consistencyTol};
    Json source;
    MomentGrid grid;
    Family family{};
    InitialConditions init;
    if (!s_.params.empty()) {
        const ParamFile pf = read_param_file(s_.params);
        grid = moment_grid(pf.params, pf.init, pf.dims);
        family = family_of(pf.params);
        init = pf.init;
        source = {{"params", to_json(pf)}};
    } else if (!s_.grid.empty()) {
        std::ifstream in(s_.grid);
        if (!in) throw InputError("cannot open moments file '" + s_.grid + "'");
        Json j;
        try {
            j = Json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw InputError("malformed JSON in '" + s_.grid + "': " + e.what());
        }
        const ParamFile pf = param_file_from_json(j.at("params"));
        family = family_of(pf.params);
        init = pf.init;
        grid.dims = pf.dims;
        try {
            const Json& g = j.at("grid");
            const auto read = [](const Json& rows) {
                Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                                  rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
                for (std::size_t r = 0; r < rows.size(); ++r)
                    for (std::size_t c = 0; c < rows[r].size(); ++c)
                        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
                return m;
            };
            grid.means = read(g.at("means"));
            grid.covs = read(g.at("covs"));
        } catch (const nlohmann::json::exception& e) {
            throw InputError(std::string("moments file lacks a usable grid: ") + e.what());
        }
        if (grid.means.rows() != pf.dims.ages() || grid.means.cols() != pf.dims.T ||
            grid.covs.rows() != pf.dims.cells() || grid.covs.cols() != pf.dims.cells()) {
            throw InputError("grid shape does not match dims");
        }
        source = {{"grid_file", s_.grid}};
    } else {
        throw InputError("identify recover needs --params or --grid");
    }
    const RecoveryResult<ModelParams> rec = recover(family, grid, init, options);
    Json body = source;
    body["recovery"] = to_json(rec);
    emit_json("identify recover", std::move(body));
}

void Runner::cmd_search() {
    const ParamFile pf = read_param_file(s_.params, true);
    if (!s_.liftExclusion && pf.dims.X > 0) require_valid(pf);
    SearchOptions o;
    o.delta = s_.searchDelta;
    o.epsilonM = s_.epsilonM;
    o.reportThreshold = s_.reportThreshold;
    o.nStarts = s_.starts;
    o.maxEvaluations = s_.maxEvaluations;
    o.liftLoadingExclusion = s_.liftExclusion;
    o.threads = s_.threads;
    const SearchReport rep = search_equivalent(pf.params, pf.init, pf.dims, o, RngSpec{s_.seed, 0});
    emit_json("identify search", {{"params", to_json(pf)}, {"search", to_json(rep)}});
}

int Runner::cmd_theorems() {
    VerificationOptions o;
    o.quick = s_.quick;
    o.seed = s_.seed;
    o.threads = s_.threads;
    const auto results = run_all_criteria(o);
    bool all = true;
    Json rows = Json::array();
    for (const auto& r : results) {
        all = all && r.passed;
        err_ << (r.passed ? "PASS" : "FAIL") << "  " << r.id << "  " << r.name << "  (" << std::fixed
             << std::setprecision(2) << r.seconds << " s)\n";
        err_.unsetf(std::ios::floatfield);
        Json row = {{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}};
        if (!s_.noTimestamp) row["seconds"] = r.seconds;
        rows.push_back(std::move(row));
    }
    emit_json("theorems", {{"quick", s_.quick}, {"all_passed", all}, {"criteria", rows}});
    return all ? kExitOk : kExitNumerical;
}

int Runner::execute(std::vector<std::string> args) {
    CLI::App app{"Plug-in Lee-Carter models: moments, simulation, estimation and identifiability checks", "lcid"};
    app.option_defaults()->always_capture_default();
    app.fallthrough();
    app.require_subcommand(1);
    s_.seed = default_seed();

    app.add_option("--seed", s_.seed, "RNG seed (default: $LCID_SEED or 0)");
    app.add_option("--threads", s_.threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
    app.add_flag("--no-timestamp", s_.noTimestamp, "omit wall-clock fields from reports");
    app.add_option("--out", s_.out, "write the report here instead of stdout");
    auto add_format = [&](CLI::App* sub, std::vector<std::string> allowed) {
        sub->add_option("--format", s_.format, "output format")->check(CLI::IsMember(std::move(allowed)));
    };
    auto add_innovation = [&](CLI::App* sub) {
        sub->add_option("--innovation", s_.innovation, "innovation law")
            ->check(CLI::IsMember({"gaussian", "uniform", "student-t"}));
        sub->add_option("--df", s_.df, "Student-t degrees of freedom (> 4)");
    };
    auto add_tolerances = [&](CLI::App* sub) {
        sub->add_option("--epsilon-m", s_.epsilonM, "moment residual counted as equal");
        sub->add_option("--delta", s_.delta, "parameter distance counted as distinct");
    };

    auto* moments = app.add_subcommand("moments", "exact mean and covariance grid");
    moments->add_option("--params", s_.params, "parameter JSON")->required();
    add_format(moments, {"json", "csv"});

    auto* simulate = app.add_subcommand("simulate", "one simulated log-rate surface");
    simulate->add_option("--params", s_.params, "parameter JSON")->required();
    add_innovation(simulate);
    simulate->add_option("--format", s_.surfaceFormat, "output format (csv: tab-separated surface)")
        ->check(CLI::IsMember({"json", "csv"}));

    auto* mc = app.add_subcommand("mc-validate", "Monte Carlo moments against the closed forms");
    mc->add_option("--params", s_.params, "parameter JSON")->required();
    mc->add_option("--reps", s_.reps, "replicates (>= 100)");
    mc->add_option("--k", s_.k, "standard-error band");
    add_innovation(mc);

    auto* fit = app.add_subcommand("fit", "two-step Lee-Carter fit of a surface file");
    fit->add_option("--surface", s_.surface, "surface file")->required();
    fit->add_option("--stage2", s_.stage2, "second-stage model")->check(CLI::IsMember({"rw", "arima110", "arima011"}));

    auto* demo = app.add_subcommand("demo", "sum-to-zero constraint demonstrations");
    demo->require_subcommand(1);
    auto* distributional = demo->add_subcommand("distributional", "how often a random walk sums to zero");
    distributional->add_option("--mu", s_.mu, "drift");
    distributional->add_option("--sigma2-e", s_.sigma2e, "innovation variance");
    distributional->add_option("--c", s_.c, "starting value");
    distributional->add_option("--T", s_.periods, "periods");
    distributional->add_option("--reps", s_.reps, "paths (>= 1000)");
    auto* dynamic = demo->add_subcommand("dynamic", "what a zero sum forces on the next period");
    dynamic->add_option("--params", s_.params, "simulate T+1 periods from this parameter JSON");
    dynamic->add_option("--surface", s_.surface, "surface over T periods");
    dynamic->add_option("--surface-next", s_.surfaceNext, "the same surface over T+1 periods");
    dynamic->add_option("--steps", s_.forcedSteps, "forced extensions to report");
    add_innovation(dynamic);

    auto* identify = app.add_subcommand("identify", "observational equivalence tools");
    identify->require_subcommand(1);
    auto* check = identify->add_subcommand("check", "compare the moment grids of two parameter files");
    check->add_option("--params", s_.params, "first parameter JSON")->required();
    check->add_option("--other", s_.other, "second parameter JSON")->required();
    add_tolerances(check);

    auto* counter = identify->add_subcommand("counterexample", "constructive non-identifiability examples");
    counter->require_subcommand(1);
    auto* apMu0 = counter->add_subcommand("ap-mu0", "drift-free random walk: means cannot fix beta");
    apMu0->add_option("--beta", s_.beta, "loadings")->delimiter(',');
    apMu0->add_option("--beta-tilde", s_.betaTilde, "alternative loadings")->delimiter(',');
    apMu0->add_option("--alpha", s_.alpha, "intercepts")->delimiter(',');
    apMu0->add_option("--c", s_.cMeans, "starting value");
    apMu0->add_option("--T", s_.T, "periods");
    add_tolerances(apMu0);
    auto* example1 = counter->add_subcommand("apc-example1", "two fully parametric cohort fits, one predictor");
    example1->add_option("--X", s_.X, "maximal age (> 2)");
    example1->add_option("--T", s_.T, "periods (> 2)");
    auto* equal = counter->add_subcommand("apc-equal-loadings", "drift swap when beta0 = beta1");
    equal->add_option("--alpha", s_.alphaShared, "intercepts")->delimiter(',');
    equal->add_option("--beta", s_.betaShared, "shared loadings")->delimiter(',');
    equal->add_option("--mu0", s_.mu0, "cohort drift");
    equal->add_option("--mu1", s_.mu1, "period drift");
    equal->add_option("--sigma2-e0", s_.sigma2e0, "cohort innovation variance");
    equal->add_option("--sigma2-e1", s_.sigma2e1, "period innovation variance");
    equal->add_option("--c0", s_.c0, "cohort starting value");
    equal->add_option("--T", s_.T, "periods");
    add_tolerances(equal);
    auto* trade = counter->add_subcommand("apc-x0-trade", "single age: cohort and period variances trade off");
    trade->add_option("--mu0", s_.mu0, "cohort drift");
    trade->add_option("--mu1", s_.mu1, "period drift");
    trade->add_option("--sigma2-e0", s_.sigma2e0, "cohort innovation variance");
    trade->add_option("--sigma2-e1", s_.sigma2e1, "period innovation variance");
    trade->add_option("--z", s_.z, "variance moved from period to cohort");
    trade->add_option("--T", s_.T, "periods");
    add_tolerances(trade);

    auto* recover = identify->add_subcommand("recover", "invert an exact moment grid");
    recover->add_option("--params", s_.params, "compute the grid from this parameter JSON");
    recover->add_option("--grid", s_.grid, "JSON written by `lcid moments`");
    recover->add_flag("--noisy", s_.noisy, "least-squares affine fits");
    recover->add_option("--zero-tol", s_.zeroTol, "loading magnitude treated as zero");
    recover->add_option("--consistency-tol", s_.consistencyTol, "relative reconstruction error tolerated");

    auto* search = identify->add_subcommand("search", "numerical search for an equivalent parameter value");
    search->add_option("--params", s_.params, "parameter JSON")->required();
    search->add_option("--delta", s_.searchDelta, "required parameter distance");
    search->add_option("--epsilon-m", s_.epsilonM, "moment residual counted as equal");
    search->add_option("--report-threshold", s_.reportThreshold, "residual above which nothing is reported");
    search->add_option("--starts", s_.starts, "multi-start count");
    search->add_option("--max-evals", s_.maxEvaluations, "simplex evaluations per start");
    search->add_flag("--lift-loading-exclusion", s_.liftExclusion, "cohort family: allow beta0 = beta1");

    auto* theorems = app.add_subcommand("theorems", "run the full self-verification suite");
    theorems->add_flag("--quick", s_.quick, "fewer replicates and searches");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out_, err_);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out_, err_);
    } catch (const CLI::ParseError& e) {
        err_ << "error: " << e.what() << "\n\n" << app.help();
        return kExitInput;
    }

    chain_.push_back(&app);
    for (const CLI::App* sub = app.get_subcommands().front(); sub != nullptr;) {
        chain_.push_back(sub);
        const auto next = sub->get_subcommands();
        sub = next.empty() ? nullptr : next.front();
    }
    const CLI::App* leaf = chain_.back();

    try {
        if (leaf == moments) cmd_moments();
        else if (leaf == simulate) cmd_simulate();
        else if (leaf == mc) cmd_mc_validate();
        else if (leaf == fit) cmd_fit();
        else if (leaf == distributional) cmd_demo_distributional();
        else if (leaf == dynamic) cmd_demo_dynamic();
        else if (leaf == check) cmd_check();
        else if (leaf == apMu0 || leaf == example1 || leaf == equal || leaf == trade) cmd_counterexample(leaf->get_name());
        else if (leaf == recover) cmd_recover();
        else if (leaf == search) cmd_search();
        else if (leaf == theorems) return cmd_theorems();
        else throw InputError("no runnable subcommand selected");
    } catch (const InputError& e) {
        err_ << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const NumericalDiagnostic& e) {
        err_ << "numerical diagnostic: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err_ << "internal error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return Runner(out, err).execute(args);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace lcid

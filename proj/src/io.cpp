#include "lcid/io.hpp"

#include "lcid/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace lcid {

namespace {

std::string shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

const Json& member(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
    return j.at(key);
}

double number(const Json& j, const char* key) {
    const Json& v = member(j, key);
    if (!v.is_number()) throw InputError(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

double number_or(const Json& j, const char* key, double fallback) {
    return j.is_object() && j.contains(key) ? number(j, key) : fallback;
}

int integer(const Json& j, const char* key) {
    const Json& v = member(j, key);
    if (!v.is_number_integer()) throw InputError(std::string("field '") + key + "' must be an integer");
    return v.get<int>();
}

Eigen::VectorXd vector(const Json& j, const char* key) {
    const Json& v = member(j, key);
    if (!v.is_array()) throw InputError(std::string("field '") + key + "' must be an array of numbers");
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw InputError(std::string("field '") + key + "' must be an array of numbers");
        out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& text, int lineNo) {
    std::size_t begin = text.find_first_not_of(" \r");
    std::size_t end = text.find_last_not_of(" \r");
    if (begin == std::string::npos) throw InputError("empty cell on line " + std::to_string(lineNo));
    double v = 0.0;
    const char* first = text.data() + begin;
    const char* last = text.data() + end + 1;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw InputError("cannot parse '" + text + "' as a number on line " + std::to_string(lineNo));
    }
    return v;
}

Json pair_json(const EquivalenceReport& r) {
    return {{"a", to_json(r.thetaA)}, {"b", to_json(r.thetaB)}};
}

}  // namespace

Json vector_json(const Eigen::VectorXd& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Json matrix_json(const Eigen::MatrixXd& m) {
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_json(m.row(r).transpose()));
    return out;
}

Json to_json(const PanelDims& dims) { return {{"X", dims.X}, {"T", dims.T}}; }

Json to_json(const InitialConditions& init) { return {{"c", init.c}, {"c0", init.c0}, {"c1", init.c1}}; }

Json to_json(const ModelParams& params) {
    Json j;
    j["model"] = std::string(family_tag(family_of(params)));
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            j["alpha"] = vector_json(p.alpha);
            if constexpr (std::is_same_v<P, ApcRwParams>) {
                j["beta0"] = vector_json(p.beta0);
                j["beta1"] = vector_json(p.beta1);
                j["mu0"] = p.mu0;
                j["mu1"] = p.mu1;
                j["sigma2_e0"] = p.sigma2_e0;
                j["sigma2_e1"] = p.sigma2_e1;
            } else {
                j["beta"] = vector_json(p.beta);
                j["mu"] = p.mu;
                j["sigma2_e"] = p.sigma2_e;
            }
            j["sigma2_eps"] = p.sigma2_eps;
            if constexpr (std::is_same_v<P, ApArima110Params>) j["rho"] = p.rho;
            if constexpr (std::is_same_v<P, ApArima011Params>) j["phi"] = p.phi;
        },
        params);
    return j;
}

Json to_json(const FullyParametricApcParams& p) {
    return {{"alpha", vector_json(p.alpha)},
            {"beta0", vector_json(p.beta0)},
            {"beta1", vector_json(p.beta1)},
            {"kappa", vector_json(p.kappa)},
            {"iota", vector_json(p.iota)},
            {"constraints", p.constraints == ApcConstraintSet::A ? "A" : "B"}};
}

ParamFile param_file_from_json(const Json& j, bool allowEqualLoadings) {
    if (!j.is_object()) throw InputError("parameter file must hold a JSON object");
    const Json& tag = member(j, "model");
    if (!tag.is_string()) throw InputError("field 'model' must be a string");
    const Family family = family_from_tag(tag.get<std::string>());

    ParamFile file;
    const Json& dims = member(j, "dims");
    file.dims = PanelDims{integer(dims, "X"), integer(dims, "T")};
    if (j.contains("init")) {
        const Json& init = j.at("init");
        file.init = InitialConditions{number_or(init, "c", 0.0), number_or(init, "c0", 0.0),
                                      number_or(init, "c1", 0.0)};
    }
    switch (family) {
        case Family::ApRw:
            file.params = ApRwParams{vector(j, "alpha"), vector(j, "beta"), number(j, "mu"), number(j, "sigma2_e"),
                                     number(j, "sigma2_eps")};
            break;
        case Family::ApArima110:
            file.params = ApArima110Params{vector(j, "alpha"), vector(j, "beta"),     number(j, "mu"),
                                           number(j, "sigma2_e"), number(j, "sigma2_eps"), number(j, "rho")};
            break;
        case Family::ApArima011:
            file.params = ApArima011Params{vector(j, "alpha"), vector(j, "beta"),     number(j, "mu"),
                                           number(j, "sigma2_e"), number(j, "sigma2_eps"), number(j, "phi")};
            break;
        case Family::ApcRw:
            file.params = ApcRwParams{vector(j, "alpha"),     vector(j, "beta0"),     vector(j, "beta1"),
                                      number(j, "mu0"),       number(j, "mu1"),       number(j, "sigma2_e0"),
                                      number(j, "sigma2_e1"), number(j, "sigma2_eps")};
            break;
    }
    ValidationVerdict v = validate(file.params, file.dims);
    if (allowEqualLoadings) std::erase(v.violations, std::string("beta0 = beta1 excluded"));
    if (!v.ok()) {
        std::string msg = "invalid parameters:";
        for (const auto& s : v.violations) msg += " " + s + ";";
        msg.pop_back();
        throw InputError(msg);
    }
    return file;
}

ParamFile read_param_file(const std::string& path, bool allowEqualLoadings) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open parameter file '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed JSON in '" + path + "': " + e.what());
    }
    return param_file_from_json(j, allowEqualLoadings);
}

Json to_json(const ParamFile& file) {
    Json j = to_json(file.params);
    j["dims"] = to_json(file.dims);
    j["init"] = to_json(file.init);
    return j;
}

void write_surface(std::ostream& out, const Surface& surface, const std::string& comment) {
    if (!comment.empty()) out << "# " << comment << '\n';
    out << "age";
    for (Eigen::Index t = 1; t <= surface.values.cols(); ++t) out << '\t' << t;
    out << '\n';
    for (Eigen::Index x = 0; x < surface.values.rows(); ++x) {
        out << x;
        for (Eigen::Index t = 0; t < surface.values.cols(); ++t) out << '\t' << shortest(surface.values(x, t));
        out << '\n';
    }
}

Surface read_surface(std::istream& in) {
    std::string line;
    int lineNo = 0;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto cells = split(line, '\t');
        if (header.empty()) {
            header = cells;
            if (header.front() != "age") throw InputError("surface header must start with 'age'");
            for (std::size_t t = 1; t < header.size(); ++t) {
                if (parse_double(header[t], lineNo) != static_cast<double>(t)) {
                    throw InputError("surface header years must run 1..T");
                }
            }
            continue;
        }
        if (cells.size() != header.size()) {
            throw InputError("line " + std::to_string(lineNo) + " has " + std::to_string(cells.size()) +
                             " cells, header has " + std::to_string(header.size()));
        }
        if (parse_double(cells.front(), lineNo) != static_cast<double>(rows.size())) {
            throw InputError("ages must run 0..X in order (line " + std::to_string(lineNo) + ")");
        }
        std::vector<double> row;
        for (std::size_t t = 1; t < cells.size(); ++t) row.push_back(parse_double(cells[t], lineNo));
        rows.push_back(std::move(row));
    }
    if (header.size() < 2 || rows.empty()) throw InputError("surface needs at least one age and one year");
    Surface s;
    s.dims = PanelDims{static_cast<int>(rows.size()) - 1, static_cast<int>(header.size()) - 1};
    s.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(header.size() - 1));
    for (std::size_t x = 0; x < rows.size(); ++x)
        for (std::size_t t = 0; t < rows[x].size(); ++t)
            s.values(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(t)) = rows[x][t];
    if (!s.values.allFinite()) throw InputError("surface has non-finite entries");
    return s;
}

Surface read_surface_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open surface file '" + path + "'");
    return read_surface(in);
}

void write_moments_csv(std::ostream& out, const MomentGrid& grid) {
    const int X = grid.dims.X;
    const int T = grid.dims.T;
    out << "kind,x,y,s,t,value\n";
    for (int x = 0; x <= X; ++x)
        for (int t = 1; t <= T; ++t)
            out << "mean," << x << ',' << x << ',' << t << ',' << t << ',' << shortest(grid.mean(x, t)) << '\n';
    for (int x = 0; x <= X; ++x)
        for (int s = 1; s <= T; ++s)
            for (int y = 0; y <= X; ++y)
                for (int t = 1; t <= T; ++t) {
                    if (grid.dims.flat(y, t) < grid.dims.flat(x, s)) continue;
                    out << "cov," << x << ',' << y << ',' << s << ',' << t << ',' << shortest(grid.cov(x, y, s, t))
                        << '\n';
                }
}

Json to_json(const MomentGrid& grid) {
    return {{"dims", to_json(grid.dims)}, {"means", matrix_json(grid.means)}, {"covs", matrix_json(grid.covs)}};
}

Json to_json(const EquivalenceReport& r) {
    Json j = pair_json(r);
    j["mean_residual"] = r.meanResidual;
    j["cov_residual"] = r.covResidual;
    j["moment_residual"] = r.momentResidual;
    j["param_distance"] = r.paramDistance;
    j["verdict"] = std::string(verdict_name(r.verdict));
    return j;
}

Json to_json(const SearchReport& r) {
    return {{"found", r.found},
            {"summary", r.summary},
            {"best_start", r.bestStart},
            {"evaluations", r.evaluations},
            {"best", to_json(r.best)}};
}

Json to_json(const FullyParametricPair& p) {
    return {{"a", to_json(p.a)},
            {"b", to_json(p.b)},
            {"predictor_a", matrix_json(p.predictorA)},
            {"predictor_b", matrix_json(p.predictorB)},
            {"cohort_term_a", matrix_json(p.cohortTermA)},
            {"cohort_term_b", matrix_json(p.cohortTermB)},
            {"residual", p.residual},
            {"param_distance", p.paramDistance}};
}

Json to_json(const RecoveryResult<ModelParams>& r) {
    return {{"theta_hat", to_json(r.thetaHat)}, {"residual", r.residual}, {"steps", r.stepsLog}};
}

Json to_json(const SecondStage& s) {
    Json j = {{"model", s.model}, {"mu", s.mu}, {"sigma2_e", s.sigma2_e}};
    if (s.rho) j["rho"] = *s.rho;
    if (s.phi) j["phi"] = *s.phi;
    return j;
}

Json to_json(const FitResult& f) {
    Json j = {{"alpha_hat", vector_json(f.alphaHat)},
              {"beta_hat", vector_json(f.betaHat)},
              {"kappa_hat", vector_json(f.kappaHat)},
              {"residual_sigma2", f.residualSigma2}};
    if (f.secondStage) j["second_stage"] = to_json(*f.secondStage);
    return j;
}

Json to_json(const DistributionalReport& r) {
    return {{"n_reps", r.nReps},
            {"T", r.T},
            {"fraction_abs_sum_below_1e-3", r.fractionBelow1e3},
            {"fraction_abs_sum_below_1e-6", r.fractionBelow1e6},
            {"min_abs_sum", r.minAbsSum},
            {"mean_sum", r.meanSum},
            {"var_sum", r.varSum},
            {"var_sum_se", r.varSumSe},
            {"var_sum_exact", r.varSumExact},
            {"histogram", {{"lo", r.histogram.lo}, {"hi", r.histogram.hi}, {"counts", r.histogram.counts}}}};
}

Json to_json(const DynamicReport& r) {
    return {{"T", r.T},
            {"max_kappa_shift", r.maxKappaShift},
            {"sum_kappa_T", r.sumKappaT},
            {"forced_next", r.forcedNext},
            {"forced_sequence", r.forcedSequence},
            {"fit_T", to_json(r.fitT)},
            {"fit_T_plus_1", to_json(r.fitTplus1)}};
}

Json to_json(const McComparison& c) {
    return {{"mean_fraction_within", c.meanFraction},
            {"cov_fraction_within", c.covFraction},
            {"max_mean_z", c.maxMeanZ},
            {"max_cov_z", c.maxCovZ},
            {"mean_entries", c.meanEntries},
            {"cov_entries", c.covEntries}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace lcid

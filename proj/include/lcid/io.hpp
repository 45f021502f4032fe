#pragma once

// File formats: parameter JSON, tab-separated surfaces, moment grids, and
// JSON renderings of every report type.

#include "lcid/estimate.hpp"
#include "lcid/identify.hpp"
#include "lcid/moments.hpp"
#include "lcid/params.hpp"
#include "lcid/simulate.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace lcid {

using Json = nlohmann::ordered_json;

struct ParamFile {
    ModelParams params;
    PanelDims dims;
    InitialConditions init;
};

/// {"model": tag, <fields>, "dims": {"X", "T"}, "init": {"c", "c0", "c1"}}.
/// "init" and its members are optional and default to 0. The result has
/// passed validate; violations throw InputError. allowEqualLoadings admits
/// cohort values with beta0 == beta1, which lie outside the parameter space.
[[nodiscard]] ParamFile param_file_from_json(const Json& j, bool allowEqualLoadings = false);
[[nodiscard]] ParamFile read_param_file(const std::string& path, bool allowEqualLoadings = false);
[[nodiscard]] Json to_json(const ParamFile& file);

[[nodiscard]] Json to_json(const ModelParams& params);
[[nodiscard]] Json to_json(const PanelDims& dims);
[[nodiscard]] Json to_json(const InitialConditions& init);
[[nodiscard]] Json to_json(const FullyParametricApcParams& p);
[[nodiscard]] Json vector_json(const Eigen::VectorXd& v);
[[nodiscard]] Json matrix_json(const Eigen::MatrixXd& m);

/// Optional leading "# ..." comment line, then "age" and years 1..T
/// separated by tabs, then one row per age 0..X.
void write_surface(std::ostream& out, const Surface& surface, const std::string& comment = {});
[[nodiscard]] Surface read_surface(std::istream& in);
[[nodiscard]] Surface read_surface_file(const std::string& path);

/// Long format, header "kind,x,y,s,t,value". Mean rows repeat x in y and
/// t in s; covariance rows list the upper triangle of the flattened grid.
void write_moments_csv(std::ostream& out, const MomentGrid& grid);
[[nodiscard]] Json to_json(const MomentGrid& grid);

[[nodiscard]] Json to_json(const EquivalenceReport& report);
[[nodiscard]] Json to_json(const SearchReport& report);
[[nodiscard]] Json to_json(const FullyParametricPair& pair);
[[nodiscard]] Json to_json(const RecoveryResult<ModelParams>& result);
[[nodiscard]] Json to_json(const SecondStage& stage);
[[nodiscard]] Json to_json(const FitResult& fit);
[[nodiscard]] Json to_json(const DistributionalReport& report);
[[nodiscard]] Json to_json(const DynamicReport& report);
[[nodiscard]] Json to_json(const McComparison& cmp);

/// Two-space indented JSON with a trailing newline. Doubles print in the
/// shortest form that reads back to the same value.
[[nodiscard]] std::string dump(const Json& j);

}  // namespace lcid

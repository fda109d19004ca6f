#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dsolkit/construct.hpp"
#include "dsolkit/darboux.hpp"
#include "dsolkit/dynamics.hpp"
#include "dsolkit/poisson.hpp"
#include "dsolkit/transform.hpp"

namespace dsolkit::io {

using Json = nlohmann::json;

/// Malformed or inconsistent document. The message names the offending field.
class DocumentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Matrix document. Indices in JSON are 1-based.
struct MatrixDocument {
    StructureMatrix matrix;
    CasimirSet casimirs;
    std::optional<SampleRegion> region;

    /// The document region, or the unit cube over the matrix variables.
    SampleRegion region_or_default() const;
};

Json region_to_json(const SampleRegion& region);
SampleRegion region_from_json(const Json& doc, const std::vector<std::string>& variables);

Json matrix_to_json(const StructureMatrix& matrix, const CasimirSet& casimirs = {},
                    const std::optional<SampleRegion>& region = std::nullopt);
MatrixDocument matrix_from_json(const Json& doc);

Json dpsi_to_json(const DPsiSpec& spec);
DPsiSpec dpsi_from_json(const Json& doc);

Json report_to_json(const VerificationReport& report);
Json chart_to_json(const DarbouxChart& chart);

/// Reads and parses a JSON file; throws DocumentError on IO or syntax errors.
Json read_json(const std::filesystem::path& path);
/// Writes with two-space indentation; throws DocumentError on IO errors.
void write_json(const std::filesystem::path& path, const Json& doc);

struct TransformOutcome {
    TransformResult result;
    std::string op;
};

/// Executes a transform request. Matrix paths are resolved relative to
/// `base_dir`.
TransformOutcome run_transform_request(const Json& request, const std::filesystem::path& base_dir);

/// One row per state: t, coordinates, H, then each Casimir generator.
std::string trajectory_csv(const Trajectory& trajectory, const Expr& hamiltonian, const CasimirSet& casimirs);

/// printf %.17g.
std::string format_number(double value);

}  // namespace dsolkit::io

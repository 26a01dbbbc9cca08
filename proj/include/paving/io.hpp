#pragma once

// JSON and CSV forms of shapes, elements, inclusion specs, certificates and
// experiment tables. Matrices are nested arrays of [re, im] pairs.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "paving/freeprob.hpp"
#include "paving/paving.hpp"
#include "paving/scan.hpp"

namespace paving::io {

using nlohmann::json;

inline constexpr int kFormatVersion = 1;

json matrix_to_json(const Matrix& m);
/// Throws MalformedElementError for ragged rows or entries that are not [re, im] pairs.
Matrix matrix_from_json(const json& j);

json shape_to_json(const AlgebraShape& s);
AlgebraShape shape_from_json(const json& j);

json element_to_json(const Element& x);
/// Throws MalformedElementError when the blocks do not match the shape.
Element element_from_json(const json& j);

/// {"n_blocks", "n_weights", "m_blocks", "m_weights", "lambda"}; weights are
/// normalized on read, so unnormalized raw weights are accepted.
json inclusion_spec_to_json(const InclusionSpec& spec);
/// Throws SpecError for missing fields or a spec that fails validation.
InclusionSpec inclusion_spec_from_json(const json& j);

json family_source_to_json(const FamilySource& src);
FamilySource family_source_from_json(const json& j);

/// Elements of M from {"elements": [...]}.
std::vector<Element> family_from_json(const json& j, const AlgebraShape& m_shape);

json partition_to_json(const PartitionOfUnity& p);
PartitionOfUnity partition_from_json(const json& j, const AlgebraShape& shape);

/// Everything needed to re-verify: inclusion, F (by source or inline), epsilon,
/// index, and the partition or unitaries.
struct CertificateContext {
  InclusionSpec spec;
  std::optional<FamilySource> source;  // empty: F is stored inline
  std::vector<Element> inline_family;
};

json certificate_to_json(const PavingCertificate& c, const PavingProblem& problem, const CertificateContext& ctx);

struct LoadedCertificate {
  PavingCertificate certificate;
  CertificateContext context;
  double epsilon = 0.0;
  double index = 1.0;
  bool index_exact = false;
};
LoadedCertificate certificate_from_json(const json& j);

/// %.17g, so doubles survive a text round trip.
std::string format_double(double v);

std::string scan_csv(const std::vector<ScanRow>& rows);
std::string kesten_csv(const KestenResult& r);
json kesten_summary(const KestenResult& r);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// {"timestamp": ISO-8601 UTC, "command": ..., "seed": ...}; kept apart from
/// the payload files so reruns compare byte for byte.
json run_meta(const std::string& command, std::uint64_t seed);

}  // namespace paving::io

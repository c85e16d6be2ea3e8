#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "pfchan/channel.hpp"
#include "pfchan/cones.hpp"
#include "pfchan/pf.hpp"
#include "pfchan/schur.hpp"
#include "pfchan/upb.hpp"

namespace pfchan {

using Json = nlohmann::ordered_json;

/// Matrix entries serialize as [re, im]; parsers also accept plain numbers
/// for real entries. Matrices are arrays of rows.
Json complex_matrix_to_json(const Mat& m);
Mat complex_matrix_from_json(const Json& j, const std::string& field);
Json real_matrix_to_json(const RMat& m);

/// Channel JSON: { "n": int, "kraus": [matrix, ...] } or
/// { "n": int, "choi": matrix } for maps given by their Choi matrix.
Json channel_to_json(const Channel& ch);
Channel channel_from_json(const Json& j, const Tolerance& tol = {},
                          bool require_trace_preserving = true);

/// Witness JSON: { "kind": "abelian"|"block"|"mixed", "n": int, "m": int,
/// "weights": [...], "ops": [matrix, ...] } plus "blocks" (block dimensions;
/// required for "mixed", implied otherwise) and optionally "kraus" (the
/// paired Kraus list; emitted so a serialized witness re-verifies against
/// exactly the operators it was built for).
Json witness_to_json(const PFWitness& w);
PFWitness witness_from_json(const Json& j);

/// Cone JSON: { "dim": int, "generators": [[floats], ...] }.
Json cone_to_json(const PolyhedralCone& c);
PolyhedralCone cone_from_json(const Json& j, const Tolerance& tol = {});

/// UPB JSON: { "d1": int, "d2": int, "us": [[entry, ...], ...], "vs": [...] }
/// with entry = float or [re, im].
Json upb_to_json(const UPBCandidate& u);
UPBCandidate upb_from_json(const Json& j);

/// Comma-separated real matrix, one row per line.
RMat real_matrix_from_csv(const std::string& text);
std::string real_matrix_to_csv(const RMat& m);

/// Serializes with every floating-point number rendered at 17 significant
/// digits, so identical values always produce identical bytes.
std::string dump_json(const Json& j, int indent = 2);
std::string format_double(double x);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
Json load_json_file(const std::string& path);

} // namespace pfchan

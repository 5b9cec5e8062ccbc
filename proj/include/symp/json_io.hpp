#pragma once

#include <json.hpp>

#include <string>
#include <variant>
#include <vector>

#include "symp/homalg.hpp"
#include "symp/mult.hpp"
#include "symp/orbitmodel.hpp"
#include "symp/pathindex.hpp"
#include "symp/recurrence.hpp"
#include "symp/shdim.hpp"

namespace symp {

using json = nlohmann::json;

// Reads a file, or stdin when path is "-". Parse errors become InputError with the byte offset.
json read_json(const std::string& path, std::string* raw = nullptr);
json parse_json(const std::string& text, const std::string& where);

// Every floating value rounded to 15 significant digits; keys are already sorted.
std::string dump_json(const json& j);
double round15(double x);

json to_json(const Mat& m);
Mat matrix_from_json(const json& j);

json to_json(const OrbitModel& m);
OrbitModel model_from_json(const json& j);
// Accepts a single model, an array of models, or {"orbits": [...]}.
std::vector<OrbitModel> models_from_json(const json& j);

using AnyPath = std::variant<SampledPath, GeneratedPath>;
AnyPath path_from_json(const json& j);
json to_json(const GeneratedPath& g);
json to_json(const SampledPath& p);

json to_json(const Tolerances& t);
json to_json(const IndexReport& r);
json to_json(const MuPm& r);
json to_json(const IterIndex& it);
json to_json(const RecurrenceCertificate& c);
// Accepts the emitted form; only d, k and eta are read.
RecurrenceCertificate certificate_from_json(const json& j, double default_eta);
json to_json(const VerificationReport& r);
json to_json(const JumpReport& r);

FilteredComplex complex_from_json(const json& j);
json to_json(const FilteredComplex& fc);
std::string rational_string(const mpq_class& q);
json to_json(const RationalMatrix& m);  // sparse entries [[row, col, "p/q"], ...]
json to_json(const SpectralPages& sp);
json to_json(const CollapsedComplex& cc);

json to_json(const ShTable& t);
json to_json(const MultiplicityBound& b);

}  // namespace symp

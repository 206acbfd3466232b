/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <json.hpp>

#include "uqthermo/asymptotics.hpp"

namespace uqthermo {

using json = nlohmann::ordered_json;

// Serialization of results. Infinite values are written as the string "inf"
// so reports stay valid JSON; matrices use row-major nested [re, im] pairs.

json matrix_to_json(const CMat& m);
CMat matrix_from_json(const json& j);

json to_json(const SolveCertificate& c);
json to_json(const GridMeta& g);
json to_json(const DivergenceResult& r);
json to_json(const ChannelSpec& ch);
json to_json(const ChannelVerification& v);
json to_json(const TaskReport& r);
json to_json(const NogoVerdict& v);
json to_json(const TruncationResult& r);
json to_json(const RateSweepRow& row);
json to_json(const FormationBound& b);

/// Parses the JSON uncertainty-set schema
///   { "generators": [matrix...], "hull": "finite|convex|affine",
///     "sampler": {"family": ..., "params": {...}, "grid": n} }
/// and materializes any sampler.
StateSet state_set_from_json(const json& j, std::optional<int> grid_override = {});

struct CliOverrides {
  std::optional<std::string> out_path;
  std::optional<double> m_cap;
  std::optional<double> tol;
  std::optional<int> grid;
  int jobs = 1;
};

struct JobOutcome {
  int exit_code = 0;  // 0 ok, 2 schema, 3 solver, 4 verification
  std::string output;
  std::string out_path;  // empty: stdout
  bool csv = false;
};

/// Validates and runs one job configuration; see the config schema in the
/// README. Deterministic for a fixed config; the report embeds the config
/// hash, library version and every solver certificate.
JobOutcome run_job_text(const std::string& config_text, const CliOverrides& overrides = {});

/// FNV-1a 64-bit hash of the canonical config dump, hex encoded.
std::string config_hash(const json& config);

}  // namespace uqthermo

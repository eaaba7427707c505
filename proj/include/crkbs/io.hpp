#pragma once

#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "crkbs/dataset.hpp"
#include "crkbs/kernel.hpp"
#include "crkbs/network.hpp"
#include "crkbs/registry.hpp"
#include "crkbs/solver.hpp"

namespace crkbs {

// Shortest decimal string that parses back to the same double (what the
// JSON serializer emits too, so CSV and JSON agree).
std::string format_double(double x);

std::string sha256_hex(std::string_view bytes);

// Canonical serialization of a function body: sorted keys, children
// referenced by content id, coefficients in canonical measure order. The
// content id is the SHA-256 of this serialization (with a format prefix),
// so structurally identical functions collide by construction.
nlohmann::json atom_to_json(const Atom& atom);
nlohmann::json function_body_json(const ChainFunctionData& fn);
std::string content_id(const ChainFunctionData& fn);

// ---------------------------------------------------------------------------
// Network files

// On-disk network: the weights plus the per-layer weighting annotations
// used when the network is embedded.
struct NetworkFile {
  DeepNetwork network;
  std::vector<WeightingSpec> weightings;
};

nlohmann::json network_to_json(const NetworkFile& nf);
NetworkFile network_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Measure files

// Serializes the full function closure of the roots, keyed by content id.
// "root" is a single id when one root is given, else an array in order.
nlohmann::json measure_to_json(std::span<const ChainFunction> roots);

// Interns every function in the file into `registry` (bottom-up; file keys
// are remapped to freshly computed content ids) and returns the roots.
std::vector<ChainFunction> measure_from_json(const nlohmann::json& j,
                                             RegistryPtr registry);

// ---------------------------------------------------------------------------
// Datasets

// Row-major dump of the feature matrix at 17 significant digits, one data
// row per line, for eyeballing and diffing.
std::string gram_to_csv(const GramMatrix& G);

// CSV with header x_1..x_d[,y_1..y_D]; every row numeric and rectangular.
Dataset dataset_from_csv(std::istream& in);
// JSON alternative: {"X": [[..]], "Y": [[..]]} with Y optional.
Dataset dataset_from_json(const nlohmann::json& j);
// Dispatches on extension: .csv or .json.
Dataset load_dataset_file(const std::string& path);

// ---------------------------------------------------------------------------
// Fit configuration

// {"depth":L, "lambda":x, "pool_sizes":[..], "activation":[..],
//  "weighting":[..], optional "seed", "pivot_threshold", "objective_tol",
//  "max_sweeps"}.
FitConfig fit_config_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Files and formatting helpers

nlohmann::json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

// Fixed two-space-indent dump with trailing newline; used for every JSON
// artifact so reruns are byte-identical.
std::string dump_json(const nlohmann::json& j);

}  // namespace crkbs

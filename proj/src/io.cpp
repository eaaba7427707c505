#include "crkbs/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "crkbs/errors.hpp"

namespace crkbs {

std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

nlohmann::json atom_to_json(const Atom& atom) {
  nlohmann::json j;
  if (const auto* l1 = std::get_if<Layer1Atom>(&atom)) {
    j["v"] = nlohmann::json::array();
    for (Eigen::Index i = 0; i < l1->v.size(); ++i) {
      j["v"].push_back(l1->v[i]);
    }
    j["b"] = l1->b;
  } else {
    const auto& ch = std::get<ChainAtom>(atom);
    j["f"] = ch.f;
    j["b"] = ch.b;
  }
  return j;
}

nlohmann::json function_body_json(const ChainFunctionData& fn) {
  nlohmann::json j;
  j["depth"] = fn.depth;
  j["activation"] = nlohmann::json::array();
  for (const auto& a : fn.activations) {
    j["activation"].push_back(activation_name(a));
  }
  j["weighting"] = nlohmann::json::array();
  for (const auto& w : fn.weightings) {
    j["weighting"].push_back(weighting_name(w));
  }
  j["atoms"] = nlohmann::json::array();
  j["coeffs"] = nlohmann::json::array();
  for (std::size_t k = 0; k < fn.measure.size(); ++k) {
    j["atoms"].push_back(atom_to_json(fn.measure.atoms[k]));
    j["coeffs"].push_back(fn.measure.coeffs[k]);
  }
  return j;
}

std::string content_id(const ChainFunctionData& fn) {
  return sha256_hex("crkbs:function:v1\n" + function_body_json(fn).dump());
}

// ---------------------------------------------------------------------------
// Schema helpers

namespace {

const nlohmann::json& require_field(const nlohmann::json& j, const char* key,
                                    const std::string& ptr) {
  if (!j.is_object()) {
    throw SchemaError(ptr, "expected an object");
  }
  auto it = j.find(key);
  if (it == j.end()) {
    throw SchemaError(ptr + "/" + key, "missing field");
  }
  return *it;
}

double require_number(const nlohmann::json& j, const std::string& ptr) {
  if (!j.is_number()) {
    throw SchemaError(ptr, "expected a number");
  }
  double x = j.get<double>();
  if (!std::isfinite(x)) {
    throw SchemaError(ptr, "value is not finite");
  }
  return x;
}

long long require_integer(const nlohmann::json& j, const std::string& ptr) {
  if (!j.is_number_integer()) {
    throw SchemaError(ptr, "expected an integer");
  }
  return j.get<long long>();
}

std::string require_string(const nlohmann::json& j, const std::string& ptr) {
  if (!j.is_string()) {
    throw SchemaError(ptr, "expected a string");
  }
  return j.get<std::string>();
}

const nlohmann::json& require_array(const nlohmann::json& j,
                                    const std::string& ptr) {
  if (!j.is_array()) {
    throw SchemaError(ptr, "expected an array");
  }
  return j;
}

Eigen::VectorXd require_vector(const nlohmann::json& j, const std::string& ptr) {
  require_array(j, ptr);
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] =
        require_number(j[i], ptr + "/" + std::to_string(i));
  }
  return v;
}

Eigen::MatrixXd require_matrix(const nlohmann::json& j, const std::string& ptr) {
  require_array(j, ptr);
  if (j.empty()) {
    return Eigen::MatrixXd(0, 0);
  }
  std::size_t cols = require_array(j[0], ptr + "/0").size();
  Eigen::MatrixXd M(static_cast<Eigen::Index>(j.size()),
                    static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string rptr = ptr + "/" + std::to_string(i);
    require_array(j[i], rptr);
    if (j[i].size() != cols) {
      throw SchemaError(rptr, "ragged matrix: expected " +
                                  std::to_string(cols) + " entries");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          require_number(j[i][k], rptr + "/" + std::to_string(k));
    }
  }
  return M;
}

ActivationSpec require_activation(const nlohmann::json& j,
                                  const std::string& ptr) {
  std::string name = require_string(j, ptr);
  try {
    return activation_from_name(name);
  } catch (const ContractError& e) {
    throw SchemaError(ptr, e.what());
  }
}

WeightingSpec require_weighting(const nlohmann::json& j,
                                const std::string& ptr) {
  std::string name = require_string(j, ptr);
  try {
    return weighting_from_name(name);
  } catch (const ContractError& e) {
    throw SchemaError(ptr, e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Network files

nlohmann::json network_to_json(const NetworkFile& nf) {
  const DeepNetwork& net = nf.network;
  net.validate();
  if (nf.weightings.size() != net.hidden_W.size()) {
    throw ContractError("network file needs one weighting per hidden layer");
  }
  nlohmann::json j;
  j["widths"] = net.widths();
  j["output_dim"] = net.output_dim();
  j["layers"] = nlohmann::json::array();
  for (std::size_t l = 0; l < net.hidden_W.size(); ++l) {
    nlohmann::json layer;
    layer["activation"] = activation_name(net.activations[l]);
    layer["weighting"] = weighting_name(nf.weightings[l]);
    layer["W"] = nlohmann::json::array();
    for (Eigen::Index r = 0; r < net.hidden_W[l].rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < net.hidden_W[l].cols(); ++c) {
        row.push_back(net.hidden_W[l](r, c));
      }
      layer["W"].push_back(std::move(row));
    }
    layer["b"] = nlohmann::json::array();
    for (Eigen::Index r = 0; r < net.biases[l].size(); ++r) {
      layer["b"].push_back(net.biases[l][r]);
    }
    j["layers"].push_back(std::move(layer));
  }
  j["final_W"] = nlohmann::json::array();
  for (Eigen::Index r = 0; r < net.final_W.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < net.final_W.cols(); ++c) {
      row.push_back(net.final_W(r, c));
    }
    j["final_W"].push_back(std::move(row));
  }
  return j;
}

NetworkFile network_from_json(const nlohmann::json& j) {
  const auto& jw = require_array(require_field(j, "widths", ""), "/widths");
  if (jw.size() < 2) {
    throw SchemaError("/widths", "need an input width and one hidden width");
  }
  std::vector<int> widths;
  for (std::size_t i = 0; i < jw.size(); ++i) {
    long long w = require_integer(jw[i], "/widths/" + std::to_string(i));
    if (w < 1) {
      throw SchemaError("/widths/" + std::to_string(i),
                        "widths must be positive");
    }
    widths.push_back(static_cast<int>(w));
  }
  long long output_dim =
      require_integer(require_field(j, "output_dim", ""), "/output_dim");
  if (output_dim < 1) {
    throw SchemaError("/output_dim", "output dimension must be positive");
  }
  const auto& jl = require_array(require_field(j, "layers", ""), "/layers");
  if (jl.size() + 1 != widths.size()) {
    throw SchemaError("/layers", "expected " +
                                     std::to_string(widths.size() - 1) +
                                     " layers for " +
                                     std::to_string(widths.size()) + " widths");
  }

  NetworkFile nf;
  for (std::size_t l = 0; l < jl.size(); ++l) {
    std::string ptr = "/layers/" + std::to_string(l);
    const auto& layer = jl[l];
    Eigen::MatrixXd W =
        require_matrix(require_field(layer, "W", ptr), ptr + "/W");
    if (W.rows() != widths[l + 1] || W.cols() != widths[l]) {
      throw SchemaError(ptr + "/W", "expected shape " +
                                        std::to_string(widths[l + 1]) + "x" +
                                        std::to_string(widths[l]));
    }
    Eigen::VectorXd b =
        require_vector(require_field(layer, "b", ptr), ptr + "/b");
    if (b.size() != widths[l + 1]) {
      throw SchemaError(ptr + "/b",
                        "expected " + std::to_string(widths[l + 1]) + " entries");
    }
    nf.network.hidden_W.push_back(std::move(W));
    nf.network.biases.push_back(std::move(b));
    nf.network.activations.push_back(require_activation(
        require_field(layer, "activation", ptr), ptr + "/activation"));
    nf.weightings.push_back(require_weighting(
        require_field(layer, "weighting", ptr), ptr + "/weighting"));
  }
  Eigen::MatrixXd final_W =
      require_matrix(require_field(j, "final_W", ""), "/final_W");
  if (final_W.rows() != output_dim || final_W.cols() != widths.back()) {
    throw SchemaError("/final_W", "expected shape " +
                                      std::to_string(output_dim) + "x" +
                                      std::to_string(widths.back()));
  }
  nf.network.final_W = std::move(final_W);
  return nf;
}

// ---------------------------------------------------------------------------
// Measure files

nlohmann::json measure_to_json(std::span<const ChainFunction> roots) {
  if (roots.empty()) {
    throw ContractError("measure file needs at least one root");
  }
  const RegistryPtr registry = roots[0].registry;
  for (const auto& r : roots) {
    if (r.registry != registry) {
      throw ContractError("roots must share one registry");
    }
  }
  // Depth-first closure over the shared-function graph.
  nlohmann::json functions = nlohmann::json::object();
  std::unordered_set<FunctionId> seen;
  std::vector<FunctionId> stack;
  for (const auto& r : roots) {
    stack.push_back(r.id);
  }
  while (!stack.empty()) {
    FunctionId id = std::move(stack.back());
    stack.pop_back();
    if (!seen.insert(id).second) {
      continue;
    }
    const ChainFunctionData& fn = registry->at(id);
    functions[id] = function_body_json(fn);
    for (const auto& a : fn.measure.atoms) {
      if (const auto* ch = std::get_if<ChainAtom>(&a)) {
        stack.push_back(ch->f);
      }
    }
  }
  nlohmann::json j;
  j["functions"] = std::move(functions);
  if (roots.size() == 1) {
    j["root"] = roots[0].id;
  } else {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : roots) {
      arr.push_back(r.id);
    }
    j["root"] = std::move(arr);
  }
  return j;
}

namespace {

struct PendingFunction {
  int depth = 1;
  std::vector<ActivationSpec> activations;
  std::vector<WeightingSpec> weightings;
  // Atoms with unresolved child keys: layer-1 atoms are complete, chain
  // atoms carry the file key of the child until interning.
  std::vector<Atom> atoms;
  std::vector<std::string> child_keys;  // one per atom; empty for layer 1
  std::vector<double> coeffs;
  std::string pointer;
};

PendingFunction parse_function_entry(const std::string& key,
                                     const nlohmann::json& j) {
  std::string ptr = "/functions/" + key;
  PendingFunction p;
  p.pointer = ptr;
  long long depth = require_integer(require_field(j, "depth", ptr), ptr + "/depth");
  if (depth < 1) {
    throw SchemaError(ptr + "/depth", "depth must be positive");
  }
  p.depth = static_cast<int>(depth);
  const auto& ja =
      require_array(require_field(j, "activation", ptr), ptr + "/activation");
  for (std::size_t i = 0; i < ja.size(); ++i) {
    p.activations.push_back(
        require_activation(ja[i], ptr + "/activation/" + std::to_string(i)));
  }
  const auto& jwg =
      require_array(require_field(j, "weighting", ptr), ptr + "/weighting");
  for (std::size_t i = 0; i < jwg.size(); ++i) {
    p.weightings.push_back(
        require_weighting(jwg[i], ptr + "/weighting/" + std::to_string(i)));
  }
  if (p.activations.size() != static_cast<std::size_t>(p.depth) ||
      p.weightings.size() != static_cast<std::size_t>(p.depth)) {
    throw SchemaError(ptr, "activation and weighting lists must have one entry per layer");
  }
  const auto& jat = require_array(require_field(j, "atoms", ptr), ptr + "/atoms");
  const auto& jc = require_array(require_field(j, "coeffs", ptr), ptr + "/coeffs");
  if (jat.size() != jc.size()) {
    throw SchemaError(ptr, "atoms and coeffs must have the same length");
  }
  for (std::size_t i = 0; i < jat.size(); ++i) {
    std::string aptr = ptr + "/atoms/" + std::to_string(i);
    const auto& ja_i = jat[i];
    if (!ja_i.is_object()) {
      throw SchemaError(aptr, "expected an object");
    }
    double b = require_number(require_field(ja_i, "b", aptr), aptr + "/b");
    if (ja_i.contains("v") == ja_i.contains("f")) {
      throw SchemaError(aptr, "atom needs exactly one of \"v\" or \"f\"");
    }
    if (ja_i.contains("v")) {
      Layer1Atom a;
      a.v = require_vector(ja_i["v"], aptr + "/v");
      a.b = b;
      p.atoms.emplace_back(std::move(a));
      p.child_keys.emplace_back();
    } else {
      std::string child = require_string(ja_i["f"], aptr + "/f");
      p.atoms.emplace_back(ChainAtom{p.depth, FunctionId{}, b});
      p.child_keys.push_back(std::move(child));
    }
    p.coeffs.push_back(require_number(jc[i], ptr + "/coeffs/" + std::to_string(i)));
  }
  return p;
}

}  // namespace

std::vector<ChainFunction> measure_from_json(const nlohmann::json& j,
                                             RegistryPtr registry) {
  if (!registry) {
    registry = std::make_shared<Registry>();
  }
  const auto& jf = require_field(j, "functions", "");
  if (!jf.is_object()) {
    throw SchemaError("/functions", "expected an object");
  }
  // std::map keeps pass order deterministic.
  std::map<std::string, PendingFunction> pending;
  for (auto it = jf.begin(); it != jf.end(); ++it) {
    pending.emplace(it.key(), parse_function_entry(it.key(), it.value()));
  }
  for (const auto& [key, p] : pending) {
    for (const auto& child : p.child_keys) {
      if (!child.empty() && pending.find(child) == pending.end()) {
        throw SchemaError(p.pointer, "atom references unknown function \"" +
                                         child + "\"");
      }
    }
  }

  // Intern bottom-up: an entry is ready once all its children are interned.
  // No progress with entries left means a reference cycle.
  std::unordered_map<std::string, FunctionId> resolved;
  std::size_t remaining = pending.size();
  bool progress = true;
  while (remaining > 0 && progress) {
    progress = false;
    for (auto& [key, p] : pending) {
      if (resolved.count(key)) {
        continue;
      }
      bool ready = true;
      for (const auto& child : p.child_keys) {
        if (!child.empty() && !resolved.count(child)) {
          ready = false;
          break;
        }
      }
      if (!ready) {
        continue;
      }
      AtomicMeasure m;
      m.atoms = p.atoms;
      m.coeffs = p.coeffs;
      for (std::size_t i = 0; i < m.atoms.size(); ++i) {
        if (!p.child_keys[i].empty()) {
          std::get<ChainAtom>(m.atoms[i]).f = resolved.at(p.child_keys[i]);
        }
      }
      try {
        resolved[key] = registry->intern(p.depth, std::move(m), p.activations,
                                         p.weightings);
      } catch (const Error& e) {
        throw SchemaError(p.pointer, e.what());
      }
      progress = true;
      --remaining;
    }
  }
  if (remaining > 0) {
    throw SchemaError("/functions",
                      "unresolvable function references (reference cycle)");
  }

  const auto& jroot = require_field(j, "root", "");
  std::vector<std::string> root_keys;
  if (jroot.is_string()) {
    root_keys.push_back(jroot.get<std::string>());
  } else if (jroot.is_array()) {
    for (std::size_t i = 0; i < jroot.size(); ++i) {
      root_keys.push_back(require_string(jroot[i], "/root/" + std::to_string(i)));
    }
  } else {
    throw SchemaError("/root", "expected a string or an array of strings");
  }
  if (root_keys.empty()) {
    throw SchemaError("/root", "need at least one root");
  }
  std::vector<ChainFunction> roots;
  for (const auto& key : root_keys) {
    auto it = resolved.find(key);
    if (it == resolved.end()) {
      throw SchemaError("/root", "root \"" + key + "\" is not in /functions");
    }
    roots.push_back(ChainFunction{registry, it->second});
  }
  return roots;
}

// ---------------------------------------------------------------------------
// Datasets

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

double parse_csv_number(const std::string& tok, const std::string& where) {
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
  double x = 0.0;
  auto res = std::from_chars(begin, end, x);
  if (res.ec != std::errc() || res.ptr != end || begin == end) {
    throw SchemaError(where, "cannot parse \"" + tok + "\" as a number");
  }
  if (!std::isfinite(x)) {
    throw SchemaError(where, "value is not finite");
  }
  return x;
}

}  // namespace

std::string gram_to_csv(const GramMatrix& G) {
  std::string out;
  char buf[64];
  for (Eigen::Index i = 0; i < G.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < G.values.cols(); ++j) {
      int n = std::snprintf(buf, sizeof buf, "%.17g", G.values(i, j));
      if (j > 0) {
        out.push_back(',');
      }
      out.append(buf, static_cast<std::size_t>(n));
    }
    out.push_back('\n');
  }
  return out;
}

Dataset dataset_from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw SchemaError("header", "empty file");
  }
  std::vector<std::string> header = split_csv_line(line);
  std::size_t d = 0;
  while (d < header.size() && header[d] == "x_" + std::to_string(d + 1)) {
    ++d;
  }
  if (d == 0) {
    throw SchemaError("header", "expected columns x_1..x_d[,y_1..y_D]");
  }
  std::size_t D = 0;
  while (d + D < header.size() &&
         header[d + D] == "y_" + std::to_string(D + 1)) {
    ++D;
  }
  if (d + D != header.size()) {
    throw SchemaError("header", "unexpected column \"" + header[d + D] + "\"");
  }

  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") {
      continue;
    }
    std::vector<std::string> toks = split_csv_line(line);
    if (toks.size() != d + D) {
      throw SchemaError("line " + std::to_string(lineno),
                        "expected " + std::to_string(d + D) + " columns, got " +
                            std::to_string(toks.size()));
    }
    std::vector<double> row;
    for (std::size_t k = 0; k < toks.size(); ++k) {
      row.push_back(parse_csv_number(
          toks[k], "line " + std::to_string(lineno) + " column " +
                       std::to_string(k + 1)));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw SchemaError("dataset", "no data rows");
  }
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(d));
  Eigen::MatrixXd Y(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(D));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
    for (std::size_t k = 0; k < D; ++k) {
      Y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          rows[i][d + k];
    }
  }
  try {
    return Dataset::create(std::move(X), D > 0
                                             ? std::optional<Eigen::MatrixXd>(Y)
                                             : std::nullopt);
  } catch (const Error& e) {
    throw SchemaError("dataset", e.what());
  }
}

Dataset dataset_from_json(const nlohmann::json& j) {
  Eigen::MatrixXd X = require_matrix(require_field(j, "X", ""), "/X");
  std::optional<Eigen::MatrixXd> Y;
  if (j.contains("Y")) {
    Y = require_matrix(j["Y"], "/Y");
  }
  try {
    return Dataset::create(std::move(X), std::move(Y));
  } catch (const Error& e) {
    throw SchemaError("/X", e.what());
  }
}

Dataset load_dataset_file(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
    std::ifstream in(path);
    if (!in) {
      throw SchemaError(path, "cannot open file");
    }
    return dataset_from_csv(in);
  }
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    return dataset_from_json(load_json_file(path));
  }
  throw SchemaError(path, "dataset files must end in .csv or .json");
}

// ---------------------------------------------------------------------------
// Fit configuration

FitConfig fit_config_from_json(const nlohmann::json& j) {
  FitConfig cfg;
  cfg.depth = static_cast<int>(
      require_integer(require_field(j, "depth", ""), "/depth"));
  cfg.lambda = require_number(require_field(j, "lambda", ""), "/lambda");
  const auto& jp =
      require_array(require_field(j, "pool_sizes", ""), "/pool_sizes");
  for (std::size_t i = 0; i < jp.size(); ++i) {
    cfg.pool_sizes.push_back(static_cast<int>(
        require_integer(jp[i], "/pool_sizes/" + std::to_string(i))));
  }
  const auto& ja =
      require_array(require_field(j, "activation", ""), "/activation");
  for (std::size_t i = 0; i < ja.size(); ++i) {
    cfg.activations.push_back(
        require_activation(ja[i], "/activation/" + std::to_string(i)));
  }
  const auto& jw =
      require_array(require_field(j, "weighting", ""), "/weighting");
  for (std::size_t i = 0; i < jw.size(); ++i) {
    cfg.weightings.push_back(
        require_weighting(jw[i], "/weighting/" + std::to_string(i)));
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) {
      throw SchemaError("/seed", "expected a nonnegative integer");
    }
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("pivot_threshold")) {
    cfg.pivot_threshold = require_number(j["pivot_threshold"], "/pivot_threshold");
  }
  if (j.contains("objective_tol")) {
    cfg.objective_tol = require_number(j["objective_tol"], "/objective_tol");
  }
  if (j.contains("max_sweeps")) {
    cfg.max_sweeps = static_cast<int>(
        require_integer(j["max_sweeps"], "/max_sweeps"));
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw SchemaError("", e.what());
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Files

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw SchemaError(path, "cannot open file");
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path, e.what());
  }
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open " + path + " for writing");
  }
  out << contents;
  if (!out) {
    throw Error("failed writing " + path);
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dump_json(const nlohmann::json& j) {
  return j.dump(2) + "\n";
}

}  // namespace crkbs

#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccp/errors.hpp"
#include "ccp/milp.hpp"
#include "ccp/net.hpp"

namespace ccp {

namespace detail {

inline const nlohmann::json& require_key(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key)) throw ParseError("missing required key \"" + key + "\"");
  return j.at(key);
}

inline double as_number(const nlohmann::json& j, const std::string& field) {
  if (!j.is_number()) throw ParseError(field + ": expected a number");
  return j.get<double>();
}

inline int as_int(const nlohmann::json& j, const std::string& field) {
  if (!j.is_number_integer()) throw ParseError(field + ": expected an integer");
  return j.get<int>();
}

inline Vector read_vector(const nlohmann::json& j, const std::string& field, int expected) {
  if (!j.is_array()) throw ParseError(field + ": expected an array of numbers");
  if (int(j.size()) != expected)
    throw ParseError(field + ": expected length " + std::to_string(expected) + ", got " +
                     std::to_string(j.size()));
  Vector out(expected);
  for (int i = 0; i < expected; ++i) out(i) = as_number(j.at(i), field);
  return out;
}

// Sparse [row, col, value] triplets over a zero matrix, 0-indexed.
inline Matrix read_triplets(const nlohmann::json& j, const std::string& field, int rows, int cols) {
  if (!j.is_array()) throw ParseError(field + ": expected an array of [row, col, value] triplets");
  Matrix out = Matrix::Zero(rows, cols);
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != 3)
      throw ParseError(field + ": each entry must be a [row, col, value] triplet");
    const int r = as_int(t.at(0), field);
    const int c = as_int(t.at(1), field);
    if (r < 0 || r >= rows || c < 0 || c >= cols)
      throw ParseError(field + ": triplet index (" + std::to_string(r) + "," + std::to_string(c) +
                       ") out of range");
    out(r, c) = as_number(t.at(2), field);
  }
  return out;
}

inline nlohmann::json write_triplets(const Matrix& M) {
  nlohmann::json out = nlohmann::json::array();
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j)
      if (M(i, j) != 0.0) out.push_back({i, j, M(i, j)});
  return out;
}

inline nlohmann::json write_vector(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline nlohmann::json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void dump_file(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write to " + path + " failed");
}

}  // namespace detail

inline MilpInstance instance_from_json(const nlohmann::json& j) {
  using detail::require_key;
  MilpInstance inst;
  const auto& name = require_key(j, "name");
  if (!name.is_string()) throw ParseError("name: expected a string");
  inst.name = name.get<std::string>();
  inst.k = detail::as_int(require_key(j, "k"), "k");
  inst.n = detail::as_int(require_key(j, "n"), "n");
  inst.m = detail::as_int(require_key(j, "m"), "m");
  if (inst.m < 1 || inst.k < 0 || inst.n < inst.k)
    throw ParseError("k/n/m: inconsistent dimensions");
  inst.A = detail::read_triplets(require_key(j, "A"), "A", inst.m, inst.k);
  inst.G = detail::read_triplets(require_key(j, "G"), "G", inst.m, inst.n - inst.k);
  inst.b = detail::read_vector(require_key(j, "b"), "b", inst.m);
  inst.c = detail::read_vector(require_key(j, "c"), "c", inst.k);
  inst.h = detail::read_vector(require_key(j, "h"), "h", inst.n - inst.k);
  if (j.contains("known_optimum") && !j.at("known_optimum").is_null())
    inst.known_optimum = detail::as_number(j.at("known_optimum"), "known_optimum");
  inst.validate();
  return inst;
}

inline nlohmann::json instance_to_json(const MilpInstance& inst) {
  inst.validate();
  nlohmann::json j;
  j["name"] = inst.name;
  j["k"] = inst.k;
  j["n"] = inst.n;
  j["m"] = inst.m;
  j["A"] = detail::write_triplets(inst.A);
  j["G"] = detail::write_triplets(inst.G);
  j["b"] = detail::write_vector(inst.b);
  j["c"] = detail::write_vector(inst.c);
  j["h"] = detail::write_vector(inst.h);
  if (inst.known_optimum) j["known_optimum"] = *inst.known_optimum;
  return j;
}

inline MilpInstance load_instance(const std::string& path) {
  return instance_from_json(detail::parse_file(path));
}

inline void save_instance(const MilpInstance& inst, const std::string& path) {
  detail::dump_file(instance_to_json(inst), path);
}

inline SubadditiveNet net_from_json(const nlohmann::json& j) {
  using detail::require_key;
  SubadditiveNet net;
  net.input_dim = detail::as_int(require_key(j, "input_dim"), "input_dim");
  const auto& variant = require_key(j, "variant");
  if (!variant.is_string()) throw ParseError("variant: expected a string");
  LayerVariant var;
  if (variant == "gmi")
    var = LayerVariant::gmi;
  else if (variant == "log")
    var = LayerVariant::log;
  else
    throw ParseError("variant: expected \"gmi\" or \"log\"");
  const auto& layers = require_key(j, "layers");
  if (!layers.is_array()) throw ParseError("layers: expected an array");
  for (const auto& lj : layers) {
    GmiLayer layer;
    layer.variant = var;
    const int width = detail::as_int(require_key(lj, "width"), "layers.width");
    const int indim = detail::as_int(require_key(lj, "indim"), "layers.indim");
    if (width < 1 || indim < 1) throw ParseError("layers: width and indim must be >= 1");
    layer.W = detail::read_triplets(require_key(lj, "W"), "layers.W", width, indim);
    layer.v = detail::read_vector(require_key(lj, "v"), "layers.v", width);
    net.layers.push_back(std::move(layer));
  }
  net.validate();
  return net;
}

inline nlohmann::json net_to_json(const SubadditiveNet& net) {
  net.validate();
  nlohmann::json j;
  j["input_dim"] = net.input_dim;
  j["variant"] = net.layers.empty() ? "gmi" : to_string(net.layers.front().variant);
  j["layers"] = nlohmann::json::array();
  for (const auto& layer : net.layers) {
    nlohmann::json lj;
    lj["width"] = layer.width();
    lj["indim"] = layer.indim();
    lj["W"] = detail::write_triplets(layer.W);
    lj["v"] = detail::write_vector(layer.v);
    j["layers"].push_back(std::move(lj));
  }
  return j;
}

inline SubadditiveNet load_net(const std::string& path) { return net_from_json(detail::parse_file(path)); }

inline void save_net(const SubadditiveNet& net, const std::string& path) {
  detail::dump_file(net_to_json(net), path);
}

}  // namespace ccp

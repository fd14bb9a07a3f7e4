#include "xfer/report.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>

#include <openssl/evp.h>

#include "xfer/error.hpp"

namespace xfer {

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1)
    throw Error("SHA-256 digest failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "' for digest");
  return sha256_hex(std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()));
}

void RunManifest::add_input(const std::filesystem::path& path) {
  input_digests[path.string()] = sha256_file(path);
}

nlohmann::json to_json(const RunManifest& m) {
  return {{"subcommand", m.subcommand},
          {"arguments", m.arguments},
          {"input_digests", m.input_digests},
          {"seeds", m.seeds},
          {"tool_version", m.tool_version}};
}

nlohmann::json to_json(const TransferabilityReport& r) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : r.layers)
    layers.push_back(
        {{"name", l.name}, {"T", l.T}, {"D_random", l.d_random}, {"D_pretrained", l.d_pretrained}, {"excluded", l.excluded}});
  return {{"variant", std::string(to_string(r.variant))}, {"network_T", r.network_T}, {"layers", std::move(layers)}};
}

TransferabilityReport report_from_json(const nlohmann::json& j) {
  TransferabilityReport r;
  try {
    r.variant = parse_variant(j.at("variant").get<std::string>());
    r.network_T = j.at("network_T").get<double>();
    for (const auto& l : j.at("layers")) {
      r.layers.push_back({l.at("name").get<std::string>(), l.at("T").get<double>(), l.at("D_random").get<double>(),
                          l.at("D_pretrained").get<double>(), l.at("excluded").get<bool>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed transferability report: ") + e.what());
  }
  return r;
}

nlohmann::json to_json(const FitResult& f) {
  nlohmann::json coefficients = nlohmann::json::object();
  for (std::size_t k = 0; k < f.coefficients.size(); ++k) coefficients[f.predictor_names[k]] = f.coefficients[k];
  return {{"predictor_names", f.predictor_names},
          {"coefficients", std::move(coefficients)},
          {"intercept", f.intercept},
          {"r_squared", f.r_squared},
          {"f_statistic", f.f_statistic},
          {"p_value", f.p_value},
          {"standardized", f.standardized},
          {"n", f.n}};
}

nlohmann::json to_json(const DomainMetrics& m) {
  return {{"gap", m.gap}, {"width", m.width}, {"amount", m.amount}, {"reference", m.reference},
          {"bandwidth", m.bandwidth}};
}

std::string dump_report(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw WriteError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw WriteError("failed writing '" + path.string() + "'");
}

}  // namespace xfer

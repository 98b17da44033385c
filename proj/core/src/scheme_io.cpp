#include "mbqc/scheme_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mbqc {

using nlohmann::json;

int SchemeTemplate::bulk_blocks_for(int n_sites) const {
  int rest = n_sites - left_sites - right_sites;
  if (rest < 0 || bulk.empty()) throw std::invalid_argument("chain too short for scheme " + name);
  int n = 0;
  while (rest > 0) {
    rest -= bulk[static_cast<std::size_t>(n) % bulk.size()].sites;
    ++n;
  }
  if (rest != 0)
    throw std::invalid_argument("chain of " + std::to_string(n_sites) + " sites does not fit the blocks of " + name);
  return n;
}

SymmetryScheme SchemeTemplate::instantiate_blocks(int n_bulk) const {
  if (n_bulk < 1) throw std::invalid_argument("need at least one bulk block");
  SymmetryScheme s;
  s.name = name;
  s.generators = generators;
  std::vector<int> sizes{left_sites};
  auto parse_list = [](const std::vector<std::string>& v) {
    std::vector<PauliOperator> out;
    for (const auto& lit : v) out.push_back(PauliOperator::parse(lit));
    return out;
  };
  s.u0 = parse_list(u0);
  s.vR0 = parse_list(vR0);
  for (int i = 1; i <= n_bulk; ++i) {
    const auto& e = bulk[static_cast<std::size_t>(i - 1) % bulk.size()];
    sizes.push_back(e.sites);
    s.bulk.push_back({parse_list(e.u), parse_list(e.vL)});
  }
  sizes.push_back(right_sites);
  s.vL_right = parse_list(vL_right);
  s.partition = SitePartition(sizes);
  auto parse_elems = [&](const std::vector<std::string>& v) {
    std::vector<GroupElement> out;
    for (const auto& lab : v) out.push_back(s.parse_element(lab));
    return out;
  };
  if (H) s.H = parse_elems(*H);
  if (Hprime) s.Hprime = parse_elems(*Hprime);
  s.chi = chi;
  return s;
}

SymmetryScheme SchemeTemplate::instantiate_sites(int n_sites) const {
  return instantiate_blocks(bulk_blocks_for(n_sites));
}

SchemeTemplate parse_scheme_template(const std::string& text) {
  const json j = json::parse(text);
  SchemeTemplate t;
  t.name = j.at("name").get<std::string>();
  t.generators = j.at("generators").get<std::vector<std::string>>();
  const auto& left = j.at("left");
  t.left_sites = left.at("sites").get<int>();
  t.u0 = left.at("u").get<std::vector<std::string>>();
  t.vR0 = left.at("vR").get<std::vector<std::string>>();
  for (const auto& e : j.at("bulk")) {
    SchemeTemplate::Entry entry;
    entry.sites = e.at("sites").get<int>();
    entry.u = e.at("u").get<std::vector<std::string>>();
    entry.vL = e.at("vL").get<std::vector<std::string>>();
    t.bulk.push_back(std::move(entry));
  }
  const auto& right = j.at("right");
  t.right_sites = right.at("sites").get<int>();
  t.vL_right = right.at("vL").get<std::vector<std::string>>();
  if (j.contains("H")) t.H = j.at("H").get<std::vector<std::string>>();
  if (j.contains("Hprime")) t.Hprime = j.at("Hprime").get<std::vector<std::string>>();
  if (j.contains("chi")) t.chi = j.at("chi").get<std::vector<int>>();
  if (j.contains("default_sites")) t.default_sites = j.at("default_sites").get<int>();
  return t;
}

SchemeTemplate load_scheme_template(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scheme file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scheme_template(ss.str());
}

std::string scheme_template_to_json(const SchemeTemplate& t) {
  json j;
  j["name"] = t.name;
  j["generators"] = t.generators;
  j["left"] = {{"sites", t.left_sites}, {"u", t.u0}, {"vR", t.vR0}};
  j["bulk"] = json::array();
  for (const auto& e : t.bulk) j["bulk"].push_back({{"sites", e.sites}, {"u", e.u}, {"vL", e.vL}});
  j["right"] = {{"sites", t.right_sites}, {"vL", t.vL_right}};
  if (t.H) j["H"] = *t.H;
  if (t.Hprime) j["Hprime"] = *t.Hprime;
  if (t.chi) j["chi"] = *t.chi;
  if (t.default_sites) j["default_sites"] = *t.default_sites;
  return j.dump(2);
}

SchemeTemplate resolve_scheme(const std::string& name_or_path) {
  for (const auto& n : builtin_scheme_names())
    if (n == name_or_path) return builtin_scheme(n);
  if (std::filesystem::exists(name_or_path)) return load_scheme_template(name_or_path);
  throw std::invalid_argument("unknown scheme '" + name_or_path + "'");
}

}  // namespace mbqc

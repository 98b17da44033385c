#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mbqc/scheme.hpp"

namespace mbqc {

/// Chain-length independent description of a scheme. Bulk block i uses
/// pattern entry (i-1) mod pattern.size().
struct SchemeTemplate {
  struct Entry {
    int sites = 0;
    std::vector<std::string> u;
    std::vector<std::string> vL;
  };
  std::string name;
  std::vector<std::string> generators;
  int left_sites = 0;
  std::vector<std::string> u0;
  std::vector<std::string> vR0;
  std::vector<Entry> bulk;
  int right_sites = 0;
  std::vector<std::string> vL_right;
  std::optional<std::vector<std::string>> H;
  std::optional<std::vector<std::string>> Hprime;
  std::optional<std::vector<int>> chi;
  std::optional<int> default_sites;

  /// Number of bulk blocks that fill a chain of n_sites; throws if impossible.
  int bulk_blocks_for(int n_sites) const;
  SymmetryScheme instantiate_blocks(int n_bulk) const;
  SymmetryScheme instantiate_sites(int n_sites) const;
};

/// Scheme files are JSON documents; see schemes/*.json for the layout.
SchemeTemplate parse_scheme_template(const std::string& json_text);
SchemeTemplate load_scheme_template(const std::string& path);
std::string scheme_template_to_json(const SchemeTemplate& t);

/// Built-in templates: cluster_block2, cluster_site_local, kitaev_gamma,
/// qca_block6, qca_site_local, ising.
const SchemeTemplate& builtin_scheme(const std::string& name);
std::vector<std::string> builtin_scheme_names();
/// Resolves a built-in name or a file path.
SchemeTemplate resolve_scheme(const std::string& name_or_path);

}  // namespace mbqc

#ifndef DSF_IO_HPP
#define DSF_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "dsf/graph.hpp"
#include "dsf/model.hpp"

namespace dsf::io {

namespace fs = std::filesystem;

struct Dataset {
    std::string name;
    Graph graph;
};

/**
 * Reads a dataset directory: meta.json, edges.tsv, nodes.tsv.
 * Every malformed line raises DataError naming the file and 1-based line.
 */
Dataset load_dataset(fs::path const& dir);

/// Writes the same three files (atomically, one by one).
void write_dataset(fs::path const& dir, std::string const& name, Graph const& g);

/// Parses flat `key = value` text; '#' starts a comment. Unknown keys, repeated
/// keys and bad values raise ConfigError with the line number. Missing keys keep defaults.
DsfConfig parse_config(std::string_view text, DsfConfig base = {});
DsfConfig load_config(fs::path const& path);

/// Canonical text of every key in fixed order; parse_config(config_text(c)) == c.
std::string config_text(DsfConfig const& cfg);

/// FNV-1a 64 of config_text, as 16 lowercase hex digits.
std::string config_hash(DsfConfig const& cfg);

/// Shortest round-trip decimal form.
std::string format_double(double v);

/// Writes to a sibling temp file then renames over `path`.
void atomic_write(fs::path const& path, std::string_view content);

std::string read_file(fs::path const& path);

/// {name: {"shape": [r, c], "values": [row-major]}} over the active parameters.
nlohmann::json checkpoint_json(DsfParams& params, DsfConfig const& cfg);

/// Restores parameters written by checkpoint_json; shapes must match init_params output.
void load_checkpoint(nlohmann::json const& j, DsfParams& params, DsfConfig const& cfg);

/// `node_id,beta_0,...,beta_K` with one row per node.
std::string beta_csv(Eigen::MatrixXd const& beta);

/// Inverse of beta_csv; DataError with line numbers on malformed rows.
Eigen::MatrixXd parse_beta_csv(std::string_view text, std::string const& origin);

/// Serialises json with fixed 2-space indentation and a trailing newline.
std::string dump(nlohmann::json const& j);

} // namespace dsf::io

#endif // DSF_IO_HPP

#include "dsf/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "dsf/errors.hpp"

namespace dsf::io {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto const pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s) {
    auto const first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    auto const last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

template <class T>
bool parse_number(std::string_view s, T& out) {
    if (s.empty()) return false;
    if constexpr (std::is_floating_point_v<T>) {
        // from_chars rejects a leading '+', which is fine for our formats
        auto const res = std::from_chars(s.data(), s.data() + s.size(), out, std::chars_format::general);
        return res.ec == std::errc() && res.ptr == s.data() + s.size();
    } else {
        auto const res = std::from_chars(s.data(), s.data() + s.size(), out);
        return res.ec == std::errc() && res.ptr == s.data() + s.size();
    }
}

/// Calls fn(line, 1-based number) for every line; a final empty line after LF is ignored.
void for_each_line(std::string_view text, std::function<void(std::string_view, int)> const& fn) {
    int number = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        fn(text.substr(start, end - start), ++number);
        start = end + 1;
    }
}

[[noreturn]] void data_error(fs::path const& file, int line, std::string const& what) {
    throw DataError(file.string() + ":" + std::to_string(line) + ": " + what);
}

} // namespace

std::string read_file(fs::path const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void atomic_write(fs::path const& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw DataError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string format_double(double v) {
    char buf[64];
    auto const res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string dump(nlohmann::json const& j) { return j.dump(2) + "\n"; }

Dataset load_dataset(fs::path const& dir) {
    fs::path const meta_path = dir / "meta.json";
    fs::path const edges_path = dir / "edges.tsv";
    fs::path const nodes_path = dir / "nodes.tsv";
    for (auto const& p : {meta_path, edges_path, nodes_path})
        if (!fs::is_regular_file(p)) throw DataError("missing dataset file " + p.string());

    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(read_file(meta_path));
    } catch (nlohmann::json::parse_error const& e) {
        throw DataError(meta_path.string() + ": " + e.what());
    }
    Dataset ds;
    int n = 0, f = 0, c = 0;
    try {
        ds.name = meta.at("name").get<std::string>();
        n = meta.at("num_nodes").get<int>();
        f = meta.at("num_features").get<int>();
        c = meta.at("num_classes").get<int>();
    } catch (nlohmann::json::exception const& e) {
        throw DataError(meta_path.string() + ": " + e.what());
    }
    if (n < 0 || f < 0 || c < 1) throw DataError(meta_path.string() + ": invalid sizes");

    std::vector<Edge> edges;
    for_each_line(read_file(edges_path), [&](std::string_view line, int no) {
        if (trim(line).empty()) return;
        auto const parts = split(line, '\t');
        int a = 0, b = 0;
        if (parts.size() != 2 || !parse_number(parts[0], a) || !parse_number(parts[1], b))
            data_error(edges_path, no, "expected 'src<TAB>dst' with integer ids");
        if (a < 0 || a >= n || b < 0 || b >= n)
            data_error(edges_path, no, "node id outside [0, " + std::to_string(n) + ")");
        edges.emplace_back(a, b);
    });

    Eigen::MatrixXd x(n, f);
    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for_each_line(read_file(nodes_path), [&](std::string_view line, int no) {
        if (trim(line).empty()) return;
        auto const parts = split(line, '\t');
        if (parts.size() != 3) data_error(nodes_path, no, "expected 'id<TAB>label<TAB>features'");
        int id = 0, label = 0;
        if (!parse_number(parts[0], id)) data_error(nodes_path, no, "bad node id");
        if (id < 0 || id >= n) data_error(nodes_path, no, "node id outside [0, " + std::to_string(n) + ")");
        if (seen[id]) data_error(nodes_path, no, "duplicate node id " + std::to_string(id));
        if (!parse_number(parts[1], label)) data_error(nodes_path, no, "bad label");
        if (label < 0 || label >= c) data_error(nodes_path, no, "label outside [0, " + std::to_string(c) + ")");
        auto const values = f == 0 && parts[2].empty() ? std::vector<std::string_view>{} : split(parts[2], ',');
        if (static_cast<int>(values.size()) != f)
            data_error(nodes_path, no,
                       "expected " + std::to_string(f) + " features, got " + std::to_string(values.size()));
        for (int j = 0; j < f; ++j) {
            double v = 0.0;
            if (!parse_number(values[j], v)) data_error(nodes_path, no, "bad feature value #" + std::to_string(j + 1));
            x(id, j) = v;
        }
        labels[id] = label;
        seen[id] = true;
    });
    for (int i = 0; i < n; ++i)
        if (!seen[i]) throw DataError(nodes_path.string() + ": node " + std::to_string(i) + " missing");

    ds.graph = build_graph(edges, n, std::move(x), std::move(labels), c);
    return ds;
}

void write_dataset(fs::path const& dir, std::string const& name, Graph const& g) {
    nlohmann::json meta = {{"name", name},
                           {"num_nodes", g.num_nodes()},
                           {"num_features", g.num_features()},
                           {"num_classes", g.class_count()}};
    atomic_write(dir / "meta.json", dump(meta));
    std::string edges;
    for (auto const& [a, b] : g.edges()) edges += std::to_string(a) + "\t" + std::to_string(b) + "\n";
    atomic_write(dir / "edges.tsv", edges);
    std::string nodes;
    for (int i = 0; i < g.num_nodes(); ++i) {
        nodes += std::to_string(i) + "\t" + std::to_string(g.label(i)) + "\t";
        for (int j = 0; j < g.num_features(); ++j) {
            if (j) nodes += ',';
            nodes += format_double(g.features()(i, j));
        }
        nodes += '\n';
    }
    atomic_write(dir / "nodes.tsv", nodes);
}

// ---- config ----------------------------------------------------------------

namespace {

struct Field {
    std::string key;
    std::function<void(DsfConfig&, std::string_view)> set;
    std::function<std::string(DsfConfig const&)> get;
};

template <class E>
E parse_enum(std::string_view v, std::vector<std::pair<std::string_view, E>> const& table) {
    for (auto const& [name, e] : table)
        if (v == name) return e;
    std::string opts;
    for (auto const& [name, e] : table) opts += (opts.empty() ? "" : "|") + std::string(name);
    throw ConfigError("expected one of " + opts + ", got '" + std::string(v) + "'");
}

int as_int(std::string_view v) {
    int out = 0;
    if (!parse_number(v, out)) throw ConfigError("expected an integer, got '" + std::string(v) + "'");
    return out;
}

double as_double(std::string_view v) {
    double out = 0.0;
    if (!parse_number(v, out)) throw ConfigError("expected a number, got '" + std::string(v) + "'");
    return out;
}

bool as_bool(std::string_view v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("expected true|false, got '" + std::string(v) + "'");
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

#define DSF_INT_FIELD(name) \
    Field{#name, [](DsfConfig& c, std::string_view v) { c.name = as_int(v); }, \
          [](DsfConfig const& c) { return std::to_string(c.name); }}
#define DSF_DOUBLE_FIELD(name) \
    Field{#name, [](DsfConfig& c, std::string_view v) { c.name = as_double(v); }, \
          [](DsfConfig const& c) { return format_double(c.name); }}
#define DSF_BOOL_FIELD(name) \
    Field{#name, [](DsfConfig& c, std::string_view v) { c.name = as_bool(v); }, \
          [](DsfConfig const& c) { return bool_text(c.name); }}

std::vector<Field> const& fields() {
    static std::vector<Field> const table = {
        DSF_INT_FIELD(K),
        DSF_INT_FIELD(hidden),
        DSF_INT_FIELD(pe_dim),
        DSF_DOUBLE_FIELD(eta1),
        DSF_DOUBLE_FIELD(eta2),
        DSF_DOUBLE_FIELD(lambda_orth),
        Field{"mode",
              [](DsfConfig& c, std::string_view v) {
                  c.mode = parse_enum<DsfMode>(v, {{"I", DsfMode::I}, {"R", DsfMode::R}});
              },
              [](DsfConfig const& c) { return to_string(c.mode); }},
        Field{"backbone",
              [](DsfConfig& c, std::string_view v) {
                  c.backbone = parse_enum<Backbone>(
                      v, {{"gpr", Backbone::GPR}, {"bern", Backbone::Bern}, {"jacobi", Backbone::Jacobi}});
              },
              [](DsfConfig const& c) { return to_string(c.backbone); }},
        Field{"pe_init",
              [](DsfConfig& c, std::string_view v) {
                  c.pe_init = parse_enum<PeInit>(v, {{"lappe", PeInit::LapPE}, {"rwpe", PeInit::RWPE}});
              },
              [](DsfConfig const& c) { return to_string(c.pe_init); }},
        DSF_BOOL_FIELD(lap_skip_first),
        DSF_DOUBLE_FIELD(dropout),
        Field{"sigma_p",
              [](DsfConfig& c, std::string_view v) {
                  if (v == "auto") {
                      c.sigma_p.reset();
                      return;
                  }
                  c.sigma_p = parse_enum<ThetaActivation>(
                      v, {{"sigmoid", ThetaActivation::Sigmoid}, {"tanh", ThetaActivation::Tanh}});
              },
              [](DsfConfig const& c) { return c.sigma_p ? to_string(*c.sigma_p) : std::string("auto"); }},
        Field{"gamma_init",
              [](DsfConfig& c, std::string_view v) {
                  c.gamma_init = parse_enum<GammaInit>(
                      v, {{"ppr", GammaInit::PPR}, {"uniform", GammaInit::Uniform}, {"random", GammaInit::Random}});
              },
              [](DsfConfig const& c) { return to_string(c.gamma_init); }},
        DSF_DOUBLE_FIELD(ppr_alpha),
        DSF_DOUBLE_FIELD(jacobi_a),
        DSF_DOUBLE_FIELD(jacobi_b),
        DSF_BOOL_FIELD(homogeneous),
        DSF_BOOL_FIELD(ipe),
        DSF_BOOL_FIELD(lgwd),
        DSF_DOUBLE_FIELD(lr),
        DSF_DOUBLE_FIELD(weight_decay),
        DSF_DOUBLE_FIELD(prop_lr),
        DSF_DOUBLE_FIELD(prop_wd),
        DSF_INT_FIELD(max_epochs),
        DSF_INT_FIELD(patience),
    };
    return table;
}

#undef DSF_INT_FIELD
#undef DSF_DOUBLE_FIELD
#undef DSF_BOOL_FIELD

} // namespace

DsfConfig parse_config(std::string_view text, DsfConfig base) {
    std::set<std::string, std::less<>> seen;
    for_each_line(text, [&](std::string_view raw, int no) {
        std::string_view line = raw;
        if (auto const hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        line = trim(line);
        if (line.empty()) return;
        auto const eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("config line " + std::to_string(no) + ": expected key = value");
        std::string_view const key = trim(line.substr(0, eq));
        std::string_view const value = trim(line.substr(eq + 1));
        auto const& table = fields();
        auto it = std::find_if(table.begin(), table.end(), [&](Field const& fld) { return fld.key == key; });
        if (it == table.end())
            throw ConfigError("config line " + std::to_string(no) + ": unknown key '" + std::string(key) + "'");
        if (!seen.insert(std::string(key)).second)
            throw ConfigError("config line " + std::to_string(no) + ": repeated key '" + std::string(key) + "'");
        try {
            it->set(base, value);
        } catch (ConfigError const& e) {
            throw ConfigError("config line " + std::to_string(no) + " (" + std::string(key) + "): " + e.what());
        }
    });
    base.validate();
    return base;
}

DsfConfig load_config(fs::path const& path) {
    if (!fs::is_regular_file(path)) throw ConfigError("config file not found: " + path.string());
    std::string text;
    try {
        text = read_file(path);
    } catch (DataError const& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text);
}

std::string config_text(DsfConfig const& cfg) {
    std::string out;
    for (auto const& f : fields()) out += f.key + " = " + f.get(cfg) + "\n";
    return out;
}

std::string config_hash(DsfConfig const& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : config_text(cfg)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---- checkpoints and beta export ---------------------------------------------

nlohmann::json checkpoint_json(DsfParams& params, DsfConfig const& cfg) {
    nlohmann::json j = nlohmann::json::object();
    for (auto const& e : params.active(cfg)) {
        Eigen::MatrixXd const& m = *e.value;
        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(m.size()));
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) values.push_back(m(r, c));
        j[e.name] = {{"shape", {m.rows(), m.cols()}}, {"values", values}};
    }
    return j;
}

void load_checkpoint(nlohmann::json const& j, DsfParams& params, DsfConfig const& cfg) {
    for (auto const& e : params.active(cfg)) {
        if (!j.contains(e.name)) throw DataError("checkpoint: missing parameter '" + e.name + "'");
        auto const& entry = j.at(e.name);
        auto const shape = entry.at("shape").get<std::vector<Eigen::Index>>();
        auto const values = entry.at("values").get<std::vector<double>>();
        Eigen::MatrixXd& m = *e.value;
        if (shape.size() != 2 || shape[0] != m.rows() || shape[1] != m.cols() ||
            static_cast<Eigen::Index>(values.size()) != m.size())
            throw DataError("checkpoint: shape mismatch for '" + e.name + "'");
        std::size_t p = 0;
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = values[p++];
    }
}

std::string beta_csv(Eigen::MatrixXd const& beta) {
    std::string out = "node_id";
    for (Eigen::Index k = 0; k < beta.cols(); ++k) out += ",beta_" + std::to_string(k);
    out += '\n';
    for (Eigen::Index i = 0; i < beta.rows(); ++i) {
        out += std::to_string(i);
        for (Eigen::Index k = 0; k < beta.cols(); ++k) out += "," + format_double(beta(i, k));
        out += '\n';
    }
    return out;
}

Eigen::MatrixXd parse_beta_csv(std::string_view text, std::string const& origin) {
    std::vector<std::vector<double>> rows;
    int width = -1;
    for_each_line(text, [&](std::string_view line, int no) {
        if (no == 1) {
            auto const head = split(line, ',');
            if (head.empty() || head[0] != "node_id") data_error(origin, no, "expected header 'node_id,beta_0,...'");
            width = static_cast<int>(head.size()) - 1;
            if (width < 1) data_error(origin, no, "no beta columns");
            return;
        }
        if (trim(line).empty()) return;
        auto const parts = split(line, ',');
        if (static_cast<int>(parts.size()) != width + 1)
            data_error(origin, no, "expected " + std::to_string(width + 1) + " fields");
        int id = 0;
        if (!parse_number(parts[0], id) || id != static_cast<int>(rows.size()))
            data_error(origin, no, "node ids must run 0..N-1 in order");
        std::vector<double> row(static_cast<std::size_t>(width));
        for (int k = 0; k < width; ++k)
            if (!parse_number(parts[k + 1], row[k])) data_error(origin, no, "bad value in column " + std::to_string(k + 2));
        rows.push_back(std::move(row));
    });
    if (width < 0) throw DataError(origin + ": empty beta file");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), width);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int k = 0; k < width; ++k) m(static_cast<Eigen::Index>(i), k) = rows[i][k];
    return m;
}

} // namespace dsf::io

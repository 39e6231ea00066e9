#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "dsf/errors.hpp"
#include "dsf/io.hpp"
#include "fixtures.hpp"

using namespace dsf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(std::string const& name) {
    fs::path const p = fs::temp_directory_path() / ("dsf_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write(fs::path const& p, std::string const& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
}

fs::path toy_dataset(std::string const& name) {
    fs::path const dir = scratch(name);
    write(dir / "meta.json", R"({"name": "toy", "num_nodes": 3, "num_features": 2, "num_classes": 2})");
    write(dir / "edges.tsv", "0\t1\n1\t2\n");
    write(dir / "nodes.tsv", "0\t0\t1.5,0\n1\t0\t0,2\n2\t1\t-1,0.25\n");
    return dir;
}

std::string error_of(fs::path const& dir) {
    try {
        io::load_dataset(dir);
    } catch (DataError const& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("load a toy dataset") {
    auto const ds = io::load_dataset(toy_dataset("toy"));
    CHECK(ds.name == "toy");
    CHECK(ds.graph.num_nodes() == 3);
    CHECK(ds.graph.num_edges() == 2);
    CHECK(ds.graph.class_count() == 2);
    CHECK(ds.graph.features()(0, 0) == 1.5);
    CHECK(ds.graph.features()(2, 1) == 0.25);
    CHECK(ds.graph.label(2) == 1);
}

TEST_CASE("dataset write/read round trip") {
    Graph const g = test::random_graph(25, 0.2, 3, 4, 3);
    fs::path const dir = scratch("roundtrip");
    io::write_dataset(dir, "rt", g);
    auto const ds = io::load_dataset(dir);
    CHECK(ds.graph.edges() == g.edges());
    CHECK(ds.graph.features() == g.features());
    CHECK(ds.graph.labels() == g.labels());
}

TEST_CASE("malformed dataset files report file and line") {
    fs::path const dir = toy_dataset("bad");
    write(dir / "edges.tsv", "0\t1\n1 2\n");
    CHECK(error_of(dir).find("edges.tsv:2") != std::string::npos);
    write(dir / "edges.tsv", "0\t1\n1\t7\n");
    CHECK(error_of(dir).find("edges.tsv:2") != std::string::npos);
    write(dir / "edges.tsv", "0\t1\n");
    write(dir / "nodes.tsv", "0\t0\t1,0\n1\t0\t0\n2\t1\t0,0\n");
    CHECK(error_of(dir).find("nodes.tsv:2") != std::string::npos);
    write(dir / "nodes.tsv", "0\t0\t1,0\n1\t3\t0,1\n2\t1\t0,0\n");
    CHECK(error_of(dir).find("nodes.tsv:2") != std::string::npos);
    write(dir / "nodes.tsv", "0\t0\t1,0\n1\t0\tx,1\n2\t1\t0,0\n");
    CHECK(error_of(dir).find("nodes.tsv:2") != std::string::npos);
    write(dir / "nodes.tsv", "0\t0\t1,0\n0\t0\t0,1\n2\t1\t0,0\n");
    CHECK(error_of(dir).find("duplicate") != std::string::npos);
    write(dir / "nodes.tsv", "0\t0\t1,0\n2\t1\t0,0\n");
    CHECK(error_of(dir).find("missing") != std::string::npos);
    fs::remove(dir / "nodes.tsv");
    CHECK(error_of(dir).find("nodes.tsv") != std::string::npos);
    write(dir / "meta.json", "{broken");
    CHECK_FALSE(error_of(dir).empty());
}

TEST_CASE("config parsing") {
    DsfConfig const c = io::parse_config("# comment\nK = 4\nbackbone = bern\nmode = I\neta2 = 0.2\n\nipe=false\n");
    CHECK(c.K == 4);
    CHECK(c.backbone == Backbone::Bern);
    CHECK(c.mode == DsfMode::I);
    CHECK(c.eta2 == 0.2);
    CHECK_FALSE(c.ipe);
    CHECK(c.hidden == DsfConfig{}.hidden);

    CHECK_THROWS_AS(io::parse_config("mode = R\neta2 = 0.5\n"), ConfigError);
    CHECK_THROWS_AS(io::parse_config("unknown_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(io::parse_config("K = 2\nK = 3\n"), ConfigError);
    CHECK_THROWS_AS(io::parse_config("K = two\n"), ConfigError);
    CHECK_THROWS_AS(io::parse_config("backbone = cheb\n"), ConfigError);
    CHECK_THROWS_AS(io::parse_config("just words\n"), ConfigError);
    CHECK_THROWS_AS(io::parse_config("backbone = bern\nsigma_p = tanh\n"), ConfigError);
    try {
        io::parse_config("K = 2\n\nhidden = -\n");
    } catch (ConfigError const& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("canonical config text round-trips and hashes stably") {
    DsfConfig c;
    c.eta1 = 0.3;
    c.lambda_orth = 0.125;
    c.backbone = Backbone::Jacobi;
    c.jacobi_a = -0.5;
    c.sigma_p = ThetaActivation::Sigmoid;
    std::string const text = io::config_text(c);
    DsfConfig const back = io::parse_config(text);
    CHECK(io::config_text(back) == text);
    CHECK(io::config_hash(back) == io::config_hash(c));
    CHECK(io::config_hash(c).size() == 16);
    DsfConfig d = c;
    d.K = 9;
    CHECK(io::config_hash(d) != io::config_hash(c));
}

TEST_CASE("number formatting is shortest round-trip") {
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(1.0) == "1");
    double const x = 0.1 + 0.2;
    CHECK(std::stod(io::format_double(x)) == x);
}

TEST_CASE("atomic write replaces content") {
    fs::path const dir = scratch("atomic");
    io::atomic_write(dir / "sub" / "f.txt", "first");
    io::atomic_write(dir / "sub" / "f.txt", "second");
    CHECK(io::read_file(dir / "sub" / "f.txt") == "second");
    CHECK_FALSE(fs::exists(dir / "sub" / "f.txt.tmp"));
}

TEST_CASE("checkpoint round trip") {
    DsfConfig c;
    c.K = 2;
    c.hidden = 3;
    c.pe_dim = 2;
    DsfParams p = init_params(c, 4, 2, 6, 1);
    p.b_x << 0.5, -0.25, 1e-300;
    nlohmann::json const j = io::checkpoint_json(p, c);
    CHECK(j.at("W_x").at("shape") == nlohmann::json::array({4, 3}));
    CHECK(j.at("W_x").at("values").size() == 12);
    CHECK(j.at("W_x").at("values")[1] == p.W_x(0, 1)); // row-major
    nlohmann::json const reparsed = nlohmann::json::parse(io::dump(j));
    DsfParams q = init_params(c, 4, 2, 6, 2);
    io::load_checkpoint(reparsed, q, c);
    CHECK(q.W_x == p.W_x);
    CHECK(q.b_x == p.b_x);
    CHECK(q.gamma[2] == p.gamma[2]);
    DsfParams wrong = init_params(c, 5, 2, 6, 2);
    CHECK_THROWS_AS(io::load_checkpoint(reparsed, wrong, c), DataError);
}

TEST_CASE("beta export round trip") {
    Eigen::MatrixXd b(3, 2);
    b << 0.1, -2, 1.0 / 3.0, 0, 5e-17, 7;
    std::string const csv = io::beta_csv(b);
    CHECK(csv.rfind("node_id,beta_0,beta_1\n0,0.1,-2\n", 0) == 0);
    CHECK(io::parse_beta_csv(csv, "mem") == b);
    CHECK_THROWS_AS(io::parse_beta_csv("node_id,beta_0\n0,1\n2,1\n", "mem"), DataError);
    CHECK_THROWS_AS(io::parse_beta_csv("id,x\n", "mem"), DataError);
}

#include <cstdlib>
#include <fstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "gplmk/cli.hpp"
#include "gplmk/evaluation/distance_matrix.hpp"
#include "gplmk/landmark_io.hpp"
#include "gplmk/log.hpp"
#include "gplmk/matrix_io.hpp"
#include "gplmk/mesh_io.hpp"
#include "gplmk/shapes.hpp"

namespace gplmk {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override { ::unsetenv(cli::kConfigEnv); }
  void TearDown() override { set_log_sink({}); }

  int run(std::vector<std::string> args) {
    args.push_back("-q");
    return cli::run(args);
  }
  std::string mesh(const std::string& name, const TriMesh& m) {
    const fs::path p = dir / name;
    write_off(m, p);
    return p.string();
  }
  std::vector<std::vector<std::string>> csv(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
      std::vector<std::string> row;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) row.push_back(cell);
      rows.push_back(row);
    }
    return rows;
  }

  test::TempDir dir;
};

TEST_F(Cli, LandmarkIsDeterministic) {
  const std::string ico = mesh("ico.off", shapes::icosahedron());
  ASSERT_EQ(run({"landmark", ico, "-o", (dir / "a.csv").string(), "-L", "5"}), 0);
  ASSERT_EQ(run({"landmark", ico, "-o", (dir / "b.csv").string(), "--landmarks", "5"}), 0);
  const auto rows = csv(dir / "a.csv");
  EXPECT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0][0], "ordinal");
  EXPECT_EQ(test::read_file(dir / "a.csv"), test::read_file(dir / "b.csv"));
}

TEST_F(Cli, TooManyLandmarksExitsOne) {
  const std::string ico = mesh("ico.off", shapes::icosahedron());
  EXPECT_EQ(run({"landmark", ico, "-o", (dir / "a.csv").string(), "-L", "13"}), 1);
}

TEST_F(Cli, GfpsStartsAtGpFirstPick) {
  const std::string crown = mesh("crown.off", test::crown_fixture(8));
  ASSERT_EQ(run({"landmark", crown, "-o", (dir / "gp.csv").string(), "-L", "3"}), 0);
  ASSERT_EQ(run({"landmark", crown, "-o", (dir / "gfps.csv").string(), "-L", "3", "--method", "gfps"}), 0);
  EXPECT_EQ(csv(dir / "gp.csv")[1][1], csv(dir / "gfps.csv")[1][1]);
  EXPECT_EQ(csv(dir / "gfps.csv")[1][6], "gfps");
}

TEST_F(Cli, KernelExport) {
  const std::string ico = mesh("ico.off", shapes::icosahedron());
  ASSERT_EQ(run({"landmark", ico, "-o", (dir / "l.csv").string(), "-L", "2", "--kernel-out", (dir / "k.bin").string()}), 0);
  const Eigen::MatrixXd k = read_matrix_binary(dir / "k.bin");
  EXPECT_EQ(k.rows(), 12);
  EXPECT_EQ(k, k.transpose());
}

TEST_F(Cli, CoverageHitsZeroAtObserverCount) {
  const std::string m = mesh("hemi.off", shapes::hemisphere(6));
  ASSERT_EQ(run({"landmark", m, "-o", (dir / "obs.csv").string(), "-L", "5"}), 0);
  ASSERT_EQ(run({"coverage", m, "--observer", (dir / "obs.csv").string(), "-o", (dir / "cov.csv").string(), "-L", "12",
                 "--set", "random_seeds=4"}),
            0);
  const auto rows = csv(dir / "cov.csv");
  ASSERT_EQ(rows.size(), 13u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"m", "gp", "gfps", "random_mean", "random_sd"}));
  EXPECT_EQ(std::stod(rows[5][1]), 0.0);
  EXPECT_GT(std::stod(rows[2][1]), 0.0);
}

TEST_F(Cli, CoverageMaxSetsRowCount) {
  const std::string m = mesh("hemi.off", shapes::hemisphere(5));
  ASSERT_EQ(run({"landmark", m, "-o", (dir / "obs.csv").string(), "-L", "3", "--method", "random"}), 0);
  ASSERT_EQ(run({"coverage", m, "--observer", (dir / "obs.csv").string(), "-o", (dir / "cov.csv").string(), "-L", "10",
                 "--set", "coverage_max=7", "--methods", "gp_euc"}),
            0);
  EXPECT_EQ(csv(dir / "cov.csv").size(), 8u);
}

TEST_F(Cli, EigsExport) {
  const TriMesh sphere = shapes::icosphere(2);
  const std::string m = mesh("s.off", sphere);
  {
    std::ofstream v(dir / "v.csv");
    for (const auto& p : sphere.vertices()) v << p.z() << '\n';
  }
  ASSERT_EQ(run({"eigs", m, "--potential", (dir / "v.csv").string(), "-o", (dir / "vec.csv").string(), "--values",
                 (dir / "val.csv").string(), "--set", "eigs=3"}),
            0);
  const auto vec = csv(dir / "vec.csv");
  EXPECT_EQ(vec.size(), sphere.num_vertices() + 1);
  EXPECT_EQ(vec[0].size(), 4u);
  const auto val = csv(dir / "val.csv");
  EXPECT_NEAR(std::stod(val[1][1]), 1.0, 1e-10);
  std::ofstream(dir / "short.csv") << "1\n2\n";
  EXPECT_EQ(run({"eigs", m, "--potential", (dir / "short.csv").string(), "-o", (dir / "x.csv").string()}), 1);
}

TEST_F(Cli, MatchSelfAndClosedMesh) {
  const std::string crown = mesh("crown.off", test::crown_fixture(10));
  const fs::path out = dir / "match";
  ASSERT_EQ(run({"match", crown, crown, "-o", out.string(), "--artifacts"}), 0);
  const json s = json::parse(test::read_file(out / "summary.json"));
  EXPECT_LE(s["d_P"].get<double>(), 1e-6);
  EXPECT_EQ(s["L"].get<int>(), 40);
  EXPECT_TRUE(s.contains("energies"));
  EXPECT_TRUE(fs::exists(out / "map.csv"));
  EXPECT_TRUE(fs::exists(out / "correspondences.csv"));
  EXPECT_TRUE(fs::exists(out / "param1.csv"));
  const std::string first = test::read_file(out / "summary.json");
  ASSERT_EQ(run({"match", crown, crown, "-o", out.string()}), 0);
  EXPECT_EQ(test::read_file(out / "summary.json"), first);

  const std::string closed = mesh("sphere.off", shapes::icosphere(2));
  EXPECT_EQ(run({"match", closed, crown, "-o", (dir / "bad").string()}), 2);
}

TEST_F(Cli, MatchFixturePairKeepsLandmarks) {
  const std::string a = mesh("a.off", test::crown_fixture(12));
  const std::string b = mesh("b.off", test::crown_fixture(12, 1));
  ASSERT_EQ(run({"match", a, b, "-o", (dir / "m").string()}), 0);
  const json s = json::parse(test::read_file(dir / "m" / "summary.json"));
  EXPECT_GE(s["L"].get<int>(), 25);
}

TEST_F(Cli, ConfigFileEnvAndOverrides) {
  const std::string ico = mesh("ico.off", shapes::icosahedron());
  std::ofstream(dir / "run.cfg") << "landmarks = 4\nmethod = random\nseed = 9\n";
  ::setenv(cli::kConfigEnv, (dir / "run.cfg").c_str(), 1);
  ASSERT_EQ(run({"landmark", ico, "-o", (dir / "env.csv").string()}), 0);
  ::unsetenv(cli::kConfigEnv);
  EXPECT_EQ(csv(dir / "env.csv").size(), 5u);
  EXPECT_EQ(csv(dir / "env.csv")[1][6], "random");
  // Flags win over the file.
  ASSERT_EQ(run({"--config", (dir / "run.cfg").string(), "landmark", ico, "-o", (dir / "flag.csv").string(), "-L", "6"}), 0);
  EXPECT_EQ(csv(dir / "flag.csv").size(), 7u);
  ASSERT_EQ(run({"landmark", ico, "-o", (dir / "seed.csv").string(), "--config", (dir / "run.cfg").string(), "--seed", "10"}), 0);
  EXPECT_NE(test::read_file(dir / "env.csv"), test::read_file(dir / "seed.csv"));
  EXPECT_EQ(run({"landmark", ico, "-o", (dir / "x.csv").string(), "--set", "nonsense=1"}), 1);
  EXPECT_EQ(run({"landmark", ico}), 1);
  EXPECT_EQ(run({"frobnicate"}), 1);
}

TEST_F(Cli, DistmatDuplicatesAndStats) {
  const fs::path meshes = dir / "meshes";
  fs::create_directories(meshes);
  const TriMesh m = test::crown_fixture(8);
  for (const char* name : {"a.off", "b.off", "c.off"}) write_off(m, meshes / name);
  ASSERT_EQ(run({"distmat", meshes.string(), "-o", (dir / "d.csv").string(), "-L", "20", "--jobs", "2"}), 0);
  const DistanceMatrix d = read_distance_csv(dir / "d.csv");
  EXPECT_EQ(d.labels, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_LE(d.entries.maxCoeff(), 1e-6);

  std::ofstream(dir / "e.csv") << ",a,b,c,d\na,0,1,2,3\nb,1,0,1.5,2.5\nc,2,1.5,0,1\nd,3,2.5,1,0\n";
  ASSERT_EQ(run({"stats", "--matrix", (dir / "e.csv").string(), "--matrix2", (dir / "e.csv").string(), "-o",
                 (dir / "s.json").string(), "--exhaustive"}),
            0);
  const json s = json::parse(test::read_file(dir / "s.json"));
  EXPECT_NEAR(s["mantel"]["statistic"].get<double>(), 1.0, 1e-12);
  EXPECT_EQ(s["mantel"]["n_perm"].get<int>(), 24);
  EXPECT_TRUE(s["mantel"].contains("seed"));
  EXPECT_TRUE(s["mantel"].contains("p"));

  std::ofstream(dir / "g.csv") << "a,x\nb,x\nc,y\nd,y\n";
  ASSERT_EQ(run({"stats", "--matrix", (dir / "e.csv").string(), "--groups", (dir / "g.csv").string(), "-o",
                 (dir / "p.json").string(), "--set", "permutations=99"}),
            0);
  const json p = json::parse(test::read_file(dir / "p.json"));
  EXPECT_EQ(p["permanova"]["n_perm"].get<int>(), 99);
  EXPECT_FALSE(p["permanova"]["infinite"].get<bool>());

  std::ofstream(dir / "bad.csv") << ",a,b\na,0,1\nb,2,0\n";
  EXPECT_EQ(run({"stats", "--matrix", (dir / "bad.csv").string(), "--matrix2", (dir / "bad.csv").string(), "-o",
                 (dir / "x.json").string()}),
            1);
}

TEST_F(Cli, StatsInfinitePseudoF) {
  std::ofstream(dir / "e.csv") << ",a,b,c,d\na,0,0,1,1\nb,0,0,1,1\nc,1,1,0,0\nd,1,1,0,0\n";
  std::ofstream(dir / "g.csv") << "label,group\na,x\nb,x\nc,y\nd,y\n";
  ASSERT_EQ(run({"stats", "--matrix", (dir / "e.csv").string(), "--groups", (dir / "g.csv").string(), "-o",
                 (dir / "p.json").string(), "--exhaustive"}),
            0);
  const json p = json::parse(test::read_file(dir / "p.json"));
  EXPECT_TRUE(p["permanova"]["statistic"].is_null());
  EXPECT_TRUE(p["permanova"]["infinite"].get<bool>());
}

TEST_F(Cli, TwoFamiliesSeparate) {
  const fs::path meshes = dir / "fam";
  fs::create_directories(meshes);
  std::ofstream groups(dir / "groups.csv");
  for (int f = 0; f < 2; ++f) {
    for (int k = 0; k < 4; ++k) {
      const std::string label = std::string(f == 0 ? "m" : "p") + std::to_string(k);
      write_off(test::family_surface(f, k, 8), meshes / (label + ".off"));
      groups << label << ',' << (f == 0 ? "molar" : "premolar") << '\n';
    }
  }
  groups.close();
  ASSERT_EQ(run({"distmat", meshes.string(), "-o", (dir / "d.csv").string(), "-L", "20"}), 0);
  ASSERT_EQ(run({"stats", "--matrix", (dir / "d.csv").string(), "--groups", (dir / "groups.csv").string(), "-o",
                 (dir / "s.json").string(), "--exhaustive"}),
            0);
  const json s = json::parse(test::read_file(dir / "s.json"));
  EXPECT_LE(s["permanova"]["p"].get<double>(), 0.05);
}

}  // namespace
}  // namespace gplmk

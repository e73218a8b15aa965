#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path dir;
  Workspace()
  {
    dir = fs::temp_directory_path() / ("vxpc_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string operator()(const std::string& name) const { return (dir / name).string(); }
};

int
run(const std::string& args, const std::string& env = "")
{
  const std::string cmd =
    env + " \"" VXPC_CLI_PATH "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string
slurp(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>>
readCsv(const std::string& path)
{
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ','))
      row.push_back(cell);
    if (!line.empty() && line.back() == ',')
      row.push_back("");
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("synth, encode, decode round trip")
{
  Workspace ws;
  REQUIRE(run("synth --shape sphere --depth 8 --points 10000 --seed 3 -o " + ws("s.ply")) == 0);
  for (const char* model : {"uniform", "adaptive"}) {
    const std::string m = model;
    REQUIRE(
      run("encode -i " + ws("s.ply") + " -o " + ws(m + ".vxpc") + " -n 8 -L 4 -m " + m
          + " --threads 2 --csv " + ws(m + ".csv"))
      == 0);
    REQUIRE(run("decode -i " + ws(m + ".vxpc") + " -o " + ws(m + ".ply")) == 0);
    // Decoded points are exactly the voxelized input: encoding it again at the
    // same depth reproduces the same container.
    REQUIRE(
      run("encode -i " + ws(m + ".ply") + " -o " + ws(m + "2.vxpc") + " -n 8 -L 4 -m " + m)
      == 0);
    CHECK(slurp(ws(m + ".vxpc")) == slurp(ws(m + "2.vxpc")));

    const auto rows = readCsv(ws(m + ".csv"));
    REQUIRE(rows.size() >= 3);
    CHECK(rows[0][0] == "block");
    CHECK(rows.back()[0] == "total");
    CHECK(std::stoull(rows.back().back()) == fs::file_size(ws(m + ".vxpc")));
    uint64_t blockBytes = 0;
    for (std::size_t r = 1; r + 1 < rows.size(); r++)
      blockBytes += std::stoull(rows[r].back());
    CHECK(blockBytes < fs::file_size(ws(m + ".vxpc")));
  }
}

TEST_CASE("synth is reproducible and honours VXPC_SEED")
{
  Workspace ws;
  REQUIRE(run("synth --shape random --depth 7 --points 500 --seed 9 -o " + ws("a.ply")) == 0);
  REQUIRE(run("synth --shape random --depth 7 --points 500 --seed 9 -o " + ws("b.ply")) == 0);
  CHECK(slurp(ws("a.ply")) == slurp(ws("b.ply")));
  REQUIRE(run("synth --shape random --depth 7 --points 500 -o " + ws("c.ply"), "VXPC_SEED=9") == 0);
  CHECK(slurp(ws("a.ply")) == slurp(ws("c.ply")));
  REQUIRE(run("synth --shape random --depth 7 --points 500 -o " + ws("d.ply"), "VXPC_SEED=10") == 0);
  CHECK(slurp(ws("a.ply")) != slurp(ws("d.ply")));
}

TEST_CASE("eval csv parses back")
{
  Workspace ws;
  REQUIRE(run("synth --shape plane --depth 7 --points 4000 -o " + ws("p.ply")) == 0);
  REQUIRE(run("eval -i " + ws("p.ply") + " -n 7 --levels 1,2,4 --csv " + ws("e.csv")) == 0);
  const auto rows = readCsv(ws("e.csv"));
  REQUIRE(rows.size() == 1 + 2 * 3);
  CHECK(rows[0][0] == "model");
  for (std::size_t r = 1; r < rows.size(); r++) {
    const double bits = std::stod(rows[r][3]);
    const double voxels = std::stod(rows[r][4]);
    const double coded = std::stod(rows[r][5]);
    CHECK(std::stod(rows[r][6]) == doctest::Approx(bits / voxels));
    CHECK(std::stod(rows[r][7]) == doctest::Approx(bits / coded));
    if (rows[r][0] == "uniform")
      CHECK(std::stod(rows[r][7]) == doctest::Approx(1.0).epsilon(0.05));
  }
  for (int m = 0; m < 2; m++)
    for (int l = 1; l < 3; l++)
      CHECK(std::stod(rows[1 + 3 * m + l][6]) <= std::stod(rows[3 * m + l][6]));
}

TEST_CASE("neural weights through the command line")
{
  Workspace ws;
  REQUIRE(run("synth --shape plane --depth 6 --points 2000 -o " + ws("p.ply")) == 0);
  REQUIRE(
    run("weights --arch tiny --seed 2 -o " + ws("w.vxdn") + " --train-input " + ws("p.ply")
        + " -n 6 --epochs 2")
    == 0);
  REQUIRE(run("weights --arch tiny --seed 3 -o " + ws("other.vxdn")) == 0);
  REQUIRE(
    run("encode -i " + ws("p.ply") + " -o " + ws("n.vxpc") + " -n 6 -L 3 -m voxeldnn -w "
        + ws("w.vxdn"))
    == 0);
  CHECK(run("decode -i " + ws("n.vxpc") + " -o " + ws("n.ply") + " -w " + ws("w.vxdn")) == 0);
  CHECK(run("decode -i " + ws("n.vxpc") + " -o " + ws("x.ply") + " -w " + ws("other.vxdn")) == 3);
  CHECK(run("decode -i " + ws("n.vxpc") + " -o " + ws("x.ply")) == 1);
}

TEST_CASE("exit codes")
{
  Workspace ws;
  REQUIRE(run("synth --depth 6 --points 100 -o " + ws("s.ply")) == 0);
  CHECK(run("") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("encode -i " + ws("s.ply") + " -o " + ws("o.vxpc") + " -n 5") == 1);
  CHECK(run("encode -i " + ws("s.ply") + " -o " + ws("o.vxpc") + " -n 6 -m voxeldnn") == 1);
  CHECK(run("encode -i " + ws("s.ply") + " -o " + ws("o.vxpc") + " -n 6 -L 6") == 1);
  CHECK(run("encode -i " + ws("s.ply") + " -o " + ws("o.vxpc") + " -n 6 -m bogus") == 1);
  CHECK(run("encode -i " + ws("missing.ply") + " -o " + ws("o.vxpc") + " -n 6") == 2);
  CHECK(run("encode -i " + ws("s.ply") + " -o /nonexistent/dir/o.vxpc -n 6") == 2);
  CHECK(run("decode -i " + ws("missing.vxpc") + " -o " + ws("o.ply")) == 2);

  std::ofstream(ws("junk.ply")) << "not a ply file\n";
  CHECK(run("encode -i " + ws("junk.ply") + " -o " + ws("o.vxpc") + " -n 6") == 3);
  std::ofstream(ws("junk.vxpc")) << "VXPC garbage";
  CHECK(run("decode -i " + ws("junk.vxpc") + " -o " + ws("o.ply")) == 3);
  CHECK(run("--help") == 0);
}

// End-to-end tests that spawn the wds binary (path injected by the build).

#include "support/testutil.hpp"
#include "wds/io.hpp"
#include "wds/pca.hpp"
#include "wds/prtf.hpp"

#include <doctest.h>

#include <cstdlib>
#include <string>

#include <sys/wait.h>

using wds::testing::TempDir;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
};

CliResult run_cli(const TempDir& dir, const std::string& args,
                  const std::string& env_prefix = {}) {
    const auto out_path = dir.file("stdout.txt");
    const std::string cmd = env_prefix + std::string(WDS_CLI_BIN) + " " + args + " > " +
                            out_path.string() + " 2> " + dir.file("stderr.txt").string();
    const int status = std::system(cmd.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = wds::read_file(out_path);
    return result;
}

} // namespace

TEST_CASE("pipeline: synth -> fit -> cpv --threshold 100 prints k") {
    TempDir dir;
    const auto data = dir.file("d.wdsm").string();
    const auto truth = dir.file("t.wdsp").string();
    const auto model = dir.file("m.wdsp").string();
    const auto curve = dir.file("cpv.csv").string();

    CHECK(run_cli(dir, "synth --rows 24 --cols 30 --rank 3 --spectrum 4,2,1 --seed 5 --out " +
                           data + " --out-truth " + truth)
              .exit_code == 0);
    CHECK(run_cli(dir, "fit --input " + data + " --out " + model).exit_code == 0);

    const CliResult cpv = run_cli(dir, "cpv --model " + model + " --out " + curve +
                                           " --threshold 100");
    CHECK(cpv.exit_code == 0);
    const wds::PcaModel fitted = wds::read_model(model);
    CHECK(cpv.out == std::to_string(fitted.n_components()) + "\n");
    CHECK(fitted.n_components() == 3); // noise-free rank-3 construction
}

TEST_CASE("usage errors exit 2") {
    TempDir dir;
    const auto data = dir.file("d.csv").string();
    wds::atomic_write(data, "1,2\n3,4\n5,6\n");

    CHECK(run_cli(dir, "crossval --input " + data + " --folds 1 --out " +
                           dir.file("x.csv").string())
              .exit_code == 2);
    CHECK(run_cli(dir, "").exit_code == 2);               // missing subcommand
    CHECK(run_cli(dir, "fit --input " + data).exit_code == 2); // missing --out
    CHECK(run_cli(dir, "--help").exit_code == 0);
}

TEST_CASE("data errors exit 1") {
    TempDir dir;
    CHECK(run_cli(dir, "fit --input " + dir.file("absent.wdsm").string() + " --out " +
                           dir.file("m.wdsp").string())
              .exit_code == 1);

    const auto junk = dir.file("junk.wdsp").string();
    wds::atomic_write(junk, "not a model");
    CHECK(run_cli(dir, "cpv --model " + junk + " --out " + dir.file("c.csv").string())
              .exit_code == 1);
}

TEST_CASE("reduce --m 0 reconstructs the model mean everywhere") {
    TempDir dir;
    const auto data = dir.file("d.wdsm").string();
    const auto truth = dir.file("t.wdsp").string();
    const auto model = dir.file("m.wdsp").string();
    const auto out = dir.file("r.wdsm").string();

    REQUIRE(run_cli(dir, "synth --rows 12 --cols 9 --rank 2 --spectrum 3,1 --seed 2 --out " +
                             data + " --out-truth " + truth)
                .exit_code == 0);
    REQUIRE(run_cli(dir, "fit --input " + data + " --out " + model).exit_code == 0);
    const CliResult reduced = run_cli(dir, "reduce --model " + model + " --input " + data +
                                               " --m 0 --out " + out);
    CHECK(reduced.exit_code == 0);
    CHECK(reduced.out.rfind("mse=", 0) == 0);

    const wds::PcaModel fitted = wds::read_model(model);
    const wds::DataMatrix rec = wds::read_matrix(out);
    for (Eigen::Index r = 0; r < rec.rows(); ++r) {
        CHECK((rec.values.row(r).transpose().array() == fitted.mean.array()).all());
    }
}

TEST_CASE("sample output is byte-identical across runs and thread counts") {
    TempDir dir;
    const auto data = dir.file("d.wdsm").string();
    const auto truth = dir.file("t.wdsp").string();
    const auto model = dir.file("m.wdsp").string();

    REQUIRE(run_cli(dir, "synth --rows 16 --cols 12 --rank 3 --spectrum 4,2,1 --seed 3 "
                         "--out " + data + " --out-truth " + truth)
                .exit_code == 0);
    REQUIRE(run_cli(dir, "fit --input " + data + " --out " + model).exit_code == 0);

    const auto s1 = dir.file("s1.wdsm");
    const auto s2 = dir.file("s2.wdsm");
    const auto s8 = dir.file("s8.wdsm");
    REQUIRE(run_cli(dir, "sample --model " + model + " --count 200 --seed 11 --out-shapes " +
                             s1.string(),
                    "WDS_THREADS=1 ")
                .exit_code == 0);
    REQUIRE(run_cli(dir, "sample --model " + model + " --count 200 --seed 11 --out-shapes " +
                             s2.string(),
                    "WDS_THREADS=1 ")
                .exit_code == 0);
    REQUIRE(run_cli(dir, "sample --model " + model + " --count 200 --seed 11 --out-shapes " +
                             s8.string(),
                    "WDS_THREADS=8 ")
                .exit_code == 0);
    const std::string b1 = wds::read_file(s1);
    CHECK(b1 == wds::read_file(s2));
    CHECK(b1 == wds::read_file(s8));
}

TEST_CASE("export-mesh writes an OBJ plus the distance sidecar") {
    TempDir dir;
    const auto data = dir.file("d.wdsm").string();
    const auto truth = dir.file("t.wdsp").string();
    const auto model = dir.file("m.wdsp").string();
    const auto shapes = dir.file("s.wdsm").string();
    const auto topo = dir.file("topo.csv").string();
    const auto mesh = dir.file("mesh.obj");

    // 4 vertices -> 12 columns.
    REQUIRE(run_cli(dir, "synth --rows 10 --cols 12 --rank 2 --spectrum 2,1 --seed 4 --out " +
                             data + " --out-truth " + truth)
                .exit_code == 0);
    REQUIRE(run_cli(dir, "fit --input " + data + " --out " + model).exit_code == 0);
    REQUIRE(run_cli(dir, "sample --model " + model + " --count 3 --seed 1 --out-shapes " +
                             shapes)
                .exit_code == 0);
    wds::atomic_write(topo, "i,j,k\n0,1,2\n1,2,3\n");

    const CliResult result =
        run_cli(dir, "export-mesh --shapes " + shapes + " --row 1 --topology " + topo +
                         " --out " + mesh.string() + " --distance-to-mean --model " + model);
    CHECK(result.exit_code == 0);
    CHECK(std::filesystem::exists(mesh));
    CHECK(std::filesystem::exists(dir.file("mesh.obj.scalars.csv")));

    // --distance-to-mean without --model is a usage error.
    CHECK(run_cli(dir, "export-mesh --shapes " + shapes + " --row 0 --topology " + topo +
                           " --out " + dir.file("m2.obj").string() + " --distance-to-mean")
              .exit_code == 2);
}

TEST_CASE("prtf-flatten converts a linear tensor to a dB matrix") {
    TempDir dir;
    wds::PrtfTensor t;
    t.scale = wds::PrtfScale::Linear;
    t.n_subjects = 2;
    t.n_freqs = 3;
    t.n_dirs = 2;
    t.freqs_hz.resize(3);
    t.freqs_hz << 1000.0, 2000.0, 4000.0;
    t.directions.resize(2, 2);
    t.directions << 0.0, 0.0, 180.0, 0.0;
    t.values = {1.0, 10.0, 100.0, 0.1, 1.0, 10.0,
                2.0, 20.0, 200.0, 0.2, 2.0, 20.0};
    const auto tensor_path = dir.file("p.wdst");
    wds::write_tensor(t, tensor_path);

    const auto out = dir.file("p.wdsm");
    CHECK(run_cli(dir, "prtf-flatten --tensor " + tensor_path.string() + " --out " +
                           out.string())
              .exit_code == 0);

    const wds::DataMatrix m = wds::read_matrix(out);
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 6);
    CHECK(m.values(0, 0) == doctest::Approx(0.0));   // 1.0 -> 0 dB
    CHECK(m.values(0, 1) == doctest::Approx(20.0));  // 10.0 -> 20 dB
    CHECK(m.values(1, 0) == doctest::Approx(20.0 * std::log10(2.0)).epsilon(1e-14));
}

TEST_CASE("crossval CLI emits the report and a full-rank summary") {
    TempDir dir;
    const auto data = dir.file("d.wdsm").string();
    const auto truth = dir.file("t.wdsp").string();
    const auto out = dir.file("cv.csv");

    REQUIRE(run_cli(dir, "synth --rows 20 --cols 25 --rank 3 --spectrum 4,2,1 --seed 6 "
                         "--out " + data + " --out-truth " + truth)
                .exit_code == 0);
    const CliResult cv = run_cli(dir, "crossval --input " + data +
                                          " --folds 5 --seed 0 --m-step 4 --out " +
                                          out.string());
    CHECK(cv.exit_code == 0);
    CHECK(cv.out.rfind("max_m=", 0) == 0);
    const std::string text = wds::read_file(out);
    CHECK(text.rfind("fold,m,train_mse,val_mse\n", 0) == 0);
    CHECK(text.find("\n-1,") != std::string::npos); // fold-average rows present
}

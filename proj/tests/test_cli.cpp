#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
// Drives the installed binary through std::system. APCALC_BIN points at the
// executable and APCALC_SCHEMA_DIR at the schema sources; ctest sets both.
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "apcalc/dataset.hpp"
#include "apcalc/json_io.hpp"
#include "apcalc/network_model.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support/fixtures.hpp"
#include "support/schema_check.hpp"

using nlohmann::json;

namespace {

const std::string& bin() {
  static const std::string path = [] {
    const char* p = std::getenv("APCALC_BIN");
    REQUIRE(p != nullptr);
    return std::string(p);
  }();
  return path;
}

const std::string& work_dir() {
  static const std::string dir = [] {
    char tmpl[] = "/tmp/apcalc_cli_XXXXXX";
    REQUIRE(mkdtemp(tmpl) != nullptr);
    return std::string(tmpl);
  }();
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run(const std::string& args) {
  const std::string out_file = work_dir() + "/stdout.txt";
  const std::string err_file = work_dir() + "/stderr.txt";
  const std::string cmd = bin() + " " + args + " >" + out_file + " 2>" + err_file;
  const int status = std::system(cmd.c_str());
  RunResult r;
  REQUIRE(WIFEXITED(status));
  r.code = WEXITSTATUS(status);
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

bool has_code(const RunResult& r, const std::string& code) {
  return r.err.find("\"code\":\"" + code + "\"") != std::string::npos;
}

std::string schema_text(const std::string& name) {
  const char* dir = std::getenv("APCALC_SCHEMA_DIR");
  REQUIRE(dir != nullptr);
  return slurp(std::string(dir) + "/" + name + ".schema.json");
}

void conforms(const std::string& doc, const std::string& schema_name) {
  const std::string err = schema_check::validate(doc, schema_text(schema_name));
  CHECK_MESSAGE(err.empty(), schema_name, ": ", err);
}

// Fixture files are written once into the scratch directory.
struct Files {
  std::string model = work_dir() + "/model.json";
  std::string degenerate_model = work_dir() + "/degenerate.json";
  std::string netd = work_dir() + "/netd.json";
  std::string frontdoor = work_dir() + "/frontdoor.json";
  std::string data = work_dir() + "/data.csv";
  std::string trace = work_dir() + "/trace.csv";
  std::string ddata = work_dir() + "/ddata.csv";
  std::string sup_model = work_dir() + "/sup_model.json";
  std::string sup_data = work_dir() + "/sup_data.csv";

  Files() {
    spit(model, apcalc::format_model_json(fixtures::neta()));
    auto numb = fixtures::neta();
    for (auto& ro : numb.destination.readout) ro.a.assign(ro.a.size(), 0.0);
    spit(degenerate_model, apcalc::format_model_json(numb));
    spit(netd, apcalc::format_discrete_json(fixtures::netd()));
    spit(frontdoor, apcalc::format_discrete_json(fixtures::frontdoor_net()));
    const auto td = apcalc::sample_joint(fixtures::neta(), 24, 5);
    spit(data, apcalc::format_dataset_csv(td.data));
    spit(trace, apcalc::format_trace_csv(td.trace));
    spit(ddata, apcalc::format_dataset_csv(fixtures::netd().sample_joint(256, 3).data));
    const auto sup = fixtures::suppression_scenario(32, 7);
    spit(sup_model, apcalc::format_model_json(sup.model));
    spit(sup_data, apcalc::format_dataset_csv(sup.data));
  }
};

const Files& files() {
  static const Files f;
  return f;
}

}  // namespace

TEST_CASE("version and schema dumps are stable") {
  const auto v = run("--version");
  CHECK(v.code == 0);
  CHECK(v.out.find("\"name\":\"apcalc\"") != std::string::npos);
  CHECK(v.out.find("\"version\"") != std::string::npos);
  CHECK(run("--version").out == v.out);

  const auto list = run("--schema list");
  CHECK(list.code == 0);
  const json names = json::parse(list.out);
  REQUIRE(names.is_array());
  CHECK(names.size() == 12);
  for (const auto& name : names) {
    const auto dump = run("--schema " + name.get<std::string>());
    CHECK(dump.code == 0);
    // Bundled schemas are byte copies of the files shipped in the repo.
    CHECK(dump.out == schema_text(name.get<std::string>()));
  }

  const auto missing = run("--schema nope");
  CHECK(missing.code == 2);
  CHECK(has_code(missing, "unknown_schema"));
}

TEST_CASE("failures exit with machine readable diagnostics") {
  const auto bare = run("");
  CHECK(bare.code == 2);
  CHECK(has_code(bare, "usage"));

  const auto unknown = run("frobnicate");
  CHECK(unknown.code == 2);
  CHECK(has_code(unknown, "unknown_command"));

  const auto badflag = run("attribute --bogus");
  CHECK(badflag.code == 2);
  CHECK(has_code(badflag, "usage"));

  const auto gone = run("attribute --model " + work_dir() + "/absent.json --data " +
                        work_dir() + "/absent.csv");
  CHECK(gone.code == 1);
  CHECK(has_code(gone, "missing_file"));

  const std::string broken = work_dir() + "/broken.json";
  spit(broken, "{\"n\": 0}");
  const auto invalid = run("attribute --model " + broken + " --data " + files().data);
  CHECK(invalid.code == 1);
  CHECK(has_code(invalid, "invalid_input"));

  const std::string q = work_dir() + "/q_ap.json";
  spit(q, R"([{"feature": 1, "value": 0.0, "label": 1}])");
  const auto nodata = run("intervene --model " + files().model + " --queries " + q);
  CHECK(nodata.code == 1);
  CHECK(has_code(nodata, "invalid_input"));
  CHECK(nodata.err.find("needs --data") != std::string::npos);

  const auto onelabel = run("separate --data " + files().data + " --labels 1");
  CHECK(onelabel.code == 2);
  CHECK(has_code(onelabel, "usage"));

  const auto nosink = run("generate --arch junction");
  CHECK(nosink.code == 2);
  CHECK(has_code(nosink, "usage"));
  const auto both = run("generate --arch junction --model " + files().model + " --out-data " +
                        work_dir() + "/x.csv");
  CHECK(both.code == 2);
  CHECK(has_code(both, "usage"));
}

TEST_CASE("attribute writes schema conformant deterministic reports") {
  const std::string r1 = work_dir() + "/attr1.json";
  const std::string r2 = work_dir() + "/attr2.json";
  const std::string base = "attribute --model " + files().model + " --data " + files().data +
                           " --k 32 --seed 11";
  CHECK(run(base + " --out " + r1).code == 0);
  CHECK(run(base + " --out " + r2).code == 0);
  const std::string doc = slurp(r1);
  conforms(doc, "attribution-report");
  CHECK(slurp(r2) == doc);

  // stdout and --out carry the same bytes; threading cannot change them.
  CHECK(run(base).out == doc);
  CHECK(run(base + " --threads 2").out == doc);

  const auto cond = run(base + " --estimator conditional --per-point");
  CHECK(cond.code == 0);
  conforms(cond.out, "attribution-report");
  CHECK(cond.out.find("\"per_point\"") != std::string::npos);
}

TEST_CASE("intervene covers discrete adjustments and continuous estimates") {
  const std::string dq = work_dir() + "/q_discrete.json";
  spit(dq, R"({"queries": [
    {"feature": 1, "value": 1.0, "label": 1, "method": "oracle"},
    {"feature": 1, "value": 1.0, "label": 1, "method": "backdoor",
     "adjustment_set": ["S2"]},
    {"feature": 1, "value": 0.0, "label": 1, "method": "effect", "delta": 1}
  ]})");
  const auto d = run("intervene --model " + files().netd + " --queries " + dq + " --oracle");
  CHECK(d.code == 0);
  conforms(d.out, "intervention-results");
  const json results = json::parse(d.out)["results"];
  REQUIRE(results.size() == 3);
  CHECK(results[0]["method"] == "oracle");
  CHECK(results[0]["estimate"].get<double>() ==
        doctest::Approx(fixtures::kNetdDoS1[1]).epsilon(1e-10));
  CHECK(results[1]["method"] == "backdoor");
  CHECK(results[1]["estimate"].get<double>() ==
        doctest::Approx(fixtures::kNetdDoS1[1]).epsilon(1e-10));
  CHECK(results[1]["abs_error"].get<double>() < 1e-10);
  CHECK(results[2]["method"] == "effect");
  CHECK(results[2]["estimate"].get<double>() ==
        doctest::Approx(fixtures::kNetdFlipS1L1).epsilon(1e-10));

  const std::string fq = work_dir() + "/q_frontdoor.json";
  spit(fq, R"([{"feature": 1, "value": 0.0, "label": 2, "method": "frontdoor"}])");
  const auto f = run("intervene --model " + files().frontdoor + " --queries " + fq + " --oracle");
  CHECK(f.code == 0);
  conforms(f.out, "intervention-results");
  const json fres = json::parse(f.out)["results"];
  REQUIRE(fres.size() == 1);
  CHECK(fres[0]["method"] == "frontdoor");
  CHECK(fres[0]["estimate"].get<double>() ==
        doctest::Approx(fixtures::kFrontdoorDo[0]).epsilon(1e-10));
  CHECK(fres[0]["abs_error"].get<double>() < 1e-10);

  const std::string cq = work_dir() + "/q_cont.json";
  spit(cq, R"([{"feature": 1, "value": 0.3, "label": 1},
               {"feature": 2, "value": 0.0, "label": 2, "method": "effect", "delta": 0.5}])");
  const std::string base = "intervene --model " + files().model + " --queries " + cq +
                           " --data " + files().data + " --k 64 --seed 4";
  const auto c1 = run(base);
  CHECK(c1.code == 0);
  conforms(c1.out, "intervention-results");
  CHECK(run(base).out == c1.out);

  const auto no_oracle = run("intervene --model " + files().model + " --queries " + cq +
                             " --data " + files().data + " --oracle");
  CHECK(no_oracle.code == 1);
  CHECK(has_code(no_oracle, "invalid_input"));
}

TEST_CASE("separate picks candidates from files or the seeded sweep") {
  const std::string base =
      "separate --data " + files().data + " --labels 1,2 --mode dist --bins 4";
  const auto swept = run(base);
  CHECK(swept.code == 0);
  conforms(swept.out, "separation-result");
  CHECK(run(base).out == swept.out);

  const std::string cands = work_dir() + "/cands.json";
  spit(cands, R"([{"id": "axis1", "w": [1, 0]},
                  {"id": "diag", "w": [0.7, 0.7], "transform": "tanh"}])");
  const auto picked = run(base + " --candidates " + cands);
  CHECK(picked.code == 0);
  conforms(picked.out, "separation-result");
  const json out = json::parse(picked.out);
  CHECK(out["scores"].size() == 2);
}

TEST_CASE("suppress emits the outcome document and iteration trace") {
  const std::string trace_file = work_dir() + "/sup_trace.csv";
  const std::string base = "suppress --model " + files().sup_model + " --data " +
                           files().sup_data + " --feature 1 --label 1 --epsilon 2.0 --k 32";
  const auto r = run(base + " --trace " + trace_file);
  CHECK(r.code == 0);
  conforms(r.out, "suppression-result");
  CHECK(r.out.find("\"status\": \"already_converged\"") != std::string::npos);
  const std::string trace = slurp(trace_file);
  CHECK(trace.substr(0, 16) == "iter,r,accuracy\n");
  CHECK(run(base).out == r.out);
}

TEST_CASE("metrics includes information gain only when a trace is supplied") {
  const std::string base = "metrics --model " + files().model + " --data " + files().data +
                           " --bins 4 --k 32 --seed 6";
  const auto with_trace = run(base + " --trace " + files().trace);
  CHECK(with_trace.code == 0);
  conforms(with_trace.out, "metrics-report");
  CHECK(with_trace.out.find("\"info_gain\"") != std::string::npos);
  CHECK(run(base + " --trace " + files().trace).out == with_trace.out);

  const auto bare = run(base);
  CHECK(bare.code == 0);
  conforms(bare.out, "metrics-report");
  CHECK(bare.out.find("\"info_gain\"") == std::string::npos);
}

TEST_CASE("benchmark suites emit their sections") {
  const std::string base =
      "benchmark --suite arch --arch junction --trials 2 --samples 300 --seed 2 --no-timing";
  const auto arch = run(base);
  CHECK(arch.code == 0);
  conforms(arch.out, "benchmark-report");
  CHECK(arch.out.find("\"architectures\"") != std::string::npos);
  CHECK(arch.out.find("\"runtime_seconds\": 0.0") != std::string::npos);
  CHECK(run(base).out == arch.out);

  const auto conv = run("benchmark --suite convergence --model " + files().model + " --data " +
                        files().data + " --k-grid 64,128 --repeats 2");
  CHECK(conv.code == 0);
  conforms(conv.out, "benchmark-report");
  CHECK(conv.out.find("\"convergence\"") != std::string::npos);

  const auto scaling = run("benchmark --suite scaling --rows 8 --k 8 --reps 1");
  CHECK(scaling.code == 0);
  conforms(scaling.out, "benchmark-report");
  CHECK(scaling.out.find("\"scaling\"") != std::string::npos);

  const auto missing = run("benchmark --suite convergence");
  CHECK(missing.code == 2);
  CHECK(has_code(missing, "usage"));
}

TEST_CASE("validate runs the self check suites end to end") {
  const auto axioms =
      run("validate --suite axioms --model " + files().model + " --data " + files().data +
          " --k 64");
  CHECK(axioms.code == 0);
  const json rep = json::parse(axioms.out);
  CHECK(rep["suite"] == "axioms");
  CHECK(rep["passed"] == true);
  CHECK(rep["checks"].size() == 4);

  // Zeroed readouts make every dominance row degenerate: that is a warning,
  // not a failure.
  const auto warn = run("validate --suite axioms --model " + files().degenerate_model +
                        " --data " + files().data + " --k 64");
  CHECK(warn.code == 0);
  CHECK(warn.out.find("\"status\": \"warn\"") != std::string::npos);

  const auto grad = run("validate --suite gradients --model " + files().model + " --data " +
                        files().data + " --k 2000");
  CHECK(grad.code == 0);
  CHECK(json::parse(grad.out)["passed"] == true);

  const std::string report_file = work_dir() + "/oracle_report.json";
  const auto orc = run("validate --suite oracle --model " + files().netd + " --data " +
                       files().ddata + " --out " + report_file);
  CHECK(orc.code == 0);
  CHECK(orc.out.find("pass ap_vs_oracle") != std::string::npos);
  CHECK(json::parse(slurp(report_file))["passed"] == true);

  const auto mixed = run("validate --suite axioms --model " + files().netd + " --data " +
                         files().data);
  CHECK(mixed.code == 1);
  CHECK(has_code(mixed, "invalid_input"));
  const auto mixed2 = run("validate --suite oracle --model " + files().model + " --data " +
                          files().data);
  CHECK(mixed2.code == 1);
  CHECK(has_code(mixed2, "invalid_input"));
}

TEST_CASE("generate writes paired artifacts deterministically") {
  const std::string d1 = work_dir() + "/gen1.csv";
  const std::string d2 = work_dir() + "/gen2.csv";
  const std::string net = work_dir() + "/gen_net.json";
  const std::string tr = work_dir() + "/gen_trace.csv";
  const std::string truth = work_dir() + "/gen_truth.json";
  const std::string base = "generate --arch junction --count 50 --seed 3";
  CHECK(run(base + " --out-data " + d1 + " --out-model " + net + " --out-trace " + tr +
            " --out-truth " + truth)
            .code == 0);
  CHECK(run(base + " --out-data " + d2).code == 0);
  const std::string data = slurp(d1);
  CHECK(slurp(d2) == data);
  CHECK(std::count(data.begin(), data.end(), '\n') == 51);
  CHECK(data.substr(0, 9) == "f1,label\n");
  conforms(slurp(truth), "scenario-truth");
  conforms(slurp(net), "network");
  const std::string trace = slurp(tr);
  CHECK(trace.substr(0, 10) == "x1_1,x2_1\n");

  // Sampling a continuous model goes through the same outputs.
  const std::string cd = work_dir() + "/gen_cont.csv";
  const std::string ct = work_dir() + "/gen_cont_trace.csv";
  CHECK(run("generate --model " + files().model + " --count 20 --seed 9 --out-data " + cd +
            " --out-trace " + ct)
            .code == 0);
  const auto cont = apcalc::parse_dataset_csv(slurp(cd));
  CHECK(cont.rows() == 20);
  CHECK(cont.n == 2);
  CHECK(cont.has_labels);
  const auto resampled = apcalc::sample_joint(fixtures::neta(), 20, 9);
  CHECK(cont.features == resampled.data.features);
  CHECK(cont.labels == resampled.data.labels);

  const auto truth_misuse = run("generate --model " + files().model + " --count 4 --out-data " +
                                work_dir() + "/x2.csv --out-truth " + work_dir() + "/t.json");
  CHECK(truth_misuse.code == 2);
  CHECK(has_code(truth_misuse, "usage"));
}

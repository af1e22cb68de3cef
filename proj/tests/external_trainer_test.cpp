#include <doctest.h>

#include <chrono>

#include "distopt/external_trainer.hpp"
#include "distopt/protocol.hpp"
#include "distopt/sampler.hpp"
#include "distopt/text_io.hpp"
#include "support.hpp"

using namespace distopt;

namespace {

const std::string kFake = std::string(DISTOPT_FIXTURE_DIR) + "/fake_trainer.py";

TrainerRequest fixture_request() {
  TrainerRequest r;
  r.run_id = "ext";
  r.iteration = 0;
  r.epochs = 4;
  r.window = {3, 3};
  r.class_table = {"bird", "cat", "dog"};
  return r;
}

SampledManifest fixture_sample() {
  const auto m = synthetic_manifest({"bird", "cat", "dog"}, {20, 20, 20});
  return sample_subset(m, {{5, 10, 15}, 0}, 1);
}

ExternalCommand fake(const std::string& mode, double timeout = 60.0) {
  return {{"python3", kFake, mode}, timeout};
}

}  // namespace

TEST_CASE("echoed fixture parses to the fixture") {
  ScratchDir dir("ext_echo");
  const auto r = invoke_external(fixture_request(), fixture_sample(), fake("echo"), dir.path / "b");
  const auto expected = response_from_json(read_text_file(std::string(DISTOPT_FIXTURE_DIR) + "/fixed_response.json"));
  CHECK(r == expected);
  CHECK(r.trainer.name == "fixture");
  CHECK(std::filesystem::exists(dir.path / "b" / "stdout.log"));
  CHECK(std::filesystem::exists(dir.path / "b" / "stderr.log"));
}

TEST_CASE("non-zero exit carries stderr") {
  ScratchDir dir("ext_fail");
  try {
    invoke_external(fixture_request(), fixture_sample(), fake("fail"), dir.path / "b");
    FAIL("expected NonZeroExit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonZeroExit);
    CHECK(std::string(e.what()).find("out of GPU memory") != std::string::npos);
    CHECK(std::string(e.what()).find("exit code 1") != std::string::npos);
  }
}

TEST_CASE("missing executable is a non-zero exit") {
  ScratchDir dir("ext_missing");
  CHECK_ERROR_CODE(invoke_external(fixture_request(), fixture_sample(), {{"/nonexistent/trainer"}, 10.0},
                                   dir.path / "b"),
                   ErrorCode::kNonZeroExit);
}

TEST_CASE("timeout kills the trainer") {
  ScratchDir dir("ext_timeout");
  const auto start = std::chrono::steady_clock::now();
  CHECK_ERROR_CODE(invoke_external(fixture_request(), fixture_sample(), fake("sleep", 0.5), dir.path / "b"),
                   ErrorCode::kTimeout);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(10));
}

TEST_CASE("bad responses are rejected") {
  ScratchDir dir("ext_bad");
  CHECK_ERROR_CODE(invoke_external(fixture_request(), fixture_sample(), fake("garbage"), dir.path / "g"),
                   ErrorCode::kMalformedResponse);
  CHECK_ERROR_CODE(invoke_external(fixture_request(), fixture_sample(), fake("silent"), dir.path / "s"),
                   ErrorCode::kMalformedResponse);
  CHECK_ERROR_CODE(invoke_external(fixture_request(), fixture_sample(), fake("short"), dir.path / "d"),
                   ErrorCode::kDimensionMismatch);
  CHECK_ERROR_CODE(invoke_external(fixture_request(), fixture_sample(), fake("nan"), dir.path / "n"),
                   ErrorCode::kNonFiniteObjective);
  CHECK_ERROR_CODE(invoke_external(fixture_request(), fixture_sample(), fake("range"), dir.path / "r"),
                   ErrorCode::kMalformedResponse);
}

TEST_CASE("external trainer names bundles by iteration") {
  ScratchDir dir("ext_named");
  ExternalTrainer t(fake("plateau"), dir.path);
  auto req = fixture_request();
  req.iteration = 12;
  const auto r = t.train(req, fixture_sample());
  CHECK(r.matrix.num_classes() == 3);
  CHECK(std::filesystem::exists(dir.path / "iter_000012" / "response.json"));
  CHECK(read_text_file(dir.path / "iter_000012" / "stdout.log") == "training 12\n");
}

TEST_CASE("empty command") {
  ScratchDir dir("ext_empty");
  CHECK_ERROR_CODE(invoke_external(fixture_request(), fixture_sample(), {}, dir.path / "b"), ErrorCode::kConfigInvalid);
}

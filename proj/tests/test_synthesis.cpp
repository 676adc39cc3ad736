#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lectern/synthesis.hpp"
#include "support/fixtures.hpp"
#include "support/mock_llm.hpp"

using namespace lectern;
using lectern::testing::MockLlm;

namespace {

ContextBlock entropy_context() {
  MergedMatch m;
  m.topic_path = {"Entropy", "Entropy generation"};
  m.pages = {{958, 962}};
  m.score = 21.0;
  return assemble_context({m}, testing::fixture_nav(), 5);
}

}  // namespace

TEST_CASE("fallback uses the top entry verbatim") {
  GroundedAnswer answer = fallback_answer(entropy_context());
  CHECK(answer.mode == AnswerMode::Fallback);
  CHECK(answer.body == "Check out \"Entropy > Entropy generation\" on pages 958--962.");
  REQUIRE(answer.references.size() == 1);
  CHECK(answer.references[0].chapter == "15");
  CHECK(answer.references[0].section == "15.7");
}

TEST_CASE("fallback on empty context") {
  GroundedAnswer answer = fallback_answer(ContextBlock{});
  CHECK(answer.body == "No matching topics found in the index.");
  CHECK(answer.references.empty());
}

TEST_CASE("single-page entries render without a range") {
  MergedMatch m;
  m.topic_path = {"Solid(s)", "fugacity of"};
  m.pages = {{320, 320}};
  m.score = 13.0;
  ContextBlock ctx = assemble_context({m}, testing::fixture_nav(), 5);
  GroundedAnswer answer = fallback_answer(ctx);
  CHECK(answer.body == "Check out \"Solid(s) > fugacity of\" on pages 320.");
}

TEST_CASE("fallback is byte-deterministic") {
  ContextBlock ctx = entropy_context();
  std::string first = render_answer(fallback_answer(ctx));
  for (int i = 0; i < 100; ++i) {
    CHECK(render_answer(fallback_answer(ctx)) == first);
  }
}

TEST_CASE("empty context answers honestly without calling the gateway") {
  MockLlm mock;
  LlmGateway gateway({.base_url = mock.url()});
  GroundedAnswer answer = synthesize("What is kryptonite?", ContextBlock{}, gateway);
  CHECK(answer.mode == AnswerMode::Fallback);
  CHECK(answer.body == "No matching topics found in the index.");
  CHECK(mock.request_count() == 0);
}

TEST_CASE("synthesis references only what the model actually cited") {
  MockLlm mock;
  LlmGateway gateway({.base_url = mock.url()});
  ContextBlock ctx = entropy_context();

  SUBCASE("cited pages become references") {
    mock.script("Entropy generation measures lost work. See pages 958--962 for the balance.");
    GroundedAnswer answer = synthesize("Where is entropy generation discussed?", ctx, gateway);
    CHECK(answer.mode == AnswerMode::Llm);
    REQUIRE(answer.references.size() == 1);
    CHECK(answer.references[0].topic == "Entropy > Entropy generation");
    CHECK(answer.references[0].pages == "958--962");
    std::string rendered = render_answer(answer);
    CHECK(rendered.find("References:") != std::string::npos);
    CHECK(rendered.find("Chapter 15, Section 15.7") != std::string::npos);
  }

  SUBCASE("uncited and invented pages never become references") {
    mock.script("This concept is best explained on page 123 of some other book.");
    GroundedAnswer answer = synthesize("Where?", ctx, gateway);
    CHECK(answer.mode == AnswerMode::Llm);
    CHECK(answer.references.empty());
    CHECK(render_answer(answer).find("References:") == std::string::npos);
  }

  SUBCASE("reference closure holds for every reply") {
    mock.script("Look at pages 958, 5000, and 17.");
    GroundedAnswer answer = synthesize("Where?", ctx, gateway);
    for (const auto& ref : answer.references) {
      bool in_context = false;
      for (const auto& entry : ctx.entries) {
        if (entry.topic_path == ref.topic && entry.pages == ref.pages) in_context = true;
      }
      CHECK(in_context);
    }
  }
}

TEST_CASE("gateway failure falls through to the fallback") {
  LlmGateway gateway({.base_url = lectern::testing::dead_endpoint(),
                      .request_timeout_s = 0.2,
                      .retry_count = 0});
  ContextBlock ctx = entropy_context();
  GroundedAnswer answer = synthesize("Where is entropy generation discussed?", ctx, gateway);
  CHECK(answer.mode == AnswerMode::Fallback);
  CHECK(answer.body == "Check out \"Entropy > Entropy generation\" on pages 958--962.");
}

TEST_CASE("the grounding prompt carries only the rendered context") {
  MockLlm mock;
  LlmGateway gateway({.base_url = mock.url()});
  ContextBlock ctx = entropy_context();
  mock.script("See pages 958--962.");
  synthesize("Where?", ctx, gateway);

  auto requests = mock.requests();
  REQUIRE(requests.size() == 1);
  CHECK(requests[0].prompt.find(ctx.rendered_text) != std::string::npos);
  CHECK(requests[0].temperature == doctest::Approx(0.6));
  CHECK(requests[0].system.find("only") != std::string::npos);
  CHECK_FALSE(requests[0].json_mode);
}

#include <gtest/gtest.h>

#include <random>

#include "rai/llm/hash_embedder.hpp"
#include "rai/whoami/bundle.hpp"
#include "rai/whoami/store.hpp"
#include "support/oracles.hpp"

using namespace rai::whoami;
namespace llm = rai::llm;

namespace {

std::shared_ptr<llm::Embedder> hash_embedder() { return std::make_shared<llm::HashEmbedder>(); }

std::string letters(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += static_cast<char>('a' + i % 26);
  return s;
}

// Enumerates chunk starts k * (size - overlap) while the previous chunk left
// part of the body uncovered.
std::vector<std::pair<std::size_t, std::size_t>> oracle_spans(std::size_t length, std::size_t size,
                                                             std::size_t overlap) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t stride = size - overlap;
  for (std::size_t start = 0;; start += stride) {
    const std::size_t end = std::min(start + size, length);
    out.emplace_back(start, end);
    if (end >= length) break;
  }
  return out;
}

IdentityBundle tractor_bundle() {
  return IdentityBundle::load(std::string(RAI_SCENARIO_DIR) + "/identity/tractor", hash_embedder());
}

}  // namespace

// ceil((250 - 20) / 80) = 3; the third window already reaches the end.
TEST(Chunking, LengthTwoFiftyFollowsCountFormula) {
  const auto spans = chunk_spans(250, {100, 20});
  ASSERT_EQ(spans.size(), 3u);
  const std::size_t starts[] = {0, 80, 160};
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(spans[i].first, starts[i]);
  EXPECT_EQ(spans.back().second, 250u);
}

TEST(Chunking, ShortDocumentSingleChunk) {
  const auto spans = chunk_spans(50, {100, 20});
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0], (std::pair<std::size_t, std::size_t>{0, 50}));
}

TEST(Chunking, ExactlyOneWindow) {
  EXPECT_EQ(chunk_count(100, {100, 20}), 1u);
  EXPECT_EQ(chunk_spans(100, {100, 20}).size(), 1u);
}

TEST(Chunking, RejectsBadOptions) {
  EXPECT_THROW(validate({31, 0}), std::invalid_argument);
  EXPECT_THROW(validate({64, 64}), std::invalid_argument);
  EXPECT_NO_THROW(validate({32, 31}));
}

TEST(ChunkingProperty, TilingMatchesFormulaAndEnumeration) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t size = 32 + rng() % 200;
    const std::size_t overlap = rng() % size;
    const std::size_t length = 1 + rng() % 2000;
    const auto spans = chunk_spans(length, {size, overlap});
    ASSERT_EQ(spans, oracle_spans(length, size, overlap)) << length << " " << size << " " << overlap;
    const std::size_t formula = (std::max<std::size_t>(length > overlap ? length - overlap : 0, 1) + (size - overlap) - 1) /
                                (size - overlap);
    ASSERT_EQ(spans.size(), formula);
    ASSERT_EQ(chunk_count(length, {size, overlap}), formula);
    ASSERT_EQ(spans.front().first, 0u);
    ASSERT_EQ(spans.back().second, length);
    for (std::size_t k = 0; k + 1 < spans.size(); ++k) {
      ASSERT_EQ(spans[k].second - spans[k + 1].first, overlap);
    }
  }
}

TEST(ChunkStore, IngestSlicesText) {
  ChunkStore store(hash_embedder());
  const std::string body = letters(250);
  store.ingest({{"doc", "Doc", body}}, {100, 20});
  ASSERT_EQ(store.size(), 3u);
  EXPECT_EQ(store.chunks()[1].text, body.substr(80, 100));
  EXPECT_EQ(store.chunks()[2].text, body.substr(160));
  EXPECT_EQ(store.chunks()[2].seq, 2u);
  EXPECT_EQ(store.chunks()[2].vector, llm::hash_embed(store.chunks()[2].text));
}

TEST(ChunkStore, OffsetsCountCodePoints) {
  ChunkStore store(hash_embedder());
  std::string body;
  for (int i = 0; i < 40; ++i) body += "\xc3\xa9";  // 40 x U+00E9
  store.ingest({{"doc", "", body}}, {32, 0});
  ASSERT_EQ(store.size(), 2u);
  EXPECT_EQ(store.chunks()[0].end, 32u);
  EXPECT_EQ(store.chunks()[1].text.size(), 16u);
}

TEST(ChunkStore, EmptyDocumentAndStore) {
  ChunkStore store(hash_embedder());
  EXPECT_THROW(store.ingest({{"doc", "", ""}}), EmptyDocument);
  EXPECT_THROW(store.query("x", 1), EmptyStore);
}

TEST(ChunkStore, ExactTextRanksFirst) {
  ChunkStore store(hash_embedder());
  store.ingest({{"a", "", "the tractor has a front camera"}, {"b", "", "orchard rows are four metres apart"},
                {"c", "", "battery lasts eight hours"}});
  const auto hits = store.query("orchard rows are four metres apart", 1);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].chunk.doc_id, "b");
  EXPECT_NEAR(hits[0].score, 1.0, 1e-9);
  EXPECT_EQ(store.query("camera", 10).size(), 3u);
  EXPECT_THROW(store.query("camera", 0), std::invalid_argument);
}

TEST(ChunkStore, TiesBreakByDocThenSeq) {
  ChunkStore store(hash_embedder());
  store.ingest({{"zeta", "", "same words here"}, {"alpha", "", "same words here"}, {"mid", "", "other stuff"}});
  const auto hits = store.query("same words here", 3);
  EXPECT_EQ(hits[0].chunk.doc_id, "alpha");
  EXPECT_EQ(hits[1].chunk.doc_id, "zeta");
}

TEST(ChunkStoreProperty, MatchesBruteForceScan) {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 40; ++round) {
    ChunkStore store(hash_embedder());
    std::vector<SourceDocument> docs;
    for (int d = static_cast<int>(1 + rng() % 6); d > 0; --d) {
      docs.push_back({"doc" + std::to_string(rng() % 100) + "_" + std::to_string(d), "", rai::testing::random_text(rng, 5 + rng() % 60)});
    }
    store.ingest(docs, {32 + rng() % 40, rng() % 16});
    const std::string q = rai::testing::random_text(rng, 1 + rng() % 4);
    for (std::size_t k : {std::size_t{1}, std::size_t{5}, store.size() + 10}) {
      const auto got = store.query(q, k);
      const auto want = rai::testing::brute_force_top_k(store, q, k, llm::kDefaultEmbeddingDim);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        ASSERT_EQ(got[i].chunk.doc_id, want[i].doc_id);
        ASSERT_EQ(got[i].chunk.seq, want[i].seq);
        ASSERT_NEAR(got[i].score, want[i].score, 1e-12);
      }
    }
  }
}

TEST(Bundle, LoadsShippedTractorBundle) {
  const auto b = tractor_bundle();
  EXPECT_FALSE(b.identity_text.empty());
  EXPECT_FALSE(b.rules_text.empty());
  ASSERT_TRUE(b.store);
  EXPECT_FALSE(b.store->empty());
  ASSERT_TRUE(b.assets.count("tractor_photo"));
  EXPECT_EQ(b.assets.at("tractor_photo").kind, Asset::Kind::kImage);
  EXPECT_EQ(b.assets.at("tractor_body").kind, Asset::Kind::kBodyDescription);
  EXPECT_FALSE(b.assets.at("tractor_body").text.empty());
}

TEST(Bundle, MissingDirectoryIsError) {
  EXPECT_THROW(IdentityBundle::load("/nonexistent/bundle", hash_embedder()), BundleError);
}

TEST(SystemPrompt, TemplateOrderAndDeterminism) {
  const auto b = tractor_bundle();
  const auto with_rules = build_system_prompt(b, {true});
  const auto id_at = with_rules.find(b.identity_text);
  const auto rules_at = with_rules.find(b.rules_text);
  ASSERT_NE(id_at, std::string::npos);
  ASSERT_NE(rules_at, std::string::npos);
  EXPECT_LT(id_at, rules_at);
  EXPECT_NE(with_rules.find(kQueryIdentityHint), std::string::npos);
  EXPECT_EQ(with_rules, build_system_prompt(tractor_bundle(), {true}));
  EXPECT_EQ(build_system_prompt(b, {false}).find(b.rules_text), std::string::npos);
}

TEST(Embodiment, VisualConditionHasOneImagePart) {
  const auto b = tractor_bundle();
  const auto visual = attach_self_image(b, "tractor_photo");
  const auto conv = open_conversation("sys", visual, "what is ahead?");
  ASSERT_EQ(conv.size(), 2u);
  EXPECT_EQ(conv[1].role, llm::Role::kUser);
  EXPECT_EQ(conv[1].image_count(), 1u);
  std::size_t images = 0;
  for (const auto& m : open_conversation("sys", language_only(), "what is ahead?")) images += m.image_count();
  EXPECT_EQ(images, 0u);
}

TEST(Embodiment, AttachErrors) {
  const auto b = tractor_bundle();
  EXPECT_THROW(attach_self_image(b, "missing"), UnknownAsset);
  EXPECT_THROW(attach_self_image(b, "tractor_body"), WrongKind);
}

TEST(Embodiment, LoadImageReadsPng) {
  const auto b = tractor_bundle();
  const auto img = load_image(b, "tractor_photo");
  ASSERT_TRUE(img);
  EXPECT_EQ(img->mime, "image/png");
  EXPECT_EQ(img->bytes.substr(1, 3), "PNG");
  EXPECT_FALSE(load_image(b, "tractor_body"));
}
